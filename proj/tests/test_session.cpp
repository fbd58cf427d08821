#include <doctest.h>

#include <chrono>
#include <cstdlib>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "footsim/server.hpp"
#include "json.hpp"

using namespace footsim;
using nlohmann::json;

namespace {

ScenarioConfig single() {
    ScenarioConfig cfg;
    cfg.id = "single";
    cfg.seed = 4;
    return cfg;
}

json first_of(const std::vector<std::string>& msgs, const std::string& type) {
    for (const std::string& m : msgs) {
        json j = json::parse(m);
        if (j["type"] == type) return j;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("FSM colors follow the display code") {
    CHECK(fsm_color(FsmState::move) == "red");
    CHECK(fsm_color(FsmState::trap) == "yellow");
    CHECK(fsm_color(FsmState::dribble) == "green");
    CHECK(fsm_color(FsmState::kick) == "blue");
}

TEST_CASE("input messages parse, clamp and round trip") {
    const InputMessage m = parse_input_message(
        R"({"type":"input","seq":9,"move":[3,4],"face":[0,0.5],"triggers":[0.2,1.4],"buttons":["lb","b"],"switch":-1})");
    CHECK(m.seq == 9);
    CHECK(norm(m.pad.left_stick) == doctest::Approx(1.0));
    CHECK(m.pad.right_stick.y == 0.5);
    CHECK(m.pad.left_trigger == 0.2);
    CHECK(m.pad.right_trigger == 1.0);
    CHECK(m.pad.left_bumper);
    CHECK(!m.pad.right_bumper);
    CHECK(m.pad.b);
    CHECK(m.pad.dpad == -1);
    const InputMessage back = parse_input_message(input_message_json(m));
    CHECK(input_message_json(back) == input_message_json(m));

    CHECK_THROWS_AS(parse_input_message("{"), Error);
    CHECK_THROWS_AS(parse_input_message(R"({"type":"frame"})"), Error);
    CHECK_THROWS_AS(parse_input_message(R"({"type":"input","move":[1]})"), Error);
    CHECK_THROWS_AS(parse_input_message(R"({"type":"input","buttons":["x"]})"), Error);
    CHECK_THROWS_AS(parse_input_message(R"({"type":"input","seq":-2})"), Error);
}

TEST_CASE("session frames carry state colors and the applied input") {
    Session s(single());
    const auto first = s.tick();
    const json frame = json::parse(first.front());
    CHECK(frame["type"] == "frame");
    CHECK(frame["tick"] == 1);
    CHECK(frame["input_seq"] == 0);
    CHECK(frame["input_received_tick"].is_null());
    REQUIRE(frame["players"].size() == s.scenario().agents().size());
    for (const json& p : frame["players"]) {
        const auto st = fsm_state_from_string(p["state"].get<std::string>());
        REQUIRE(st);
        CHECK(p["color"] == std::string(fsm_color(*st)));
        CHECK(p["feet"].size() == 2);
    }
    CHECK(frame["ball"]["pos"].size() == 3);

    // An error message comes back for malformed input; the session keeps going.
    const auto err = s.submit_text("not json");
    REQUIRE(err);
    CHECK(json::parse(*err)["type"] == "error");

    for (int i = 0; i < 5; ++i) s.tick();
    InputMessage in;
    in.seq = 3;
    in.pad.left_stick = {0.0, -1.0};
    s.submit(in);
    const std::uint64_t received = s.current_tick();
    const json applied = first_of(s.tick(), "frame");
    CHECK(applied["input_seq"] == 3);
    CHECK(applied["input_received_tick"] == received);
    CHECK(applied["tick"].get<std::uint64_t>() - received == 1);
    // The controlled player now follows the stick.
    const int me = s.scenario().controlled();
    const auto& goal = s.scenario().frame().players[static_cast<std::size_t>(me)].goal;
    REQUIRE(goal);
    if (const auto* mg = std::get_if<MoveGoal>(&*goal)) CHECK(mg->vel.y == doctest::Approx(-kMaxRunSpeed));
    if (const auto* dg = std::get_if<DribbleGoal>(&*goal)) CHECK(dg->vel.y == doctest::Approx(-kMaxRunSpeed));
}

TEST_CASE("session sends events and a metrics snippet every second") {
    ScenarioConfig cfg = single();
    cfg.id = "give-and-go";
    Session s(cfg);
    int transitions = 0;
    int metrics = 0;
    for (int i = 0; i < 300; ++i) {
        for (const std::string& m : s.tick()) {
            const json j = json::parse(m);
            if (j["type"] == "event" && j["kind"] == "transition") {
                ++transitions;
                CHECK(j.contains("from"));
                CHECK(j.contains("trigger"));
            }
            if (j["type"] == "metrics") {
                ++metrics;
                CHECK(j["window_ticks"] == 30);
                CHECK(j["mean_reward"].size() == 4);
            }
        }
    }
    CHECK(transitions > 0);
    CHECK(metrics == 10);
}

TEST_CASE("default port comes from the environment") {
    ::unsetenv(kPortEnv);
    CHECK(default_port() == kDefaultPort);
    ::setenv(kPortEnv, "9123", 1);
    CHECK(default_port() == 9123);
    ::setenv(kPortEnv, "http", 1);
    CHECK_THROWS_AS(default_port(), Error);
    ::unsetenv(kPortEnv);
}

TEST_CASE("server applies inputs within one tick over a WebSocket") {
    namespace beast = boost::beast;
    namespace websocket = beast::websocket;
    using tcp = boost::asio::ip::tcp;

    ServerConfig cfg;
    cfg.port = 0;
    cfg.scenario = single();
    cfg.tick_rate = 120.0;
    SessionServer server(cfg);
    const std::uint16_t port = server.start();
    REQUIRE(port != 0);

    boost::asio::io_context ioc;
    tcp::resolver resolver(ioc);
    websocket::stream<tcp::socket> ws(ioc);
    boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/");

    auto read_json = [&] {
        beast::flat_buffer buf;
        ws.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    };

    json frame = read_json();
    while (frame["type"] != "frame") frame = read_json();
    CHECK(frame["players"].size() == 1);

    InputMessage in;
    in.seq = 77;
    in.pad.left_stick = {0.0, 1.0};
    ws.write(boost::asio::buffer(input_message_json(in)));
    bool applied = false;
    for (int i = 0; i < 500 && !applied; ++i) {
        const json j = read_json();
        if (j["type"] != "frame" || j["input_seq"] != 77) continue;
        applied = true;
        CHECK(j["tick"].get<std::uint64_t>() - j["input_received_tick"].get<std::uint64_t>() <= 1);
    }
    CHECK(applied);

    ws.write(boost::asio::buffer(std::string("garbage")));
    bool error_seen = false;
    for (int i = 0; i < 500 && !error_seen; ++i) error_seen = read_json()["type"] == "error";
    CHECK(error_seen);

    beast::error_code ec;
    ws.close(websocket::close_code::normal, ec);
    server.stop();
}

TEST_CASE("server rejects bad configurations") {
    ServerConfig cfg;
    cfg.scenario.id = "nope";
    CHECK_THROWS_AS(SessionServer{cfg}, Error);
    cfg.scenario = single();
    cfg.address = "not-an-address";
    SessionServer bad(cfg);
    CHECK_THROWS_AS(bad.start(), Error);
}
