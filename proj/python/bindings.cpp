#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "footsim/config.hpp"
#include "footsim/session.hpp"

namespace py = pybind11;
using namespace footsim;

namespace {

PassKind pass_kind(const std::string& s) {
    if (s == "lob") return PassKind::lob;
    if (s == "ground") return PassKind::ground;
    throw Error("pass kind must be 'lob' or 'ground', got '" + s + "'");
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["protocol"] = r.protocol;
    d["label"] = r.label;
    d["metric"] = r.metric;
    d["value"] = r.value ? py::object(py::float_(*r.value)) : py::object(py::none());
    d["unit"] = r.unit;
    d["count"] = r.count;
    return d;
}

py::dict evaluate(const std::string& protocol, std::uint64_t seed, double scale, const std::string& config_json,
                  const std::string& label) {
    const RunConfig rc = parse_config(config_json);
    ProtocolConfig pc = rc.protocol_config();
    pc.seed = seed;
    pc.scale = scale;
    pc.label = label;
    ProtocolRun run;
    {
        py::gil_scoped_release release;
        run = run_protocol(protocol, PolicySet{}, pc);
    }
    py::list reports;
    for (const MetricReport& r : run.reports) reports.append(report_dict(r));
    std::ostringstream csv, table, traj;
    write_reports_csv(csv, run.reports);
    write_reports_table(table, run.reports);
    write_jsonl(traj, run.trajectory);
    py::dict out;
    out["reports"] = reports;
    out["csv"] = csv.str();
    out["table"] = table.str();
    out["trajectory"] = traj.str();
    return out;
}

std::string replay_metrics(const std::string& jsonl) {
    std::istringstream in(jsonl);
    const Trajectory t = read_jsonl(in);
    const DegclBuffer degcl = build_degcl_buffer();
    std::ostringstream csv;
    write_reports_csv(csv, protocol_reports(t, &degcl));
    return csv.str();
}

/// Scenario driven from Python; the script plays unless a pad dict is passed.
class PyScenario {
public:
    PyScenario(const std::string& id, std::uint64_t seed, const std::string& config_json) {
        ScenarioConfig cfg = parse_config(config_json).scenario_config();
        cfg.id = id;
        cfg.seed = seed;
        sc_ = make_scenario(cfg);
    }

    void step(const std::optional<std::string>& input_json) {
        if (input_json) {
            const InputMessage m = parse_input_message(*input_json);
            sc_->step(&m.pad);
        } else {
            sc_->step();
        }
    }

    void run(std::uint64_t ticks) {
        py::gil_scoped_release release;
        for (std::uint64_t i = 0; i < ticks && !sc_->finished(); ++i) sc_->step();
    }

    std::string frame_json() const { return frame_message(*sc_, 0, std::nullopt); }

    std::vector<std::string> states() const {
        std::vector<std::string> out;
        for (const Agent& a : sc_->agents()) out.emplace_back(to_string(a.fsm.state()));
        return out;
    }

    py::list transitions() const {
        py::list out;
        for (const TransitionRecord& t : sc_->frame().transitions) {
            py::dict d;
            d["tick"] = t.tick;
            d["player"] = t.player;
            d["from"] = std::string(to_string(t.from));
            d["to"] = std::string(to_string(t.to));
            d["trigger"] = std::string(to_string(t.trigger));
            out.append(d);
        }
        return out;
    }

    const Scenario& get() const { return *sc_; }

private:
    std::unique_ptr<Scenario> sc_;
};

}  // namespace

PYBIND11_MODULE(_footsim, m) {
    m.doc() = "Football skill simulation core";
    py::register_exception<Error>(m, "FootsimError", PyExc_ValueError);

    m.def("protocol_ids", [] {
        std::vector<std::string> ids;
        for (const ProtocolInfo& p : protocols()) ids.push_back(p.id);
        return ids;
    });
    m.def("scenario_ids", [] { return scenario_ids(); });
    m.def("fsm_color", [](const std::string& s) {
        const auto st = fsm_state_from_string(s);
        if (!st) throw Error("unknown FSM state '" + s + "'");
        return std::string(fsm_color(*st));
    });

    m.def(
        "solve_pass",
        [](const std::string& kind, std::array<double, 3> launch, std::array<double, 2> landing, double phi_deg,
           double gravity) {
            const Vec3 v = solve_pass({pass_kind(kind), {launch[0], launch[1], launch[2]}, {landing[0], landing[1]},
                                       deg_to_rad(phi_deg)},
                                      gravity);
            return std::array<double, 3>{v.x, v.y, v.z};
        },
        py::arg("kind"), py::arg("launch"), py::arg("landing"), py::arg("phi_deg") = 45.0, py::arg("gravity") = 9.8,
        "Kick velocity carrying the ball from launch to landing.");

    m.def("canonical_config", [](const std::string& j) { return to_json(parse_config(j)); },
          py::arg("config_json") = "{}");
    m.def("config_hash", [](const std::string& j) { return config_hash(parse_config(j)); },
          py::arg("config_json") = "{}");

    m.def("evaluate", &evaluate, py::arg("protocol"), py::arg("seed") = 0, py::arg("scale") = 1.0,
          py::arg("config_json") = "{}", py::arg("label") = "",
          "Runs a protocol; returns reports, CSV, table and the JSONL trajectory.");
    m.def("replay_metrics", &replay_metrics, py::arg("jsonl"), "Metric CSV recomputed from a protocol trajectory.");

    py::class_<PyScenario>(m, "Scenario")
        .def(py::init<const std::string&, std::uint64_t, const std::string&>(), py::arg("id"), py::arg("seed") = 1,
             py::arg("config_json") = "{}")
        .def("step", &PyScenario::step, py::arg("input_json") = std::nullopt)
        .def("run", &PyScenario::run, py::arg("ticks"))
        .def("frame_json", &PyScenario::frame_json)
        .def("states", &PyScenario::states)
        .def("transitions", &PyScenario::transitions, "Transitions of the most recent tick.")
        .def_property_readonly("tick", [](const PyScenario& s) { return s.get().tick(); })
        .def_property_readonly("time", [](const PyScenario& s) { return s.get().time(); })
        .def_property_readonly("finished", [](const PyScenario& s) { return s.get().finished(); })
        .def_property_readonly("completed", [](const PyScenario& s) { return s.get().completed(); })
        .def_property_readonly("controlled", [](const PyScenario& s) { return s.get().controlled(); });

    py::class_<Session>(m, "Session")
        .def(py::init([](const std::string& id, std::uint64_t seed, const std::string& config_json) {
                 ScenarioConfig cfg = parse_config(config_json).scenario_config();
                 cfg.id = id;
                 cfg.seed = seed;
                 return std::make_unique<Session>(cfg);
             }),
             py::arg("id"), py::arg("seed") = 1, py::arg("config_json") = "{}")
        .def("submit", &Session::submit_text, py::arg("message"), "Queues a client message; returns an error reply.")
        .def("tick", &Session::tick, "Advances one tick and returns the outgoing messages.")
        .def_property_readonly("current_tick", &Session::current_tick);
}
