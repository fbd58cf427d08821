// footsim command-line tool: simulate, evaluate, train, build-sti, replay, serve.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <pthread.h>

#include "CLI11.hpp"
#include "footsim/config.hpp"
#include "footsim/server.hpp"

using namespace footsim;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> policy_paths;
    std::vector<std::string> sti_paths;
    std::string degcl_path;
};

void add_common(CLI::App* cmd, Common& c, bool with_sti) {
    cmd->add_option("--config", c.config_path, "JSON run config")->check(CLI::ExistingFile);
    cmd->add_option("--policy", c.policy_paths, "Policy file; replaces the analytic policy of its skill")
        ->check(CLI::ExistingFile);
    if (with_sti) {
        cmd->add_option("--sti", c.sti_paths, "Start-state buffer file; its header names the skill")
            ->check(CLI::ExistingFile);
        cmd->add_option("--degcl", c.degcl_path, "DEGCL reference file (built from the motion config if absent)")
            ->check(CLI::ExistingFile);
    }
}

RunConfig load(const Common& c) { return c.config_path.empty() ? parse_config("{}") : load_config(c.config_path); }

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw Error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw Error("cannot write " + path);
    return out;
}

PolicySet load_policies(const Common& c) {
    PolicySet set;
    for (const std::string& path : c.policy_paths) {
        auto in = open_in(path, std::ios::binary);
        SkillPolicy p = read_policy(in);
        set[p.skill] = std::move(p);
    }
    return set;
}

/// Owns loaded buffers so StiBuffers can point into them.
struct Buffers {
    std::map<Skill, StiBuffer> owned;
    std::optional<DegclBuffer> degcl;

    StiBuffers view() const {
        StiBuffers b;
        if (auto it = owned.find(Skill::move); it != owned.end()) b.move = &it->second;
        if (auto it = owned.find(Skill::trap); it != owned.end()) b.trap = &it->second;
        if (auto it = owned.find(Skill::dribble); it != owned.end()) b.dribble = &it->second;
        return b;
    }
};

Buffers load_buffers(const Common& c, const RunConfig& cfg, std::uint64_t hash) {
    Buffers b;
    for (const std::string& path : c.sti_paths) {
        auto in = open_in(path, std::ios::binary);
        StiFileHeader h;
        StiBuffer buf = read_sti(in, &h);
        if (h.config_hash != hash) std::cerr << "warning: " << path << " was recorded under another config\n";
        const Skill s = buf.source();
        b.owned.erase(s);
        b.owned.emplace(s, std::move(buf));
    }
    if (!c.degcl_path.empty()) {
        auto in = open_in(c.degcl_path);
        b.degcl = read_degcl(in);
    } else {
        b.degcl = build_degcl_buffer(cfg.motion);
    }
    return b;
}

Skill parse_skill(const std::string& name) {
    const auto s = skill_from_string(name);
    if (!s) throw Error("unknown skill '" + name + "' (expected move, trap, dribble or kick)");
    return *s;
}

void write_trajectory(const std::string& path, const Trajectory& t) {
    auto out = open_out(path);
    write_jsonl(out, t);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c, const std::string& scenario, std::optional<std::uint64_t> seed,
                 const std::string& record, std::optional<std::uint64_t> ticks) {
    const RunConfig rc = load(c);
    ScenarioConfig sc = rc.scenario_config();
    if (!scenario.empty()) sc.id = scenario;
    if (seed) sc.seed = *seed;
    auto sim = make_scenario(sc, load_policies(c));
    Trajectory t;
    t.header = sim->header(config_hash(rc));
    std::map<std::string, int> entered;
    std::size_t transitions = 0;
    while (!sim->finished() && (!ticks || sim->tick() < *ticks)) {
        sim->step();
        for (const TransitionRecord& tr : sim->frame().transitions) {
            ++entered[std::string(to_string(tr.to))];
            ++transitions;
        }
        if (!record.empty()) t.frames.push_back(sim->frame());
    }
    if (!record.empty()) write_trajectory(record, t);
    std::cout << "scenario " << sc.id << " seed " << sc.seed << ": " << sim->tick() << " ticks ("
              << sim->time() << " s), " << (sim->completed() ? "completed" : "not completed") << "\n";
    std::cout << "transitions " << transitions;
    for (const auto& [state, n] : entered) std::cout << ", to " << state << " " << n;
    std::cout << "\n";
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& protocol, std::optional<std::uint64_t> seed,
                 std::optional<double> scale, const std::string& report, const std::string& record,
                 const std::string& label) {
    const RunConfig rc = load(c);
    ProtocolConfig pc = rc.protocol_config();
    if (seed) pc.seed = *seed;
    if (scale) pc.scale = *scale;
    pc.label = label;
    const Buffers b = load_buffers(c, rc, pc.config_hash);
    pc.buffers = b.view();
    pc.degcl = &*b.degcl;
    const ProtocolRun run = run_protocol(protocol, load_policies(c), pc);
    write_reports_table(std::cout, run.reports);
    if (!report.empty()) {
        auto out = open_out(report);
        write_reports_csv(out, run.reports);
    }
    if (!record.empty()) write_trajectory(record, run.trajectory);
    return 0;
}

int cmd_train(const Common& c, const std::string& skill_name, const std::string& out_path,
              std::optional<std::uint64_t> seed, const std::string& log_path) {
    const Skill skill = parse_skill(skill_name);
    const RunConfig rc = load(c);
    TrainConfig tc = rc.train_config();
    if (seed) tc.seed = *seed;
    const Buffers b = load_buffers(c, rc, config_hash(rc));
    const TrainResult r = train(skill, tc, b.view(), &*b.degcl);
    auto out = open_out(out_path, std::ios::binary);
    write_policy(out, r.policy);
    if (!log_path.empty()) {
        auto log = open_out(log_path);
        write_train_log_csv(log, r.log);
    }
    std::cout << "trained " << to_string(skill) << ": baseline mean " << r.baseline_mean << ", best " << r.best_fitness
              << " after " << r.log.size() << " iterations\n";
    return 0;
}

int cmd_build_sti(const Common& c, const std::string& skill_name, const std::string& policy_path, std::size_t count,
                  const std::string& out_path, std::optional<std::uint64_t> seed) {
    const Skill skill = parse_skill(skill_name);
    if (skill == Skill::kick) throw Error("kick records no start-state buffer");
    const RunConfig rc = load(c);
    SkillPolicy policy = SkillPolicy::analytic(skill);
    if (!policy_path.empty() && policy_path != "analytic") {
        auto in = open_in(policy_path, std::ios::binary);
        policy = read_policy(in);
        if (policy.skill != skill) throw Error("policy " + policy_path + " is not a " + skill_name + " policy");
    }
    const std::uint64_t hash = config_hash(rc);
    const Buffers b = load_buffers(c, rc, hash);
    const std::uint64_t s = seed.value_or(rc.sim.seed);
    Rng rng(s);
    const StiBuffer buf = build_sti_buffer(policy, count, b.view(), &*b.degcl, rng, rc.rollout());
    auto out = open_out(out_path, std::ios::binary);
    write_sti(out, buf, s, hash);
    std::cout << "recorded " << buf.size() << " " << to_string(skill) << " snapshots\n";
    return 0;
}

int cmd_replay(const Common& c, const std::string& path, bool metrics, const std::string& report) {
    auto in = open_in(path);
    const Trajectory t = read_jsonl(in);
    const RunConfig rc = load(c);
    if (t.header.config_hash != config_hash(rc)) {
        std::cerr << "warning: config hash " << hex64(t.header.config_hash) << " in " << path
                  << " differs from the active config " << hex64(config_hash(rc)) << "\n";
    }
    if (!metrics) {
        std::size_t transitions = 0;
        for (const TrajectoryFrame& f : t.frames) transitions += f.transitions.size();
        std::cout << t.header.source << ": " << t.frames.size() << " frames, " << transitions << " transitions\n";
        return 0;
    }
    const DegclBuffer degcl = build_degcl_buffer(rc.motion);
    const auto reports = protocol_reports(t, &degcl);
    if (report.empty()) {
        write_reports_csv(std::cout, reports);
    } else {
        auto out = open_out(report);
        write_reports_csv(out, reports);
    }
    return 0;
}

int cmd_serve(const Common& c, std::optional<int> port, const std::string& address, const std::string& scenario,
              std::optional<std::uint64_t> seed) {
    const RunConfig rc = load(c);
    ServerConfig sc;
    sc.address = address;
    if (port && (*port < 0 || *port > 65535)) throw Error("port must be in [0, 65535]");
    sc.port = port ? static_cast<std::uint16_t>(*port) : default_port();
    sc.scenario = rc.scenario_config();
    if (!scenario.empty()) sc.scenario.id = scenario;
    if (seed) sc.scenario.seed = *seed;
    sc.policies = load_policies(c);

    // Signals are taken synchronously by this thread; the server threads
    // inherit the blocked mask.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    SessionServer server(sc);
    const std::uint16_t bound = server.start();
    std::cout << "serving scenario " << sc.scenario.id << " on ws://" << address << ":" << bound << std::endl;
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"football skill simulation and evaluation"};
    app.require_subcommand(1);
    Common common;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> ticks;
    std::optional<double> scale;
    std::optional<int> port;
    std::string scenario, record, report, protocol, skill, out, policy, log, path, label, address{"127.0.0.1"};
    std::size_t count = 0;
    bool metrics = false;

    auto* sim = app.add_subcommand("simulate", "Run a scenario with its scripted players");
    sim->add_option("--scenario", scenario, "Scenario id")->check(CLI::IsMember(scenario_ids()));
    sim->add_option("--seed", seed, "Scenario seed");
    sim->add_option("--record", record, "Write the trajectory as JSON Lines");
    sim->add_option("--ticks", ticks, "Stop after this many control ticks");
    add_common(sim, common, false);

    auto* eval = app.add_subcommand("evaluate", "Run an evaluation protocol and print its metrics");
    std::vector<std::string> protocol_ids;
    for (const ProtocolInfo& p : protocols()) protocol_ids.push_back(p.id);
    eval->add_option("protocol", protocol, "Protocol id")->required()->check(CLI::IsMember(protocol_ids));
    eval->add_option("--seed", seed, "Protocol seed");
    eval->add_option("--scale", scale, "Fraction of the full trial counts")->check(CLI::PositiveNumber);
    eval->add_option("--report", report, "Write the metrics CSV here");
    eval->add_option("--record", record, "Write the protocol trajectory as JSON Lines");
    eval->add_option("--label", label, "Row label in the reports");
    add_common(eval, common, true);

    auto* tr = app.add_subcommand("train", "Train a parametric skill policy");
    tr->add_option("--skill", skill, "move, trap, dribble or kick")->required();
    tr->add_option("--out", out, "Policy output file")->required();
    tr->add_option("--seed", seed, "Training seed (overrides the config)");
    tr->add_option("--log", log, "Write the per-iteration log CSV here");
    add_common(tr, common, true);

    auto* sti = app.add_subcommand("build-sti", "Record a start-state buffer from a policy");
    sti->add_option("--skill", skill, "Source skill: move, trap or dribble")->required();
    sti->add_option("--policy", policy, "Policy file, or 'analytic'")->default_val("analytic");
    sti->add_option("--count", count, "Snapshots to record")->required()->check(CLI::PositiveNumber);
    sti->add_option("--out", out, "Buffer output file")->required();
    sti->add_option("--seed", seed, "Rollout seed");
    sti->add_option("--config", common.config_path, "JSON run config")->check(CLI::ExistingFile);
    sti->add_option("--sti", common.sti_paths, "Predecessor buffer file")->check(CLI::ExistingFile);
    sti->add_option("--degcl", common.degcl_path, "DEGCL reference file")->check(CLI::ExistingFile);

    auto* rep = app.add_subcommand("replay", "Read a recorded trajectory");
    rep->add_option("path", path, "Trajectory JSON Lines file")->required()->check(CLI::ExistingFile);
    rep->add_flag("--metrics", metrics, "Recompute the protocol metrics as CSV");
    rep->add_option("--report", report, "Write the CSV here instead of stdout");
    rep->add_option("--config", common.config_path, "JSON run config")->check(CLI::ExistingFile);

    auto* srv = app.add_subcommand("serve", "Serve a scenario over WebSocket");
    srv->add_option("--port", port, std::string("Listen port (default $") + kPortEnv + " or 8765)");
    srv->add_option("--address", address, "Listen address");
    srv->add_option("--scenario", scenario, "Scenario id")->check(CLI::IsMember(scenario_ids()));
    srv->add_option("--seed", seed, "Scenario seed");
    add_common(srv, common, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(common, scenario, seed, record, ticks);
        if (*eval) return cmd_evaluate(common, protocol, seed, scale, report, record, label);
        if (*tr) return cmd_train(common, skill, out, seed, log);
        if (*sti) return cmd_build_sti(common, skill, policy, count, out, seed);
        if (*rep) return cmd_replay(common, path, metrics, report);
        if (*srv) return cmd_serve(common, port, address, scenario, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
