// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Pass criterion names as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "footsim/fsm.hpp"
#include "footsim/protocols.hpp"
#include "footsim/scenarios.hpp"
#include "fsm_oracle.hpp"
#include "metric_oracles.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace footsim;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;
};

// Collects failed checks; the first few messages end up in the detail line.
class Checker {
public:
    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (failures_++ < 3) notes_.push_back(what);
    }
    void note(const std::string& s) { info_.push_back(s); }
    Outcome done() const {
        std::string d;
        for (const auto& s : info_) d += (d.empty() ? "" : "; ") + s;
        if (failures_ > 0) {
            d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failed check(s)";
            for (const auto& s : notes_) d += " [" + s + "]";
        }
        return {failures_ == 0, d};
    }

private:
    int failures_{0};
    std::vector<std::string> notes_;
    std::vector<std::string> info_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_reports(const std::vector<MetricReport>& a, const std::vector<MetricReport>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].metric != b[i].metric || a[i].label != b[i].label || a[i].count != b[i].count) return false;
        if (a[i].value.has_value() != b[i].value.has_value()) return false;
        if (a[i].value && *a[i].value != *b[i].value) return false;
    }
    return true;
}

CharacterState character_at(Vec2 pos, Vec2 vel, Vec2 facing) {
    CharacterState c = rest_pose(pos, facing);
    c.root_vel = lift(vel);
    return c;
}

BallState ball_at(Vec3 pos, Vec3 vel) {
    BallState b;
    b.pos = pos;
    b.vel = vel;
    return b;
}

// ---------------------------------------------------------------------------

Outcome projectile() {
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    const SimConfig cfg = testing::drag_free();
    const double g = cfg.gravity;
    Rng rng(101);
    double worst_identity = 0.0, worst_landing = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double v0 = rng.uniform(10.0, 30.0);
        const double phi = deg_to_rad(rng.uniform(10.0, 45.0));
        const Flight f = lob_flight(v0, phi, g);
        const double t = 2.0 * v0 * std::sin(phi) / g;
        const double d = v0 * v0 * std::sin(2.0 * phi) / g;
        worst_identity = std::max({worst_identity, std::abs(f.time - t), std::abs(f.distance - d)});

        BallState b;
        const double yaw = rng.uniform(-kPi, kPi);
        b.pos = {rng.uniform(-20, 20), rng.uniform(-20, 20), b.radius};
        b.vel = {v0 * std::cos(phi) * std::cos(yaw), v0 * std::cos(phi) * std::sin(yaw), v0 * std::sin(phi)};
        const Vec2 expect = b.pos.xy() + Vec2{std::cos(yaw), std::sin(yaw)} * d;
        const auto land = testing::simulate_landing(b, cfg);
        ck.require(land.has_value(), "lob never landed");
        if (land) worst_landing = std::max(worst_landing, norm(*land - expect));
    }
    const double wall = seconds_since(t0);
    ck.require(worst_identity <= 1e-12, "closed-form identity off by " + fmt("%.3g", worst_identity));
    ck.require(worst_landing <= 0.05, "landing off by " + fmt("%.4f m", worst_landing));
    ck.require(wall < 10.0, "took " + fmt("%.1f s", wall));
    ck.note("1000 lobs, identity err " + fmt("%.2g", worst_identity) + ", landing err " +
            fmt("%.4f m", worst_landing) + ", " + fmt("%.2f s", wall));
    return ck.done();
}

Outcome reward_oracles() {
    Checker ck;
    Rng rng(2024);
    const RewardConfig cfg;
    const double eps = cfg.epsilon;
    double worst = 0.0;
    auto cmp = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Vec2 t = rng.in_disc(7.0);
        const Vec2 root = rng.in_disc(20.0);
        const Vec2 bpos = root + rng.in_disc(3.0);
        const Vec2 bvel = rng.in_disc(8.0);
        const Vec2 rvel = rng.in_disc(7.0);
        const Vec2 face = rng.unit_circle();
        const Vec2 cf = rng.unit_circle();
        const CharacterState c = character_at(root, rvel, cf);

        const BallState db = ball_at(lift(bpos, BallState{}.radius), lift(bvel));
        cmp(dribble_reward({t}, db, c, cfg).total,
            oracle::dribble(t.x, t.y, bpos.x, bpos.y, bvel.x, bvel.y, root.x, root.y, rvel.x, rvel.y, eps));

        const double task = move_task_reward({t, face}, c, cfg).total;
        cmp(task, oracle::move_task(t.x, t.y, rvel.x, rvel.y, face.x, face.y, cf.x, cf.y, eps));

        std::vector<double> ra(8), rb(8);
        for (auto& x : ra) x = rng.uniform(-1, 1);
        for (auto& x : rb) x = rng.uniform(-1, 1);
        double na = 0, nb = 0, dab = 0;
        for (int k = 0; k < 8; ++k) {
            na += ra[k] * ra[k];
            nb += rb[k] * rb[k];
            dab += ra[k] * rb[k];
        }
        const double sim = dab / (std::sqrt(na) * std::sqrt(nb));
        const Latent la = Latent::from_raw(ra);
        const Latent lb = Latent::from_raw(rb);
        cmp(move_reward({t, face}, c, true, &la, lb, cfg), oracle::move_total(task, sim, true));
        cmp(move_reward({t, face}, c, false, nullptr, lb, cfg), oracle::move_total(task, sim, false));

        const BodyPart part = kBodyParts[rng.next_u64() % kBodyParts.size()];
        const Vec3 bp = c.body_point(part);
        const Vec3 tb = bp + rng.unit_sphere() * rng.uniform(0, 1.5);
        const Vec3 tv = rng.unit_sphere() * rng.uniform(0, 10);
        const BallState trap_ball = ball_at({tb.x, tb.y, std::max(tb.z, 0.11)}, tv);
        const double ball3[3] = {trap_ball.pos.x, trap_ball.pos.y, trap_ball.pos.z};
        const double body3[3] = {bp.x, bp.y, bp.z};
        const double vb3[3] = {tv.x, tv.y, tv.z};
        const double vr3[3] = {c.root_vel.x, c.root_vel.y, c.root_vel.z};
        cmp(trap_reward({part}, trap_ball, c, false, cfg), oracle::trap_before(ball3, body3));
        cmp(trap_reward({part}, trap_ball, c, true, cfg), oracle::trap_after(vb3, vr3));

        BallState kb;
        kb.vel = rng.unit_sphere() * rng.uniform(0, 35);
        const Vec3 kt = rng.unit_sphere() * rng.uniform(5, 35);
        const double tk[3] = {kt.x, kt.y, kt.z};
        const double vk[3] = {kb.vel.x, kb.vel.y, kb.vel.z};
        cmp(kick_reward({kt}, kb, cfg), oracle::kick(tk, vk, eps));
    }
    ck.require(worst <= 1e-12, "reward deviation " + fmt("%.3g", worst));

    double worst_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        // Goal speeds as sampled by the skills; at eps = 0 the error is undefined for a zero target.
        const Vec3 t = rng.unit_sphere() * rng.uniform(0.5, 35.0);
        const Vec3 a = rng.unit_sphere() * rng.uniform(0.0, 35.0);
        const double k = rng.uniform(0.1, 100.0);
        const NtsError e1 = nts_error(t, a, 0.0);
        const NtsError e2 = nts_error(t * k, a * k, 0.0);
        const NtsError f1 = nts_error(t.xy(), a.xy(), 0.0);
        const NtsError f2 = nts_error(t.xy() * k, a.xy() * k, 0.0);
        worst_scale = std::max({worst_scale, std::abs(e1.vel_err - e2.vel_err), std::abs(e1.speed_err - e2.speed_err),
                                std::abs(f1.vel_err - f2.vel_err), std::abs(f1.speed_err - f2.speed_err)});
    }
    ck.require(worst_scale <= 1e-12, "scale invariance off by " + fmt("%.3g", worst_scale));
    ck.note("1e5 inputs x 7 reward forms, worst " + fmt("%.2g", worst) + "; scale invariance worst " +
            fmt("%.2g", worst_scale));
    return ck.done();
}

Outcome restitution() {
    Checker ck;
    SimConfig cfg = testing::drag_free();
    cfg.ball_restitution = 0.8;
    const double h = 1.0;
    BallState b;
    b.pos = {0, 0, b.radius + h};
    bool bounced = false;
    double apex = 0.0;
    for (int i = 0; i < 2000; ++i) {
        if (step_ball(b, cfg, static_cast<std::uint64_t>(i))) bounced = true;
        if (bounced) {
            apex = std::max(apex, b.pos.z - b.radius);
            if (b.vel.z < 0.0) break;
        }
    }
    ck.require(bounced, "ball never bounced");
    ck.require(std::abs(apex - 0.64 * h) <= 0.03 * 0.64 * h, "apex " + fmt("%.4f", apex));
    ck.note("apex " + fmt("%.4f h", apex) + " vs 0.64 h");
    return ck.done();
}

Outcome fsm_table() {
    Checker ck;
    std::size_t rows = 0, mismatches = 0;
    for (FsmState s : {FsmState::move, FsmState::trap, FsmState::dribble, FsmState::kick}) {
        for (unsigned cm = 0; cm < 16; ++cm) {
            for (unsigned pm = 0; pm < 8; ++pm) {
                CommandSet c;
                c.trap_start = cm & 1;
                c.trap_end = cm & 2;
                c.kick_start = cm & 4;
                c.kick_end = cm & 8;
                FsmPredicates p;
                p.within = pm & 1;
                p.approaching = pm & 2;
                p.collision = pm & 4;
                const FsmStep got = next_state(s, c, p);
                const FsmStep want = fsm_oracle::oracle(s, c, p);
                ++rows;
                if (got.next != want.next || got.trigger != want.trigger) ++mismatches;
            }
        }
    }
    for (const auto& row : transition_table()) {
        const FsmStep want = fsm_oracle::oracle(row.from, row.cmds, row.predicates);
        if (row.step.next != want.next || row.step.trigger != want.trigger) ++mismatches;
    }
    ck.require(rows == 4 * 16 * 8, "enumerated " + std::to_string(rows) + " rows");
    ck.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    ck.note(std::to_string(rows) + " combinations, " + std::to_string(mismatches) + " mismatches");
    return ck.done();
}

Outcome metrics() {
    using namespace metric_oracle;
    Checker ck;
    const DegclBuffer degcl = build_degcl_buffer();
    std::size_t compared = 0;
    std::set<Metric> covered;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Trajectory t = synthetic(seed);
        for (Metric m : kMetrics) {
            for (std::optional<FsmState> after : {std::optional<FsmState>{}, std::optional<FsmState>{FsmState::dribble},
                                                  std::optional<FsmState>{FsmState::kick}}) {
                if (needs_switch(m) && !after) continue;
                MetricOptions o;
                o.degcl = &degcl;
                o.after_transition_to = after;
                const MetricReport r = compute(m, t, o);
                const double expect = metric_oracle::oracle(m, t, o);
                if (std::isnan(expect)) {
                    ck.require(!r.defined(), std::string(to_string(m)) + " should be undefined");
                    continue;
                }
                ck.require(r.defined(), std::string(to_string(m)) + " undefined");
                if (!r.defined()) continue;
                worst = std::max(worst, std::abs(*r.value - expect));
                covered.insert(m);
                ++compared;
            }
        }
    }
    ck.require(worst <= 1e-9, "metric deviation " + fmt("%.3g", worst));
    ck.require(covered.size() == 15, "only " + std::to_string(covered.size()) + " metrics compared");

    int violations = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Trajectory t = synthetic(seed);
        double prev[3] = {-1, -1, -1};
        for (int k = 0; k <= 30; ++k) {
            const double tol = 0.01 * k;
            MetricOptions o;
            o.dribble_tolerance = tol;
            o.move_speed_tolerance = tol;
            MetricOptions a;
            a.move_angle_tolerance_deg = tol * 200.0;
            const MetricReport rs[3] = {compute(Metric::dgar, t, o), compute(Metric::mgar, t, o),
                                        compute(Metric::mgar, t, a)};
            for (int j = 0; j < 3; ++j) {
                if (!rs[j].defined()) continue;
                if (*rs[j].value < prev[j]) ++violations;
                prev[j] = *rs[j].value;
            }
        }
    }
    ck.require(violations == 0, std::to_string(violations) + " monotonicity violations");
    ck.note(std::to_string(compared) + " values over " + std::to_string(covered.size()) + " metrics, worst " +
            fmt("%.2g", worst) + "; DGAR/MGAR monotone");
    return ck.done();
}

StiBuffer random_buffer(Skill skill, std::size_t n, std::uint64_t seed) {
    StiBuffer buf(skill, n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CharacterState c = rest_pose(rng.in_disc(5.0), rng.unit_circle());
        std::optional<BallState> b;
        if (skill != Skill::move) {
            b = BallState{};
            b->pos = lift(c.root_pos.xy() + rng.in_disc(0.6), b->radius);
        } else {
            c.root_vel = lift(rng.in_disc(4.0));
        }
        buf.add({c, b, skill, i});
    }
    return buf;
}

Outcome episodes() {
    Checker ck;
    const StiBuffer move = random_buffer(Skill::move, 200, 1);
    const StiBuffer trap = random_buffer(Skill::trap, 200, 2);
    const StiBuffer dribble = random_buffer(Skill::dribble, 200, 3);
    const StiBuffers all{&move, &trap, &dribble};
    Rng rng(777);
    const int n = 10000;
    int trap_src = 0, dribble_src = 0, lob = 0;
    for (int i = 0; i < n; ++i) {
        trap_src += init_episode(Skill::dribble, all, rng).source == InitSource::trap_snapshot;
        dribble_src += init_episode(Skill::kick, all, rng).source == InitSource::dribble_snapshot;
        lob += init_episode(Skill::trap, all, rng).pass->kind == PassKind::lob;
    }
    const DegclBuffer degcl = build_degcl_buffer();
    RolloutConfig rc;
    rc.episode.max_episode_time = 1.0 / 30.0;
    const SkillPolicy mp = SkillPolicy::analytic(Skill::move);
    int deg = 0;
    for (int i = 0; i < n; ++i) deg += run_episode(mp, {}, &degcl, rng, rc).mode == GoalMode::degcl;
    const double fr[4] = {trap_src / double(n), dribble_src / double(n), lob / double(n), deg / double(n)};
    const double want[4] = {0.5, 0.7, 0.8, 0.8};
    const char* names[4] = {"dribble-from-trap", "kick-from-dribble", "trap lob", "degcl"};
    std::string mix;
    for (int i = 0; i < 4; ++i) {
        ck.require(std::abs(fr[i] - want[i]) <= 0.02, std::string(names[i]) + " fraction " + fmt("%.4f", fr[i]));
        mix += std::string(i ? " " : "") + names[i] + "=" + fmt("%.3f", fr[i]);
    }

    World w;
    w.players.push_back(rest_pose());
    BallState b;
    {
        EpisodeClock clock;
        ContactLog log;
        b.pos = {3.01, 0, b.radius};
        w.ball = b;
        const Termination t = check_termination(Skill::dribble, w, clock, log, std::nullopt);
        ck.require(t.reason == StopReason::ball_lost, "3.01 m did not stop the dribble");
        w.ball->pos.x = 2.99;
        ck.require(!check_termination(Skill::dribble, w, clock, log, std::nullopt).done(), "2.99 m stopped");
    }
    {
        EpisodeClock clock;
        ContactLog log;
        w.ball = BallState{};
        const std::vector<CollisionEvent> ev{{1, 0, ContactPart::arm_r, CollisionKind::handball, {}, {}, false}};
        update_contact_log(log, ev, 3);
        ck.require(check_termination(Skill::trap, w, clock, log, std::nullopt).reason == StopReason::handball,
                   "handball did not stop the trap");
    }
    {
        EpisodeClock clock;
        ContactLog log;
        clock.control_ticks = 89;
        ck.require(!check_termination(Skill::kick, w, clock, log, std::nullopt).done(), "kick stopped early");
        clock.control_ticks = 90;
        ck.require(check_termination(Skill::kick, w, clock, log, std::nullopt).kind == TerminationKind::timeout,
                   "no kick timeout at 3 s");
    }
    ck.note(mix + " over 10000 draws; terminations at 3.01 m, handball, 3 s kick");
    return ck.done();
}

Outcome determinism() {
    Checker ck;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("footsim_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto write_file = [&](const std::string& name, const Trajectory& t) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        write_jsonl(out, t);
        return p;
    };
    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };

    const DegclBuffer degcl = build_degcl_buffer();
    int files = 0;
    for (const ProtocolInfo& info : protocols()) {
        ProtocolConfig cfg;
        cfg.seed = 5;
        cfg.scale = 0.01;
        cfg.degcl = &degcl;
        const ProtocolRun a = run_protocol(info.id, PolicySet{}, cfg);
        const ProtocolRun b = run_protocol(info.id, PolicySet{}, cfg);
        const std::string fa = read_file(write_file(info.id + "_a.jsonl", a.trajectory));
        const std::string fb = read_file(write_file(info.id + "_b.jsonl", b.trajectory));
        ck.require(!fa.empty() && fa == fb, info.id + " files differ");
        ck.require(same_reports(a.reports, b.reports), info.id + " reports differ");
        std::ifstream in(dir / (info.id + "_a.jsonl"), std::ios::binary);
        const Trajectory back = read_jsonl(in);
        ck.require(same_reports(protocol_reports(back, &degcl), a.reports), info.id + " replay reports differ");
        files += 2;
    }

    // Scenarios under the same scripted pad commands.
    for (const std::string& id : scenario_ids()) {
        std::string out[2];
        for (auto& text : out) {
            ScenarioConfig cfg;
            cfg.id = id;
            cfg.seed = 9;
            auto sc = make_scenario(cfg);
            Trajectory t;
            t.header = sc->header();
            Rng pads(31);
            for (int i = 0; i < 450 && !sc->finished(); ++i) {
                PadInput pad;
                pad.left_stick = pads.in_disc(1.0);
                pad.right_trigger = pads.uniform();
                pad.left_bumper = pads.bernoulli(0.05);
                pad.right_bumper = pads.bernoulli(0.05);
                sc->step(&pad);
                t.frames.push_back(sc->frame());
            }
            text = read_file(write_file(id + ".jsonl", t));
        }
        ck.require(!out[0].empty() && out[0] == out[1], id + " scenario files differ");
        files += 2;
    }
    fs::remove_all(dir);
    ck.note(std::to_string(files) + " files compared byte for byte; replayed reports identical");
    return ck.done();
}

Outcome cem_move() {
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    const DegclBuffer degcl = build_degcl_buffer();
    TrainConfig cfg;
    cfg.population = 16;
    cfg.elites = 4;
    cfg.iterations = 30;
    cfg.seed = 1;
    const TrainResult r = train(Skill::move, cfg, {}, &degcl);
    const double wall = seconds_since(t0);
    ck.require(r.log.size() == 30, "log has " + std::to_string(r.log.size()) + " rows");
    bool monotone = true;
    for (std::size_t i = 1; i < r.log.size(); ++i) monotone &= r.log[i].best_so_far >= r.log[i - 1].best_so_far;
    ck.require(monotone, "best-so-far decreased");
    const double final_mean = r.log.back().mean;
    const double gain = (final_mean - r.baseline_mean) / std::abs(r.baseline_mean);
    ck.require(gain >= 0.2, "gain " + fmt("%.1f%%", 100 * gain));
    ck.require(wall <= 300.0, "took " + fmt("%.0f s", wall));
    ck.note("baseline mean " + fmt("%.2f", r.baseline_mean) + " -> final mean " + fmt("%.2f", final_mean) + " (" +
            fmt("%+.0f%%", 100 * gain) + "), best " + fmt("%.2f", r.best_fitness) + ", " + fmt("%.0f s", wall));
    return ck.done();
}

// Fixed before the run and not tuned on its outcome.
Outcome sti_direction() {
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    const DegclBuffer degcl = build_degcl_buffer();
    Rng rng(5);
    const StiBuffer move = build_sti_buffer(SkillPolicy::analytic(Skill::move), 2000, {}, &degcl, rng);
    const StiBuffer trap = build_sti_buffer(SkillPolicy::analytic(Skill::trap), 500, {&move}, nullptr, rng);
    const StiBuffers buffers{&move, &trap, nullptr};

    TrainConfig cfg;
    cfg.population = 16;
    cfg.elites = 4;
    cfg.iterations = 15;
    cfg.episodes_per_candidate = 8;
    cfg.init_stddev = 0.02;
    cfg.seed = 1;
    cfg.rollout.episode.max_episode_time = 5.0;
    const TrainResult with = train(Skill::dribble, cfg, buffers, nullptr);
    TrainConfig plain = cfg;
    plain.rollout.episode.use_sti = false;
    const TrainResult without = train(Skill::dribble, plain, buffers, nullptr);

    auto tadg = [&](const SkillPolicy& dribble, std::size_t& count) {
        PolicySet pol;
        pol.dribble = dribble;
        ProtocolConfig pc;
        pc.seed = 7;
        pc.scale = 0.1;
        pc.degcl = &degcl;
        pc.buffers = {&move, &trap, nullptr};
        for (const MetricReport& r : run_protocol("trap-to-dribble", pol, pc).reports) {
            if (metric_from_string(r.metric) != Metric::tadg) continue;
            count = r.count;
            return r.value.value_or(std::nan(""));
        }
        return std::nan("");
    };
    std::size_t n_with = 0, n_without = 0;
    const double a = tadg(with.policy, n_with);
    const double b = tadg(without.policy, n_without);
    ck.require(std::isfinite(a) && std::isfinite(b), "TADG undefined");
    ck.require(a < b, "STI TADG not lower");
    ck.note("TADG with STI " + fmt("%.3f s", a) + " (" + std::to_string(n_with) + " reached) vs without " +
            fmt("%.3f s", b) + " (" + std::to_string(n_without) + " reached), 100 cases, " +
            fmt("%.0f s", seconds_since(t0)));
    return ck.done();
}

Outcome scenario_smoke() {
    Checker ck;
    int completed = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScenarioConfig cfg;
        cfg.id = "give-and-go";
        cfg.seed = seed;
        auto sc = make_scenario(cfg);
        int passes = 0;
        bool kicked = false;
        while (!sc->finished()) {
            sc->step();
            for (const ScenarioEvent& e : sc->events()) passes += e.kind == "pass";
            for (const TransitionRecord& t : sc->frame().transitions) kicked |= t.to == FsmState::kick;
        }
        const bool ok = sc->completed() && passes >= 2 && kicked;
        ck.require(ok, "give-and-go seed " + std::to_string(seed) + " incomplete");
        completed += ok;
    }
    ScenarioConfig cfg;
    cfg.id = "match";
    cfg.seed = 3;
    auto sc = make_scenario(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    while (!sc->finished()) sc->step();
    const double wall = seconds_since(t0);
    ck.require(sc->agents().size() == 6, "match is not 3v3");
    ck.require(sc->time() >= 60.0 - 1e-9, "match stopped at " + fmt("%.1f s", sc->time()));
    ck.require(wall < sc->time(), "match slower than realtime");
    ck.note("give-and-go " + std::to_string(completed) + "/20; 3v3 " + fmt("%.0f s simulated", sc->time()) + " in " +
            fmt("%.2f s", wall));
    return ck.done();
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"projectile", projectile},
        {"reward-oracles", reward_oracles},
        {"restitution", restitution},
        {"fsm", fsm_table},
        {"metrics", metrics},
        {"episodes", episodes},
        {"determinism", determinism},
        {"cem-move", cem_move},
        {"sti-direction", sti_direction},
        {"scenario-smoke", scenario_smoke},
    };
    const std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && !only.count(name)) continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
