#include "footsim/metrics.hpp"

#include <cmath>
#include <limits>

namespace footsim {

std::string_view to_string(Metric m) {
    static constexpr std::array<std::string_view, 15> names{"CBD",  "FBD", "DGAR", "CS",     "TSR",
                                                           "HRTS", "RBSPT", "MGAR", "GMLS",   "KSR",
                                                           "KDD",  "KSD", "DGAR30", "TADG", "TTK"};
    return names[static_cast<std::size_t>(m)];
}

std::optional<Metric> metric_from_string(std::string_view s) {
    for (Metric m : kMetrics) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::string_view unit_of(Metric m) {
    switch (m) {
        case Metric::cbd:
        case Metric::fbd: return "m";
        case Metric::cs:
        case Metric::rbspt:
        case Metric::ksd: return "m/s";
        case Metric::kdd: return "deg";
        case Metric::tadg:
        case Metric::ttk: return "s";
        case Metric::gmls: return "cos";
        default: return "fraction";
    }
}

bool lower_is_better(Metric m) {
    switch (m) {
        case Metric::cbd:
        case Metric::fbd:
        case Metric::hrts:
        case Metric::rbspt:
        case Metric::kdd:
        case Metric::ksd:
        case Metric::tadg:
        case Metric::ttk: return true;
        default: return false;
    }
}

std::size_t nearest_reference(const DegclBuffer& degcl, const MoveRefGoal& goal) {
    if (degcl.size() == 0) throw Error("GMLS requires a non-empty DEGCL buffer");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < degcl.size(); ++i) {
        const MoveRefGoal& r = degcl[i].ref_goal;
        const double d = norm(goal.move_vel - r.move_vel) + angle_between(goal.face_dir, r.face_dir);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

namespace {

struct Span {
    std::size_t begin;
    std::size_t end;  // exclusive
    /// Tick of the transition that opened the analysis window, if required.
    std::optional<std::uint64_t> switch_tick;
};

const PlayerFrame& player_of(const TrajectoryFrame& f, int id) {
    for (const PlayerFrame& p : f.players) {
        if (p.id == id) return p;
    }
    throw Error("trajectory frame at tick " + std::to_string(f.tick) + " has no player " + std::to_string(id));
}

const BallState& ball_of(const TrajectoryFrame& f) {
    if (!f.ball) throw Error("metric requires the 'ball' channel (missing at tick " + std::to_string(f.tick) + ")");
    return *f.ball;
}

template <class G>
const G* goal_of(const PlayerFrame& p, std::uint64_t tick) {
    if (!p.goal) throw Error("metric requires the 'goal' channel (missing at tick " + std::to_string(tick) + ")");
    return std::get_if<G>(&*p.goal);
}

// Contiguous runs of equal segment index that contain measured frames,
// trimmed to measured frames and, if requested, to the frames after the
// first transition into the target state.
std::vector<Span> spans(const Trajectory& t, const MetricOptions& opt) {
    std::vector<Span> out;
    std::size_t i = 0;
    const auto& fr = t.frames;
    while (i < fr.size()) {
        std::size_t j = i;
        while (j < fr.size() && fr[j].segment == fr[i].segment) ++j;
        std::size_t b = i;
        std::optional<std::uint64_t> sw;
        if (opt.after_transition_to) {
            std::size_t k = i;
            for (; k < j && !sw; ++k) {
                for (const TransitionRecord& r : fr[k].transitions) {
                    if (r.player == opt.player && r.to == *opt.after_transition_to) {
                        sw = fr[k].tick;
                        break;
                    }
                }
            }
            b = k;  // first frame after the switching tick
        }
        if (!opt.after_transition_to || sw) {
            std::vector<std::size_t> measured;
            for (std::size_t k = b; k < j; ++k) {
                if (fr[k].measured) measured.push_back(k);
            }
            if (!measured.empty()) out.push_back({measured.front(), measured.back() + 1, sw});
        }
        i = j;
    }
    return out;
}

bool touches(const CollisionEvent& e, int player) { return e.player == player && e.kind != CollisionKind::ground; }

// First control-tick frame at which the player touched the ball and whether
// that touch came before any ball-ground impact.
struct FirstTouch {
    std::optional<std::size_t> frame;
    bool before_ground{false};
    bool handball{false};
};

FirstTouch first_touch(const Trajectory& t, const Span& s, int player, bool feet_only = false) {
    FirstTouch ft;
    bool grounded = false;
    for (std::size_t k = s.begin; k < s.end; ++k) {
        if (!t.frames[k].measured) continue;
        for (const CollisionEvent& e : t.frames[k].events) {
            if (touches(e, player) && e.kind == CollisionKind::handball) ft.handball = true;
            if (!ft.frame && touches(e, player) && (!feet_only || (e.kind == CollisionKind::body && is_foot(e.part)))) {
                ft.frame = k;
                ft.before_ground = !grounded;
            }
            if (e.kind == CollisionKind::ground && e.player < 0) grounded = true;
        }
    }
    return ft;
}

MetricReport make(Metric m, double sum, std::size_t n) {
    MetricReport r;
    r.metric = std::string(to_string(m));
    r.unit = std::string(unit_of(m));
    r.count = n;
    if (n > 0) r.value = sum / static_cast<double>(n);
    return r;
}

std::size_t window_frames(double seconds, double dt) {
    return static_cast<std::size_t>(std::llround(seconds / dt));
}

}  // namespace

MetricReport compute(Metric m, const Trajectory& t, const MetricOptions& opt) {
    const int id = opt.player;
    const double dt = t.header.dt_control;
    const bool needs_switch = m == Metric::dgar30 || m == Metric::tadg || m == Metric::ttk;
    if (needs_switch && !opt.after_transition_to)
        throw Error(std::string(to_string(m)) + " requires a transition target state");
    const std::vector<Span> segs = spans(t, opt);
    const auto& fr = t.frames;
    double sum = 0.0;
    std::size_t n = 0;

    switch (m) {
        case Metric::cbd:
        case Metric::cs:
            for (const Span& s : segs) {
                for (std::size_t k = s.begin; k < s.end; ++k) {
                    if (!fr[k].measured) continue;
                    const CharacterState& c = player_of(fr[k], id).character;
                    sum += m == Metric::cbd ? horizontal_distance(ball_of(fr[k]), c) : norm(c.root_vel.xy());
                    ++n;
                }
            }
            break;
        case Metric::fbd:
            for (const Span& s : segs) {
                for (std::size_t k = std::max<std::size_t>(s.begin, 1); k < s.end; ++k) {
                    if (!fr[k].measured || fr[k - 1].segment != fr[k].segment) continue;
                    const CharacterState& prev = player_of(fr[k - 1], id).character;
                    const CharacterState& cur = player_of(fr[k], id).character;
                    for (std::size_t f = 0; f < 2; ++f) {
                        if (!prev.feet[f].contact && cur.feet[f].contact) {
                            sum += norm(cur.feet[f].pos.xy() - ball_of(fr[k]).pos.xy());
                            ++n;
                        }
                    }
                }
            }
            break;
        case Metric::dgar:
        case Metric::dgar30:
        case Metric::tadg: {
            for (const Span& s : segs) {
                std::optional<std::uint64_t> achieved;
                bool any_goal = false;
                const std::uint64_t limit = s.switch_tick ? *s.switch_tick + window_frames(opt.dgar30_window_s, dt)
                                                          : std::numeric_limits<std::uint64_t>::max();
                for (std::size_t k = s.begin; k < s.end && !achieved; ++k) {
                    if (!fr[k].measured || fr[k].tick > limit) continue;
                    const auto* g = goal_of<DribbleGoal>(player_of(fr[k], id), fr[k].tick);
                    if (g == nullptr) continue;
                    any_goal = true;
                    if (norm(ball_of(fr[k]).vel.xy() - g->vel) <= opt.dribble_tolerance * norm(g->vel))
                        achieved = fr[k].tick;
                }
                if (!any_goal) continue;
                if (m == Metric::tadg) {
                    if (achieved) {
                        sum += static_cast<double>(*achieved - *s.switch_tick) * dt;
                        ++n;
                    }
                } else {
                    sum += achieved ? 1.0 : 0.0;
                    ++n;
                }
            }
            break;
        }
        case Metric::mgar: {
            const double max_angle = deg_to_rad(opt.move_angle_tolerance_deg);
            for (const Span& s : segs) {
                bool achieved = false;
                bool any_goal = false;
                for (std::size_t k = s.begin; k < s.end && !achieved; ++k) {
                    if (!fr[k].measured) continue;
                    const PlayerFrame& p = player_of(fr[k], id);
                    const auto* g = goal_of<MoveGoal>(p, fr[k].tick);
                    if (g == nullptr) continue;
                    any_goal = true;
                    achieved = norm(p.character.root_vel.xy() - g->vel) <= opt.move_speed_tolerance * norm(g->vel) &&
                               angle_between(p.character.facing, g->face) <= max_angle;
                }
                if (any_goal) {
                    sum += achieved ? 1.0 : 0.0;
                    ++n;
                }
            }
            break;
        }
        case Metric::gmls: {
            if (opt.degcl == nullptr) throw Error("GMLS requires the 'degcl' reference buffer");
            for (const Span& s : segs) {
                for (std::size_t k = s.begin; k < s.end; ++k) {
                    if (!fr[k].measured) continue;
                    const PlayerFrame& p = player_of(fr[k], id);
                    const auto* g = goal_of<MoveGoal>(p, fr[k].tick);
                    if (g == nullptr) continue;
                    if (!p.latent) throw Error("GMLS requires the 'latent' channel (missing at tick " +
                                               std::to_string(fr[k].tick) + ")");
                    const CharacterFrame cf = frame_of(p.character);
                    const MoveRefGoal local{world_to_character(cf, g->vel, VecKind::vector),
                                            world_to_character(cf, g->face, VecKind::vector)};
                    const Latent& ref = (*opt.degcl)[nearest_reference(*opt.degcl, local)].ref_latent;
                    sum += dot(*p.latent, ref);
                    ++n;
                }
            }
            break;
        }
        case Metric::tsr:
        case Metric::hrts:
        case Metric::rbspt:
            for (const Span& s : segs) {
                const FirstTouch ft = first_touch(t, s, id);
                const bool success = ft.frame && ft.before_ground;
                if (m == Metric::tsr) {
                    sum += success ? 1.0 : 0.0;
                    ++n;
                } else if (m == Metric::hrts) {
                    if (success) {
                        sum += ft.handball ? 1.0 : 0.0;
                        ++n;
                    }
                } else if (success) {
                    double acc = 0.0;
                    std::size_t cnt = 0;
                    for (std::size_t k = *ft.frame; k < s.end && cnt < static_cast<std::size_t>(opt.rbspt_frames); ++k) {
                        const CharacterState& c = player_of(fr[k], id).character;
                        acc += norm(c.root_vel - ball_of(fr[k]).vel);
                        ++cnt;
                    }
                    sum += acc / static_cast<double>(cnt);
                    ++n;
                }
            }
            break;
        case Metric::ksr:
        case Metric::kdd:
        case Metric::ksd:
        case Metric::ttk: {
            const std::size_t w = std::max<std::size_t>(1, window_frames(opt.kick_window_s, dt));
            for (const Span& s : segs) {
                const FirstTouch ft = first_touch(t, s, id, m == Metric::ttk);
                if (m == Metric::ksr) {
                    sum += ft.frame ? 1.0 : 0.0;
                    ++n;
                    continue;
                }
                if (!ft.frame) continue;
                if (m == Metric::ttk) {
                    sum += static_cast<double>(fr[*ft.frame].tick - *s.switch_tick) * dt;
                    ++n;
                    continue;
                }
                double acc = 0.0;
                std::size_t cnt = 0;
                for (std::size_t k = *ft.frame; k < s.end && cnt < w; ++k) {
                    const auto* g = goal_of<KickGoal>(player_of(fr[k], id), fr[k].tick);
                    if (g == nullptr) continue;
                    const Vec3 v = ball_of(fr[k]).vel;
                    acc += m == Metric::kdd ? rad_to_deg(angle_between(v, g->vel)) : std::abs(norm(v) - norm(g->vel));
                    ++cnt;
                }
                if (cnt > 0) {
                    sum += acc / static_cast<double>(cnt);
                    ++n;
                }
            }
            break;
        }
    }
    MetricReport r = make(m, sum, n);
    r.seed = t.header.seed;
    r.config_hash = t.header.config_hash;
    const std::string& src = t.header.source;
    r.protocol = src.rfind("protocol:", 0) == 0 ? src.substr(9) : src;
    return r;
}

}  // namespace footsim
