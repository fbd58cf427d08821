#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "footsim/fsm.hpp"
#include "footsim/motion.hpp"
#include "footsim/trajectory.hpp"

namespace footsim {

enum class Metric : std::uint8_t {
    cbd, fbd, dgar, cs, tsr, hrts, rbspt, mgar, gmls, ksr, kdd, ksd, dgar30, tadg, ttk,
};
inline constexpr std::array<Metric, 15> kMetrics{Metric::cbd,  Metric::fbd,  Metric::dgar,  Metric::cs,
                                                 Metric::tsr,  Metric::hrts, Metric::rbspt, Metric::mgar,
                                                 Metric::gmls, Metric::ksr,  Metric::kdd,   Metric::ksd,
                                                 Metric::dgar30, Metric::tadg, Metric::ttk};
std::string_view to_string(Metric m);
std::optional<Metric> metric_from_string(std::string_view s);
std::string_view unit_of(Metric m);
/// True when smaller values are better.
bool lower_is_better(Metric m);

struct MetricReport {
    std::string metric;
    /// Empty when no sample qualifies (e.g. KDD without a successful kick).
    std::optional<double> value;
    std::string unit;
    std::size_t count{0};
    std::string protocol;
    std::uint64_t seed{0};
    std::uint64_t config_hash{0};
    /// Row label, e.g. the policy or the target speed.
    std::string label;

    bool defined() const { return value.has_value() && count > 0; }
};

struct MetricOptions {
    int player{0};
    /// DGAR and DGAR30 speed tolerance relative to the target speed.
    double dribble_tolerance{0.1};
    /// MGAR velocity tolerance relative to the target speed.
    double move_speed_tolerance{0.1};
    double move_angle_tolerance_deg{20.0};
    double dgar30_window_s{30.0};
    int rbspt_frames{5};
    /// KDD and KSD window after the kick touch.
    double kick_window_s{1.0 / 6.0};
    /// Required for GMLS.
    const DegclBuffer* degcl{nullptr};
    /// When set, each segment is analysed from its first transition into
    /// this state onward; segments without one are skipped. Required for
    /// DGAR30, TADG and TTK.
    std::optional<FsmState> after_transition_to;
};

/// Evaluates one metric over the measured frames of a trajectory. Segments
/// act as goal periods (DGAR, MGAR) or trials (trap, kick, transitions).
MetricReport compute(Metric m, const Trajectory& t, const MetricOptions& opt = {});

/// Index of the DEGCL pair nearest to a character-frame move goal, by
/// velocity distance plus facing angle in radians.
std::size_t nearest_reference(const DegclBuffer& degcl, const MoveRefGoal& goal);

}  // namespace footsim
