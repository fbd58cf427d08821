#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "footsim/episodes.hpp"
#include "footsim/metrics.hpp"
#include "footsim/rewards.hpp"
#include "footsim/skills.hpp"
#include "footsim/trajectory.hpp"

namespace footsim {

/// One policy per skill.
struct PolicySet {
    SkillPolicy move{SkillPolicy::analytic(Skill::move)};
    SkillPolicy trap{SkillPolicy::analytic(Skill::trap)};
    SkillPolicy dribble{SkillPolicy::analytic(Skill::dribble)};
    SkillPolicy kick{SkillPolicy::analytic(Skill::kick)};

    const SkillPolicy& operator[](Skill s) const;
    SkillPolicy& operator[](Skill s);
};

/// Fills the reward and its terms for a player acting toward `goal`.
/// `collided` tells the trap reward whether the ball has touched the player yet.
void score_player(PlayerFrame& p, const std::optional<BallState>& ball, const SkillGoal& goal, bool collided,
                  const RewardConfig& rc);

struct ProtocolConfig {
    /// Multiplies every trial or goal count (and the dribble-speed
    /// measurement window); 1.0 runs the full schedules.
    double scale{1.0};
    std::uint64_t seed{0};
    std::uint64_t config_hash{0};
    SimConfig sim;
    MotionConfig motion;
    RewardConfig reward;
    EpisodeConfig episode;
    /// References for GMLS; built from the motion config when null.
    const DegclBuffer* degcl{nullptr};
    /// Start-state buffers for protocols that reuse training initialization.
    /// Missing buffers are recorded from the given policies.
    StiBuffers buffers;
    /// Row label of the reports, e.g. the policy variant.
    std::string label;

    void validate() const;
};

struct ProtocolRun {
    std::vector<MetricReport> reports;
    Trajectory trajectory;
};

struct ProtocolInfo {
    std::string id;
    std::string description;
    std::vector<Metric> metrics;
};

const std::vector<ProtocolInfo>& protocols();
const ProtocolInfo& protocol_info(std::string_view id);

ProtocolRun run_protocol(std::string_view id, const PolicySet& policies, const ProtocolConfig& cfg);

/// Recomputes the protocol's reports from a recorded trajectory, as
/// `replay` does.
std::vector<MetricReport> protocol_reports(const Trajectory& t, const DegclBuffer* degcl = nullptr);

/// Goals, episodes or trials after scaling; at least one.
std::size_t scaled_count(std::size_t full, double scale);

void write_reports_csv(std::ostream& os, const std::vector<MetricReport>& reports);
/// One row per label with one column per metric, arrows marking the better direction.
void write_reports_table(std::ostream& os, const std::vector<MetricReport>& reports);

}  // namespace footsim
