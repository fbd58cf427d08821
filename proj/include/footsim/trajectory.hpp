#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "footsim/fsm.hpp"
#include "footsim/goals.hpp"
#include "footsim/motion.hpp"
#include "footsim/sim.hpp"

namespace footsim {

inline constexpr int kTrajectoryFormatVersion = 1;

struct TrajectoryHeader {
    int version{kTrajectoryFormatVersion};
    std::uint64_t config_hash{0};
    std::uint64_t seed{0};
    /// "protocol:<id>" or "scenario:<id>".
    std::string source;
    double dt_control{1.0 / 30.0};
    std::map<std::string, std::string> modules;
    /// Free-form labels (segment names, policy names).
    std::map<std::string, std::string> labels;

    bool operator==(const TrajectoryHeader&) const = default;
};

struct PlayerFrame {
    int id{0};
    CharacterState character;
    FsmState fsm{FsmState::move};
    std::optional<SkillGoal> goal;
    std::optional<Latent> latent;
    double reward{0.0};
    std::map<std::string, double> reward_terms;
};

/// State after one control tick.
struct TrajectoryFrame {
    std::uint64_t tick{0};
    /// Goal or trial index; a new value marks a goal reset or a new trial.
    int segment{0};
    /// False for warm-up ticks excluded from measurement.
    bool measured{true};
    std::optional<BallState> ball;
    std::vector<PlayerFrame> players;
    std::vector<CollisionEvent> events;
    std::vector<TransitionRecord> transitions;
};

struct Trajectory {
    TrajectoryHeader header;
    std::vector<TrajectoryFrame> frames;
};

/// Throws unless ticks strictly increase.
void validate(const Trajectory& t);

/// JSON Lines: a header record, then one record per control tick.
void write_jsonl(std::ostream& os, const Trajectory& t);
Trajectory read_jsonl(std::istream& is);

/// Streaming writer; records are flushed line by line.
class TrajectoryWriter {
public:
    TrajectoryWriter(std::ostream& os, const TrajectoryHeader& header);
    void write(const TrajectoryFrame& f);
    std::size_t frames_written() const { return count_; }

private:
    std::ostream& os_;
    std::optional<std::uint64_t> last_tick_;
    std::size_t count_{0};
};

std::string frame_to_json(const TrajectoryFrame& f);
TrajectoryFrame frame_from_json(const std::string& line);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(std::string_view s);

}  // namespace footsim
