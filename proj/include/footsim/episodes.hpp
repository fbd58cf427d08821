#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "footsim/goals.hpp"
#include "footsim/motion.hpp"
#include "footsim/rng.hpp"
#include "footsim/sim.hpp"

namespace footsim {

// ---------------------------------------------------------------------------
// Skill-transition snapshots.

struct Snapshot {
    CharacterState character;
    std::optional<BallState> ball;
    Skill source{Skill::move};
    std::uint64_t tick_tag{0};
};

class StiBuffer {
public:
    static constexpr std::size_t kDefaultCapacity = 5000;

    explicit StiBuffer(Skill source = Skill::move, std::size_t capacity = kDefaultCapacity);

    /// Appends a snapshot; returns false once the buffer is full. Throws if
    /// the snapshot does not match the buffer's source rules.
    bool add(Snapshot s);
    const Snapshot& sample(Rng& rng) const;
    /// Uniform subsample without replacement.
    StiBuffer subsample(std::size_t count, Rng& rng) const;

    Skill source() const { return source_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return snapshots_.size(); }
    bool empty() const { return snapshots_.empty(); }
    bool full() const { return snapshots_.size() >= capacity_; }
    const Snapshot& operator[](std::size_t i) const { return snapshots_[i]; }
    std::span<const Snapshot> snapshots() const { return snapshots_; }

private:
    Skill source_;
    std::size_t capacity_;
    std::vector<Snapshot> snapshots_;
};

struct StiFileHeader {
    Skill source{Skill::move};
    std::size_t count{0};
    std::size_t capacity{0};
    std::uint64_t seed{0};
    std::uint64_t config_hash{0};
};

/// Versioned file: one text header line, then little-endian binary records.
void write_sti(std::ostream& os, const StiBuffer& buf, std::uint64_t seed, std::uint64_t config_hash);
StiBuffer read_sti(std::istream& is, StiFileHeader* header = nullptr);

/// Predecessor buffers available to episode initialization.
struct StiBuffers {
    const StiBuffer* move{nullptr};
    const StiBuffer* trap{nullptr};
    const StiBuffer* dribble{nullptr};
};

// ---------------------------------------------------------------------------
// Passes.

struct Flight {
    double distance{0.0};
    double time{0.0};
};

/// Range and flight time of a drag-free launch that lands at launch height.
Flight lob_flight(double v0, double phi, double g);

enum class PassKind : std::uint8_t { lob, ground };
std::string_view to_string(PassKind k);

struct LobSpec {
    double v0{0.0};
    double phi{0.0};
    Vec2 landing;
    Vec3 spin;
};

struct PassInit {
    PassKind kind{PassKind::lob};
    BallState ball;
    LobSpec spec;
    Vec2 launch;
    /// Horizontal unit direction of the initial ball travel.
    Vec2 travel_dir{1.0, 0.0};
};

/// Point in the 1 m semicircle ahead of where the character will be after
/// `lead_time` seconds at its current horizontal velocity.
Vec2 sample_pass_target(const CharacterState& c, double lead_time, Rng& rng);

PassInit init_lob_pass(const CharacterState& c, Rng& rng, const SimConfig& sim = {});
PassInit init_ground_pass(const CharacterState& c, Rng& rng, const SimConfig& sim = {});

/// Ground-pass start distance: 15 m at 10 m/s rising linearly to 45 m at 30 m/s.
double ground_pass_offset(double v0);

// ---------------------------------------------------------------------------
// Goals.

enum class GoalMode : std::uint8_t { general, degcl };

struct GoalSample {
    SkillGoal goal;
    GoalMode mode{GoalMode::general};
    std::optional<Latent> ref_latent;
    std::optional<std::size_t> degcl_index;
    /// Seconds until the goal is resampled (Move and Dribble).
    double reassign_after{0.0};
};

struct GoalContext {
    /// Character the goal is sampled for; kick directions and DEGCL goals are relative to it.
    const CharacterState* character{nullptr};
    PassKind pass{PassKind::lob};
    GoalMode mode{GoalMode::general};
    const DegclBuffer* degcl{nullptr};
};

GoalSample sample_goal(Skill skill, Rng& rng, const GoalContext& ctx = {});

// ---------------------------------------------------------------------------
// Episodes.

struct EpisodeConfig {
    int trap_stage{2};
    double trap_lob_fraction{0.8};
    double dribble_trap_fraction{0.5};
    double kick_dribble_fraction{0.7};
    double dribble_ball_radius{1.0};
    double dribble_ball_max_speed{1.0};
    double kick_ball_radius{2.0};
    double max_episode_time{10.0};
    double kick_contact_timeout{3.0};
    double dribble_lost_distance{3.0};
    double ground_pass_beyond_margin{0.5};
    /// When false, trap, dribble and kick episodes start from the rest pose
    /// instead of predecessor snapshots and need no buffers.
    bool use_sti{true};

    void validate() const;
};

enum class InitSource : std::uint8_t { rest, move_snapshot, trap_snapshot, dribble_snapshot };
std::string_view to_string(InitSource s);

struct EpisodeInit {
    World world;
    InitSource source{InitSource::rest};
    std::optional<PassInit> pass;
};

EpisodeInit init_episode(Skill skill, const StiBuffers& buffers, Rng& rng, const EpisodeConfig& cfg = {},
                         const SimConfig& sim = {});

/// Contact bookkeeping for the controlled player over an episode.
struct ContactLog {
    std::optional<int> first_contact_tick;  // control tick of the first body contact
    std::optional<ContactPart> first_contact_part;
    bool handball{false};
    bool ground_before_contact{false};
};

/// Folds the events of one control tick into the log.
void update_contact_log(ContactLog& log, std::span<const CollisionEvent> events, int control_tick, int player = 0);

enum class TerminationKind : std::uint8_t { running, early_stop, finished, timeout };
enum class StopReason : std::uint8_t { none, ball_lost, handball, lob_grounded, ball_passed };
std::string_view to_string(TerminationKind k);
std::string_view to_string(StopReason r);

struct Termination {
    TerminationKind kind{TerminationKind::running};
    StopReason reason{StopReason::none};
    bool done() const { return kind != TerminationKind::running; }
};

struct EpisodeClock {
    int control_ticks{0};
    double dt_control{1.0 / 30.0};
    double elapsed() const { return control_ticks * dt_control; }
};

struct RewardWindows {
    int trap_post_ticks{5};
    int kick_window_ticks{10};
};

Termination check_termination(Skill skill, const World& world, const EpisodeClock& clock, const ContactLog& log,
                              const std::optional<PassInit>& pass, const EpisodeConfig& cfg = {},
                              const RewardWindows& windows = {}, int player = 0);

}  // namespace footsim
