#pragma once

#include <atomic>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "footsim/core.hpp"

namespace footsim {

/// Unit vector on the latent hypersphere that drives the gait decoder.
class Latent {
public:
    Latent() = default;
    /// Normalizes `raw`; throws if it has zero (or non-finite) norm.
    static Latent from_raw(std::vector<double> raw);
    /// Takes `unit` verbatim; throws unless its norm is 1 within 1e-9.
    static Latent from_unit(std::vector<double> unit);

    std::size_t dim() const { return z_.size(); }
    double operator[](std::size_t i) const { return z_[i]; }
    std::span<const double> values() const { return z_; }
    bool empty() const { return z_.empty(); }

    bool operator==(const Latent&) const = default;

private:
    std::vector<double> z_;
};

double dot(const Latent& a, const Latent& b);

/// Channel layout of the latent as read by the decoder. Channels beyond
/// `kStrikeElevation` are free and ignored by the decoder.
namespace channel {
inline constexpr std::size_t kVelX = 0;
inline constexpr std::size_t kVelY = 1;
inline constexpr std::size_t kFaceCos = 2;
inline constexpr std::size_t kFaceSin = 3;
inline constexpr std::size_t kSpeed = 4;
inline constexpr std::size_t kStrikeTrigger = 5;
inline constexpr std::size_t kStrikeSpeed = 6;
inline constexpr std::size_t kStrikeElevation = 7;
inline constexpr std::size_t kUsed = 8;
}  // namespace channel

struct MotionConfig {
    std::size_t latent_dim{8};
    /// Commanded turn rate per radian of facing error.
    double facing_gain{4.0};
    /// Lower bound on the facing-channel magnitude used for the readout scale.
    double min_face_channel{0.01};
    double strike_threshold{0.5};
    /// Offset separating left-foot elevation codes from right-foot ones.
    double left_foot_code_offset{0.05};
};

struct KickSwing {
    bool active{false};
    Vec3 direction{1.0, 0.0, 0.0};  // character frame, unit; its yaw is the decoded heading
    double speed{0.0};              // m/s, [0, 18]
    Side foot{Side::right};
};

/// Decoder output: the command contract the simulated character follows.
struct GaitParams {
    double target_speed{0.0};  // m/s, [0, 7]
    double heading{0.0};       // rad, movement direction in character frame
    double facing_rate{0.0};   // rad/s, [-3, 3]
    double step_frequency{1.0};
    double step_length_scale{0.0};
    KickSwing kick;
};

namespace gait_limits {
inline constexpr double kMaxSpeed = 7.0;
inline constexpr double kMaxFacingRate = 3.0;
inline constexpr double kMinStepFrequency = 0.5;
inline constexpr double kMaxStepFrequency = 4.0;
inline constexpr double kMaxStrikeSpeed = 18.0;
inline constexpr double kMaxStrikeElevation = kPi / 4.0;
}  // namespace gait_limits

/// Count of decode calls that received a non-unit latent.
std::size_t decode_normalization_warnings();

/// Fixed latent -> gait map. The velocity, speed and strike channels are
/// read relative to the magnitude of the facing channels, so the map is
/// scale-free and exactly inverts `encode_gait` on in-range commands.
GaitParams decode(const Latent& z, const MotionConfig& cfg = {});
GaitParams decode(std::span<const double> raw, const MotionConfig& cfg = {});

/// Inverse of `decode` for commands within the decoder ranges.
Latent encode_gait(const GaitParams& g, const MotionConfig& cfg = {});

/// Reference goal of a motion primitive, in the character frame.
struct MoveRefGoal {
    Vec2 move_vel;
    Vec2 face_dir{1.0, 0.0};
};

/// Goal -> latent surrogate of the motion encoder.
Latent encode(const MoveRefGoal& goal, const MotionConfig& cfg = {});

struct DegclPair {
    std::string name;
    MoveRefGoal ref_goal;
    Latent ref_latent;
};

struct DegclBuffer {
    std::vector<DegclPair> pairs;
    std::size_t size() const { return pairs.size(); }
    const DegclPair& operator[](std::size_t i) const { return pairs[i]; }
};

/// The 16 locomotion primitives with their surrogate average velocities.
DegclBuffer build_degcl_buffer(const MotionConfig& cfg = {});

void write_degcl(std::ostream& os, const DegclBuffer& buf);
DegclBuffer read_degcl(std::istream& is);

}  // namespace footsim
