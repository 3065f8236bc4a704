#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

#include "stcomp/types.hpp"

namespace stcomp::ingest {

enum class MotionModel {
    constant_velocity,  // straight lines, zero reconstruction error family
    random_walk,        // heading jitters every step
    square_wave,        // right-angle zigzag, sharp corners every leg
    burst,              // straight and sparse, except one dense erratic band
    mixed,              // half random_walk, half square_wave ids
};

const char* model_name(MotionModel m);
std::optional<MotionModel> model_from_name(std::string_view name);

struct SynthSpec {
    int trajectories = 10;
    double duration = 3600.0;  // seconds, points span [0, duration]
    double period = 10.0;      // nominal sampling period, seconds
    MotionModel model = MotionModel::random_walk;
    double speed = 10.0;       // base speed, m/s

    int leg_steps = 8;              // square_wave: points per straight leg
    double burst_start = -1.0;      // burst: band offset, <0 = 45% of duration
    double burst_len = 300.0;       // burst: band length, seconds
    double burst_fraction = 0.85;   // burst: share of points inside the band
    bool emit_sog_cog = true;       // attach instantaneous speed/heading
};

/// Deterministic synthetic dataset: same seed + spec = identical points.
/// Trajectory ids run from 0; timestamps start at 0.
std::map<TrajId, Trajectory> synth(std::uint64_t seed, const SynthSpec& spec);

}  // namespace stcomp::ingest
