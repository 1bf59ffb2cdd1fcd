// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include "sphgold/spatial_codebook.hpp"
#include "sphgold/temporal_codes.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sphgold {

struct BeamAssignment {
    SphericalCodeword codeword;
    ChipSequence code;
    double beam_angle_deg = 0.0;
};

struct MultipathTap {
    int delay_chips = 0;
    cdouble gain{1.0, 0.0};
};

/// Per-beam chip delays plus optional sparse multipath (at most 4 taps per
/// beam, |gain| <= 1). An empty tap list means the single tap {0, 1}.
struct DelayScenario {
    std::vector<int> per_beam_delay_chips;
    std::vector<std::vector<MultipathTap>> multipath_taps;
};

/// Complex white noise at `snr_db` relative to the mean power of the
/// noise-free combined waveform. Each theta row draws from its own stream.
struct NoiseSpec {
    double snr_db = 20.0;
    std::uint64_t seed = 1;
};

/// One complex sample per chip per theta, stored row-major [theta][chip].
struct ReceivedMatrix {
    std::vector<double> theta_grid;
    std::size_t chips = 0;
    CVec values;

    std::size_t rows() const noexcept { return theta_grid.size(); }
    cdouble& at(std::size_t row, std::size_t chip) { return values[row * chips + chip]; }
    const cdouble& at(std::size_t row, std::size_t chip) const { return values[row * chips + chip]; }
};

enum class DecodeMode { TemporalOnly, SphericalGold };

std::string_view decode_mode_name(DecodeMode mode);

/// Decoded magnitudes indexed [delay][beam][theta].
struct DecodedPattern {
    DecodeMode mode = DecodeMode::TemporalOnly;
    std::vector<double> theta_grid;
    std::vector<int> delays;
    std::vector<double> beam_angles;
    /// First-null half-width of each beam's clean pattern, degrees.
    std::vector<double> mainlobe_halfwidth_deg;
    std::vector<double> magnitudes;

    std::size_t beams() const noexcept { return beam_angles.size(); }
    double at(std::size_t delay_index, std::size_t beam, std::size_t theta) const
    {
        return magnitudes[(delay_index * beams() + beam) * theta_grid.size() + theta];
    }
    std::span<const double> cut(std::size_t delay_index, std::size_t beam) const
    {
        return {magnitudes.data() + (delay_index * beams() + beam) * theta_grid.size(),
                theta_grid.size()};
    }
};

/// y[theta, t] = sum_j sum_l g_jl C_j(t - tau_j - d_jl) <w_j, a(theta)>.
ReceivedMatrix synth_received(std::span<const BeamAssignment> beams,
                              const ArrayGeometry& geometry, const DelayScenario& scenario,
                              std::span<const double> theta_grid,
                              const std::optional<NoiseSpec>& noise = std::nullopt);

/// z(theta) = (1/N) sum_t C((t + decode_delay) mod N) y[theta, t].
CVec decode_temporal(const ReceivedMatrix& rx, const ChipSequence& code, int decode_delay_chips);

/// Temporal decode with the target beam's code followed by the spatial
/// matched filter: |z(theta)| * pattern_corr(u_target, theta). The main
/// beam passes unchanged while beam j's residual picks up the factor
/// rho_sph(target, j).
std::vector<double> decode_spherical_gold(const ReceivedMatrix& rx,
                                          std::span<const BeamAssignment> beams,
                                          const ArrayGeometry& geometry, int target_beam,
                                          int decode_delay_chips);

struct AoaEstimate {
    int beam_index = 0;
    double theta_hat_deg = 0.0;
    double score = 0.0;
};

/// Matches a decoded magnitude cut against every codeword's clean pattern
/// shifted across the theta grid (cosine similarity over the overlap).
/// Ties go to the lowest codeword index, then the smallest shift.
AoaEstimate aoa_estimate(std::span<const double> decoded, std::span<const double> theta_grid,
                         const Codebook& codebook, const ArrayGeometry& geometry);

struct SweepOptions {
    /// Per-beam multipath applied on top of the swept delay; empty = none.
    std::vector<std::vector<MultipathTap>> multipath_taps;
    std::optional<NoiseSpec> noise;
};

/// For every delay d and every target beam i: delay all other beams by d,
/// synthesize, decode beam i at decode delay 0 in `mode`, and stack the cuts.
DecodedPattern delay_sweep(std::span<const BeamAssignment> beams, const ArrayGeometry& geometry,
                           std::span<const double> theta_grid, std::span<const int> delays,
                           DecodeMode mode, const SweepOptions& options = {});

/// Inclusive grid start..stop in `step` increments (stop included when it
/// lands on the grid within 1e-9).
std::vector<double> make_theta_grid(double start_deg, double stop_deg, double step_deg);

} // namespace sphgold
