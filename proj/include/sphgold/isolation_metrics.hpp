// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include "sphgold/multibeam_sim.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sphgold {

/// Floor applied to every reported dB value.
inline constexpr double kDbFloor = -60.0;

/// 20 log10(x) floored at -60 dB; x <= 0 maps to the floor.
double to_db(double magnitude);

/// Isolation in dB: peak within own_angle +/- own_window minus the maximum
/// within other_angle +/- other_window. Clamped to [-60, 60]. The reported
/// SLL is the negative of this value.
double inter_beam_sll(std::span<const double> pattern, std::span<const double> theta_grid,
                      double own_angle, double other_angle, double own_window_deg,
                      double other_window_deg);

inline double inter_beam_sll(std::span<const double> pattern, std::span<const double> theta_grid,
                             double own_angle, double other_angle, double window_deg)
{
    return inter_beam_sll(pattern, theta_grid, own_angle, other_angle, window_deg, window_deg);
}

struct SllCurve {
    int beam = 0;
    int other = 0;
    double beam_angle_deg = 0.0;
    double other_angle_deg = 0.0;
    double own_window_deg = 0.0;
    double other_window_deg = 0.0;
    std::vector<int> delays;
    /// Leakage relative to the main beam, negative dB.
    std::vector<double> sll_db;
};

/// SLL of decode channel i against beam j's mainlobe region at every delay.
/// window_deg <= 0 uses each beam's first-null half-width from the sweep.
SllCurve sll_vs_delay(const DecodedPattern& sweep, int i, int j, double window_deg = 0.0);

struct VariationStats {
    double min_db = 0.0;
    double max_db = 0.0;
    double range_db = 0.0;
    double half_range_db = 0.0;
};

VariationStats variation(std::span<const double> values_db);
inline VariationStats variation(const SllCurve& curve) { return variation(curve.sll_db); }

enum class BoundKind { Walsh, Gold, SphericalGold };

std::string_view bound_name(BoundKind kind);

/// Isolation bound in positive dB: Walsh 20 log10 N, Gold 10 log10 N,
/// SphericalGold 10 log10 (N m).
double theoretical_bound(BoundKind kind, int n, std::optional<int> m = std::nullopt);

struct BoundCurve {
    BoundKind kind = BoundKind::Gold;
    std::vector<int> n;
    std::vector<double> bound_db;
    std::optional<int> m;
};

BoundCurve bound_curve(BoundKind kind, std::span<const int> n_list,
                       std::optional<int> m = std::nullopt);

} // namespace sphgold
