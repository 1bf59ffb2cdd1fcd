// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/isolation_metrics.hpp"

#include "sphgold/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sphgold {

namespace {

// Max of pattern over grid points within center +/- half_width.
double window_max(std::span<const double> pattern, std::span<const double> grid, double center,
                  double half_width)
{
    constexpr double eps = 1e-9;
    bool any = false;
    double best = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (std::abs(grid[k] - center) <= half_width + eps) {
            best = any ? std::max(best, pattern[k]) : pattern[k];
            any = true;
        }
    if (!any)
        throw Error(ErrorCode::EmptyWindow, "no grid point within " + std::to_string(half_width) +
                                                " deg of " + std::to_string(center));
    return best;
}

void check_on_grid(std::span<const double> grid, double angle)
{
    if (grid.empty() || angle < grid.front() - 1e-9 || angle > grid.back() + 1e-9)
        throw Error(ErrorCode::AngleOffGrid,
                    "angle " + std::to_string(angle) + " deg is outside the theta grid");
}

} // namespace

double to_db(double magnitude)
{
    if (!(magnitude > 0.0))
        return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(magnitude));
}

double inter_beam_sll(std::span<const double> pattern, std::span<const double> theta_grid,
                      double own_angle, double other_angle, double own_window_deg,
                      double other_window_deg)
{
    if (pattern.size() != theta_grid.size())
        throw Error(ErrorCode::DimensionMismatch, "pattern and theta grid differ in length");
    if (!(own_window_deg > 0.0) || !(other_window_deg > 0.0))
        throw Error(ErrorCode::EmptyWindow, "window must be positive");
    check_on_grid(theta_grid, own_angle);
    check_on_grid(theta_grid, other_angle);

    const double peak = window_max(pattern, theta_grid, own_angle, own_window_deg);
    const double leak = window_max(pattern, theta_grid, other_angle, other_window_deg);
    if (!(leak > 0.0))
        return -kDbFloor;
    if (!(peak > 0.0))
        return kDbFloor;
    return std::clamp(20.0 * std::log10(peak / leak), kDbFloor, -kDbFloor);
}

SllCurve sll_vs_delay(const DecodedPattern& sweep, int i, int j, double window_deg)
{
    const auto beams = static_cast<int>(sweep.beams());
    if (i < 0 || j < 0 || i >= beams || j >= beams || i == j)
        throw Error(ErrorCode::UnknownBeam, "pair (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ") needs two distinct beams of " +
                                                std::to_string(beams));
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);

    SllCurve curve;
    curve.beam = i;
    curve.other = j;
    curve.beam_angle_deg = sweep.beam_angles[ui];
    curve.other_angle_deg = sweep.beam_angles[uj];
    if (window_deg > 0.0) {
        curve.own_window_deg = window_deg;
        curve.other_window_deg = window_deg;
    } else {
        curve.own_window_deg = sweep.mainlobe_halfwidth_deg.at(ui);
        curve.other_window_deg = sweep.mainlobe_halfwidth_deg.at(uj);
    }
    curve.delays = sweep.delays;
    for (std::size_t d = 0; d < sweep.delays.size(); ++d)
        curve.sll_db.push_back(-inter_beam_sll(sweep.cut(d, ui), sweep.theta_grid,
                                               curve.beam_angle_deg, curve.other_angle_deg,
                                               curve.own_window_deg, curve.other_window_deg));
    return curve;
}

VariationStats variation(std::span<const double> values_db)
{
    if (values_db.empty())
        throw Error(ErrorCode::EmptyCurve, "curve has no samples");
    const auto [lo, hi] = std::minmax_element(values_db.begin(), values_db.end());
    VariationStats s;
    s.min_db = *lo;
    s.max_db = *hi;
    s.range_db = s.max_db - s.min_db;
    s.half_range_db = s.range_db / 2.0;
    return s;
}

std::string_view bound_name(BoundKind kind)
{
    switch (kind) {
    case BoundKind::Walsh: return "walsh";
    case BoundKind::Gold: return "gold";
    case BoundKind::SphericalGold: return "spherical-gold";
    }
    return "unknown";
}

double theoretical_bound(BoundKind kind, int n, std::optional<int> m)
{
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "N must be >= 2, got " + std::to_string(n));
    const auto nd = static_cast<double>(n);
    switch (kind) {
    case BoundKind::Walsh:
        return 20.0 * std::log10(nd);
    case BoundKind::Gold:
        return 10.0 * std::log10(nd);
    case BoundKind::SphericalGold:
        if (!m)
            throw Error(ErrorCode::MissingM, "spherical-gold bound needs the subarray size m");
        if (*m < 1)
            throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
        return 10.0 * std::log10(nd * static_cast<double>(*m));
    }
    return 0.0;
}

BoundCurve bound_curve(BoundKind kind, std::span<const int> n_list, std::optional<int> m)
{
    if (n_list.empty())
        throw Error(ErrorCode::InvalidArgument, "N list is empty");
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw Error(ErrorCode::InvalidArgument, "N list must be ascending");
    BoundCurve curve;
    curve.kind = kind;
    curve.m = m;
    for (int n : n_list) {
        curve.n.push_back(n);
        curve.bound_db.push_back(theoretical_bound(kind, n, m));
    }
    return curve;
}

} // namespace sphgold
