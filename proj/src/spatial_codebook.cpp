// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/spatial_codebook.hpp"

#include "rng.hpp"
#include "sphgold/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace sphgold {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMuStepDeg = 0.1;

double deg2rad(double deg) { return deg * kPi / 180.0; }

double clamp_theta(double theta_deg)
{
    if (theta_deg < -90.0 || theta_deg > 90.0) {
        std::cerr << "warning: theta " << theta_deg << " deg clamped to [-90, 90]\n";
        return std::clamp(theta_deg, -90.0, 90.0);
    }
    return theta_deg;
}

// Normalized pattern of u in the phi = 0 cut. Only x contributes there.
double cut_corr(const SphericalCodeword& u, const ArrayGeometry& geometry, double theta_deg)
{
    const double k = 2.0 * kPi * std::sin(deg2rad(theta_deg));
    cdouble acc{0.0, 0.0};
    double wnorm2 = 0.0;
    for (std::size_t s : u.support) {
        acc += std::conj(u.weights[s]) * std::polar(1.0, k * geometry[s].x);
        wnorm2 += std::norm(u.weights[s]);
    }
    const double denom = std::sqrt(wnorm2 * static_cast<double>(u.support.size()));
    return denom > 0.0 ? std::abs(acc) / denom : 0.0;
}

// Discrete-aperture samples of the Taylor line-source distribution.
std::vector<double> taylor_amplitudes(std::span<const double> xs, int nbar, double sll_db)
{
    if (nbar < 2)
        throw Error(ErrorCode::InvalidArgument, "Taylor nbar must be >= 2");
    const double ratio = std::pow(10.0, std::abs(sll_db) / 20.0);
    const double a = std::acosh(ratio) / kPi;
    const double sigma2 = nbar * nbar / (a * a + (nbar - 0.5) * (nbar - 0.5));

    std::vector<double> coeff(static_cast<std::size_t>(nbar), 0.0);
    for (int m = 1; m < nbar; ++m) {
        double num = 1.0;
        double den = 1.0;
        for (int n = 1; n < nbar; ++n) {
            num *= 1.0 - m * m / (sigma2 * (a * a + (n - 0.5) * (n - 0.5)));
            if (n != m)
                den *= 1.0 - static_cast<double>(m * m) / static_cast<double>(n * n);
        }
        coeff[static_cast<std::size_t>(m)] = ((m % 2 == 1) ? 1.0 : -1.0) * num / (2.0 * den);
    }

    std::set<double> distinct(xs.begin(), xs.end());
    const double lo = *distinct.begin();
    const double hi = *distinct.rbegin();
    const auto cells = static_cast<double>(distinct.size());
    std::vector<double> amp(xs.size(), 1.0);
    if (distinct.size() < 2)
        return amp;
    const double length = (hi - lo) * cells / (cells - 1.0);
    const double center = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double p = (xs[k] - center) / length;
        double g = 1.0;
        for (int m = 1; m < nbar; ++m)
            g += 2.0 * coeff[static_cast<std::size_t>(m)] * std::cos(2.0 * kPi * m * p);
        amp[k] = std::max(g, 0.0);
    }
    return amp;
}

SphericalCodeword build_codeword(std::vector<std::size_t> support, const ArrayGeometry& geometry,
                                 int subarray_index, double theta_deg, const Taper& taper)
{
    SphericalCodeword u;
    u.weights.assign(geometry.size(), cdouble{0.0, 0.0});
    u.support = std::move(support);
    u.steer_angle_deg = theta_deg;
    u.subarray_index = subarray_index;
    u.taper = taper;

    std::vector<double> amp(u.support.size(), 1.0);
    if (taper.kind == Taper::Kind::Taylor) {
        std::vector<double> xs;
        xs.reserve(u.support.size());
        for (std::size_t s : u.support)
            xs.push_back(geometry[s].x);
        amp = taylor_amplitudes(xs, taper.nbar, taper.sll_db);
    }

    const CVec a = steering_vector(geometry, theta_deg);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < u.support.size(); ++k) {
        const std::size_t s = u.support[k];
        u.weights[s] = amp[k] * a[s];
        norm2 += amp[k] * amp[k];
    }
    if (norm2 <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "codeword has zero norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (std::size_t s : u.support)
        u.weights[s] *= scale;
    u.norm = 1.0;
    return u;
}

double pair_leakage(const SphericalCodeword& victim, const ArrayGeometry& geometry,
                    double center_deg, double halfwidth_deg)
{
    const double lo = std::max(-90.0, center_deg - halfwidth_deg);
    const double hi = std::min(90.0, center_deg + halfwidth_deg);
    double worst = cut_corr(victim, geometry, std::clamp(center_deg, -90.0, 90.0));
    worst = std::max(worst, cut_corr(victim, geometry, lo));
    worst = std::max(worst, cut_corr(victim, geometry, hi));
    const int steps = static_cast<int>(std::floor(halfwidth_deg / kMuStepDeg));
    for (int k = -steps; k <= steps; ++k) {
        const double theta = center_deg + k * kMuStepDeg;
        if (theta < lo || theta > hi)
            continue;
        worst = std::max(worst, cut_corr(victim, geometry, theta));
    }
    return worst;
}

double mu_from(std::span<const SphericalCodeword> codewords, std::span<const double> halfwidths,
               const ArrayGeometry& geometry)
{
    double mu = 0.0;
    for (std::size_t j = 0; j < codewords.size(); ++j)
        for (std::size_t i = 0; i < codewords.size(); ++i)
            if (i != j)
                mu = std::max(mu, pair_leakage(codewords[i], geometry,
                                               codewords[j].steer_angle_deg, halfwidths[j]));
    return mu;
}

} // namespace

ArrayGeometry::ArrayGeometry(std::vector<Point2> positions, std::optional<LatticeShape> lattice)
    : positions_(std::move(positions)), lattice_(lattice)
{
    std::vector<std::pair<double, double>> sorted;
    sorted.reserve(positions_.size());
    for (const auto& p : positions_)
        sorted.emplace_back(p.x, p.y);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorCode::InvalidArgument, "element positions must be pairwise distinct");
    if (lattice_ && static_cast<std::size_t>(lattice_->rows) *
                            static_cast<std::size_t>(lattice_->cols) !=
                        positions_.size())
        throw Error(ErrorCode::InvalidArgument, "lattice shape does not match element count");
}

ArrayGeometry grid_geometry(int rows, int cols, double spacing_wavelengths)
{
    if (rows < 1 || cols < 1 || rows * cols < 2 || rows * cols > 4096)
        throw Error(ErrorCode::SizeOutOfRange,
                    "grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " outside [2, 4096] elements");
    if (!(spacing_wavelengths > 0.0))
        throw Error(ErrorCode::SizeOutOfRange, "element spacing must be positive");
    std::vector<Point2> positions;
    positions.reserve(static_cast<std::size_t>(rows * cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            positions.push_back({(c - 0.5 * (cols - 1)) * spacing_wavelengths,
                                 (r - 0.5 * (rows - 1)) * spacing_wavelengths});
    return ArrayGeometry(std::move(positions), LatticeShape{rows, cols});
}

CVec steering_vector(const ArrayGeometry& geometry, double theta_deg, double phi_deg)
{
    const double theta = deg2rad(clamp_theta(theta_deg));
    const double phi = deg2rad(phi_deg);
    const double kx = 2.0 * kPi * std::sin(theta) * std::cos(phi);
    const double ky = 2.0 * kPi * std::sin(theta) * std::sin(phi);
    CVec a(geometry.size());
    for (std::size_t m = 0; m < geometry.size(); ++m)
        a[m] = std::polar(1.0, kx * geometry[m].x + ky * geometry[m].y);
    return a;
}

void validate_partition(const SubarrayPartition& partition, const ArrayGeometry& geometry)
{
    if (partition.subsets.empty())
        throw Error(ErrorCode::InvalidArgument, "partition has no subsets");
    std::vector<bool> seen(geometry.size(), false);
    const std::size_t m = partition.subsets.front().size();
    for (std::size_t i = 0; i < partition.subsets.size(); ++i) {
        const auto& subset = partition.subsets[i];
        if (subset.size() != m)
            throw Error(ErrorCode::InvalidArgument,
                        "subset " + std::to_string(i) + " has size " +
                            std::to_string(subset.size()) + ", expected " + std::to_string(m));
        if (subset.empty())
            throw Error(ErrorCode::InvalidArgument, "empty subset " + std::to_string(i));
        for (std::size_t e : subset) {
            if (e >= geometry.size())
                throw Error(ErrorCode::IndexOutOfRange,
                            "element index " + std::to_string(e) + " out of range");
            if (seen[e])
                throw Error(ErrorCode::InvalidArgument,
                            "element " + std::to_string(e) + " appears in more than one subset");
            seen[e] = true;
        }
    }
    if (partition.kind == PartitionKind::Nested &&
        m * partition.subsets.size() != geometry.size())
        throw Error(ErrorCode::InvalidArgument, "nested partition must cover the array");
}

SubarrayPartition nested_partition(const ArrayGeometry& geometry, int subarrays)
{
    const auto total = geometry.size();
    if (subarrays < 1 || total % static_cast<std::size_t>(subarrays) != 0)
        throw Error(ErrorCode::NonDivisible,
                    std::to_string(subarrays) + " does not divide " + std::to_string(total));
    const auto j = static_cast<std::size_t>(subarrays);
    SubarrayPartition partition;
    partition.kind = PartitionKind::Nested;

    auto assign = [&](auto class_of) {
        partition.subsets.assign(j, {});
        for (std::size_t e = 0; e < total; ++e)
            partition.subsets[class_of(e)].push_back(e);
        return std::all_of(partition.subsets.begin(), partition.subsets.end(),
                           [&](const auto& s) { return s.size() == total / j; });
    };

    if (const auto& lattice = geometry.lattice()) {
        const auto cols = static_cast<std::size_t>(lattice->cols);
        if (assign([&](std::size_t e) { return (e / cols + e % cols) % j; }))
            return partition;
    }
    assign([&](std::size_t e) { return e % j; });
    return partition;
}

SubarrayPartition sparse_partition(const ArrayGeometry& geometry, int subarrays, int elements,
                                   std::uint64_t seed)
{
    if (subarrays < 1 || elements < 1)
        throw Error(ErrorCode::Infeasible, "need at least one subarray of one element");
    const auto j = static_cast<std::size_t>(subarrays);
    const auto m = static_cast<std::size_t>(elements);
    if (j * m > geometry.size())
        throw Error(ErrorCode::Infeasible,
                    std::to_string(subarrays) + " x " + std::to_string(elements) +
                        " elements exceed the " + std::to_string(geometry.size()) +
                        "-element array");
    std::vector<std::size_t> order(geometry.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    detail::SplitMix64 rng(seed);
    for (std::size_t k = order.size(); k > 1; --k)
        std::swap(order[k - 1], order[rng.below(k)]);

    SubarrayPartition partition;
    partition.kind = PartitionKind::Sparse;
    for (std::size_t i = 0; i < j; ++i) {
        std::vector<std::size_t> subset(order.begin() + static_cast<std::ptrdiff_t>(i * m),
                                        order.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
        std::sort(subset.begin(), subset.end());
        partition.subsets.push_back(std::move(subset));
    }
    return partition;
}

SphericalCodeword make_codeword(const SubarrayPartition& partition, const ArrayGeometry& geometry,
                                int subarray_index, double theta_deg, const Taper& taper)
{
    if (subarray_index < 0 || static_cast<std::size_t>(subarray_index) >= partition.count())
        throw Error(ErrorCode::IndexOutOfRange,
                    "subarray " + std::to_string(subarray_index) + " of " +
                        std::to_string(partition.count()));
    return build_codeword(partition.subsets[static_cast<std::size_t>(subarray_index)], geometry,
                          subarray_index, theta_deg, taper);
}

CVec restrict_to_support(std::span<const cdouble> full, std::span<const std::size_t> support)
{
    CVec out;
    out.reserve(support.size());
    for (std::size_t s : support) {
        if (s >= full.size())
            throw Error(ErrorCode::SupportMismatch, "support index beyond vector length");
        out.push_back(full[s]);
    }
    return out;
}

double spatial_corr(const SphericalCodeword& u, std::span<const cdouble> probe)
{
    if (probe.size() != u.support.size())
        throw Error(ErrorCode::SupportMismatch,
                    "probe has " + std::to_string(probe.size()) + " entries, support has " +
                        std::to_string(u.support.size()));
    cdouble acc{0.0, 0.0};
    double un = 0.0;
    double pn = 0.0;
    for (std::size_t k = 0; k < probe.size(); ++k) {
        const cdouble w = u.weights[u.support[k]];
        acc += std::conj(w) * probe[k];
        un += std::norm(w);
        pn += std::norm(probe[k]);
    }
    if (un <= 0.0 || pn <= 0.0)
        return 0.0;
    return std::min(1.0, std::abs(acc) / std::sqrt(un * pn));
}

cdouble codeword_response(const SphericalCodeword& u, const ArrayGeometry& geometry,
                          double theta_deg)
{
    const double k = 2.0 * kPi * std::sin(deg2rad(theta_deg));
    cdouble acc{0.0, 0.0};
    for (std::size_t s : u.support)
        acc += std::conj(u.weights[s]) * std::polar(1.0, k * geometry[s].x);
    return acc;
}

double pattern_corr(const SphericalCodeword& u, const ArrayGeometry& geometry, double theta_deg)
{
    return std::min(1.0, cut_corr(u, geometry, theta_deg));
}

double mainlobe_halfwidth(const SphericalCodeword& u, const ArrayGeometry& geometry,
                          double step_deg)
{
    if (!(step_deg > 0.0))
        throw Error(ErrorCode::InvalidArgument, "halfwidth step must be positive");
    const double center = u.steer_angle_deg;
    auto walk = [&](double direction) {
        double theta = center;
        double value = cut_corr(u, geometry, theta);
        while (true) {
            const double next = theta + direction * step_deg;
            if (next > 90.0 || next < -90.0)
                return std::abs(std::clamp(next, -90.0, 90.0) - center);
            const double next_value = cut_corr(u, geometry, next);
            if (next_value >= value)
                return std::abs(theta - center);
            theta = next;
            value = next_value;
        }
    };
    return std::max(walk(1.0), walk(-1.0));
}

Codebook make_codebook(const SubarrayPartition& partition, const ArrayGeometry& geometry,
                       std::span<const double> angles, const Taper& taper)
{
    if (angles.size() != partition.count())
        throw Error(ErrorCode::InvalidArgument,
                    std::to_string(angles.size()) + " angles for " +
                        std::to_string(partition.count()) + " subarrays");
    validate_partition(partition, geometry);
    Codebook book;
    book.angles.assign(angles.begin(), angles.end());
    for (std::size_t i = 0; i < angles.size(); ++i)
        book.codewords.push_back(
            make_codeword(partition, geometry, static_cast<int>(i), angles[i], taper));
    book.mu_max = codebook_mu(book, geometry);
    return book;
}

double codebook_mu(const Codebook& codebook, const ArrayGeometry& geometry)
{
    if (codebook.codewords.empty())
        throw Error(ErrorCode::EmptyCodebook, "codebook has no codewords");
    std::vector<double> halfwidths;
    halfwidths.reserve(codebook.codewords.size());
    for (const auto& u : codebook.codewords)
        halfwidths.push_back(mainlobe_halfwidth(u, geometry));
    return mu_from(codebook.codewords, halfwidths, geometry);
}

PartitionSearch optimize_partition(const ArrayGeometry& geometry, std::span<const double> angles,
                                   int elements, int iterations, std::uint64_t seed,
                                   const Taper& taper)
{
    if (angles.empty())
        throw Error(ErrorCode::Infeasible, "no beam angles given");
    const std::size_t j = angles.size();
    const auto m = static_cast<std::size_t>(std::max(elements, 0));
    if (elements < 1 || j * m > geometry.size())
        throw Error(ErrorCode::Infeasible,
                    std::to_string(j) + " x " + std::to_string(elements) +
                        " elements do not fit the " + std::to_string(geometry.size()) +
                        "-element array");

    SubarrayPartition partition = sparse_partition(geometry, static_cast<int>(j), elements, seed);
    std::vector<bool> used(geometry.size(), false);
    for (const auto& s : partition.subsets)
        for (std::size_t e : s)
            used[e] = true;
    std::vector<std::size_t> pool;
    for (std::size_t e = 0; e < geometry.size(); ++e)
        if (!used[e])
            pool.push_back(e);

    std::vector<SphericalCodeword> words;
    std::vector<double> halfwidths;
    for (std::size_t i = 0; i < j; ++i) {
        words.push_back(build_codeword(partition.subsets[i], geometry, static_cast<int>(i),
                                       angles[i], taper));
        halfwidths.push_back(mainlobe_halfwidth(words.back(), geometry));
    }
    double mu = mu_from(words, halfwidths, geometry);

    PartitionSearch result;
    result.initial_mu = mu;
    result.mu_history.push_back(mu);

    detail::SplitMix64 rng(detail::derive_seed(seed, 0x5157A9));
    const std::size_t cross = (j - 1) * m;
    const std::size_t choices = cross + pool.size();
    for (int it = 0; it < iterations && choices > 0; ++it) {
        const std::size_t a = rng.below(j);
        const std::size_t p = rng.below(m);
        const std::size_t r = rng.below(choices);

        auto trial = partition.subsets;
        std::size_t b = j;
        std::size_t pool_slot = 0;
        if (r < cross) {
            b = r / m;
            if (b >= a)
                ++b;
            std::swap(trial[a][p], trial[b][r % m]);
        } else {
            pool_slot = r - cross;
            trial[a][p] = pool[pool_slot];
        }

        auto trial_words = words;
        auto trial_halfwidths = halfwidths;
        for (std::size_t k : {a, b}) {
            if (k >= j)
                continue;
            trial_words[k] = build_codeword(trial[k], geometry, static_cast<int>(k), angles[k],
                                            taper);
            trial_halfwidths[k] = mainlobe_halfwidth(trial_words[k], geometry);
        }
        const double trial_mu = mu_from(trial_words, trial_halfwidths, geometry);
        if (trial_mu < mu) {
            if (b >= j)
                pool[pool_slot] = partition.subsets[a][p];
            partition.subsets = std::move(trial);
            words = std::move(trial_words);
            halfwidths = std::move(trial_halfwidths);
            mu = trial_mu;
            ++result.accepted_swaps;
            result.mu_history.push_back(mu);
        }
    }

    for (auto& s : partition.subsets)
        std::sort(s.begin(), s.end());
    result.codebook = make_codebook(partition, geometry, angles, taper);
    result.partition = std::move(partition);
    return result;
}

double spatial_bound(int m)
{
    if (m < 1)
        throw Error(ErrorCode::InvalidArgument, "subarray size must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(m));
}

} // namespace sphgold
