// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sphgold {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;

/// Element position in carrier wavelengths.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct LatticeShape {
    int rows = 0;
    int cols = 0;
};

class ArrayGeometry {
public:
    ArrayGeometry() = default;
    /// Throws InvalidArgument on duplicate positions.
    explicit ArrayGeometry(std::vector<Point2> positions,
                           std::optional<LatticeShape> lattice = std::nullopt);

    std::size_t size() const noexcept { return positions_.size(); }
    std::span<const Point2> positions() const noexcept { return positions_; }
    const Point2& operator[](std::size_t k) const noexcept { return positions_[k]; }
    /// Set for rectangular lattices; elements are then stored row-major.
    const std::optional<LatticeShape>& lattice() const noexcept { return lattice_; }

private:
    std::vector<Point2> positions_;
    std::optional<LatticeShape> lattice_;
};

/// rows x cols lattice centered at the origin; columns run along x.
ArrayGeometry grid_geometry(int rows, int cols, double spacing_wavelengths);

/// Plane-wave arrival phases exp(+j 2 pi (x sin(theta) cos(phi) + y sin(theta) sin(phi))).
/// theta outside [-90, 90] is clamped with a warning on stderr.
CVec steering_vector(const ArrayGeometry& geometry, double theta_deg, double phi_deg = 0.0);

enum class PartitionKind { Nested, Sparse, Custom };

struct SubarrayPartition {
    std::vector<std::vector<std::size_t>> subsets;
    PartitionKind kind = PartitionKind::Custom;

    std::size_t count() const noexcept { return subsets.size(); }
    std::size_t subset_size() const noexcept { return subsets.empty() ? 0 : subsets.front().size(); }
};

/// Checks disjointness, equal subset sizes and index range. Throws InvalidArgument.
void validate_partition(const SubarrayPartition& partition, const ArrayGeometry& geometry);

/// Interleaved subsets covering the whole aperture. Lattice geometries use the
/// diagonal class (row + col) mod J; other geometries use index mod J.
SubarrayPartition nested_partition(const ArrayGeometry& geometry, int subarrays);

/// J seeded-random disjoint subsets of m elements each.
SubarrayPartition sparse_partition(const ArrayGeometry& geometry, int subarrays, int elements,
                                   std::uint64_t seed);

struct Taper {
    enum class Kind { Uniform, Taylor };
    Kind kind = Kind::Uniform;
    int nbar = 4;
    double sll_db = -30.0;

    static Taper uniform() { return {}; }
    static Taper taylor(int nbar, double sll_db) { return {Kind::Taylor, nbar, sll_db}; }
};

/// Unit-norm beamforming vector u_i. `weights` spans the whole array and is
/// zero off-support; the beamformer applies conj(u), so the array output for
/// an arrival vector a is <u, a> = sum conj(u_m) a_m.
struct SphericalCodeword {
    CVec weights;
    std::vector<std::size_t> support;
    double steer_angle_deg = 0.0;
    int subarray_index = 0;
    double norm = 1.0;
    Taper taper;
};

SphericalCodeword make_codeword(const SubarrayPartition& partition, const ArrayGeometry& geometry,
                                int subarray_index, double theta_deg,
                                const Taper& taper = Taper::uniform());

/// Gather `full[k]` for k in support.
CVec restrict_to_support(std::span<const cdouble> full, std::span<const std::size_t> support);

/// |<u, probe>| / (|u| |probe|) with the probe restricted to u's support.
double spatial_corr(const SphericalCodeword& u, std::span<const cdouble> probe);

/// Complex array output <u, a(theta)> (unnormalized) in the phi = 0 cut.
cdouble codeword_response(const SphericalCodeword& u, const ArrayGeometry& geometry,
                          double theta_deg);

/// spatial_corr of u against the arrival vector at theta: the subarray's
/// normalized pattern magnitude.
double pattern_corr(const SphericalCodeword& u, const ArrayGeometry& geometry, double theta_deg);

/// Angular distance from the steer angle to the first pattern null, the
/// larger of the two sides. Found by walking outward in `step_deg` steps.
double mainlobe_halfwidth(const SphericalCodeword& u, const ArrayGeometry& geometry,
                          double step_deg = 0.05);

struct Codebook {
    std::vector<SphericalCodeword> codewords;
    std::vector<double> angles;
    double mu_max = 0.0;
};

Codebook make_codebook(const SubarrayPartition& partition, const ArrayGeometry& geometry,
                       std::span<const double> angles, const Taper& taper = Taper::uniform());

/// Worst inter-beam spatial leakage: max over ordered pairs i != j of
/// pattern_corr(u_i, theta) for theta in beam j's mainlobe window
/// (theta_j +/- mainlobe_halfwidth(u_j)). Zero for a single beam.
double codebook_mu(const Codebook& codebook, const ArrayGeometry& geometry);

struct PartitionSearch {
    SubarrayPartition partition;
    Codebook codebook;
    double initial_mu = 0.0;
    int accepted_swaps = 0;
    /// mu after every accepted swap, starting with the initial value.
    std::vector<double> mu_history;
};

/// Greedy swap search: starting from sparse_partition(seed), each iteration
/// draws one candidate swap (subarray <-> other subarray or unassigned pool)
/// from a seeded generator and keeps it only if codebook_mu strictly drops.
PartitionSearch optimize_partition(const ArrayGeometry& geometry, std::span<const double> angles,
                                   int elements, int iterations, std::uint64_t seed,
                                   const Taper& taper = Taper::uniform());

/// 1 / sqrt(m) scaling floor for bound curves.
double spatial_bound(int m);

} // namespace sphgold
