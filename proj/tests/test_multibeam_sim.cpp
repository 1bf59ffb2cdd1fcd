#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sphgold/error.hpp"
#include "sphgold/isolation_metrics.hpp"
#include "sphgold/multibeam_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace sphgold;

namespace {

template <typename F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

std::vector<int> chips(const ChipSequence& s) { return {s.chips().begin(), s.chips().end()}; }

struct Setup {
    ArrayGeometry geometry;
    SubarrayPartition partition;
    Codebook codebook;
    std::vector<BeamAssignment> beams;
};

Setup nested_pair(const std::vector<ChipSequence>& codes, std::vector<double> angles = {-35.0, 35.0})
{
    Setup s;
    s.geometry = grid_geometry(16, 8, 0.5);
    s.partition = nested_partition(s.geometry, static_cast<int>(angles.size()));
    s.codebook = make_codebook(s.partition, s.geometry, angles);
    for (std::size_t k = 0; k < angles.size(); ++k)
        s.beams.push_back({s.codebook.codewords[k], codes[k], angles[k]});
    return s;
}

std::vector<cdouble> gains_on(const SphericalCodeword& u, const ArrayGeometry& g,
                              const std::vector<double>& grid)
{
    std::vector<cdouble> out;
    for (double th : grid)
        out.push_back(codeword_response(u, g, th));
    return out;
}

} // namespace

TEST_CASE("single beam at its own angle carries the code times the peak")
{
    const auto w = walsh_family(4);
    auto s = nested_pair({w.sequences[15]}, {20.0});
    const std::vector<double> grid{20.0};
    const auto rx = synth_received(s.beams, s.geometry, {}, grid);
    const cdouble peak = codeword_response(s.beams[0].codeword, s.geometry, 20.0);
    CHECK(std::abs(peak) == doctest::Approx(std::sqrt(128.0)));
    for (std::size_t t = 0; t < 16; ++t)
        CHECK(std::abs(rx.at(0, t) - static_cast<double>(w.sequences[15][t]) * peak) < 1e-12);
}

TEST_CASE("two beams sharing a null give a near-zero row")
{
    // Subsets {0,2} and {1,3} both have 1-lambda spacing: broadside null at 30 deg.
    const ArrayGeometry line({{-0.75, 0}, {-0.25, 0}, {0.25, 0}, {0.75, 0}});
    const SubarrayPartition p{{{0, 2}, {1, 3}}, PartitionKind::Custom};
    const auto w = walsh_family(3);
    const std::vector<BeamAssignment> beams{{make_codeword(p, line, 0, 0.0), w.sequences[5], 0.0},
                                            {make_codeword(p, line, 1, 0.0), w.sequences[6], 0.0}};
    const std::vector<double> grid{30.0};
    const auto rx = synth_received(beams, line, {}, grid);
    for (std::size_t t = 0; t < 8; ++t)
        CHECK(std::abs(rx.at(0, t)) < 1e-12);
}

TEST_CASE("synth errors")
{
    const auto w = walsh_family(3);
    const auto g5 = gold_family(5);
    auto s = nested_pair({w.sequences[1], w.sequences[2]});
    const std::vector<double> grid{0.0};
    CHECK(code_of([&] { synth_received({}, s.geometry, {}, grid); }) == ErrorCode::EmptyBeams);
    auto mixed = s.beams;
    mixed[1].code = g5.sequences[0];
    CHECK(code_of([&] { synth_received(mixed, s.geometry, {}, grid); }) ==
          ErrorCode::CodeLengthMismatch);
    DelayScenario bad{{0, 8}, {}};
    CHECK(code_of([&] { synth_received(s.beams, s.geometry, bad, grid); }) ==
          ErrorCode::InvalidArgument);
    DelayScenario taps{{0, 0}, {{{1, {2.0, 0.0}}}}};
    CHECK(code_of([&] { synth_received(s.beams, s.geometry, taps, grid); }) ==
          ErrorCode::InvalidArgument);
    const auto rx = synth_received(s.beams, s.geometry, {}, grid);
    CHECK(code_of([&] { decode_temporal(rx, g5.sequences[0], 0); }) ==
          ErrorCode::CodeLengthMismatch);
    CHECK(code_of([&] { decode_spherical_gold(rx, s.beams, s.geometry, 2, 0); }) ==
          ErrorCode::UnknownBeam);
}

TEST_CASE("matched decode recovers the pattern")
{
    const auto g5 = gold_family(5);
    auto s = nested_pair({g5.sequences[4]}, {-35.0});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const int tau = 6;
    const auto rx = synth_received(s.beams, s.geometry, {{tau}, {}}, grid);
    const auto z = decode_temporal(rx, g5.sequences[4], 31 - tau);
    for (std::size_t r = 0; r < grid.size(); ++r)
        CHECK(std::abs(z[r] - codeword_response(s.beams[0].codeword, s.geometry, grid[r])) < 1e-12);
}

TEST_CASE("walsh codes cancel at zero relative delay")
{
    const auto w = walsh_family(4);
    auto s = nested_pair({w.sequences[9]}, {35.0});
    const auto grid = make_theta_grid(-75, 75, 1.0);
    const auto rx = synth_received(s.beams, s.geometry, {}, grid);
    for (const auto& v : decode_temporal(rx, w.sequences[3], 0))
        CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("gold n=5 leakage at the worst delay is 9/31 of the pattern")
{
    const auto g5 = gold_family(5);
    const auto& ci = g5.sequences[0];
    const auto& cj = g5.sequences[1];
    long worst_tau = 0;
    for (long t = 0; t < 31; ++t)
        if (std::labs(raw_xcorr(cj, ci, t)) > std::labs(raw_xcorr(cj, ci, worst_tau)))
            worst_tau = t;
    auto s = nested_pair({cj}, {35.0});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const auto rx = synth_received(s.beams, s.geometry, {}, grid);
    const auto z = decode_temporal(rx, ci, static_cast<int>(worst_tau));
    const double rho = periodic_xcorr(cj, ci, worst_tau);
    CHECK(std::abs(rho) == doctest::Approx(9.0 / 31.0));
    for (std::size_t r = 0; r < grid.size(); ++r)
        CHECK(std::abs(z[r] - rho * codeword_response(s.beams[0].codeword, s.geometry, grid[r])) <
              1e-12);
}

TEST_CASE("spherical-gold decode: orthogonal codes and codebook leakage")
{
    const auto w = walsh_family(4);
    auto s = nested_pair({w.sequences[14], w.sequences[15]});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const auto rx = synth_received(s.beams, s.geometry, {}, grid);
    const auto cut = decode_spherical_gold(rx, s.beams, s.geometry, 0, 0);
    const double peak = std::sqrt(64.0);
    const auto own = std::find(grid.begin(), grid.end(), -35.0) - grid.begin();
    CHECK(cut[static_cast<std::size_t>(own)] == doctest::Approx(peak));
    const double hw = mainlobe_halfwidth(s.beams[1].codeword, s.geometry);
    for (std::size_t r = 0; r < grid.size(); ++r)
        if (std::abs(grid[r] - 35.0) <= hw)
            CHECK(cut[r] / peak <= s.codebook.mu_max + 1e-12);
}

TEST_CASE("walsh one-chip delay with a dense overlapping codebook barely rejects")
{
    // Both beams use the full 4-element aperture, 20 deg apart.
    const ArrayGeometry line({{-0.75, 0}, {-0.25, 0}, {0.25, 0}, {0.75, 0}});
    const SubarrayPartition full{{{0, 1, 2, 3}}, PartitionKind::Custom};
    const auto w = walsh_family(3);
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            if (i != j && std::abs(periodic_xcorr(w.sequences[j], w.sequences[i], 1)) >
                              std::abs(periodic_xcorr(w.sequences[bj], w.sequences[bi], 1))) {
                bi = i;
                bj = j;
            }
    const std::vector<BeamAssignment> beams{
        {make_codeword(full, line, 0, -10.0), w.sequences[bi], -10.0},
        {make_codeword(full, line, 0, 10.0), w.sequences[bj], 10.0}};
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const auto rx = synth_received(beams, line, {{0, 1}, {}}, grid);
    const auto cut = decode_spherical_gold(rx, beams, line, 0, 0);
    const double iso = inter_beam_sll(cut, grid, -10.0, 10.0, 5.0);
    CHECK(iso < 6.0);
}

TEST_CASE("gold-like + optimized codebook obeys the product bound")
{
    const auto gl = gold_like_family(4, 2);
    const auto g = grid_geometry(16, 8, 0.5);
    const std::vector<double> angles{-35.0, 35.0};
    const auto opt = optimize_partition(g, angles, 64, 200, 1);
    std::vector<BeamAssignment> beams;
    for (std::size_t k = 0; k < 2; ++k)
        beams.push_back({opt.codebook.codewords[k], gl.sequences[k], angles[k]});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const std::vector<int> delays{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    const auto sweep = delay_sweep(beams, g, grid, delays, DecodeMode::SphericalGold);
    const double hw = sweep.mainlobe_halfwidth_deg[1];
    const double bound = gl.worst_case_xcorr * opt.codebook.mu_max * std::pow(10.0, 1.0 / 20.0);
    for (std::size_t d = 0; d < delays.size(); ++d) {
        const auto cut = sweep.cut(d, 0);
        const double peak = *std::max_element(cut.begin(), cut.end());
        double leak = 0.0;
        for (std::size_t r = 0; r < grid.size(); ++r)
            if (std::abs(grid[r] - 35.0) <= hw)
                leak = std::max(leak, cut[r]);
        CHECK(leak / peak <= bound);
    }
}

TEST_CASE("aoa estimate")
{
    const auto w = walsh_family(4);
    const std::vector<double> angles{-35.0, -15.0, 15.0, 35.0};
    Setup s;
    s.geometry = grid_geometry(16, 16, 0.5);
    s.partition = nested_partition(s.geometry, 4);
    s.codebook = make_codebook(s.partition, s.geometry, angles);
    const auto grid = make_theta_grid(-75, 75, 0.5);
    std::vector<double> clean;
    for (double th : grid)
        clean.push_back(pattern_corr(s.codebook.codewords[2], s.geometry, th));
    auto est = aoa_estimate(clean, grid, s.codebook, s.geometry);
    CHECK(est.beam_index == 2);
    CHECK(est.theta_hat_deg == 15.0);
    CHECK(est.score == doctest::Approx(1.0));

    std::vector<double> shifted(grid.size(), 0.0);
    for (std::size_t r = 1; r < grid.size(); ++r)
        shifted[r] = clean[r - 1];
    est = aoa_estimate(shifted, grid, s.codebook, s.geometry);
    CHECK(est.beam_index == 2);
    CHECK(est.theta_hat_deg == 15.5);

    CHECK(code_of([&] { aoa_estimate(clean, grid, Codebook{}, s.geometry); }) ==
          ErrorCode::EmptyCodebook);

    // Noisy single-beam captures at 20 dB SNR.
    int correct = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t beam = static_cast<std::size_t>(trial % 4);
        const std::vector<BeamAssignment> one{
            {s.codebook.codewords[beam], w.sequences[15], angles[beam]}};
        const auto rx = synth_received(one, s.geometry, {}, grid,
                                       NoiseSpec{20.0, static_cast<std::uint64_t>(1000 + trial)});
        const auto z = decode_temporal(rx, w.sequences[15], 0);
        std::vector<double> mag;
        for (const auto& v : z)
            mag.push_back(std::abs(v));
        if (aoa_estimate(mag, grid, s.codebook, s.geometry).beam_index == static_cast<int>(beam))
            ++correct;
    }
    CHECK(correct >= 95);
}

TEST_CASE("walsh at zero delay leaves only the target's own sidelobes")
{
    const auto w = walsh_family(4);
    auto s = nested_pair({w.sequences[14], w.sequences[15]});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const std::vector<int> delays{0};
    const auto sweep = delay_sweep(s.beams, s.geometry, grid, delays, DecodeMode::TemporalOnly);
    const auto curve = sll_vs_delay(sweep, 0, 1);
    const std::vector<BeamAssignment> alone{s.beams[0]};
    const auto z = decode_temporal(synth_received(alone, s.geometry, {}, grid), s.beams[0].code, 0);
    std::vector<double> own;
    for (const auto& v : z)
        own.push_back(std::abs(v));
    const double hw0 = sweep.mainlobe_halfwidth_deg[0];
    const double hw1 = sweep.mainlobe_halfwidth_deg[1];
    CHECK(curve.sll_db[0] == doctest::Approx(-inter_beam_sll(own, grid, -35, 35, hw0, hw1)));
    const std::vector<int> bad{0, 16};
    CHECK(code_of([&] {
              delay_sweep(s.beams, s.geometry, grid, bad, DecodeMode::TemporalOnly);
          }) == ErrorCode::InvalidArgument);
}

TEST_CASE("theta grid")
{
    const auto g = make_theta_grid(-75, 75, 0.5);
    CHECK(g.size() == 301);
    CHECK(g.front() == -75.0);
    CHECK(g.back() == 75.0);
    CHECK(code_of([] { make_theta_grid(0, 1, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: factorization against the direct oracle")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const bool walsh = trial % 2 == 0;
        std::vector<ChipSequence> pool;
        if (walsh)
            pool = walsh_family(3).sequences;
        else
            for (auto p : primitive_polynomials(3))
                for (std::uint32_t st = 1; st < 8; ++st)
                    pool.push_back(generate_mseq({3, p, st}));
        const auto& ci = pool[rng() % pool.size()];
        const auto& cj = pool[rng() % pool.size()];
        const int n = static_cast<int>(ci.length());

        const int rows = 1 + static_cast<int>(rng() % 4);
        const int cols = 2 + static_cast<int>(rng() % 3);
        const auto g = grid_geometry(rows, cols, 0.5);
        const auto p = sparse_partition(g, 1, 1 + static_cast<int>(rng() % g.size()), rng());
        const double steer = -50.0 + static_cast<double>(rng() % 100);
        const auto u = make_codeword(p, g, 0, steer);
        const std::vector<BeamAssignment> beams{{u, cj, steer}};
        const int tau = static_cast<int>(rng() % static_cast<unsigned>(n));
        const int d = static_cast<int>(rng() % static_cast<unsigned>(n));
        const std::vector<double> grid{steer};
        const auto rx = synth_received(beams, g, {{tau}, {}}, grid);
        const auto z = decode_temporal(rx, ci, d);

        const auto gains = gains_on(u, g, grid);
        const auto y = oracle::synth({chips(cj)}, {tau}, {gains});
        const auto zo = oracle::decode_row(y[0], chips(ci), d);
        CHECK(std::abs(z[0] - zo) < 1e-9);
        const double rho = oracle::xcorr(chips(cj), chips(ci), tau + d);
        CHECK(std::abs(z[0] - rho * gains[0]) < 1e-9);
    }
}

TEST_CASE("property: linearity, delay periodicity and energy bound")
{
    std::mt19937_64 rng(4);
    const auto gl = gold_like_family(4, 17);
    const auto g = grid_geometry(4, 4, 0.5);
    const auto grid = make_theta_grid(-60, 60, 10);
    for (int trial = 0; trial < 120; ++trial) {
        const auto p = sparse_partition(g, 2, 4, rng());
        const std::vector<BeamAssignment> a{
            {make_codeword(p, g, 0, -20.0), gl.sequences[rng() % 17], -20.0}};
        const std::vector<BeamAssignment> b{
            {make_codeword(p, g, 1, 25.0), gl.sequences[rng() % 17], 25.0}};
        const int ta = static_cast<int>(rng() % 15);
        const int tb = static_cast<int>(rng() % 15);
        const auto rxa = synth_received(a, g, {{ta}, {}}, grid);
        const auto rxb = synth_received(b, g, {{tb}, {}}, grid);
        ReceivedMatrix sum = rxa;
        for (std::size_t k = 0; k < sum.values.size(); ++k)
            sum.values[k] += rxb.values[k];
        const auto& code = gl.sequences[rng() % 17];
        const int d = static_cast<int>(rng() % 15);
        const auto za = decode_temporal(rxa, code, d);
        const auto zb = decode_temporal(rxb, code, d);
        const auto zs = decode_temporal(sum, code, d);
        const auto zp = decode_temporal(sum, code, d + 15);
        for (std::size_t r = 0; r < grid.size(); ++r) {
            CHECK(std::abs(zs[r] - (za[r] + zb[r])) < 1e-10);
            CHECK(zs[r] == zp[r]);
            double ymax = 0.0;
            for (std::size_t t = 0; t < 15; ++t)
                ymax = std::max(ymax, std::abs(sum.at(r, t)));
            CHECK(std::abs(zs[r]) <= ymax + 1e-12);
        }
    }
}

TEST_CASE("property: deterministic synthesis and seeded noise")
{
    const auto gl = gold_like_family(4, 2);
    auto s = nested_pair({gl.sequences[0], gl.sequences[1]});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const DelayScenario sc{{0, 3}, {{}, {{0, {1, 0}}, {2, {0.3, -0.2}}}}};
    const auto a = synth_received(s.beams, s.geometry, sc, grid, NoiseSpec{10.0, 42});
    const auto b = synth_received(s.beams, s.geometry, sc, grid, NoiseSpec{10.0, 42});
    CHECK(a.values == b.values);
    const auto c = synth_received(s.beams, s.geometry, sc, grid, NoiseSpec{10.0, 43});
    CHECK(a.values != c.values);
    const auto clean = synth_received(s.beams, s.geometry, sc, grid);
    double ps = 0.0, pn = 0.0;
    for (std::size_t k = 0; k < clean.values.size(); ++k) {
        ps += std::norm(clean.values[k]);
        pn += std::norm(a.values[k] - clean.values[k]);
    }
    CHECK(10.0 * std::log10(ps / pn) == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("single-beam sweep at matched delay is delay independent")
{
    const auto gl = gold_like_family(4, 2);
    auto s = nested_pair({gl.sequences[0]}, {-35.0});
    const auto grid = make_theta_grid(-75, 75, 0.5);
    const std::vector<int> delays{0, 3, 9};
    const auto sweep = delay_sweep(s.beams, s.geometry, grid, delays, DecodeMode::TemporalOnly);
    for (std::size_t d = 1; d < delays.size(); ++d)
        for (std::size_t r = 0; r < grid.size(); ++r)
            CHECK(sweep.at(d, 0, r) == sweep.at(0, 0, r));
}
