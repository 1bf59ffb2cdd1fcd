// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/multibeam_sim.hpp"

#include "rng.hpp"
#include "sphgold/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sphgold {

namespace {

constexpr std::size_t kMaxTaps = 4;

std::size_t check_beams(std::span<const BeamAssignment> beams)
{
    if (beams.empty())
        throw Error(ErrorCode::EmptyBeams, "at least one beam is required");
    const std::size_t n = beams.front().code.length();
    for (std::size_t j = 1; j < beams.size(); ++j)
        if (beams[j].code.length() != n)
            throw Error(ErrorCode::CodeLengthMismatch,
                        "beam " + std::to_string(j) + " has N=" +
                            std::to_string(beams[j].code.length()) + ", expected " +
                            std::to_string(n));
    return n;
}

void check_delay(int d, std::size_t n, const std::string& what)
{
    if (d < 0 || static_cast<std::size_t>(d) >= n)
        throw Error(ErrorCode::InvalidArgument,
                    what + " " + std::to_string(d) + " outside [0, " + std::to_string(n - 1) + "]");
}

std::vector<MultipathTap> taps_for(const std::vector<std::vector<MultipathTap>>& all,
                                   std::size_t beam, std::size_t n)
{
    if (beam >= all.size() || all[beam].empty())
        return {MultipathTap{}};
    const auto& taps = all[beam];
    if (taps.size() > kMaxTaps)
        throw Error(ErrorCode::InvalidArgument,
                    "beam " + std::to_string(beam) + " has more than 4 multipath taps");
    for (const auto& tap : taps) {
        check_delay(tap.delay_chips, n, "multipath delay");
        if (std::abs(tap.gain) > 1.0 + 1e-12)
            throw Error(ErrorCode::InvalidArgument, "multipath gain magnitude exceeds 1");
    }
    return taps;
}

} // namespace

std::string_view decode_mode_name(DecodeMode mode)
{
    return mode == DecodeMode::TemporalOnly ? "temporal" : "spherical-gold";
}

std::vector<double> make_theta_grid(double start_deg, double stop_deg, double step_deg)
{
    if (!(step_deg > 0.0) || stop_deg < start_deg)
        throw Error(ErrorCode::InvalidArgument, "theta grid needs step > 0 and stop >= start");
    const auto count =
        static_cast<std::size_t>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = start_deg + static_cast<double>(k) * step_deg;
    return grid;
}

ReceivedMatrix synth_received(std::span<const BeamAssignment> beams,
                              const ArrayGeometry& geometry, const DelayScenario& scenario,
                              std::span<const double> theta_grid,
                              const std::optional<NoiseSpec>& noise)
{
    const std::size_t n = check_beams(beams);
    if (!std::is_sorted(theta_grid.begin(), theta_grid.end()))
        throw Error(ErrorCode::InvalidArgument, "theta grid must be sorted");
    if (!scenario.per_beam_delay_chips.empty() &&
        scenario.per_beam_delay_chips.size() != beams.size())
        throw Error(ErrorCode::InvalidArgument, "one delay per beam is required");

    std::vector<int> delays(beams.size(), 0);
    std::vector<std::vector<MultipathTap>> taps(beams.size());
    for (std::size_t j = 0; j < beams.size(); ++j) {
        if (!scenario.per_beam_delay_chips.empty()) {
            delays[j] = scenario.per_beam_delay_chips[j];
            check_delay(delays[j], n, "beam delay");
        }
        taps[j] = taps_for(scenario.multipath_taps, j, n);
    }

    // Per-beam effective waveform: sum of delayed, weighted code copies.
    std::vector<CVec> waveform(beams.size(), CVec(n));
    for (std::size_t j = 0; j < beams.size(); ++j)
        for (std::size_t t = 0; t < n; ++t) {
            cdouble acc{0.0, 0.0};
            for (const auto& tap : taps[j])
                acc += tap.gain * static_cast<double>(beams[j].code.at(
                                      static_cast<long long>(t) - delays[j] - tap.delay_chips));
            waveform[j][t] = acc;
        }

    ReceivedMatrix rx;
    rx.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    rx.chips = n;
    rx.values.assign(theta_grid.size() * n, cdouble{});
    for (std::size_t r = 0; r < theta_grid.size(); ++r)
        for (std::size_t j = 0; j < beams.size(); ++j) {
            const cdouble p = codeword_response(beams[j].codeword, geometry, theta_grid[r]);
            for (std::size_t t = 0; t < n; ++t)
                rx.at(r, t) += waveform[j][t] * p;
        }

    if (noise) {
        double power = 0.0;
        for (const auto& v : rx.values)
            power += std::norm(v);
        power /= static_cast<double>(std::max<std::size_t>(rx.values.size(), 1));
        const double sigma = std::sqrt(power / std::pow(10.0, noise->snr_db / 10.0) / 2.0);
        for (std::size_t r = 0; r < rx.rows(); ++r) {
            detail::SplitMix64 gen(detail::derive_seed(noise->seed, r));
            for (std::size_t t = 0; t < n; ++t) {
                const double re = gen.gaussian();
                const double im = gen.gaussian();
                rx.at(r, t) += sigma * cdouble{re, im};
            }
        }
    }
    return rx;
}

CVec decode_temporal(const ReceivedMatrix& rx, const ChipSequence& code, int decode_delay_chips)
{
    if (code.length() != rx.chips)
        throw Error(ErrorCode::CodeLengthMismatch,
                    "code N=" + std::to_string(code.length()) + " vs capture N=" +
                        std::to_string(rx.chips));
    const double scale = 1.0 / static_cast<double>(rx.chips);
    CVec z(rx.rows());
    for (std::size_t r = 0; r < rx.rows(); ++r) {
        cdouble acc{0.0, 0.0};
        for (std::size_t t = 0; t < rx.chips; ++t)
            acc += static_cast<double>(code.at(static_cast<long long>(t) + decode_delay_chips)) *
                   rx.at(r, t);
        z[r] = acc * scale;
    }
    return z;
}

std::vector<double> decode_spherical_gold(const ReceivedMatrix& rx,
                                          std::span<const BeamAssignment> beams,
                                          const ArrayGeometry& geometry, int target_beam,
                                          int decode_delay_chips)
{
    check_beams(beams);
    if (target_beam < 0 || static_cast<std::size_t>(target_beam) >= beams.size())
        throw Error(ErrorCode::UnknownBeam, "target beam " + std::to_string(target_beam));
    const auto& target = beams[static_cast<std::size_t>(target_beam)];
    const CVec z = decode_temporal(rx, target.code, decode_delay_chips);
    std::vector<double> out(z.size());
    for (std::size_t r = 0; r < z.size(); ++r)
        out[r] = std::abs(z[r]) * pattern_corr(target.codeword, geometry, rx.theta_grid[r]);
    return out;
}

AoaEstimate aoa_estimate(std::span<const double> decoded, std::span<const double> theta_grid,
                         const Codebook& codebook, const ArrayGeometry& geometry)
{
    if (codebook.codewords.empty())
        throw Error(ErrorCode::EmptyCodebook, "codebook has no codewords");
    if (decoded.size() != theta_grid.size() || theta_grid.empty())
        throw Error(ErrorCode::DimensionMismatch, "decoded cut and theta grid differ in length");

    const std::size_t g = theta_grid.size();
    double cut_norm = 0.0;
    for (double v : decoded)
        cut_norm += v * v;
    cut_norm = std::sqrt(cut_norm);

    AoaEstimate best{0, theta_grid.front(), -1.0};
    std::vector<double> ref(g);
    for (std::size_t k = 0; k < codebook.codewords.size(); ++k) {
        const auto& u = codebook.codewords[k];
        for (std::size_t t = 0; t < g; ++t)
            ref[t] = pattern_corr(u, geometry, theta_grid[t]);
        const auto peak = static_cast<std::ptrdiff_t>(
            std::min_element(theta_grid.begin(), theta_grid.end(),
                             [&](double a, double b) {
                                 return std::abs(a - u.steer_angle_deg) <
                                        std::abs(b - u.steer_angle_deg);
                             }) -
            theta_grid.begin());

        // Candidate c moves the reference peak onto grid point c; samples
        // shifted past either end are dropped.
        for (std::size_t c = 0; c < g; ++c) {
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(c) - peak;
            double dot = 0.0;
            double rnorm = 0.0;
            for (std::size_t t = 0; t < g; ++t) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - shift;
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(g))
                    continue;
                const double rv = ref[static_cast<std::size_t>(src)];
                dot += rv * decoded[t];
                rnorm += rv * rv;
            }
            const double denom = std::sqrt(rnorm) * cut_norm;
            const double score = denom > 0.0 ? dot / denom : 0.0;
            if (score > best.score + 1e-12) {
                best.beam_index = static_cast<int>(k);
                best.theta_hat_deg = theta_grid[c];
                best.score = score;
            }
        }
    }
    return best;
}

DecodedPattern delay_sweep(std::span<const BeamAssignment> beams, const ArrayGeometry& geometry,
                           std::span<const double> theta_grid, std::span<const int> delays,
                           DecodeMode mode, const SweepOptions& options)
{
    const std::size_t n = check_beams(beams);
    for (int d : delays)
        check_delay(d, n, "sweep delay");

    DecodedPattern out;
    out.mode = mode;
    out.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    out.delays.assign(delays.begin(), delays.end());
    for (const auto& b : beams) {
        out.beam_angles.push_back(b.beam_angle_deg);
        out.mainlobe_halfwidth_deg.push_back(mainlobe_halfwidth(b.codeword, geometry));
    }
    const std::size_t g = theta_grid.size();
    out.magnitudes.assign(delays.size() * beams.size() * g, 0.0);

    for (std::size_t di = 0; di < delays.size(); ++di)
        for (std::size_t i = 0; i < beams.size(); ++i) {
            DelayScenario scenario;
            scenario.per_beam_delay_chips.assign(beams.size(), delays[di]);
            scenario.per_beam_delay_chips[i] = 0;
            scenario.multipath_taps = options.multipath_taps;
            std::optional<NoiseSpec> noise = options.noise;
            if (noise)
                noise->seed = detail::derive_seed(noise->seed, di * beams.size() + i);
            const ReceivedMatrix rx = synth_received(beams, geometry, scenario, theta_grid, noise);

            double* dst = out.magnitudes.data() + (di * beams.size() + i) * g;
            if (mode == DecodeMode::SphericalGold) {
                const auto cut = decode_spherical_gold(rx, beams, geometry, static_cast<int>(i), 0);
                std::copy(cut.begin(), cut.end(), dst);
            } else {
                const CVec z = decode_temporal(rx, beams[i].code, 0);
                for (std::size_t r = 0; r < g; ++r)
                    dst[r] = std::abs(z[r]);
            }
        }
    return out;
}

} // namespace sphgold
