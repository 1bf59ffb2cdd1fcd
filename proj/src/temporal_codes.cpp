// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/temporal_codes.hpp"

#include "sphgold/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

namespace sphgold {

std::string_view family_name(FamilyKind kind)
{
    switch (kind) {
    case FamilyKind::Walsh: return "Walsh";
    case FamilyKind::Gold: return "Gold";
    case FamilyKind::GoldLike: return "GoldLike";
    case FamilyKind::MSequence: return "MSequence";
    }
    return "?";
}

ChipSequence::ChipSequence(std::vector<int> chips, FamilyKind kind, int index)
    : chips_(std::move(chips)), kind_(kind), index_(index)
{
    if (chips_.size() < 2)
        throw Error(ErrorCode::SizeOutOfRange, "chip sequence needs at least 2 chips");
    for (std::size_t k = 0; k < chips_.size(); ++k) {
        if (chips_[k] != 1 && chips_[k] != -1)
            throw Error(ErrorCode::InvalidArgument,
                        "chip " + std::to_string(k) + " is not +1/-1");
    }
}

int ChipSequence::at(long long t) const noexcept
{
    const auto n = static_cast<long long>(chips_.size());
    long long r = t % n;
    if (r < 0)
        r += n;
    return chips_[static_cast<std::size_t>(r)];
}

namespace {

// Bit-packed view used for the O(N^2) correlation sweeps. Bit set <=> chip -1.
// `doubled` holds two back-to-back periods plus padding so a rotation by tau
// is a plain unaligned read.
struct PackedSequence {
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;
    std::vector<std::uint64_t> doubled;

    explicit PackedSequence(const ChipSequence& s) : n(s.length()), words((n + 63) / 64)
    {
        bits.assign(words, 0);
        doubled.assign((2 * n + 63) / 64 + 2, 0);
        for (std::size_t k = 0; k < n; ++k) {
            if (s[k] < 0) {
                bits[k / 64] |= std::uint64_t{1} << (k % 64);
                doubled[k / 64] |= std::uint64_t{1} << (k % 64);
                doubled[(k + n) / 64] |= std::uint64_t{1} << ((k + n) % 64);
            }
        }
    }

    std::uint64_t window(std::size_t pos) const noexcept
    {
        const std::size_t w = pos / 64;
        const unsigned off = static_cast<unsigned>(pos % 64);
        if (off == 0)
            return doubled[w];
        return (doubled[w] >> off) | (doubled[w + 1] << (64 - off));
    }
};

long packed_xcorr(const PackedSequence& a, const PackedSequence& b, std::size_t tau)
{
    long mismatches = 0;
    for (std::size_t w = 0; w < a.words; ++w) {
        std::uint64_t x = a.bits[w] ^ b.window(tau + 64 * w);
        if (w + 1 == a.words && a.n % 64 != 0)
            x &= (std::uint64_t{1} << (a.n % 64)) - 1;
        mismatches += std::popcount(x);
    }
    return static_cast<long>(a.n) - 2 * mismatches;
}

long packed_max_abs(const PackedSequence& a, const PackedSequence& b)
{
    long worst = 0;
    for (std::size_t tau = 0; tau < a.n; ++tau)
        worst = std::max(worst, std::labs(packed_xcorr(a, b, tau)));
    return worst;
}

void require_same_length(const ChipSequence& a, const ChipSequence& b)
{
    if (a.length() != b.length())
        throw Error(ErrorCode::LengthMismatch, "sequences have lengths " +
                                                   std::to_string(a.length()) + " and " +
                                                   std::to_string(b.length()));
}

std::string hex(std::uint32_t x)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%X", x);
    return buf;
}

int parity(std::uint32_t x) { return std::popcount(x) & 1; }

// Period of the LFSR state cycle through `state`, or 0 if it never returns
// within 2^degree steps (singular feedback).
std::uint64_t lfsr_period(int degree, std::uint32_t polynomial, std::uint32_t state)
{
    const std::uint32_t mask = (std::uint32_t{1} << degree) - 1;
    const std::uint32_t taps = polynomial & mask;
    std::uint32_t reg = state & mask;
    const std::uint32_t start = reg;
    const std::uint64_t limit = std::uint64_t{1} << degree;
    for (std::uint64_t k = 1; k <= limit; ++k) {
        const auto next = static_cast<std::uint32_t>(parity(reg & taps));
        reg = (reg >> 1) | (next << (degree - 1));
        if (reg == start)
            return k;
    }
    return 0;
}

std::vector<int> lfsr_chips(int degree, std::uint32_t polynomial, std::uint32_t state,
                            std::size_t count)
{
    const std::uint32_t mask = (std::uint32_t{1} << degree) - 1;
    const std::uint32_t taps = polynomial & mask;
    std::uint32_t reg = state & mask;
    std::vector<int> chips(count);
    for (std::size_t k = 0; k < count; ++k) {
        chips[k] = (reg & 1u) ? -1 : 1;
        const auto next = static_cast<std::uint32_t>(parity(reg & taps));
        reg = (reg >> 1) | (next << (degree - 1));
    }
    return chips;
}

ChipSequence product_with_shift(const ChipSequence& u, const ChipSequence& v, std::size_t shift,
                                FamilyKind kind, int index)
{
    const std::size_t n = u.length();
    std::vector<int> chips(n);
    for (std::size_t k = 0; k < n; ++k)
        chips[k] = u[k] * v[(k + shift) % n];
    return ChipSequence(std::move(chips), kind, index);
}

// [u, v, u*T^0 v, ..., u*T^(N-1) v]; the +-1 product is the XOR of the bit streams.
std::vector<ChipSequence> xor_family(const ChipSequence& u, const ChipSequence& v,
                                     FamilyKind kind)
{
    const std::size_t n = u.length();
    std::vector<ChipSequence> family;
    family.reserve(n + 2);
    family.emplace_back(std::vector<int>(u.chips().begin(), u.chips().end()), kind, 0);
    family.emplace_back(std::vector<int>(v.chips().begin(), v.chips().end()), kind, 1);
    for (std::size_t k = 0; k < n; ++k)
        family.push_back(product_with_shift(u, v, k, kind, static_cast<int>(k + 2)));
    return family;
}

ChipSequence mseq_for(int degree, std::uint32_t polynomial)
{
    return generate_mseq(LfsrSpec{degree, polynomial, 1});
}

// Greedy subset: best member pair first, then the member that least raises
// the subset worst case. Lowest index wins ties.
std::vector<std::size_t> greedy_subset(const std::vector<std::vector<long>>& pair_worst,
                                       std::size_t count, long& subset_worst)
{
    const std::size_t size = pair_worst.size();
    std::vector<std::size_t> chosen;
    long best = std::numeric_limits<long>::max();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j)
            if (pair_worst[i][j] < best) {
                best = pair_worst[i][j];
                bi = i;
                bj = j;
            }
    if (count == 1) {
        subset_worst = 0;
        return {0};
    }
    chosen = {bi, bj};
    subset_worst = best;
    std::vector<bool> used(size, false);
    used[bi] = used[bj] = true;
    while (chosen.size() < count) {
        long best_add = std::numeric_limits<long>::max();
        std::size_t pick = size;
        for (std::size_t c = 0; c < size; ++c) {
            if (used[c])
                continue;
            long w = subset_worst;
            for (std::size_t s : chosen)
                w = std::max(w, pair_worst[std::min(s, c)][std::max(s, c)]);
            if (w < best_add) {
                best_add = w;
                pick = c;
            }
        }
        used[pick] = true;
        chosen.push_back(pick);
        subset_worst = best_add;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace

ChipSequence generate_mseq(const LfsrSpec& spec)
{
    if (spec.degree < 3 || spec.degree > 16)
        throw Error(ErrorCode::SizeOutOfRange,
                    "LFSR degree " + std::to_string(spec.degree) + " outside [3, 16]");
    if ((spec.polynomial >> spec.degree) != 1u)
        throw Error(ErrorCode::InvalidArgument,
                    "polynomial mask must have its x^" + std::to_string(spec.degree) +
                        " term as the highest set bit");
    const std::uint32_t mask = (std::uint32_t{1} << spec.degree) - 1;
    if ((spec.state & mask) == 0)
        throw Error(ErrorCode::ZeroState, "LFSR initial state is all-zero");

    const std::uint64_t expected = (std::uint64_t{1} << spec.degree) - 1;
    const std::uint64_t period = lfsr_period(spec.degree, spec.polynomial, spec.state);
    if (period != expected)
        throw Error(ErrorCode::NonPrimitivePolynomial,
                    "polynomial " + hex(spec.polynomial) + " gives period " + std::to_string(period) + ", expected " +
                        std::to_string(expected));
    return ChipSequence(lfsr_chips(spec.degree, spec.polynomial, spec.state, expected),
                        FamilyKind::MSequence, 0);
}

std::uint32_t default_primitive_polynomial(int degree)
{
    static constexpr std::uint32_t table[] = {
        0xB,    0x13,   0x25,   0x43,   0x83,   0x11D,  0x211,
        0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
    };
    if (degree < 3 || degree > 16)
        throw Error(ErrorCode::SizeOutOfRange, "no table entry for degree " +
                                                   std::to_string(degree));
    return table[degree - 3];
}

std::vector<std::uint32_t> primitive_polynomials(int degree)
{
    if (degree < 3 || degree > 12)
        throw Error(ErrorCode::SizeOutOfRange,
                    "primitive polynomial search supports degrees 3..12");
    const std::uint64_t expected = (std::uint64_t{1} << degree) - 1;
    std::vector<std::uint32_t> out;
    for (std::uint32_t p = (1u << degree) | 1u; p < (1u << (degree + 1)); p += 2) {
        // An even number of terms means x + 1 divides p.
        if ((std::popcount(p) & 1) == 0)
            continue;
        if (lfsr_period(degree, p, 1) == expected)
            out.push_back(p);
    }
    return out;
}

CodeFamily walsh_family(int log2_n)
{
    if (log2_n < 1 || log2_n > 8)
        throw Error(ErrorCode::SizeOutOfRange,
                    "Walsh log2 size " + std::to_string(log2_n) + " outside [1, 8]");
    const std::size_t n = std::size_t{1} << log2_n;
    CodeFamily family;
    family.kind = FamilyKind::Walsh;
    family.length = n;
    family.sequences.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> chips(n);
        for (std::size_t j = 0; j < n; ++j)
            chips[j] = (std::popcount(i & j) & 1) ? -1 : 1;
        family.sequences.emplace_back(std::move(chips), FamilyKind::Walsh, static_cast<int>(i));
    }
    family.worst_case_raw = worst_case_raw_xcorr(family.sequences);
    family.worst_case_xcorr = static_cast<double>(family.worst_case_raw) / static_cast<double>(n);
    return family;
}

long gold_t(int n) { return (1L << ((n + 2) / 2)) + 1; }

CodeFamily gold_family(int n)
{
    if (n % 4 == 0)
        throw Error(ErrorCode::NoPreferredPair,
                    "preferred pairs do not exist for n = " + std::to_string(n) +
                        " (n mod 4 == 0); use gold_like_family instead");
    if (n < 5 || n > 12)
        throw Error(ErrorCode::SizeOutOfRange,
                    "Gold degree " + std::to_string(n) + " outside [5, 12]");

    const long t = gold_t(n);
    const auto polys = primitive_polynomials(n);
    for (std::size_t i = 0; i < polys.size(); ++i) {
        const ChipSequence u = mseq_for(n, polys[i]);
        const PackedSequence pu(u);
        for (std::size_t j = i + 1; j < polys.size(); ++j) {
            const ChipSequence v = mseq_for(n, polys[j]);
            const PackedSequence pv(v);
            bool three_valued = true;
            for (std::size_t tau = 0; tau < u.length() && three_valued; ++tau) {
                const long c = packed_xcorr(pu, pv, tau);
                three_valued = c == -1 || c == -t || c == t - 2;
            }
            if (!three_valued)
                continue;
            CodeFamily family;
            family.kind = FamilyKind::Gold;
            family.length = u.length();
            family.sequences = xor_family(u, v, FamilyKind::Gold);
            family.polynomials = {polys[i], polys[j]};
            family.worst_case_raw = t;
            family.worst_case_xcorr = static_cast<double>(t) / static_cast<double>(u.length());
            return family;
        }
    }
    throw Error(ErrorCode::NoPreferredPair, "no preferred pair found for n = " + std::to_string(n));
}

CodeFamily gold_like_family(int n, int count)
{
    if (n < 4 || n > 12)
        throw Error(ErrorCode::SizeOutOfRange,
                    "Gold-like degree " + std::to_string(n) + " outside [4, 12]");
    const std::size_t full = (std::size_t{1} << n) + 1;
    if (count < 1 || static_cast<std::size_t>(count) > full)
        throw Error(ErrorCode::SizeOutOfRange,
                    "count " + std::to_string(count) + " outside [1, " + std::to_string(full) +
                        "] for n = " + std::to_string(n));

    const auto polys = primitive_polynomials(n);
    const auto want = static_cast<std::size_t>(count);
    const bool exhaustive_subset = want < full && full <= 257;

    long best_score = std::numeric_limits<long>::max();
    CodeFamily best;
    std::vector<ChipSequence> mseqs;
    std::vector<PackedSequence> packed;
    for (auto p : polys) {
        mseqs.push_back(mseq_for(n, p));
        packed.emplace_back(mseqs.back());
    }

    for (std::size_t i = 0; i < polys.size(); ++i) {
        for (std::size_t j = i + 1; j < polys.size(); ++j) {
            long score = 0;
            std::vector<std::size_t> members;
            if (exhaustive_subset) {
                const auto family = xor_family(mseqs[i], mseqs[j], FamilyKind::GoldLike);
                std::vector<PackedSequence> fp;
                fp.reserve(family.size());
                for (const auto& s : family)
                    fp.emplace_back(s);
                std::vector<std::vector<long>> pair_worst(family.size(),
                                                          std::vector<long>(family.size(), 0));
                for (std::size_t a = 0; a < family.size(); ++a)
                    for (std::size_t b = a + 1; b < family.size(); ++b)
                        pair_worst[a][b] = packed_max_abs(fp[a], fp[b]);
                members = greedy_subset(pair_worst, want, score);
            } else {
                // Every cross-correlation inside a full XOR family is a value of
                // the generating pair's spectrum or -1.
                score = std::max(1L, packed_max_abs(packed[i], packed[j]));
            }
            if (score < best_score) {
                best_score = score;
                auto family = xor_family(mseqs[i], mseqs[j], FamilyKind::GoldLike);
                best = CodeFamily{};
                best.kind = FamilyKind::GoldLike;
                best.length = mseqs[i].length();
                best.polynomials = {polys[i], polys[j]};
                if (members.empty()) {
                    for (std::size_t k = 0; k < want; ++k)
                        members.push_back(k);
                }
                for (std::size_t k = 0; k < members.size(); ++k) {
                    const auto& src = family[members[k]];
                    best.sequences.emplace_back(
                        std::vector<int>(src.chips().begin(), src.chips().end()),
                        FamilyKind::GoldLike, static_cast<int>(k));
                }
            }
        }
    }
    if (!exhaustive_subset && want < full)
        best.worst_case_raw = worst_case_raw_xcorr(best.sequences);
    else
        best.worst_case_raw = want == 1 ? 0 : best_score;
    best.worst_case_xcorr =
        static_cast<double>(best.worst_case_raw) / static_cast<double>(best.length);
    return best;
}

long raw_xcorr(const ChipSequence& a, const ChipSequence& b, long long tau)
{
    require_same_length(a, b);
    const auto n = static_cast<long long>(a.length());
    long long shift = tau % n;
    if (shift < 0)
        shift += n;
    long sum = 0;
    for (long long k = 0; k < n; ++k)
        sum += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>((k + shift) % n)];
    return sum;
}

std::vector<long> raw_xcorr_profile(const ChipSequence& a, const ChipSequence& b)
{
    require_same_length(a, b);
    std::vector<long> out(a.length());
    if (a.length() < 128) {
        for (std::size_t tau = 0; tau < a.length(); ++tau)
            out[tau] = raw_xcorr(a, b, static_cast<long long>(tau));
        return out;
    }
    const PackedSequence pa(a), pb(b);
    for (std::size_t tau = 0; tau < a.length(); ++tau)
        out[tau] = packed_xcorr(pa, pb, tau);
    return out;
}

double periodic_xcorr(const ChipSequence& a, const ChipSequence& b, long long tau)
{
    return static_cast<double>(raw_xcorr(a, b, tau)) / static_cast<double>(a.length());
}

std::vector<double> xcorr_profile(const ChipSequence& a, const ChipSequence& b)
{
    const auto raw = raw_xcorr_profile(a, b);
    std::vector<double> out(raw.size());
    const auto n = static_cast<double>(a.length());
    std::transform(raw.begin(), raw.end(), out.begin(),
                   [n](long c) { return static_cast<double>(c) / n; });
    return out;
}

long worst_case_raw_xcorr(std::span<const ChipSequence> sequences)
{
    std::vector<PackedSequence> packed;
    packed.reserve(sequences.size());
    for (const auto& s : sequences) {
        if (s.length() != sequences.front().length())
            throw Error(ErrorCode::LengthMismatch, "family members differ in length");
        packed.emplace_back(s);
    }
    long worst = 0;
    for (std::size_t i = 0; i < packed.size(); ++i)
        for (std::size_t j = i + 1; j < packed.size(); ++j)
            worst = std::max(worst, packed_max_abs(packed[i], packed[j]));
    return worst;
}

} // namespace sphgold
