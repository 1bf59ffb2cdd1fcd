// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sphgold {

enum class FamilyKind { Walsh, Gold, GoldLike, MSequence };

std::string_view family_name(FamilyKind kind);

/// Antipodal spreading code. Chips are +1 / -1 (binary 0 -> +1, 1 -> -1).
class ChipSequence {
public:
    ChipSequence() = default;
    ChipSequence(std::vector<int> chips, FamilyKind kind, int index);

    std::size_t length() const noexcept { return chips_.size(); }
    std::span<const int> chips() const noexcept { return chips_; }
    int operator[](std::size_t k) const noexcept { return chips_[k]; }
    /// Chip at integer time t, taken modulo the period.
    int at(long long t) const noexcept;

    FamilyKind kind() const noexcept { return kind_; }
    int index() const noexcept { return index_; }

    friend bool operator==(const ChipSequence& a, const ChipSequence& b)
    {
        return a.chips_ == b.chips_;
    }

private:
    std::vector<int> chips_;
    FamilyKind kind_ = FamilyKind::MSequence;
    int index_ = 0;
};

/// Fibonacci LFSR description. `polynomial` holds the full feedback
/// polynomial, bit k = coefficient of x^k, so x^3 + x + 1 is 0b1011.
/// Bit i of `state` seeds s[i].
struct LfsrSpec {
    int degree = 0;
    std::uint32_t polynomial = 0;
    std::uint32_t state = 1;
};

struct CodeFamily {
    FamilyKind kind = FamilyKind::Walsh;
    std::size_t length = 0;
    std::vector<ChipSequence> sequences;
    /// Generating polynomials (Gold / GoldLike), empty for Walsh.
    std::vector<std::uint32_t> polynomials;
    /// max |sum_k a[k] b[k+tau]| over distinct pairs and shifts, as an integer.
    long worst_case_raw = 0;
    double worst_case_xcorr = 0.0;
};

ChipSequence generate_mseq(const LfsrSpec& spec);

/// One known primitive polynomial per degree 3..16.
std::uint32_t default_primitive_polynomial(int degree);

/// All primitive polynomials of the given degree (3..16 for generation,
/// enumerated by LFSR period check), ascending.
std::vector<std::uint32_t> primitive_polynomials(int degree);

/// Sylvester-ordered Walsh-Hadamard family of size 2^log2_n.
CodeFamily walsh_family(int log2_n);

/// t(n) = 2^floor((n+2)/2) + 1.
long gold_t(int n);

/// Gold family from the lowest lexicographic preferred pair of degree n.
CodeFamily gold_family(int n);

/// Best XOR-combination family of degree n when preferred pairs are not
/// required to exist (covers the n = 4, N = 15 case).
CodeFamily gold_like_family(int n, int count);

/// Unnormalized periodic cross-correlation sum_k a[k] b[(k + tau) mod N].
long raw_xcorr(const ChipSequence& a, const ChipSequence& b, long long tau);
std::vector<long> raw_xcorr_profile(const ChipSequence& a, const ChipSequence& b);

/// (1/N) sum_k a[k] b[(k + tau) mod N].
double periodic_xcorr(const ChipSequence& a, const ChipSequence& b, long long tau);
std::vector<double> xcorr_profile(const ChipSequence& a, const ChipSequence& b);

/// max over distinct pairs and all shifts of |raw_xcorr|.
long worst_case_raw_xcorr(std::span<const ChipSequence> sequences);

} // namespace sphgold
