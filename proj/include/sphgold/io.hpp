// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include "sphgold/isolation_metrics.hpp"
#include "sphgold/multibeam_sim.hpp"
#include "sphgold/spatial_codebook.hpp"
#include "sphgold/temporal_codes.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sphgold {

// Capture CSV: header "theta_deg,chip_0,...,chip_{N-1}", then one row per
// theta with complex cells written as "re:im".
void write_capture_csv(std::ostream& out, const ReceivedMatrix& rx);
ReceivedMatrix read_capture_csv(std::istream& in);
/// `expected_chips` > 0 also checks the column count (DimensionMismatch).
ReceivedMatrix read_capture_csv(const std::filesystem::path& path, std::size_t expected_chips = 0);

// Code families. CSV holds one sequence per row; JSON also carries the kind,
// polynomials and worst-case correlation.
void write_codes_csv(std::ostream& out, const CodeFamily& family);
std::string codes_to_json(const CodeFamily& family);
CodeFamily codes_from_json(const std::string& text);
/// Per-pair correlation profiles as long form (a, b, tau, raw, rho). All pairs
/// for families up to 64 members, otherwise pairs among the first 16.
void write_profiles_csv(std::ostream& out, const CodeFamily& family);

struct CodebookFile {
    ArrayGeometry geometry;
    SubarrayPartition partition;
    Codebook codebook;
};

std::string codebook_to_json(const CodebookFile& file);
/// Codewords are restored from the stored weights, not rebuilt.
CodebookFile codebook_from_json(const std::string& text);

void write_decoded_csv(std::ostream& out, const DecodedPattern& pattern);
std::string decoded_to_json(const DecodedPattern& pattern);

void write_sll_csv(std::ostream& out, std::span<const SllCurve> curves);
std::string sll_to_json(std::span<const SllCurve> curves);

void write_bounds_csv(std::ostream& out, std::span<const BoundCurve> curves);
std::string bounds_to_json(std::span<const BoundCurve> curves);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace sphgold
