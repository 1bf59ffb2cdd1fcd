// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include "sphgold/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sphgold {

enum class PartitionMode { Nested, Sparse, Optimized };
enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    int rows = 16;
    int cols = 8;
    double spacing = 0.5;

    std::vector<double> beam_angles{-35.0, 35.0};

    PartitionMode partition = PartitionMode::Nested;
    /// Elements per subarray; 0 means rows * cols / J.
    int elements = 0;
    int iterations = 200;
    Taper taper;

    FamilyKind family = FamilyKind::GoldLike;
    /// LFSR degree for gold / gold-like, log2 N for walsh.
    int degree = 4;
    /// Family member per beam; empty selects the default assignment.
    std::vector<int> code_indices;

    /// Swept interferer delays; empty means 0..N-1.
    std::vector<int> delays;
    DecodeMode mode = DecodeMode::TemporalOnly;
    /// <= 0 uses the first-null half-width of each beam.
    double window_deg = 0.0;
    /// Per-beam delays of the exported capture; empty means all zero.
    std::vector<int> capture_delays;
    std::vector<std::vector<MultipathTap>> multipath;
    std::optional<double> snr_db;

    double theta_start = -75.0;
    double theta_stop = 75.0;
    double theta_step = 0.5;

    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::Csv;
};

/// Parses a JSON config and overlays it on `base`. Unknown keys and invalid
/// values throw ConfigError naming the field.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
/// Checks every field against module preconditions; throws ConfigError
/// naming the first failing field.
void validate_config(const ExperimentConfig& config);
/// Canonical JSON form; defaults are written out explicitly.
std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string_view tool_version();

/// Family selected by the config, trimmed to the members assigned to beams.
struct CodeAssignment {
    CodeFamily family;
    std::vector<ChipSequence> codes;
    std::vector<int> indices;
};

CodeAssignment assign_codes(const ExperimentConfig& config);
CodebookFile build_codebook(const ExperimentConfig& config, PartitionSearch* search = nullptr);
std::vector<BeamAssignment> make_beams(const CodebookFile& codebook,
                                       std::span<const ChipSequence> codes);

struct CodesRequest {
    FamilyKind family = FamilyKind::Gold;
    int degree = 5;
    /// gold-like member count; 0 means the full family.
    int count = 0;
};

CodeFamily build_family(const CodesRequest& request);

// Each command writes its files into config.out_dir (or out_dir) and returns
// a JSON summary that the CLI prints on stdout.
std::string cmd_codes(const CodesRequest& request, const std::filesystem::path& out_dir,
                      OutputFormat format);
std::string cmd_codebook(const ExperimentConfig& config);
std::string cmd_sweep(const ExperimentConfig& config);
std::string cmd_decode_capture(const std::filesystem::path& capture_csv,
                               const std::filesystem::path& codes_json,
                               const std::filesystem::path& codebook_json,
                               const std::filesystem::path& out_dir, OutputFormat format);
std::string cmd_bounds(std::span<const BoundKind> kinds, std::span<const int> n_list,
                       std::optional<int> m, const std::filesystem::path& out_dir,
                       OutputFormat format);
/// Human-readable summary of a sweep directory's report.json.
std::string cmd_report(const std::filesystem::path& run_dir);

/// Decode of every code against a capture at every delay hypothesis.
struct CaptureDecode {
    DecodedPattern pattern;
    struct Aoa {
        int code = 0;
        int best_delay = 0;
        AoaEstimate estimate;
    };
    std::vector<Aoa> aoa;
};

CaptureDecode decode_capture(const ReceivedMatrix& rx, std::span<const ChipSequence> codes,
                             const CodebookFile& codebook);

} // namespace sphgold
