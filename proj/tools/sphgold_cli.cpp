// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors
//
// Command-line front end. Data goes to stdout, diagnostics to stderr.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 infeasible.

#include "sphgold/error.hpp"
#include "sphgold/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace sphgold;

namespace {

const std::map<std::string, FamilyKind> kFamilies{{"walsh", FamilyKind::Walsh},
                                                  {"gold", FamilyKind::Gold},
                                                  {"gold-like", FamilyKind::GoldLike},
                                                  {"mseq", FamilyKind::MSequence}};
const std::map<std::string, PartitionMode> kPartitions{{"nested", PartitionMode::Nested},
                                                       {"sparse", PartitionMode::Sparse},
                                                       {"optimized", PartitionMode::Optimized}};
const std::map<std::string, DecodeMode> kModes{{"temporal", DecodeMode::TemporalOnly},
                                               {"spherical-gold", DecodeMode::SphericalGold}};
const std::map<std::string, OutputFormat> kFormats{{"csv", OutputFormat::Csv},
                                                   {"json", OutputFormat::Json}};
const std::map<std::string, BoundKind> kBounds{{"walsh", BoundKind::Walsh},
                                               {"gold", BoundKind::Gold},
                                               {"spherical-gold", BoundKind::SphericalGold}};

struct Common {
    std::string config_file;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::Csv;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config_file, "JSON config file; its values override flags")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Master seed for partitions, optimizer and noise")
        ->capture_default_str();
    app->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
    app->add_option("--format", c.format, "Output format for tables")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
        ->default_str("csv");
}

void add_experiment(CLI::App* app, ExperimentConfig& c)
{
    app->add_option("--rows", c.rows, "Array rows (along y)")->capture_default_str();
    app->add_option("--cols", c.cols, "Array columns (along x)")->capture_default_str();
    app->add_option("--spacing", c.spacing, "Element spacing in wavelengths")->capture_default_str();
    app->add_option("--angles", c.beam_angles, "Beam angles in degrees")->delimiter(',')
        ->default_str("-35,35");
    app->add_option("--partition", c.partition, "Subarray partition")
        ->transform(CLI::CheckedTransformer(kPartitions, CLI::ignore_case))
        ->default_str("nested");
    app->add_option("--elements", c.elements, "Elements per subarray (0 = rows*cols/J)")
        ->capture_default_str();
    app->add_option("--iterations", c.iterations, "Partition optimizer iterations")
        ->capture_default_str();
    app->add_option("--family", c.family, "Code family")
        ->transform(CLI::CheckedTransformer(kFamilies, CLI::ignore_case))
        ->default_str("gold-like");
    app->add_option("--n", c.degree, "LFSR degree, or log2 N for walsh")->capture_default_str();
    app->add_option("--code-indices", c.code_indices, "Family member per beam")->delimiter(',');
    app->add_option("--delays", c.delays, "Interferer delays in chips (default 0..N-1)")
        ->delimiter(',');
    app->add_option("--mode", c.mode, "Decode mode")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
        ->default_str("temporal");
    app->add_option("--window", c.window_deg, "SLL window half-width in degrees (0 = first null)")
        ->capture_default_str();
    app->add_option("--capture-delays", c.capture_delays, "Per-beam delays of the exported capture")
        ->delimiter(',');
    app->add_option("--snr", c.snr_db, "Add white noise at this SNR in dB");
    app->add_option("--theta-start", c.theta_start, "Theta grid start")->capture_default_str();
    app->add_option("--theta-stop", c.theta_stop, "Theta grid stop")->capture_default_str();
    app->add_option("--theta-step", c.theta_step, "Theta grid step")->capture_default_str();
}

ExperimentConfig resolve(ExperimentConfig c, const Common& common)
{
    c.seed = common.seed;
    c.out_dir = common.out_dir;
    c.format = common.format;
    if (!common.config_file.empty())
        return parse_config(read_text_file(common.config_file), c);
    validate_config(c);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coded multibeam isolation toolkit"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    Common common;
    ExperimentConfig exp;

    auto* codes = app.add_subcommand("codes", "Generate a code family and its correlation data");
    add_common(codes, common);
    CodesRequest req;
    int log2n = 0;
    codes->add_option("--family", req.family, "Code family")
        ->transform(CLI::CheckedTransformer(kFamilies, CLI::ignore_case))
        ->default_str("gold");
    codes->add_option("--n", req.degree, "LFSR degree")->capture_default_str();
    codes->add_option("--log2n", log2n, "log2 N for walsh");
    codes->add_option("--count", req.count, "gold-like member count (0 = whole family)");

    auto* codebook = app.add_subcommand("codebook", "Build or optimize the spatial codebook");
    add_common(codebook, common);
    add_experiment(codebook, exp);

    auto* sweep = app.add_subcommand("sweep", "Run the delay sweep and write a report");
    add_common(sweep, common);
    add_experiment(sweep, exp);

    auto* decode = app.add_subcommand("decode-capture", "Decode a theta x N capture file");
    add_common(decode, common);
    std::string capture_path;
    std::string codes_path;
    std::string codebook_path;
    decode->add_option("--capture", capture_path, "Capture CSV")->required()->check(CLI::ExistingFile);
    decode->add_option("--codes", codes_path, "codes.json")->required()->check(CLI::ExistingFile);
    decode->add_option("--codebook", codebook_path, "codebook.json")
        ->required()
        ->check(CLI::ExistingFile);

    auto* bounds = app.add_subcommand("bounds", "Theoretical isolation bound curves");
    add_common(bounds, common);
    std::vector<BoundKind> kinds;
    std::vector<int> bound_n;
    std::optional<int> bound_m;
    bounds->add_option("--kinds", kinds, "walsh, gold, spherical-gold")
        ->delimiter(',')
        ->transform(CLI::CheckedTransformer(kBounds, CLI::ignore_case))
        ->required();
    bounds->add_option("--n", bound_n, "Code lengths")->delimiter(',');
    bounds->add_option("--m", bound_m, "Elements per subarray (spherical-gold)");

    auto* report = app.add_subcommand("report", "Summarize a sweep output directory");
    add_common(report, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        std::string out;
        if (codes->parsed()) {
            if (log2n > 0) {
                req.family = FamilyKind::Walsh;
                req.degree = log2n;
            }
            auto format = common.format;
            std::filesystem::path dir = common.out_dir;
            if (!common.config_file.empty()) {
                ExperimentConfig base;
                base.family = req.family;
                base.degree = req.degree;
                base.out_dir = dir;
                base.format = format;
                const auto c = parse_config(read_text_file(common.config_file), base);
                req.family = c.family;
                req.degree = c.degree;
                dir = c.out_dir;
                format = c.format;
            }
            out = cmd_codes(req, dir, format);
        } else if (codebook->parsed()) {
            out = cmd_codebook(resolve(exp, common));
        } else if (sweep->parsed()) {
            out = cmd_sweep(resolve(exp, common));
        } else if (decode->parsed()) {
            const auto c = resolve(exp, common);
            out = cmd_decode_capture(capture_path, codes_path, codebook_path, c.out_dir, c.format);
        } else if (bounds->parsed()) {
            const auto c = resolve(exp, common);
            out = cmd_bounds(kinds, bound_n, bound_m, c.out_dir, c.format);
        } else if (report->parsed()) {
            out = cmd_report(resolve(exp, common).out_dir);
        }
        std::cout << out;
        if (!out.empty() && out.back() != '\n')
            std::cout << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
