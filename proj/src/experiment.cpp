// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/experiment.hpp"

#include "sphgold/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#ifndef SPHGOLD_VERSION
#define SPHGOLD_VERSION "0.0.0"
#endif

namespace sphgold {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::ConfigError, field + ": " + what);
}

std::string_view family_key(FamilyKind k)
{
    switch (k) {
    case FamilyKind::Walsh: return "walsh";
    case FamilyKind::Gold: return "gold";
    case FamilyKind::GoldLike: return "gold-like";
    case FamilyKind::MSequence: return "mseq";
    }
    return "?";
}

std::string_view partition_key(PartitionMode p)
{
    switch (p) {
    case PartitionMode::Nested: return "nested";
    case PartitionMode::Sparse: return "sparse";
    case PartitionMode::Optimized: return "optimized";
    }
    return "?";
}

std::size_t code_length(FamilyKind family, int degree)
{
    if (degree < 1 || degree > 16)
        return 0;
    return family == FamilyKind::Walsh ? std::size_t{1} << degree
                                       : (std::size_t{1} << degree) - 1;
}

std::size_t family_size(FamilyKind family, int degree)
{
    switch (family) {
    case FamilyKind::Walsh: return std::size_t{1} << degree;
    case FamilyKind::Gold:
    case FamilyKind::GoldLike: return (std::size_t{1} << degree) + 1;
    case FamilyKind::MSequence: return 1;
    }
    return 0;
}

// Visits the keys of `section`, rejecting any not listed in `allowed`.
void check_keys(const json& section, const std::string& prefix,
                std::initializer_list<std::string_view> allowed)
{
    if (!section.is_object())
        config_error(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, _] : section.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            config_error(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

template <typename T>
void read(const json& section, const std::string& prefix, const char* key, T& out)
{
    if (!section.contains(key))
        return;
    try {
        out = section.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(prefix + "." + key, "wrong type");
    }
}

std::vector<int> default_delays(std::size_t n)
{
    std::vector<int> d(n);
    for (std::size_t k = 0; k < n; ++k)
        d[k] = static_cast<int>(k);
    return d;
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BoundKind bound_kind_for(FamilyKind f)
{
    return f == FamilyKind::Walsh ? BoundKind::Walsh : BoundKind::Gold;
}

json variation_json(const VariationStats& v)
{
    return {{"min_db", v.min_db},
            {"max_db", v.max_db},
            {"range_db", v.range_db},
            {"half_range_db", v.half_range_db}};
}

} // namespace

std::string_view tool_version() { return SPHGOLD_VERSION; }

ExperimentConfig parse_config(const std::string& text, ExperimentConfig c)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "", {"geometry", "beams", "codebook", "code", "sweep", "theta", "seed", "output"});

    if (root.contains("geometry")) {
        const auto& g = root["geometry"];
        check_keys(g, "geometry", {"rows", "cols", "spacing"});
        read(g, "geometry", "rows", c.rows);
        read(g, "geometry", "cols", c.cols);
        read(g, "geometry", "spacing", c.spacing);
    }
    if (root.contains("beams")) {
        const auto& b = root["beams"];
        check_keys(b, "beams", {"angles"});
        read(b, "beams", "angles", c.beam_angles);
    }
    if (root.contains("codebook")) {
        const auto& cb = root["codebook"];
        check_keys(cb, "codebook", {"partition", "elements", "iterations", "taper"});
        if (cb.contains("partition")) {
            std::string p;
            read(cb, "codebook", "partition", p);
            if (p == "nested")
                c.partition = PartitionMode::Nested;
            else if (p == "sparse")
                c.partition = PartitionMode::Sparse;
            else if (p == "optimized")
                c.partition = PartitionMode::Optimized;
            else
                config_error("codebook.partition", "expected nested, sparse or optimized");
        }
        read(cb, "codebook", "elements", c.elements);
        read(cb, "codebook", "iterations", c.iterations);
        if (cb.contains("taper")) {
            const auto& t = cb["taper"];
            check_keys(t, "codebook.taper", {"kind", "nbar", "sll_db"});
            std::string kind = "uniform";
            read(t, "codebook.taper", "kind", kind);
            if (kind == "uniform") {
                c.taper = Taper::uniform();
            } else if (kind == "taylor") {
                Taper tp = Taper::taylor(4, -30.0);
                read(t, "codebook.taper", "nbar", tp.nbar);
                read(t, "codebook.taper", "sll_db", tp.sll_db);
                c.taper = tp;
            } else {
                config_error("codebook.taper.kind", "expected uniform or taylor");
            }
        }
    }
    if (root.contains("code")) {
        const auto& cd = root["code"];
        check_keys(cd, "code", {"family", "n", "indices"});
        if (cd.contains("family")) {
            std::string f;
            read(cd, "code", "family", f);
            if (f == "walsh")
                c.family = FamilyKind::Walsh;
            else if (f == "gold")
                c.family = FamilyKind::Gold;
            else if (f == "gold-like")
                c.family = FamilyKind::GoldLike;
            else
                config_error("code.family", "expected walsh, gold or gold-like");
        }
        read(cd, "code", "n", c.degree);
        read(cd, "code", "indices", c.code_indices);
    }
    if (root.contains("sweep")) {
        const auto& s = root["sweep"];
        check_keys(s, "sweep",
                   {"delays", "mode", "window_deg", "capture_delays", "multipath", "snr_db"});
        read(s, "sweep", "delays", c.delays);
        if (s.contains("mode")) {
            std::string m;
            read(s, "sweep", "mode", m);
            if (m == "temporal")
                c.mode = DecodeMode::TemporalOnly;
            else if (m == "spherical-gold")
                c.mode = DecodeMode::SphericalGold;
            else
                config_error("sweep.mode", "expected temporal or spherical-gold");
        }
        read(s, "sweep", "window_deg", c.window_deg);
        read(s, "sweep", "capture_delays", c.capture_delays);
        if (s.contains("snr_db")) {
            if (s["snr_db"].is_null())
                c.snr_db.reset();
            else if (s["snr_db"].is_number())
                c.snr_db = s["snr_db"].get<double>();
            else
                config_error("sweep.snr_db", "wrong type");
        }
        if (s.contains("multipath")) {
            const auto& mp = s["multipath"];
            if (!mp.is_array())
                config_error("sweep.multipath", "expected one tap list per beam");
            c.multipath.clear();
            for (std::size_t b = 0; b < mp.size(); ++b) {
                const std::string field = "sweep.multipath[" + std::to_string(b) + "]";
                if (!mp[b].is_array())
                    config_error(field, "expected a list of taps");
                std::vector<MultipathTap> taps;
                for (const auto& tap : mp[b]) {
                    check_keys(tap, field, {"delay", "re", "im"});
                    MultipathTap t;
                    double re = 1.0;
                    double im = 0.0;
                    read(tap, field, "delay", t.delay_chips);
                    read(tap, field, "re", re);
                    read(tap, field, "im", im);
                    t.gain = {re, im};
                    taps.push_back(t);
                }
                c.multipath.push_back(std::move(taps));
            }
        }
    }
    if (root.contains("theta")) {
        const auto& t = root["theta"];
        check_keys(t, "theta", {"start", "stop", "step"});
        read(t, "theta", "start", c.theta_start);
        read(t, "theta", "stop", c.theta_stop);
        read(t, "theta", "step", c.theta_step);
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned())
            config_error("seed", "expected a non-negative integer");
        c.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("output")) {
        const auto& o = root["output"];
        check_keys(o, "output", {"dir", "format"});
        if (o.contains("dir")) {
            std::string d;
            read(o, "output", "dir", d);
            c.out_dir = d;
        }
        if (o.contains("format")) {
            std::string f;
            read(o, "output", "format", f);
            if (f == "csv")
                c.format = OutputFormat::Csv;
            else if (f == "json")
                c.format = OutputFormat::Json;
            else
                config_error("output.format", "expected csv or json");
        }
    }
    validate_config(c);
    return c;
}

void validate_config(const ExperimentConfig& c)
{
    if (c.rows < 1 || c.cols < 1 || c.rows * c.cols < 2 || c.rows * c.cols > 4096)
        config_error("geometry", "rows x cols must be in [2, 4096]");
    if (!(c.spacing > 0.0) || !std::isfinite(c.spacing))
        config_error("geometry.spacing", "must be positive");

    const std::size_t total = static_cast<std::size_t>(c.rows) * static_cast<std::size_t>(c.cols);
    const std::size_t j = c.beam_angles.size();
    if (j == 0)
        config_error("beams.angles", "at least one beam is required");
    for (double a : c.beam_angles)
        if (!(a >= -90.0 && a <= 90.0))
            config_error("beams.angles", "angles must lie in [-90, 90]");
    if (std::set<double>(c.beam_angles.begin(), c.beam_angles.end()).size() != j)
        config_error("beams.angles", "angles must be distinct");

    if (c.partition == PartitionMode::Nested) {
        if (total % j != 0)
            throw Error(ErrorCode::NonDivisible, "codebook.partition: " + std::to_string(j) +
                                                     " beams do not divide " +
                                                     std::to_string(total) + " elements");
        if (c.elements != 0 && static_cast<std::size_t>(c.elements) != total / j)
            config_error("codebook.elements", "nested subarrays use rows*cols/J elements");
    } else {
        const std::size_t m = c.elements == 0 ? total / j : static_cast<std::size_t>(std::max(c.elements, 0));
        if (c.elements < 0 || m == 0)
            config_error("codebook.elements", "must be positive");
        if (m * j > total)
            throw Error(ErrorCode::Infeasible, "codebook.elements: " + std::to_string(j) + " x " +
                                                   std::to_string(m) + " exceeds " +
                                                   std::to_string(total) + " elements");
    }
    if (c.iterations < 0)
        config_error("codebook.iterations", "must be >= 0");
    if (c.taper.kind == Taper::Kind::Taylor && (c.taper.nbar < 2 || !(c.taper.sll_db < 0.0)))
        config_error("codebook.taper", "taylor needs nbar >= 2 and sll_db < 0");

    const bool walsh = c.family == FamilyKind::Walsh;
    if (walsh ? (c.degree < 1 || c.degree > 8) : (c.degree < 3 || c.degree > 12))
        config_error("code.n", walsh ? "walsh log2 N must be in [1, 8]"
                                     : "LFSR degree must be in [3, 12]");
    const std::size_t n = code_length(c.family, c.degree);
    const std::size_t fsize = family_size(c.family, c.degree);
    if (j > fsize)
        config_error("code.n", "family has only " + std::to_string(fsize) + " members for " +
                                   std::to_string(j) + " beams");
    if (!c.code_indices.empty()) {
        if (c.code_indices.size() != j)
            config_error("code.indices", "one index per beam is required");
        for (int i : c.code_indices)
            if (i < 0 || static_cast<std::size_t>(i) >= fsize)
                config_error("code.indices", "index " + std::to_string(i) + " out of range");
        if (std::set<int>(c.code_indices.begin(), c.code_indices.end()).size() != j)
            config_error("code.indices", "indices must be distinct");
    }

    auto check_delays = [&](const std::vector<int>& d, const char* field) {
        for (int v : d)
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                config_error(field, "delay " + std::to_string(v) + " outside [0, " +
                                        std::to_string(n - 1) + "]");
    };
    check_delays(c.delays, "sweep.delays");
    check_delays(c.capture_delays, "sweep.capture_delays");
    if (!c.capture_delays.empty() && c.capture_delays.size() != j)
        config_error("sweep.capture_delays", "one delay per beam is required");
    if (c.multipath.size() > j)
        config_error("sweep.multipath", "more tap lists than beams");
    for (const auto& taps : c.multipath) {
        if (taps.size() > 4)
            config_error("sweep.multipath", "at most 4 taps per beam");
        for (const auto& t : taps) {
            if (t.delay_chips < 0 || static_cast<std::size_t>(t.delay_chips) >= n)
                config_error("sweep.multipath", "tap delay outside [0, N-1]");
            if (std::abs(t.gain) > 1.0 + 1e-12)
                config_error("sweep.multipath", "tap gain magnitude exceeds 1");
        }
    }
    if (c.snr_db && !std::isfinite(*c.snr_db))
        config_error("sweep.snr_db", "must be finite");
    if (!std::isfinite(c.window_deg))
        config_error("sweep.window_deg", "must be finite");

    if (!(c.theta_step > 0.0))
        config_error("theta.step", "must be positive");
    if (!(c.theta_start >= -90.0 && c.theta_stop <= 90.0 && c.theta_start <= c.theta_stop))
        config_error("theta", "need -90 <= start <= stop <= 90");
    for (double a : c.beam_angles)
        if (a < c.theta_start || a > c.theta_stop)
            config_error("beams.angles", "angle " + std::to_string(a) + " outside the theta grid");
}

std::string config_to_json(const ExperimentConfig& c)
{
    json j;
    j["geometry"] = {{"rows", c.rows}, {"cols", c.cols}, {"spacing", c.spacing}};
    j["beams"] = {{"angles", c.beam_angles}};
    json taper = {{"kind", c.taper.kind == Taper::Kind::Uniform ? "uniform" : "taylor"}};
    if (c.taper.kind == Taper::Kind::Taylor) {
        taper["nbar"] = c.taper.nbar;
        taper["sll_db"] = c.taper.sll_db;
    }
    j["codebook"] = {{"partition", partition_key(c.partition)},
                     {"elements", c.elements},
                     {"iterations", c.iterations},
                     {"taper", taper}};
    j["code"] = {{"family", family_key(c.family)}, {"n", c.degree}, {"indices", c.code_indices}};
    json mp = json::array();
    for (const auto& taps : c.multipath) {
        json list = json::array();
        for (const auto& t : taps)
            list.push_back({{"delay", t.delay_chips}, {"re", t.gain.real()}, {"im", t.gain.imag()}});
        mp.push_back(std::move(list));
    }
    j["sweep"] = {{"delays", c.delays},
                  {"mode", c.mode == DecodeMode::TemporalOnly ? "temporal" : "spherical-gold"},
                  {"window_deg", c.window_deg},
                  {"capture_delays", c.capture_delays},
                  {"multipath", mp},
                  {"snr_db", c.snr_db ? json(*c.snr_db) : json(nullptr)}};
    j["theta"] = {{"start", c.theta_start}, {"stop", c.theta_stop}, {"step", c.theta_step}};
    j["seed"] = c.seed;
    j["output"] = {{"dir", c.out_dir.generic_string()},
                   {"format", c.format == OutputFormat::Csv ? "csv" : "json"}};
    return j.dump(2);
}

std::string config_hash(const ExperimentConfig& config)
{
    // Output location does not change the experiment.
    json j = json::parse(config_to_json(config));
    j.erase("output");
    return fnv1a_hex(j.dump());
}

CodeFamily build_family(const CodesRequest& r)
{
    switch (r.family) {
    case FamilyKind::Walsh:
        return walsh_family(r.degree);
    case FamilyKind::Gold:
        return gold_family(r.degree);
    case FamilyKind::GoldLike: {
        const int full = r.degree >= 4 && r.degree <= 12 ? (1 << r.degree) + 1 : 1;
        return gold_like_family(r.degree, r.count > 0 ? r.count : full);
    }
    case FamilyKind::MSequence: {
        CodeFamily f;
        f.kind = FamilyKind::MSequence;
        f.sequences.push_back(
            generate_mseq({r.degree, default_primitive_polynomial(r.degree), 1}));
        f.length = f.sequences.front().length();
        f.polynomials = {default_primitive_polynomial(r.degree)};
        return f;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown family");
}

CodeAssignment assign_codes(const ExperimentConfig& c)
{
    const auto j = static_cast<int>(c.beam_angles.size());
    CodeAssignment a;
    CodesRequest req{c.family, c.degree, 0};
    // Gold-like without explicit indices picks a low-correlation subset of size J.
    if (c.family == FamilyKind::GoldLike && c.code_indices.empty())
        req.count = j;
    a.family = build_family(req);
    const auto size = static_cast<int>(a.family.sequences.size());
    if (!c.code_indices.empty()) {
        a.indices = c.code_indices;
    } else {
        for (int k = size - j; k < size; ++k)
            a.indices.push_back(k);
    }
    for (int idx : a.indices)
        a.codes.push_back(a.family.sequences.at(static_cast<std::size_t>(idx)));
    return a;
}

CodebookFile build_codebook(const ExperimentConfig& c, PartitionSearch* search)
{
    CodebookFile file;
    file.geometry = grid_geometry(c.rows, c.cols, c.spacing);
    const auto j = static_cast<int>(c.beam_angles.size());
    const int m = c.elements > 0 ? c.elements : static_cast<int>(file.geometry.size()) / j;
    switch (c.partition) {
    case PartitionMode::Nested:
        file.partition = nested_partition(file.geometry, j);
        file.codebook = make_codebook(file.partition, file.geometry, c.beam_angles, c.taper);
        break;
    case PartitionMode::Sparse:
        file.partition = sparse_partition(file.geometry, j, m, c.seed);
        file.codebook = make_codebook(file.partition, file.geometry, c.beam_angles, c.taper);
        break;
    case PartitionMode::Optimized: {
        PartitionSearch s =
            optimize_partition(file.geometry, c.beam_angles, m, c.iterations, c.seed, c.taper);
        file.partition = s.partition;
        file.codebook = s.codebook;
        if (search)
            *search = std::move(s);
        break;
    }
    }
    return file;
}

std::vector<BeamAssignment> make_beams(const CodebookFile& codebook,
                                       std::span<const ChipSequence> codes)
{
    if (codes.size() != codebook.codebook.codewords.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(codes.size()) + " codes for " +
                        std::to_string(codebook.codebook.codewords.size()) + " codewords");
    std::vector<BeamAssignment> beams;
    for (std::size_t k = 0; k < codes.size(); ++k)
        beams.push_back({codebook.codebook.codewords[k], codes[k],
                         codebook.codebook.codewords[k].steer_angle_deg});
    return beams;
}

std::string cmd_codes(const CodesRequest& request, const std::filesystem::path& out_dir,
                      OutputFormat format)
{
    const CodeFamily family = build_family(request);
    write_text_file(out_dir / "codes.json", codes_to_json(family));
    json files = json::array({(out_dir / "codes.json").generic_string()});
    if (format == OutputFormat::Csv) {
        std::ostringstream codes;
        write_codes_csv(codes, family);
        write_text_file(out_dir / "codes.csv", codes.str());
        std::ostringstream prof;
        write_profiles_csv(prof, family);
        write_text_file(out_dir / "profiles.csv", prof.str());
        files.push_back((out_dir / "codes.csv").generic_string());
        files.push_back((out_dir / "profiles.csv").generic_string());
    }
    json s{{"kind", family_name(family.kind)},
           {"N", family.length},
           {"count", family.sequences.size()},
           {"polynomials", family.polynomials},
           {"worst_case_raw", family.worst_case_raw},
           {"worst_case_xcorr", family.worst_case_xcorr},
           {"worst_case_db", to_db(family.worst_case_xcorr)},
           {"files", files}};
    return s.dump(2);
}

std::string cmd_codebook(const ExperimentConfig& config)
{
    validate_config(config);
    PartitionSearch search;
    const CodebookFile file = build_codebook(config, &search);
    write_text_file(config.out_dir / "codebook.json", codebook_to_json(file));
    json s{{"subarrays", file.partition.count()},
           {"elements", file.partition.subset_size()},
           {"angles", file.codebook.angles},
           {"mu_max", file.codebook.mu_max},
           {"file", (config.out_dir / "codebook.json").generic_string()}};
    if (config.partition == PartitionMode::Optimized) {
        s["initial_mu"] = search.initial_mu;
        s["accepted_swaps"] = search.accepted_swaps;
        s["iterations"] = config.iterations;
    }
    return s.dump(2);
}

std::string cmd_sweep(const ExperimentConfig& config)
{
    const auto started = std::chrono::steady_clock::now();
    validate_config(config);
    const CodeAssignment codes = assign_codes(config);
    PartitionSearch search;
    const CodebookFile cb = build_codebook(config, &search);
    const auto beams = make_beams(cb, codes.codes);
    const auto grid = make_theta_grid(config.theta_start, config.theta_stop, config.theta_step);
    const std::size_t n = codes.family.length;
    const auto delays = config.delays.empty() ? default_delays(n) : config.delays;

    SweepOptions opts;
    opts.multipath_taps = config.multipath;
    if (config.snr_db)
        opts.noise = NoiseSpec{*config.snr_db, config.seed};
    const DecodedPattern sweep = delay_sweep(beams, cb.geometry, grid, delays, config.mode, opts);

    std::vector<SllCurve> curves;
    for (std::size_t i = 0; i < beams.size(); ++i)
        for (std::size_t k = 0; k < beams.size(); ++k)
            if (i != k)
                curves.push_back(sll_vs_delay(sweep, static_cast<int>(i), static_cast<int>(k),
                                              config.window_deg));

    DelayScenario capture_scenario;
    capture_scenario.per_beam_delay_chips = config.capture_delays;
    capture_scenario.multipath_taps = config.multipath;
    std::optional<NoiseSpec> capture_noise;
    if (config.snr_db)
        capture_noise = NoiseSpec{*config.snr_db, config.seed};
    const ReceivedMatrix capture =
        synth_received(beams, cb.geometry, capture_scenario, grid, capture_noise);

    const auto& dir = config.out_dir;
    std::ostringstream cap;
    write_capture_csv(cap, capture);
    write_text_file(dir / "capture.csv", cap.str());

    CodeFamily assigned = codes.family;
    assigned.sequences = codes.codes;
    assigned.worst_case_raw = codes.codes.size() > 1 ? worst_case_raw_xcorr(codes.codes) : 0;
    assigned.worst_case_xcorr =
        static_cast<double>(assigned.worst_case_raw) / static_cast<double>(n);
    write_text_file(dir / "codes.json", codes_to_json(assigned));
    write_text_file(dir / "codebook.json", codebook_to_json(cb));

    if (config.format == OutputFormat::Csv) {
        std::ostringstream dec;
        write_decoded_csv(dec, sweep);
        write_text_file(dir / "decoded.csv", dec.str());
        std::ostringstream sll;
        write_sll_csv(sll, curves);
        write_text_file(dir / "sll.csv", sll.str());
    } else {
        write_text_file(dir / "decoded.json", decoded_to_json(sweep));
        write_text_file(dir / "sll.json", sll_to_json(curves));
    }

    const auto m = static_cast<int>(cb.partition.subset_size());
    json report;
    report["tool_version"] = tool_version();
    report["config_hash"] = config_hash(config);
    report["config"] = json::parse(config_to_json(config));
    report["codes"] = {{"kind", family_name(codes.family.kind)},
                       {"N", n},
                       {"indices", codes.indices},
                       {"family_worst_case_xcorr", codes.family.worst_case_xcorr},
                       {"assigned_worst_case_xcorr", assigned.worst_case_xcorr}};
    json codebook{{"partition", partition_key(config.partition)},
                  {"subarrays", cb.partition.count()},
                  {"elements", m},
                  {"mu_max", cb.codebook.mu_max},
                  {"mainlobe_halfwidth_deg", sweep.mainlobe_halfwidth_deg}};
    if (config.partition == PartitionMode::Optimized) {
        codebook["initial_mu"] = search.initial_mu;
        codebook["accepted_swaps"] = search.accepted_swaps;
    }
    report["codebook"] = std::move(codebook);
    json sll = json::array();
    for (const auto& c : curves)
        sll.push_back({{"beam", c.beam},
                       {"other", c.other},
                       {"delays", c.delays},
                       {"sll_db", c.sll_db},
                       {"variation", variation_json(variation(c))}});
    report["sll"] = std::move(sll);
    std::vector<double> all;
    for (const auto& c : curves)
        all.insert(all.end(), c.sll_db.begin(), c.sll_db.end());
    if (!all.empty())
        report["variation"] = variation_json(variation(all));
    const int nn = static_cast<int>(n);
    report["bounds"] = {
        {"code_db", theoretical_bound(bound_kind_for(config.family), nn)},
        {"spherical_gold_db", theoretical_bound(BoundKind::SphericalGold, nn, m)}};
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    report["timing"] = {{"wall_clock_s", elapsed.count()}};
    const std::string text = report.dump(2);
    write_text_file(dir / "report.json", text);
    return text;
}

CaptureDecode decode_capture(const ReceivedMatrix& rx, std::span<const ChipSequence> codes,
                             const CodebookFile& codebook)
{
    if (codes.empty())
        throw Error(ErrorCode::EmptyBeams, "no codes to decode with");
    for (const auto& c : codes)
        if (c.length() != rx.chips)
            throw Error(ErrorCode::DimensionMismatch,
                        "capture has " + std::to_string(rx.chips) + " chips, codes have " +
                            std::to_string(c.length()));
    CaptureDecode out;
    auto& p = out.pattern;
    p.mode = DecodeMode::TemporalOnly;
    p.theta_grid = rx.theta_grid;
    p.delays = default_delays(rx.chips);
    for (std::size_t k = 0; k < codes.size(); ++k) {
        const bool known = k < codebook.codebook.codewords.size();
        p.beam_angles.push_back(known ? codebook.codebook.codewords[k].steer_angle_deg : 0.0);
        p.mainlobe_halfwidth_deg.push_back(
            known ? mainlobe_halfwidth(codebook.codebook.codewords[k], codebook.geometry) : 0.0);
    }
    const std::size_t g = rx.rows();
    p.magnitudes.assign(p.delays.size() * codes.size() * g, 0.0);
    for (std::size_t d = 0; d < p.delays.size(); ++d)
        for (std::size_t k = 0; k < codes.size(); ++k) {
            const CVec z = decode_temporal(rx, codes[k], p.delays[d]);
            double* dst = p.magnitudes.data() + (d * codes.size() + k) * g;
            for (std::size_t r = 0; r < g; ++r)
                dst[r] = std::abs(z[r]);
        }

    for (std::size_t k = 0; k < codes.size(); ++k) {
        std::size_t best = 0;
        double peak = -1.0;
        for (std::size_t d = 0; d < p.delays.size(); ++d) {
            const auto cut = p.cut(d, k);
            const double v = *std::max_element(cut.begin(), cut.end());
            if (v > peak + 1e-12) {
                peak = v;
                best = d;
            }
        }
        out.aoa.push_back({static_cast<int>(k), p.delays[best],
                           aoa_estimate(p.cut(best, k), p.theta_grid, codebook.codebook,
                                        codebook.geometry)});
    }
    return out;
}

std::string cmd_decode_capture(const std::filesystem::path& capture_csv,
                               const std::filesystem::path& codes_json,
                               const std::filesystem::path& codebook_json,
                               const std::filesystem::path& out_dir, OutputFormat format)
{
    const CodeFamily codes = codes_from_json(read_text_file(codes_json));
    const CodebookFile cb = codebook_from_json(read_text_file(codebook_json));
    const ReceivedMatrix rx = read_capture_csv(capture_csv, codes.length);
    const CaptureDecode dec = decode_capture(rx, codes.sequences, cb);

    if (format == OutputFormat::Csv) {
        std::ostringstream s;
        write_decoded_csv(s, dec.pattern);
        write_text_file(out_dir / "decoded_capture.csv", s.str());
    } else {
        write_text_file(out_dir / "decoded_capture.json", decoded_to_json(dec.pattern));
    }
    json aoa = json::array();
    for (const auto& a : dec.aoa)
        aoa.push_back({{"code", a.code},
                       {"best_delay", a.best_delay},
                       {"beam_index", a.estimate.beam_index},
                       {"theta_hat_deg", a.estimate.theta_hat_deg},
                       {"score", a.estimate.score}});
    json s{{"rows", rx.rows()}, {"chips", rx.chips}, {"aoa", aoa}};
    write_text_file(out_dir / "aoa.json", s.dump(2));
    return s.dump(2);
}

std::string cmd_bounds(std::span<const BoundKind> kinds, std::span<const int> n_list,
                       std::optional<int> m, const std::filesystem::path& out_dir,
                       OutputFormat format)
{
    if (kinds.empty())
        throw Error(ErrorCode::ConfigError, "kinds: at least one bound kind is required");
    if (n_list.empty())
        throw Error(ErrorCode::ConfigError, "n: the N list is empty");
    std::vector<int> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<BoundCurve> curves;
    for (auto k : kinds)
        curves.push_back(bound_curve(k, ns, k == BoundKind::SphericalGold ? m : std::nullopt));
    const std::string json_text = bounds_to_json(curves);
    if (format == OutputFormat::Csv) {
        std::ostringstream s;
        write_bounds_csv(s, curves);
        write_text_file(out_dir / "bounds.csv", s.str());
    } else {
        write_text_file(out_dir / "bounds.json", json_text);
    }
    return json_text;
}

std::string cmd_report(const std::filesystem::path& run_dir)
{
    json r;
    try {
        r = json::parse(read_text_file(run_dir / "report.json"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCsv, std::string("report.json: ") + e.what());
    }
    std::ostringstream out;
    char line[160];
    try {
        out << "sphgold " << r.at("tool_version").get<std::string>() << "  config "
            << r.at("config_hash").get<std::string>() << '\n';
        const auto& codes = r.at("codes");
        std::snprintf(line, sizeof line, "codes     %s N=%d worst |rho| %.4f\n",
                      codes.at("kind").get<std::string>().c_str(), codes.at("N").get<int>(),
                      codes.at("assigned_worst_case_xcorr").get<double>());
        out << line;
        std::snprintf(line, sizeof line, "codebook  %s J=%d m=%d mu_max %.4f\n",
                      r["codebook"].at("partition").get<std::string>().c_str(),
                      r["codebook"].at("subarrays").get<int>(),
                      r["codebook"].at("elements").get<int>(),
                      r["codebook"].at("mu_max").get<double>());
        out << line;
        for (const auto& c : r.at("sll")) {
            const auto& v = c.at("variation");
            std::snprintf(line, sizeof line,
                          "sll %d<-%d  min %7.2f  max %7.2f  range %6.2f dB (+/- %.2f)\n",
                          c.at("beam").get<int>(), c.at("other").get<int>(),
                          v.at("min_db").get<double>(), v.at("max_db").get<double>(),
                          v.at("range_db").get<double>(), v.at("half_range_db").get<double>());
            out << line;
        }
        std::snprintf(line, sizeof line, "bounds    code %.2f dB, spherical-gold %.2f dB\n",
                      r["bounds"].at("code_db").get<double>(),
                      r["bounds"].at("spherical_gold_db").get<double>());
        out << line;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCsv, std::string("report.json: ") + e.what());
    }
    return out.str();
}

} // namespace sphgold
