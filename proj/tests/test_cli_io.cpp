#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sphgold/error.hpp"
#include "sphgold/experiment.hpp"
#include "sphgold/io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace sphgold;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
Error error_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::InvalidArgument, "");
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::path(SPHGOLD_TEST_TMP) / "cli_io" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig small_config(const fs::path& dir)
{
    ExperimentConfig c;
    c.out_dir = dir;
    c.theta_step = 1.0;
    return c;
}

json without_timing(const std::string& text)
{
    auto j = json::parse(text);
    j.erase("timing");
    j["config"].erase("output");
    return j;
}

} // namespace

TEST_CASE("capture CSV round trip")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    ReceivedMatrix rx;
    rx.theta_grid = {-10.0, -0.5, 0.0, 12.25};
    rx.chips = 7;
    for (std::size_t k = 0; k < rx.rows() * rx.chips; ++k)
        rx.values.push_back({n01(rng) * 1e3, n01(rng) * 1e-7});
    std::stringstream s;
    write_capture_csv(s, rx);
    const auto header = s.str().substr(0, s.str().find('\n'));
    CHECK(header.rfind("theta_deg,chip_0", 0) == 0);
    const auto back = read_capture_csv(s);
    CHECK(back.theta_grid == rx.theta_grid);
    REQUIRE(back.chips == 7);
    for (std::size_t k = 0; k < rx.values.size(); ++k)
        CHECK(std::abs(back.values[k] - rx.values[k]) <= 1e-12 * std::abs(rx.values[k]));
}

TEST_CASE("capture CSV errors name the line")
{
    const std::string good_head = "theta_deg,chip_0,chip_1\n";
    {
        std::istringstream in(good_head + "0,1:0,1:0\n1,1:0\n");
        const auto e = error_of([&] { read_capture_csv(in); });
        CHECK(e.code() == ErrorCode::MalformedCsv);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    {
        std::istringstream in(good_head + "0,abc:0,1:0\n");
        const auto e = error_of([&] { read_capture_csv(in); });
        CHECK(e.code() == ErrorCode::MalformedCsv);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    {
        std::istringstream in(good_head + "1,1:0,1:0\n0,1:0,1:0\n");
        CHECK(error_of([&] { read_capture_csv(in); }).code() == ErrorCode::MalformedCsv);
    }
    {
        std::istringstream in(good_head);
        CHECK(error_of([&] { read_capture_csv(in); }).code() == ErrorCode::MalformedCsv);
    }
    const auto dir = scratch("capture_dims");
    write_text_file(dir / "c.csv", good_head + "0,1:0,1:0\n");
    CHECK(read_capture_csv(dir / "c.csv", 2).chips == 2);
    CHECK(error_of([&] { read_capture_csv(dir / "c.csv", 15); }).code() ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("codes JSON round trip")
{
    for (const auto& fam : {walsh_family(4), gold_family(5), gold_like_family(4, 3)}) {
        const auto back = codes_from_json(codes_to_json(fam));
        CHECK(back.kind == fam.kind);
        CHECK(back.length == fam.length);
        CHECK(back.polynomials == fam.polynomials);
        CHECK(back.worst_case_raw == fam.worst_case_raw);
        REQUIRE(back.sequences.size() == fam.sequences.size());
        for (std::size_t k = 0; k < fam.sequences.size(); ++k)
            CHECK(back.sequences[k] == fam.sequences[k]);
    }
    CHECK(error_of([] { codes_from_json("{\"kind\": 3}"); }).code() != ErrorCode::InvalidArgument);
}

TEST_CASE("codebook JSON round trip is exact")
{
    ExperimentConfig c;
    c.partition = PartitionMode::Optimized;
    c.iterations = 30;
    const auto cb = build_codebook(c);
    const auto back = codebook_from_json(codebook_to_json(cb));
    REQUIRE(back.geometry.size() == cb.geometry.size());
    for (std::size_t k = 0; k < cb.geometry.size(); ++k) {
        CHECK(back.geometry[k].x == cb.geometry[k].x);
        CHECK(back.geometry[k].y == cb.geometry[k].y);
    }
    CHECK(back.partition.subsets == cb.partition.subsets);
    CHECK(back.codebook.mu_max == cb.codebook.mu_max);
    REQUIRE(back.codebook.codewords.size() == cb.codebook.codewords.size());
    for (std::size_t k = 0; k < cb.codebook.codewords.size(); ++k) {
        CHECK(back.codebook.codewords[k].weights == cb.codebook.codewords[k].weights);
        CHECK(back.codebook.codewords[k].support == cb.codebook.codewords[k].support);
        CHECK(back.codebook.codewords[k].steer_angle_deg == cb.codebook.codewords[k].steer_angle_deg);
    }
}

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"({"geometry": {"rows": 8, "cols": 8},
                                    "code": {"family": "walsh", "n": 4},
                                    "sweep": {"delays": [0, 1, 2], "mode": "spherical-gold"},
                                    "seed": 9, "output": {"format": "json"}})");
    CHECK(c.rows == 8);
    CHECK(c.family == FamilyKind::Walsh);
    CHECK(c.delays == std::vector<int>{0, 1, 2});
    CHECK(c.mode == DecodeMode::SphericalGold);
    CHECK(c.seed == 9);
    CHECK(c.format == OutputFormat::Json);

    auto msg = [](const std::string& text) {
        const auto e = error_of([&] { parse_config(text); });
        CHECK(e.code() == ErrorCode::ConfigError);
        return std::string(e.what());
    };
    CHECK(msg(R"({"geometry": {"rowz": 4}})").find("geometry.rowz") != std::string::npos);
    CHECK(msg(R"({"colour": 1})").find("colour") != std::string::npos);
    CHECK(msg(R"({"geometry": {"rows": "x"}})").find("geometry.rows") != std::string::npos);
    CHECK(msg(R"({"sweep": {"mode": "fast"}})").find("sweep.mode") != std::string::npos);
    CHECK(msg("{not json").find("JSON") != std::string::npos);

    CHECK(error_of([] { parse_config(R"({"beams": {"angles": [-40, -10, 20]}})"); }).code() ==
          ErrorCode::NonDivisible);
    CHECK(error_of([] {
              parse_config(R"({"geometry": {"rows": 2, "cols": 2},
                               "codebook": {"partition": "sparse", "elements": 3}})");
          }).code() == ErrorCode::Infeasible);
}

TEST_CASE("config hash")
{
    ExperimentConfig a;
    ExperimentConfig b;
    b.out_dir = "elsewhere";
    b.format = OutputFormat::Json;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(parse_config(config_to_json(a))) == config_hash(a));
}

TEST_CASE("sweep is deterministic apart from timing")
{
    const auto d1 = scratch("sweep1");
    const auto d2 = scratch("sweep2");
    auto c = small_config(d1);
    c.snr_db = 15.0;
    const auto r1 = cmd_sweep(c);
    c.out_dir = d2;
    const auto r2 = cmd_sweep(c);
    CHECK(without_timing(r1) == without_timing(r2));
    for (const char* f : {"capture.csv", "codes.json", "codebook.json", "decoded.csv", "sll.csv"})
        CHECK(read_text_file(d1 / f) == read_text_file(d2 / f));
    const auto j = json::parse(r1);
    CHECK(j.contains("tool_version"));
    CHECK(j["config_hash"] == config_hash(c));
    CHECK(j["sll"].size() == 2);
    CHECK(j["sll"][0]["delays"].size() == 15);
    CHECK(cmd_report(d1).find("range") != std::string::npos);
}

TEST_CASE("codebook command with zero iterations keeps the initial partition")
{
    const auto dir = scratch("codebook0");
    auto c = small_config(dir);
    c.partition = PartitionMode::Optimized;
    c.iterations = 0;
    cmd_codebook(c);
    const auto opt = codebook_from_json(read_text_file(dir / "codebook.json"));
    c.partition = PartitionMode::Sparse;
    const auto sparse = build_codebook(c);
    CHECK(opt.partition.subsets == sparse.partition.subsets);
}

TEST_CASE("bounds command")
{
    const auto dir = scratch("bounds");
    const std::vector<BoundKind> kinds{BoundKind::Gold, BoundKind::SphericalGold};
    const std::vector<int> ns{31, 7, 15, 15};
    const auto out = json::parse(cmd_bounds(kinds, ns, 64, dir, OutputFormat::Csv));
    CHECK(fs::exists(dir / "bounds.csv"));
    CHECK(out.dump().find("spherical-gold") != std::string::npos);
    const std::vector<int> none;
    CHECK(error_of([&] { cmd_bounds(kinds, none, 64, dir, OutputFormat::Csv); }).code() ==
          ErrorCode::ConfigError);
    CHECK(error_of([&] {
              cmd_bounds(kinds, ns, std::nullopt, dir, OutputFormat::Csv);
          }).code() == ErrorCode::MissingM);
}

TEST_CASE("sweep capture decodes back through the files")
{
    const auto dir = scratch("roundtrip");
    auto c = small_config(dir);
    c.rows = 16;
    c.cols = 16;
    c.beam_angles = {-35, -15, 15, 35};
    c.delays = {0};
    cmd_sweep(c);
    const auto out = scratch("roundtrip_dec");
    const auto j = json::parse(cmd_decode_capture(dir / "capture.csv", dir / "codes.json",
                                                  dir / "codebook.json", out, OutputFormat::Json));
    CHECK(fs::exists(out / "decoded_capture.json"));
    REQUIRE(j["aoa"].size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(j["aoa"][k]["best_delay"] == 0);
        CHECK(std::abs(j["aoa"][k]["theta_hat_deg"].get<double>() - c.beam_angles[k]) <= 1.0);
    }
    // Decoded file matches a direct in-memory decode.
    const auto rx = read_capture_csv(dir / "capture.csv");
    const auto codes = codes_from_json(read_text_file(dir / "codes.json"));
    const auto cb = codebook_from_json(read_text_file(dir / "codebook.json"));
    const auto direct = decode_capture(rx, codes.sequences, cb);
    const auto beams = make_beams(build_codebook(c), assign_codes(c).codes);
    const auto grid = make_theta_grid(c.theta_start, c.theta_stop, c.theta_step);
    const auto clean = synth_received(beams, cb.geometry, {}, grid);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto z = decode_temporal(clean, codes.sequences[k], 0);
        const auto cut = direct.pattern.cut(0, k);
        for (std::size_t r = 0; r < grid.size(); ++r)
            CHECK(std::abs(cut[r] - std::abs(z[r])) < 1e-9);
    }
}
