// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/io.hpp"

#include "sphgold/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sphgold {

using nlohmann::json;

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out)
{
    const std::string s = trim(text);
    if (s.empty())
        return false;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what)
{
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": " + what);
}

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCsv, std::string(what) + " is not valid JSON: " + e.what());
    }
}

FamilyKind family_from_name(const std::string& name)
{
    for (auto k : {FamilyKind::Walsh, FamilyKind::Gold, FamilyKind::GoldLike, FamilyKind::MSequence})
        if (family_name(k) == name)
            return k;
    throw Error(ErrorCode::InvalidArgument, "unknown code family '" + name + "'");
}

json taper_json(const Taper& t)
{
    if (t.kind == Taper::Kind::Uniform)
        return {{"kind", "uniform"}};
    return {{"kind", "taylor"}, {"nbar", t.nbar}, {"sll_db", t.sll_db}};
}

Taper taper_from(const json& j)
{
    if (j.value("kind", std::string("uniform")) == "taylor")
        return Taper::taylor(j.value("nbar", 4), j.value("sll_db", -30.0));
    return Taper::uniform();
}

std::string_view partition_name(PartitionKind k)
{
    switch (k) {
    case PartitionKind::Nested: return "nested";
    case PartitionKind::Sparse: return "sparse";
    case PartitionKind::Custom: return "custom";
    }
    return "custom";
}

} // namespace

void write_capture_csv(std::ostream& out, const ReceivedMatrix& rx)
{
    out << "theta_deg";
    for (std::size_t t = 0; t < rx.chips; ++t)
        out << ",chip_" << t;
    out << '\n';
    for (std::size_t r = 0; r < rx.rows(); ++r) {
        out << fmt(rx.theta_grid[r]);
        for (std::size_t t = 0; t < rx.chips; ++t) {
            const cdouble v = rx.at(r, t);
            out << ',' << fmt(v.real()) << ':' << fmt(v.imag());
        }
        out << '\n';
    }
}

ReceivedMatrix read_capture_csv(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::size_t chips = 0;
    ReceivedMatrix rx;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const auto cells = split(line, ',');
        if (!header) {
            if (trim(cells.front()) != "theta_deg")
                malformed(lineno, "header must start with theta_deg");
            chips = cells.size() - 1;
            if (chips < 2)
                malformed(lineno, "header declares fewer than 2 chip columns");
            for (std::size_t t = 0; t < chips; ++t)
                if (trim(cells[t + 1]) != "chip_" + std::to_string(t))
                    malformed(lineno, "expected column chip_" + std::to_string(t));
            rx.chips = chips;
            header = true;
            continue;
        }
        if (cells.size() != chips + 1)
            malformed(lineno, "row has " + std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(chips + 1));
        double theta = 0.0;
        if (!parse_double(cells[0], theta))
            malformed(lineno, "non-numeric theta '" + cells[0] + "'");
        if (!rx.theta_grid.empty() && !(theta > rx.theta_grid.back()))
            malformed(lineno, "theta column must be strictly increasing");
        rx.theta_grid.push_back(theta);
        for (std::size_t t = 0; t < chips; ++t) {
            const auto& cell = cells[t + 1];
            const auto colon = cell.find(':');
            double re = 0.0;
            double im = 0.0;
            if (colon == std::string::npos || !parse_double(cell.substr(0, colon), re) ||
                !parse_double(cell.substr(colon + 1), im))
                malformed(lineno, "bad complex cell '" + trim(cell) + "' in column chip_" +
                                      std::to_string(t));
            rx.values.emplace_back(re, im);
        }
    }
    if (!header)
        malformed(lineno, "missing header");
    if (rx.theta_grid.empty())
        malformed(lineno, "no data rows");
    return rx;
}

ReceivedMatrix read_capture_csv(const std::filesystem::path& path, std::size_t expected_chips)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MalformedCsv, "cannot open " + path.string());
    ReceivedMatrix rx = read_capture_csv(in);
    if (expected_chips > 0 && rx.chips != expected_chips)
        throw Error(ErrorCode::DimensionMismatch,
                    "capture has " + std::to_string(rx.chips) + " chips, codes have " +
                        std::to_string(expected_chips));
    return rx;
}

void write_codes_csv(std::ostream& out, const CodeFamily& family)
{
    for (const auto& s : family.sequences) {
        for (std::size_t k = 0; k < s.length(); ++k)
            out << (k ? "," : "") << s[k];
        out << '\n';
    }
}

std::string codes_to_json(const CodeFamily& family)
{
    json j;
    j["kind"] = family_name(family.kind);
    j["N"] = family.length;
    j["polynomials"] = family.polynomials;
    j["worst_case_raw"] = family.worst_case_raw;
    j["worst_case_xcorr"] = family.worst_case_xcorr;
    json seqs = json::array();
    for (const auto& s : family.sequences)
        seqs.push_back(std::vector<int>(s.chips().begin(), s.chips().end()));
    j["sequences"] = std::move(seqs);
    return j.dump(2);
}

CodeFamily codes_from_json(const std::string& text)
{
    const json j = parse_json(text, "codes file");
    try {
        CodeFamily f;
        f.kind = family_from_name(j.at("kind").get<std::string>());
        f.length = j.at("N").get<std::size_t>();
        f.polynomials = j.value("polynomials", std::vector<std::uint32_t>{});
        f.worst_case_raw = j.value("worst_case_raw", 0L);
        f.worst_case_xcorr = j.value("worst_case_xcorr", 0.0);
        int index = 0;
        for (const auto& s : j.at("sequences")) {
            auto chips = s.get<std::vector<int>>();
            if (chips.size() != f.length)
                throw Error(ErrorCode::DimensionMismatch,
                            "sequence " + std::to_string(index) + " length differs from N");
            f.sequences.emplace_back(std::move(chips), f.kind, index++);
        }
        return f;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCsv, std::string("codes file: ") + e.what());
    }
}

void write_profiles_csv(std::ostream& out, const CodeFamily& family)
{
    const std::size_t count = family.sequences.size();
    const std::size_t limit = count <= 64 ? count : 16;
    out << "a,b,tau,raw,rho\n";
    for (std::size_t a = 0; a < limit; ++a)
        for (std::size_t b = a + 1; b < limit; ++b) {
            const auto profile = raw_xcorr_profile(family.sequences[a], family.sequences[b]);
            for (std::size_t tau = 0; tau < profile.size(); ++tau)
                out << a << ',' << b << ',' << tau << ',' << profile[tau] << ','
                    << fmt(static_cast<double>(profile[tau]) /
                           static_cast<double>(family.length))
                    << '\n';
        }
}

std::string codebook_to_json(const CodebookFile& file)
{
    json j;
    json pos = json::array();
    for (const auto& p : file.geometry.positions())
        pos.push_back({p.x, p.y});
    j["positions"] = std::move(pos);
    if (const auto& lat = file.geometry.lattice())
        j["lattice"] = {{"rows", lat->rows}, {"cols", lat->cols}};
    j["partition"] = {{"kind", partition_name(file.partition.kind)},
                      {"subsets", file.partition.subsets}};
    j["angles"] = file.codebook.angles;
    j["mu_max"] = file.codebook.mu_max;
    json words = json::array();
    for (const auto& u : file.codebook.codewords) {
        json w;
        w["subarray"] = u.subarray_index;
        w["steer_angle_deg"] = u.steer_angle_deg;
        w["taper"] = taper_json(u.taper);
        w["support"] = u.support;
        json re = json::array();
        json im = json::array();
        for (std::size_t s : u.support) {
            re.push_back(u.weights[s].real());
            im.push_back(u.weights[s].imag());
        }
        w["re"] = std::move(re);
        w["im"] = std::move(im);
        words.push_back(std::move(w));
    }
    j["codewords"] = std::move(words);
    return j.dump(2);
}

CodebookFile codebook_from_json(const std::string& text)
{
    const json j = parse_json(text, "codebook file");
    try {
        std::vector<Point2> pos;
        for (const auto& p : j.at("positions"))
            pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        std::optional<LatticeShape> lattice;
        if (j.contains("lattice"))
            lattice = LatticeShape{j["lattice"].at("rows").get<int>(),
                                   j["lattice"].at("cols").get<int>()};
        CodebookFile file{ArrayGeometry(std::move(pos), lattice), {}, {}};

        const auto& part = j.at("partition");
        const auto kind = part.value("kind", std::string("custom"));
        file.partition.kind = kind == "nested"   ? PartitionKind::Nested
                              : kind == "sparse" ? PartitionKind::Sparse
                                                 : PartitionKind::Custom;
        file.partition.subsets = part.at("subsets").get<std::vector<std::vector<std::size_t>>>();
        validate_partition(file.partition, file.geometry);

        file.codebook.angles = j.at("angles").get<std::vector<double>>();
        file.codebook.mu_max = j.value("mu_max", 0.0);
        for (const auto& w : j.at("codewords")) {
            SphericalCodeword u;
            u.subarray_index = w.at("subarray").get<int>();
            u.steer_angle_deg = w.at("steer_angle_deg").get<double>();
            u.taper = taper_from(w.value("taper", json::object()));
            u.support = w.at("support").get<std::vector<std::size_t>>();
            const auto re = w.at("re").get<std::vector<double>>();
            const auto im = w.at("im").get<std::vector<double>>();
            if (re.size() != u.support.size() || im.size() != u.support.size())
                throw Error(ErrorCode::DimensionMismatch, "codeword weights differ from support");
            u.weights.assign(file.geometry.size(), cdouble{});
            double norm2 = 0.0;
            for (std::size_t k = 0; k < u.support.size(); ++k) {
                if (u.support[k] >= file.geometry.size())
                    throw Error(ErrorCode::IndexOutOfRange, "codeword support out of range");
                u.weights[u.support[k]] = {re[k], im[k]};
                norm2 += re[k] * re[k] + im[k] * im[k];
            }
            u.norm = std::sqrt(norm2);
            file.codebook.codewords.push_back(std::move(u));
        }
        if (file.codebook.codewords.empty())
            throw Error(ErrorCode::EmptyCodebook, "codebook file has no codewords");
        return file;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCsv, std::string("codebook file: ") + e.what());
    }
}

void write_decoded_csv(std::ostream& out, const DecodedPattern& pattern)
{
    out << "mode,beam,delay,theta_deg,magnitude,magnitude_db\n";
    const auto mode = decode_mode_name(pattern.mode);
    for (std::size_t d = 0; d < pattern.delays.size(); ++d)
        for (std::size_t b = 0; b < pattern.beams(); ++b)
            for (std::size_t r = 0; r < pattern.theta_grid.size(); ++r) {
                const double v = pattern.at(d, b, r);
                out << mode << ',' << b << ',' << pattern.delays[d] << ','
                    << fmt(pattern.theta_grid[r]) << ',' << fmt(v) << ',' << fmt(to_db(v)) << '\n';
            }
}

std::string decoded_to_json(const DecodedPattern& pattern)
{
    json j;
    j["mode"] = decode_mode_name(pattern.mode);
    j["theta_deg"] = pattern.theta_grid;
    j["delays"] = pattern.delays;
    j["beam_angles_deg"] = pattern.beam_angles;
    j["mainlobe_halfwidth_deg"] = pattern.mainlobe_halfwidth_deg;
    json cuts = json::array();
    for (std::size_t d = 0; d < pattern.delays.size(); ++d) {
        json per_beam = json::array();
        for (std::size_t b = 0; b < pattern.beams(); ++b) {
            const auto c = pattern.cut(d, b);
            per_beam.push_back(std::vector<double>(c.begin(), c.end()));
        }
        cuts.push_back(std::move(per_beam));
    }
    j["magnitude"] = std::move(cuts);
    return j.dump(2);
}

void write_sll_csv(std::ostream& out, std::span<const SllCurve> curves)
{
    out << "beam,other,delay,sll_db\n";
    for (const auto& c : curves)
        for (std::size_t k = 0; k < c.delays.size(); ++k)
            out << c.beam << ',' << c.other << ',' << c.delays[k] << ',' << fmt(c.sll_db[k])
                << '\n';
}

std::string sll_to_json(std::span<const SllCurve> curves)
{
    json arr = json::array();
    for (const auto& c : curves) {
        const auto v = variation(c);
        arr.push_back({{"beam", c.beam},
                       {"other", c.other},
                       {"beam_angle_deg", c.beam_angle_deg},
                       {"other_angle_deg", c.other_angle_deg},
                       {"own_window_deg", c.own_window_deg},
                       {"other_window_deg", c.other_window_deg},
                       {"delays", c.delays},
                       {"sll_db", c.sll_db},
                       {"variation",
                        {{"min_db", v.min_db},
                         {"max_db", v.max_db},
                         {"range_db", v.range_db},
                         {"half_range_db", v.half_range_db}}}});
    }
    return arr.dump(2);
}

void write_bounds_csv(std::ostream& out, std::span<const BoundCurve> curves)
{
    out << "kind,N,m,bound_db\n";
    for (const auto& c : curves)
        for (std::size_t k = 0; k < c.n.size(); ++k)
            out << bound_name(c.kind) << ',' << c.n[k] << ',' << (c.m ? std::to_string(*c.m) : "")
                << ',' << fmt(c.bound_db[k]) << '\n';
}

std::string bounds_to_json(std::span<const BoundCurve> curves)
{
    json arr = json::array();
    for (const auto& c : curves) {
        json e{{"kind", bound_name(c.kind)}, {"N", c.n}, {"bound_db", c.bound_db}};
        e["m"] = c.m ? json(*c.m) : json(nullptr);
        arr.push_back(std::move(e));
    }
    return arr.dump(2);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
}

} // namespace sphgold
