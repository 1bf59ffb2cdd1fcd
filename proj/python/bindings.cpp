// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/error.hpp"
#include "sphgold/experiment.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace sphgold;

namespace {

std::vector<int> chips_of(const ChipSequence& s) { return {s.chips().begin(), s.chips().end()}; }

py::array_t<double> magnitudes_array(const DecodedPattern& p)
{
    py::array_t<double> out({p.delays.size(), p.beams(), p.theta_grid.size()});
    std::copy(p.magnitudes.begin(), p.magnitudes.end(), out.mutable_data());
    return out;
}

py::array_t<std::complex<double>> rx_array(const ReceivedMatrix& rx)
{
    py::array_t<std::complex<double>> out({rx.rows(), rx.chips});
    std::copy(rx.values.begin(), rx.values.end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Coded multibeam isolation: codes, spatial codebooks, sweeps and metrics";
    m.attr("__version__") = std::string(tool_version());

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::enum_<FamilyKind>(m, "FamilyKind")
        .value("Walsh", FamilyKind::Walsh)
        .value("Gold", FamilyKind::Gold)
        .value("GoldLike", FamilyKind::GoldLike)
        .value("MSequence", FamilyKind::MSequence);

    py::class_<ChipSequence>(m, "ChipSequence")
        .def(py::init([](std::vector<int> chips) {
                 return ChipSequence(std::move(chips), FamilyKind::MSequence, 0);
             }),
             py::arg("chips"))
        .def_property_readonly("chips", &chips_of)
        .def_property_readonly("kind", &ChipSequence::kind)
        .def_property_readonly("index", &ChipSequence::index)
        .def("__len__", &ChipSequence::length)
        .def("__eq__", [](const ChipSequence& a, const ChipSequence& b) { return a == b; });

    py::class_<CodeFamily>(m, "CodeFamily")
        .def_readonly("kind", &CodeFamily::kind)
        .def_readonly("length", &CodeFamily::length)
        .def_readonly("sequences", &CodeFamily::sequences)
        .def_readonly("polynomials", &CodeFamily::polynomials)
        .def_readonly("worst_case_raw", &CodeFamily::worst_case_raw)
        .def_readonly("worst_case_xcorr", &CodeFamily::worst_case_xcorr);

    m.def("generate_mseq",
          [](int degree, std::uint32_t polynomial, std::uint32_t state) {
              return generate_mseq({degree, polynomial, state});
          },
          py::arg("degree"), py::arg("polynomial"), py::arg("state") = 1);
    m.def("primitive_polynomials", &primitive_polynomials, py::arg("degree"));
    m.def("walsh_family", &walsh_family, py::arg("log2_n"));
    m.def("gold_t", &gold_t, py::arg("n"));
    m.def("gold_family", &gold_family, py::arg("n"));
    m.def("gold_like_family", &gold_like_family, py::arg("n"), py::arg("count"));
    m.def("raw_xcorr", &raw_xcorr, py::arg("a"), py::arg("b"), py::arg("tau"));
    m.def("periodic_xcorr", &periodic_xcorr, py::arg("a"), py::arg("b"), py::arg("tau"));
    m.def("xcorr_profile", &xcorr_profile, py::arg("a"), py::arg("b"));

    py::class_<ArrayGeometry>(m, "ArrayGeometry")
        .def_property_readonly("positions",
                               [](const ArrayGeometry& g) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : g.positions())
                                       out.emplace_back(p.x, p.y);
                                   return out;
                               })
        .def("__len__", &ArrayGeometry::size);
    m.def("grid_geometry", &grid_geometry, py::arg("rows"), py::arg("cols"),
          py::arg("spacing") = 0.5);
    m.def("steering_vector", &steering_vector, py::arg("geometry"), py::arg("theta_deg"),
          py::arg("phi_deg") = 0.0);

    py::class_<SubarrayPartition>(m, "SubarrayPartition")
        .def(py::init([](std::vector<std::vector<std::size_t>> subsets) {
                 return SubarrayPartition{std::move(subsets), PartitionKind::Custom};
             }),
             py::arg("subsets"))
        .def_readonly("subsets", &SubarrayPartition::subsets);
    m.def("nested_partition", &nested_partition, py::arg("geometry"), py::arg("subarrays"));
    m.def("sparse_partition", &sparse_partition, py::arg("geometry"), py::arg("subarrays"),
          py::arg("elements"), py::arg("seed"));
    m.def("validate_partition", &validate_partition, py::arg("partition"), py::arg("geometry"));

    py::class_<SphericalCodeword>(m, "SphericalCodeword")
        .def_readonly("weights", &SphericalCodeword::weights)
        .def_readonly("support", &SphericalCodeword::support)
        .def_readonly("steer_angle_deg", &SphericalCodeword::steer_angle_deg)
        .def_readonly("subarray_index", &SphericalCodeword::subarray_index);
    m.def("make_codeword",
          [](const SubarrayPartition& p, const ArrayGeometry& g, int i, double theta) {
              return make_codeword(p, g, i, theta);
          },
          py::arg("partition"), py::arg("geometry"), py::arg("subarray_index"), py::arg("theta_deg"));
    m.def("spatial_corr",
          [](const SphericalCodeword& u, const CVec& probe) { return spatial_corr(u, probe); },
          py::arg("u"), py::arg("probe"));
    m.def("pattern_corr", &pattern_corr, py::arg("u"), py::arg("geometry"), py::arg("theta_deg"));
    m.def("mainlobe_halfwidth", &mainlobe_halfwidth, py::arg("u"), py::arg("geometry"),
          py::arg("step_deg") = 0.05);

    py::class_<Codebook>(m, "Codebook")
        .def_readonly("codewords", &Codebook::codewords)
        .def_readonly("angles", &Codebook::angles)
        .def_readonly("mu_max", &Codebook::mu_max);
    m.def("make_codebook",
          [](const SubarrayPartition& p, const ArrayGeometry& g, const std::vector<double>& a) {
              return make_codebook(p, g, a);
          },
          py::arg("partition"), py::arg("geometry"), py::arg("angles"));
    m.def("codebook_mu", &codebook_mu, py::arg("codebook"), py::arg("geometry"));

    py::class_<PartitionSearch>(m, "PartitionSearch")
        .def_readonly("partition", &PartitionSearch::partition)
        .def_readonly("codebook", &PartitionSearch::codebook)
        .def_readonly("initial_mu", &PartitionSearch::initial_mu)
        .def_readonly("accepted_swaps", &PartitionSearch::accepted_swaps)
        .def_readonly("mu_history", &PartitionSearch::mu_history);
    m.def("optimize_partition",
          [](const ArrayGeometry& g, const std::vector<double>& a, int m_, int iters,
             std::uint64_t seed) { return optimize_partition(g, a, m_, iters, seed); },
          py::arg("geometry"), py::arg("angles"), py::arg("elements"), py::arg("iterations"),
          py::arg("seed"));

    py::enum_<DecodeMode>(m, "DecodeMode")
        .value("TemporalOnly", DecodeMode::TemporalOnly)
        .value("SphericalGold", DecodeMode::SphericalGold);

    py::class_<BeamAssignment>(m, "BeamAssignment")
        .def(py::init([](SphericalCodeword u, ChipSequence c) {
                 const double angle = u.steer_angle_deg;
                 return BeamAssignment{std::move(u), std::move(c), angle};
             }),
             py::arg("codeword"), py::arg("code"))
        .def_readonly("beam_angle_deg", &BeamAssignment::beam_angle_deg);

    py::class_<ReceivedMatrix>(m, "ReceivedMatrix")
        .def_readonly("theta_grid", &ReceivedMatrix::theta_grid)
        .def_readonly("chips", &ReceivedMatrix::chips)
        .def_property_readonly("values", &rx_array);

    m.def("synth_received",
          [](const std::vector<BeamAssignment>& beams, const ArrayGeometry& g,
             const std::vector<int>& delays, const std::vector<double>& grid,
             std::optional<double> snr_db, std::uint64_t seed) {
              DelayScenario s;
              s.per_beam_delay_chips = delays;
              std::optional<NoiseSpec> noise;
              if (snr_db)
                  noise = NoiseSpec{*snr_db, seed};
              return synth_received(beams, g, s, grid, noise);
          },
          py::arg("beams"), py::arg("geometry"), py::arg("delays"), py::arg("theta_grid"),
          py::arg("snr_db") = py::none(), py::arg("seed") = 1);
    m.def("decode_temporal", &decode_temporal, py::arg("rx"), py::arg("code"),
          py::arg("decode_delay"));
    m.def("decode_spherical_gold",
          [](const ReceivedMatrix& rx, const std::vector<BeamAssignment>& beams,
             const ArrayGeometry& g, int target, int d) {
              return decode_spherical_gold(rx, beams, g, target, d);
          },
          py::arg("rx"), py::arg("beams"), py::arg("geometry"), py::arg("target_beam"),
          py::arg("decode_delay"));
    m.def("make_theta_grid", &make_theta_grid, py::arg("start"), py::arg("stop"), py::arg("step"));

    py::class_<DecodedPattern>(m, "DecodedPattern")
        .def_readonly("mode", &DecodedPattern::mode)
        .def_readonly("theta_grid", &DecodedPattern::theta_grid)
        .def_readonly("delays", &DecodedPattern::delays)
        .def_readonly("beam_angles", &DecodedPattern::beam_angles)
        .def_readonly("mainlobe_halfwidth_deg", &DecodedPattern::mainlobe_halfwidth_deg)
        .def_property_readonly("magnitudes", &magnitudes_array);
    m.def("delay_sweep",
          [](const std::vector<BeamAssignment>& beams, const ArrayGeometry& g,
             const std::vector<double>& grid, const std::vector<int>& delays, DecodeMode mode) {
              return delay_sweep(beams, g, grid, delays, mode);
          },
          py::arg("beams"), py::arg("geometry"), py::arg("theta_grid"), py::arg("delays"),
          py::arg("mode") = DecodeMode::TemporalOnly);

    py::class_<AoaEstimate>(m, "AoaEstimate")
        .def_readonly("beam_index", &AoaEstimate::beam_index)
        .def_readonly("theta_hat_deg", &AoaEstimate::theta_hat_deg)
        .def_readonly("score", &AoaEstimate::score);
    m.def("aoa_estimate",
          [](const std::vector<double>& cut, const std::vector<double>& grid, const Codebook& cb,
             const ArrayGeometry& g) { return aoa_estimate(cut, grid, cb, g); },
          py::arg("decoded"), py::arg("theta_grid"), py::arg("codebook"), py::arg("geometry"));

    py::class_<SllCurve>(m, "SllCurve")
        .def_readonly("beam", &SllCurve::beam)
        .def_readonly("other", &SllCurve::other)
        .def_readonly("delays", &SllCurve::delays)
        .def_readonly("sll_db", &SllCurve::sll_db);
    py::class_<VariationStats>(m, "VariationStats")
        .def_readonly("min_db", &VariationStats::min_db)
        .def_readonly("max_db", &VariationStats::max_db)
        .def_readonly("range_db", &VariationStats::range_db)
        .def_readonly("half_range_db", &VariationStats::half_range_db);
    py::enum_<BoundKind>(m, "BoundKind")
        .value("Walsh", BoundKind::Walsh)
        .value("Gold", BoundKind::Gold)
        .value("SphericalGold", BoundKind::SphericalGold);

    m.def("to_db", &to_db, py::arg("magnitude"));
    m.def("inter_beam_sll",
          [](const std::vector<double>& pattern, const std::vector<double>& grid, double own,
             double other, double window) {
              return inter_beam_sll(pattern, grid, own, other, window);
          },
          py::arg("pattern"), py::arg("theta_grid"), py::arg("own_angle"), py::arg("other_angle"),
          py::arg("window_deg"));
    m.def("sll_vs_delay", &sll_vs_delay, py::arg("sweep"), py::arg("i"), py::arg("j"),
          py::arg("window_deg") = 0.0);
    m.def("variation", [](const std::vector<double>& v) { return variation(v); },
          py::arg("values_db"));
    m.def("theoretical_bound", &theoretical_bound, py::arg("kind"), py::arg("n"),
          py::arg("m") = py::none());

    m.def("run_sweep",
          [](const std::string& config_json, const std::filesystem::path& out_dir) {
              ExperimentConfig c = parse_config(config_json);
              c.out_dir = out_dir;
              return cmd_sweep(c);
          },
          py::arg("config_json"), py::arg("out_dir"),
          "Runs a sweep from a JSON config and returns the report JSON.");
    m.def("config_hash",
          [](const std::string& config_json) { return config_hash(parse_config(config_json)); },
          py::arg("config_json"));
}
