#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "secbeam/harness.hpp"
#include "secbeam/slnr.hpp"

namespace py = pybind11;
using namespace secbeam;

namespace {

BeamformerSet to_beams(const std::vector<CVector>& w, double power_budget) {
  BeamformerSet bf;
  bf.w = w;
  bf.power_budget = power_budget;
  return bf;
}

SelectionMode parse_mode(const std::string& mode) {
  if (mode == "exhaustive") return SelectionMode::kExhaustive;
  if (mode == "heuristic") return SelectionMode::kHeuristic;
  throw py::value_error("mode must be 'exhaustive' or 'heuristic'");
}

ExperimentConfig config_from(const std::string& text) {
  ExperimentConfig cfg;
  apply_config_text(cfg, text);
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust secure multi-user beamforming: SCA, zero forcing and SLNR designs";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<ChannelSet>(m, "ChannelSet")
      .def(py::init(&ChannelSet::from_vectors), py::arg("h"), py::arg("g"), py::arg("eps"),
           py::arg("sigma2"), py::arg("varsigma2"))
      .def_static(
          "sample",
          [](int n_tx, int k, double eps, double noise_var, std::uint64_t seed,
             std::uint64_t substream) {
            RngStream rng(seed, substream);
            return sample_channel_set(n_tx, k, eps, noise_var, rng);
          },
          py::arg("n_tx"), py::arg("k"), py::arg("eps"), py::arg("noise_var") = 1.0,
          py::arg("seed") = 1, py::arg("substream") = 0)
      .def_readonly("n_tx", &ChannelSet::n_tx)
      .def_readonly("k_pairs", &ChannelSet::k_pairs)
      .def_readonly("h_est", &ChannelSet::h_est)
      .def_readonly("g_est", &ChannelSet::g_est)
      .def_readonly("eps", &ChannelSet::eps)
      .def_readonly("sigma2", &ChannelSet::sigma2)
      .def_readonly("varsigma2", &ChannelSet::varsigma2)
      .def("subset", &ChannelSet::subset);

  m.def(
      "ssr_exact",
      [](const ChannelSet& cs, const std::vector<CVector>& w) {
        return ssr_exact(cs, to_beams(w, 1.0));
      },
      py::arg("cs"), py::arg("w"), "Sum secrecy rate (bits) on the estimated channels.");
  m.def(
      "ssr_lower_bound",
      [](const ChannelSet& cs, const std::vector<CVector>& w) {
        const LowerBoundSsr lb = ssr_lower_bound(cs, to_beams(w, 1.0));
        return py::make_tuple(lb.bits, lb.degenerate);
      },
      py::arg("cs"), py::arg("w"), "Worst-case lower bound (bits, degenerate flag).");
  m.def(
      "quad_bounds",
      [](const CVector& h, const CMatrix& W, double eps) {
        const QuadBounds b = quad_bounds(h, W, eps);
        return py::make_tuple(b.lb, b.ub);
      },
      py::arg("h"), py::arg("W"), py::arg("eps"));
  m.def(
      "lemma1_extreme",
      [](const CVector& y, double eps, bool maximize) {
        const ExtremePoint p = lemma1_extreme(y, eps, maximize ? Sense::kMax : Sense::kMin);
        return py::make_tuple(p.x, p.value);
      },
      py::arg("y"), py::arg("eps"), py::arg("maximize") = true);
  m.def("herm_to_real", &herm_to_real);
  m.def("real_to_herm", &real_to_herm);

  m.def(
      "run_sca",
      [](const ChannelSet& cs, double power, std::uint64_t seed, int max_iter,
         int rand_samples) {
        ScaConfig cfg;
        cfg.max_iter = max_iter;
        cfg.randomization_samples = rand_samples;
        RngStream rng(seed, 0);
        ScaResult r;
        {
          py::gil_scoped_release release;
          r = run_sca(cs, power, cfg, rng);
        }
        py::dict out;
        out["w"] = r.beamformers.w;
        out["value"] = r.value;
        out["relaxed_value"] = r.relaxed_value;
        out["trace"] = r.trace;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["rank_one"] = r.rank_one;
        out["degenerate"] = r.degenerate;
        return out;
      },
      py::arg("cs"), py::arg("power"), py::arg("seed") = 1, py::arg("max_iter") = 50,
      py::arg("rand_samples") = 200);

  m.def(
      "zf_design",
      [](const ChannelSet& cs, double power, const std::string& mode) {
        const ZfDesign d = zf_design(cs, power, parse_mode(mode));
        py::dict out;
        out["w"] = d.beamformers.w;
        out["value"] = d.value;
        out["selected"] = d.dirs.selected;
        out["power"] = d.alloc.power;
        out["no_eligible"] = d.alloc.no_eligible;
        return out;
      },
      py::arg("cs"), py::arg("power"), py::arg("mode") = "exhaustive");
  m.def(
      "waterfill",
      [](const ChannelSet& cs, const std::vector<int>& subset, double power) {
        const ZfDirections d = zf_directions(cs, subset);
        const PowerAllocation a = waterfill(d, cs, power);
        return py::make_tuple(a.power, a.lambda, waterfill_kkt_violation(d, cs, power, a));
      },
      py::arg("cs"), py::arg("subset"), py::arg("power"),
      "(powers, lambda, KKT violation string or '').");
  m.def(
      "select_users",
      [](const ChannelSet& cs, double power, const std::string& mode) {
        const Selection s = select_users(cs, power, parse_mode(mode));
        return py::make_tuple(s.subset, s.value);
      },
      py::arg("cs"), py::arg("power"), py::arg("mode") = "exhaustive");
  m.def(
      "slnr_beamformers",
      [](const ChannelSet& cs, double power) { return slnr_beamformers(cs, power).w; },
      py::arg("cs"), py::arg("power"));

  m.def(
      "simulate",
      [](const std::string& config) {
        const ExperimentConfig cfg = config_from(config);
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_results_csv(os, run_sweep(cfg));
        }
        return os.str();
      },
      py::arg("config") = "", "Runs a sweep from key=value text and returns the CSV.");
  m.def("selftest", [] {
    py::list out;
    for (const auto& c : selftest().checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  });
}
