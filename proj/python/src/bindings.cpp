#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "diffcps/cli/commands.hpp"
#include "diffcps/diffusion/schedule.hpp"
#include "diffcps/envdata/dataset.hpp"
#include "diffcps/eval/metrics.hpp"
#include "diffcps/eval/policy_io.hpp"
#include "diffcps/trainer/dual.hpp"

namespace py = pybind11;
using namespace diffcps;

namespace {

// Python sees one sample per row; the core stores one per column.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix columns(const RowMatrix& rows) { return rows.transpose(); }
RowMatrix rows(const Matrix& cols) { return cols.transpose(); }

py::dict report_dict(const ScoreReport& r) {
  py::dict d;
  d["score"] = r.score;
  d["threshold"] = r.threshold;
  d["literal_score"] = r.literal_score;
  d["literal_threshold"] = r.literal_threshold;
  d["sample_count"] = r.sample_count;
  d["mean_radius"] = r.mean_radius;
  d["radius_std"] = r.radius_std;
  d["annulus_lo"] = r.annulus_lo;
  d["annulus_hi"] = r.annulus_hi;
  d["annulus_fraction"] = r.annulus_fraction;
  return d;
}

}  // namespace

PYBIND11_MODULE(_diffcps, m) {
  m.doc() = "Native core of the diffcps package";

  m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the diffcps command line; returns (exit_code, stdout, stderr).");

  m.def("noisy_circle_actions",
        [](std::size_t n, double sigma, std::uint64_t seed) {
          return rows(make_noisy_circle(n, sigma, seed).action_matrix());
        },
        py::arg("n") = 5000, py::arg("sigma") = 0.05, py::arg("seed") = 0,
        "Actions of the noisy-circle dataset as an (n, 2) array.");

  m.def("load_actions", [](const std::filesystem::path& path) { return rows(load_dataset(path).action_matrix()); },
        py::arg("path"), "Actions of a dataset file as an (n, action_dim) array.");

  m.def("vp_schedule",
        [](int steps, double beta_min, double beta_max) {
          const NoiseSchedule s = make_vp_schedule(steps, beta_min, beta_max);
          py::dict d;
          d["betas"] = s.betas();
          d["alphas"] = s.alphas();
          d["alpha_bars"] = s.alpha_bars();
          return d;
        },
        py::arg("steps"), py::arg("beta_min") = 0.1, py::arg("beta_max") = 10.0,
        "Per-step beta, alpha and alpha_bar lists (index 0 is step 1).");

  m.def("q_sample",
        [](const RowMatrix& a0, int step, const RowMatrix& eps, int steps, double beta_min, double beta_max) {
          return rows(q_sample(columns(a0), step, columns(eps), make_vp_schedule(steps, beta_min, beta_max)));
        },
        py::arg("a0"), py::arg("step"), py::arg("eps"), py::arg("steps"), py::arg("beta_min") = 0.1,
        py::arg("beta_max") = 10.0);

  m.def("posterior_mean",
        [](const RowMatrix& a_i, const RowMatrix& eps_hat, int step, int steps, double beta_min, double beta_max) {
          return rows(
              posterior_mean(columns(a_i), columns(eps_hat), step, make_vp_schedule(steps, beta_min, beta_max)));
        },
        py::arg("a_i"), py::arg("eps_hat"), py::arg("step"), py::arg("steps"), py::arg("beta_min") = 0.1,
        py::arg("beta_max") = 10.0);

  m.def("dual_step",
        [](double lambda, double kappa, double clip, double lr, double lc) {
          return dual_step(DualState{lambda, kappa, clip, lr}, lc).lambda;
        },
        py::arg("lambda_"), py::arg("kappa"), py::arg("clip"), py::arg("lr"), py::arg("lc"),
        "One Lagrange-multiplier step; returns the new lambda.");

  m.def("jaccard_score",
        [](const RowMatrix& samples, const RowMatrix& reference, double threshold) {
          return jaccard_score(columns(samples), columns(reference), threshold);
        },
        py::arg("samples"), py::arg("reference"), py::arg("threshold") = kDefaultScoreThreshold);

  m.def("radial_stats",
        [](const RowMatrix& samples, double lo, double hi) {
          const RadialStats s = radial_stats(columns(samples), lo, hi);
          py::dict d;
          d["mean"] = s.mean;
          d["std"] = s.std;
          d["annulus_fraction"] = s.annulus_fraction;
          return d;
        },
        py::arg("samples"), py::arg("lo") = 0.8, py::arg("hi") = 1.2);

  m.def("sample_policy",
        [](const std::filesystem::path& checkpoint, std::size_t n, std::uint64_t seed) {
          const AnyPolicy policy = load_policy(checkpoint);
          Matrix out;
          {
            py::gil_scoped_release release;
            out = draw_actions(policy, Vector::Zero(policy_state_dim(policy)), n, seed);
          }
          return rows(out);
        },
        py::arg("checkpoint"), py::arg("n") = 5000, py::arg("seed") = 0,
        "Draws n actions from a trained checkpoint at the zero state as an (n, action_dim) array.");

  m.def("score_samples",
        [](const RowMatrix& samples, const std::filesystem::path& dataset, double threshold, double lo, double hi) {
          return report_dict(score_samples(columns(samples), load_dataset(dataset), threshold, lo, hi));
        },
        py::arg("samples"), py::arg("dataset"), py::arg("threshold") = kDefaultScoreThreshold, py::arg("lo") = 0.8,
        py::arg("hi") = 1.2);
}
