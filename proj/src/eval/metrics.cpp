#include "diffcps/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "diffcps/errors.hpp"

namespace diffcps {

double jaccard_score(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, double threshold) {
  if (samples.cols() == 0) throw UsageError("jaccard_score: empty sample set");
  if (!(threshold > 0.0)) throw ConfigError("jaccard_score: threshold must be positive");
  if (reference.cols() == 0 || reference.rows() != samples.rows()) {
    throw ConfigError("jaccard_score: reference set is empty or has a different dimension");
  }
  const double t2 = threshold * threshold;
  long hits = 0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const double best = (reference.colwise() - samples.col(j)).colwise().squaredNorm().minCoeff();
    if (best < t2) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.cols());
}

double jaccard_score(const Eigen::MatrixXd& samples, const OfflineDataset& dataset, double threshold) {
  return jaccard_score(samples, dataset.action_matrix(), threshold);
}

RadialStats radial_stats(const Eigen::MatrixXd& samples, double lo, double hi) {
  if (samples.cols() == 0) throw UsageError("radial_stats: empty sample set");
  const Eigen::ArrayXd r = samples.colwise().norm().transpose().array();
  RadialStats s;
  s.mean = r.mean();
  s.std = std::sqrt((r - s.mean).square().mean());
  s.annulus_fraction = ((r >= lo) && (r <= hi)).cast<double>().mean();
  return s;
}

nlohmann::json ScoreReport::to_json() const {
  return nlohmann::json{{"score", score},
                        {"threshold", threshold},
                        {"literal_score", literal_score},
                        {"literal_threshold", literal_threshold},
                        {"sample_count", sample_count},
                        {"mean_radius", mean_radius},
                        {"radius_std", radius_std},
                        {"annulus_lo", annulus_lo},
                        {"annulus_hi", annulus_hi},
                        {"annulus_fraction", annulus_fraction}};
}

ScoreReport score_samples(const Eigen::MatrixXd& samples, const OfflineDataset& dataset, double threshold,
                          double annulus_lo, double annulus_hi, double literal_threshold) {
  ScoreReport r;
  r.threshold = threshold;
  r.literal_threshold = literal_threshold;
  r.score = jaccard_score(samples, dataset, threshold);
  r.literal_score = jaccard_score(samples, dataset, literal_threshold);
  r.sample_count = static_cast<long>(samples.cols());
  const RadialStats rs = radial_stats(samples, annulus_lo, annulus_hi);
  r.mean_radius = rs.mean;
  r.radius_std = rs.std;
  r.annulus_lo = annulus_lo;
  r.annulus_hi = annulus_hi;
  r.annulus_fraction = rs.annulus_fraction;
  return r;
}

void write_report_json(const ScoreReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << report.to_json().dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_samples_csv(const Eigen::MatrixXd& samples, const std::filesystem::path& path) {
  if (samples.cols() > 0 && samples.rows() < 2) throw ConfigError("sample export needs 2-D actions");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "x,y\n";
  char buf[96];
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", samples(0, j), samples(1, j));
    out << buf;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace diffcps
