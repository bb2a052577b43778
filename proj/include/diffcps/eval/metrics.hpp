#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "diffcps/envdata/dataset.hpp"

namespace diffcps {

/// Modified Jaccard score: fraction of samples (columns) whose Euclidean
/// distance to the nearest reference action is strictly below `threshold`.
/// Brute-force nearest neighbour.
double jaccard_score(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, double threshold);
double jaccard_score(const Eigen::MatrixXd& samples, const OfflineDataset& dataset, double threshold);

struct RadialStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double annulus_fraction = 0.0;
};

/// Statistics of ||a|| over the columns of `samples`; the annulus is [lo, hi].
RadialStats radial_stats(const Eigen::MatrixXd& samples, double lo = 0.8, double hi = 1.2);

inline constexpr double kDefaultScoreThreshold = 0.05;
inline constexpr double kLiteralScoreThreshold = 1e-8;

struct ScoreReport {
  double score = 0.0;
  double threshold = kDefaultScoreThreshold;
  double literal_score = 0.0;
  double literal_threshold = kLiteralScoreThreshold;
  long sample_count = 0;
  double mean_radius = 0.0;
  double radius_std = 0.0;
  double annulus_lo = 0.8;
  double annulus_hi = 1.2;
  double annulus_fraction = 0.0;

  nlohmann::json to_json() const;
};

ScoreReport score_samples(const Eigen::MatrixXd& samples, const OfflineDataset& dataset,
                          double threshold = kDefaultScoreThreshold, double annulus_lo = 0.8,
                          double annulus_hi = 1.2, double literal_threshold = kLiteralScoreThreshold);

void write_report_json(const ScoreReport& report, const std::filesystem::path& path);

/// CSV with header `x,y` (first two action coordinates), one sample per row.
void write_samples_csv(const Eigen::MatrixXd& samples, const std::filesystem::path& path);

}  // namespace diffcps
