#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "diffcps/trainer/actor.hpp"
#include "diffcps/trainer/config.hpp"

namespace diffcps {

/// One row of the metrics log. Fields that an algorithm does not compute
/// are NaN.
struct MetricsRow {
  long step = 0;
  double critic_loss = 0.0;
  double actor_q_term = 0.0;
  double lc = 0.0;
  double lambda = 0.0;
  double mean_abs_q_target = 0.0;
};

inline constexpr const char* kMetricsHeader = "step,critic_loss,actor_q_term,L_c,lambda,mean_abs_q_target";

std::string format_metrics_row(const MetricsRow& row);
void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

using MetricsCallback = std::function<void(const MetricsRow&)>;

struct DiffCpsModel {
  DiffusionPolicy policy;
  DiffusionPolicy policy_target;
  CriticPair critics;
  DualState dual;
};

template <class Model>
struct TrainRun {
  Model model;
  std::vector<MetricsRow> metrics;
  long scale_warnings = 0;
};

/// Seeds of the independent random streams used by the trainers.
enum class Stream : std::uint64_t {
  PolicyInit = 1,
  CriticInit = 2,
  Batches = 3,
  CriticTarget = 4,
  ActorChain = 5,
  Denoise = 6,
};

/// Stops glibc from returning freed activation buffers to the OS between steps;
/// without it training spends a large share of its time in page faults.
/// No-op on other C libraries. Idempotent.
void keep_heap_resident();

/// The DiffCPS loop: every step a critic update and Polyak updates; every
/// d-th step an actor update followed by a dual update.
TrainRun<DiffCpsModel> train_diffcps(const OfflineDataset& dataset, const TrainConfig& config,
                                     const MetricsCallback& on_metrics = {});

}  // namespace diffcps
