#include "diffcps/cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "diffcps/baselines/awr.hpp"
#include "diffcps/cli/config.hpp"
#include "diffcps/errors.hpp"
#include "diffcps/eval/metrics.hpp"
#include "diffcps/eval/policy_io.hpp"

namespace diffcps::cli {

namespace fs = std::filesystem;

namespace {

struct GenDataArgs {
  long long n = 5000;
  double sigma = 0.05;
  long long seed = 0;
  std::string out;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  long long samples = 5000;
  long long seed = 0;
  double threshold = kDefaultScoreThreshold;
  double literal_threshold = kLiteralScoreThreshold;
  double annulus_lo = 0.8;
  double annulus_hi = 1.2;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a, std::ostream& out) {
  if (a.n < 1) throw ConfigError("--n must be >= 1");
  if (a.seed < 0) throw ConfigError("--seed must be non-negative");
  if (!(a.sigma >= 0.0)) throw ConfigError("--sigma must be >= 0");
  const OfflineDataset ds = make_noisy_circle(static_cast<std::size_t>(a.n), a.sigma, static_cast<std::uint64_t>(a.seed));
  save_dataset(ds, a.out);
  const RadialStats rs = radial_stats(ds.action_matrix());
  out << "wrote " << ds.size() << " transitions to " << a.out << " (state_dim=" << ds.state_dim()
      << ", action_dim=" << ds.action_dim() << ", sigma=" << a.sigma << ", seed=" << a.seed
      << ", mean radius=" << rs.mean << ", radius std=" << rs.std << ")\n";
  return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& out) {
  const OfflineDataset ds = load_dataset(cfg.data);
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  write_config_file(cfg, dir / "config.txt");
  auto progress = [&](const MetricsRow& row) {
    if (row.step % (cfg.train.metrics_every * 10) == 0 || row.step == cfg.train.steps) {
      out << format_metrics_row(row) << "\n" << std::flush;
    }
  };
  out << kMetricsHeader << "\n";
  std::vector<MetricsRow> metrics;
  switch (cfg.algo) {
    case Algorithm::DiffCps: {
      auto run = train_diffcps(ds, cfg.train, progress);
      make_checkpoint(run.model, "diffcps").save(dir / "checkpoint.ckpt");
      metrics = std::move(run.metrics);
      break;
    }
    case Algorithm::DiffusionBc: {
      auto run = diffusion_bc_train(ds, cfg.train, progress);
      make_checkpoint(run.model, "diffusion-bc").save(dir / "checkpoint.ckpt");
      metrics = std::move(run.metrics);
      break;
    }
    case Algorithm::Awr: {
      auto run = train_awr(ds, cfg.train, progress);
      make_checkpoint(run.model).save(dir / "checkpoint.ckpt");
      metrics = std::move(run.metrics);
      break;
    }
  }
  write_metrics_csv(metrics, dir / "metrics.csv");
  out << "wrote " << (dir / "checkpoint.ckpt").string() << ", " << (dir / "metrics.csv").string() << ", "
      << (dir / "config.txt").string() << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.samples < 1) throw ConfigError("--samples must be >= 1");
  if (a.seed < 0) throw ConfigError("--seed must be non-negative");
  if (!(a.threshold > 0.0) || !(a.literal_threshold > 0.0)) throw ConfigError("thresholds must be positive");
  if (!(a.annulus_lo <= a.annulus_hi)) throw ConfigError("--annulus-lo must not exceed --annulus-hi");
  const AnyPolicy policy = load_policy(fs::path(a.checkpoint));
  const OfflineDataset ds = load_dataset(a.data);
  if (ds.action_dim() != policy_action_dim(policy) || ds.state_dim() != policy_state_dim(policy)) {
    throw ParseError("checkpoint expects state_dim=" + std::to_string(policy_state_dim(policy)) +
                     ", action_dim=" + std::to_string(policy_action_dim(policy)) + " but the dataset has " +
                     std::to_string(ds.state_dim()) + "/" + std::to_string(ds.action_dim()));
  }
  const Matrix samples = draw_actions(policy, Vector::Zero(ds.state_dim()), static_cast<std::size_t>(a.samples),
                                      static_cast<std::uint64_t>(a.seed));
  const ScoreReport report =
      score_samples(samples, ds, a.threshold, a.annulus_lo, a.annulus_hi, a.literal_threshold);
  const fs::path dir = a.out.empty() ? fs::path(a.checkpoint).parent_path() : fs::path(a.out);
  if (!dir.empty()) fs::create_directories(dir);
  write_report_json(report, dir / "report.json");
  write_samples_csv(samples, dir / "samples.csv");
  out << report.to_json().dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DiffCPS: diffusion-model constrained policy search for offline RL"};
  app.name("diffcps");
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate the noisy-circle bandit dataset");
  gen_cmd->add_option("--n", gen.n, "Number of transitions")->capture_default_str();
  gen_cmd->add_option("--sigma", gen.sigma, "Per-coordinate Gaussian noise scale")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset file")->required();

  auto* train_cmd = app.add_subcommand("train", "Train diffcps, awr or diffusion-bc on a dataset");
  std::string config_path;
  train_cmd->add_option("--config", config_path, "key=value config file (flags override it)");
  std::vector<std::pair<std::string, std::string>> flag_values(config_keys().size());
  std::vector<CLI::Option*> flag_opts;
  const ExperimentConfig defaults;
  const auto default_entries = defaults.entries();
  for (std::size_t k = 0; k < config_keys().size(); ++k) {
    const std::string& key = config_keys()[k];
    flag_values[k].first = key;
    std::string names = "--" + key;
    if (key == "algo") names += ",--algorithm";
    if (key.find('_') != std::string::npos) {
      std::string dashed = key;
      for (auto& c : dashed) c = c == '_' ? '-' : c;
      names += ",--" + dashed;
    }
    auto* opt = train_cmd->add_option(names, flag_values[k].second, "default: " + default_entries[k].second);
    flag_opts.push_back(opt);
  }

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Sample a trained policy and score it against a dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint written by train")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset to score against")->required();
  eval_cmd->add_option("--samples", ev.samples, "Number of actions to draw")->capture_default_str();
  eval_cmd->add_option("--seed", ev.seed, "Sampling seed")->capture_default_str();
  eval_cmd->add_option("--threshold", ev.threshold, "Jaccard distance threshold")->capture_default_str();
  eval_cmd->add_option("--literal-threshold", ev.literal_threshold, "Second, literal threshold")
      ->capture_default_str();
  eval_cmd->add_option("--annulus-lo", ev.annulus_lo, "Annulus lower radius")->capture_default_str();
  eval_cmd->add_option("--annulus-hi", ev.annulus_hi, "Annulus upper radius")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Output directory (default: checkpoint directory)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen, out);
    if (train_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        for (const auto& [k, v] : read_config_file(config_path)) cfg.set(k, v);
      }
      for (std::size_t k = 0; k < flag_opts.size(); ++k) {
        if (flag_opts[k]->count() > 0) cfg.set(flag_values[k].first, flag_values[k].second);
      }
      cfg.validate();
      return cmd_train(cfg, out);
    }
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace diffcps::cli
