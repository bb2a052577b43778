#include "diffcps/envdata/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "diffcps/errors.hpp"
#include "diffcps/nn/checkpoint.hpp"

namespace diffcps {

namespace {
constexpr int kDatasetVersion = 1;
}

OfflineDataset::OfflineDataset(std::vector<Transition> transitions, int state_dim, int action_dim,
                               Metadata metadata)
    : transitions_(std::move(transitions)), state_dim_(state_dim), action_dim_(action_dim),
      metadata_(std::move(metadata)) {
  if (transitions_.empty()) throw ConfigError("offline dataset is empty");
  if (state_dim_ < 1 || action_dim_ < 1) throw ConfigError("offline dataset dimensions must be positive");
  actions_.resize(action_dim_, static_cast<Eigen::Index>(transitions_.size()));
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_) {
      throw ConfigError("transition " + std::to_string(i) + " has inconsistent dimensions");
    }
    actions_.col(static_cast<Eigen::Index>(i)) = t.action;
  }
}

Batch OfflineDataset::gather(const std::vector<std::size_t>& indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b{Eigen::MatrixXd(state_dim_, n), Eigen::MatrixXd(action_dim_, n), Eigen::VectorXd(n),
          Eigen::MatrixXd(state_dim_, n), Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = transitions_.at(indices[j]);
    b.states.col(j) = t.state;
    b.actions.col(j) = t.action;
    b.rewards(j) = t.reward;
    b.next_states.col(j) = t.next_state;
    b.dones(j) = t.done ? 1.0 : 0.0;
  }
  return b;
}

Batch OfflineDataset::sample_batch(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw UsageError("batch size must be positive");
  std::uniform_int_distribution<std::size_t> pick(0, transitions_.size() - 1);
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = pick(rng);
  return gather(idx);
}

OfflineDataset make_noisy_circle(std::size_t n, double sigma, std::uint64_t seed, double max_action) {
  if (n < 1) throw ConfigError("noisy circle needs n >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noisy circle needs sigma >= 0");
  if (!(max_action > 0.0)) throw ConfigError("max_action must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = angle(rng);
    Eigen::Vector2d a(std::cos(phi), std::sin(phi));
    if (sigma > 0.0) {
      a(0) += sigma * noise(rng);
      a(1) += sigma * noise(rng);
    }
    a = a.cwiseMax(-max_action).cwiseMin(max_action);
    out.push_back(Transition{Eigen::VectorXd::Zero(1), a, 1.0, Eigen::VectorXd::Zero(1), true});
  }
  OfflineDataset::Metadata meta{{"generator", "noisy-circle"},
                                {"n", std::to_string(n)},
                                {"sigma", nn::format_hex(sigma)},
                                {"seed", std::to_string(seed)},
                                {"max_action", nn::format_hex(max_action)}};
  return OfflineDataset(std::move(out), 1, 2, std::move(meta));
}

void save_dataset(const OfflineDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "diffcps-dataset " << kDatasetVersion << ' ' << dataset.state_dim() << ' ' << dataset.action_dim() << ' '
      << dataset.size() << "\n";
  out << "meta";
  for (const auto& [k, v] : dataset.metadata()) {
    if (k.find_first_of(" =\n") != std::string::npos || v.find_first_of(" \n") != std::string::npos) {
      throw ConfigError("dataset metadata must not contain spaces: '" + k + "'");
    }
    out << ' ' << k << '=' << v;
  }
  out << "\n";
  std::string line;
  for (const auto& t : dataset.transitions()) {
    line.clear();
    auto put = [&](double v) {
      if (!line.empty()) line += ' ';
      line += nn::format_hex(v);
    };
    for (double v : t.state) put(v);
    for (double v : t.action) put(v);
    put(t.reward);
    for (double v : t.next_state) put(v);
    line += t.done ? " 1" : " 0";
    out << line << "\n";
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

OfflineDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset file is empty");
  std::istringstream head(line);
  std::string magic;
  int version = 0, sdim = 0, adim = 0;
  long long count = -1;
  head >> magic >> version >> sdim >> adim >> count;
  if (!head || magic != "diffcps-dataset") throw ParseError("bad dataset header: '" + line + "'");
  if (version != kDatasetVersion) throw ParseError("unsupported dataset version " + std::to_string(version));
  if (sdim < 1 || adim < 1 || count < 1) throw ParseError("dataset header has invalid dimensions or count");

  OfflineDataset::Metadata meta;
  if (!std::getline(in, line)) throw ParseError("dataset is missing its metadata line");
  {
    std::istringstream ms(line);
    std::string tok;
    ms >> tok;
    if (tok != "meta") throw ParseError("expected metadata line, got '" + line + "'");
    while (ms >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("bad metadata entry '" + tok + "'");
      meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }

  std::vector<Transition> rows;
  rows.reserve(static_cast<std::size_t>(count));
  const int fields = 2 * sdim + adim + 2;
  std::vector<std::string> tok(fields);
  for (long long r = 0; r < count; ++r) {
    if (!std::getline(in, line)) {
      throw ParseError("record " + std::to_string(r) + ": unexpected end of file (header declares " +
                       std::to_string(count) + " records)");
    }
    std::istringstream ls(line);
    int got = 0;
    while (got < fields && ls >> tok[got]) ++got;
    std::string extra;
    if (got != fields || (ls >> extra)) {
      throw ParseError("record " + std::to_string(r) + ": expected " + std::to_string(fields) + " fields");
    }
    Transition t;
    t.state.resize(sdim);
    t.action.resize(adim);
    t.next_state.resize(sdim);
    try {
      int f = 0;
      for (int i = 0; i < sdim; ++i) t.state(i) = nn::parse_double(tok[f++]);
      for (int i = 0; i < adim; ++i) t.action(i) = nn::parse_double(tok[f++]);
      t.reward = nn::parse_double(tok[f++]);
      for (int i = 0; i < sdim; ++i) t.next_state(i) = nn::parse_double(tok[f++]);
      if (tok[f] != "0" && tok[f] != "1") throw ParseError("done flag must be 0 or 1");
      t.done = tok[f] == "1";
    } catch (const ParseError& e) {
      throw ParseError("record " + std::to_string(r) + ": " + e.what());
    }
    rows.push_back(std::move(t));
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError("record " + std::to_string(count) + ": data beyond the declared count");
    }
  }
  return OfflineDataset(std::move(rows), sdim, adim, std::move(meta));
}

}  // namespace diffcps
