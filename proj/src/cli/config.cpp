#include "diffcps/cli/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "diffcps/errors.hpp"

namespace diffcps::cli {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "diffcps") return Algorithm::DiffCps;
  if (name == "awr") return Algorithm::Awr;
  if (name == "diffusion-bc") return Algorithm::DiffusionBc;
  throw ConfigError("unknown algorithm '" + name + "' (expected diffcps, awr or diffusion-bc)");
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::DiffCps: return "diffcps";
    case Algorithm::Awr: return "awr";
    case Algorithm::DiffusionBc: return "diffusion-bc";
  }
  return "diffcps";
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean (true/false)");
}

int to_int32(const std::string& key, const std::string& v) {
  const long long i = to_int(key, v);
  if (i < -2147483647LL || i > 2147483647LL) throw ConfigError("config key '" + key + "' is out of range");
  return static_cast<int>(i);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "algo",        "data",           "out",          "seed",          "steps",         "batch_size",
      "policy_interval", "gamma",      "lr",           "polyak",        "max_q_backup",  "max_q_samples",
      "metrics_every", "hidden_dim",   "hidden_layers", "max_action",   "T",             "beta_min",
      "beta_max",    "time_embed_dim", "kappa",        "lambda_clip",   "lambda_lr",     "lambda_init",
      "dual_updates", "awr_temperature", "awr_weight_clip"};
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  TrainConfig& t = train;
  if (key == "algo") algo = parse_algorithm(value);
  else if (key == "data") data = value;
  else if (key == "out") out = value;
  else if (key == "seed") {
    const long long s = to_int(key, value);
    if (s < 0) throw ConfigError("seed must be non-negative");
    t.seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "steps") t.steps = static_cast<long>(to_int(key, value));
  else if (key == "batch_size") t.batch_size = to_int32(key, value);
  else if (key == "policy_interval") t.policy_interval = to_int32(key, value);
  else if (key == "gamma") t.gamma = to_double(key, value);
  else if (key == "lr") t.lr = to_double(key, value);
  else if (key == "polyak") t.polyak = to_double(key, value);
  else if (key == "max_q_backup") t.max_q_backup = to_bool(key, value);
  else if (key == "max_q_samples") t.max_q_samples = to_int32(key, value);
  else if (key == "metrics_every") t.metrics_every = static_cast<long>(to_int(key, value));
  else if (key == "hidden_dim") t.hidden_dim = to_int32(key, value);
  else if (key == "hidden_layers") t.hidden_layers = to_int32(key, value);
  else if (key == "max_action") t.max_action = to_double(key, value);
  else if (key == "T") t.diffusion_steps = to_int32(key, value);
  else if (key == "beta_min") t.beta_min = to_double(key, value);
  else if (key == "beta_max") t.beta_max = to_double(key, value);
  else if (key == "time_embed_dim") t.time_embed_dim = to_int32(key, value);
  else if (key == "kappa") t.kappa = to_double(key, value);
  else if (key == "lambda_clip") t.lambda_clip = to_double(key, value);
  else if (key == "lambda_lr") t.lambda_lr = to_double(key, value);
  else if (key == "lambda_init") t.lambda_init = to_double(key, value);
  else if (key == "dual_updates") t.dual_updates = to_bool(key, value);
  else if (key == "awr_temperature") t.awr_temperature = to_double(key, value);
  else if (key == "awr_weight_clip") t.awr_weight_clip = to_double(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  const TrainConfig& t = train;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {{"algo", algorithm_name(algo)},
          {"data", data},
          {"out", out},
          {"seed", std::to_string(t.seed)},
          {"steps", std::to_string(t.steps)},
          {"batch_size", std::to_string(t.batch_size)},
          {"policy_interval", std::to_string(t.policy_interval)},
          {"gamma", fmt(t.gamma)},
          {"lr", fmt(t.lr)},
          {"polyak", fmt(t.polyak)},
          {"max_q_backup", b(t.max_q_backup)},
          {"max_q_samples", std::to_string(t.max_q_samples)},
          {"metrics_every", std::to_string(t.metrics_every)},
          {"hidden_dim", std::to_string(t.hidden_dim)},
          {"hidden_layers", std::to_string(t.hidden_layers)},
          {"max_action", fmt(t.max_action)},
          {"T", std::to_string(t.diffusion_steps)},
          {"beta_min", fmt(t.beta_min)},
          {"beta_max", fmt(t.beta_max)},
          {"time_embed_dim", std::to_string(t.time_embed_dim)},
          {"kappa", fmt(t.kappa)},
          {"lambda_clip", fmt(t.lambda_clip)},
          {"lambda_lr", fmt(t.lambda_lr)},
          {"lambda_init", fmt(t.lambda_init)},
          {"dual_updates", b(t.dual_updates)},
          {"awr_temperature", fmt(t.awr_temperature)},
          {"awr_weight_clip", fmt(t.awr_weight_clip)}};
}

void ExperimentConfig::validate() const {
  if (data.empty()) throw ConfigError("no dataset given (set data / --data)");
  if (out.empty()) throw ConfigError("no output directory given (set out / --out)");
  train.validate();
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_config_text(const ExperimentConfig& config) {
  std::string s = "# diffcps resolved configuration\n";
  for (const auto& [k, v] : config.entries()) s += k + "=" + v + "\n";
  return s;
}

void write_config_file(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_config_text(config);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace diffcps::cli
