#include "diffcps/nn/checkpoint.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "diffcps/errors.hpp"

namespace diffcps::nn {

std::string format_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text.empty()) throw ParseError("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw ParseError("not a number: '" + text + "'");
  }
  return v;
}

void Checkpoint::set_meta(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError("checkpoint meta key must be a single token: '" + key + "'");
  }
  if (value.find('\n') != std::string::npos) throw ConfigError("checkpoint meta value may not contain newlines");
  meta_[key] = value;
}

void Checkpoint::set_meta(const std::string& key, double value) { set_meta(key, format_hex(value)); }

void Checkpoint::set_meta(const std::string& key, long long value) { set_meta(key, std::to_string(value)); }

bool Checkpoint::has_meta(const std::string& key) const { return meta_.count(key) != 0; }

const std::string& Checkpoint::meta(const std::string& key) const {
  auto it = meta_.find(key);
  if (it == meta_.end()) throw ParseError("checkpoint is missing meta entry '" + key + "'");
  return it->second;
}

double Checkpoint::meta_double(const std::string& key) const { return parse_double(meta(key)); }

long long Checkpoint::meta_int(const std::string& key) const {
  const std::string& s = meta(key);
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("meta '" + key + "' is not an integer");
  return v;
}

void Checkpoint::put_tensor(const std::string& name, const Matrix& value) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError("tensor name must be a single token: '" + name + "'");
  }
  auto it = std::find_if(tensors_.begin(), tensors_.end(), [&](const auto& e) { return e.first == name; });
  if (it != tensors_.end()) {
    it->second = value;
  } else {
    tensors_.emplace_back(name, value);
  }
}

bool Checkpoint::has_tensor(const std::string& name) const {
  return std::any_of(tensors_.begin(), tensors_.end(), [&](const auto& e) { return e.first == name; });
}

const Matrix& Checkpoint::tensor(const std::string& name) const {
  auto it = std::find_if(tensors_.begin(), tensors_.end(), [&](const auto& e) { return e.first == name; });
  if (it == tensors_.end()) throw ParseError("checkpoint is missing tensor '" + name + "'");
  return it->second;
}

void Checkpoint::put_mlp(const std::string& prefix, const Mlp& net) {
  set_meta(prefix + ".layers", static_cast<long long>(net.num_layers()));
  for (int k = 0; k < net.num_layers(); ++k) {
    put_tensor(prefix + "." + std::to_string(k) + ".weight", net.weight(k).value);
    put_tensor(prefix + "." + std::to_string(k) + ".bias", net.bias(k).value);
  }
}

Mlp Checkpoint::get_mlp(const std::string& prefix) const {
  const long long layers = meta_int(prefix + ".layers");
  if (layers < 1) throw ParseError("network '" + prefix + "' has no layers");
  std::vector<int> dims;
  for (long long k = 0; k < layers; ++k) {
    const Matrix& w = tensor(prefix + "." + std::to_string(k) + ".weight");
    const Matrix& b = tensor(prefix + "." + std::to_string(k) + ".bias");
    if (k == 0) dims.push_back(static_cast<int>(w.cols()));
    if (w.cols() != dims.back() || b.rows() != w.rows() || b.cols() != 1) {
      throw ParseError("network '" + prefix + "': layer " + std::to_string(k) + " shape does not chain");
    }
    dims.push_back(static_cast<int>(w.rows()));
  }
  Mlp net(dims);
  for (int k = 0; k < net.num_layers(); ++k) {
    net.weight(k).value = tensor(prefix + "." + std::to_string(k) + ".weight");
    net.bias(k).value = tensor(prefix + "." + std::to_string(k) + ".bias");
  }
  return net;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "diffcps-checkpoint " << kVersion << "\n";
  for (const auto& [k, v] : meta_) out << "meta " << k << " " << v << "\n";
  for (const auto& [name, m] : tensors_) {
    out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << format_hex(m(i, j));
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty checkpoint file");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != "diffcps-checkpoint") throw ParseError("not a diffcps checkpoint: '" + path.string() + "'");
    if (version != kVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  bool ended = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ck.meta_[key] = value;
    } else if (kind == "tensor") {
      std::string name;
      long rows = -1, cols = -1;
      ls >> name >> rows >> cols;
      if (!ls || rows < 0 || cols < 0) throw ParseError("bad tensor header: '" + line + "'");
      Matrix m(rows, cols);
      for (long i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw ParseError("truncated tensor '" + name + "'");
        std::istringstream rs(line);
        std::string tok;
        for (long j = 0; j < cols; ++j) {
          if (!(rs >> tok)) throw ParseError("tensor '" + name + "' row " + std::to_string(i) + " is short");
          m(i, j) = parse_double(tok);
        }
      }
      ck.tensors_.emplace_back(name, std::move(m));
    } else if (kind == "end") {
      ended = true;
      break;
    } else if (!kind.empty()) {
      throw ParseError("unexpected checkpoint line: '" + line + "'");
    }
  }
  if (!ended) throw ParseError("checkpoint '" + path.string() + "' is truncated (no end marker)");
  return ck;
}

}  // namespace diffcps::nn
