#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "diffcps/nn/mlp.hpp"

namespace diffcps::nn {

/// Versioned text container of named tensors plus string metadata.
///
///   diffcps-checkpoint 1
///   meta <key> <value>
///   tensor <name> <rows> <cols>
///   <cols hexfloat values>      (one line per row, row-major)
///   end
///
/// Values are written as C99 hexfloats so reading reproduces every bit.
class Checkpoint {
 public:
  static constexpr int kVersion = 1;

  void set_meta(const std::string& key, const std::string& value);
  void set_meta(const std::string& key, double value);
  void set_meta(const std::string& key, long long value);
  bool has_meta(const std::string& key) const;
  const std::string& meta(const std::string& key) const;
  double meta_double(const std::string& key) const;
  long long meta_int(const std::string& key) const;
  const std::map<std::string, std::string>& all_meta() const { return meta_; }

  void put_tensor(const std::string& name, const Matrix& value);
  bool has_tensor(const std::string& name) const;
  const Matrix& tensor(const std::string& name) const;
  const std::vector<std::pair<std::string, Matrix>>& tensors() const { return tensors_; }

  /// Stores an Mlp under `prefix`; get_mlp checks the stored shapes chain.
  void put_mlp(const std::string& prefix, const Mlp& net);
  Mlp get_mlp(const std::string& prefix) const;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> meta_;
  std::vector<std::pair<std::string, Matrix>> tensors_;
};

std::string format_hex(double v);
double parse_double(const std::string& text);

}  // namespace diffcps::nn
