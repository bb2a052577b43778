#include <cstdio>
#include <fstream>
#include <ostream>

#include "diffcps/errors.hpp"
#include "diffcps/trainer/train.hpp"

namespace diffcps {

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string format_metrics_row(const MetricsRow& r) {
  return std::to_string(r.step) + "," + num(r.critic_loss) + "," + num(r.actor_q_term) + "," + num(r.lc) + "," +
         num(r.lambda) + "," + num(r.mean_abs_q_target);
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << kMetricsHeader << "\n";
  for (const auto& r : rows) out << format_metrics_row(r) << "\n";
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_metrics_csv(rows, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace diffcps
