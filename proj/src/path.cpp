#include "conewalk/path.hpp"

#include <algorithm>

namespace conewalk {

void MinmaxConfig::validate() const {
  if (m < 5 || m % 2 == 0) {
    throw ParameterError("path node count m must be odd and >= 5");
  }
  if (max_outer < 0 || inner_flow_steps < 1 || newton_every < 0 || !(tau > 0.0 && tau <= 1.0)) {
    throw ParameterError("invalid path iteration settings");
  }
  if (eps_bar < 0.0) {
    throw ParameterError("eps_bar must be nonnegative");
  }
}

std::vector<double> arc_lengths(const std::vector<FeFunction>& path, double p) {
  std::vector<double> s(path.size(), 0.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    s[k] = s[k - 1] + w1p_norm(path[k] - path[k - 1], p);
  }
  return s;
}

void reparametrize(std::vector<FeFunction>& path, double p) {
  const std::size_t m = path.size();
  if (m < 3) {
    return;
  }
  const auto s = arc_lengths(path, p);
  const double total = s.back();
  if (!(total > 0.0)) {
    return;
  }
  std::vector<FeFunction> out(path);
  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(m - 1);
    while (seg + 2 < m && s[seg + 1] < target) {
      ++seg;
    }
    const double len = s[seg + 1] - s[seg];
    const double w = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out[k] = path[seg] * (1.0 - w) + path[seg + 1] * w;
  }
  path = std::move(out);
}

}  // namespace conewalk
