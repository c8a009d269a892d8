#include "qalt/anneal.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace qalt {

namespace {

void check(const AnnealConfig& cfg) {
  if (cfg.steps < 1) throw ValidationError("anneal: steps must be >= 1");
  if (!(cfg.beta_start > 0.0) || cfg.beta_end < cfg.beta_start)
    throw ValidationError("anneal: need 0 < beta_start <= beta_end");
}

}  // namespace

double anneal_beta(const AnnealConfig& cfg, std::int64_t t) {
  const double frac = cfg.steps > 1
                          ? static_cast<double>(t) / static_cast<double>(cfg.steps - 1)
                          : 1.0;
  if (cfg.schedule == AnnealSchedule::linear)
    return cfg.beta_start + (cfg.beta_end - cfg.beta_start) * frac;
  return cfg.beta_start * std::pow(cfg.beta_end / cfg.beta_start, frac);
}

std::vector<AnnealPoint> anneal(const DiagonalLandscape& landscape,
                                const AnnealConfig& cfg, RngStream& rng) {
  check(cfg);
  const int n = landscape.n_bits;
  std::int64_t x = static_cast<std::int64_t>(
      rng.uniform_index(static_cast<std::uint64_t>(landscape.dim())));
  double e = landscape.e[x];
  double best = e;

  std::vector<AnnealPoint> trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  trace.push_back({0, e, best});
  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    const double beta = anneal_beta(cfg, t);
    const std::int64_t y =
        x ^ (std::int64_t{1} << rng.uniform_index(static_cast<std::uint64_t>(n)));
    const double de = landscape.e[y] - e;
    if (de <= 0.0 || rng.uniform() < std::exp(-beta * de)) {
      x = y;
      e += de;
      if (e < best) best = e;
    }
    trace.push_back({t + 1, e, best});
  }
  return trace;
}

std::vector<AnnealPoint> anneal_ensemble(const DiagonalLandscape& landscape,
                                         const AnnealConfig& cfg) {
  check(cfg);
  const int n = landscape.n_bits;
  const std::int64_t dim = landscape.dim();
  VecR p = VecR::Constant(dim, 1.0 / static_cast<double>(dim));
  VecR next(dim);

  // The uphill energy gaps along single-flip edges form a tiny set on the
  // landscapes of interest, and they never change across steps; index them
  // once so each step evaluates one exponential per distinct gap instead of
  // one per edge. Index 0 is reserved for downhill/flat moves (rate 1).
  std::map<double, int> gap_index;
  std::vector<int> edge_gap(static_cast<std::size_t>(dim) *
                            static_cast<std::size_t>(n));
  std::vector<double> gaps{0.0};
  for (std::int64_t x = 0; x < dim; ++x)
    for (int b = 0; b < n; ++b) {
      const std::int64_t y = x ^ (std::int64_t{1} << b);
      const double de = landscape.e[y] - landscape.e[x];
      int idx = 0;
      if (de > 0.0) {
        auto [it, inserted] = gap_index.emplace(de, static_cast<int>(gaps.size()));
        if (inserted) gaps.push_back(de);
        idx = it->second;
      }
      edge_gap[static_cast<std::size_t>(x * n + b)] = idx;
    }
  std::vector<double> rate(gaps.size());

  std::vector<AnnealPoint> trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  double mean = p.dot(landscape.e);
  double best = mean;
  trace.push_back({0, mean, best});

  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    const double beta = anneal_beta(cfg, t);
    for (std::size_t g = 0; g < gaps.size(); ++g)
      rate[g] = std::exp(-beta * gaps[g]) / static_cast<double>(n);
    next.setZero();
    for (std::int64_t x = 0; x < dim; ++x) {
      const double px = p[x];
      if (px == 0.0) continue;
      double stay = px;
      const int* idx = &edge_gap[static_cast<std::size_t>(x * n)];
      for (int b = 0; b < n; ++b) {
        const double flow = px * rate[static_cast<std::size_t>(idx[b])];
        next[x ^ (std::int64_t{1} << b)] += flow;
        stay -= flow;
      }
      next[x] += stay;
    }
    p.swap(next);
    mean = p.dot(landscape.e);
    if (mean < best) best = mean;
    trace.push_back({t + 1, mean, best});
  }
  return trace;
}

}  // namespace qalt
