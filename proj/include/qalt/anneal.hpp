#pragma once

#include <vector>

#include "qalt/models.hpp"
#include "qalt/rng.hpp"

namespace qalt {

enum class AnnealSchedule { linear, geometric };

struct AnnealConfig {
  std::int64_t steps = 1;
  double beta_start = 0.1;
  double beta_end = 50.0;
  AnnealSchedule schedule = AnnealSchedule::geometric;
};

/// Inverse temperature at step `t` of `steps` under the schedule.
double anneal_beta(const AnnealConfig& cfg, std::int64_t t);

struct AnnealPoint {
  std::int64_t step = 0;
  double current = 0.0;
  double best = 0.0;
};

/// Single-walker Metropolis annealing: uniformly random start string, one
/// uniformly random bit-flip proposal per step, acceptance min(1, e^{-b dE}),
/// best-so-far recorded. Trace has steps+1 points (step 0 = the start).
std::vector<AnnealPoint> anneal(const DiagonalLandscape& landscape,
                                const AnnealConfig& cfg, RngStream& rng);

/// Deterministic ensemble annealing: evolves the full probability vector from
/// the uniform distribution under the same kernel (each neighbor proposed
/// with probability 1/n); `current` is the distribution's mean energy and
/// `best` its running minimum.
std::vector<AnnealPoint> anneal_ensemble(const DiagonalLandscape& landscape,
                                         const AnnealConfig& cfg);

}  // namespace qalt
