#include "qalt/lowering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace qalt {

namespace {

constexpr double kLevelTol = 1e-9;
constexpr double kGradTol = 1e-12;

template <class S>
StateVector eigenvector_state(const RegisterShape& shape,
                              const EigenSystem<S>& es, std::int64_t col) {
  VecC amp;
  if (es.is_permutation()) {
    amp = VecC::Zero(es.dim());
    amp[es.perm[static_cast<std::size_t>(col)]] = 1.0;
  } else {
    amp = es.basis.col(col).template cast<cplx>();
  }
  return {shape, std::move(amp)};
}

template <class S>
std::pair<StateVector, MeasurementOutcome> step_impl(const StateVector& state,
                                                     const EigenSystem<S>& es,
                                                     int k, RngStream& rng) {
  if (k < 1) throw ValidationError("energy_measurement_step: K must be >= 1");
  if (state.amp.size() != es.dim())
    throw ValidationError("energy_measurement_step: dimension mismatch");
  const VecR w = decompose_weights(es, state.amp);
  std::vector<double> prefix(static_cast<std::size_t>(w.size()));
  std::partial_sum(w.data(), w.data() + w.size(), prefix.begin());
  const double total = prefix.back();
  if (total <= 0.0)
    throw ValidationError("energy_measurement_step: zero overlap mass");

  MeasurementOutcome out;
  out.measurement_count = k;
  std::int64_t best = -1;
  for (int j = 0; j < k; ++j) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(prefix.begin(), prefix.end(), u);
    auto idx = static_cast<std::int64_t>(it - prefix.begin());
    if (idx >= w.size()) idx = w.size() - 1;
    out.all_energies.push_back(es.energy[idx]);
    if (best < 0 || idx < best) best = idx;  // ascending: min index = min energy
  }
  out.chosen_index = best;
  out.chosen_energy = es.energy[best];
  return {eigenvector_state(state.shape, es, best), out};
}

}  // namespace

std::pair<StateVector, MeasurementOutcome> energy_measurement_step(
    const StateVector& state, const EigenSystem<double>& es, int k,
    RngStream& rng) {
  return step_impl(state, es, k, rng);
}
std::pair<StateVector, MeasurementOutcome> energy_measurement_step(
    const StateVector& state, const EigenSystem<cplx>& es, int k,
    RngStream& rng) {
  return step_impl(state, es, k, rng);
}

VecR min_of_k_weights(const VecR& w, const VecR& e, int k) {
  if (w.size() != e.size() || w.size() == 0)
    throw ValidationError("min_of_k_weights: size mismatch");
  if (k < 1) throw ValidationError("min_of_k_weights: K must be >= 1");
  const double total = w.sum();
  if (total <= 0.0) throw ValidationError("min_of_k_weights: zero total mass");

  // Level boundaries (ascending energies; degenerate levels grouped).
  std::vector<std::pair<std::int64_t, std::int64_t>> levels;
  std::int64_t i = 0;
  while (i < e.size()) {
    std::int64_t j = i;
    while (j < e.size() && e[j] - e[i] <= kLevelTol) ++j;
    levels.emplace_back(i, j);
    i = j;
  }

  VecR out = VecR::Zero(w.size());
  double c = 0.0;  // strictly-higher cumulative mass
  for (auto lv = levels.rbegin(); lv != levels.rend(); ++lv) {
    double p = 0.0;
    for (std::int64_t m = lv->first; m < lv->second; ++m) p += w[m];
    p /= total;
    if (p > 0.0) {
      // (c+p)^K - c^K, evaluated stably for small p.
      const double mass =
          c > 0.0 ? std::pow(c, k) * std::expm1(k * std::log1p(p / c))
                  : std::pow(p, k);
      const double scale = mass / (p * total);
      for (std::int64_t m = lv->first; m < lv->second; ++m)
        out[m] = w[m] * scale;
    }
    c += p;
  }
  const double s = out.sum();
  if (s <= 0.0) throw NumericalError("min_of_k_weights: degenerate output");
  return out / s;
}

namespace {

template <class S>
ClassicalMixture distribution_impl(const ClassicalMixture& mix,
                                   const EigenSystem<S>& old_es,
                                   const EigenSystem<S>& new_es, int k) {
  if (mix.w.size() != old_es.dim() || old_es.dim() != new_es.dim())
    throw ValidationError("energy_measurement_distribution: dimension mismatch");
  const VecR p = propagate_weights(old_es, new_es, mix.w);
  return {min_of_k_weights(p, new_es.energy, k), mix.label};
}

}  // namespace

ClassicalMixture energy_measurement_distribution(const ClassicalMixture& mix,
                                                 const EigenSystem<double>& old_es,
                                                 const EigenSystem<double>& new_es,
                                                 int k) {
  return distribution_impl(mix, old_es, new_es, k);
}
ClassicalMixture energy_measurement_distribution(const ClassicalMixture& mix,
                                                 const EigenSystem<cplx>& old_es,
                                                 const EigenSystem<cplx>& new_es,
                                                 int k) {
  return distribution_impl(mix, old_es, new_es, k);
}

ThetaMode ThetaMode::fixed(double t) {
  ThetaMode m;
  m.kind = kFixed;
  m.theta = t;
  return m;
}

ThetaMode ThetaMode::line_search(std::vector<double> grid) {
  ThetaMode m;
  m.kind = kLineSearch;
  m.grid = std::move(grid);
  return m;
}

std::vector<double> default_theta_grid() {
  constexpr int kPoints = 16;
  constexpr double lo = 1e-3, hi = 0.5;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i)
    grid[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1));
  return grid;
}

double prescribed_theta(const std::vector<double>& g, double c) {
  double sum = 0.0;
  int m = 0;
  for (double gi : g)
    if (std::abs(gi) > kGradTol) {
      sum += std::abs(gi);
      ++m;
    }
  if (m == 0) return 0.0;
  return std::min(c * sum / m, 0.9);
}

namespace {

std::vector<double> gradient_impl(const StateVector& state, const VecC& hpsi,
                                  const std::vector<LocalOperator>& terms) {
  std::map<std::vector<int>, MatC> cross;
  std::vector<double> g;
  g.reserve(terms.size());
  for (const auto& t : terms) {
    auto it = cross.find(t.support);
    if (it == cross.end()) {
      EmbeddingPlan plan(state.shape, t.support);
      it = cross.emplace(t.support, cross_matrix(plan, state.amp, hpsi)).first;
    }
    const cplx v = (t.mat.array() * it->second.array()).sum();
    g.push_back(2.0 * v.imag());
  }
  return g;
}

struct UpdateCore {
  StateVector state;
  VariationalStep step;
};

template <class EnergyFn>
UpdateCore update_impl(const StateVector& state,
                       const std::vector<double>& g,
                       const std::vector<LocalOperator>& terms,
                       const ThetaMode& mode, const EnergyFn& energy) {
  if (terms.empty())
    throw ValidationError("variational_update: empty basis");
  UpdateCore out;
  out.step.energy_before = energy(state.amp);

  std::vector<LocalOperator> gen;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (std::abs(g[i]) <= kGradTol) continue;
    const double mu = g[i] > 0.0 ? -1.0 : 1.0;  // descend at first order
    out.step.mus.push_back(static_cast<int>(mu));
    out.step.generator_terms.push_back({mu, terms[i]});
    gen.push_back({terms[i].support, mu * terms[i].mat});
  }

  const bool fixed = mode.kind == ThetaMode::kFixed;
  if (fixed && std::abs(mode.theta) >= 1.0)
    throw ValidationError("variational_update: |theta| must be < 1");
  if (gen.empty() || (fixed && mode.theta == 0.0)) {
    out.state = state;
    out.step.theta = 0.0;
    out.step.energy_after = out.step.energy_before;
    return out;
  }

  const LocalApplier applier(state.shape, gen);
  const auto apply_g = [&applier](const VecC& in, VecC& o) {
    o.setZero();
    applier.apply(in, o);
  };

  if (fixed) {
    KrylovExp prop(apply_g, state.amp, std::abs(mode.theta));
    VecC amp = prop.at(mode.theta);
    amp /= amp.norm();
    out.step.theta = mode.theta;
    out.step.energy_after = energy(amp);
    out.state = {state.shape, std::move(amp)};
    return out;
  }

  std::vector<double> grid = mode.grid.empty() ? default_theta_grid() : mode.grid;
  for (double t : grid)
    if (t <= 0.0 || t >= 1.0)
      throw ValidationError("variational_update: grid angles must lie in (0,1)");
  const double theta_max = *std::max_element(grid.begin(), grid.end());
  KrylovExp prop(apply_g, state.amp, theta_max);

  double best_theta = 0.0;
  double best_e = out.step.energy_before;
  VecC best_amp = state.amp;
  for (double t : grid) {
    VecC amp = prop.at(t);
    amp /= amp.norm();
    const double e = energy(amp);
    if (e < best_e) {
      best_e = e;
      best_theta = t;
      best_amp = std::move(amp);
    }
  }
  out.step.theta = best_theta;
  out.step.energy_after = best_e;
  out.state = {state.shape, std::move(best_amp)};
  return out;
}

}  // namespace

std::vector<double> variational_gradient(
    const StateVector& state, const HermitianOp<cplx>& h,
    const std::vector<LocalOperator>& basis_terms) {
  if (state.amp.size() != h.mat.rows())
    throw ValidationError("variational_gradient: dimension mismatch");
  const VecC hpsi = h.mat * state.amp;
  return gradient_impl(state, hpsi, basis_terms);
}

std::vector<double> variational_gradient(
    const StateVector& state, const LocalApplier& h,
    const std::vector<LocalOperator>& basis_terms) {
  if (state.shape.total_dim != h.shape().total_dim)
    throw ValidationError("variational_gradient: dimension mismatch");
  VecC hpsi = VecC::Zero(state.amp.size());
  h.apply(state.amp, hpsi);
  return gradient_impl(state, hpsi, basis_terms);
}

std::pair<StateVector, VariationalStep> variational_update(
    const StateVector& state, const HermitianOp<cplx>& h,
    const std::vector<LocalOperator>& basis_terms, const ThetaMode& mode) {
  const auto g = variational_gradient(state, h, basis_terms);
  const auto energy = [&h](const VecC& amp) {
    return amp.dot(h.mat * amp).real();
  };
  auto core = update_impl(state, g, basis_terms, mode, energy);
  return {std::move(core.state), std::move(core.step)};
}

std::pair<StateVector, VariationalStep> variational_update(
    const StateVector& state, const LocalApplier& h, double h_offset,
    const std::vector<LocalOperator>& basis_terms, const ThetaMode& mode) {
  const auto g = variational_gradient(state, h, basis_terms);
  const auto energy = [&h, h_offset](const VecC& amp) {
    VecC out = VecC::Zero(amp.size());
    h.apply(amp, out);
    return amp.dot(out).real() + h_offset;
  };
  auto core = update_impl(state, g, basis_terms, mode, energy);
  return {std::move(core.state), std::move(core.step)};
}

std::vector<LocalOperator> single_site_basis_terms(const RegisterShape& shape) {
  std::vector<LocalOperator> terms;
  for (std::size_t s = 0; s < shape.dims.size(); ++s) {
    const auto basis = operator_basis({shape.dims[s]});
    for (std::size_t j = 1; j < basis.size(); ++j)
      terms.push_back({{static_cast<int>(s)}, basis[j]});
  }
  return terms;
}

}  // namespace qalt
