#include "qalt/altmin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "qalt/linalg.hpp"
#include "qalt/stats.hpp"

namespace qalt {

std::int64_t physical_copies(int l, int k) {
  if (l < 0 || k < 1) throw ValidationError("physical_copies: bad arguments");
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t total = 0, p = 1;
  for (int i = 0; i <= l; ++i) {
    if (total > kMax - p) throw ValidationError("physical_copies: overflow");
    total += p;
    if (i < l) {
      if (p > kMax / k) throw ValidationError("physical_copies: overflow");
      p *= k;
    }
  }
  return total;
}

namespace {

constexpr double kStallRel = 1e-4;
constexpr int kStallWindow = 5;

template <class S>
EigenSystem<S> perm_eigensystem(const VecR& diag) {
  const std::int64_t d = diag.size();
  std::vector<std::int64_t> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) { return diag[a] < diag[b]; });
  EigenSystem<S> es;
  es.energy.resize(d);
  es.perm.resize(static_cast<std::size_t>(d));
  for (std::int64_t c = 0; c < d; ++c) {
    es.energy[c] = diag[order[static_cast<std::size_t>(c)]];
    es.perm[static_cast<std::size_t>(c)] = order[static_cast<std::size_t>(c)];
  }
  return es;
}

double pure_energy(const LocalApplier& applier, double offset, const VecC& amp) {
  VecC out = VecC::Zero(amp.size());
  applier.apply(amp, out);
  return amp.dot(out).real() + offset;
}

/// <column | base | column> for every eigensystem column, given the exact
/// diagonal of the base operator (perm systems) or its dense action.
template <class S>
VecR column_base_energies(const EigenSystem<S>& es, const VecR& base_diag) {
  if (es.is_permutation()) {
    VecR out(es.dim());
    for (std::int64_t c = 0; c < es.dim(); ++c)
      out[c] = base_diag[es.perm[static_cast<std::size_t>(c)]];
    return out;
  }
  return es.basis.cwiseAbs2().transpose() * base_diag;
}

VecR column_base_energies(const EigenSystem<cplx>& es, const LocalApplier& ap,
                          double offset, const VecR& base_diag) {
  if (es.is_permutation()) {
    VecR out(es.dim());
    for (std::int64_t c = 0; c < es.dim(); ++c)
      out[c] = base_diag[es.perm[static_cast<std::size_t>(c)]];
    return out;
  }
  VecR out(es.dim());
  VecC tmp(es.dim());
  for (std::int64_t c = 0; c < es.dim(); ++c) {
    const VecC col = es.basis.col(c);
    tmp.setZero();
    ap.apply(col, tmp);
    out[c] = col.dot(tmp).real() + offset;
  }
  return out;
}

TraceRow pre_measurement_row(int iteration, double energy_base, const VecR& w,
                             const VecR& energies, int k) {
  TraceRow row;
  row.iteration = iteration;
  row.energy_base = energy_base;
  row.energy_current = w.dot(energies) / w.sum();
  row.quartile_current = quartile(w, energies);
  row.k_i = row.energy_current - row.quartile_current;
  row.measurements_logical = k;
  row.h_sample_id = iteration;
  return row;
}

RunTrace measurement_local(const LocalHamiltonian& h, const AltMinConfig& cfg,
                           const StateVector& initial, RngStream& rng) {
  initial.validate();
  if (initial.amp.size() != h.shape.total_dim)
    throw ValidationError("altmin_measurement: state/Hamiltonian mismatch");
  if (cfg.l < 1 || cfg.k < 1)
    throw ValidationError("altmin_measurement: L and K must be >= 1");

  RngStream rng_h = rng.split(0);
  RngStream rng_m = rng.split(1);
  const LocalApplier applier = h.applier();
  const VecR base_diag = h.diagonal();

  RunTrace out;
  out.label = h.label;
  out.physical_copy_count = physical_copies(cfg.l, cfg.k);

  EigenSystem<cplx> es = h.is_diagonal() ? perm_eigensystem<cplx>(base_diag)
                                         : spectral(h.assemble());

  if (cfg.mode == RunMode::trajectory) {
    StateVector state = initial;
    LocalAlteration cur_alt;  // empty = base round
    for (int i = 0; i < cfg.l; ++i) {
      const VecR w = decompose_weights(es, state.amp);
      out.rows.push_back(pre_measurement_row(
          i, pure_energy(applier, h.offset, state.amp), w, es.energy, cfg.k));
      if (cfg.store_states) {
        out.states.push_back(state);
        out.alterations.push_back(cur_alt);
      }
      auto step = energy_measurement_step(state, es, cfg.k, rng_m);
      state = std::move(step.first);
      if (i + 1 < cfg.l) {
        cur_alt = sample_local_alteration(h, rng_h);
        es = spectral(assemble_altered(h, cur_alt));
      }
    }
    TraceRow last;
    last.iteration = cfg.l;
    last.energy_base = pure_energy(applier, h.offset, state.amp);
    last.energy_current = last.energy_base;
    out.rows.push_back(last);
    if (cfg.store_states) out.states.push_back(state);
    return out;
  }

  // Exact-distribution mode: mixture over the previous eigenbasis.
  VecR w = decompose_weights(es, initial.amp);
  EigenSystem<cplx> es_prev = std::move(es);
  for (int i = 0; i < cfg.l; ++i) {
    const double e_base =
        i == 0 ? pure_energy(applier, h.offset, initial.amp)
               : column_base_energies(es_prev, applier, h.offset, base_diag)
                     .dot(w) /
                     w.sum();
    VecR p;
    if (i == 0) {
      p = w;
    } else {
      const LocalAlteration alt = sample_local_alteration(h, rng_h);
      EigenSystem<cplx> es_new = spectral(assemble_altered(h, alt));
      p = propagate_weights(es_prev, es_new, w);
      es_prev = std::move(es_new);
    }
    out.rows.push_back(pre_measurement_row(i, e_base, p, es_prev.energy, cfg.k));
    w = min_of_k_weights(p, es_prev.energy, cfg.k);
  }
  TraceRow last;
  last.iteration = cfg.l;
  last.energy_base =
      column_base_energies(es_prev, applier, h.offset, base_diag).dot(w) / w.sum();
  last.energy_current = last.energy_base;
  out.rows.push_back(last);
  return out;
}

}  // namespace

RunTrace altmin_measurement(const LocalHamiltonian& h, const AltMinConfig& cfg,
                            const StateVector& initial, RngStream& rng) {
  if (cfg.family == FamilyKind::local)
    return measurement_local(h, cfg, initial, rng);
  if (!h.is_diagonal())
    throw ValidationError("altmin_measurement: sparse families need a diagonal base");
  for (int d : h.shape.dims)
    if (d != 2)
      throw ValidationError("altmin_measurement: sparse families need a qubit register");
  const DiagonalLandscape landscape{static_cast<int>(h.shape.n_sites()),
                                    h.diagonal(), h.label};
  return altmin_measurement(landscape, cfg, initial, rng);
}

RunTrace altmin_measurement(const DiagonalLandscape& base,
                            const AltMinConfig& cfg, const StateVector& initial,
                            RngStream& rng) {
  if (cfg.family == FamilyKind::local)
    throw ValidationError("altmin_measurement: local family needs projector terms");
  initial.validate();
  const std::int64_t dim = base.dim();
  if (initial.amp.size() != dim)
    throw ValidationError("altmin_measurement: state/landscape mismatch");
  if (cfg.l < 1 || cfg.k < 1)
    throw ValidationError("altmin_measurement: L and K must be >= 1");

  const SparsityPattern pattern = cfg.family == FamilyKind::sparse_band
                                      ? band_pattern(cfg.band_t, dim)
                                      : hamming_pattern(base.n_bits);
  if (pattern.dim != dim)
    throw ValidationError("altmin_measurement: pattern/landscape mismatch");
  const VecR e_shift = base.e.array() - base.e.minCoeff();

  RngStream rng_h = rng.split(0);
  RngStream rng_m = rng.split(1);

  RunTrace out;
  out.label = base.label;
  out.physical_copy_count = physical_copies(cfg.l, cfg.k);

  EigenSystem<double> es = perm_eigensystem<double>(base.e);

  const auto sample_es = [&]() {
    const SparseAlteration s = sample_sparse_alteration(e_shift, pattern, rng_h);
    return spectral(assemble_sparse_altered(base, s));
  };

  if (cfg.mode == RunMode::trajectory) {
    StateVector state = initial;
    for (int i = 0; i < cfg.l; ++i) {
      const VecR w = decompose_weights(es, state.amp);
      const double e_base = state.amp.cwiseAbs2().dot(base.e);
      out.rows.push_back(pre_measurement_row(i, e_base, w, es.energy, cfg.k));
      auto step = energy_measurement_step(state, es, cfg.k, rng_m);
      state = std::move(step.first);
      if (i + 1 < cfg.l) es = sample_es();
    }
    TraceRow last;
    last.iteration = cfg.l;
    last.energy_base = state.amp.cwiseAbs2().dot(base.e);
    last.energy_current = last.energy_base;
    out.rows.push_back(last);
    return out;
  }

  VecR w = decompose_weights(es, initial.amp);
  EigenSystem<double> es_prev = std::move(es);
  for (int i = 0; i < cfg.l; ++i) {
    const double e_base =
        i == 0 ? initial.amp.cwiseAbs2().dot(base.e)
               : column_base_energies(es_prev, base.e).dot(w) / w.sum();
    VecR p;
    if (i == 0) {
      p = w;
    } else {
      EigenSystem<double> es_new = sample_es();
      p = propagate_weights(es_prev, es_new, w);
      es_prev = std::move(es_new);
    }
    out.rows.push_back(pre_measurement_row(i, e_base, p, es_prev.energy, cfg.k));
    w = min_of_k_weights(p, es_prev.energy, cfg.k);
  }
  TraceRow last;
  last.iteration = cfg.l;
  last.energy_base = column_base_energies(es_prev, base.e).dot(w) / w.sum();
  last.energy_current = last.energy_base;
  out.rows.push_back(last);
  return out;
}

RunTrace altmin_variational(const LocalHamiltonian& h, ScheduleKind schedule,
                            int l, const StateVector& initial, RngStream& rng,
                            const ThetaMode& theta) {
  initial.validate();
  if (initial.amp.size() != h.shape.total_dim)
    throw ValidationError("altmin_variational: state/Hamiltonian mismatch");
  if (l < 1) throw ValidationError("altmin_variational: L must be >= 1");

  RngStream rng_h = rng.split(0);
  const auto terms = single_site_basis_terms(h.shape);
  const LocalApplier base_ap = h.applier();

  RunTrace out;
  out.label = h.label;
  out.physical_copy_count = physical_copies(l, 1);

  StateVector state = initial;
  std::optional<LocalApplier> alt_ap;
  std::int64_t sample_id = 0, next_id = 1;
  int stall = 0;

  TraceRow first;
  first.iteration = 0;
  first.energy_base = pure_energy(base_ap, h.offset, state.amp);
  first.energy_current = first.energy_base;
  first.h_sample_id = 0;
  out.rows.push_back(first);

  for (int step = 1; step <= l; ++step) {
    const bool resample =
        schedule == ScheduleKind::altered ||
        (schedule == ScheduleKind::hybrid && stall >= kStallWindow);
    if (resample) {
      const LocalAlteration alt = sample_local_alteration(h, rng_h);
      alt_ap.emplace(h.shape, altered_term_ops(h, alt));
      sample_id = next_id++;
      stall = 0;
    }
    const LocalApplier& target = alt_ap ? *alt_ap : base_ap;
    const double target_offset = alt_ap ? 0.0 : h.offset;
    auto res = variational_update(state, target, target_offset, terms, theta);
    state = std::move(res.first);
    const VariationalStep& vstep = res.second;
    const double rel = (vstep.energy_before - vstep.energy_after) /
                       std::max(std::abs(vstep.energy_before), 1e-12);
    stall = rel < kStallRel ? stall + 1 : 0;

    TraceRow row;
    row.iteration = step;
    row.energy_base = pure_energy(base_ap, h.offset, state.amp);
    row.energy_current = vstep.energy_after;
    row.theta = vstep.theta;
    row.h_sample_id = sample_id;
    out.rows.push_back(row);
  }
  return out;
}

AppendixBDiagnostics appendix_b_diagnostics(const LocalHamiltonian& h,
                                            const RunTrace& trace) {
  const std::size_t rows = trace.rows.size();
  if (rows < 2 || trace.states.size() != rows ||
      trace.alterations.size() + 1 != rows)
    throw ValidationError(
        "appendix_b_diagnostics: run must be stored (store_states) and local");
  const auto l = static_cast<double>(rows - 1);

  AppendixBDiagnostics d;
  for (std::size_t i = 0; i + 1 < rows; ++i) d.mean_k += trace.rows[i].k_i;
  d.mean_k /= l;

  std::vector<LocalOperator> scaled;
  scaled.reserve(h.terms.size());
  for (const auto& p : h.terms)
    scaled.push_back({p.support, p.mat / static_cast<double>(p.rank)});
  const LocalApplier proj_ap(h.shape, scaled);
  for (std::size_t i = 0; i + 1 < rows; ++i)
    d.proj_term += pure_energy(proj_ap, 0.0, trace.states[i].amp);
  d.proj_term /= l;

  for (std::size_t i = 0; i + 1 < rows; ++i) {
    const auto& phis = trace.alterations[i].phis;
    if (phis.empty()) continue;
    std::vector<LocalOperator> ops;
    ops.reserve(phis.size());
    for (const auto& p : phis) ops.push_back({p.support, p.mat});
    const LocalApplier alt_ap(h.shape, ops);
    d.corr_term += pure_energy(alt_ap, 0.0, trace.states[i + 1].amp);
  }
  d.corr_term /= l;
  return d;
}

}  // namespace qalt
