#include "qalt/theory.hpp"

#include <cmath>
#include <cstdio>

#include "qalt/qop.hpp"

namespace qalt {

namespace {

struct MomentAccum {
  double sum = 0.0, sumsq = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double stderr_of_mean() const {
    const double nn = static_cast<double>(n);
    const double var = (sumsq - nn * mean() * mean()) / (nn - 1.0);
    return std::sqrt(std::max(var, 0.0) / nn);
  }
};

/// Reduced density matrix of rho on `support`.
MatC reduce_density(const MatC& rho, const RegisterShape& shape,
                    const std::vector<int>& support) {
  EmbeddingPlan plan(shape, support);
  MatC out = MatC::Zero(plan.sup_dim(), plan.sup_dim());
  for (std::int64_t r = 0; r < plan.rest_dim(); ++r)
    for (std::int64_t s = 0; s < plan.sup_dim(); ++s)
      for (std::int64_t t = 0; t < plan.sup_dim(); ++t)
        out(s, t) += rho(plan.base(r) + plan.offset(s), plan.base(r) + plan.offset(t));
  return out;
}

double term_correction(const Projector& p, const MatC& rho_i) {
  const double d = static_cast<double>(p.rank);
  const MatC prp = p.mat * rho_i * p.mat;
  const double t1 = (p.mat * rho_i).trace().real();
  const double t2 = (prp * prp).trace().real();
  return ((d - 1.0) / (d * d)) * t1 - t2 / (d * (d + 1.0)) +
         t1 * t1 / (d * d * (d + 1.0));
}

std::vector<LocalOperator> scaled_terms(const LocalHamiltonian& h) {
  std::vector<LocalOperator> ops;
  ops.reserve(h.terms.size());
  for (const auto& p : h.terms)
    ops.push_back({p.support, (1.0 + 1.0 / static_cast<double>(p.rank)) * p.mat});
  return ops;
}

}  // namespace

std::string summarize(const VarianceReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mc=%.6e (stderr %.3e, n=%lld), closed_form=%.6e, "
                "lower_bound=%.6e, violated=%s",
                r.mc_estimate, r.mc_stderr,
                static_cast<long long>(r.n_samples), r.closed_form,
                r.lower_bound, r.violated ? "yes" : "no");
  return buf;
}

double expected_variance_local_closed_form(const LocalHamiltonian& h,
                                           const StateVector& state) {
  state.validate();
  const LocalApplier scaled(h.shape, scaled_terms(h));
  VecC bpsi = VecC::Zero(state.amp.size());
  scaled.apply(state.amp, bpsi);
  const double m1 = state.amp.dot(bpsi).real();
  double total = bpsi.squaredNorm() - m1 * m1;
  for (const auto& p : h.terms)
    total += term_correction(p, partial_trace_to_support(state, p.support));
  return total;
}

double expected_variance_local_closed_form(const LocalHamiltonian& h,
                                           const MatC& rho) {
  if (rho.rows() != h.shape.total_dim || rho.cols() != h.shape.total_dim)
    throw ValidationError("expected_variance_local_closed_form: bad density matrix");
  MatC b = MatC::Zero(rho.rows(), rho.cols());
  for (const auto& op : scaled_terms(h))
    b += embed<cplx>(op.mat, op.support, h.shape).mat;
  const double m1 = (rho * b).trace().real();
  double total = (rho * b * b).trace().real() - m1 * m1;
  for (const auto& p : h.terms)
    total += term_correction(p, reduce_density(rho, h.shape, p.support));
  return total;
}

VarianceReport theorem1_bound_check(const LocalHamiltonian& h,
                                    const StateVector& state,
                                    std::int64_t n_samples, RngStream& rng) {
  if (n_samples < 100)
    throw ValidationError("theorem1_bound_check: need at least 100 samples");
  state.validate();

  VarianceReport rep;
  rep.n_samples = n_samples;
  rep.closed_form = expected_variance_local_closed_form(h, state);

  const LocalApplier scaled(h.shape, scaled_terms(h));
  VecC bpsi = VecC::Zero(state.amp.size());
  scaled.apply(state.amp, bpsi);
  const double bm1 = state.amp.dot(bpsi).real();
  const double var_b = bpsi.squaredNorm() - bm1 * bm1;

  double max_d = 1.0, proj_energy = 0.0;
  const LocalApplier applier = h.applier();
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    max_d = std::max(max_d, static_cast<double>(h.terms[i].rank));
    VecC tmp = VecC::Zero(state.amp.size());
    apply_local(h.terms[i].mat, applier.plan(i), state.amp, tmp);
    proj_energy += state.amp.dot(tmp).real();
  }
  rep.lower_bound = var_b + proj_energy / max_d;

  const VecC hpsi = applier.apply(state.amp);
  MomentAccum acc;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const LocalAlteration alt = sample_local_alteration(h, rng);
    VecC v = hpsi;
    for (std::size_t i = 0; i < alt.phis.size(); ++i)
      apply_local(alt.phis[i].mat, applier.plan(i), state.amp, v);
    const double m1 = state.amp.dot(v).real();
    acc.add(v.squaredNorm() - m1 * m1);
  }
  rep.mc_estimate = acc.mean();
  rep.mc_stderr = acc.stderr_of_mean();
  rep.violated = rep.mc_estimate < rep.lower_bound - 3.0 * rep.mc_stderr;
  return rep;
}

namespace {

struct SparseSums {
  double tr_h = 0.0, tr_h2 = 0.0;
  double quad = 0.0;  // sum |a|^2 E^2/t
  VecC s;             // S_a = sum_b T_ab a_b^2 E_b/t_b
  VecR r;             // R_a = sum_b T_ab |a_b|^2 E_b/t_b
  VecR q;             // Q_a = sum_b T_ab E_b/t_b
};

SparseSums sparse_sums(const DiagonalLandscape& base,
                       const SparsityPattern& pattern, const VecC& a) {
  const std::int64_t dim = base.dim();
  if (a.size() != dim || pattern.dim != dim)
    throw ValidationError("sparse moments: dimension mismatch");
  SparseSums out;
  out.s = VecC::Zero(dim);
  out.r = VecR::Zero(dim);
  out.q = VecR::Zero(dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const double e = base.e[static_cast<std::size_t>(b)];
    if (e < 0.0) throw ValidationError("sparse moments: negative base energy");
    const double w = std::norm(a[b]);
    out.tr_h += w * e;
    out.tr_h2 += w * e * e;
    if (e == 0.0) continue;
    const auto rows = pattern_columns(pattern, b);
    const double t = static_cast<double>(rows.size());
    out.quad += w * e * e / t;
    const cplx sa = a[b] * a[b] * (e / t);
    const double ra = w * e / t;
    const double qa = e / t;
    for (auto row : rows) {
      out.s[row] += sa;
      out.r[row] += ra;
      out.q[row] += qa;
    }
  }
  return out;
}

}  // namespace

std::pair<double, double> sparse_moment_closed_forms(
    const DiagonalLandscape& base, const SparsityPattern& pattern,
    const StateVector& state) {
  state.validate();
  const SparseSums s = sparse_sums(base, pattern, state.amp);
  // Wick pairings of the quartic coupling term: per row, 2 R_a^2 + |S_a|^2
  // (one R_a^2 is absorbed by the cross-row sum, leaving r.r + s.s here).
  const double m1sq =
      4.0 * s.tr_h * s.tr_h + s.r.squaredNorm() + s.s.squaredNorm();
  const double m2 = 4.0 * s.tr_h2 + s.quad + s.r.dot(s.q);
  return {m1sq, m2};
}

VarianceReport theorem2_bound_check(const DiagonalLandscape& base,
                                    const SparsityPattern& pattern,
                                    const StateVector& state,
                                    std::int64_t n_samples, RngStream& rng) {
  if (n_samples < 100)
    throw ValidationError("theorem2_bound_check: need at least 100 samples");
  state.validate();

  VarianceReport rep;
  rep.n_samples = n_samples;
  const SparseSums sums = sparse_sums(base, pattern, state.amp);
  const double m1sq = 4.0 * sums.tr_h * sums.tr_h + sums.r.squaredNorm() +
                      sums.s.squaredNorm();
  const double m2 = 4.0 * sums.tr_h2 + sums.quad + sums.r.dot(sums.q);
  rep.closed_form = m2 - m1sq;
  rep.lower_bound = sums.r.dot(sums.q - sums.r);

  const std::int64_t dim = base.dim();
  VecR energies(dim);
  for (std::int64_t b = 0; b < dim; ++b) energies[b] = base.e[static_cast<std::size_t>(b)];
  MomentAccum acc;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const SparseAlteration alt = sample_sparse_alteration(energies, pattern, rng);
    VecC v = state.amp.cwiseProduct(energies.cast<cplx>());
    v += alt.apply_w_adjoint(alt.apply_w(state.amp));
    const double m1 = state.amp.dot(v).real();
    acc.add(v.squaredNorm() - m1 * m1);
  }
  rep.mc_estimate = acc.mean();
  rep.mc_stderr = acc.stderr_of_mean();
  rep.violated = rep.mc_estimate < rep.lower_bound - 3.0 * rep.mc_stderr;
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("loglog_slope: need matching arrays of length >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw ValidationError("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qalt
