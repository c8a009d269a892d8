#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qalt/altered.hpp"
#include "qalt/models.hpp"
#include "qalt/rng.hpp"

namespace qalt {

/// Closed-form vs Monte Carlo expected-variance comparison, with the
/// applicable lower bound.
struct VarianceReport {
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  double closed_form = 0.0;
  double lower_bound = 0.0;
  std::int64_t n_samples = 0;
  bool violated = false;  // mc_estimate < lower_bound - 3 * mc_stderr
};

std::string summarize(const VarianceReport& r);

/// Exact expected variance of the locally altered family over the alteration
/// draw: Var_psi(sum (1+1/d_i) Pi_i) plus the per-term correction
/// ((d_i-1)/d_i^2) Tr(Pi_i psi_i) - Tr((Pi_i psi_i Pi_i)^2)/(d_i(d_i+1))
/// + Tr(Pi_i psi_i)^2/(d_i^2 (d_i+1)), with psi_i the reduced state on the
/// term's support and d_i the term rank.
double expected_variance_local_closed_form(const LocalHamiltonian& h,
                                           const StateVector& state);
/// Density-matrix variant (rho in the full register basis).
double expected_variance_local_closed_form(const LocalHamiltonian& h,
                                           const MatC& rho);

/// Monte Carlo expected variance over fresh alteration draws, against the
/// closed form and the lower bound Var_psi(sum (1+1/d_i) Pi_i)
/// + (1/max_i d_i) * sum_i Tr(Pi_i psi) (projector-sum energy; any constant
/// offset in `h` is excluded).
VarianceReport theorem1_bound_check(const LocalHamiltonian& h,
                                    const StateVector& state,
                                    std::int64_t n_samples, RngStream& rng);

/// First and second moments of the sparse altered family over the coupling
/// draw: (E Tr(psi H)^2, E Tr(psi H^2)); expected variance = m2 - m1sq.
std::pair<double, double> sparse_moment_closed_forms(
    const DiagonalLandscape& base, const SparsityPattern& pattern,
    const StateVector& state);

/// Monte Carlo variance of the sparse family vs the closed-form difference;
/// lower_bound is the explicit intermediate inequality
/// sum_{b,b''} |a_b|^2 (1-|a_b''|^2) (E_b E_b''/t_b t_b'') sum_a T_ab T_ab''.
VarianceReport theorem2_bound_check(const DiagonalLandscape& base,
                                    const SparsityPattern& pattern,
                                    const StateVector& state,
                                    std::int64_t n_samples, RngStream& rng);

/// Least-squares slope of log(y) against log(x); x, y must be positive.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qalt
