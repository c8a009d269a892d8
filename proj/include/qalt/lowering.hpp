#pragma once

#include <vector>

#include "qalt/linalg.hpp"
#include "qalt/qop.hpp"
#include "qalt/rng.hpp"
#include "qalt/types.hpp"

namespace qalt {

/// Result of one best-of-K energy measurement (Algorithm 1).
struct MeasurementOutcome {
  std::int64_t chosen_index = 0;
  double chosen_energy = 0.0;
  std::vector<double> all_energies;  // K entries, in draw order
  int measurement_count = 0;
};

/// Measures `state` K times in the eigenbasis and keeps the lowest-energy
/// outcome (ties by lowest eigen-index); returns the collapsed eigenvector.
std::pair<StateVector, MeasurementOutcome> energy_measurement_step(
    const StateVector& state, const EigenSystem<double>& es, int k,
    RngStream& rng);
std::pair<StateVector, MeasurementOutcome> energy_measurement_step(
    const StateVector& state, const EigenSystem<cplx>& es, int k,
    RngStream& rng);

/// Exact-distribution counterpart: transports a mixture over `old_es` columns
/// into `new_es` and applies the min-of-K order statistic over energy levels
/// (level mass (c+p)^K - c^K with c the strictly-higher cumulative mass,
/// split within a level proportionally to the individual weights).
ClassicalMixture energy_measurement_distribution(const ClassicalMixture& mix,
                                                 const EigenSystem<double>& old_es,
                                                 const EigenSystem<double>& new_es,
                                                 int k);
ClassicalMixture energy_measurement_distribution(const ClassicalMixture& mix,
                                                 const EigenSystem<cplx>& old_es,
                                                 const EigenSystem<cplx>& new_es,
                                                 int k);

/// The min-of-K order statistic alone: weights over ascending energies in,
/// post-selection weights out.
VecR min_of_k_weights(const VecR& w, const VecR& energies_ascending, int k);

/// One signed generator term of a variational step.
struct GeneratorTerm {
  double coeff = 0.0;  // +1 or -1 after sign selection
  LocalOperator op;
};

/// Record of one variational update (Algorithm 2).
struct VariationalStep {
  std::vector<int> mus;  // sign per retained basis term
  double theta = 0.0;
  std::vector<GeneratorTerm> generator_terms;
  double energy_before = 0.0;
  double energy_after = 0.0;
};

/// Angle selection for variational_update.
struct ThetaMode {
  enum Kind { kFixed, kLineSearch } kind = kLineSearch;
  double theta = 0.0;              // fixed mode; |theta| < 1
  std::vector<double> grid;        // line-search mode; empty = default grid

  static ThetaMode fixed(double t);
  static ThetaMode line_search(std::vector<double> grid = {});
};

/// Default line-search grid: 16 geometric points in [1e-3, 0.5]; the search
/// itself always includes theta = 0.
std::vector<double> default_theta_grid();

/// Fixed-angle prescription theta = c * sum|g_i| / m over the retained terms.
double prescribed_theta(const std::vector<double>& g, double c);

/// g_i = 2 Im <psi| P_i H |psi> = d/dtheta <psi| e^{-i theta P_i} H
/// e^{i theta P_i} |psi> at theta = 0, for each basis term.
std::vector<double> variational_gradient(const StateVector& state,
                                         const HermitianOp<cplx>& h,
                                         const std::vector<LocalOperator>& basis_terms);
std::vector<double> variational_gradient(const StateVector& state,
                                         const LocalApplier& h,
                                         const std::vector<LocalOperator>& basis_terms);

/// Applies e^{i G theta} with G = sum mu_i P_i over terms with |g_i| > 1e-12,
/// mu_i chosen so the first-order energy change is negative; line-search mode
/// keeps the best grid angle (0 included, so energy never increases).
std::pair<StateVector, VariationalStep> variational_update(
    const StateVector& state, const HermitianOp<cplx>& h,
    const std::vector<LocalOperator>& basis_terms, const ThetaMode& mode);
std::pair<StateVector, VariationalStep> variational_update(
    const StateVector& state, const LocalApplier& h, double h_offset,
    const std::vector<LocalOperator>& basis_terms, const ThetaMode& mode);

/// Non-identity single-site basis terms (one LocalOperator per site and basis
/// element) — the generator pool used by the variational schedules.
std::vector<LocalOperator> single_site_basis_terms(const RegisterShape& shape);

}  // namespace qalt
