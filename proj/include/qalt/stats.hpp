#pragma once

#include "qalt/qop.hpp"
#include "qalt/types.hpp"

namespace qalt {

/// Lowest-quartile energy of a weight distribution over ascending energies:
/// degenerate energies are grouped into levels, and the result is the lowest
/// level whose strictly-above mass is < 3/4 (equivalently, the level at which
/// cumulative mass from the bottom first exceeds 1/4). Always an element of
/// the energy multiset.
double quartile(const VecR& weights, const VecR& energies_ascending);

double quartile(const StateVector& state, const EigenSystem<double>& es);
double quartile(const StateVector& state, const EigenSystem<cplx>& es);
double quartile(const ClassicalMixture& mix, const EigenSystem<double>& es);
double quartile(const ClassicalMixture& mix, const EigenSystem<cplx>& es);

double mean_energy(const VecR& weights, const VecR& energies);
double mean_energy(const StateVector& state, const HermitianOp<cplx>& op);
double mean_energy(const StateVector& state, const LocalApplier& applier,
                   double offset = 0.0);

double variance(const VecR& weights, const VecR& energies);
double variance(const StateVector& state, const HermitianOp<cplx>& op);
double variance(const StateVector& state, const LocalApplier& applier);

struct SpectralProfileRow {
  std::int64_t eigen_index = 0;
  double base_energy = 0.0;
  double mean_energy = 0.0;
  double quartile_energy = 0.0;
};

/// For every stride-th eigenvector of `source` (ascending), its mean and
/// quartile energy measured against `target`.
std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<double>& src,
                                                 const EigenSystem<double>& tgt,
                                                 std::int64_t stride);
std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<double>& src,
                                                 const EigenSystem<cplx>& tgt,
                                                 std::int64_t stride);
std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<cplx>& src,
                                                 const EigenSystem<cplx>& tgt,
                                                 std::int64_t stride);
std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<cplx>& src,
                                                 const EigenSystem<double>& tgt,
                                                 std::int64_t stride);

}  // namespace qalt
