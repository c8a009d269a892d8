#include "qalt/stats.hpp"

#include "qalt/linalg.hpp"

#include <cmath>

namespace qalt {

namespace {

constexpr double kLevelTol = 1e-9;    // adjacent energies closer than this merge
constexpr double kMassTol = 1e-12;    // tie-break slack at the 1/4 boundary

double quartile_impl(const VecR& w, const VecR& e) {
  if (w.size() != e.size() || w.size() == 0)
    throw ValidationError("quartile: weight/energy size mismatch");
  const double total = w.sum();
  if (total <= 0.0) throw ValidationError("quartile: non-positive total mass");
  double cum = 0.0;
  std::int64_t i = 0;
  while (i < e.size()) {
    const double level = e[i];
    double mass = 0.0;
    std::int64_t j = i;
    while (j < e.size() && e[j] - level <= kLevelTol) mass += w[j++];
    cum += mass;
    if (cum > total * (0.25 + kMassTol)) return level;
    i = j;
  }
  return e[e.size() - 1];
}

template <typename S>
VecR state_weights(const StateVector& state, const EigenSystem<S>& es) {
  if (state.amp.size() != es.dim())
    throw ValidationError("quartile: state/eigensystem dimension mismatch");
  return decompose_weights(es, state.amp);
}

// Mixture weights index the eigencolumns of `es` (ascending-energy order),
// matching the propagate_weights / min_of_k_weights convention.
template <typename S>
double mix_quartile(const ClassicalMixture& mix, const EigenSystem<S>& es) {
  if (mix.w.size() != es.dim())
    throw ValidationError("quartile: mixture/eigensystem dimension mismatch");
  return quartile_impl(mix.w, es.energy);
}

}  // namespace

double quartile(const VecR& weights, const VecR& energies_ascending) {
  return quartile_impl(weights, energies_ascending);
}

double quartile(const StateVector& state, const EigenSystem<double>& es) {
  return quartile_impl(state_weights(state, es), es.energy);
}

double quartile(const StateVector& state, const EigenSystem<cplx>& es) {
  return quartile_impl(state_weights(state, es), es.energy);
}

double quartile(const ClassicalMixture& mix, const EigenSystem<double>& es) {
  return mix_quartile(mix, es);
}

double quartile(const ClassicalMixture& mix, const EigenSystem<cplx>& es) {
  return mix_quartile(mix, es);
}

double mean_energy(const VecR& weights, const VecR& energies) {
  if (weights.size() != energies.size())
    throw ValidationError("mean_energy: size mismatch");
  return weights.dot(energies);
}

double mean_energy(const StateVector& state, const HermitianOp<cplx>& op) {
  const cplx v = state.amp.dot(op.mat * state.amp);
  return v.real();
}

double mean_energy(const StateVector& state, const LocalApplier& applier,
                   double offset) {
  VecC out = VecC::Zero(state.amp.size());
  applier.apply(state.amp, out);
  return state.amp.dot(out).real() + offset;
}

double variance(const VecR& weights, const VecR& energies) {
  const double m1 = mean_energy(weights, energies);
  const double m2 = weights.dot(energies.cwiseAbs2());
  return m2 - m1 * m1;
}

double variance(const StateVector& state, const HermitianOp<cplx>& op) {
  const VecC hpsi = op.mat * state.amp;
  const double m1 = state.amp.dot(hpsi).real();
  return hpsi.squaredNorm() - m1 * m1;
}

double variance(const StateVector& state, const LocalApplier& applier) {
  VecC hpsi = VecC::Zero(state.amp.size());
  applier.apply(state.amp, hpsi);
  const double m1 = state.amp.dot(hpsi).real();
  return hpsi.squaredNorm() - m1 * m1;
}

namespace {

template <typename Ss, typename St>
std::vector<SpectralProfileRow> profile_impl(const EigenSystem<Ss>& src,
                                             const EigenSystem<St>& tgt,
                                             std::int64_t stride) {
  if (src.dim() != tgt.dim())
    throw ValidationError("spectral_profile: dimension mismatch");
  if (stride <= 0) throw ValidationError("spectral_profile: stride must be positive");
  std::vector<SpectralProfileRow> rows;
  VecC psi(src.dim());
  for (std::int64_t idx = 0; idx < src.dim(); idx += stride) {
    if (src.is_permutation()) {
      psi.setZero();
      psi[src.perm[idx]] = 1.0;
    } else {
      psi = src.basis.col(idx).template cast<cplx>();
    }
    const VecR w = decompose_weights(tgt, psi);
    SpectralProfileRow row;
    row.eigen_index = idx;
    row.base_energy = src.energy[idx];
    row.mean_energy = w.dot(tgt.energy);
    row.quartile_energy = quartile(w, tgt.energy);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<double>& src,
                                                 const EigenSystem<double>& tgt,
                                                 std::int64_t stride) {
  return profile_impl(src, tgt, stride);
}

std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<double>& src,
                                                 const EigenSystem<cplx>& tgt,
                                                 std::int64_t stride) {
  return profile_impl(src, tgt, stride);
}

std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<cplx>& src,
                                                 const EigenSystem<cplx>& tgt,
                                                 std::int64_t stride) {
  return profile_impl(src, tgt, stride);
}

std::vector<SpectralProfileRow> spectral_profile(const EigenSystem<cplx>& src,
                                                 const EigenSystem<double>& tgt,
                                                 std::int64_t stride) {
  return profile_impl(src, tgt, stride);
}

}  // namespace qalt
