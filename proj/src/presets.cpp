#include "qalt/config.hpp"

namespace qalt {
namespace {

ExperimentConfig base(ExperimentKind kind, const std::string& label) {
  ExperimentConfig c;
  c.experiment = kind;
  c.label = label;
  return c;
}

ExperimentConfig profile_preset(const std::string& label, ModelSpec model,
                                FamilySpec family, ProfileBasis source) {
  ExperimentConfig c = base(ExperimentKind::profile, label);
  c.model = std::move(model);
  c.families = {family};
  c.profile.source = source;
  c.profile.target = ProfileBasis::altered;
  c.profile.stride = 50;
  return c;
}

ModelSpec qmc12() {
  ModelSpec m;
  m.kind = ModelKind::qmc;
  m.n = 12;
  m.degree = 4;
  m.form = QmcForm::swap_half;
  return m;
}

ModelSpec aklt(int n) {
  ModelSpec m;
  m.kind = ModelKind::aklt;
  m.n = n;
  std::int64_t dim = 1;
  for (int i = 0; i < n; ++i) dim *= 3;
  if (dim > m.dim_cap) m.dim_cap = dim;  // matrix-free variational runs only
  return m;
}

ModelSpec maxcut(int n, int degree) {
  ModelSpec m;
  m.kind = ModelKind::maxcut;
  m.n = n;
  m.degree = degree;
  return m;
}

ModelSpec qmc10deg6() {
  ModelSpec m;
  m.kind = ModelKind::qmc;
  m.n = 10;
  m.degree = 6;
  m.form = QmcForm::swap_half;
  return m;
}

ModelSpec well(int anchors, double multiplier) {
  ModelSpec m;
  m.kind = ModelKind::well;
  m.n = 12;
  m.anchors = anchors;
  m.multiplier = multiplier;
  return m;
}

FamilySpec local_family() { return FamilySpec{FamilyKind::local, 8}; }
FamilySpec hamming_family() { return FamilySpec{FamilyKind::sparse_hamming, 8}; }
FamilySpec band_family(int t) { return FamilySpec{FamilyKind::sparse_band, t}; }

ExperimentConfig variational_preset(const std::string& label, ModelSpec model,
                                    InitialKind start) {
  ExperimentConfig c = base(ExperimentKind::variational, label);
  c.model = std::move(model);
  c.initial.kind = start;
  c.variational.l = 100;
  return c;
}

}  // namespace

ExperimentConfig preset(const std::string& name, bool full) {
  // Profiles: mean/quartile energy of every 50th source eigenvector against
  // a freshly sampled altered target basis.
  if (name == "fig1a") return profile_preset(name, qmc12(), local_family(),
                                             ProfileBasis::base);
  if (name == "fig1b") return profile_preset(name, qmc12(), local_family(),
                                             ProfileBasis::altered);
  if (name == "fig2a") return profile_preset(name, aklt(8), local_family(),
                                             ProfileBasis::base);
  if (name == "fig2b") return profile_preset(name, aklt(8), local_family(),
                                             ProfileBasis::altered);
  if (name == "fig3a") return profile_preset(name, maxcut(12, 4),
                                             local_family(),
                                             ProfileBasis::base);
  if (name == "fig3b") return profile_preset(name, maxcut(12, 4),
                                             local_family(),
                                             ProfileBasis::altered);
  if (name == "fig4a") return profile_preset(name, maxcut(12, 4),
                                             hamming_family(),
                                             ProfileBasis::base);
  if (name == "fig4b") return profile_preset(name, maxcut(12, 4),
                                             band_family(8),
                                             ProfileBasis::base);

  // Energy-well landscape: measurement-driven descent, the annealing
  // baseline, and the barrier-free variant.
  if (name == "fig5a") {
    ExperimentConfig c = base(ExperimentKind::altmin, name);
    c.model = well(10, 2.0);
    c.families = {hamming_family()};
    c.altmin = {8, 3, RunMode::exact_distribution, false};
    return c;
  }
  if (name == "fig5b") {
    ExperimentConfig c = base(ExperimentKind::anneal, name);
    c.model = well(10, 2.0);
    c.anneal.cfg = {50000, 0.1, 50.0, AnnealSchedule::linear};
    c.anneal.ensemble = true;
    return c;
  }
  if (name == "fig5c") {
    ExperimentConfig c = base(ExperimentKind::model_dump, name);
    c.model = well(0, 1.0);
    return c;
  }
  if (name == "fig5d") {
    ExperimentConfig c = base(ExperimentKind::altmin, name);
    c.model = well(0, 1.0);
    c.families = {band_family(8)};
    c.altmin = {4, 3, RunMode::exact_distribution, false};
    return c;
  }

  // Variational schedules (standard / hybrid / altered) on AKLT chains.
  if (name == "fig6a") return variational_preset(name, aklt(8),
                                                 InitialKind::plus);
  if (name == "fig6b") return variational_preset(name, aklt(10),
                                                 InitialKind::plus);

  // Max-Cut instance (the graph fig8a runs on) and its experiments.
  if (name == "fig7") {
    ExperimentConfig c = base(ExperimentKind::model_dump, name);
    c.model = maxcut(12, 4);
    return c;
  }
  if (name == "fig8a") {
    ExperimentConfig c = base(ExperimentKind::altmin, name);
    c.model = maxcut(12, 4);
    c.families = {local_family(), hamming_family(), band_family(8)};
    c.altmin = {5, 3, RunMode::trajectory, false};
    return c;
  }
  if (name == "fig8b") return variational_preset(name, maxcut(10, 6),
                                                 InitialKind::plus);

  // Quantum Max-Cut: measurement descent and the three start states.
  if (name == "fig9a") {
    ExperimentConfig c = base(ExperimentKind::altmin, name);
    ModelSpec m = qmc12();
    m.n = 11;
    c.model = m;
    c.families = {local_family()};
    c.altmin = {full ? 10 : 6, 3, RunMode::trajectory, false};
    return c;
  }
  if (name == "fig9b") return variational_preset(name, qmc10deg6(),
                                                 InitialKind::haar);
  if (name == "fig9c") return variational_preset(name, qmc10deg6(),
                                                 InitialKind::plus);

  throw ConfigError("preset: unknown name \"" + name + "\"");
}

std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a",
          "fig4b", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b",
          "fig7",  "fig8a", "fig8b", "fig9a", "fig9b", "fig9c"};
}

}  // namespace qalt
