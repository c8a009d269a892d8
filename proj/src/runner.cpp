#include "qalt/runner.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qalt/linalg.hpp"
#include "qalt/stats.hpp"
#include "qalt/theory.hpp"

namespace qalt {
namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

// ---- CSV ------------------------------------------------------------------

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::int64_t x) { return std::to_string(x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const fs::path& p) const {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << csv_field(cells[i]);
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

CsvTable trace_table(const RunTrace& t) {
  CsvTable c;
  c.header = {"iteration",   "energy_base",          "energy_current",
              "quartile_current", "k_i",             "theta",
              "measurements_logical", "h_sample_id"};
  for (const auto& r : t.rows)
    c.rows.push_back({fmt(static_cast<std::int64_t>(r.iteration)),
                      fmt(r.energy_base), fmt(r.energy_current),
                      fmt(r.quartile_current), fmt(r.k_i), fmt(r.theta),
                      fmt(r.measurements_logical), fmt(r.h_sample_id)});
  return c;
}

CsvTable profile_table(const std::vector<SpectralProfileRow>& rows) {
  CsvTable c;
  c.header = {"eigen_index", "source_energy", "mean_energy",
              "quartile_energy"};
  for (const auto& r : rows)
    c.rows.push_back({fmt(r.eigen_index), fmt(r.base_energy),
                      fmt(r.mean_energy), fmt(r.quartile_energy)});
  return c;
}

// ---- per-repetition instances ----------------------------------------------

struct Instance {
  std::optional<LocalHamiltonian> local;
  std::optional<DiagonalLandscape> landscape;
  std::optional<Graph> graph;
  RegisterShape shape;
};

Instance build_instance(const ModelSpec& m, RngStream& rng) {
  Instance out;
  switch (m.kind) {
    case ModelKind::maxcut:
    case ModelKind::qmc: {
      Graph g = m.graph == GraphKind::path
                    ? path_graph(m.n)
                    : random_regular_graph(m.n, m.degree, rng);
      out.local = m.kind == ModelKind::maxcut
                      ? maxcut_hamiltonian(g)
                      : qmc_hamiltonian(g, m.form);
      out.graph = std::move(g);
      break;
    }
    case ModelKind::aklt:
      out.local = aklt_hamiltonian(m.n, false, m.dim_cap);
      break;
    case ModelKind::well:
      out.landscape = well_landscape(m.n, m.anchors, m.multiplier, rng);
      break;
    case ModelKind::grover:
      out.landscape = grover_landscape(m.n, m.marked);
      break;
    case ModelKind::linear:
      out.landscape = linear_landscape(m.n, m.e_max);
      break;
  }
  out.shape = out.local ? out.local->shape
                        : RegisterShape::qubits(
                              out.landscape->n_bits);
  return out;
}

/// A diagonal view of the instance (landscape models and diagonal local
/// Hamiltonians such as Max-Cut).
DiagonalLandscape as_landscape(const Instance& inst) {
  if (inst.landscape) return *inst.landscape;
  if (!inst.local->is_diagonal())
    throw ValidationError("model.kind: " + inst.local->label +
                          " has no diagonal basis for this run");
  for (int d : inst.shape.dims)
    if (d != 2)
      throw ValidationError("model.kind: sparse patterns need a qubit "
                            "register");
  DiagonalLandscape l;
  l.n_bits = inst.shape.n_sites();
  l.e = inst.local->diagonal();
  l.label = inst.local->label;
  return l;
}

StateVector build_initial(const InitialStateSpec& s,
                          const RegisterShape& shape, RngStream& rng) {
  switch (s.kind) {
    case InitialKind::plus:
      return uniform_product_state(shape);
    case InitialKind::haar:
      return haar_state(shape, rng);
    case InitialKind::basis: {
      if (static_cast<int>(s.digits.size()) != shape.n_sites())
        throw ConfigError("initial.digits: expected " +
                          std::to_string(shape.n_sites()) + " digits, got " +
                          std::to_string(s.digits.size()));
      std::int64_t flat = 0;
      for (int i = 0; i < shape.n_sites(); ++i) {
        const char c = s.digits[static_cast<std::size_t>(i)];
        if (c < '0' || c > '9')
          throw ConfigError("initial.digits: non-digit character");
        const int v = c - '0';
        if (v >= shape.dims[static_cast<std::size_t>(i)])
          throw ConfigError("initial.digits: digit " + std::to_string(v) +
                            " out of range for site " + std::to_string(i));
        flat = flat * shape.dims[static_cast<std::size_t>(i)] + v;
      }
      return basis_state(shape, flat);
    }
    case InitialKind::file: {
      std::ifstream in(s.path);
      if (!in) throw ConfigError("initial.path: cannot read " + s.path);
      VecC amp = VecC::Zero(shape.total_dim);
      for (std::int64_t i = 0; i < shape.total_dim; ++i) {
        double re = 0, im = 0;
        if (!(in >> re >> im))
          throw ConfigError("initial.path: expected " +
                            std::to_string(shape.total_dim) +
                            " \"re im\" amplitude pairs");
        amp[i] = cplx(re, im);
      }
      const double nrm = amp.norm();
      if (nrm < 1e-12)
        throw ConfigError("initial.path: amplitudes are all zero");
      return StateVector{shape, amp / nrm};
    }
  }
  throw ConfigError("initial.kind: unhandled");  // unreachable
}

std::string family_tag(const FamilySpec& f) {
  switch (f.kind) {
    case FamilyKind::local: return "local";
    case FamilyKind::sparse_band: return "band";
    case FamilyKind::sparse_hamming: return "hamming";
  }
  return "?";
}

std::string schedule_tag(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::standard: return "standard";
    case ScheduleKind::hybrid: return "hybrid";
    case ScheduleKind::altered: return "altered";
  }
  return "?";
}

// ---- per-experiment runs ----------------------------------------------------

struct TaskOutput {
  std::vector<std::pair<std::string, CsvTable>> tables;  // name -> rows
  std::string summary;
  njson manifest = njson::object();
};

/// Eigensystem of the base operator, exploiting diagonal and real structure.
EigenSystem<double> base_eigensystem_real(const LocalHamiltonian& h) {
  if (h.is_diagonal()) {
    DiagonalLandscape l;
    l.n_bits = 0;  // landscape_eigensystem only reads energies
    l.e = h.diagonal();
    return landscape_eigensystem(l);
  }
  return spectral(h.assemble_real());
}

TaskOutput run_profile(const ExperimentConfig& cfg, const Instance& inst,
                       RngStream& dyn, int rep) {
  const FamilySpec fam = cfg.families[0];
  const bool src_altered = cfg.profile.source == ProfileBasis::altered;
  const bool tgt_altered = cfg.profile.target == ProfileBasis::altered;
  const bool any_altered = src_altered || tgt_altered;
  RngStream sampler = dyn.split(0);
  std::vector<SpectralProfileRow> rows;

  if (inst.local && (fam.kind == FamilyKind::local || !any_altered)) {
    // Local family: altered bases are complex in general. Sources are drawn
    // before targets. The altered operator omits any constant base offset;
    // energies are shifted back so everything sits in the base normalization.
    const LocalHamiltonian& h = *inst.local;
    auto sample_es = [&]() {
      const LocalAlteration a = sample_local_alteration(h, sampler);
      EigenSystem<cplx> es = spectral(assemble_altered(h, a));
      es.energy.array() += h.offset;
      return es;
    };
    if (src_altered) {
      const EigenSystem<cplx> src = sample_es();
      if (tgt_altered)
        rows = spectral_profile(src, sample_es(), cfg.profile.stride);
      else
        rows = spectral_profile(src, base_eigensystem_real(h),
                                cfg.profile.stride);
    } else {
      const EigenSystem<double> src = base_eigensystem_real(h);
      if (tgt_altered)
        rows = spectral_profile(src, sample_es(), cfg.profile.stride);
      else
        rows = spectral_profile(src, src, cfg.profile.stride);
    }
  } else {
    // Sparse family over a diagonal base: everything stays real.
    const DiagonalLandscape land = as_landscape(inst);
    const EigenSystem<double> base_es = landscape_eigensystem(land);
    const SparsityPattern pattern =
        fam.kind == FamilyKind::sparse_band
            ? band_pattern(fam.band_t, land.dim())
            : hamming_pattern(land.n_bits);
    const VecR shifted = land.e.array() - land.e.minCoeff();
    auto sample_es = [&]() {
      const SparseAlteration s =
          sample_sparse_alteration(shifted, pattern, sampler);
      return spectral(assemble_sparse_altered(land, s));
    };
    const EigenSystem<double> src = src_altered ? sample_es() : base_es;
    const EigenSystem<double> tgt = tgt_altered ? sample_es() : base_es;
    rows = spectral_profile(src, tgt, cfg.profile.stride);
  }

  TaskOutput out;
  std::ostringstream s;
  s << cfg.label << " rep" << rep << ": " << rows.size()
    << " profile rows (dim " << inst.shape.total_dim << ", stride "
    << cfg.profile.stride << ")";
  out.summary = s.str();
  out.manifest["rows"] = rows.size();
  out.tables.emplace_back("profile_rep" + std::to_string(rep) + ".csv",
                          profile_table(rows));
  return out;
}

TaskOutput run_altmin(const ExperimentConfig& cfg, const Instance& inst,
                      const StateVector& initial, RngStream& dyn, int rep,
                      int variant) {
  const FamilySpec fam = cfg.families[static_cast<std::size_t>(variant)];
  AltMinConfig acfg;
  acfg.l = cfg.altmin.l;
  acfg.k = cfg.altmin.k;
  acfg.family = fam.kind;
  acfg.band_t = fam.band_t;
  acfg.mode = cfg.altmin.mode;
  acfg.store_states = cfg.altmin.store_states;

  RunTrace trace;
  if (inst.local) {
    trace = altmin_measurement(*inst.local, acfg, initial, dyn);
  } else {
    trace = altmin_measurement(*inst.landscape, acfg, initial, dyn);
  }

  TaskOutput out;
  const std::string tag = family_tag(fam);
  std::ostringstream s;
  s << cfg.label << " rep" << rep << " " << tag << ": base energy "
    << fmt(trace.rows.back().energy_base) << " after " << acfg.l
    << " iterations (" << trace.physical_copy_count << " physical copies)";
  out.summary = s.str();
  out.manifest["family"] = tag;
  if (fam.kind == FamilyKind::sparse_band) out.manifest["t"] = fam.band_t;
  out.manifest["physical_copy_count"] = trace.physical_copy_count;
  out.manifest["final_energy_base"] = trace.rows.back().energy_base;
  out.tables.emplace_back(
      "trace_" + tag + "_rep" + std::to_string(rep) + ".csv",
      trace_table(trace));
  return out;
}

TaskOutput run_variational(const ExperimentConfig& cfg, const Instance& inst,
                           const StateVector& initial, RngStream& dyn,
                           int rep, int variant) {
  const ScheduleKind schedule =
      cfg.variational.schedules[static_cast<std::size_t>(variant)];
  const RunTrace trace =
      altmin_variational(*inst.local, schedule, cfg.variational.l, initial,
                         dyn, cfg.variational.theta);

  TaskOutput out;
  const std::string tag = schedule_tag(schedule);
  std::ostringstream s;
  s << cfg.label << " rep" << rep << " " << tag << ": base energy "
    << fmt(trace.rows.back().energy_base) << " after " << cfg.variational.l
    << " steps";
  out.summary = s.str();
  out.manifest["schedule"] = tag;
  out.manifest["final_energy_base"] = trace.rows.back().energy_base;
  out.tables.emplace_back(
      "trace_" + tag + "_rep" + std::to_string(rep) + ".csv",
      trace_table(trace));
  return out;
}

TaskOutput run_anneal(const ExperimentConfig& cfg, const Instance& inst,
                      RngStream& dyn, int rep) {
  const DiagonalLandscape land = as_landscape(inst);
  std::vector<AnnealPoint> points;
  if (cfg.anneal.ensemble) {
    points = anneal_ensemble(land, cfg.anneal.cfg);
  } else {
    RngStream walker = dyn.split(1);
    points = anneal(land, cfg.anneal.cfg, walker);
  }

  CsvTable table;
  table.header = {"step", "energy_current", "energy_best"};
  for (const auto& p : points)
    table.rows.push_back({fmt(p.step), fmt(p.current), fmt(p.best)});

  TaskOutput out;
  std::ostringstream s;
  s << cfg.label << " rep" << rep << ": best energy "
    << fmt(points.back().best) << " after " << cfg.anneal.cfg.steps
    << " steps (" << (cfg.anneal.ensemble ? "ensemble" : "walker") << ")";
  out.summary = s.str();
  out.manifest["best_energy"] = points.back().best;
  out.tables.emplace_back("anneal_rep" + std::to_string(rep) + ".csv",
                          std::move(table));
  return out;
}

TaskOutput run_theory(const ExperimentConfig& cfg, const Instance& inst,
                      const StateVector& state, RngStream& dyn, int rep) {
  RngStream sampler = dyn.split(0);
  VarianceReport report;
  if (cfg.theory.theorem == 1) {
    report = theorem1_bound_check(*inst.local, state, cfg.theory.samples,
                                  sampler);
  } else {
    const DiagonalLandscape land = as_landscape(inst);
    const FamilySpec fam = cfg.families[0];
    const SparsityPattern pattern =
        fam.kind == FamilyKind::sparse_band
            ? band_pattern(fam.band_t, land.dim())
            : hamming_pattern(land.n_bits);
    report = theorem2_bound_check(land, pattern, state, cfg.theory.samples,
                                  sampler);
  }

  CsvTable table;
  table.header = {"mc_estimate", "mc_stderr", "closed_form", "lower_bound",
                  "n_samples", "violated"};
  table.rows.push_back({fmt(report.mc_estimate), fmt(report.mc_stderr),
                        fmt(report.closed_form), fmt(report.lower_bound),
                        fmt(report.n_samples),
                        report.violated ? "1" : "0"});

  TaskOutput out;
  out.summary = cfg.label + " rep" + std::to_string(rep) + ": " +
                summarize(report);
  out.manifest["mc_estimate"] = report.mc_estimate;
  out.manifest["closed_form"] = report.closed_form;
  out.tables.emplace_back("report_rep" + std::to_string(rep) + ".csv",
                          std::move(table));
  return out;
}

TaskOutput run_model_dump(const ExperimentConfig& cfg, const Instance& inst,
                          int rep) {
  CsvTable spectrum;
  TaskOutput out;
  if (inst.landscape) {
    // Natural basis order: the landscape profile as a function of the index.
    spectrum.header = {"index", "energy"};
    for (std::int64_t i = 0; i < inst.landscape->dim(); ++i)
      spectrum.rows.push_back({fmt(i), fmt(inst.landscape->e[i])});
    out.manifest["ground_energy"] = inst.landscape->e.minCoeff();
  } else {
    spectrum.header = {"rank", "energy"};
    const EigenSystem<double> es = base_eigensystem_real(*inst.local);
    VecR e = es.energy;
    if (inst.local->offset != 0.0) e.array() += inst.local->offset;
    for (std::int64_t i = 0; i < e.size(); ++i)
      spectrum.rows.push_back({fmt(i), fmt(e[i])});
    out.manifest["ground_energy"] = e[0];
  }
  const std::int64_t levels =
      static_cast<std::int64_t>(spectrum.rows.size());
  out.tables.emplace_back("spectrum_rep" + std::to_string(rep) + ".csv",
                          std::move(spectrum));
  if (inst.graph) {
    CsvTable edges;
    edges.header = {"u", "v"};
    for (const auto& [u, v] : inst.graph->edges)
      edges.rows.push_back({fmt(static_cast<std::int64_t>(u)),
                            fmt(static_cast<std::int64_t>(v))});
    out.manifest["edges"] = inst.graph->edges.size();
    out.tables.emplace_back("graph_rep" + std::to_string(rep) + ".csv",
                            std::move(edges));
  }
  std::ostringstream s;
  s << cfg.label << " rep" << rep << ": " << levels << " levels, ground energy "
    << fmt(out.manifest["ground_energy"].get<double>());
  out.summary = s.str();
  return out;
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg, int workers) {
  // Run layout: task (rep, variant) where variants enumerate altmin families
  // or variational schedules. RNG lanes per repetition stream
  // RngStream(seed).split(rep): 2 = model instance, 3 = initial state,
  // 4 + variant = run dynamics (the driver derives its own sub-lanes).
  int variants = 1;
  if (cfg.experiment == ExperimentKind::altmin)
    variants = static_cast<int>(cfg.families.size());
  if (cfg.experiment == ExperimentKind::variational)
    variants = static_cast<int>(cfg.variational.schedules.size());
  const int tasks = cfg.repetitions * variants;

  std::vector<TaskOutput> outputs(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));

  auto run_task = [&](int id) {
    const int rep = id / variants;
    const int variant = id % variants;
    const RngStream rep_rng =
        RngStream(cfg.seed).split(static_cast<std::uint64_t>(rep));
    RngStream model_rng = rep_rng.split(2);
    RngStream init_rng = rep_rng.split(3);
    RngStream dyn_rng = rep_rng.split(4 + static_cast<std::uint64_t>(variant));

    const Instance inst = build_instance(cfg.model, model_rng);
    switch (cfg.experiment) {
      case ExperimentKind::profile:
        outputs[static_cast<std::size_t>(id)] =
            run_profile(cfg, inst, dyn_rng, rep);
        break;
      case ExperimentKind::altmin: {
        const StateVector initial =
            build_initial(cfg.initial, inst.shape, init_rng);
        outputs[static_cast<std::size_t>(id)] =
            run_altmin(cfg, inst, initial, dyn_rng, rep, variant);
        break;
      }
      case ExperimentKind::variational: {
        const StateVector initial =
            build_initial(cfg.initial, inst.shape, init_rng);
        outputs[static_cast<std::size_t>(id)] =
            run_variational(cfg, inst, initial, dyn_rng, rep, variant);
        break;
      }
      case ExperimentKind::anneal:
        outputs[static_cast<std::size_t>(id)] =
            run_anneal(cfg, inst, dyn_rng, rep);
        break;
      case ExperimentKind::theory_check: {
        const StateVector state =
            build_initial(cfg.initial, inst.shape, init_rng);
        outputs[static_cast<std::size_t>(id)] =
            run_theory(cfg, inst, state, dyn_rng, rep);
        break;
      }
      case ExperimentKind::model_dump:
        outputs[static_cast<std::size_t>(id)] = run_model_dump(cfg, inst, rep);
        break;
    }
  };

  const int pool = std::max(1, std::min(workers, tasks));
  if (pool == 1) {
    for (int id = 0; id < tasks; ++id) run_task(id);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pool));
    for (int w = 0; w < pool; ++w)
      threads.emplace_back([&]() {
        for (;;) {
          const int id = next.fetch_add(1);
          if (id >= tasks) return;
          try {
            run_task(id);
          } catch (...) {
            errors[static_cast<std::size_t>(id)] = std::current_exception();
          }
        }
      });
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // All runs succeeded; only now touch the filesystem.
  RunArtifacts art;
  const fs::path dir = fs::path(cfg.out_dir) / cfg.label;
  fs::create_directories(dir);
  art.run_dir = dir.string();

  njson manifest;
  manifest["config"] = njson::parse(dump_config(cfg));
  manifest["master_seed"] = cfg.seed;
  if (cfg.experiment == ExperimentKind::altmin)
    manifest["physical_copy_count"] =
        physical_copies(cfg.altmin.l, cfg.altmin.k);
  manifest["rng_lanes"] = {{"model", 2}, {"initial", 3}, {"dynamics_base", 4}};
  njson runs = njson::array();
  for (int id = 0; id < tasks; ++id) {
    TaskOutput& o = outputs[static_cast<std::size_t>(id)];
    njson entry = std::move(o.manifest);
    entry["rep"] = id / variants;
    entry["variant"] = id % variants;
    njson files = njson::array();
    for (auto& [name, table] : o.tables) {
      table.write(dir / name);
      art.csv_paths.push_back((dir / name).string());
      files.push_back(name);
    }
    entry["files"] = std::move(files);
    entry["summary"] = o.summary;
    runs.push_back(std::move(entry));
    art.summaries.push_back(o.summary);
  }
  manifest["runs"] = std::move(runs);

  const fs::path mpath = dir / "manifest.json";
  std::ofstream mout(mpath, std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write " + mpath.string());
  mout << manifest.dump(2) << '\n';
  art.manifest_path = mpath.string();
  return art;
}

}  // namespace qalt
