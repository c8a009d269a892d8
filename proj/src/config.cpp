#include "qalt/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"

namespace qalt {
namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// ---- enum <-> string tables ----------------------------------------------

template <class E>
struct Name {
  E value;
  std::string_view name;
};

constexpr Name<ExperimentKind> kExperiments[] = {
    {ExperimentKind::profile, "profile"},
    {ExperimentKind::altmin, "altmin"},
    {ExperimentKind::variational, "variational"},
    {ExperimentKind::anneal, "anneal"},
    {ExperimentKind::theory_check, "theory-check"},
    {ExperimentKind::model_dump, "model-dump"},
    // accepted aliases (canonical spellings above come first for dumping)
    {ExperimentKind::theory_check, "theory_check"},
    {ExperimentKind::model_dump, "model_dump"},
};

constexpr Name<ModelKind> kModels[] = {
    {ModelKind::maxcut, "maxcut"}, {ModelKind::qmc, "qmc"},
    {ModelKind::aklt, "aklt"},     {ModelKind::well, "well"},
    {ModelKind::grover, "grover"}, {ModelKind::linear, "linear"},
};

constexpr Name<GraphKind> kGraphs[] = {
    {GraphKind::random_regular, "random_regular"},
    {GraphKind::path, "path"},
};

constexpr Name<QmcForm> kQmcForms[] = {
    {QmcForm::projector, "projector"},
    {QmcForm::swap_half, "swap_half"},
};

constexpr Name<FamilyKind> kFamilies[] = {
    {FamilyKind::local, "local"},
    {FamilyKind::sparse_band, "band"},
    {FamilyKind::sparse_hamming, "hamming"},
};

constexpr Name<InitialKind> kInitials[] = {
    {InitialKind::plus, "plus"},
    {InitialKind::haar, "haar"},
    {InitialKind::basis, "basis"},
    {InitialKind::file, "file"},
};

constexpr Name<ProfileBasis> kProfileBases[] = {
    {ProfileBasis::base, "base"},
    {ProfileBasis::altered, "altered"},
};

constexpr Name<RunMode> kRunModes[] = {
    {RunMode::trajectory, "trajectory"},
    {RunMode::exact_distribution, "exact_distribution"},
    {RunMode::exact_distribution, "exact"},
};

constexpr Name<ScheduleKind> kSchedules[] = {
    {ScheduleKind::standard, "standard"},
    {ScheduleKind::hybrid, "hybrid"},
    {ScheduleKind::altered, "altered"},
};

constexpr Name<AnnealSchedule> kAnnealSchedules[] = {
    {AnnealSchedule::linear, "linear"},
    {AnnealSchedule::geometric, "geometric"},
};

template <class E, std::size_t N>
E parse_enum(const Name<E> (&table)[N], const std::string& text,
             const std::string& path) {
  for (const auto& e : table)
    if (e.name == text) return e.value;
  std::string options;
  std::string_view last;
  for (const auto& e : table) {
    bool dup = false;
    for (const auto& f : table)
      if (f.name != e.name && f.value == e.value && &f < &e) dup = true;
    if (dup) continue;
    if (!options.empty()) options += " | ";
    options += e.name;
    last = e.name;
  }
  fail(path, "unknown value \"" + text + "\" (expected " + options + ")");
}

template <class E, std::size_t N>
std::string_view enum_name(const Name<E> (&table)[N], E value) {
  for (const auto& e : table)
    if (e.value == value) return e.name;
  return "?";
}

// ---- typed accessors ------------------------------------------------------

void expect_object(const njson& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const njson& j, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  expect_object(j, path);
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed)
      if (a == item.key()) ok = true;
    if (!ok) fail(path + "." + item.key(), "unknown key");
  }
}

std::string get_string(const njson& o, const std::string& path,
                       const char* key, const std::string& fallback,
                       bool required = false) {
  if (!o.contains(key)) {
    if (required) fail(path + "." + key, "missing required key");
    return fallback;
  }
  const njson& v = o.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::int64_t get_int(const njson& o, const std::string& path, const char* key,
                     std::int64_t fallback, std::int64_t lo, std::int64_t hi,
                     bool required = false) {
  if (!o.contains(key)) {
    if (required) fail(path + "." + key, "missing required key");
    return fallback;
  }
  const njson& v = o.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path + "." + key, "expected an integer");
  const std::int64_t x = v.get<std::int64_t>();
  if (x < lo || x > hi)
    fail(path + "." + key,
         "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
             ", " + std::to_string(hi) + "]");
  return x;
}

double get_double(const njson& o, const std::string& path, const char* key,
                  double fallback, bool required = false) {
  if (!o.contains(key)) {
    if (required) fail(path + "." + key, "missing required key");
    return fallback;
  }
  const njson& v = o.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path + "." + key, "expected a finite number");
  return x;
}

bool get_bool(const njson& o, const std::string& path, const char* key,
              bool fallback) {
  if (!o.contains(key)) return fallback;
  const njson& v = o.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

// ---- section parsers ------------------------------------------------------

ModelSpec parse_model(const njson& j) {
  const std::string path = "model";
  expect_object(j, path);
  ModelSpec m;
  m.kind = parse_enum(kModels, get_string(j, path, "kind", "", true),
                      path + ".kind");
  switch (m.kind) {
    case ModelKind::maxcut:
      check_keys(j, path, {"kind", "n", "degree", "graph"});
      break;
    case ModelKind::qmc:
      check_keys(j, path, {"kind", "n", "degree", "graph", "form"});
      break;
    case ModelKind::aklt:
      check_keys(j, path, {"kind", "n", "dim_cap"});
      break;
    case ModelKind::well:
      check_keys(j, path, {"kind", "n", "anchors", "multiplier"});
      break;
    case ModelKind::grover:
      check_keys(j, path, {"kind", "n", "marked"});
      break;
    case ModelKind::linear:
      check_keys(j, path, {"kind", "n", "e_max"});
      break;
  }
  const bool graph_model =
      m.kind == ModelKind::maxcut || m.kind == ModelKind::qmc;
  const bool chain_model = graph_model || m.kind == ModelKind::aklt;
  m.n = static_cast<int>(
      get_int(j, path, "n", 0, chain_model ? 2 : 1, 62, true));
  if (graph_model) {
    m.degree =
        static_cast<int>(get_int(j, path, "degree", m.degree, 1, m.n - 1));
    m.graph = parse_enum(kGraphs,
                         get_string(j, path, "graph",
                                    std::string(enum_name(kGraphs, m.graph))),
                         path + ".graph");
  }
  if (m.kind == ModelKind::qmc)
    m.form = parse_enum(kQmcForms,
                        get_string(j, path, "form",
                                   std::string(enum_name(kQmcForms, m.form))),
                        path + ".form");
  if (m.kind == ModelKind::well) {
    m.anchors = static_cast<int>(get_int(j, path, "anchors", m.anchors, 0,
                                         std::int64_t{1} << 20));
    m.multiplier = get_double(j, path, "multiplier", m.multiplier);
    if (m.multiplier <= 0) fail(path + ".multiplier", "must be positive");
  }
  if (m.kind == ModelKind::grover)
    m.marked = get_int(j, path, "marked", 0, 0,
                       (std::int64_t{1} << std::min(m.n, 62)) - 1);
  if (m.kind == ModelKind::linear) {
    m.e_max = get_double(j, path, "e_max", m.e_max);
    if (m.e_max <= 0) fail(path + ".e_max", "must be positive");
  }
  if (m.kind == ModelKind::aklt)
    m.dim_cap = get_int(j, path, "dim_cap", m.dim_cap, 2,
                        std::int64_t{1} << 40);
  return m;
}

FamilySpec parse_family_entry(const njson& j, const std::string& path) {
  FamilySpec f;
  f.kind = parse_enum(kFamilies, get_string(j, path, "kind", "", true),
                      path + ".kind");
  if (f.kind == FamilyKind::sparse_band) {
    check_keys(j, path, {"kind", "t"});
    f.band_t = static_cast<int>(
        get_int(j, path, "t", f.band_t, 1, std::int64_t{1} << 30));
  } else {
    check_keys(j, path, {"kind"});
  }
  return f;
}

std::vector<FamilySpec> parse_family(const njson& j) {
  std::vector<FamilySpec> out;
  if (j.is_array()) {
    if (j.empty()) fail("family", "array must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(
          parse_family_entry(j.at(i), "family[" + std::to_string(i) + "]"));
  } else {
    out.push_back(parse_family_entry(j, "family"));
  }
  return out;
}

InitialStateSpec parse_initial(const njson& j) {
  const std::string path = "initial";
  InitialStateSpec s;
  s.kind = parse_enum(kInitials, get_string(j, path, "kind", "", true),
                      path + ".kind");
  switch (s.kind) {
    case InitialKind::plus:
    case InitialKind::haar:
      check_keys(j, path, {"kind"});
      break;
    case InitialKind::basis:
      check_keys(j, path, {"kind", "digits"});
      s.digits = get_string(j, path, "digits", "", true);
      if (s.digits.empty()) fail(path + ".digits", "must not be empty");
      break;
    case InitialKind::file:
      check_keys(j, path, {"kind", "path"});
      s.path = get_string(j, path, "path", "", true);
      if (s.path.empty()) fail(path + ".path", "must not be empty");
      break;
  }
  return s;
}

bool diagonal_base_model(ModelKind k) {
  return k == ModelKind::maxcut || k == ModelKind::well ||
         k == ModelKind::grover || k == ModelKind::linear;
}

bool local_model(ModelKind k) {
  return k == ModelKind::maxcut || k == ModelKind::qmc ||
         k == ModelKind::aklt;
}

void check_family_model(const FamilySpec& f, const ModelSpec& m,
                        const std::string& path) {
  if (f.kind == FamilyKind::local) {
    if (!local_model(m.kind))
      fail(path, "the local family needs a local Hamiltonian model "
                 "(maxcut | qmc | aklt)");
  } else if (!diagonal_base_model(m.kind)) {
    fail(path, "sparse families need a diagonal base model "
               "(maxcut | well | grover | linear)");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() +
                      ")");
  }
  expect_object(j, "config");

  ExperimentConfig c;
  c.experiment =
      parse_enum(kExperiments, get_string(j, "config", "experiment", "", true),
                 "experiment");

  std::vector<std::string_view> allowed = {"experiment", "label", "seed",
                                           "repetitions", "out_dir", "model"};
  const bool uses_family = c.experiment == ExperimentKind::profile ||
                           c.experiment == ExperimentKind::altmin ||
                           c.experiment == ExperimentKind::theory_check;
  const bool uses_initial = c.experiment == ExperimentKind::altmin ||
                            c.experiment == ExperimentKind::variational ||
                            c.experiment == ExperimentKind::theory_check;
  const bool uses_run = c.experiment != ExperimentKind::model_dump;
  if (uses_family) allowed.push_back("family");
  if (uses_initial) allowed.push_back("initial");
  if (uses_run) allowed.push_back("run");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed)
      if (a == item.key()) ok = true;
    if (ok) continue;
    const std::string& k = item.key();
    if (k == "family" || k == "initial" || k == "run")
      fail(k, "not used by this experiment kind");
    fail(k, "unknown key");
  }

  c.label = get_string(j, "config", "label", c.label);
  if (c.label.empty()) fail("label", "must not be empty");
  for (char ch : c.label)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
          ch == '-'))
      fail("label", "only [A-Za-z0-9_-] allowed (used in file names)");
  if (j.contains("seed")) {
    const njson& v = j.at("seed");
    if (!v.is_number_unsigned())
      fail("seed", "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  c.repetitions = static_cast<int>(
      get_int(j, "config", "repetitions", c.repetitions, 1, 1000000));
  c.out_dir = get_string(j, "config", "out_dir", c.out_dir);
  if (c.out_dir.empty()) fail("out_dir", "must not be empty");

  if (!j.contains("model")) fail("model", "missing required key");
  c.model = parse_model(j.at("model"));

  if (j.contains("family")) c.families = parse_family(j.at("family"));
  if (j.contains("initial")) c.initial = parse_initial(j.at("initial"));

  const njson run = j.contains("run") ? j.at("run") : njson::object();
  const std::string rp = "run";
  expect_object(run, rp);

  switch (c.experiment) {
    case ExperimentKind::profile: {
      check_keys(run, rp, {"source", "target", "stride"});
      c.profile.source = parse_enum(
          kProfileBases,
          get_string(run, rp, "source", "base"), rp + ".source");
      c.profile.target = parse_enum(
          kProfileBases,
          get_string(run, rp, "target", "altered"), rp + ".target");
      c.profile.stride =
          get_int(run, rp, "stride", 1, 1, std::int64_t{1} << 40);
      if (c.families.size() != 1)
        fail("family", "profile runs take a single family");
      if (c.profile.source == ProfileBasis::altered ||
          c.profile.target == ProfileBasis::altered)
        check_family_model(c.families[0], c.model, "family");
      break;
    }
    case ExperimentKind::altmin: {
      check_keys(run, rp, {"l", "k", "mode", "store_states"});
      c.altmin.l = static_cast<int>(get_int(run, rp, "l", 1, 1, 64, true));
      c.altmin.k = static_cast<int>(get_int(run, rp, "k", 1, 1, 64));
      c.altmin.mode = parse_enum(
          kRunModes, get_string(run, rp, "mode", "trajectory"), rp + ".mode");
      c.altmin.store_states = get_bool(run, rp, "store_states", false);
      for (const auto& f : c.families)
        check_family_model(f, c.model, "family");
      if (c.altmin.store_states) {
        if (c.altmin.mode != RunMode::trajectory)
          fail(rp + ".store_states", "needs trajectory mode");
        for (const auto& f : c.families)
          if (f.kind != FamilyKind::local)
            fail(rp + ".store_states", "needs the local family");
      }
      break;
    }
    case ExperimentKind::variational: {
      check_keys(run, rp, {"l", "schedules", "theta"});
      c.variational.l = static_cast<int>(
          get_int(run, rp, "l", 1, 1, 1000000, true));
      if (run.contains("schedules")) {
        const njson& s = run.at("schedules");
        c.variational.schedules.clear();
        if (s.is_string()) {
          c.variational.schedules.push_back(parse_enum(
              kSchedules, s.get<std::string>(), rp + ".schedules"));
        } else if (s.is_array() && !s.empty()) {
          for (std::size_t i = 0; i < s.size(); ++i) {
            const njson& e = s.at(i);
            const std::string ep =
                rp + ".schedules[" + std::to_string(i) + "]";
            if (!e.is_string()) fail(ep, "expected a string");
            c.variational.schedules.push_back(
                parse_enum(kSchedules, e.get<std::string>(), ep));
          }
        } else {
          fail(rp + ".schedules", "expected a string or non-empty array");
        }
      }
      if (run.contains("theta")) {
        const njson& t = run.at("theta");
        if (t.is_string()) {
          if (t.get<std::string>() != "line-search")
            fail(rp + ".theta", "expected \"line-search\" or a number");
          c.variational.theta = ThetaMode::line_search();
        } else if (t.is_number()) {
          const double th = t.get<double>();
          if (!std::isfinite(th) || std::abs(th) >= 1.0)
            fail(rp + ".theta", "fixed angle must satisfy |theta| < 1");
          c.variational.theta = ThetaMode::fixed(th);
        } else {
          fail(rp + ".theta", "expected \"line-search\" or a number");
        }
      }
      if (!local_model(c.model.kind))
        fail("model.kind", "variational runs need a local Hamiltonian model "
                           "(maxcut | qmc | aklt)");
      break;
    }
    case ExperimentKind::anneal: {
      check_keys(run, rp, {"steps", "beta_start", "beta_end", "schedule",
                           "kind"});
      c.anneal.cfg.steps =
          get_int(run, rp, "steps", 1000, 1, std::int64_t{1} << 40);
      c.anneal.cfg.beta_start =
          get_double(run, rp, "beta_start", c.anneal.cfg.beta_start);
      c.anneal.cfg.beta_end =
          get_double(run, rp, "beta_end", c.anneal.cfg.beta_end);
      if (c.anneal.cfg.beta_start <= 0)
        fail(rp + ".beta_start", "must be positive");
      if (c.anneal.cfg.beta_end < c.anneal.cfg.beta_start)
        fail(rp + ".beta_end", "must be >= beta_start");
      c.anneal.cfg.schedule = parse_enum(
          kAnnealSchedules,
          get_string(run, rp, "schedule",
                     std::string(enum_name(kAnnealSchedules,
                                           c.anneal.cfg.schedule))),
          rp + ".schedule");
      const std::string kind = get_string(run, rp, "kind", "walker");
      if (kind == "walker")
        c.anneal.ensemble = false;
      else if (kind == "ensemble")
        c.anneal.ensemble = true;
      else
        fail(rp + ".kind", "expected walker | ensemble");
      if (!diagonal_base_model(c.model.kind))
        fail("model.kind", "annealing needs a diagonal base model "
                           "(maxcut | well | grover | linear)");
      break;
    }
    case ExperimentKind::theory_check: {
      check_keys(run, rp, {"theorem", "samples"});
      c.theory.theorem =
          static_cast<int>(get_int(run, rp, "theorem", 1, 1, 2, true));
      c.theory.samples = get_int(run, rp, "samples", c.theory.samples, 1,
                                 std::int64_t{1} << 40);
      if (c.theory.theorem == 1) {
        if (j.contains("family"))
          fail("family", "theorem 1 checks the local family; drop the key");
        if (!local_model(c.model.kind))
          fail("model.kind", "theorem 1 needs a local Hamiltonian model");
        c.families = {FamilySpec{}};
      } else {
        if (!j.contains("family"))
          fail("family", "theorem 2 needs a band or hamming pattern");
        if (c.families.size() != 1)
          fail("family", "theorem 2 takes a single family");
        if (c.families[0].kind == FamilyKind::local)
          fail("family.kind", "theorem 2 needs a band or hamming pattern");
        if (!diagonal_base_model(c.model.kind))
          fail("model.kind", "theorem 2 needs a diagonal base model");
      }
      break;
    }
    case ExperimentKind::model_dump:
      break;
  }

  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
  njson j;
  j["experiment"] = enum_name(kExperiments, c.experiment);
  j["label"] = c.label;
  j["seed"] = c.seed;
  j["repetitions"] = c.repetitions;
  j["out_dir"] = c.out_dir;

  njson m;
  m["kind"] = enum_name(kModels, c.model.kind);
  m["n"] = c.model.n;
  switch (c.model.kind) {
    case ModelKind::maxcut:
    case ModelKind::qmc:
      m["degree"] = c.model.degree;
      m["graph"] = enum_name(kGraphs, c.model.graph);
      if (c.model.kind == ModelKind::qmc)
        m["form"] = enum_name(kQmcForms, c.model.form);
      break;
    case ModelKind::aklt:
      break;
    case ModelKind::well:
      m["anchors"] = c.model.anchors;
      m["multiplier"] = c.model.multiplier;
      break;
    case ModelKind::grover:
      m["marked"] = c.model.marked;
      break;
    case ModelKind::linear:
      m["e_max"] = c.model.e_max;
      break;
  }
  if (c.model.kind == ModelKind::aklt &&
      c.model.dim_cap != RegisterShape::kDefaultDimCap)
    m["dim_cap"] = c.model.dim_cap;
  j["model"] = std::move(m);

  const bool emit_family =
      c.experiment == ExperimentKind::profile ||
      c.experiment == ExperimentKind::altmin ||
      (c.experiment == ExperimentKind::theory_check && c.theory.theorem == 2);
  if (emit_family) {
    njson fams = njson::array();
    for (const auto& f : c.families) {
      njson e;
      e["kind"] = enum_name(kFamilies, f.kind);
      if (f.kind == FamilyKind::sparse_band) e["t"] = f.band_t;
      fams.push_back(std::move(e));
    }
    j["family"] = std::move(fams);
  }

  const bool emit_initial = c.experiment == ExperimentKind::altmin ||
                            c.experiment == ExperimentKind::variational ||
                            c.experiment == ExperimentKind::theory_check;
  if (emit_initial) {
    njson s;
    s["kind"] = enum_name(kInitials, c.initial.kind);
    if (c.initial.kind == InitialKind::basis) s["digits"] = c.initial.digits;
    if (c.initial.kind == InitialKind::file) s["path"] = c.initial.path;
    j["initial"] = std::move(s);
  }

  njson run;
  switch (c.experiment) {
    case ExperimentKind::profile:
      run["source"] = enum_name(kProfileBases, c.profile.source);
      run["target"] = enum_name(kProfileBases, c.profile.target);
      run["stride"] = c.profile.stride;
      break;
    case ExperimentKind::altmin:
      run["l"] = c.altmin.l;
      run["k"] = c.altmin.k;
      run["mode"] = enum_name(kRunModes, c.altmin.mode);
      if (c.altmin.store_states) run["store_states"] = true;
      break;
    case ExperimentKind::variational: {
      run["l"] = c.variational.l;
      njson s = njson::array();
      for (auto k : c.variational.schedules)
        s.push_back(enum_name(kSchedules, k));
      run["schedules"] = std::move(s);
      if (c.variational.theta.kind == ThetaMode::kFixed)
        run["theta"] = c.variational.theta.theta;
      else
        run["theta"] = "line-search";
      break;
    }
    case ExperimentKind::anneal:
      run["steps"] = c.anneal.cfg.steps;
      run["beta_start"] = c.anneal.cfg.beta_start;
      run["beta_end"] = c.anneal.cfg.beta_end;
      run["schedule"] = enum_name(kAnnealSchedules, c.anneal.cfg.schedule);
      run["kind"] = c.anneal.ensemble ? "ensemble" : "walker";
      break;
    case ExperimentKind::theory_check:
      run["theorem"] = c.theory.theorem;
      run["samples"] = c.theory.samples;
      break;
    case ExperimentKind::model_dump:
      break;
  }
  if (c.experiment != ExperimentKind::model_dump) j["run"] = std::move(run);

  return j.dump(2) + "\n";
}

}  // namespace qalt
