#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/io.hpp"
#include "pdmm/problems.hpp"
#include "pdmm/solver.hpp"
#include "pdmm/variants.hpp"
#include "pdmm/worker_pool.hpp"

namespace pdmm::cli {

enum ExitCode : int { kOk = 0, kMaxIter = 1, kConfigError = 2, kDiverged = 3 };

// A raw setting and where it came from ("file.cfg:12" or "--K"), so value
// errors point at the offending line or flag.
struct Setting {
  std::string value;
  std::string source;
};

using Settings = std::map<std::string, Setting>;

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "problem", "instance", "problem-seed", "toy-J", "toy-I", "toy-block-size", "toy-row-size", "toy-density",
      "m", "n", "rank", "L", "group-size", "overlap", "variant", "K", "K-I", "rho", "eta", "mode", "sampler",
      "tau", "nu", "preset", "tol", "max-iter", "refresh", "seeds", "base-seed", "track-h", "timing", "threads",
      "jobs", "out", "label"};
  return keys;
}

inline bool is_known_key(const std::string& k) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// `key = value` lines; `#` starts a comment; blank lines are ignored.
inline Settings parse_config_text(const std::string& text, const std::string& origin) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "' (first at " + out[key].source + ")");
    out[key] = {value, where};
  }
  return out;
}

inline Settings read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

// Later layers override earlier ones.
inline Settings merge(Settings base, const Settings& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

struct ProblemSpec {
  std::string kind = "toy-qp";
  std::optional<std::string> instance;
  std::uint64_t seed = 1;
  ToyQpSpec toy{5, 2, 2, 2, 0.7, 1, false};
  Index m = 0;
  Index n = 0;
  int rank = 10;
  int L = 10;
  Index group_size = 20;
  Index overlap = 2;
};

struct RunConfig {
  ProblemSpec problem;
  Variant variant = Variant::pdmm;
  VariantOptions options;
  double tol = 1e-4;
  int max_iter = 1000;
  int refresh = 100;
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t base_seed = 0;
  bool track_h = false;
  bool timing = false;
  int threads = 1;
  int jobs = 1;
  std::string out = "pdmm-out";
  std::string label;
};

namespace detail {

inline std::string at(const Setting& s) { return s.source + ": "; }

inline long long parse_int(const Setting& s, const std::string& key) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(s.value, &pos);
    if (pos != s.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(at(s) + key + " expects an integer, got '" + s.value + "'");
  }
}

inline double parse_double(const Setting& s, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(s.value, &pos);
    if (pos != s.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(at(s) + key + " expects a number, got '" + s.value + "'");
  }
}

inline bool parse_bool(const Setting& s, const std::string& key) {
  if (s.value == "true" || s.value == "1" || s.value == "yes" || s.value == "on") return true;
  if (s.value == "false" || s.value == "0" || s.value == "no" || s.value == "off") return false;
  throw ConfigError(at(s) + key + " expects true or false, got '" + s.value + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

// "1..10", "1,4,9", "3", or a mix such as "1..3,7".
inline std::vector<std::uint64_t> parse_seeds(const Setting& s) {
  std::vector<std::uint64_t> out;
  for (const std::string& part : detail::split(s.value, ',')) {
    if (part.empty()) throw ConfigError(detail::at(s) + "empty entry in seed list '" + s.value + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<std::uint64_t>(detail::parse_int({part, s.source}, "seeds")));
      continue;
    }
    const long long lo = detail::parse_int({part.substr(0, dots), s.source}, "seeds");
    const long long hi = detail::parse_int({part.substr(dots + 2), s.source}, "seeds");
    if (lo < 0 || hi < lo) throw ConfigError(detail::at(s) + "seed range '" + part + "' is empty or negative");
    if (hi - lo > 100000) throw ConfigError(detail::at(s) + "seed range '" + part + "' is too long");
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<std::uint64_t>(v));
  }
  std::vector<std::uint64_t> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError(detail::at(s) + "seed list '" + s.value + "' repeats a seed");
  return out;
}

inline RunConfig build_run_config(const Settings& st) {
  RunConfig rc;
  auto get = [&](const std::string& k) -> const Setting* {
    auto it = st.find(k);
    return it == st.end() ? nullptr : &it->second;
  };
  auto positive_int = [&](const std::string& k, long long lo = 1) {
    const Setting& s = *get(k);
    const long long v = detail::parse_int(s, k);
    if (v < lo) throw ConfigError(detail::at(s) + k + " must be at least " + std::to_string(lo));
    return v;
  };
  for (const auto& [k, s] : st)
    if (!is_known_key(k)) throw ConfigError(detail::at(s) + "unknown key '" + k + "'");

  ProblemSpec& ps = rc.problem;
  if (const Setting* s = get("instance")) {
    ps.instance = s->value;
    if (get("problem")) throw ConfigError(detail::at(*s) + "give either problem or instance, not both");
    const json j = read_json_file(s->value);
    const std::string kind = j.value("kind", "");
    if (kind == "rpca") {
      ps.kind = "rpca";
    } else if (kind == "group_lasso") {
      ps.kind = "grouplasso";
    } else {
      throw ConfigError(detail::at(*s) + "instance kind '" + kind + "' is not supported");
    }
  }
  if (const Setting* s = get("problem")) {
    if (s->value != "toy-qp" && s->value != "rpca" && s->value != "grouplasso")
      throw ConfigError(detail::at(*s) + "unknown problem '" + s->value + "' (toy-qp, rpca, grouplasso)");
    ps.kind = s->value;
  }
  if (get("problem-seed")) ps.seed = static_cast<std::uint64_t>(positive_int("problem-seed", 0));
  ps.toy.seed = ps.seed;
  if (get("toy-J")) ps.toy.J = static_cast<int>(positive_int("toy-J"));
  if (get("toy-I")) ps.toy.I = static_cast<int>(positive_int("toy-I"));
  if (get("toy-block-size")) ps.toy.block_size = positive_int("toy-block-size");
  if (get("toy-row-size")) ps.toy.row_size = positive_int("toy-row-size");
  if (const Setting* s = get("toy-density")) {
    ps.toy.density = detail::parse_double(*s, "toy-density");
    if (!(ps.toy.density > 0 && ps.toy.density <= 1)) throw ConfigError(detail::at(*s) + "toy-density must lie in (0, 1]");
  }
  if (ps.kind == "rpca") {
    ps.m = 100;
    ps.n = 200;
  } else if (ps.kind == "grouplasso") {
    ps.m = 200;
  }
  if (get("m")) ps.m = positive_int("m");
  if (get("n")) ps.n = positive_int("n");
  if (get("rank")) ps.rank = static_cast<int>(positive_int("rank", 0));
  if (get("L")) ps.L = static_cast<int>(positive_int("L"));
  if (get("group-size")) ps.group_size = positive_int("group-size");
  if (get("overlap")) ps.overlap = positive_int("overlap", 0);
  for (const char* k : {"toy-J", "toy-I", "toy-block-size", "toy-row-size", "toy-density"})
    if (get(k) && ps.kind != "toy-qp") throw ConfigError(detail::at(*get(k)) + std::string(k) + " applies to toy-qp only");
  for (const char* k : {"L", "group-size", "overlap"})
    if (get(k) && ps.kind != "grouplasso") throw ConfigError(detail::at(*get(k)) + std::string(k) + " applies to grouplasso only");
  for (const char* k : {"n", "rank"})
    if (get(k) && ps.kind != "rpca") throw ConfigError(detail::at(*get(k)) + std::string(k) + " applies to rpca only");
  if (get("m") && ps.kind == "toy-qp") throw ConfigError(detail::at(*get("m")) + "m does not apply to toy-qp");

  if (const Setting* s = get("variant")) {
    try {
      rc.variant = parse_variant(s->value);
    } catch (const ConfigError& e) {
      throw ConfigError(detail::at(*s) + e.what());
    }
  }
  VariantOptions& o = rc.options;
  if (const Setting* s = get("K")) o.K = s->value == "all" ? 0 : static_cast<int>(positive_int("K"));
  if (get("K-I")) o.K_I = static_cast<int>(positive_int("K-I"));
  if (const Setting* s = get("rho")) {
    o.rho = detail::parse_double(*s, "rho");
    if (!(o.rho > 0)) throw ConfigError(detail::at(*s) + "rho must be positive");
  }
  if (const Setting* s = get("eta")) {
    for (const std::string& e : detail::split(s->value, ',')) {
      const double v = detail::parse_double({e, s->source}, "eta");
      if (!(v >= 0)) throw ConfigError(detail::at(*s) + "eta entries must be nonnegative");
      o.eta.push_back(v);
    }
  }
  if (const Setting* s = get("mode")) {
    if (s->value == "exact") o.mode = UpdateMode::exact;
    else if (s->value == "linearized-f") o.mode = UpdateMode::linearized_f;
    else if (s->value == "linearized-penalty") o.mode = UpdateMode::linearized_penalty;
    else if (s->value == "linearized-both") o.mode = UpdateMode::linearized_both;
    else throw ConfigError(detail::at(*s) + "unknown mode '" + s->value + "'");
  }
  if (const Setting* s = get("sampler")) {
    if (s->value == "uniform") o.sampler = SamplerScheme::uniform;
    else if (s->value == "cyclic") o.sampler = SamplerScheme::cyclic;
    else throw ConfigError(detail::at(*s) + "sampler must be uniform or cyclic");
  }
  if (const Setting* s = get("tau")) o.tau = detail::parse_double(*s, "tau");
  if (const Setting* s = get("nu")) o.nu = detail::parse_double(*s, "nu");
  if (o.tau && !(*o.tau > 0)) throw ConfigError(detail::at(*get("tau")) + "tau must be positive");
  if (o.nu && !(*o.nu >= 0 && *o.nu < 1)) throw ConfigError(detail::at(*get("nu")) + "nu must lie in [0, 1)");
  if (const Setting* s = get("preset")) o.preset = s->value;
  if (rc.variant == Variant::pjadmm && o.nu) throw ConfigError(detail::at(*get("nu")) + "pjadmm fixes nu = 0; manual nu is not allowed");
  if (rc.variant == Variant::pjadmm && o.tau) throw ConfigError(detail::at(*get("tau")) + "pjadmm fixes tau = 1; manual tau is not allowed");

  if (const Setting* s = get("tol")) {
    rc.tol = detail::parse_double(*s, "tol");
    if (!(rc.tol > 0)) throw ConfigError(detail::at(*s) + "tol must be positive");
  }
  if (get("max-iter")) rc.max_iter = static_cast<int>(positive_int("max-iter"));
  if (get("refresh")) rc.refresh = static_cast<int>(positive_int("refresh"));
  if (const Setting* s = get("seeds")) rc.seeds = parse_seeds(*s);
  if (get("base-seed")) rc.base_seed = static_cast<std::uint64_t>(positive_int("base-seed", 0));
  if (const Setting* s = get("track-h")) rc.track_h = detail::parse_bool(*s, "track-h");
  if (const Setting* s = get("timing")) rc.timing = detail::parse_bool(*s, "timing");
  if (get("threads")) rc.threads = static_cast<int>(positive_int("threads"));
  if (get("jobs")) rc.jobs = static_cast<int>(positive_int("jobs"));
  if (const Setting* s = get("out")) rc.out = s->value;
  if (const Setting* s = get("label")) rc.label = s->value;
  if (rc.track_h && ps.kind != "toy-qp") throw ConfigError(detail::at(*get("track-h")) + "track-h needs a KKT reference; only toy-qp provides one");
  return rc;
}

struct Instance {
  std::string kind;
  Problem problem;
  std::string fingerprint;
  std::string description;
};

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline Instance build_instance(const ProblemSpec& ps) {
  Instance inst;
  inst.kind = ps.kind;
  if (ps.kind == "toy-qp") {
    ToyQp q = build_toy_qp(ps.toy);
    inst.problem = std::move(q.problem);
    const json j = {{"kind", "toy-qp"}, {"J", ps.toy.J}, {"I", ps.toy.I}, {"block_size", ps.toy.block_size},
                    {"row_size", ps.toy.row_size}, {"density", ps.toy.density}, {"seed", ps.toy.seed}};
    inst.fingerprint = hex64(fnv1a64(j.dump()));
    inst.description = j.dump();
    return inst;
  }
  if (ps.kind == "rpca") {
    const RpcaInstance r = ps.instance ? rpca_from_json(read_json_file(*ps.instance))
                                       : gen_rpca_synthetic(ps.m, ps.n, ps.rank, ps.seed);
    inst.problem = build_rpca(r);
    inst.fingerprint = hex64(fnv1a64(to_json(r).dump()));
    inst.description = "rpca " + std::to_string(r.m) + "x" + std::to_string(r.n) + " rank " + std::to_string(r.rank);
    return inst;
  }
  const GroupLassoInstance g = ps.instance ? group_lasso_from_json(read_json_file(*ps.instance))
                                           : gen_group_lasso_synthetic(ps.m, ps.L, ps.group_size, ps.overlap, ps.seed);
  inst.problem = build_group_lasso(g);
  inst.fingerprint = hex64(fnv1a64(to_json(g).dump()));
  inst.description = "grouplasso m=" + std::to_string(g.A_data.rows()) + " L=" + std::to_string(g.L);
  return inst;
}

// Per-seed solver RNG from the base seed; independent of the seed's position in the list.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t seed) { return splitmix64(base ^ splitmix64(seed)); }

inline std::string default_label(const RunConfig& rc) {
  if (!rc.label.empty()) return rc.label;
  std::string s = to_string(rc.variant) + "-K" + (rc.options.K == 0 ? std::string("all") : std::to_string(rc.options.K));
  if (rc.options.K_I != 0) s += "-KI" + std::to_string(rc.options.K_I);
  return s;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::string stop_reason;
  int iterations = 0;
  double final_objective = 0.0;
  double final_residual = 0.0;
  double wall_time = 0.0;
  std::string trace_file;
  std::string error;
};

struct RunOutcome {
  std::string label;
  std::string fingerprint;
  Variant variant = Variant::pdmm;
  int K = 0;
  int K_I = 0;
  std::vector<SeedOutcome> seeds;
  double mean_iterations = 0.0;
  double sd_iterations = 0.0;
  double mean_objective = 0.0;
  double mean_residual = 0.0;
  double mean_time = 0.0;
  int exit_code = kOk;
  json summary;
};

inline RunOutcome execute(const RunConfig& rc, const Instance& inst) {
  RunOutcome out;
  out.label = default_label(rc);
  out.fingerprint = inst.fingerprint;
  out.variant = rc.variant;
  const Problem& p = inst.problem;
  SolverConfig base = configure(rc.variant, p, rc.options);
  base.tol = rc.tol;
  base.max_iter = rc.max_iter;
  base.refresh_interval = rc.refresh;
  base.track_h = rc.track_h;
  base.record_time = rc.timing;
  base.threads = rc.threads;
  out.K = base.steps.K;
  out.K_I = base.steps.K_I;
  // Validates the configuration once before any seed runs.
  { Solver probe(p, base); }

  std::filesystem::create_directories(rc.out);
  out.seeds.resize(rc.seeds.size());
  TraceMeta meta{inst.kind, to_string(rc.variant), out.K, out.K_I, to_string(base.sampler), 0};
  WorkerPool pool(std::max(1, std::min<int>(rc.jobs, static_cast<int>(rc.seeds.size()))));
  pool.run(static_cast<int>(rc.seeds.size()), [&](int k) {
    SeedOutcome& so = out.seeds[static_cast<size_t>(k)];
    so.seed = rc.seeds[static_cast<size_t>(k)];
    SolverConfig cfg = base;
    cfg.seed = derive_seed(rc.base_seed, so.seed);
    TraceMeta m = meta;
    m.seed = so.seed;
    const std::filesystem::path file = std::filesystem::path(rc.out) / (out.label + "-seed" + std::to_string(so.seed) + ".csv");
    so.trace_file = file.string();
    Trace trace;
    try {
      SolveResult res = Solver(p, cfg).solve();
      so.stop_reason = to_string(res.stop_reason);
      so.iterations = res.iterations;
      trace = std::move(res.trace);
    } catch (const DivergenceError& e) {
      so.stop_reason = "diverged";
      so.error = e.what();
      trace = e.trace();
      so.iterations = trace.empty() ? 0 : trace.back().t;
    } catch (const NumericalError& e) {
      so.stop_reason = "failed";
      so.error = e.what();
    }
    if (!trace.empty()) {
      so.final_objective = trace.back().objective;
      so.final_residual = trace.back().primal_residual;
      so.wall_time = trace.back().wall_time;
    }
    write_file_atomic(file, trace_csv(trace, m));
  });

  const double n = static_cast<double>(out.seeds.size());
  bool any_max = false, any_div = false;
  json seeds = json::array();
  for (const auto& so : out.seeds) {
    out.mean_iterations += so.iterations / n;
    out.mean_objective += so.final_objective / n;
    out.mean_residual += so.final_residual / n;
    out.mean_time += so.wall_time / n;
    any_max = any_max || so.stop_reason == "max_iter";
    any_div = any_div || so.stop_reason == "diverged" || so.stop_reason == "failed";
    json js = {{"seed", so.seed},
               {"stop_reason", so.stop_reason},
               {"iterations", so.iterations},
               {"final_objective", so.final_objective},
               {"final_residual", so.final_residual},
               {"time_s", so.wall_time},
               {"trace", std::filesystem::path(so.trace_file).filename().string()}};
    if (!so.error.empty()) js["error"] = so.error;
    seeds.push_back(std::move(js));
  }
  double var = 0.0;
  for (const auto& so : out.seeds) var += (so.iterations - out.mean_iterations) * (so.iterations - out.mean_iterations);
  out.sd_iterations = out.seeds.size() > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  out.exit_code = any_div ? kDiverged : any_max ? kMaxIter : kOk;

  out.summary = {{"format", "pdmm-summary"},
                 {"version", 1},
                 {"label", out.label},
                 {"instance", {{"kind", inst.kind}, {"fingerprint", inst.fingerprint}, {"description", inst.description}}},
                 {"variant", to_string(rc.variant)},
                 {"K", out.K},
                 {"K_I", out.K_I},
                 {"rho", rc.options.rho},
                 {"sampler", to_string(base.sampler)},
                 {"mode", to_string(base.mode)},
                 {"tol", rc.tol},
                 {"max_iter", rc.max_iter},
                 {"base_seed", rc.base_seed},
                 {"iterations", {{"mean", out.mean_iterations}, {"sd", out.sd_iterations}}},
                 {"final_objective", {{"mean", out.mean_objective}}},
                 {"final_residual", {{"mean", out.mean_residual}}},
                 {"all_converged", out.exit_code == kOk},
                 {"seeds", std::move(seeds)}};
  write_file_atomic(std::filesystem::path(rc.out) / (out.label + "-summary.json"), out.summary.dump(2) + "\n");
  return out;
}

inline RunOutcome execute(const RunConfig& rc) { return execute(rc, build_instance(rc.problem)); }

struct CompareOutcome {
  std::vector<RunOutcome> runs;
  std::string csv;
  std::string table;
  int exit_code = kOk;
};

// Runs every config on a shared instance; mismatched instance fingerprints are rejected before solving.
inline CompareOutcome compare(const std::vector<RunConfig>& configs, const std::string& out_dir) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  std::vector<Instance> instances;
  for (const auto& rc : configs) instances.push_back(build_instance(rc.problem));
  for (size_t k = 1; k < instances.size(); ++k)
    if (instances[k].fingerprint != instances[0].fingerprint)
      throw ValidationError("config " + std::to_string(k + 1) + " uses instance " + instances[k].fingerprint +
                            " but config 1 uses " + instances[0].fingerprint);
  std::vector<std::string> labels;
  for (const auto& rc : configs) {
    const std::string l = default_label(rc);
    if (std::find(labels.begin(), labels.end(), l) != labels.end())
      throw ConfigError("two configs share the label '" + l + "'; set label to tell them apart");
    labels.push_back(l);
  }

  CompareOutcome co;
  for (size_t k = 0; k < configs.size(); ++k) {
    RunConfig rc = configs[k];
    rc.out = out_dir;
    co.runs.push_back(execute(rc, instances[k]));
    co.exit_code = std::max(co.exit_code, co.runs.back().exit_code);
  }

  std::ostringstream csv;
  csv << "label,variant,K,K_I,seeds,iterations_mean,iterations_sd,time_s,primal_residual,objective,stop\n";
  std::ostringstream tab;
  tab << std::left << std::setw(22) << "label" << std::setw(12) << "variant" << std::right << std::setw(5) << "K"
      << std::setw(12) << "iter" << std::setw(10) << "sd" << std::setw(10) << "time_s" << std::setw(13) << "residual"
      << std::setw(20) << "objective" << "  stop\n";
  for (const auto& r : co.runs) {
    int tol_count = 0;
    for (const auto& s : r.seeds) tol_count += s.stop_reason == "tolerance";
    const std::string stop = std::to_string(tol_count) + "/" + std::to_string(r.seeds.size()) + " tolerance";
    csv << r.label << ',' << to_string(r.variant) << ',' << r.K << ',' << r.K_I << ',' << r.seeds.size() << ','
        << format_double(r.mean_iterations) << ',' << format_double(r.sd_iterations) << ',' << format_double(r.mean_time)
        << ',' << format_double(r.mean_residual) << ',' << format_double(r.mean_objective) << ',' << stop << '\n';
    std::ostringstream obj;
    obj << std::setprecision(12) << r.mean_objective;
    tab << std::left << std::setw(22) << r.label << std::setw(12) << to_string(r.variant) << std::right << std::setw(5)
        << r.K << std::setw(12) << std::fixed << std::setprecision(1) << r.mean_iterations << std::setw(10)
        << r.sd_iterations << std::setw(10) << std::setprecision(3) << r.mean_time << std::setw(13)
        << std::scientific << std::setprecision(2) << r.mean_residual << std::defaultfloat << std::setw(20) << obj.str()
        << "  " << stop << '\n';
  }
  co.csv = csv.str();
  co.table = tab.str();
  std::filesystem::create_directories(out_dir);
  write_file_atomic(std::filesystem::path(out_dir) / "compare.csv", co.csv);
  return co;
}

}  // namespace pdmm::cli
