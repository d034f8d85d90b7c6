#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdmm/cli.hpp"
#include "pdmm/io.hpp"

namespace {

using namespace pdmm;
using namespace pdmm::cli;

const std::map<std::string, std::string> kHelp = {
    {"problem", "toy-qp | rpca | grouplasso"},
    {"instance", "instance JSON written by `generate`"},
    {"problem-seed", "generator seed for the problem instance"},
    {"toy-J", "toy-qp column blocks"},
    {"toy-I", "toy-qp row blocks"},
    {"toy-block-size", "toy-qp column block length"},
    {"toy-row-size", "toy-qp row block length"},
    {"toy-density", "toy-qp block fill probability"},
    {"m", "rows (rpca, grouplasso)"},
    {"n", "columns (rpca)"},
    {"rank", "low-rank component rank (rpca)"},
    {"L", "number of groups (grouplasso)"},
    {"group-size", "group size (grouplasso)"},
    {"overlap", "indices shared by consecutive groups (grouplasso)"},
    {"variant", "pdmm | sadmm | pjadmm | rdbcd | gsadmm-ref"},
    {"K", "primal blocks per iteration, or 'all'"},
    {"K-I", "dual blocks per iteration (rdbcd)"},
    {"rho", "penalty parameter"},
    {"eta", "proximal weight, one value or one per column block"},
    {"mode", "exact | linearized-f | linearized-penalty | linearized-both"},
    {"sampler", "uniform | cyclic"},
    {"tau", "override dual step (pdmm)"},
    {"nu", "override backward step (pdmm)"},
    {"preset", "named step-size preset (rpca-tuned-k1/k2/k3, rpca-text-k3)"},
    {"tol", "relative-change tolerance"},
    {"max-iter", "iteration cap"},
    {"refresh", "iterations between full residual recomputations"},
    {"seeds", "seed list, e.g. 1..10 or 1,3,5"},
    {"base-seed", "base seed the per-seed streams are split from"},
    {"threads", "threads for block updates (capped by PDMM_THREADS)"},
    {"jobs", "seeds solved concurrently"},
    {"out", "output directory"},
    {"label", "file prefix for traces and summary"},
};

const std::vector<std::string> kFlags = {"track-h", "timing"};

struct Collected {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::string config;
};

void add_settings(CLI::App* app, Collected& c, bool with_out) {
  for (const auto& [key, help] : kHelp) {
    if (key == "out" && !with_out) continue;
    app->add_option("--" + key, c.values[key], help);
  }
  for (const auto& key : kFlags) app->add_flag("--" + key, c.flags[key], key == "track-h" ? "record h (needs a KKT reference)" : "record wall time");
}

Settings from_flags(CLI::App* app, const Collected& c) {
  Settings s;
  for (const auto& [key, value] : c.values)
    if (app->count("--" + key) > 0) s[key] = {value, "--" + key};
  for (const auto& [key, on] : c.flags)
    if (app->count("--" + key) > 0) s[key] = {on ? "true" : "false", "--" + key};
  return s;
}

int run_command(CLI::App* app, const Collected& c) {
  Settings s;
  if (!c.config.empty()) s = read_config_file(c.config);
  s = merge(std::move(s), from_flags(app, c));
  const RunConfig rc = build_run_config(s);
  const RunOutcome r = execute(rc);
  std::cout << r.label << ": " << r.seeds.size() << " seed(s), iterations mean " << r.mean_iterations << " sd "
            << r.sd_iterations << ", objective " << format_double(r.mean_objective) << "\n";
  for (const auto& so : r.seeds)
    if (!so.error.empty()) std::cerr << "seed " << so.seed << ": " << so.error << " (trace kept in " << so.trace_file << ")\n";
  std::cout << "summary: " << (std::filesystem::path(rc.out) / (r.label + "-summary.json")).string() << "\n";
  return r.exit_code;
}

int compare_command(CLI::App* app, const Collected& c, const std::vector<std::string>& files, const std::string& out) {
  const Settings overrides = from_flags(app, c);
  std::vector<RunConfig> configs;
  for (const auto& f : files) {
    Settings s = read_config_file(f);
    s = merge(std::move(s), overrides);
    if (!s.count("label")) s["label"] = {std::filesystem::path(f).stem().string(), f};
    configs.push_back(build_run_config(s));
  }
  const CompareOutcome co = compare(configs, out);
  std::cout << co.table;
  std::cout << "table: " << (std::filesystem::path(out) / "compare.csv").string() << "\n";
  return co.exit_code;
}

int generate_command(const std::string& kind, const Collected& c, CLI::App* app, const std::string& file) {
  Settings s = from_flags(app, c);
  s["problem"] = {kind, "--problem"};
  const RunConfig rc = build_run_config(s);
  const ProblemSpec& ps = rc.problem;
  json j;
  if (kind == "rpca") {
    j = to_json(gen_rpca_synthetic(ps.m, ps.n, ps.rank, ps.seed));
  } else if (kind == "grouplasso") {
    j = to_json(gen_group_lasso_synthetic(ps.m, ps.L, ps.group_size, ps.overlap, ps.seed));
  } else {
    throw ConfigError("--problem: generate supports rpca and grouplasso");
  }
  const std::filesystem::path path(file);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, j.dump() + "\n");
  std::cout << "wrote " << file << " (fingerprint " << hex64(fnv1a64(j.dump())) << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDMM solver benchmark"};
  app.require_subcommand(1);

  Collected run_c;
  CLI::App* run = app.add_subcommand("run", "solve one configuration over a seed list");
  add_settings(run, run_c, true);
  run->add_option("--config", run_c.config, "key = value config file; flags override it")->check(CLI::ExistingFile);

  Collected cmp_c;
  std::vector<std::string> cmp_files;
  std::string cmp_out = "pdmm-compare";
  CLI::App* cmp = app.add_subcommand("compare", "run several configs on one instance and tabulate");
  cmp->add_option("configs", cmp_files, "config files")->required()->check(CLI::ExistingFile);
  add_settings(cmp, cmp_c, false);
  cmp->add_option("--out", cmp_out, "output directory");

  Collected gen_c;
  std::string gen_kind, gen_file;
  CLI::App* gen = app.add_subcommand("generate", "write a synthetic instance file");
  gen->add_option("--problem", gen_kind, "rpca | grouplasso")->required();
  for (const char* key : {"problem-seed", "m", "n", "rank", "L", "group-size", "overlap"})
    gen->add_option(std::string("--") + key, gen_c.values[key], kHelp.at(key));
  gen->add_option("--out", gen_file, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return run_command(run, run_c);
    if (*cmp) return compare_command(cmp, cmp_c, cmp_files, cmp_out);
    if (*gen) return generate_command(gen_kind, gen_c, gen, gen_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  }
  return kConfigError;
}
