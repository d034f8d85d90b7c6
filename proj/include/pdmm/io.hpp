#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdmm/diagnostics.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/problems.hpp"

namespace pdmm {

using json = nlohmann::json;

constexpr int kInstanceFormatVersion = 1;
constexpr const char* kTraceHeader = "# pdmm-trace v1";

namespace detail {

inline json matrix_to_json(const Mat& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"dtype", "float64"}, {"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

inline Mat matrix_from_json(const json& j, const std::string& name) {
  if (!j.contains("dtype") || j.at("dtype") != "float64")
    throw ValidationError("array '" + name + "' must carry dtype float64");
  const auto shape = j.at("shape").get<std::vector<Index>>();
  if (shape.size() != 2) throw ValidationError("array '" + name + "' must be two-dimensional");
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != shape[0] * shape[1])
    throw ValidationError("array '" + name + "' has " + std::to_string(data.size()) + " entries, shape says " +
                          std::to_string(shape[0] * shape[1]));
  Mat m(shape[0], shape[1]);
  size_t k = 0;
  for (Index r = 0; r < shape[0]; ++r)
    for (Index c = 0; c < shape[1]; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

inline Vec vector_from_json(const json& j, const std::string& name) {
  Mat m = matrix_from_json(j, name);
  if (m.cols() != 1) throw ValidationError("array '" + name + "' must be a column");
  return m.col(0);
}

inline void require_header(const json& j, const std::string& kind) {
  if (j.value("format", "") != "pdmm-instance") throw ValidationError("not a pdmm instance file");
  if (j.value("version", 0) != kInstanceFormatVersion)
    throw ValidationError("unsupported instance format version " + std::to_string(j.value("version", 0)));
  if (j.value("kind", "") != kind) throw ValidationError("instance kind is '" + j.value("kind", "") + "', expected '" + kind + "'");
}

}  // namespace detail

// Schema: {format, version, kind, seed, params{...}, arrays{name: {dtype, shape, data (row-major)}}}.
inline json to_json(const RpcaInstance& inst) {
  json arrays = {{"M", detail::matrix_to_json(inst.M)}};
  if (inst.low_rank) arrays["L"] = detail::matrix_to_json(*inst.low_rank);
  if (inst.sparse) arrays["S"] = detail::matrix_to_json(*inst.sparse);
  if (inst.noise) arrays["V"] = detail::matrix_to_json(*inst.noise);
  return json{{"format", "pdmm-instance"},
              {"version", kInstanceFormatVersion},
              {"kind", "rpca"},
              {"seed", inst.seed},
              {"params",
               {{"m", inst.m},
                {"n", inst.n},
                {"rank", inst.rank},
                {"gamma2", inst.gamma2},
                {"gamma3", inst.gamma3},
                {"density", inst.density},
                {"sparse_scale", inst.sparse_scale},
                {"noise_sigma", inst.noise_sigma},
                {"weight_factor", inst.weight_factor}}},
              {"arrays", std::move(arrays)}};
}

inline RpcaInstance rpca_from_json(const json& j) {
  detail::require_header(j, "rpca");
  RpcaInstance inst;
  const auto& p = j.at("params");
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.m = p.at("m").get<Index>();
  inst.n = p.at("n").get<Index>();
  inst.rank = p.at("rank").get<int>();
  inst.gamma2 = p.at("gamma2").get<double>();
  inst.gamma3 = p.at("gamma3").get<double>();
  inst.density = p.at("density").get<double>();
  inst.sparse_scale = p.at("sparse_scale").get<double>();
  inst.noise_sigma = p.at("noise_sigma").get<double>();
  inst.weight_factor = p.at("weight_factor").get<double>();
  const auto& a = j.at("arrays");
  inst.M = detail::matrix_from_json(a.at("M"), "M");
  if (inst.M.rows() != inst.m || inst.M.cols() != inst.n) throw ValidationError("M shape differs from params");
  if (a.contains("L")) inst.low_rank = detail::matrix_from_json(a.at("L"), "L");
  if (a.contains("S")) inst.sparse = detail::matrix_from_json(a.at("S"), "S");
  if (a.contains("V")) inst.noise = detail::matrix_from_json(a.at("V"), "V");
  return inst;
}

inline json to_json(const GroupLassoInstance& inst) {
  json arrays = {{"A", detail::matrix_to_json(inst.A_data)}, {"b", detail::matrix_to_json(inst.b)}};
  if (inst.x_true) arrays["x_true"] = detail::matrix_to_json(*inst.x_true);
  return json{{"format", "pdmm-instance"},
              {"version", kInstanceFormatVersion},
              {"kind", "group_lasso"},
              {"seed", inst.seed},
              {"params",
               {{"m", inst.A_data.rows()},
                {"n", inst.A_data.cols()},
                {"L", inst.L},
                {"group_size", inst.group_size},
                {"overlap", inst.overlap},
                {"lambda", inst.lambda},
                {"noise_sigma", inst.noise_sigma},
                {"weights", inst.weights},
                {"groups", inst.groups}}},
              {"arrays", std::move(arrays)}};
}

inline GroupLassoInstance group_lasso_from_json(const json& j) {
  detail::require_header(j, "group_lasso");
  GroupLassoInstance inst;
  const auto& p = j.at("params");
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.L = p.at("L").get<int>();
  inst.group_size = p.at("group_size").get<Index>();
  inst.overlap = p.at("overlap").get<Index>();
  inst.lambda = p.at("lambda").get<double>();
  inst.noise_sigma = p.at("noise_sigma").get<double>();
  inst.weights = p.at("weights").get<std::vector<double>>();
  inst.groups = p.at("groups").get<std::vector<std::vector<Index>>>();
  const auto& a = j.at("arrays");
  inst.A_data = detail::matrix_from_json(a.at("A"), "A");
  inst.b = detail::vector_from_json(a.at("b"), "b");
  if (a.contains("x_true")) inst.x_true = detail::vector_from_json(a.at("x_true"), "x_true");
  if (inst.A_data.rows() != p.at("m").get<Index>() || inst.A_data.cols() != p.at("n").get<Index>())
    throw ValidationError("design shape differs from params");
  validate_group_lasso(inst);
  return inst;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct TraceMeta {
  std::string problem;
  std::string variant;
  int K = 0;
  int K_I = 0;
  std::string sampler;
  std::uint64_t seed = 0;
};

// Versioned header comment, then iter,time_s,objective,primal_residual,R,h.
// Absent optional values are empty fields.
inline std::string trace_csv(const Trace& trace, const TraceMeta& meta) {
  std::ostringstream os;
  os << kTraceHeader << " problem=" << meta.problem << " variant=" << meta.variant << " K=" << meta.K
     << " K_I=" << meta.K_I << " sampler=" << meta.sampler << " seed=" << meta.seed << "\n";
  os << "iter,time_s,objective,primal_residual,R,h\n";
  for (const auto& r : trace) {
    os << r.t << ',' << format_double(r.wall_time) << ',' << format_double(r.objective) << ','
       << format_double(r.primal_residual) << ',';
    if (r.R) os << format_double(*r.R);
    os << ',';
    if (r.h) os << format_double(*r.h);
    os << '\n';
  }
  return os.str();
}

}  // namespace pdmm
