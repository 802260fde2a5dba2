/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ltn/csv.hpp"
#include "ltn/error.hpp"

namespace ltn {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) fail(std::string(what) + " must be a nonempty array of rows");
  const size_t cols = j.at(0).size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) fail(std::string(what) + " has ragged rows");
    for (size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) fail(std::string(what) + " has a non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Matrix covariance_from_json(const json& c, int n, const std::string& base_dir) {
  const std::string kind = get_or<std::string>(c, "kind", "");
  Matrix m;
  if (kind == "gauss_markov") {
    m = gauss_markov(get_or<int>(c, "n", n), get_or<double>(c, "rho", 0.8));
  } else if (kind == "hybrid_random") {
    m = hybrid_random_cov(get_or<int>(c, "n", n), get_or<std::uint64_t>(c, "seed", 2026));
  } else if (kind == "file") {
    std::filesystem::path p = get_or<std::string>(c, "path", "");
    if (p.empty()) fail("covariance file path missing");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    m = read_matrix_csv(p.string());
  } else if (kind == "inline") {
    if (!c.contains("matrix")) fail("inline covariance needs 'matrix'");
    m = matrix_from_json(c.at("matrix"), "covariance matrix");
  } else if (kind == "butterfly") {
    m = butterfly_covariance();
  } else {
    fail("covariance kind must be gauss_markov, hybrid_random, file, inline or butterfly");
  }
  if (n > 0 && m.rows() != n) fail("covariance is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                   " but sources sum to " + std::to_string(n));
  return m;
}

void read_solver(const json& s, IdealOptions& ideal, NoisyOptions& noisy) {
  ideal.restarts = noisy.restarts = get_or<int>(s, "restarts", ideal.restarts);
  ideal.eps = noisy.eps = get_or<double>(s, "eps", ideal.eps);
  ideal.max_iter = noisy.max_iter = get_or<int>(s, "max_iter", ideal.max_iter);
  ideal.seed = noisy.seed = get_or<std::uint64_t>(s, "seed", ideal.seed);
  ideal.threads = noisy.threads = get_or<int>(s, "threads", ideal.threads);
  if (ideal.restarts < 1 || ideal.max_iter < 1 || !(ideal.eps >= 0.0)) fail("solver settings out of range");
}

}  // namespace

namespace {

NetworkConfig parse_network(const json& j, const std::string& base_dir) {
  if (!j.is_object()) fail("network config must be an object");
  for (const char* key : {"sources", "receivers", "edges", "covariance"})
    if (!j.contains(key)) fail(std::string("missing '") + key + "'");

  // Node names: explicit list, or sources, then edge endpoints, then receivers.
  std::vector<std::string> names;
  std::map<std::string, int> index;
  auto add = [&](const std::string& nm) {
    if (!index.count(nm)) {
      index[nm] = static_cast<int>(names.size());
      names.push_back(nm);
    }
  };
  auto node_of = [&](const json& v) -> int {
    const std::string nm = v.get<std::string>();
    auto it = index.find(nm);
    if (it == index.end()) fail("unknown node '" + nm + "'");
    return it->second;
  };
  const bool explicit_nodes = j.contains("nodes");
  if (explicit_nodes)
    for (const auto& nm : j.at("nodes")) add(nm.get<std::string>());
  for (const auto& s : j.at("sources"))
    if (!explicit_nodes) add(s.at("node").get<std::string>());
  for (const auto& e : j.at("edges")) {
    if (!e.contains("tail") || !e.contains("head")) fail("edge needs tail and head");
    if (!explicit_nodes) {
      const std::string tail = e.at("tail").get<std::string>();
      const std::string head = e.at("head").get<std::string>();
      bool head_is_receiver = false;
      for (const auto& r : j.at("receivers"))
        if (r.at("node").get<std::string>() == head) head_is_receiver = true;
      add(tail);
      if (!head_is_receiver) add(head);
    }
  }
  for (const auto& r : j.at("receivers"))
    if (!explicit_nodes) add(r.at("node").get<std::string>());

  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    Edge ed;
    ed.tail = node_of(e.at("tail"));
    ed.head = node_of(e.at("head"));
    ed.bandwidth = get_or<int>(e, "bandwidth", 1);
    if (e.contains("power")) ed.power_cap = e.at("power").get<double>();
    if (e.contains("noise_variance"))
      ed.noise_cov = Matrix(e.at("noise_variance").get<double>() * Matrix::Identity(ed.bandwidth, ed.bandwidth));
    if (e.contains("noise_cov")) ed.noise_cov = matrix_from_json(e.at("noise_cov"), "noise_cov");
    edges.push_back(std::move(ed));
  }

  std::vector<NodeId> src_ids, rcv_ids;
  std::map<int, int> dim_of;
  for (const auto& s : j.at("sources")) {
    const int id = node_of(s.at("node"));
    src_ids.push_back(id);
    dim_of[id] = get_or<int>(s, "dim", 0);
    if (dim_of[id] < 1) fail("source '" + names[static_cast<size_t>(id)] + "' needs a positive dim");
  }
  for (const auto& r : j.at("receivers")) rcv_ids.push_back(node_of(r.at("node")));

  NetworkConfig cfg;
  try {
    cfg.graph = LtnGraph(names, edges, src_ids, rcv_ids);
    validate(cfg.graph);
  } catch (const Error& e) {
    fail(e.what());
  }

  // x stacks source blocks in canonical (node) order.
  SourceModel& model = cfg.model;
  for (NodeId s : cfg.graph.sources())
    for (size_t k = 0; k < src_ids.size(); ++k)
      if (cfg.graph.canonical(src_ids[k]) == s) model.block_dims.push_back(dim_of[src_ids[k]]);
  model.sigma_x = covariance_from_json(j.at("covariance"), model.n(), base_dir);
  model.gaussian = get_or<bool>(j, "gaussian", true);

  std::map<NodeId, json> rspec;
  for (const auto& r : j.at("receivers")) rspec[cfg.graph.canonical(node_of(r.at("node")))] = r;
  const int n = model.n();
  for (NodeId r : cfg.graph.receivers()) {
    const json& spec = rspec.at(r);
    const json target = spec.contains("target") ? spec.at("target") : json::object({{"all", true}});
    Matrix a;
    if (target.contains("source")) {
      const int sid = cfg.graph.canonical(node_of(target.at("source")));
      const int si = cfg.graph.source_index(sid);
      if (si < 0) fail("target source is not a source node");
      a = block_selector(model.block_dims, si);
    } else if (target.contains("select")) {
      const auto idx = target.at("select").get<std::vector<int>>();
      a = Matrix::Zero(static_cast<Eigen::Index>(idx.size()), n);
      for (size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= n) fail("target index out of range");
        a(static_cast<Eigen::Index>(k), idx[k]) = 1.0;
      }
    } else if (target.contains("matrix")) {
      a = matrix_from_json(target.at("matrix"), "target matrix");
      if (a.cols() != n) fail("target matrix width must equal the source dimension");
    } else {
      a = Matrix::Identity(n, n);
    }
    model.targets.push_back(linear_target(r, model.sigma_x, a, get_or<double>(spec, "weight", 1.0)));
  }
  try {
    validate_model(model);
    cfg.W = build_weight_matrix(model);
  } catch (const Error& e) {
    fail(e.what());
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    const std::string mode = get_or<std::string>(s, "mode", "ideal");
    if (mode != "ideal" && mode != "noisy") fail("solver mode must be ideal or noisy");
    cfg.noisy = mode == "noisy";
    read_solver(s, cfg.ideal, cfg.noisy_options);
  }
  return cfg;
}

}  // namespace

NetworkConfig parse_network_config(const std::string& text, const std::string& base_dir) {
  try {
    return parse_network(json::parse(text), base_dir);
  } catch (const json::exception& e) {
    fail(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(e.what());
  }
}

NetworkConfig load_network_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

HybridConfig load_hybrid_config(const std::string& path) try {
  const json j = read_json_file(path);
  HybridConfig c;
  c.c34 = get_or<int>(j, "c34", c.c34);
  c.n1 = get_or<int>(j, "n1", c.n1);
  c.n2 = get_or<int>(j, "n2", c.n2);
  c.c_values = get_or<std::vector<int>>(j, "c_values", {});
  c.trace_c = get_or<int>(j, "trace_c", c.trace_c);
  c.covariance_seed = get_or<std::uint64_t>(j, "covariance_seed", c.covariance_seed);
  NoisyOptions unused;
  if (j.contains("solver")) read_solver(j.at("solver"), c.solver, unused);
  if (c.c34 < 1 || c.n1 < 1 || c.n2 < 1) fail("hybrid dimensions must be positive");
  for (int v : c.c_values)
    if (v < 1) fail("c_values must be positive");
  return c;
} catch (const json::exception& e) {
  fail(path + ": " + e.what());
}

NoisyGridConfig load_noisy_grid_config(const std::string& path) try {
  const json j = read_json_file(path);
  NoisyGridConfig c;
  c.alphas = get_or<std::vector<double>>(j, "alphas", c.alphas);
  if (j.contains("snr_db")) {
    const json& s = j.at("snr_db");
    if (s.is_array()) {
      c.snr_db = s.get<std::vector<double>>();
    } else {
      const double start = get_or<double>(s, "start", -10), stop = get_or<double>(s, "stop", 30),
                   step = get_or<double>(s, "step", 2);
      if (!(step > 0.0)) fail("snr step must be positive");
      for (double v = start; v <= stop + 1e-9; v += step) c.snr_db.push_back(v);
    }
  }
  c.rho = get_or<double>(j, "rho", c.rho);
  c.block_dim = get_or<int>(j, "block_dim", c.block_dim);
  c.sources = get_or<int>(j, "sources", c.sources);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    c.restarts = get_or<int>(s, "restarts", c.restarts);
    c.seed = get_or<std::uint64_t>(s, "seed", c.seed);
    c.eps = get_or<double>(s, "eps", c.eps);
    c.max_iter = get_or<int>(s, "max_iter", c.max_iter);
    c.threads = get_or<int>(s, "threads", c.threads);
  }
  if (c.alphas.empty()) fail("alphas must be nonempty");
  for (double a : c.alphas)
    if (!(a > 0.0 && a <= 1.0)) fail("alphas must lie in (0, 1]");
  if (c.restarts < 1 || c.max_iter < 1) fail("solver settings out of range");
  return c;
} catch (const json::exception& e) {
  fail(path + ": " + e.what());
}

UnicastConfig load_unicast_config(const std::string& path) try {
  const json j = read_json_file(path);
  UnicastConfig c;
  if (j.contains("covariance"))
    c.sigma_x = covariance_from_json(j.at("covariance"), 8, std::filesystem::path(path).parent_path().string());
  c.weights = get_or<int>(j, "weights", c.weights);
  c.ratio_min = get_or<double>(j, "ratio_min", c.ratio_min);
  c.ratio_max = get_or<double>(j, "ratio_max", c.ratio_max);
  c.trials = get_or<int>(j, "trials", c.trials);
  NoisyOptions unused;
  if (j.contains("solver")) read_solver(j.at("solver"), c.solver, unused);
  if (c.weights < 1 || c.trials < 1 || !(c.ratio_min > 0.0) || !(c.ratio_max >= c.ratio_min))
    fail("multiple-unicast settings out of range");
  return c;
} catch (const json::exception& e) {
  fail(path + ": " + e.what());
}

}  // namespace ltn
