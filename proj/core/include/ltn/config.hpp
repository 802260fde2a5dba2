/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <string>

#include "ltn/experiments.hpp"
#include "ltn/opt_ideal.hpp"
#include "ltn/opt_noisy.hpp"

namespace ltn {

// A network plus statistics and solver settings read from a JSON document.
// The schema is described in README.md. All problems raise ConfigError.
struct NetworkConfig {
  LtnGraph graph;
  SourceModel model;
  Matrix W;
  bool noisy = false;
  IdealOptions ideal;
  NoisyOptions noisy_options;
};

NetworkConfig parse_network_config(const std::string& json_text, const std::string& base_dir = ".");
NetworkConfig load_network_config(const std::string& path);

HybridConfig load_hybrid_config(const std::string& path);
NoisyGridConfig load_noisy_grid_config(const std::string& path);
UnicastConfig load_unicast_config(const std::string& path);

}  // namespace ltn
