#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dnlskam/kam.hpp"

namespace dnlskam {

struct ConfigError : std::invalid_argument {
  std::string key;
  ConfigError(std::string k, const std::string& what)
      : std::invalid_argument(k + ": " + what), key(std::move(k)) {}
};

struct RunConfig {
  static constexpr int kSchemaVersion = 1;
  KamConfig kam;
  double alpha0_rho_factor = 1e-3;  // used when alpha0 is not given
  bool alpha0_given = false;
  bool bypass_admissibility = false;
  std::vector<double> alpha_sweep;
  int measure_Pi = 0;  // 0: J_max
  int appendix_samples = 500;
  int appendix_kmax = 40;

  RunConfig();
  double rho() const;  // r^{3/2}/sqrt(n)
  // fills alpha0 from rho when it was not given, then checks every constraint
  void finalize();
  void validate() const;
};

// JSON text with "schema_version"; unknown keys throw ConfigError
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& c);

}  // namespace dnlskam
