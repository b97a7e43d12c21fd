#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "tph/kernels.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

enum class Verdict { pass, fail, undetermined, not_applicable };

std::string to_string(Verdict v);

struct CheckInfo {
  std::string id;
  std::string anchor;  // the property the check stands for
};

const std::vector<CheckInfo>& registry();

struct CertReport {
  std::string id;
  Verdict verdict = Verdict::undetermined;
  std::string reason;
  nlohmann::json margins = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json witness = nlohmann::json::object();
  double seconds = 0.0;
};

struct VerifyConfig {
  int grid = 512;            // invariance grid
  int expansion_grid = 256;
  int k_max = 20;
  int slope_grid = 128;
  int centre_samples = 1000;
  int centre_depth = 40;
  int n_levels = 8;
  int box_steps = 40;
  double r0 = 0.1;
  double curve_length = 1.0;
  double step = 1e-4;
  int conjugation_trials = 100;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
};

// Every registry id exactly once, in registry order.
std::vector<CertReport> run_all(const TorusEndo& f, const VerifyConfig& cfg = {});

// Single checks that do not depend on a build.
CertReport check_conjugation(int trials, std::uint64_t seed);

nlohmann::json report_json(const TorusEndo& f, const VerifyConfig& cfg, const std::vector<CertReport>& reports);
std::string summary_table(const std::vector<CertReport>& reports);
// Any FAIL verdict.
bool any_fail(const std::vector<CertReport>& reports);

}  // namespace tph
