#pragma once

// Identity suite over sampled points of E*, and its report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyham/config.hpp"

namespace polyham {

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tol = 0.0;
  bool pass = true;
  std::string error;  // first per-sample evaluation error, if any

  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct VerificationReport {
  std::string model_hash;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool pass = true;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

// A sample passes when its residual is at most kAbsoluteFloor, or at most tol * scale.
inline constexpr double kAbsoluteFloor = 1e-12;

struct VerifyOptions {
  double einstein_k = 1.0;
  std::string model_hash;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Names of the checks, in report order.
const std::vector<std::string>& check_names();

// Deterministic in (model, plan.seed, plan.count); thread count does not change the result.
VerificationReport run_verification(const ElectrodynamicsModel& model, const SamplingPlan& plan,
                                    const VerifyOptions& options = {});
VerificationReport run_verification(const LoadedModel& loaded, std::optional<std::size_t> count = {},
                                    std::optional<std::uint64_t> seed = {});

enum class ReportFormat { json, text };

std::string format_report(const VerificationReport& report, ReportFormat format);
// Empty path writes to stdout. Throws IoError.
void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path = "");
// Inverse of the JSON format. Throws ParseError or SchemaError.
VerificationReport parse_report(const std::string& json_text);

}  // namespace polyham
