// polyham: load, inspect and verify electrodynamics models on the dual jet space.
//
//   polyham check  <config>
//   polyham compute <config> --at t=...,x=...,p=... [--object N|torsion|F|einstein|all]
//   polyham verify <config> [--samples N] [--seed S] [--format json|text] [--out PATH]
//
// Exit status: 0 success / all checks pass, 1 verification or evaluation failure,
// 2 usage, config or I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyham/config.hpp"
#include "polyham/field_theory.hpp"
#include "polyham/verify.hpp"

using namespace polyham;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

// "t=0.1,x=1.2,0.5,p=0.3,0.1"; p is row-major over (i, a) and defaults to zero.
JetPoint parse_point(const std::string& spec, Dims d) {
  std::vector<double> t, x, p;
  std::vector<double>* cur = nullptr;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    std::string tok = spec.substr(start, end - start);
    start = end + 1;
    if (auto eq = tok.find('='); eq != std::string::npos) {
      const std::string key = tok.substr(0, eq);
      if (key == "t") cur = &t;
      else if (key == "x") cur = &x;
      else if (key == "p") cur = &p;
      else throw CLI::ValidationError("--at", "unknown coordinate group '" + key + "'");
      tok = tok.substr(eq + 1);
    }
    if (!cur) throw CLI::ValidationError("--at", "expected t=, x= or p= first");
    try {
      std::size_t used = 0;
      cur->push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--at", "bad number '" + tok + "'");
    }
    if (end == spec.size()) break;
  }
  if (t.size() != d.m || x.size() != d.n || (!p.empty() && p.size() != d.n * d.m))
    throw CLI::ValidationError("--at", "expected " + std::to_string(d.m) + " t, " + std::to_string(d.n) +
                                           " x and " + std::to_string(d.n * d.m) + " p values");
  JetPoint jp{t, x, std::vector<std::vector<double>>(d.n, std::vector<double>(d.m, 0.0))};
  for (std::size_t k = 0; k < p.size(); ++k) jp.p[k / d.m][k % d.m] = p[k];
  return jp;
}

ojson nested(const DTensor& t, std::size_t slot, std::size_t& flat) {
  if (slot == t.rank()) return t[flat++];
  ojson arr = ojson::array();
  for (std::size_t k = 0; k < t.extent(slot); ++k) arr.push_back(nested(t, slot + 1, flat));
  return arr;
}

ojson tensor_json(const DTensor& t) {
  ojson j;
  j["slots"] = describe(t.slots());
  std::size_t flat = 0;
  j["values"] = nested(t, 0, flat);
  return j;
}

ojson compute(const LoadedModel& lm, const JetPoint& jp, const std::string& object) {
  const BasePoint bp{jp.t, jp.x};
  const bool all = object == "all";
  ojson out;
  if (all || object == "N") {
    const auto n = nonlinear_connection(lm.model, jp);
    out["N"] = {{"N1", tensor_json(n.n1)}, {"N2", tensor_json(n.n2)}};
  }
  if (all || object == "torsion") {
    const auto r = torsions(lm.model, jp);
    out["torsion"] = {{"R_tt", tensor_json(r.r_tt)}, {"R_tx", tensor_json(r.r_tx)}, {"R_xx", tensor_json(r.r_xx)}};
  }
  if (all || object == "F") {
    const auto f = electromagnetic_form(lm.model, bp);
    out["F"] = {{"F", tensor_json(f.big_f)}, {"f", tensor_json(f.small_f)}};
  }
  if (all || object == "einstein") {
    const auto e = stress_energy(lm.model, bp, lm.config.einstein_k);
    ojson j;
    j["k"] = e.k;
    j["scalar_curvature"] = e.scalar;
    j["T_tt"] = tensor_json(e.t_tt);
    j["T_xx"] = tensor_json(e.t_xx);
    j["T_vertical"] = tensor_json(e.t_vertical);
    out["einstein"] = j;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polymomentum electrodynamics: model checks, pointwise objects, identity verification"};
  app.require_subcommand(1);

  std::string config;
  auto* check = app.add_subcommand("check", "Load and validate a model file");
  check->add_option("config", config, "Model file")->required();

  std::string at, object = "all";
  auto* comp = app.add_subcommand("compute", "Print objects at one point as JSON");
  comp->add_option("config", config, "Model file")->required();
  comp->add_option("--at", at, "Point, e.g. t=0.1,x=1.2,0.5,p=0.3,0.1")->required();
  comp->add_option("--object", object, "Object to print")
      ->check(CLI::IsMember({"N", "torsion", "F", "einstein", "all"}));

  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string format = "json", out_path;
  auto* ver = app.add_subcommand("verify", "Run the identity suite");
  ver->add_option("config", config, "Model file")->required();
  ver->add_option("--samples", samples, "Samples per check (default: from the model file)");
  ver->add_option("--seed", seed, "Seed (default: from the model file)");
  ver->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  ver->add_option("--out", out_path, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  LoadedModel* loaded = nullptr;
  std::optional<LoadedModel> holder;
  try {
    holder.emplace(load_config(config));
    loaded = &*holder;
  } catch (const Error& e) {
    std::cerr << "polyham: " << e.what() << "\n";
    return kInputError;
  }

  if (*check) {
    std::cout << "ok: m=" << loaded->config.dims.m << " n=" << loaded->config.dims.n << " hash "
              << loaded->model_hash << "\n";
    return kPass;
  }

  if (*comp) {
    JetPoint jp;
    try {
      jp = parse_point(at, loaded->config.dims);
    } catch (const CLI::ValidationError& e) {
      std::cerr << "polyham: " << e.what() << "\n";
      return kInputError;
    }
    try {
      std::cout << compute(*loaded, jp, object).dump(2) << "\n";
    } catch (const Error& e) {
      std::cerr << "polyham: " << e.what() << "\n";
      return kFail;
    }
    return kPass;
  }

  const VerificationReport report = run_verification(*loaded, samples, seed);
  try {
    emit_report(report, format == "text" ? ReportFormat::text : ReportFormat::json, out_path);
  } catch (const IoError& e) {
    std::cerr << "polyham: " << e.what() << "\n";
    return kInputError;
  }
  return report.pass ? kPass : kFail;
}
