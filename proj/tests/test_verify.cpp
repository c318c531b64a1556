#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polyham/field_theory.hpp"
#include "polyham/verify.hpp"
#include "support/models.hpp"

using namespace polyham;
using namespace polyham::testing;

namespace {

const std::string kDir = POLYHAM_CONFIG_DIR;

SamplingPlan plan_for(Dims d, std::size_t count, std::uint64_t seed, Range t, Range x, Range p) {
  return {seed, count, std::vector<Range>(d.m, t), std::vector<Range>(d.n, x), std::vector<Range>(d.n * d.m, p)};
}

const CheckResult& find(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::out_of_range(name);
}

}  // namespace

TEST_CASE("flat model: every check passes with zero residuals") {
  const auto loaded = load_config(kDir + "/flat.json");
  const auto report = run_verification(loaded, 20);
  CHECK(report.pass);
  CHECK(report.model_hash == loaded.model_hash);
  CHECK(report.checks.size() == check_names().size());
  for (const auto& c : report.checks) {
    INFO(c.name);
    CHECK(c.pass);
    CHECK(c.samples == 20);
    CHECK(c.max_abs <= 1e-13);
    CHECK(c.error.empty());
  }
}

TEST_CASE("curved models pass; block 2 with n = 3 does not") {
  for (const auto& model : {sphere_time_model(), warped_model()}) {
    const auto rep = run_verification(model, plan_for(model.dims(), 30, 9, {-0.5, 0.5}, {0.4, 1.2}, {-2, 2}));
    for (const auto& c : rep.checks) {
      INFO(c.name, " ", c.max_rel, " ", c.error);
      CHECK(c.pass);
    }
    CHECK(rep.pass);
  }
  const auto w3 = warped3_model();
  const auto rep = run_verification(w3, plan_for(w3.dims(), 10, 9, {-0.4, 0.4}, {-0.4, 0.4}, {-2, 2}));
  CHECK_FALSE(find(rep, "maxwell_2").pass);
  CHECK(find(rep, "maxwell_1").pass);
  CHECK(find(rep, "maxwell_3").pass);
  CHECK(find(rep, "deflection_consistency").pass);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("determinism across seeds and thread counts") {
  const auto model = sphere_time_model();
  const auto plan = plan_for(model.dims(), 25, 11, {-1, 1}, {0.3, 2.8}, {-2, 2});
  VerifyOptions one, many;
  one.threads = 1;
  many.threads = 7;
  const auto a = run_verification(model, plan, one);
  const auto b = run_verification(model, plan, many);
  CHECK(a == b);
  CHECK(format_report(a, ReportFormat::json) == format_report(b, ReportFormat::json));
  auto other = plan;
  other.seed = 12;
  CHECK(format_report(run_verification(model, other), ReportFormat::json) !=
        format_report(a, ReportFormat::json));
}

TEST_CASE("evaluation errors are recorded as failures") {
  // phi_11 = 2 + log(x1) is undefined on the whole box.
  const auto bad = make_model({1, 2}, {1.0, 1.0, 1.0}, {"1"}, {"2 + log(x1)", "0", "0", "1"}, {"0", "0"}, "0");
  const auto rep = run_verification(bad, plan_for(bad.dims(), 5, 1, {0, 1}, {-1, -0.5}, {-1, 1}));
  CHECK_FALSE(rep.pass);
  for (const auto& c : rep.checks) {
    INFO(c.name);
    CHECK_FALSE(c.pass);
    CHECK(c.error.find("domain error") != std::string::npos);
  }
  const std::string json = format_report(rep, ReportFormat::json);
  CHECK(parse_report(json) == rep);
}

TEST_CASE("report formats") {
  VerificationReport empty;
  const auto j = nlohmann::json::parse(format_report(empty, ReportFormat::json));
  CHECK(j["checks"].empty());
  CHECK(j["pass"] == true);
  CHECK(parse_report(j.dump()) == empty);

  VerificationReport r;
  r.model_hash = "00ff00ff00ff00ff";
  r.seed = 18446744073709551615ull;
  r.checks.push_back({"alpha", 10, 1.5e-13, 0.1 + 0.2, 1e-8, true, ""});
  r.checks.push_back({"beta_check", 3, 2.0, 1.0 / 3.0, 0.0, false, ""});
  r.pass = false;
  const std::string text = format_report(r, ReportFormat::json);
  CHECK(parse_report(text) == r);
  const auto parsed = nlohmann::ordered_json::parse(text);
  CHECK(parsed.begin().key() == "model_hash");
  CHECK(parsed["checks"][1]["pass"] == false);
  CHECK_FALSE(parsed["checks"][0].contains("error"));

  const std::string table = format_report(r, ReportFormat::text);
  std::istringstream lines(table);
  std::string header, line1, line2, line3;
  std::getline(lines, header);
  std::getline(lines, line1);
  std::getline(lines, line2);
  std::getline(lines, line3);
  CHECK(line1.find("tol") + 3 == line2.find("1.0e-08") + 7);
  CHECK(line2.size() == line3.size());
  CHECK(line3.find("FAIL") != std::string::npos);
  CHECK(table.find("overall: FAIL") != std::string::npos);

  CHECK_THROWS_AS(parse_report("{"), ParseError);
  CHECK_THROWS_AS(parse_report(R"({"seed": 1})"), SchemaError);
}

TEST_CASE("emit_report writes files and reports I/O errors") {
  VerificationReport r;
  r.model_hash = "0123456789abcdef";
  r.checks.push_back({"alpha", 1, 0.0, 0.0, 1e-9, true, ""});
  const auto path = std::filesystem::temp_directory_path() / "polyham_report_test.json";
  emit_report(r, ReportFormat::json, path.string());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == format_report(r, ReportFormat::json));
  CHECK(parse_report(buf.str()) == r);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_report(r, ReportFormat::json, "/nonexistent-dir/x/report.json"), IoError);
}

TEST_CASE("negative control: a sign error in the deflections is caught") {
  // Flip the sign of the closed-form spatial deflection and compare with the covariant route.
  const auto model = sphere_time_model();
  const LocalModel lm(model, {{0.2}, {1.1, 0.4}, {{0.7}, {-1.2}}}, 1);
  const auto closed = deflections_closed(lm);
  const auto cov = deflections_covariant(lm);
  const DTensor good = values(closed.delta_x), broken = scaled(good, -1.0), ref = values(cov.delta_x);
  CHECK(max_abs_diff(good, ref) <= 1e-12 * std::max(1.0, max_abs(ref)));
  CHECK(max_abs_diff(broken, ref) > 1e-3);
}
