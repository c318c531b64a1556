#include "polyham/verify.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "polyham/field_theory.hpp"

namespace polyham {

namespace {

struct Sample {
  double abs = 0.0;
  double scale = 0.0;
};

Sample from(const Residual& r) { return {r.max_abs, r.scale}; }

double max_of(const JetTensor& t) { return t.size() ? max_abs(values(t)) : 0.0; }

// Cyclic sum over the three lower slots of R^l_ijk.
Sample first_bianchi(const DTensor& r) {
  const std::size_t d = r.extent(0);
  Sample s{0.0, max_abs(r)};
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
          s.abs = std::max(s.abs, std::abs(r.at({l, i, j, k}) + r.at({l, j, k, i}) + r.at({l, k, i, j})));
  return s;
}

// Largest |T[..., a, b] + T[..., b, a]| over the last two slots.
double antisymmetry_defect(const DTensor& t) {
  const std::size_t r = t.rank();
  double worst = 0;
  for (std::size_t f = 0; f < t.size(); ++f) {
    MultiIndex idx = t.unflat(f);
    std::swap(idx[r - 2], idx[r - 1]);
    worst = std::max(worst, std::abs(t[f] + t.at(std::span<const std::size_t>(idx.data(), r))));
  }
  return worst;
}

double difference_of(const DTensor& a, const DTensor& b) { return max_abs_diff(a, b); }

using CheckFn = std::function<Sample(const ElectrodynamicsModel&, const JetPoint&, double k)>;

struct CheckSpec {
  std::string name;
  double tol;
  CheckFn run;
};

BasePoint base(const JetPoint& jp) { return {jp.t, jp.x}; }

const std::vector<CheckSpec>& checks() {
  static const std::vector<CheckSpec> all = {
      {"metric_compatibility", 1e-12,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const BaseGeometry geo(model.h(), model.phi(), base(jp), 2);
         Sample s;
         for (IndexClass c : {IndexClass::temporal, IndexClass::spatial}) {
           const MetricGeometry& g = geo.of(c);
           s.abs = std::max(s.abs, max_of(levi_civita_derivative(g.metric, g)));
           s.scale = std::max(s.scale, max_of(g.metric) * std::max(1.0, max_of(g.christoffel)));
         }
         return s;
       }},
      {"bianchi_first", 1e-12,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         Sample s;
         for (const MetricField* g : {&model.h(), &model.phi()}) {
           const Sample b = first_bianchi(riemann_curvature(*g, base(jp)));
           s.abs = std::max(s.abs, b.abs);
           s.scale = std::max(s.scale, b.scale);
         }
         return s;
       }},
      {"bianchi_contracted", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         Sample s;
         for (const MetricField* g : {&model.h(), &model.phi()}) {
           s.abs = std::max(s.abs, bianchi_residual(*g, base(jp)));
           s.scale = std::max(s.scale, 1.0 + max_abs(riemann_curvature(*g, base(jp))));
         }
         return s;
       }},
      {"legendre_duality", 1e-9,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         // The sampled p grid is used as a velocity.
         const Grid& v = jp.p;
         const double l = lagrangian(model, base(jp), v);
         const Grid p = legendre_momenta(model, base(jp), v);
         double pv = 0;
         for (std::size_t i = 0; i < v.size(); ++i)
           for (std::size_t a = 0; a < v[i].size(); ++a) pv += p[i][a] * v[i][a];
         const double h = hamiltonian(model, {jp.t, jp.x, p});
         return Sample{std::abs(h - (pv - l)), 1.0 + std::abs(l)};
       }},
      {"deflection_consistency", 1e-9,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const auto rep = deflection_tensors(model, jp);
         return Sample{rep.residual.max_abs, std::max(1.0, rep.residual.scale)};
       }},
      {"torsion_antisymmetry", 1e-12,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const auto t = torsions(model, jp);
         return Sample{std::max(antisymmetry_defect(t.r_tt), antisymmetry_defect(t.r_xx)),
                       std::max(max_abs(t.r_tt), max_abs(t.r_xx))};
       }},
      {"maxwell_1", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         return from(maxwell_residuals(model, jp).r1);
       }},
      {"maxwell_2", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         return from(maxwell_residuals(model, jp).r2);
       }},
      {"maxwell_3", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         return from(maxwell_residuals(model, jp).r3);
       }},
      {"einstein_trace", 1e-10,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double k) {
         const Dims d = model.dims();
         const auto eb = stress_energy(model, base(jp), k);
         const auto g = gravitational_potential(model, base(jp));
         const DTensor h_inv = invert_metric(g.temporal);
         const DTensor phi_inv = invert_metric(g.spatial);
         double tr = 0;
         for (std::size_t a = 0; a < d.m; ++a)
           for (std::size_t b = 0; b < d.m; ++b) tr += h_inv.at({a, b}) * eb.t_tt.at({a, b});
         for (std::size_t i = 0; i < d.n; ++i)
           for (std::size_t j = 0; j < d.n; ++j) tr += phi_inv.at({i, j}) * eb.t_xx.at({i, j});
         for (std::size_t i = 0; i < d.n; ++i)
           for (std::size_t a = 0; a < d.m; ++a)
             for (std::size_t j = 0; j < d.n; ++j)
               for (std::size_t b = 0; b < d.m; ++b)
                 tr += h_inv.at({a, b}) * g.spatial.at({i, j}) * eb.t_vertical.at({i, a, j, b});
         const double dim = static_cast<double>(d.m + d.n + d.n * d.m);
         const double expect = eb.scalar * (1 - dim / 2);
         return Sample{std::abs(k * tr - expect), std::max(1.0, std::abs(expect))};
       }},
      {"scalar_decomposition", 1e-10,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const auto sc = cartan_scalar_curvature(model, base(jp));
         return Sample{std::abs(sc.recomputed - sc.decomposed), std::max(1.0, std::abs(sc.decomposed))};
       }},
      {"conservation_T", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         return from(conservation_residuals(model, base(jp)).t);
       }},
      {"conservation_M", 1e-8,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         return from(conservation_residuals(model, base(jp)).m);
       }},
      {"p_independence", 0.0,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const auto bare = model.with_scalar_potential(parse("0", coordinate_names(model.dims())));
         const auto n1 = nonlinear_connection(model, jp), n0 = nonlinear_connection(bare, jp);
         const auto t1 = torsions(model, jp), t0 = torsions(bare, jp);
         const auto d1 = deflection_tensors(model, jp).closed, d0 = deflection_tensors(bare, jp).closed;
         const double diff = std::max({difference_of(n1.n1, n0.n1), difference_of(n1.n2, n0.n2),
                                       difference_of(t1.r_tt, t0.r_tt), difference_of(t1.r_tx, t0.r_tx),
                                       difference_of(t1.r_xx, t0.r_xx), difference_of(d1.delta_x, d0.delta_x),
                                       difference_of(d1.theta, d0.theta)});
         return Sample{diff, 1.0};
       }},
      {"e_to_zero", 0.0,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double) {
         const auto neutral = model.with_charge(0.0);
         const double v = std::max({max_abs(electromagnetic_form(neutral, base(jp)).big_f),
                                    max_abs(deflection_tensors(neutral, jp).closed.delta_x),
                                    max_abs(torsions(neutral, jp).r_tx)});
         return Sample{v, 1.0};
       }},
      {"structural_zeros", 0.0,
       [](const ElectrodynamicsModel& model, const JetPoint& jp, double k) {
         const auto cc = cartan_connection(model, base(jp));
         double v = std::max({max_abs(cc.a_mixed), max_abs(cc.c_vertical),
                              max_abs(electromagnetic_form(model, base(jp)).small_f)});
         for (const auto& [name, block] : stress_energy(model, base(jp), k).zero_blocks)
           v = std::max(v, max_abs(block));
         return Sample{v, 1.0};
       }},
  };
  return all;
}

std::uint64_t name_seed(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct Outcome {
  Sample s;
  bool ok = false;
  std::string error;
};

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& c : checks()) out.push_back(c.name);
    return out;
  }();
  return names;
}

VerificationReport run_verification(const ElectrodynamicsModel& model, const SamplingPlan& plan,
                                    const VerifyOptions& options) {
  const auto& specs = checks();
  const std::size_t count = plan.count;
  std::vector<Outcome> outcomes(specs.size() * count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next.fetch_add(1)) < outcomes.size();) {
      const CheckSpec& spec = specs[task / count];
      const std::size_t sample = task % count;
      const std::uint64_t stream = splitmix64(splitmix64(plan.seed ^ name_seed(spec.name)) + sample);
      Outcome& out = outcomes[task];
      try {
        out.s = spec.run(model, sample_point(plan, stream), options.einstein_k);
        if (!std::isfinite(out.s.abs) || !std::isfinite(out.s.scale)) {
          out.error = "sample " + std::to_string(sample) + ": residual is not finite";
        } else {
          out.ok = out.s.abs <= kAbsoluteFloor || out.s.abs <= spec.tol * out.s.scale;
        }
      } catch (const std::exception& e) {
        out.error = "sample " + std::to_string(sample) + ": " + e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, outcomes.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  VerificationReport report;
  report.model_hash = options.model_hash;
  report.seed = plan.seed;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    CheckResult r;
    r.name = specs[c].name;
    r.samples = count;
    r.tol = specs[c].tol;
    for (std::size_t s = 0; s < count; ++s) {
      const Outcome& o = outcomes[c * count + s];
      if (!o.error.empty()) {
        if (r.error.empty()) r.error = o.error;
        r.pass = false;
        continue;
      }
      r.max_abs = std::max(r.max_abs, o.s.abs);
      r.max_rel = std::max(r.max_rel, o.s.scale > 0 ? o.s.abs / o.s.scale : o.s.abs);
      r.pass = r.pass && o.ok;
    }
    report.pass = report.pass && r.pass;
    report.checks.push_back(std::move(r));
  }
  return report;
}

VerificationReport run_verification(const LoadedModel& loaded, std::optional<std::size_t> count,
                                    std::optional<std::uint64_t> seed) {
  SamplingPlan plan = loaded.config.sampling;
  if (count) plan.count = *count;
  if (seed) plan.seed = *seed;
  VerifyOptions opt;
  opt.einstein_k = loaded.config.einstein_k;
  opt.model_hash = loaded.model_hash;
  return run_verification(loaded.model, plan, opt);
}

namespace {

nlohmann::ordered_json to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["model_hash"] = report.model_hash;
  j["seed"] = report.seed;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["samples"] = c.samples;
    e["max_abs"] = c.max_abs;
    e["max_rel"] = c.max_rel;
    e["tol"] = c.tol;
    e["pass"] = c.pass;
    if (!c.error.empty()) e["error"] = c.error;
    j["checks"].push_back(std::move(e));
  }
  j["pass"] = report.pass;
  return j;
}

std::string text_table(const VerificationReport& report) {
  std::size_t width = 5;
  for (const auto& c : report.checks) width = std::max(width, c.name.size());
  std::ostringstream out;
  out << "model " << report.model_hash << "  seed " << report.seed << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %8s %12s %12s %10s  %s\n", static_cast<int>(width), "check", "samples",
                "max_abs", "max_rel", "tol", "result");
  out << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-*s %8zu %12.4e %12.4e %10.1e  %s\n", static_cast<int>(width),
                  c.name.c_str(), c.samples, c.max_abs, c.max_rel, c.tol, c.pass ? "PASS" : "FAIL");
    out << line;
    if (!c.error.empty()) out << "  error: " << c.error << "\n";
  }
  out << "overall: " << (report.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace

std::string format_report(const VerificationReport& report, ReportFormat format) {
  if (format == ReportFormat::text) return text_table(report);
  return to_json(report).dump(2) + "\n";
}

void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path) {
  const std::string body = format_report(report, format);
  if (path.empty()) {
    std::cout << body << std::flush;
    if (!std::cout) throw IoError("cannot write report to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  out.close();
  if (!out) throw IoError("cannot write " + path);
}

VerificationReport parse_report(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  try {
    VerificationReport r;
    r.model_hash = j.at("model_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("checks")) {
      CheckResult c;
      c.name = e.at("name").get<std::string>();
      c.samples = e.at("samples").get<std::size_t>();
      c.max_abs = e.at("max_abs").get<double>();
      c.max_rel = e.at("max_rel").get<double>();
      c.tol = e.at("tol").get<double>();
      c.pass = e.at("pass").get<bool>();
      if (e.contains("error")) c.error = e.at("error").get<std::string>();
      r.checks.push_back(std::move(c));
    }
    r.pass = j.at("pass").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

}  // namespace polyham
