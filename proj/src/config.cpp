#include "polyham/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace polyham {

using nlohmann::json;

ConfigParseError::ConfigParseError(std::string file, std::size_t line, std::size_t column, std::size_t offset,
                                   const std::string& what)
    : ParseError(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      file_(std::move(file)),
      line_(line),
      column_(column),
      offset_(offset) {}

std::string model_hash(std::string_view canonical_json) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

JetPoint sample_point(const SamplingPlan& plan, std::uint64_t stream_seed) {
  std::mt19937_64 rng(stream_seed);
  auto draw = [&](const Range& r) { return r.lo + (r.hi - r.lo) * uniform01(rng()); };
  JetPoint jp;
  for (const auto& r : plan.t_box) jp.t.push_back(draw(r));
  for (const auto& r : plan.x_box) jp.x.push_back(draw(r));
  const std::size_t n = plan.x_box.size(), m = plan.t_box.size();
  jp.p.assign(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a) jp.p[i][a] = draw(plan.p_box[i * m + a]);
  return jp;
}

namespace {

struct Reader {
  std::string file;

  [[noreturn]] void schema(const std::string& where, const std::string& what) const {
    throw SchemaError(file + ": " + where + ": " + what);
  }

  void keys(const json& obj, const std::string& where, std::initializer_list<const char*> required,
            std::initializer_list<const char*> optional = {}) const {
    if (!obj.is_object()) schema(where, "expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
      known.insert(k);
      if (!obj.contains(k)) schema(where, std::string("missing key '") + k + "'");
    }
    for (const char* k : optional) known.insert(k);
    for (const auto& [k, v] : obj.items())
      if (!known.count(k)) schema(where, "unexpected key '" + k + "'");
  }

  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) schema(where, "expected a number");
    return v.get<double>();
  }

  std::size_t count(const json& v, const std::string& where) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) schema(where, "expected a nonnegative integer");
    return v.get<std::size_t>();
  }

  std::string expression(const json& v, const std::string& where) const {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    schema(where, "expected an expression string or a number");
  }

  std::vector<std::string> grid(const json& v, const std::string& where, std::size_t rows, std::size_t cols) const {
    if (!v.is_array() || v.size() != rows)
      schema(where, "expected " + std::to_string(rows) + " rows");
    std::vector<std::string> out;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rw = where + "[" + std::to_string(r) + "]";
      if (!v[r].is_array() || v[r].size() != cols) schema(rw, "expected " + std::to_string(cols) + " entries");
      for (std::size_t c = 0; c < cols; ++c) out.push_back(expression(v[r][c], rw + "[" + std::to_string(c) + "]"));
    }
    return out;
  }

  Range range(const json& v, const std::string& where) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      schema(where, "expected a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<Range> box(const json& v, const std::string& where, std::size_t count) const {
    if (v.is_array() && v.size() == 2 && v[0].is_number()) return std::vector<Range>(count, range(v, where));
    if (!v.is_array() || v.size() != count)
      schema(where, "expected one [lo, hi] pair or " + std::to_string(count) + " of them");
    std::vector<Range> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(range(v[k], where + "[" + std::to_string(k) + "]"));
    return out;
  }
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ModelConfig read_config(const json& doc, const Reader& rd) {
  rd.keys(doc, "<root>", {"dims", "constants", "h", "phi", "A", "P", "sampling"});
  ModelConfig cfg;

  const json& dims = doc["dims"];
  rd.keys(dims, "dims", {"m", "n"});
  cfg.dims = {rd.count(dims["m"], "dims.m"), rd.count(dims["n"], "dims.n")};
  if (cfg.dims.m == 0 || cfg.dims.n == 0) throw ValidationError(rd.file + ": dims must be positive");

  const json& k = doc["constants"];
  rd.keys(k, "constants", {"mass", "charge", "light_speed"}, {"einstein_k"});
  cfg.constants = {rd.number(k["mass"], "constants.mass"), rd.number(k["charge"], "constants.charge"),
                   rd.number(k["light_speed"], "constants.light_speed")};
  if (k.contains("einstein_k")) cfg.einstein_k = rd.number(k["einstein_k"], "constants.einstein_k");

  const auto [m, n] = cfg.dims;
  cfg.h = rd.grid(doc["h"], "h", m, m);
  cfg.phi = rd.grid(doc["phi"], "phi", n, n);
  cfg.a = rd.grid(doc["A"], "A", n, m);
  cfg.p = rd.expression(doc["P"], "P");

  const json& s = doc["sampling"];
  rd.keys(s, "sampling", {"seed", "count", "t_box", "x_box", "p_box"});
  if (!s["seed"].is_number_unsigned()) rd.schema("sampling.seed", "expected a nonnegative integer");
  cfg.sampling.seed = s["seed"].get<std::uint64_t>();
  cfg.sampling.count = rd.count(s["count"], "sampling.count");
  cfg.sampling.t_box = rd.box(s["t_box"], "sampling.t_box", m);
  cfg.sampling.x_box = rd.box(s["x_box"], "sampling.x_box", n);
  cfg.sampling.p_box = rd.box(s["p_box"], "sampling.p_box", n * m);
  return cfg;
}

// Position of an expression's source string in the file (first occurrence).
ConfigParseError expression_error(std::string_view text, const std::string& file, const std::string& src,
                                  std::size_t offset, const std::string& what) {
  const std::size_t at = text.find(json(src).dump());
  if (at == std::string_view::npos) return {file, 0, 0, offset, what};
  const auto [line, col] = line_column(text, at + 1 + offset);
  return {file, line, col, offset, what};
}

std::vector<Expression> parse_grid(std::string_view text, const std::vector<std::string>& src,
                                   const std::vector<std::string>& names, const std::string& file,
                                   const std::string& key, std::size_t cols) {
  std::vector<Expression> out;
  for (std::size_t k = 0; k < src.size(); ++k) {
    const std::string where = cols == 0 ? key
                                        : key + "[" + std::to_string(k / cols) + "][" + std::to_string(k % cols) + "]";
    try {
      out.push_back(parse(src[k], names));
    } catch (const SyntaxError& e) {
      throw expression_error(text, file, src[k], e.offset(), where + ": " + e.what());
    } catch (const UnknownIdentifier& e) {
      throw expression_error(text, file, src[k], e.offset(), where + ": " + e.what());
    }
  }
  return out;
}

void validate(const ModelConfig& cfg, const ElectrodynamicsModel& model, const std::string& file) {
  auto fail = [&](const std::string& what) { throw ValidationError(file + ": " + what); };
  const auto& sp = cfg.sampling;
  for (const auto* box : {&sp.t_box, &sp.x_box, &sp.p_box})
    for (const auto& r : *box)
      if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) fail("sampling box is empty or not finite");
  if (sp.count == 0) fail("sampling.count must be positive");

  const Dims d = cfg.dims;
  for (int probe = 0; probe < 10; ++probe) {
    const JetPoint jp = sample_point(sp, splitmix64(sp.seed ^ 0x70726f6265ull) + probe);
    std::vector<double> vars(jp.t);
    vars.insert(vars.end(), jp.x.begin(), jp.x.end());
    std::ostringstream at;
    at.precision(6);
    for (double v : vars) at << (at.tellp() > 0 ? ", " : "") << v;
    try {
      for (const auto* metric : {&model.h(), &model.phi()}) {
        const char* name = metric == &model.h() ? "h" : "phi";
        const std::size_t dim = metric->dim();
        DTensor g({metric->cls() == IndexClass::temporal ? kTLo : kSLo,
                   metric->cls() == IndexClass::temporal ? kTLo : kSLo},
                  d);
        double big = 0;
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j) {
            g.at({i, j}) = metric->entry(i, j).eval(std::span<const double>(vars));
            if (!std::isfinite(g.at({i, j}))) fail(std::string(name) + " is not finite at (" + at.str() + ")");
            big = std::max(big, std::abs(g.at({i, j})));
          }
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = i + 1; j < dim; ++j)
            if (std::abs(g.at({i, j}) - g.at({j, i})) > 1e-12 * std::max(1.0, big))
              fail(std::string(name) + " is not symmetric: " + name + "[" + std::to_string(i + 1) + "][" +
                   std::to_string(j + 1) + "] != " + name + "[" + std::to_string(j + 1) + "][" +
                   std::to_string(i + 1) + "] at (" + at.str() + ")");
        if (std::abs(determinant(g)) <= 1e-12 * std::pow(std::max(1.0, big), static_cast<double>(dim)))
          fail(std::string(name) + " is singular at (" + at.str() + ")");
      }
      for (const auto& e : model.potential()) e.eval(std::span<const double>(vars));
      model.scalar_potential().eval(std::span<const double>(vars));
    } catch (const DomainError& e) {
      fail(std::string(e.what()) + " at probe (" + at.str() + ")");
    }
  }
}

}  // namespace

LoadedModel parse_config(std::string_view text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, offset);
    throw ConfigParseError(name, line, col, offset, e.what());
  }
  const Reader rd{name};
  ModelConfig cfg = read_config(doc, rd);

  if (cfg.constants.mass == 0.0) throw ValidationError(name + ": mass must be nonzero");
  if (!(cfg.constants.light_speed > 0.0)) throw ValidationError(name + ": light_speed must be positive");
  if (cfg.einstein_k == 0.0) throw ValidationError(name + ": einstein_k must be nonzero");

  const auto names = coordinate_names(cfg.dims);
  auto h = parse_grid(text, cfg.h, names, name, "h", cfg.dims.m);
  auto phi = parse_grid(text, cfg.phi, names, name, "phi", cfg.dims.n);
  auto a = parse_grid(text, cfg.a, names, name, "A", cfg.dims.m);
  auto p = parse_grid(text, {cfg.p}, names, name, "P", 0);

  try {
    ElectrodynamicsModel model(cfg.dims, cfg.constants, MetricField(IndexClass::temporal, cfg.dims, std::move(h)),
                               MetricField(IndexClass::spatial, cfg.dims, std::move(phi)), std::move(a),
                               std::move(p[0]));
    validate(cfg, model, name);
    return {std::move(cfg), std::move(model), model_hash(doc.dump())};
  } catch (const ModelError& e) {
    throw ValidationError(name + ": " + e.what());
  }
}

LoadedModel load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return parse_config(buf.str(), path);
}

}  // namespace polyham
