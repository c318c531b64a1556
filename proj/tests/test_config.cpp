#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "polyham/config.hpp"

using namespace polyham;
using nlohmann::json;

namespace {

const std::string kDir = POLYHAM_CONFIG_DIR;

json base_doc() {
  return json::parse(R"({
    "dims": {"m": 1, "n": 2},
    "constants": {"mass": 1, "charge": 0.5, "light_speed": 1},
    "h": [["1"]],
    "phi": [["1", "0"], ["0", "1"]],
    "A": [["x2"], ["-x1"]],
    "P": "0",
    "sampling": {"seed": 4, "count": 10, "t_box": [-1, 1], "x_box": [-1, 1], "p_box": [-1, 1]}
  })");
}

LoadedModel load(const json& doc) { return parse_config(doc.dump(2), "test.json"); }

}  // namespace

TEST_CASE("shipped configs load") {
  const auto flat = load_config(kDir + "/flat.json");
  CHECK(flat.config.dims == Dims{1, 2});
  CHECK(flat.model.dims() == Dims{1, 2});
  CHECK(flat.model_hash.size() == 16);
  CHECK(flat.config.sampling.count == 100);
  CHECK(flat.config.sampling.p_box.size() == 2);

  const auto sphere = load_config(kDir + "/sphere_time.json");
  CHECK(sphere.config.sampling.x_box[0] == Range{0.3, 2.8});
  CHECK(sphere.model.charge() == 0.7);

  const auto pot = load_config(kDir + "/flat_potential.json");
  CHECK(pot.config.dims == Dims{2, 2});
  CHECK(pot.config.einstein_k == 1.0);  // default
  CHECK(pot.config.sampling.p_box.size() == 4);
  CHECK(std::set<std::string>{flat.model_hash, sphere.model_hash, pot.model_hash}.size() == 3);
}

TEST_CASE("validation errors") {
  auto doc = base_doc();
  doc["constants"]["mass"] = 0;
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("mass must be nonzero"), ValidationError);

  doc = base_doc();
  doc["constants"]["light_speed"] = -1;
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = base_doc();
  doc["constants"]["einstein_k"] = 0;
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = base_doc();
  doc["dims"]["m"] = 2;
  doc["h"] = json::parse(R"([["1", "t1"], ["0", "1"]])");
  doc["A"] = json::parse(R"([["0", "0"], ["0", "0"]])");
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("h[1][2] != h[2][1]"), ValidationError);

  doc = base_doc();
  doc["phi"] = json::parse(R"([["1", "1"], ["1", "1"]])");
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("singular"), ValidationError);

  doc = base_doc();
  doc["sampling"]["x_box"] = json::parse("[1, -1]");
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = base_doc();
  doc["sampling"]["count"] = 0;
  CHECK_THROWS_AS(load(doc), ValidationError);

  // Chart-unsafe box: the probe lands where log is undefined.
  doc = base_doc();
  doc["phi"][0][0] = "2 + log(x1)";
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("probe"), ValidationError);
  doc["sampling"]["x_box"] = json::parse("[[0.5, 1], [-1, 1]]");
  CHECK_NOTHROW(load(doc));
}

TEST_CASE("schema errors") {
  auto doc = base_doc();
  doc.erase("P");
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("missing key 'P'"), SchemaError);

  doc = base_doc();
  doc["extra"] = 1;
  CHECK_THROWS_WITH_AS(load(doc), doctest::Contains("unexpected key 'extra'"), SchemaError);

  doc = base_doc();
  doc["constants"]["hbar"] = 1;
  CHECK_THROWS_AS(load(doc), SchemaError);

  doc = base_doc();
  doc["phi"] = json::parse(R"([["1", "0"]])");
  CHECK_THROWS_AS(load(doc), SchemaError);

  doc = base_doc();
  doc["h"] = json::parse(R"([[true]])");
  CHECK_THROWS_AS(load(doc), SchemaError);

  doc = base_doc();
  doc["sampling"]["p_box"] = json::parse("[[0, 1], [0, 1], [0, 1]]");
  CHECK_THROWS_AS(load(doc), SchemaError);

  doc = base_doc();
  doc["sampling"]["seed"] = -3;
  CHECK_THROWS_AS(load(doc), SchemaError);

  // Numbers are accepted where expressions are expected.
  doc = base_doc();
  doc["phi"] = json::parse(R"([[2, 0], [0, 1.5]])");
  CHECK(load(doc).config.phi[0] == "2");
}

TEST_CASE("parse errors carry file, line and offset") {
  const std::string text = "{\n  \"dims\": {\"m\": 1,\n   \"n\": 2,,\n}";
  try {
    parse_config(text, "bad.json");
    FAIL("expected ParseError");
  } catch (const ConfigParseError& e) {
    CHECK(e.file() == "bad.json");
    CHECK(e.line() == 3);
    CHECK(e.offset() == text.find(",,") + 1);
    CHECK(std::string(e.what()).starts_with("bad.json:3:"));
  }

  auto doc = base_doc();
  doc["A"][1][0] = "sin(x1";
  try {
    load(doc);
    FAIL("expected ParseError");
  } catch (const ConfigParseError& e) {
    CHECK(e.offset() == 6);
    CHECK(e.line() > 1);
    CHECK(std::string(e.what()).find("A[1][0]") != std::string::npos);
  }

  doc = base_doc();
  doc["P"] = "y1 + 1";
  CHECK_THROWS_AS(load(doc), ParseError);
  CHECK_THROWS_AS(load_config(kDir + "/does_not_exist.json"), IoError);
}

TEST_CASE("model hash is canonical") {
  const auto a = load(base_doc());
  // Same document with different layout and key order.
  const std::string reordered = R"({"P":"0","A":[["x2"],["-x1"]],"phi":[["1","0"],["0","1"]],"h":[["1"]],
    "sampling":{"p_box":[-1,1],"x_box":[-1,1],"t_box":[-1,1],"count":10,"seed":4},
    "constants":{"light_speed":1,"charge":0.5,"mass":1},"dims":{"n":2,"m":1}})";
  CHECK(parse_config(reordered).model_hash == a.model_hash);
  auto doc = base_doc();
  doc["constants"]["charge"] = 0.25;
  CHECK(load(doc).model_hash != a.model_hash);
  CHECK(model_hash("") == "cbf29ce484222325");
  CHECK(model_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("sampling is deterministic and stays in the boxes") {
  const auto cfg = load_config(kDir + "/sphere_time.json").config;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const JetPoint jp = sample_point(cfg.sampling, splitmix64(s));
    const JetPoint again = sample_point(cfg.sampling, splitmix64(s));
    CHECK(jp.x == again.x);
    CHECK(jp.p == again.p);
    CHECK(jp.t[0] >= -1.0);
    CHECK(jp.t[0] < 1.0);
    CHECK(jp.x[0] >= 0.3);
    CHECK(jp.x[0] < 2.8);
    CHECK(jp.p[1][0] >= -2.0);
  }
  CHECK(uniform01(0) == 0.0);
  CHECK(uniform01(~0ull) < 1.0);
  CHECK(uniform01(~0ull) == 1.0 - 0x1.0p-53);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
}
