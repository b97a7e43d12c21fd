#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tph/io.hpp"

namespace fs = std::filesystem;
using namespace tph;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tph_test_" + name + "_" + std::to_string(std::rand()));
  fs::remove_all(p);
  return p;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("fmt17 round trips doubles") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) / (k + 1);
    CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("key = value parsing") {
  const auto kv = parse_key_values("# comment\n a = 1 \n\nb=two # trailing\n", "t");
  CHECK(kv.size() == 2);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two");
  CHECK_THROWS_AS(parse_key_values("a = 1\na = 2\n", "t"), FormatError);
  CHECK_THROWS_AS(parse_key_values("just words\n", "t"), FormatError);
  CHECK_THROWS_AS(parse_key_values(" = 3\n", "t"), FormatError);
}

TEST_CASE("property: save and load reproduce derivatives bit for bit") {
  for (const TorusEndo& f : {build_concrete(), build_general(3, 4, 2), build_general(3, -3, 0), build_linear(4, 3)}) {
    const fs::path dir = scratch("endo");
    save_endo(f, dir);
    const TorusEndo h = load_endo(dir);
    CHECK(h.B() == f.B());
    CHECK(h.period() == f.period());
    CHECK(h.lambda() == f.lambda());
    CHECK(h.annuli().size() == f.annuli().size());
    CHECK(h.dist_to_linear() == f.dist_to_linear());
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const Vec2 p{u(rng), u(rng)};
      const Mat2 a = f.derivative(p), b = h.derivative(p);
      CHECK(a.a == b.a);
      CHECK(a.b == b.b);
      CHECK(a.c == b.c);
      CHECK(a.d == b.d);
      const Vec2 q = f.apply(p), r = h.apply(p);
      CHECK(q.x == r.x);
      CHECK(q.y == r.y);
    }
    fs::remove_all(dir);
  }
}

TEST_CASE("load rejects tampered manifests") {
  const fs::path dir = scratch("bad");
  save_endo(build_concrete(), dir);
  std::string m = read_text(dir / "manifest.txt");
  const auto at = m.find("dist_to_linear = ");
  REQUIRE(at != std::string::npos);
  m.insert(at + 17, "9");
  write_text(dir / "manifest.txt", m);
  CHECK_THROWS_AS(load_endo(dir), FormatError);
  write_text(dir / "manifest.txt", "format = 7\n");
  CHECK_THROWS_AS(load_endo(dir), FormatError);
  fs::remove_all(dir);
  CHECK_THROWS_AS(load_endo(dir), FormatError);
}

TEST_CASE("csv layouts") {
  CentreSample s;
  s.p = {0.25, 0.5};
  s.direction = {0.0, 1.0};
  s.n_used = 64;
  const std::string field = field_csv({s, s});
  CHECK(field.rfind("x,y,dir_x,dir_y,n_used,residual,sign_class\n", 0) == 0);
  CHECK(count_lines(field) == 3);
  CHECK(field.find(",vertical\n") != std::string::npos);

  CurveSegment c;
  c.pts = {{0, 0}, {0, 0.1}, {0, 0.2}};
  const std::string curves = curves_csv({c, c});
  CHECK(curves.rfind("curve,index,x,y\n", 0) == 0);
  CHECK(count_lines(curves) == 7);
  CHECK(curves.find("\n1,2,0,0.20000000000000001\n") != std::string::npos);
}

TEST_CASE("json payloads") {
  const ConjugationResult r = conjugate_to_triangular({5, 2, 2, 2});
  const nlohmann::json j = to_json(r);
  CHECK(j["P"] == nlohmann::json::parse("[[1,-2],[0,1]]"));
  CHECK(j["B"] == nlohmann::json::parse("[[1,0],[2,6]]"));

  const TorusEndo f = build_concrete();
  const nlohmann::json lam = lamination_json(preimage_lamination(f.g(), Arc{-0.125, 0.125}, 2));
  REQUIRE(lam.size() == 3);
  CHECK(lam[1]["count"] == 4);
  CHECK(lam[2]["intervals"].size() == 16);
  // Shortest round-trip text keeps every bit.
  const double lo = lam[2]["intervals"][3][0];
  CHECK(nlohmann::json::parse(lam.dump())[2]["intervals"][3][0].get<double>() == lo);
}
