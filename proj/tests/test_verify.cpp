#include <set>

#include "doctest.h"
#include "tph/verify.hpp"

using namespace tph;

namespace {

VerifyConfig small() {
  VerifyConfig c;
  c.grid = 64;
  c.expansion_grid = 32;
  c.slope_grid = 32;
  c.centre_samples = 100;
  return c;
}

const CertReport& find(const std::vector<CertReport>& rs, const std::string& id) {
  for (const CertReport& r : rs)
    if (r.id == id) return r;
  throw std::out_of_range(id);
}

}  // namespace

TEST_CASE("registry ids are unique and anchored") {
  std::set<std::string> ids;
  for (const CheckInfo& c : registry()) {
    CHECK_FALSE(c.anchor.empty());
    CHECK(ids.insert(c.id).second);
  }
  for (const char* id : {"horizontal-neighbourhood", "invariant-annulus", "conjugation", "branching", "incoherence"})
    CHECK(ids.count(id) == 1);
}

TEST_CASE("run_all covers the registry once, in order") {
  const std::vector<CertReport> rs = run_all(build_linear(4, 3), small());
  REQUIRE(rs.size() == registry().size());
  for (std::size_t i = 0; i < rs.size(); ++i) CHECK(rs[i].id == registry()[i].id);
  // Every FAIL carries a witness.
  for (const CertReport& r : rs)
    if (r.verdict == Verdict::fail) CHECK_FALSE(r.witness.empty());
}

TEST_CASE("linear control") {
  const std::vector<CertReport> rs = run_all(build_linear(4, 3), small());
  CHECK(find(rs, "linearisation").verdict == Verdict::pass);
  CHECK(find(rs, "conjugation").verdict == Verdict::pass);
  CHECK(find(rs, "branching").verdict == Verdict::fail);
  CHECK(any_fail(rs));
}

TEST_CASE("determinism") {
  const TorusEndo f = build_concrete();
  VerifyConfig c = small();
  c.seed = 5;
  const nlohmann::json a = report_json(f, c, run_all(f, c));
  const nlohmann::json b = report_json(f, c, run_all(f, c));
  REQUIRE(a["checks"].size() == b["checks"].size());
  for (std::size_t i = 0; i < a["checks"].size(); ++i) {
    CHECK(a["checks"][i]["verdict"] == b["checks"][i]["verdict"]);
    CHECK(a["checks"][i]["margins"] == b["checks"][i]["margins"]);
  }
}

TEST_CASE("report document and summary") {
  const TorusEndo f = build_linear(4, 3);
  const VerifyConfig c = small();
  const std::vector<CertReport> rs = run_all(f, c);
  const nlohmann::json j = report_json(f, c, rs);
  CHECK(j.contains("build"));
  CHECK(j["build"]["B"] == nlohmann::json::parse("[[4,0],[0,3]]"));
  CHECK(j["checks"].size() == rs.size());
  const std::string table = summary_table(rs);
  for (const CertReport& r : rs) CHECK(table.find(r.id) != std::string::npos);
  CHECK(to_string(Verdict::not_applicable) == "NOT-APPLICABLE");
  CHECK(to_string(Verdict::pass) == "PASS");
}

TEST_CASE("conjugation check is exact") {
  const CertReport r = check_conjugation(100, 3);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.params["trials"] == 100);
  CHECK(r.margins["round_trips_ok"] == 100);
}
