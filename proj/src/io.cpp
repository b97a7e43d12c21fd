#include "tph/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tph {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second)
      throw FormatError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw FormatError("cannot write " + file.string());
  os << text;
  if (!os) throw FormatError("write failed: " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw FormatError("cannot read " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

std::string annulus_line(const CentreAnnulus& A) {
  std::ostringstream os;
  os << A.name << ' ' << fmt17(A.lo) << ' ' << fmt17(A.hi) << ' ' << fmt17(A.centre) << ' ' << fmt17(A.core_radius)
     << ' ' << fmt17(A.edge_radius) << ' ' << fmt17(A.edge_slope_lo) << ' ' << fmt17(A.edge_slope_hi) << ' '
     << A.lift_shift;
  return os.str();
}

CentreAnnulus parse_annulus(const std::string& s) {
  std::istringstream is(s);
  CentreAnnulus A;
  if (!(is >> A.name >> A.lo >> A.hi >> A.centre >> A.core_radius >> A.edge_radius >> A.edge_slope_lo >>
        A.edge_slope_hi >> A.lift_shift))
    throw FormatError("manifest: malformed annulus '" + s + "'");
  return A;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("manifest: missing key '" + key + "'");
  return it->second;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
  const std::string& v = need(kv, key);
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw FormatError("manifest: '" + key + "' is not a number: " + v);
  return d;
}

int integer(const std::map<std::string, std::string>& kv, const std::string& key) {
  const double d = num(kv, key);
  if (d != std::floor(d)) throw FormatError("manifest: '" + key + "' is not an integer");
  return int(d);
}

}  // namespace

void save_endo(const TorusEndo& f, const fs::path& dir) {
  fs::create_directories(dir);
  const BuildInfo& in = f.info();
  std::ostringstream m;
  m << "# torus endomorphism manifest\n";
  m << "format = 1\n";
  m << "kind = " << to_string(in.kind) << "\n";
  m << "lambda = " << f.lambda() << "\n";
  m << "mu = " << in.mu << "\n";
  m << "t = " << in.t << "\n";
  m << "period = " << f.period() << "\n";
  m << "a = " << fmt17(in.a) << "\n";
  m << "rho = " << fmt17(in.rho) << "\n";
  m << "centre = " << fmt17(in.centre) << "\n";
  m << "dist_to_linear = " << fmt17(f.dist_to_linear()) << "\n";
  m << "design.a = " << fmt17(in.design.a) << "\n";
  m << "design.kappa = " << fmt17(in.design.kappa) << "\n";
  m << "design.band_slope = " << fmt17(in.design.band_slope) << "\n";
  m << "design.core_frac = " << fmt17(in.design.core_frac) << "\n";
  m << "design.smooth_frac = " << fmt17(in.design.smooth_frac) << "\n";
  m << "design.plateau_frac = " << fmt17(in.design.plateau_frac) << "\n";
  m << "design.shear_slope_per_rise = " << fmt17(in.design.shear_slope_per_rise) << "\n";
  m << "shears = " << f.shears().size() << "\n";
  m << "annuli = " << f.annuli().size() << "\n";
  for (std::size_t i = 0; i < f.annuli().size(); ++i) m << "annulus." << i << " = " << annulus_line(f.annuli()[i]) << "\n";
  for (std::size_t i = 0; i < in.notes.size(); ++i) m << "note." << i << " = " << in.notes[i] << "\n";
  write_text(dir / "manifest.txt", m.str());
  write_text(dir / "g.knots", f.g().to_table());
  for (std::size_t i = 0; i < f.shears().size(); ++i)
    write_text(dir / ("shear" + std::to_string(i) + ".knots"), f.shears()[i].to_table());
}

TorusEndo load_endo(const fs::path& dir) {
  const auto kv = parse_key_values(read_text(dir / "manifest.txt"), (dir / "manifest.txt").string());
  if (need(kv, "format") != "1") throw FormatError("manifest: unsupported format " + need(kv, "format"));
  BuildInfo in;
  in.kind = build_kind_from_string(need(kv, "kind"));
  in.lambda = integer(kv, "lambda");
  in.mu = integer(kv, "mu");
  in.t = integer(kv, "t");
  in.a = num(kv, "a");
  in.rho = num(kv, "rho");
  in.centre = num(kv, "centre");
  in.design.a = num(kv, "design.a");
  in.design.kappa = num(kv, "design.kappa");
  in.design.band_slope = num(kv, "design.band_slope");
  in.design.core_frac = num(kv, "design.core_frac");
  in.design.smooth_frac = num(kv, "design.smooth_frac");
  in.design.plateau_frac = num(kv, "design.plateau_frac");
  in.design.shear_slope_per_rise = num(kv, "design.shear_slope_per_rise");
  for (int i = 0;; ++i) {
    const auto it = kv.find("note." + std::to_string(i));
    if (it == kv.end()) break;
    in.notes.push_back(it->second);
  }
  const int n_shears = integer(kv, "shears");
  const int n_annuli = integer(kv, "annuli");
  std::vector<CircleMap> shears;
  for (int i = 0; i < n_shears; ++i)
    shears.push_back(CircleMap::from_table(read_text(dir / ("shear" + std::to_string(i) + ".knots"))));
  std::vector<CentreAnnulus> annuli;
  for (int i = 0; i < n_annuli; ++i) annuli.push_back(parse_annulus(need(kv, "annulus." + std::to_string(i))));
  TorusEndo f(CircleMap::from_table(read_text(dir / "g.knots")), integer(kv, "lambda"), std::move(shears),
              integer(kv, "period"), std::move(annuli), in);
  const double stored = num(kv, "dist_to_linear");
  if (std::fabs(stored - f.dist_to_linear()) > 1e-9 * std::max(1.0, std::fabs(stored)))
    throw FormatError("manifest: dist_to_linear " + fmt17(stored) + " does not match the knot tables (" +
                      fmt17(f.dist_to_linear()) + ")");
  return f;
}

std::string field_csv(const std::vector<CentreSample>& samples) {
  std::ostringstream os;
  os << "x,y,dir_x,dir_y,n_used,residual,sign_class\n";
  for (const CentreSample& s : samples)
    os << fmt17(s.p.x) << ',' << fmt17(s.p.y) << ',' << fmt17(s.direction.x) << ',' << fmt17(s.direction.y) << ','
       << s.n_used << ',' << fmt17(s.residual) << ',' << to_string(classify(s)) << '\n';
  return os.str();
}

std::string curves_csv(const std::vector<CurveSegment>& curves) {
  std::ostringstream os;
  os << "curve,index,x,y\n";
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (std::size_t i = 0; i < curves[c].pts.size(); ++i)
      os << c << ',' << i << ',' << fmt17(curves[c].pts[i].x) << ',' << fmt17(curves[c].pts[i].y) << '\n';
  return os.str();
}

nlohmann::json to_json(const IntMat2& m) { return nlohmann::json::array({{m.a, m.b}, {m.c, m.d}}); }

nlohmann::json to_json(const ConjugationResult& r) {
  return {{"P", to_json(r.P)}, {"B", to_json(r.B)}, {"v", {r.v[0], r.v[1]}}};
}

nlohmann::json lamination_json(const std::vector<AnnulusFamily>& levels) {
  nlohmann::json out = nlohmann::json::array();
  for (const AnnulusFamily& fam : levels) {
    nlohmann::json iv = nlohmann::json::array();
    for (const Arc& a : fam.intervals) iv.push_back({a.lo, a.hi});
    out.push_back({{"level", fam.level}, {"count", fam.intervals.size()}, {"max_gap", fam.max_gap}, {"intervals", iv}});
  }
  return out;
}

}  // namespace tph
