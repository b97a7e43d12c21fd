#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tph/cones.hpp"
#include "tph/conjugation.hpp"
#include "tph/curves.hpp"
#include "tph/io.hpp"
#include "tph/kernels.hpp"
#include "tph/regions.hpp"
#include "tph/svg.hpp"
#include "tph/verify.hpp"

namespace fs = std::filesystem;
using namespace tph;

namespace {

constexpr int kUsage = 2;

struct BuildArgs {
  std::string build = "concrete";
  int lambda = 3;
  int mu = 4;
  int t = 2;
  std::string load;
};

struct Common {
  std::string out;
  std::uint64_t seed = 1;
  bool serial = false;
};

void add_build_flags(CLI::App* sub, BuildArgs& b) {
  sub->add_option("--build", b.build, "concrete, general or linear")
      ->check(CLI::IsMember({"concrete", "general", "linear"}));
  sub->add_option("--lambda", b.lambda, "vertical multiplier")->check(CLI::Range(-50, 50));
  sub->add_option("--mu", b.mu, "horizontal degree")->check(CLI::Range(-50, 50));
  sub->add_option("--t", b.t, "lower-left entry of the linearisation")->check(CLI::Range(-50, 50));
  sub->add_option("--load", b.load, "directory written by `build`")->check(CLI::ExistingDirectory);
}

void add_common_flags(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output directory (default $TPH_OUT or ./tph_out)");
  sub->add_option("--seed", c.seed, "sampling seed");
  sub->add_flag("--serial", c.serial, "run kernels without OpenMP");
}

TorusEndo make_endo(const BuildArgs& b) {
  if (!b.load.empty()) return load_endo(b.load);
  if (b.build == "concrete") return build_concrete();
  if (b.build == "linear") return build_linear(b.mu, b.lambda);
  return build_general(b.lambda, b.mu, b.t);
}

fs::path out_dir(const Common& c) {
  fs::path p = c.out;
  if (p.empty()) {
    const char* env = std::getenv("TPH_OUT");
    p = env && *env ? env : "tph_out";
  }
  fs::create_directories(p);
  return p;
}

Exec exec_of(const Common& c) { return c.serial ? Exec::serial : Exec::parallel; }

// Config keys become `--key value` unless the flag is already on the
// command line; CLI11 then rejects anything unknown.
std::vector<std::string> with_config(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + long(i));
      break;
    }
  }
  if (file.empty()) return args;
  const auto kv = parse_key_values(read_text(file), file);
  for (const auto& [key, value] : kv) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const std::string& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (value == "true") {
      args.push_back(flag);
    } else if (value != "false") {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

std::vector<CentreSample> field_samples(const TorusEndo& f, int n, Exec exec) {
  std::vector<Vec2> pts;
  pts.reserve(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pts.push_back({(i + 0.5) / n, (j + 0.5) / n});
  return sample_field(f, pts, exec);
}

std::vector<Arc> annulus_arcs(const TorusEndo& f) {
  std::vector<Arc> arcs;
  for (const CentreAnnulus& A : f.annuli()) arcs.push_back({A.lo, A.hi});
  return arcs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially hyperbolic torus endomorphisms: build, certify, sample, draw"};
  app.require_subcommand(1);

  BuildArgs b;
  Common c;
  VerifyConfig vc;

  auto* build = app.add_subcommand("build", "serialize the endomorphism");
  add_build_flags(build, b);
  add_common_flags(build, c);

  auto* certify = app.add_subcommand("certify", "run every check and write certify.json");
  add_build_flags(certify, b);
  add_common_flags(certify, c);
  certify->add_option("--grid", vc.grid, "invariance grid")->check(CLI::Range(8, 8192));
  certify->add_option("--expansion-grid", vc.expansion_grid)->check(CLI::Range(8, 4096));
  certify->add_option("--k-max", vc.k_max)->check(CLI::Range(1, 200));
  certify->add_option("--slope-grid", vc.slope_grid)->check(CLI::Range(4, 2048));
  certify->add_option("--centre-samples", vc.centre_samples)->check(CLI::Range(1, 1000000));
  certify->add_option("--depth", vc.centre_depth, "E^c depth for the residual check")->check(CLI::Range(1, 1024));
  certify->add_option("--n-levels", vc.n_levels)->check(CLI::Range(1, 16));
  certify->add_option("--n-max", vc.box_steps, "backward steps for the boxes")->check(CLI::Range(1, 200));
  certify->add_option("--r0", vc.r0)->check(CLI::Range(1e-6, 10.0));
  certify->add_option("--length", vc.curve_length, "curve arclength")->check(CLI::Range(1e-3, 10.0));
  certify->add_option("--step", vc.step, "curve step")->check(CLI::Range(1e-7, 1e-3));
  certify->add_option("--trials", vc.conjugation_trials)->check(CLI::Range(1, 100000));

  int field_grid = 64;
  auto* field = app.add_subcommand("field", "E^c samples on a grid, field.csv");
  add_build_flags(field, b);
  add_common_flags(field, c);
  field->add_option("--grid", field_grid)->check(CLI::Range(1, 4096));

  int seeds = 24;
  double length = 1.0, step = 1e-4;
  auto* curves = app.add_subcommand("curves", "centre curves from y = 1/2, curves.csv");
  add_build_flags(curves, b);
  add_common_flags(curves, c);
  curves->add_option("--seeds", seeds)->check(CLI::Range(1, 4096));
  curves->add_option("--length", length)->check(CLI::Range(1e-3, 10.0));
  curves->add_option("--step", step)->check(CLI::Range(1e-7, 1e-3));

  int n_levels = 8;
  auto* lamination = app.add_subcommand("lamination", "preimages of the centre annuli, lamination.json");
  add_build_flags(lamination, b);
  add_common_flags(lamination, c);
  lamination->add_option("--n-levels", n_levels)->check(CLI::Range(0, 16));

  auto* figures = app.add_subcommand("figures", "SVG figures");
  add_build_flags(figures, b);
  add_common_flags(figures, c);
  figures->add_option("--seeds", seeds)->check(CLI::Range(1, 512));

  std::string matrix;
  auto* conjugate = app.add_subcommand("conjugate", "triangular form of an integer matrix, conjugate.json");
  add_common_flags(conjugate, c);
  conjugate->add_option("--matrix", matrix, "a,b,c,d (row major)")->required();

  app.set_help_all_flag("--help-all");

  try {
    // CLI11 takes the argument vector in reverse.
    std::vector<std::string> args = with_config({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    vc.seed = c.seed;
    vc.exec = exec_of(c);

    if (*conjugate) {
      std::vector<std::int64_t> m;
      std::stringstream ss(matrix);
      for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw CLI::ValidationError("--matrix", "not an integer: " + tok);
        m.push_back(v);
      }
      if (m.size() != 4) throw CLI::ValidationError("--matrix", "needs four comma-separated integers");
      const ConjugationResult r = conjugate_to_triangular({m[0], m[1], m[2], m[3]});
      const std::string text = to_json(r).dump(2) + "\n";
      write_text(out_dir(c) / "conjugate.json", text);
      std::cout << text;
      return 0;
    }

    const TorusEndo f = make_endo(b);
    const fs::path out = out_dir(c);

    if (*build) {
      save_endo(f, out / "endo");
      std::cout << "wrote " << (out / "endo").string() << "\n";
      return 0;
    }
    if (*certify) {
      const std::vector<CertReport> reports = run_all(f, vc);
      write_text(out / "certify.json", report_json(f, vc, reports).dump(2) + "\n");
      std::cout << summary_table(reports);
      return any_fail(reports) ? 1 : 0;
    }
    if (*field) {
      write_text(out / "field.csv", field_csv(field_samples(f, field_grid, vc.exec)));
      std::cout << "wrote " << (out / "field.csv").string() << "\n";
      return 0;
    }
    if (*curves) {
      std::vector<CurveSegment> segs(seeds);
#pragma omp parallel for schedule(dynamic, 1) if (!c.serial)
      for (int i = 0; i < seeds; ++i)
        segs[i] = integrate_centre_curve(f, {(i + 0.5) / seeds, 0.5}, length, step, {0.0, 1.0});
      write_text(out / "curves.csv", curves_csv(segs));
      std::cout << "wrote " << (out / "curves.csv").string() << "\n";
      return 0;
    }
    if (*lamination) {
      if (f.annuli().empty()) throw CLI::ValidationError("--build", "this build has no centre annulus");
      const auto levels = preimage_lamination(f.g(), annulus_arcs(f), n_levels);
      write_text(out / "lamination.json", lamination_json(levels).dump(2) + "\n");
      std::cout << "wrote " << (out / "lamination.json").string() << "\n";
      return 0;
    }
    if (*figures) {
      std::vector<std::string> wrote;
      auto emit = [&](const std::string& name, const std::string& svg) {
        write_text(out / name, svg);
        wrote.push_back(name);
      };
      emit("maps.svg", figure_maps(f));
      if (!f.annuli().empty()) {
        const double eps = find_epsilon(f).eps;
        emit("cone_eps.svg", figure_cone_eps(f, eps));
        const Regions regions(f);
        emit("cone_delta.svg", figure_cone_delta(f, find_delta(f, regions, eps).delta));
      }
      emit("centre_curves.svg", figure_centre_curves(f, seeds));
      for (const std::string& w : wrote) std::cout << "wrote " << (out / w).string() << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const BuildError& e) {
    std::cerr << "usage error: build parameters rejected: " << e.what() << "\n";
    return kUsage;
  } catch (const ConjugationError& e) {
    std::cerr << "usage error: --matrix: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
