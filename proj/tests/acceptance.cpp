// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cliffym/cli.hpp"
#include "cliffym/curvature.hpp"
#include "cliffym/report.hpp"
#include "cliffym/yang_mills.hpp"

#include "families.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

using namespace cliffym;
using testing_families::Family;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* what, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  if (!o.pass) ++failures;
  std::printf("%s %2d %s [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, what, o.detail.c_str(), dt.count());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

AdaptedFrame frame_at(const CliffordSystem& s, std::uint64_t seed) {
  return adapted_frame(s, sample_focal_point(s, seed), seed);
}

bool exception_case(const CliffordSystem& s) { return 2 * s.m2() - s.m1() + 1 <= 0; }

ClassifyConfig sampling(int samples, std::uint64_t seed) {
  ClassifyConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

Outcome clifford_relations() {
  double worst = 0.0;
  std::string where;
  for (const auto& f : testing_families::acceptance_families()) {
    const double d = oracle::anticommutator_defect(f.build());
    if (d >= worst) {
      worst = d;
      where = f.label();
    }
  }
  return {worst < 1e-12, "max defect " + sci(worst) + " at " + where};
}

Outcome projection_convergence() {
  std::string worst_family;
  double worst_rate = 1.0;
  for (const auto& f : testing_families::acceptance_families()) {
    const auto s = f.build();
    FdConfig cfg;
    cfg.newton_max_iter = 50;
    oracle::SeedStream rng(0x5eed0000u + static_cast<std::uint64_t>(s.m() * 100 + s.k()));
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
      try {
        if (project_to_focal(s, oracle::random_unit(s.dim_ambient(), rng), cfg).residual < 1e-11) ++ok;
      } catch (const SolverError&) {
      }
    }
    const double rate = ok / 100.0;
    if (rate < worst_rate || worst_family.empty()) {
      worst_rate = rate;
      worst_family = f.label();
    }
  }
  return {worst_rate >= 0.99, "lowest rate " + sci(worst_rate) + " at " + worst_family};
}

Outcome identity_suites() {
  double worst_ratio = 0.0;
  std::string where;
  for (const auto& f : testing_families::acceptance_families()) {
    const auto s = f.build();
    const double tol = 1e-9 * s.n();
    for (std::uint64_t seed = 1; seed <= 64; ++seed) {
      const auto fr = frame_at(s, seed);
      const auto h = shape_operators(s, fr);
      const CliffordPairings pr(s, fr);
      const double e = std::max(trace_identity_suite(h, pr, s.n(), s.m()).worst(),
                                pairing_identity_suite(h, pr).worst());
      if (e / tol >= worst_ratio) {
        worst_ratio = e / tol;
        where = f.label();
      }
    }
  }
  return {worst_ratio < 1.0, "worst error / (1e-9 n) = " + sci(worst_ratio) + " at " + where};
}

Outcome quintic_traces_match() {
  double worst_ratio = 0.0, worst_collapsed = 0.0;
  std::string where;
  for (const auto& f : testing_families::acceptance_families()) {
    const auto s = f.build();
    const double tol = 1e-9 * s.n();
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto fr = frame_at(s, seed);
      const auto q = quintic_traces(shape_operators(s, fr));
      const CliffordPairings pr(s, fr);
      for (int a = 0; a < s.normal_count(); ++a) {
        const double t = distinct_quintuple_sum(pr, a);
        const auto i = static_cast<std::size_t>(a);
        const double e = std::max(std::abs(q.nested[i] - 2.0 * t), std::abs(q.alternating[i] + t));
        if (e / tol >= worst_ratio) {
          worst_ratio = e / tol;
          where = f.label();
        }
      }
      if (s.m() == 4) {
        const auto ob = obstruction_T(pr);
        for (std::size_t a = 0; a < ob.T.size(); ++a)
          worst_collapsed = std::max(worst_collapsed, std::abs(ob.T[a] - ob.collapsed[a]));
      }
    }
  }
  return {worst_ratio < 1.0 && worst_collapsed < kCollapsedTol,
          "trace error / (1e-9 n) = " + sci(worst_ratio) + " at " + where + ", collapsed form " +
              sci(worst_collapsed)};
}

Outcome distinguished_component() {
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& f : testing_families::acceptance_families()) {
    const auto s = f.build();
    if (exception_case(s)) continue;
    const double bound = -2.0 * (s.n() - 2 * s.m() + 1);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto fr = frame_at(s, seed);
      const auto r = classical_nym_residual(CliffordPairings(s, fr));
      for (int a = 0; a < s.normal_count(); ++a)
        for (int b = 0; b < s.normal_count(); ++b) {
          if (a == b) continue;
          const double excess = r.distinguished(a, b) - bound;
          if (excess >= worst_excess) {
            worst_excess = excess;
            where = f.label();
          }
        }
    }
  }
  const auto s12 = testing_families::kF12.build();
  double dev12 = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto r = classical_nym_residual(CliffordPairings(s12, frame_at(s12, seed)));
    dev12 = std::max({dev12, std::abs(r.distinguished(0, 1) + 8.0), std::abs(r.distinguished(1, 0) + 8.0)});
  }
  return {worst_excess <= 1e-9 && dev12 < 1e-10,
          "max excess over bound " + sci(worst_excess) + " at " + where + ", order-one deviation " + sci(dev12)};
}

// Every constructible family with l <= 8, sign variants included.
std::vector<Family> families_up_to_l8() {
  std::vector<Family> out;
  for (int m = 1; m <= 8; ++m)
    for (int k = 1; k * irreducible_dimension(m) <= 8; ++k) {
      if (k * irreducible_dimension(m) - m - 1 < 1) continue;
      if (m % 4 != 0) {
        out.push_back({m, k, {}});
        continue;
      }
      for (const auto& signs : sign_variants(k)) out.push_back({m, k, signs});
    }
  return out;
}

// Max absolute FD error over the gradient, divergence and Codazzi tensors at one frame.
struct FdErrors {
  double abs = 0.0;
  double rel = 0.0;
};

FdErrors fd_errors(const CliffordSystem& s, const AdaptedFrame& fr, double step) {
  FdConfig cfg;
  cfg.step = step;
  const CliffordPairings pr(s, fr);
  const int c = s.normal_count();
  FdErrors out;
  auto absorb = [&](const Matrix& fd, const Matrix& closed) {
    out.abs = std::max(out.abs, (fd - closed).cwiseAbs().maxCoeff());
    out.rel = std::max(out.rel, fd_relative_deviation(fd, closed));
  };
  const auto grad = pairing_gradient_fd(s, fr, cfg);
  const auto div = commutator_divergence_fd(s, fr, cfg);
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      const auto ab = static_cast<std::size_t>(a * c + b);
      absorb(grad[ab], pairing_gradient(pr, a, b));
      if (a != b) absorb(Matrix(div[ab].transpose()), Matrix(commutator_divergence(pr, a, b).transpose()));
    }
  const auto cf = ricci_codazzi_residual(pr);
  const auto ff = ricci_codazzi_residual_fd(s, fr, cfg);
  absorb(Eigen::Map<const Matrix>(ff.c.data(), 1, static_cast<Eigen::Index>(ff.c.size())),
         Eigen::Map<const Matrix>(cf.c.data(), 1, static_cast<Eigen::Index>(cf.c.size())));
  return out;
}

Outcome finite_differences() {
  double worst_rel = 0.0, worst_slope = std::numeric_limits<double>::infinity();
  std::string rel_at, slope_at;
  for (const auto& f : families_up_to_l8()) {
    const auto s = f.build();
    const auto fr = frame_at(s, 1);
    const auto fine = fd_errors(s, fr, 1e-5);
    if (fine.rel >= worst_rel) {
      worst_rel = fine.rel;
      rel_at = f.label();
    }
    const double e3 = fd_errors(s, fr, 1e-3).abs;
    const double e4 = fd_errors(s, fr, 1e-4).abs;
    const double slope = std::log10(e3 / e4);
    if (slope <= worst_slope) {
      worst_slope = slope;
      slope_at = f.label();
    }
  }
  return {worst_rel < 1e-3 && worst_slope >= 1.5,
          "max relative deviation " + sci(worst_rel) + " at " + rel_at + ", min slope " + sci(worst_slope) +
              " at " + slope_at};
}

// The (4,11) run is shared by the classification and density checks.
std::optional<ClassificationReport> large_report;
double large_seconds = 0.0;

Outcome classification() {
  std::vector<Family> yes;
  for (const auto& f : testing_families::acceptance_families())
    if (f.m <= 3) yes.push_back(f);
  yes.push_back(testing_families::kF43Def);
  yes.push_back(testing_families::kF47Def);
  yes.push_back(testing_families::kF43Indef);
  std::string bad;
  double q_form = 0.0;
  for (const auto& f : yes) {
    const auto rep = classify(f.build(), sampling(64, 1));
    const auto& v = rep.verdicts;
    if (!(v.is_NYM_evidence && v.is_TYM_evidence && v.invariants_hold)) bad += f.label() + " ";
    if (f.label() == testing_families::kF43Indef.label()) q_form = rep.stats.max_abs_q_form;
  }
  const auto start = std::chrono::steady_clock::now();
  large_report = classify(testing_families::kF411Indef.build(), sampling(500, 1));
  large_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& v = large_report->verdicts;
  const bool large_ok = !v.is_NYM_evidence && !v.is_TYM_evidence && large_report->witness &&
                        std::abs(large_report->witness->T) > 1e-2 && large_seconds < 120.0;
  return {bad.empty() && q_form < 1e-10 && large_ok,
          "true-verdict failures: [" + bad + "], indefinite (4,3) |q| " + sci(q_form) + ", (4,11) witness |T| " +
              sci(large_report->witness ? std::abs(large_report->witness->T) : 0.0) + " in " + sci(large_seconds) +
              "s"};
}

Outcome witness_densities() {
  if (!large_report || !large_report->witness) return {false, "no witness from the (4,11) run"};
  const auto& w = *large_report->witness;
  const double ratio = w.nym.algebraic_value / w.tym.algebraic_value;
  const double ratio_err = std::abs(ratio - 7.0 / 8.0);
  const bool ok = w.nym.consistent(1e-3) && w.tym.consistent(1e-3) &&
                  ratio_err <= 4.0 * std::numeric_limits<double>::epsilon();
  return {ok, "normal fd " + sci(w.nym.fd_value) + " vs " + sci(w.nym.algebraic_value) + ", tangent fd " +
                  sci(w.tym.fd_value) + " vs " + sci(w.tym.algebraic_value) + ", ratio error " + sci(ratio_err)};
}

Outcome codazzi() {
  double einstein = 0.0, others = std::numeric_limits<double>::infinity();
  for (const auto& f : {testing_families::kF21, testing_families::kF61})
    einstein = std::max(einstein, classify(f.build(), sampling(16, 1)).stats.max_codazzi_residual);
  for (const auto& f : {testing_families::kF11, testing_families::kF34})
    others = std::min(others, classify(f.build(), sampling(16, 1)).stats.min_codazzi_residual);
  return {einstein < 1e-8 && others > 1e-2,
          "(2,1)/(6,1) max " + sci(einstein) + ", (1,1)/(3,4) min " + sci(others)};
}

Outcome reproducibility() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "cliffym_accept_a.json").string();
  const auto b = (dir / "cliffym_accept_b.json").string();
  std::ostringstream sink;
  const std::vector<std::string> base{"classify", "--m", "4", "--k", "2", "--signs", "+,-",
                                      "--samples", "32", "--seed", "5", "--sequential", "--out"};
  auto args_a = base, args_b = base;
  args_a.push_back(a);
  args_b.push_back(b);
  const int ca = run(args_a, sink, sink), cb = run(args_b, sink, sink);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const auto ta = slurp(a), tb = slurp(b);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return {ca == 0 && cb == 0 && !ta.empty() && ta == tb,
          "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(ta.size()) +
              " bytes, identical=" + (ta == tb ? "yes" : "no")};
}

}  // namespace

int main() {
  report(1, "Clifford relations on all acceptance families", clifford_relations);
  report(2, "focal projection converges from random starts", projection_convergence);
  report(3, "trace and pairing identities at 64 points", identity_suites);
  report(4, "quintic traces against the distinct quintuple sum", quintic_traces_match);
  report(5, "distinguished divergence component bound", distinguished_component);
  report(6, "finite differences against closed forms", finite_differences);
  report(7, "classification verdicts", classification);
  report(8, "witness densities and their ratio", witness_densities);
  report(9, "Ricci Codazzi residual", codazzi);
  report(10, "sequential runs are byte identical", reproducibility);
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
