#include "cliffym/cli.hpp"

#include "cliffym/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace cliffym {
namespace {

struct RunConfig {
  int m = 0;
  int k = 0;
  std::string signs;
  std::string system_path;
  std::uint64_t seed = 0;
  int samples = 64;
  double fd_step = FdConfig{}.step;
  double tol = 0.0;
  double fd_tol = Thresholds{}.fd_relative;
  std::string out_path;
  std::string in_path;
  bool sequential = false;
  bool fd_crosscheck = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot write {}", path));
  file << text;
  if (!file) throw ConfigError(fmt::format("write to {} failed", path));
}

ClassifyConfig classify_config(const RunConfig& rc) {
  ClassifyConfig cfg;
  cfg.samples = rc.samples;
  cfg.seed = rc.seed;
  cfg.thresholds.zero = rc.tol;
  cfg.thresholds.fd_relative = rc.fd_tol;
  cfg.fd.step = rc.fd_step;
  cfg.sequential = rc.sequential;
  cfg.fd_crosscheck = rc.fd_crosscheck;
  cfg.validate();
  return cfg;
}

CliffordSystem system_from(const RunConfig& rc) {
  if (!rc.system_path.empty()) return parse_system_json(read_file(rc.system_path));
  if (rc.m == 0 || rc.k == 0) throw ConfigError("--m and --k are required");
  if (!rc.signs.empty() && rc.m % 4 != 0)
    throw ConfigError("--signs applies only when m is divisible by 4");
  const auto signs = rc.signs.empty() ? std::vector<int>{} : parse_signs(rc.signs);
  return make_system(rc.m, rc.k, signs);
}

// Family grid for sweeps: every constructible (m, k) with m <= max_m, k <= max_k, plus the
// sign variants when m is divisible by 4.
std::vector<CliffordSystem> family_grid(int max_m, int max_k) {
  std::vector<CliffordSystem> out;
  for (int m = 1; m <= max_m; ++m)
    for (int k = 1; k <= max_k; ++k) {
      if (k * irreducible_dimension(m) - m - 1 < 1) continue;
      if (m % 4 == 0)
        for (const auto& s : sign_variants(k)) out.push_back(make_system(m, k, s));
      else
        out.push_back(make_system(m, k));
    }
  return out;
}

int cmd_build(const RunConfig& rc, std::ostream& out) {
  const auto s = system_from(rc);
  write_output(rc.out_path, dump_system_json(s), out);
  return kExitOk;
}

int cmd_classify(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const auto s = system_from(rc);
  const auto rep = classify(s, classify_config(rc));
  write_output(rc.out_path, dump_report(rep), out);
  const auto& v = rep.verdicts;
  fmt::print(err, "{}: is_NYM_evidence={} is_TYM_evidence={} classical_NYM={} classical_TYM={} "
                  "max|T|={:.3e} ({})\n",
             rep.family.id, v.is_NYM_evidence, v.is_TYM_evidence, v.classical_NYM, v.classical_TYM,
             rep.stats.max_abs_T, kVerdictLabel);
  if (!v.invariants_hold) {
    fmt::print(err, "invariant breach: identity {:.3e}, curvature {:.3e}\n", rep.stats.max_identity,
               rep.stats.max_curvature_defect);
    return kExitInvariantBreach;
  }
  return kExitOk;
}

int cmd_selftest(const RunConfig& rc, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig local = rc;
  local.fd_crosscheck = true;
  const auto cfg = classify_config(local);
  bool ok = true;
  for (const auto& s : family_grid(4, 3)) {
    const double defect = s.anticommutator_defect();
    const auto rep = classify(s, cfg);
    const bool pass = defect < kAlgebraTol && rep.verdicts.invariants_hold;
    ok = ok && pass;
    fmt::print(out, "{:<12} {} clifford={:.2e} identities={:.2e} curvature={:.2e} fd={:.2e}\n",
               s.family_id(), pass ? "ok  " : "FAIL", defect, rep.stats.max_identity,
               rep.stats.max_curvature_defect, rep.stats.max_fd_deviation.value_or(0.0));
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  fmt::print(out, "selftest {} in {:.1f}s\n", ok ? "passed" : "FAILED", elapsed.count());
  return ok ? kExitOk : kExitInvariantBreach;
}

int cmd_scan(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.m < 1 || rc.k < 1) throw ConfigError("scan needs --m and --k upper bounds");
  const auto cfg = classify_config(rc);
  std::vector<VerdictRow> rows;
  bool ok = true;
  for (const auto& s : family_grid(rc.m, rc.k)) {
    const auto rep = classify(s, cfg);
    ok = ok && rep.verdicts.invariants_hold;
    fmt::print(err, "{}: max|T|={:.3e}\n", rep.family.id, rep.stats.max_abs_T);
    for (auto& r : verdict_rows(rep)) rows.push_back(std::move(r));
  }
  write_output(rc.out_path, rows_to_csv(rows), out);
  return ok ? kExitOk : kExitInvariantBreach;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_export(const RunConfig& rc, std::ostream& out) {
  if (rc.in_path.empty()) throw ConfigError("export needs --in");
  const std::string text = read_file(rc.in_path);
  if (ends_with(rc.in_path, ".csv")) {
    write_output(rc.out_path, rows_to_json(parse_rows_csv(text)), out);
    return kExitOk;
  }
  std::vector<VerdictRow> rows;
  // Either a full report or a verdict table written by a previous export.
  const auto probe = nlohmann::json::parse(text, nullptr, false);
  if (probe.is_object() && probe.contains("rows"))
    rows = parse_rows_json(text);
  else
    rows = verdict_rows(parse_report(text));
  write_output(rc.out_path, rows_to_csv(rows), out);
  return kExitOk;
}

}  // namespace

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "+" || item == "+1" || item == "1")
      out.push_back(1);
    else if (item == "-" || item == "-1")
      out.push_back(-1);
    else
      throw ConfigError(fmt::format("bad block sign '{}'", item));
  }
  if (out.empty()) throw ConfigError("empty sign list");
  return out;
}

std::vector<std::vector<int>> sign_variants(int k) {
  std::vector<std::vector<int>> out;
  for (int minus = 0; minus <= k; ++minus) {
    std::vector<int> s(static_cast<std::size_t>(k), 1);
    for (int b = k - minus; b < k; ++b) s[static_cast<std::size_t>(b)] = -1;
    out.push_back(std::move(s));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical Yang-Mills checks for focal submanifolds of Clifford systems",
               "clifford_ym"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--m", rc.m, "Clifford order m (number of matrices minus one)");
    sub->add_option("--k", rc.k, "number of irreducible blocks");
    sub->add_option("--signs", rc.signs, "block signs for m divisible by 4, e.g. +,+,-");
  };
  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--seed", rc.seed, "base seed");
    sub->add_option("--samples", rc.samples, "sample points per family");
    sub->add_option("--fd-step", rc.fd_step, "finite-difference step");
    sub->add_option("--tol", rc.tol, "zero threshold (default 1e-9 * n)");
    sub->add_option("--fd-tol", rc.fd_tol, "relative tolerance for finite-difference checks");
    sub->add_flag("--sequential", rc.sequential, "single worker, byte-stable output");
    sub->add_flag("--fd-crosscheck", rc.fd_crosscheck, "compare closed forms with finite differences");
  };

  auto* build = app.add_subcommand("build", "write a Clifford system file");
  add_family(build);
  build->add_option("--out", rc.out_path, "output path (stdout if omitted)");

  auto* selftest = app.add_subcommand("selftest", "identity suites on all m <= 4, k <= 3 families");
  add_sampling(selftest);

  auto* cls = app.add_subcommand("classify", "classification report for one family");
  add_family(cls);
  add_sampling(cls);
  cls->add_option("--system", rc.system_path, "system file instead of --m/--k");
  cls->add_option("--out", rc.out_path, "report path (stdout if omitted)");

  auto* scan = app.add_subcommand("scan", "sweep families up to --m, --k into CSV");
  add_family(scan);
  add_sampling(scan);
  scan->add_option("--out", rc.out_path, "CSV path (stdout if omitted)");

  auto* exp = app.add_subcommand("export", "convert between report JSON and verdict CSV");
  exp->add_option("--in", rc.in_path, "input .json or .csv")->required();
  exp->add_option("--out", rc.out_path, "output path (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitConfigError;
  }

  try {
    if (build->parsed()) return cmd_build(rc, out);
    if (selftest->parsed()) return cmd_selftest(rc, out);
    if (cls->parsed()) return cmd_classify(rc, out, err);
    if (scan->parsed()) return cmd_scan(rc, out, err);
    if (exp->parsed()) return cmd_export(rc, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const ValidationError& e) {
    err << "invariant breach: " << e.what() << "\n";
    return kExitInvariantBreach;
  }
  return kExitConfigError;
}

}  // namespace cliffym
