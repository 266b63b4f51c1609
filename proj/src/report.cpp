#include "cliffym/report.hpp"

#include <json.hpp>

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace cliffym {
namespace {

using ojson = nlohmann::ordered_json;

template <typename T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
std::optional<T> optional_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

ojson vector_json(const Vector& v) {
  ojson arr = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from(const ojson& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

ojson density_json(const DensityPair& d) {
  return {{"fd_value", d.fd_value},
          {"algebraic_value", d.algebraic_value},
          {"derivative_term", d.derivative_term},
          {"trace_terms", d.trace_terms}};
}

DensityPair density_from(const ojson& j) {
  DensityPair d;
  d.fd_value = j.at("fd_value").get<double>();
  d.algebraic_value = j.at("algebraic_value").get<double>();
  d.derivative_term = j.at("derivative_term").get<double>();
  d.trace_terms = j.at("trace_terms").get<double>();
  return d;
}

ojson sample_json(const SampleRecord& r) {
  ojson j;
  j["seed"] = r.seed;
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["newton_steps"] = r.newton_steps;
  j["residual"] = r.residual;
  j["T"] = r.T;
  j["q_form"] = r.q_form;
  j["identity_worst"] = r.identity_worst;
  j["curvature_defect"] = r.curvature_defect;
  j["nym_residual"] = r.nym_residual;
  j["nym_distinguished"] = r.nym_distinguished;
  j["codazzi_residual"] = r.codazzi_residual;
  j["cubic_traces"] = r.cubic_traces;
  j["fd_deviation"] = optional_json(r.fd_deviation);
  return j;
}

SampleRecord sample_from(const ojson& j) {
  SampleRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.newton_steps = j.at("newton_steps").get<int>();
  r.residual = j.at("residual").get<double>();
  r.T = j.at("T").get<std::vector<double>>();
  r.q_form = j.at("q_form").get<double>();
  r.identity_worst = j.at("identity_worst").get<double>();
  r.curvature_defect = j.at("curvature_defect").get<double>();
  r.nym_residual = j.at("nym_residual").get<double>();
  r.nym_distinguished = j.at("nym_distinguished").get<double>();
  r.codazzi_residual = j.at("codazzi_residual").get<double>();
  r.cubic_traces = j.at("cubic_traces").get<double>();
  r.fd_deviation = optional_from<double>(j.at("fd_deviation"));
  return r;
}

ojson stats_json(const Stats& s) {
  ojson j;
  j["ok_count"] = s.ok_count;
  j["error_count"] = s.error_count;
  j["max_abs_T"] = s.max_abs_T;
  j["max_abs_q_form"] = s.max_abs_q_form;
  j["max_identity"] = s.max_identity;
  j["max_curvature_defect"] = s.max_curvature_defect;
  j["max_nym_residual"] = s.max_nym_residual;
  j["min_nym_residual"] = s.min_nym_residual;
  j["max_nym_distinguished"] = s.max_nym_distinguished;
  j["max_codazzi_residual"] = s.max_codazzi_residual;
  j["min_codazzi_residual"] = s.min_codazzi_residual;
  j["max_cubic_traces"] = s.max_cubic_traces;
  j["max_fd_deviation"] = optional_json(s.max_fd_deviation);
  return j;
}

Stats stats_from(const ojson& j) {
  Stats s;
  s.ok_count = j.at("ok_count").get<int>();
  s.error_count = j.at("error_count").get<int>();
  s.max_abs_T = j.at("max_abs_T").get<double>();
  s.max_abs_q_form = j.at("max_abs_q_form").get<double>();
  s.max_identity = j.at("max_identity").get<double>();
  s.max_curvature_defect = j.at("max_curvature_defect").get<double>();
  s.max_nym_residual = j.at("max_nym_residual").get<double>();
  s.min_nym_residual = j.at("min_nym_residual").get<double>();
  s.max_nym_distinguished = j.at("max_nym_distinguished").get<double>();
  s.max_codazzi_residual = j.at("max_codazzi_residual").get<double>();
  s.min_codazzi_residual = j.at("min_codazzi_residual").get<double>();
  s.max_cubic_traces = j.at("max_cubic_traces").get<double>();
  s.max_fd_deviation = optional_from<double>(j.at("max_fd_deviation"));
  return s;
}

ojson verdicts_json(const Verdicts& v) {
  return {{"label", kVerdictLabel},
          {"is_NYM_evidence", v.is_NYM_evidence},
          {"is_TYM_evidence", v.is_TYM_evidence},
          {"classical_NYM", v.classical_NYM},
          {"classical_TYM", v.classical_TYM},
          {"paper_exception_candidate", v.paper_exception_candidate},
          {"invariants_hold", v.invariants_hold},
          {"zero_threshold", v.zero_threshold}};
}

Verdicts verdicts_from(const ojson& j) {
  Verdicts v;
  v.is_NYM_evidence = j.at("is_NYM_evidence").get<bool>();
  v.is_TYM_evidence = j.at("is_TYM_evidence").get<bool>();
  v.classical_NYM = j.at("classical_NYM").get<bool>();
  v.classical_TYM = j.at("classical_TYM").get<bool>();
  v.paper_exception_candidate = j.at("paper_exception_candidate").get<bool>();
  v.invariants_hold = j.at("invariants_hold").get<bool>();
  v.zero_threshold = j.at("zero_threshold").get<double>();
  return v;
}

ojson config_json(const ClassifyConfig& c) {
  return {{"samples", c.samples},
          {"seed", c.seed},
          {"zero_threshold", c.thresholds.zero},
          {"fd_relative", c.thresholds.fd_relative},
          {"fd_step", c.fd.step},
          {"newton_tol", c.fd.newton_tol},
          {"newton_max_iter", c.fd.newton_max_iter},
          {"sequential", c.sequential},
          {"fd_crosscheck", c.fd_crosscheck},
          {"threads", c.threads}};
}

ClassifyConfig config_from(const ojson& j) {
  ClassifyConfig c;
  c.samples = j.at("samples").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.thresholds.zero = j.at("zero_threshold").get<double>();
  c.thresholds.fd_relative = j.at("fd_relative").get<double>();
  c.fd.step = j.at("fd_step").get<double>();
  c.fd.newton_tol = j.at("newton_tol").get<double>();
  c.fd.newton_max_iter = j.at("newton_max_iter").get<int>();
  c.sequential = j.at("sequential").get<bool>();
  c.fd_crosscheck = j.at("fd_crosscheck").get<bool>();
  c.threads = j.at("threads").get<unsigned>();
  return c;
}

ojson row_json(const VerdictRow& r) {
  return {{"family", r.family},       {"m", r.m},
          {"k", r.k},                 {"signs", r.signs},
          {"l", r.l},                 {"n", r.n},
          {"m1", r.m1},               {"m2", r.m2},
          {"variant", r.variant},     {"verdict", r.verdict},
          {"value", r.value},         {"statistic", r.statistic},
          {"threshold", r.threshold}, {"samples", r.samples}};
}

constexpr std::string_view kCsvHeader =
    "family,m,k,signs,l,n,m1,m2,variant,verdict,value,statistic,threshold,samples";

template <typename T>
T parse_number(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw SchemaError(fmt::format("malformed numeric field '{}'", field));
  return value;
}

double parse_double(std::string_view field) {
  const std::string copy(field);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(copy, &used);
  } catch (const std::exception&) {
    throw SchemaError(fmt::format("malformed real field '{}'", field));
  }
  if (used != copy.size()) throw SchemaError(fmt::format("malformed real field '{}'", field));
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string sign_string(const std::vector<int>& signs) {
  std::string out;
  for (int s : signs) out += s > 0 ? '+' : '-';
  return out;
}

std::string dump_report(const ClassificationReport& rep) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["family"] = {{"id", rep.family.id},
                 {"m", rep.family.m},
                 {"k", rep.family.k},
                 {"l", rep.family.l},
                 {"n", rep.family.n},
                 {"block_signs", rep.family.block_signs}};
  j["multiplicities"] = {{"m1", rep.family.m1}, {"m2", rep.family.m2}};
  j["variant"] = rep.family.variant;
  j["conventions"] = {{"normal_curvature", kNormalCurvatureConvention},
                      {"normal_frame", kNormalFrameConvention}};
  ojson samples = ojson::array();
  for (const auto& r : rep.samples) samples.push_back(sample_json(r));
  j["samples"] = std::move(samples);
  j["stats"] = stats_json(rep.stats);
  j["verdicts"] = verdicts_json(rep.verdicts);
  if (rep.witness) {
    const auto& w = *rep.witness;
    j["witness"] = {{"seed", w.seed},
                    {"alpha", w.alpha},
                    {"T", w.T},
                    {"x", vector_json(w.x)},
                    {"nym_density", density_json(w.nym)},
                    {"tym_density", density_json(w.tym)}};
  } else {
    j["witness"] = nullptr;
  }
  j["config"] = config_json(rep.config);
  return j.dump(1) + "\n";
}

ClassificationReport parse_report(std::string_view text) {
  try {
    const auto j = ojson::parse(text);
    if (!j.is_object()) throw SchemaError("report must be a JSON object");
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion)
      throw SchemaError(fmt::format("report schema version {} != {}", version, kReportSchemaVersion));
    ClassificationReport rep;
    const auto& fam = j.at("family");
    rep.family.id = fam.at("id").get<std::string>();
    rep.family.m = fam.at("m").get<int>();
    rep.family.k = fam.at("k").get<int>();
    rep.family.l = fam.at("l").get<int>();
    rep.family.n = fam.at("n").get<int>();
    rep.family.block_signs = fam.at("block_signs").get<std::vector<int>>();
    rep.family.m1 = j.at("multiplicities").at("m1").get<int>();
    rep.family.m2 = j.at("multiplicities").at("m2").get<int>();
    rep.family.variant = j.at("variant").get<std::string>();
    for (const auto& s : j.at("samples")) rep.samples.push_back(sample_from(s));
    rep.stats = stats_from(j.at("stats"));
    rep.verdicts = verdicts_from(j.at("verdicts"));
    if (const auto& w = j.at("witness"); !w.is_null()) {
      Witness wit;
      wit.seed = w.at("seed").get<std::uint64_t>();
      wit.alpha = w.at("alpha").get<int>();
      wit.T = w.at("T").get<double>();
      wit.x = vector_from(w.at("x"));
      wit.nym = density_from(w.at("nym_density"));
      wit.tym = density_from(w.at("tym_density"));
      rep.witness = std::move(wit);
    }
    rep.config = config_from(j.at("config"));
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed report: {}", e.what()));
  }
}

void save_report(const ClassificationReport& rep, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << dump_report(rep);
  if (!out) throw ConfigError(fmt::format("write to {} failed", path.string()));
}

ClassificationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

bool report_self_consistent(const ClassificationReport& rep) {
  const auto stats = aggregate_stats(rep.samples);
  ojson a = stats_json(stats);
  ojson b = stats_json(rep.stats);
  if (a != b) return false;
  const auto v = derive_verdicts(rep.stats, rep.config.thresholds, rep.family);
  return verdicts_json(v) == verdicts_json(rep.verdicts);
}

std::vector<VerdictRow> verdict_rows(const ClassificationReport& rep) {
  const auto& f = rep.family;
  const auto& v = rep.verdicts;
  const auto& s = rep.stats;
  const std::array<std::pair<bool, double>, kVerdictFields.size()> entries = {{
      {v.is_NYM_evidence, s.max_abs_T},
      {v.is_TYM_evidence, std::max(s.max_abs_T, s.max_cubic_traces)},
      {v.classical_NYM, s.max_nym_residual},
      {v.classical_TYM, s.max_codazzi_residual},
      {v.paper_exception_candidate, 2.0 * f.m2 - f.m1 + 1.0},
      {v.invariants_hold, std::max(s.max_identity, s.max_curvature_defect)},
  }};
  std::vector<VerdictRow> rows;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    VerdictRow r;
    r.family = f.id;
    r.m = f.m;
    r.k = f.k;
    r.signs = sign_string(f.block_signs);
    r.l = f.l;
    r.n = f.n;
    r.m1 = f.m1;
    r.m2 = f.m2;
    r.variant = f.variant;
    r.verdict = std::string(kVerdictFields[i]);
    r.value = entries[i].first;
    r.statistic = entries[i].second;
    r.threshold = v.zero_threshold;
    r.samples = s.ok_count + s.error_count;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_csv(const std::vector<VerdictRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.family, r.m, r.k, r.signs, r.l,
                       r.n, r.m1, r.m2, r.variant, r.verdict, r.value ? "true" : "false",
                       r.statistic, r.threshold, r.samples);
  return out;
}

std::vector<VerdictRow> parse_rows_csv(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) throw SchemaError("unexpected CSV header");
  std::vector<VerdictRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 14) throw SchemaError(fmt::format("CSV line {} has {} fields", i + 1, f.size()));
    VerdictRow r;
    r.family = std::string(f[0]);
    r.m = parse_number<int>(f[1]);
    r.k = parse_number<int>(f[2]);
    r.signs = std::string(f[3]);
    r.l = parse_number<int>(f[4]);
    r.n = parse_number<int>(f[5]);
    r.m1 = parse_number<int>(f[6]);
    r.m2 = parse_number<int>(f[7]);
    r.variant = std::string(f[8]);
    r.verdict = std::string(f[9]);
    if (f[10] != "true" && f[10] != "false")
      throw SchemaError(fmt::format("CSV line {}: bad boolean '{}'", i + 1, f[10]));
    r.value = f[10] == "true";
    r.statistic = parse_double(f[11]);
    r.threshold = parse_double(f[12]);
    r.samples = parse_number<int>(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_json(const std::vector<VerdictRow>& rows) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  ojson arr = ojson::array();
  for (const auto& r : rows) arr.push_back(row_json(r));
  j["rows"] = std::move(arr);
  return j.dump(1) + "\n";
}

std::vector<VerdictRow> parse_rows_json(std::string_view text) {
  try {
    const auto j = ojson::parse(text);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw SchemaError("verdict table schema version mismatch");
    std::vector<VerdictRow> rows;
    for (const auto& o : j.at("rows")) {
      VerdictRow r;
      r.family = o.at("family").get<std::string>();
      r.m = o.at("m").get<int>();
      r.k = o.at("k").get<int>();
      r.signs = o.at("signs").get<std::string>();
      r.l = o.at("l").get<int>();
      r.n = o.at("n").get<int>();
      r.m1 = o.at("m1").get<int>();
      r.m2 = o.at("m2").get<int>();
      r.variant = o.at("variant").get<std::string>();
      r.verdict = o.at("verdict").get<std::string>();
      r.value = o.at("value").get<bool>();
      r.statistic = o.at("statistic").get<double>();
      r.threshold = o.at("threshold").get<double>();
      r.samples = o.at("samples").get<int>();
      rows.push_back(std::move(r));
    }
    return rows;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed verdict table: {}", e.what()));
  }
}

}  // namespace cliffym
