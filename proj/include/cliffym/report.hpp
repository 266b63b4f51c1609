#pragma once

#include "cliffym/yang_mills.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cliffym {

inline constexpr int kReportSchemaVersion = 1;

/// Fixed normal-curvature sign convention written into every report.
inline constexpr std::string_view kNormalCurvatureConvention =
    "Omega_perp_ab(e_i, e_j) = [h^a, h^b]_ij";
inline constexpr std::string_view kNormalFrameConvention =
    "normal indices label P_a x; derivatives act on components";
inline constexpr std::string_view kVerdictLabel = "numerical evidence";

/// Order of verdict fields in CSV sweeps.
inline constexpr std::array<std::string_view, 6> kVerdictFields = {
    "is_NYM_evidence", "is_TYM_evidence",          "classical_NYM",
    "classical_TYM",   "paper_exception_candidate", "invariants_hold"};

/// Report JSON with floats written in shortest round-trip form.
std::string dump_report(const ClassificationReport& rep);

/// Throws SchemaError on malformed input or a schema version mismatch.
ClassificationReport parse_report(std::string_view text);

/// Throws ConfigError when the file cannot be written.
void save_report(const ClassificationReport& rep, const std::filesystem::path& path);
/// Throws ConfigError when unreadable, SchemaError when malformed.
ClassificationReport load_report(const std::filesystem::path& path);

/// Stored stats match the stored samples and stored verdicts match the stored stats.
bool report_self_consistent(const ClassificationReport& rep);

/// One row of a sweep table.
struct VerdictRow {
  std::string family;
  int m = 0;
  int k = 0;
  std::string signs;
  int l = 0;
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  std::string variant;
  std::string verdict;
  bool value = false;
  double statistic = 0.0;
  double threshold = 0.0;
  int samples = 0;

  bool operator==(const VerdictRow&) const = default;
};

/// One row per entry of kVerdictFields.
std::vector<VerdictRow> verdict_rows(const ClassificationReport& rep);

std::string rows_to_csv(const std::vector<VerdictRow>& rows);
/// Throws SchemaError on a bad header or malformed row.
std::vector<VerdictRow> parse_rows_csv(std::string_view text);
std::string rows_to_json(const std::vector<VerdictRow>& rows);
/// Throws SchemaError on malformed input.
std::vector<VerdictRow> parse_rows_json(std::string_view text);

/// Compact sign string such as "+-" for block signs.
std::string sign_string(const std::vector<int>& signs);

}  // namespace cliffym
