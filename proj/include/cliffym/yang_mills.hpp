#pragma once

#include "cliffym/clifford.hpp"
#include "cliffym/curvature.hpp"
#include "cliffym/focal.hpp"
#include "cliffym/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cliffym {

inline constexpr double kCollapsedTol = 1e-10;

/// ||fd - closed||_inf / max(1, ||closed||_inf)
double fd_relative_deviation(const Matrix& fd, const Matrix& closed);

/// Closed form of e_j(g_ab(e_i)) = <P_a P_b e_j, e_i> - delta_ij delta_ab, indexed (j, i).
Matrix pairing_gradient(const CliffordPairings& pairings, int a, int b);

/// Finite-difference gradients of every g_ab, indexed [a * count + b], each (j, i).
std::vector<Matrix> pairing_gradient_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                        const FdConfig& cfg = {});

/// sum_j nabla_j [h^a, h^b]_ij by the closed form in g2 and q4. Requires a != b.
Vector commutator_divergence(const CliffordPairings& pairings, int a, int b);

/// The same divergences by finite differences of the commutator field, indexed
/// [a * count + b]; diagonal entries are zero.
std::vector<Vector> commutator_divergence_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                             const FdConfig& cfg = {});

/// Co-differential of the normal curvature. The distinguished component of D^{ab} is its
/// value along the unit tangent vector P_a P_b x.
struct NymResidual {
  std::vector<Vector> divergence;  // [a * count + b]
  Matrix distinguished;            // (a, b), zero on the diagonal
  Matrix distinguished_predicted;  // -2(n-2m+1) - 2 sum_{c,d distinct} q4(d,b,a,c)^2
  double max_abs = 0.0;            // max over a != b and i of |D^{ab}_i|
  double max_distinguished = 0.0;  // max over a != b of the distinguished component
};
NymResidual classical_nym_residual(const CliffordPairings& pairings);

/// C_ijk = nabla_j Ric_ik - nabla_k Ric_ij, flattened at (i*n + j)*n + k.
struct CodazziResidual {
  int n = 0;
  std::vector<double> c;
  double max_abs = 0.0;

  double operator()(int i, int j, int k) const {
    return c[static_cast<std::size_t>((i * n + j) * n + k)];
  }
};

/// Closed form in g2 and <P_a P_b e_j, e_k>.
CodazziResidual ricci_codazzi_residual(const CliffordPairings& pairings);

/// Same tensor from finite differences of the Gauss-equation Ricci tensor.
CodazziResidual ricci_codazzi_residual_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                          const FdConfig& cfg = {});

struct ObstructionValues {
  std::vector<double> T;
  /// For m = 4: 24 q4(R) q5(a, R) with R the sorted complement of a. Empty otherwise.
  std::vector<double> collapsed;
  double max_abs() const;
};

/// Throws ValidationError if the m = 4 collapsed form disagrees by more than kCollapsedTol.
ObstructionValues obstruction_T(const CliffordPairings& pairings);

struct DensityPair {
  double fd_value = 0.0;
  double algebraic_value = 0.0;
  double derivative_term = 0.0;
  double trace_terms = 0.0;

  bool consistent(double rel_tol = 1e-3) const;
};

/// Euler-Lagrange density of the normal functional in direction a; algebraic value -7 T_a.
DensityPair nym_density(const CliffordSystem& s, const AdaptedFrame& f, int a,
                        const FdConfig& cfg = {});

/// Euler-Lagrange density of the tangent functional in direction a; algebraic value -8 T_a.
DensityPair tym_density(const CliffordSystem& s, const AdaptedFrame& f, int a,
                        const FdConfig& cfg = {});

/// max over a of |sum_b Tr(h^a h^b h^b)| and |sum_{b,c} Tr(h^a h^b h^c) Tr(h^b h^c)|.
double cubic_trace_terms(const ShapeOperators& shape);

// ---------------------------------------------------------------------------------------
// Classification

struct Thresholds {
  /// Absolute threshold for algebraic quantities; <= 0 means 1e-9 * n.
  double zero = 0.0;
  /// Relative tolerance for finite-difference comparisons.
  double fd_relative = 1e-3;

  double zero_for(int n) const { return zero > 0.0 ? zero : 1e-9 * n; }
};

struct ClassifyConfig {
  int samples = 64;
  std::uint64_t seed = 0;
  Thresholds thresholds;
  FdConfig fd;
  bool sequential = false;
  bool fd_crosscheck = false;
  /// Worker count; 0 picks hardware concurrency. CLIFFORD_YM_THREADS caps either choice.
  unsigned threads = 0;

  void validate() const;
};

struct SampleRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int newton_steps = 0;
  double residual = 0.0;
  std::vector<double> T;
  double q_form = 0.0;           // <P_0 ... P_m x, x>
  double identity_worst = 0.0;   // worst trace/pairing identity discrepancy
  double curvature_defect = 0.0; // Riemann symmetries and Ricci route agreement
  double nym_residual = 0.0;
  double nym_distinguished = 0.0;
  double codazzi_residual = 0.0;
  double cubic_traces = 0.0;
  std::optional<double> fd_deviation;
};

struct Stats {
  int ok_count = 0;
  int error_count = 0;
  double max_abs_T = 0.0;
  double max_abs_q_form = 0.0;
  double max_identity = 0.0;
  double max_curvature_defect = 0.0;
  double max_nym_residual = 0.0;
  double min_nym_residual = 0.0;
  double max_nym_distinguished = 0.0;
  double max_codazzi_residual = 0.0;
  double min_codazzi_residual = 0.0;
  double max_cubic_traces = 0.0;
  std::optional<double> max_fd_deviation;
};

struct Verdicts {
  bool is_NYM_evidence = false;
  bool is_TYM_evidence = false;
  bool classical_NYM = false;
  bool classical_TYM = false;
  /// 2 m2 - m1 + 1 <= 0: the sign argument for classical normal YM failure does not apply.
  bool paper_exception_candidate = false;
  /// Identity, curvature and (when run) finite-difference checks all within tolerance.
  bool invariants_hold = false;
  double zero_threshold = 0.0;
};

struct Witness {
  std::uint64_t seed = 0;
  int alpha = 0;
  double T = 0.0;
  Vector x;
  DensityPair nym;
  DensityPair tym;
};

struct FamilyInfo {
  std::string id;
  int m = 0;
  int k = 0;
  int l = 0;
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  std::vector<int> block_signs;
  std::string variant;
};

FamilyInfo family_info(const CliffordSystem& s);

struct ClassificationReport {
  FamilyInfo family;
  ClassifyConfig config;
  std::vector<SampleRecord> samples;
  Stats stats;
  Verdicts verdicts;
  std::optional<Witness> witness;
};

/// Every per-point quantity at one seeded sample; errors are captured in the record.
SampleRecord evaluate_sample(const CliffordSystem& s, std::uint64_t seed, const ClassifyConfig& cfg);

Stats aggregate_stats(const std::vector<SampleRecord>& samples);

/// Pure threshold function of the stored statistics.
Verdicts derive_verdicts(const Stats& stats, const Thresholds& thresholds, const FamilyInfo& family);

/// Samples seeds seed, seed+1, ... in parallel. The witness is the sample with the largest
/// |T_a| when that exceeds the zero threshold; densities are evaluated there.
/// Throws SolverError when more than 20% of the samples fail.
ClassificationReport classify(const CliffordSystem& s, const ClassifyConfig& cfg);

/// Worker count after applying CLIFFORD_YM_THREADS.
unsigned worker_count(const ClassifyConfig& cfg);

}  // namespace cliffym
