#pragma once

#include "cliffym/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cliffym {

inline constexpr int kMaxCliffordOrder = 9;
inline constexpr double kAlgebraTol = 1e-12;

/// Dimension of the irreducible real module of Cl_{m-1}; delta(m+8) = 16 delta(m).
int irreducible_dimension(int m);

/// Skew-symmetric orthogonal generators E_1..E_{m-1} on R^l, l = k*delta(m),
/// with E_a E_b + E_b E_a = -2 delta_ab I.
struct GeneratorSet {
  int m = 0;
  int k = 0;
  int delta = 0;
  int l = 0;
  std::vector<Matrix> generators;
  std::vector<int> block_signs;
};

/// Builds block-diagonal generators from explicit irreducible representations.
/// For m = 0 mod 4 the b-th irreducible block of E_1 is scaled by block_signs[b];
/// otherwise block_signs is ignored and stored as all +1.
/// Throws ConfigError when the focal submanifold would be empty (l - m - 1 < 1).
GeneratorSet build_generators(int m, int k, std::span<const int> block_signs = {});

/// Max entry error of the generator relations (skewness, orthogonality, anticommutation).
double generator_defect(const GeneratorSet& g);

enum class VariantKind { NotApplicable, Definite, Indefinite };

struct VariantTag {
  VariantKind kind = VariantKind::NotApplicable;
  double product_trace = 0.0;
};

std::string_view to_string(VariantKind kind);

/// Symmetric Clifford system P_0..P_m on R^{2l}: symmetric orthogonal matrices with
/// P_i P_j + P_j P_i = 2 delta_ij I. Immutable once constructed.
class CliffordSystem {
 public:
  /// Validates every relation to kAlgebraTol and throws ValidationError otherwise.
  /// `k` and `block_signs` are carried as provenance and do not affect the algebra.
  CliffordSystem(int m, int k, std::vector<int> block_signs, std::vector<Matrix> matrices);

  int m() const { return m_; }
  int k() const { return k_; }
  int l() const { return l_; }
  int dim_ambient() const { return 2 * l_; }
  /// Dimension of M_+, n = 2l - m - 2 = m1 + 2 m2.
  int n() const { return 2 * l_ - m_ - 2; }
  int normal_count() const { return m_ + 1; }
  int m1() const { return m_; }
  int m2() const { return l_ - m_ - 1; }
  const std::vector<int>& block_signs() const { return block_signs_; }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  const Matrix& operator[](int i) const { return matrices_[static_cast<std::size_t>(i)]; }

  /// max_{i,j} || P_i P_j + P_j P_i - 2 delta_ij I ||_inf
  double anticommutator_defect() const;

  /// Short identifier such as "m4_k2_+-".
  std::string family_id() const;

 private:
  int m_;
  int k_;
  int l_;
  std::vector<int> block_signs_;
  std::vector<Matrix> matrices_;
};

/// P_0 = diag(I,-I), P_1 = antidiag(I,I), P_a = [[0,E_{a-1}],[-E_{a-1},0]].
CliffordSystem assemble_system(const GeneratorSet& g);

/// Convenience: build_generators followed by assemble_system.
CliffordSystem make_system(int m, int k, std::span<const int> block_signs = {});

/// Definite/indefinite tag from Tr(P_0 ... P_m) for m = 0 mod 4.
VariantTag variant_classify(const CliffordSystem& s);

/// Product P_0 P_1 ... P_m.
Matrix full_product(const CliffordSystem& s);

/// Conjugate every P_i by an orthogonal matrix: P_i -> R P_i R^T.
CliffordSystem conjugate(const CliffordSystem& s, const Matrix& rotation);

// System file: {"m", "k", "block_signs", "matrices": [[row-major reals]]}.
std::string dump_system_json(const CliffordSystem& s);
CliffordSystem parse_system_json(std::string_view text);

}  // namespace cliffym
