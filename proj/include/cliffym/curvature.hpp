#pragma once

#include "cliffym/clifford.hpp"
#include "cliffym/focal.hpp"
#include "cliffym/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cliffym {

/// h^a_ij = -<P_a e_i, e_j>, one symmetric n x n matrix per normal index.
struct ShapeOperators {
  std::vector<Matrix> h;

  int normal_count() const { return static_cast<int>(h.size()); }
  int n() const { return h.empty() ? 0 : static_cast<int>(h.front().rows()); }
  const Matrix& operator[](int a) const { return h[static_cast<std::size_t>(a)]; }
};

/// Throws ValidationError if symmetry (1e-12) or minimality (1e-9) fails.
ShapeOperators shape_operators(const CliffordSystem& s, const AdaptedFrame& f);

/// Clifford pairings at one frame:
///   g2(a,b)_i  = <P_a P_b x, e_i>
///   g3(a,b,c)_i = <P_a P_b P_c x, e_i>
///   G_ij = sum_c sum_{d != c} g2(c,d)_i g2(c,d)_j
/// and the scalar products <P_a ... x, x> of orders three to five.
///
/// The ambient vectors P_a x, P_a P_b x, P_a P_b P_c x and P_a e_i are kept so that any
/// product can be evaluated directly. Products over distinct indices are also available
/// through a memo keyed by the sorted index set; the permutation sign is applied on lookup.
/// The memo makes a single instance unsuitable for concurrent use.
class CliffordPairings {
 public:
  CliffordPairings(const CliffordSystem& s, const AdaptedFrame& f);

  int normal_count() const { return count_; }
  int m() const { return count_ - 1; }
  int n() const { return n_; }

  double g2(int a, int b, int i) const { return g2_(idx2(a, b), i); }
  Eigen::Ref<const Vector> g2(int a, int b) const { return g2_.row(idx2(a, b)).transpose(); }
  double g3(int a, int b, int c, int i) const { return g3_(idx3(a, b, c), i); }
  Eigen::Ref<const Vector> g3(int a, int b, int c) const {
    return g3_.row(idx3(a, b, c)).transpose();
  }
  const Matrix& G() const { return G_; }

  double q3(int a, int b, int c) const;
  double q4(int a, int b, int c, int d) const;
  double q5(int a, int b, int c, int d, int e) const;

  /// <P_a P_b P_c P_d x, x> for pairwise distinct indices, via the memo.
  double q4_distinct(std::array<int, 4> idx) const;
  /// <P_a P_b P_c P_d P_e x, x> for pairwise distinct indices, via the memo.
  double q5_distinct(std::array<int, 5> idx) const;

  /// <P_a P_b P_c P_d x, e_i> as a vector over i.
  Vector p4_tangent(int a, int b, int c, int d) const;
  /// <P_a P_b e_j, e_k> as an n x n matrix indexed (j, k).
  Matrix pair_operator(int a, int b) const;
  /// Columns P_a e_i (ambient).
  const Matrix& p_tangent(int a) const { return p_tangent_[static_cast<std::size_t>(a)]; }

 private:
  int idx2(int a, int b) const { return a * count_ + b; }
  int idx3(int a, int b, int c) const { return (a * count_ + b) * count_ + c; }
  double subset_value(unsigned mask) const;

  int count_;
  int n_;
  Vector x_;
  Matrix tangent_;
  std::vector<Matrix> p_tangent_;  // P_a E (2l x n)
  std::vector<Vector> ppx_;        // P_a P_b x
  std::vector<Vector> pppx_;       // P_a P_b P_c x
  Matrix g2_;
  Matrix g3_;
  Matrix G_;
  mutable std::vector<std::optional<double>> subset_memo_;
};

CliffordPairings clifford_pairings(const CliffordSystem& s, const AdaptedFrame& f);

/// T_a = sum over ordered distinct (b,c,d,e), all != a, of
///       <P_b P_c P_d P_e x, x> <P_a P_b P_c P_d P_e x, x>.
/// Zero when m <= 3.
double distinct_quintuple_sum(const CliffordPairings& pairings, int alpha);

/// Riemann tensor by the Gauss equation and normal curvature by commutators, with their
/// derived quantities.
///
/// Normal curvature convention: Omega_perp_ab(e_i, e_j) = [h^a, h^b]_ij.
struct CurvatureTensors {
  int n = 0;
  int normal_count = 0;
  std::vector<double> riemann;  // R(i,j,k,l) at ((i*n + j)*n + k)*n + l
  std::vector<Matrix> normal_curv;  // index a * count + b
  Matrix ricci;                     // Gauss contraction
  Matrix ricci_closed;              // (n - m - 2) I + G
  double riemann_norm_sq = 0.0;     // sum_{i,j} sum_{k<l} R_ijkl^2
  double normal_norm_sq = 0.0;      // sum_{a,b} sum_{i<j} (Omega_perp_ab)_ij^2

  double R(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  const Matrix& omega_perp(int a, int b) const {
    return normal_curv[static_cast<std::size_t>(a * normal_count + b)];
  }

  /// max deviation from R_ijkl = -R_jikl = -R_ijlk = R_klij
  double riemann_symmetry_defect() const;
  double ricci_route_defect() const { return (ricci - ricci_closed).cwiseAbs().maxCoeff(); }
};

/// Throws ValidationError on dimension mismatch.
CurvatureTensors curvature_pack(const ShapeOperators& shape, const CliffordPairings& pairings,
                                int n, int m);

/// Ricci tensor from the Gauss equation contracted directly from h.
Matrix gauss_ricci(const ShapeOperators& shape);

/// Wedge form of the normal curvature: sum_k (h^a_ik h^b_kj - h^a_jk h^b_ki).
Matrix normal_curvature_wedge(const ShapeOperators& shape, int a, int b);

struct IdentityCheck {
  std::string name;
  double max_abs_error = 0.0;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  int samples = 1;

  double worst() const;
  /// Elementwise max with another report of the same layout; adds sample counts.
  void absorb(const IdentityReport& other);
  const IdentityCheck* find(std::string_view name) const;
};

/// Quintic traces by explicit matrix products:
///   nested[a]      = Tr sum_{b,c} h^a h^b h^c h^c h^b
///   alternating[a] = Tr sum_{b,c} h^a h^b h^c h^b h^c
struct QuinticTraces {
  std::vector<double> nested;
  std::vector<double> alternating;
};
QuinticTraces quintic_traces(const ShapeOperators& shape);

/// Trace identities, each evaluated by matrix products and by Clifford pairings:
///   hh_product     (h^a h^b)_ij = <P_a e_i, P_b e_j> - sum_{c != a,b} g_ac(e_i) g_bc(e_j)
///   sum_squares    sum_a (h^a)^2 = (m+1) I - G
///   trace_pairs    Tr(h^b h^c) = (n - m) delta_bc
///   quintic_nested / quintic_alternating  vs  +2 T_a / -T_a
IdentityReport trace_identity_suite(const ShapeOperators& shape, const CliffordPairings& pairings,
                                    int n, int m);

/// Pairing identities on M_+: symmetry and minimality of h, <P_a P_b P_c x, x> = 0,
/// antisymmetry of g2/g3, the three h-g contraction identities, and sum_i (h^a G)_ii = 0.
IdentityReport pairing_identity_suite(const ShapeOperators& shape,
                                      const CliffordPairings& pairings);

}  // namespace cliffym
