#pragma once

// Brute-force reference computations for the tests. Everything here works on plain nested
// std::vector data with explicit loops so that it shares no arithmetic with the library.

#include "cliffym/clifford.hpp"
#include "cliffym/focal.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

/// SplitMix64: a tiny seed generator for property tests.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Standard normal by Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

inline Dense dense(const cliffym::Matrix& a) {
  Dense out(static_cast<std::size_t>(a.rows()), Vec(static_cast<std::size_t>(a.cols())));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
  return out;
}

inline Vec vec(const Eigen::Ref<const cliffym::Vector>& v) {
  return Vec(v.data(), v.data() + v.size());
}

inline Dense mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.front().size();
  Dense out(n, Vec(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][p] * b[p][j];
  return out;
}

inline Vec apply(const Dense& a, const Vec& x) {
  Vec out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double trace(const Dense& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i][i];
  return s;
}

inline Vec tangent(const cliffym::AdaptedFrame& f, int i) { return vec(f.tangent.col(i)); }

/// max_{i,j} max entry of |P_i P_j + P_j P_i - 2 delta_ij I|
inline double anticommutator_defect(const cliffym::CliffordSystem& s) {
  double worst = 0.0;
  for (int i = 0; i <= s.m(); ++i)
    for (int j = 0; j <= s.m(); ++j) {
      const auto a = mul(dense(s[i]), dense(s[j]));
      const auto b = mul(dense(s[j]), dense(s[i]));
      for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a.size(); ++c) {
          const double target = (i == j && r == c) ? 2.0 : 0.0;
          worst = std::max(worst, std::abs(a[r][c] + b[r][c] - target));
        }
    }
  return worst;
}

/// Hamilton product on (1, i, j, k).
inline std::array<double, 4> hamilton(const std::array<double, 4>& p, const std::array<double, 4>& q) {
  return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
          p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
          p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
          p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
}

/// Matrix of q -> u q for the unit u in {i, j, k} (unit = 1, 2, 3).
inline Dense quaternion_left(int unit) {
  std::array<double, 4> u{0, 0, 0, 0};
  u[static_cast<std::size_t>(unit)] = 1.0;
  Dense out(4, Vec(4, 0.0));
  for (int c = 0; c < 4; ++c) {
    std::array<double, 4> e{0, 0, 0, 0};
    e[static_cast<std::size_t>(c)] = 1.0;
    const auto prod = hamilton(u, e);
    for (int r = 0; r < 4; ++r) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = prod[static_cast<std::size_t>(r)];
  }
  return out;
}

/// <P_{idx[0]} P_{idx[1]} ... P_{idx[last]} x, x> applying matrices right to left.
inline double product_form(const cliffym::CliffordSystem& s, const Vec& x, const std::vector<int>& idx) {
  Vec v = x;
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) v = oracle::apply(dense(s[*it]), v);
  return dot(v, x);
}

/// <P_{idx...} x, e_i> for every tangent vector.
inline Vec product_tangent(const cliffym::CliffordSystem& s, const cliffym::AdaptedFrame& f,
                           const std::vector<int>& idx) {
  Vec v = vec(f.point.x);
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) v = oracle::apply(dense(s[*it]), v);
  Vec out;
  for (int i = 0; i < f.n(); ++i) out.push_back(dot(v, tangent(f, i)));
  return out;
}

/// h^a_ij = -<P_a e_i, e_j> by explicit dot products.
inline std::vector<Dense> shape(const cliffym::CliffordSystem& s, const cliffym::AdaptedFrame& f) {
  std::vector<Dense> out;
  const int n = f.n();
  for (int a = 0; a <= s.m(); ++a) {
    const auto p = dense(s[a]);
    Dense h(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
      const Vec pe = oracle::apply(p, tangent(f, i));
      for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = -dot(pe, tangent(f, j));
    }
    out.push_back(std::move(h));
  }
  return out;
}

/// Quadruple loop over ordered distinct (b, c, d, e), all different from a, with every
/// product formed from scratch.
inline double obstruction(const cliffym::CliffordSystem& s, const Vec& x, int a) {
  const int count = s.normal_count();
  double total = 0.0;
  for (int b = 0; b < count; ++b)
    for (int c = 0; c < count; ++c)
      for (int d = 0; d < count; ++d)
        for (int e = 0; e < count; ++e) {
          const std::array<int, 5> all{a, b, c, d, e};
          bool distinct = true;
          for (int p = 0; p < 5; ++p)
            for (int q = p + 1; q < 5; ++q) distinct = distinct && all[static_cast<std::size_t>(p)] != all[static_cast<std::size_t>(q)];
          if (!distinct) continue;
          total += product_form(s, x, {b, c, d, e}) * product_form(s, x, {a, b, c, d, e});
        }
  return total;
}

/// Tr sum_{b,c} h^a h^b h^c h^c h^b and Tr sum_{b,c} h^a h^b h^c h^b h^c by naive products.
inline std::array<double, 2> quintic(const std::vector<Dense>& h, int a) {
  double nested = 0.0, alternating = 0.0;
  const auto& ha = h[static_cast<std::size_t>(a)];
  for (const auto& hb : h)
    for (const auto& hc : h) {
      const auto abc = mul(mul(ha, hb), hc);
      nested += trace(mul(mul(abc, hc), hb));
      alternating += trace(mul(mul(abc, hb), hc));
    }
  return {nested, alternating};
}

/// Ricci tensor by contracting the Gauss-equation Riemann tensor.
inline Dense ricci(const std::vector<Dense>& h) {
  const std::size_t n = h.front().size();
  Dense out(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        double r = (k == i ? 1.0 : 0.0) - (k == j && j == i ? 1.0 : 0.0);
        // R_ijkj = delta_ki delta_jj - delta_kj delta_ji + sum_a (h_ki h_jj - h_kj h_ji)
        for (const auto& ha : h) r += ha[k][i] * ha[j][j] - ha[k][j] * ha[j][i];
        out[i][k] += r;
      }
  return out;
}

/// Random orthogonal matrix from the QR factor of a Gaussian matrix.
inline cliffym::Matrix random_orthogonal(int dim, std::uint64_t seed) {
  SeedStream rng(seed);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return cliffym::Matrix(qr.householderQ());
}

/// Unit vector with Gaussian entries.
inline cliffym::Vector random_unit(int dim, SeedStream& rng) {
  cliffym::Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v.normalized();
}

}  // namespace oracle
