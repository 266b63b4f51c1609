#include "cliffym/curvature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>

namespace cliffym {
namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

template <std::size_t N>
int permutation_sign(const std::array<int, N>& idx) {
  int inversions = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (idx[i] > idx[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

template <std::size_t N>
unsigned index_mask(const std::array<int, N>& idx) {
  unsigned mask = 0;
  for (int i : idx) {
    const unsigned bit = 1u << static_cast<unsigned>(i);
    if (mask & bit) throw std::invalid_argument("indices must be pairwise distinct");
    mask |= bit;
  }
  return mask;
}

}  // namespace

ShapeOperators shape_operators(const CliffordSystem& s, const AdaptedFrame& f) {
  ShapeOperators out;
  out.h.reserve(static_cast<std::size_t>(s.normal_count()));
  for (int a = 0; a <= s.m(); ++a) {
    Matrix h = -(f.tangent.transpose() * (s[a] * f.tangent));
    if (max_abs(h - h.transpose()) >= 1e-12)
      throw ValidationError(fmt::format("shape operator h^{} is not symmetric", a));
    if (std::abs(h.trace()) >= 1e-9)
      throw ValidationError(fmt::format("shape operator h^{} has trace {:.3e}", a, h.trace()));
    out.h.push_back(std::move(h));
  }
  return out;
}

CliffordPairings::CliffordPairings(const CliffordSystem& s, const AdaptedFrame& f)
    : count_(s.normal_count()),
      n_(f.n()),
      x_(f.point.x),
      tangent_(f.tangent),
      subset_memo_(std::size_t{1} << static_cast<unsigned>(count_)) {
  const int c = count_;
  std::vector<Vector> px;
  for (int a = 0; a < c; ++a) {
    px.push_back(s[a] * x_);
    p_tangent_.push_back(s[a] * tangent_);
  }
  ppx_.resize(static_cast<std::size_t>(c * c));
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) ppx_[static_cast<std::size_t>(idx2(a, b))] = s[a] * px[b];
  pppx_.resize(static_cast<std::size_t>(c * c * c));
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int d = 0; d < c; ++d)
        pppx_[static_cast<std::size_t>(idx3(a, b, d))] =
            s[a] * ppx_[static_cast<std::size_t>(idx2(b, d))];

  g2_.resize(c * c, n_);
  for (int r = 0; r < c * c; ++r)
    g2_.row(r) = (tangent_.transpose() * ppx_[static_cast<std::size_t>(r)]).transpose();
  g3_.resize(c * c * c, n_);
  for (int r = 0; r < c * c * c; ++r)
    g3_.row(r) = (tangent_.transpose() * pppx_[static_cast<std::size_t>(r)]).transpose();

  G_ = Matrix::Zero(n_, n_);
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      if (a == b) continue;
      const Vector g = g2(a, b);
      G_ += g * g.transpose();
    }
}

double CliffordPairings::q3(int a, int b, int c) const {
  return pppx_[static_cast<std::size_t>(idx3(a, b, c))].dot(x_);
}

double CliffordPairings::q4(int a, int b, int c, int d) const {
  return ppx_[static_cast<std::size_t>(idx2(c, d))].dot(ppx_[static_cast<std::size_t>(idx2(b, a))]);
}

double CliffordPairings::q5(int a, int b, int c, int d, int e) const {
  return pppx_[static_cast<std::size_t>(idx3(c, d, e))].dot(
      ppx_[static_cast<std::size_t>(idx2(b, a))]);
}

double CliffordPairings::subset_value(unsigned mask) const {
  auto& slot = subset_memo_[mask];
  if (!slot) {
    std::array<int, 5> sorted{};
    int len = 0;
    for (int i = 0; i < count_; ++i)
      if (mask & (1u << static_cast<unsigned>(i))) sorted[static_cast<std::size_t>(len++)] = i;
    if (len == 4)
      slot = q4(sorted[0], sorted[1], sorted[2], sorted[3]);
    else if (len == 5)
      slot = q5(sorted[0], sorted[1], sorted[2], sorted[3], sorted[4]);
    else
      throw std::invalid_argument("subset memo holds only 4- and 5-index products");
  }
  return *slot;
}

double CliffordPairings::q4_distinct(std::array<int, 4> idx) const {
  return permutation_sign(idx) * subset_value(index_mask(idx));
}

double CliffordPairings::q5_distinct(std::array<int, 5> idx) const {
  return permutation_sign(idx) * subset_value(index_mask(idx));
}

Vector CliffordPairings::p4_tangent(int a, int b, int c, int d) const {
  return p_tangent_[static_cast<std::size_t>(a)].transpose() *
         pppx_[static_cast<std::size_t>(idx3(b, c, d))];
}

Matrix CliffordPairings::pair_operator(int a, int b) const {
  // <P_a P_b e_j, e_k> = <P_b e_j, P_a e_k>
  return p_tangent_[static_cast<std::size_t>(b)].transpose() *
         p_tangent_[static_cast<std::size_t>(a)];
}

CliffordPairings clifford_pairings(const CliffordSystem& s, const AdaptedFrame& f) {
  return CliffordPairings(s, f);
}

double distinct_quintuple_sum(const CliffordPairings& pairings, int alpha) {
  const int c = pairings.normal_count();
  double total = 0.0;
  for (int b = 0; b < c; ++b) {
    if (b == alpha) continue;
    for (int g = 0; g < c; ++g) {
      if (g == alpha || g == b) continue;
      for (int d = 0; d < c; ++d) {
        if (d == alpha || d == b || d == g) continue;
        for (int e = 0; e < c; ++e) {
          if (e == alpha || e == b || e == g || e == d) continue;
          total += pairings.q4_distinct({b, g, d, e}) * pairings.q5_distinct({alpha, b, g, d, e});
        }
      }
    }
  }
  return total;
}

double CurvatureTensors::riemann_symmetry_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = R(i, j, k, l);
          worst = std::max({worst, std::abs(r + R(j, i, k, l)), std::abs(r + R(i, j, l, k)),
                            std::abs(r - R(k, l, i, j))});
        }
  return worst;
}

Matrix gauss_ricci(const ShapeOperators& shape) {
  const int n = shape.n();
  Matrix ric = (n - 1.0) * Matrix::Identity(n, n);
  for (const auto& h : shape.h) ric += h.trace() * h - h * h;
  return ric;
}

Matrix normal_curvature_wedge(const ShapeOperators& shape, int a, int b) {
  const int n = shape.n();
  const Matrix& ha = shape[a];
  const Matrix& hb = shape[b];
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += ha(i, k) * hb(k, j) - ha(j, k) * hb(k, i);
      out(i, j) = acc;
    }
  return out;
}

CurvatureTensors curvature_pack(const ShapeOperators& shape, const CliffordPairings& pairings,
                                int n, int m) {
  if (shape.n() != n || pairings.n() != n || shape.normal_count() != m + 1 ||
      pairings.normal_count() != m + 1)
    throw ValidationError("curvature_pack: dimension mismatch");

  CurvatureTensors out;
  out.n = n;
  out.normal_count = m + 1;
  out.riemann.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double r = (k == i && l == j ? 1.0 : 0.0) - (k == j && l == i ? 1.0 : 0.0);
          for (const auto& h : shape.h) r += h(k, i) * h(l, j) - h(k, j) * h(l, i);
          out.riemann[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = r;
        }

  out.ricci = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) out.ricci(i, k) += out.R(i, j, k, j);
  out.ricci_closed = (n - m - 2.0) * Matrix::Identity(n, n) + pairings.G();

  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b) out.normal_curv.push_back(shape[a] * shape[b] - shape[b] * shape[a]);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) out.riemann_norm_sq += out.R(i, j, k, l) * out.R(i, j, k, l);
  for (const auto& w : out.normal_curv)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.normal_norm_sq += w(i, j) * w(i, j);
  return out;
}

double IdentityReport::worst() const {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.max_abs_error);
  return w;
}

void IdentityReport::absorb(const IdentityReport& other) {
  if (checks.empty()) {
    checks = other.checks;
    samples = other.samples;
    return;
  }
  for (const auto& oc : other.checks) {
    auto it = std::find_if(checks.begin(), checks.end(),
                           [&](const IdentityCheck& c) { return c.name == oc.name; });
    if (it == checks.end())
      checks.push_back(oc);
    else
      it->max_abs_error = std::max(it->max_abs_error, oc.max_abs_error);
  }
  samples += other.samples;
}

const IdentityCheck* IdentityReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

QuinticTraces quintic_traces(const ShapeOperators& shape) {
  const int c = shape.normal_count();
  const int n = shape.n();
  Matrix nested = Matrix::Zero(n, n);
  Matrix alternating = Matrix::Zero(n, n);
  for (int b = 0; b < c; ++b)
    for (int g = 0; g < c; ++g) {
      const Matrix bg = shape[b] * shape[g];
      nested += bg * (shape[g] * shape[b]);
      alternating += bg * bg;
    }
  QuinticTraces out;
  for (int a = 0; a < c; ++a) {
    out.nested.push_back((shape[a] * nested).trace());
    out.alternating.push_back((shape[a] * alternating).trace());
  }
  return out;
}

IdentityReport trace_identity_suite(const ShapeOperators& shape, const CliffordPairings& pairings,
                                    int n, int m) {
  const int c = m + 1;
  IdentityReport rep;

  double hh = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      Matrix rhs = pairings.p_tangent(a).transpose() * pairings.p_tangent(b);
      for (int g = 0; g < c; ++g) {
        if (g == a || g == b) continue;
        rhs -= pairings.g2(a, g) * pairings.g2(b, g).transpose();
      }
      hh = std::max(hh, max_abs(shape[a] * shape[b] - rhs));
    }
  rep.checks.push_back({"hh_product", hh});

  Matrix squares = Matrix::Zero(n, n);
  for (const auto& h : shape.h) squares += h * h;
  rep.checks.push_back(
      {"sum_squares", max_abs(squares - (c * Matrix::Identity(n, n) - pairings.G()))});

  double pairs = 0.0;
  for (int b = 0; b < c; ++b)
    for (int g = 0; g < c; ++g) {
      const double expected = b == g ? n - m : 0.0;
      pairs = std::max(pairs, std::abs((shape[b] * shape[g]).trace() - expected));
    }
  rep.checks.push_back({"trace_pairs", pairs});

  const auto quintic = quintic_traces(shape);
  double nested = 0.0, alternating = 0.0;
  for (int a = 0; a < c; ++a) {
    const double t = distinct_quintuple_sum(pairings, a);
    nested = std::max(nested, std::abs(quintic.nested[static_cast<std::size_t>(a)] - 2.0 * t));
    alternating = std::max(alternating, std::abs(quintic.alternating[static_cast<std::size_t>(a)] + t));
  }
  rep.checks.push_back({"quintic_nested", nested});
  rep.checks.push_back({"quintic_alternating", alternating});
  return rep;
}

IdentityReport pairing_identity_suite(const ShapeOperators& shape,
                                      const CliffordPairings& pairings) {
  const int c = pairings.normal_count();
  const int n = pairings.n();
  IdentityReport rep;

  double sym = 0.0, minimal = 0.0;
  for (const auto& h : shape.h) {
    sym = std::max(sym, max_abs(h - h.transpose()));
    minimal = std::max(minimal, std::abs(h.trace()));
  }
  rep.checks.push_back({"h_symmetry", sym});
  rep.checks.push_back({"minimality", minimal});

  double triple = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int g = 0; g < c; ++g) triple = std::max(triple, std::abs(pairings.q3(a, b, g)));
  rep.checks.push_back({"triple_product_zero", triple});

  double anti2 = 0.0, anti3 = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      anti2 = std::max(anti2, (pairings.g2(a, b) + pairings.g2(b, a)).cwiseAbs().maxCoeff());
      for (int g = 0; g < c; ++g) {
        anti3 = std::max(anti3, (pairings.g3(a, b, g) + pairings.g3(b, a, g)).cwiseAbs().maxCoeff());
        anti3 = std::max(anti3, (pairings.g3(a, b, g) + pairings.g3(a, g, b)).cwiseAbs().maxCoeff());
      }
    }
  rep.checks.push_back({"g2_antisymmetry", anti2});
  rep.checks.push_back({"g3_antisymmetry", anti3});

  // sum_j h^a_ij g_bc(e_j) = -g_abc(e_i)
  double hg2 = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int g = 0; g < c; ++g) {
        const Vector lhs = shape[a] * pairings.g2(b, g);
        hg2 = std::max(hg2, (lhs + pairings.g3(a, b, g)).cwiseAbs().maxCoeff());
      }
  rep.checks.push_back({"hg2_contraction", hg2});

  // sum_j h^a_ij g_bcd(e_j) = -<P_a P_b P_c P_d x, e_i> + sum_e g_ae(e_i) <P_e P_b P_c P_d x, x>
  double hg3 = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int g = 0; g < c; ++g)
        for (int d = 0; d < c; ++d) {
          Vector rhs = -pairings.p4_tangent(a, b, g, d);
          for (int e = 0; e < c; ++e) rhs += pairings.q4(e, b, g, d) * pairings.g2(a, e);
          const Vector lhs = shape[a] * pairings.g3(b, g, d);
          hg3 = std::max(hg3, (lhs - rhs).cwiseAbs().maxCoeff());
        }
  rep.checks.push_back({"hg3_contraction", hg3});

  // sum_i g_ab(e_i) g_cde(e_i) = -<P_a P_b P_c P_d P_e x, x>
  double g2g3 = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int g = 0; g < c; ++g)
        for (int d = 0; d < c; ++d)
          for (int e = 0; e < c; ++e) {
            const double lhs = pairings.g2(a, b).dot(pairings.g3(g, d, e));
            g2g3 = std::max(g2g3, std::abs(lhs + pairings.q5(a, b, g, d, e)));
          }
  rep.checks.push_back({"g2g3_pairing", g2g3});

  double trace_hg = 0.0;
  for (const auto& h : shape.h) trace_hg = std::max(trace_hg, std::abs((h * pairings.G()).trace()));
  rep.checks.push_back({"trace_hG", trace_hg});
  (void)n;
  return rep;
}

}  // namespace cliffym
