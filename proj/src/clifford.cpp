#include "cliffym/clifford.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fmt/format.h>

namespace cliffym {
namespace {

Matrix quaternion_left(int unit) {
  // Left multiplication by i, j, k on the basis (1, i, j, k).
  static constexpr std::array<std::array<std::array<int, 4>, 4>, 3> table{{
      {{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}},
      {{{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}}},
      {{{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}},
  }};
  Matrix out(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = table[unit][r][c];
  return out;
}

// Octonion product of basis units e_a e_b = sign * e_c, from the Fano plane.
struct UnitProduct {
  int sign;
  int index;
};

UnitProduct octonion_unit_product(int a, int b) {
  if (a == 0) return {1, b};
  if (b == 0) return {1, a};
  if (a == b) return {-1, 0};
  static constexpr std::array<std::array<int, 3>, 7> triples{{
      {1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}}};
  for (const auto& t : triples) {
    for (int r = 0; r < 3; ++r) {
      const int i = t[r], j = t[(r + 1) % 3], k = t[(r + 2) % 3];
      if (a == i && b == j) return {1, k};
      if (a == j && b == i) return {-1, k};
    }
  }
  throw std::logic_error("octonion table incomplete");
}

Matrix octonion_left(int unit) {
  Matrix out = Matrix::Zero(8, 8);
  for (int b = 0; b < 8; ++b) {
    const auto p = octonion_unit_product(unit, b);
    out(p.index, b) = p.sign;
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Irreducible generators E_1..E_{m-1} on R^{delta(m)}.
std::vector<Matrix> irreducible_generators(int m) {
  std::vector<Matrix> out;
  if (m == 1) return out;
  if (m == 2) {
    Matrix j(2, 2);
    j << 0, -1, 1, 0;
    out.push_back(j);
    return out;
  }
  if (m <= 4) {
    for (int a = 0; a < m - 1; ++a) out.push_back(quaternion_left(a));
    return out;
  }
  if (m <= 8) {
    for (int a = 1; a < m; ++a) out.push_back(octonion_left(a));
    return out;
  }
  // m == 9: F_a (x) sigma_z for the seven octonion units, plus I_8 (x) J.
  Matrix sz(2, 2), j(2, 2);
  sz << 1, 0, 0, -1;
  j << 0, -1, 1, 0;
  for (int a = 1; a <= 7; ++a) out.push_back(kron(octonion_left(a), sz));
  out.push_back(kron(Matrix::Identity(8, 8), j));
  return out;
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

int irreducible_dimension(int m) {
  if (m < 1) throw ConfigError(fmt::format("irreducible_dimension: m must be >= 1, got {}", m));
  static constexpr std::array<int, 8> table{1, 2, 4, 4, 8, 8, 8, 8};
  int scale = 1;
  while (m > 8) {
    m -= 8;
    scale *= 16;
  }
  return scale * table[static_cast<std::size_t>(m - 1)];
}

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::NotApplicable: return "NotApplicable";
    case VariantKind::Definite: return "Definite";
    case VariantKind::Indefinite: return "Indefinite";
  }
  return "?";
}

GeneratorSet build_generators(int m, int k, std::span<const int> block_signs) {
  if (m < 1 || m > kMaxCliffordOrder)
    throw ConfigError(fmt::format("m must be in [1, {}], got {}", kMaxCliffordOrder, m));
  if (k < 1) throw ConfigError(fmt::format("k must be >= 1, got {}", k));

  GeneratorSet g;
  g.m = m;
  g.k = k;
  g.delta = irreducible_dimension(m);
  g.l = k * g.delta;
  if (g.l - m - 1 < 1)
    throw ConfigError(fmt::format("family m={} k={} has m2 = {} < 1 (empty focal submanifold)", m,
                                  k, g.l - m - 1));

  const bool signed_family = m % 4 == 0;
  g.block_signs.assign(static_cast<std::size_t>(k), 1);
  if (signed_family && !block_signs.empty()) {
    if (block_signs.size() != static_cast<std::size_t>(k))
      throw ConfigError(
          fmt::format("expected {} block signs, got {}", k, block_signs.size()));
    for (std::size_t b = 0; b < block_signs.size(); ++b) {
      if (block_signs[b] != 1 && block_signs[b] != -1)
        throw ConfigError("block signs must be +1 or -1");
      g.block_signs[b] = block_signs[b];
    }
  }

  const auto irreducible = irreducible_generators(m);
  for (std::size_t a = 0; a < irreducible.size(); ++a) {
    Matrix e = Matrix::Zero(g.l, g.l);
    for (int b = 0; b < k; ++b) {
      const double sign = (a == 0) ? g.block_signs[static_cast<std::size_t>(b)] : 1.0;
      e.block(b * g.delta, b * g.delta, g.delta, g.delta) = sign * irreducible[a];
    }
    g.generators.push_back(std::move(e));
  }

  if (const double defect = generator_defect(g); defect >= kAlgebraTol)
    throw ValidationError(fmt::format("generator relations violated by {:.3e}", defect));
  return g;
}

double generator_defect(const GeneratorSet& g) {
  const Matrix id = Matrix::Identity(g.l, g.l);
  double worst = 0.0;
  for (std::size_t a = 0; a < g.generators.size(); ++a) {
    const Matrix& ea = g.generators[a];
    worst = std::max(worst, max_abs(ea.transpose() + ea));
    worst = std::max(worst, max_abs(ea.transpose() * ea - id));
    for (std::size_t b = a; b < g.generators.size(); ++b) {
      const Matrix& eb = g.generators[b];
      const Matrix target = (a == b) ? Matrix(-2.0 * id) : Matrix::Zero(g.l, g.l);
      worst = std::max(worst, max_abs(ea * eb + eb * ea - target));
    }
  }
  return worst;
}

CliffordSystem::CliffordSystem(int m, int k, std::vector<int> block_signs,
                               std::vector<Matrix> matrices)
    : m_(m), k_(k), l_(0), block_signs_(std::move(block_signs)), matrices_(std::move(matrices)) {
  if (m_ < 1 || m_ > kMaxCliffordOrder)
    throw ValidationError(fmt::format("m must be in [1, {}], got {}", kMaxCliffordOrder, m_));
  if (matrices_.size() != static_cast<std::size_t>(m_ + 1))
    throw ValidationError(
        fmt::format("expected {} matrices for m={}, got {}", m_ + 1, m_, matrices_.size()));
  const auto dim = matrices_.front().rows();
  if (dim == 0 || dim % 2 != 0)
    throw ValidationError("ambient dimension must be even and positive");
  for (const auto& p : matrices_)
    if (p.rows() != dim || p.cols() != dim)
      throw ValidationError("all Clifford matrices must be square of equal size");
  l_ = static_cast<int>(dim / 2);
  if (m2() < 1)
    throw ValidationError(fmt::format("m2 = l - m - 1 = {} < 1 (empty focal submanifold)", m2()));
  for (const auto& p : matrices_)
    if (max_abs(p - p.transpose()) >= kAlgebraTol)
      throw ValidationError("Clifford matrix is not symmetric");
  if (const double defect = anticommutator_defect(); defect >= kAlgebraTol)
    throw ValidationError(fmt::format("Clifford relations violated by {:.3e}", defect));
}

double CliffordSystem::anticommutator_defect() const {
  const auto dim = dim_ambient();
  const Matrix id = Matrix::Identity(dim, dim);
  double worst = 0.0;
  for (int i = 0; i <= m_; ++i)
    for (int j = i; j <= m_; ++j) {
      const Matrix& a = (*this)[i];
      const Matrix& b = (*this)[j];
      const Matrix target = (i == j) ? Matrix(2.0 * id) : Matrix::Zero(dim, dim);
      worst = std::max(worst, max_abs(a * b + b * a - target));
    }
  return worst;
}

std::string CliffordSystem::family_id() const {
  std::string id = fmt::format("m{}_k{}", m_, k_);
  if (m_ % 4 == 0) {
    id += '_';
    for (int s : block_signs_) id += s > 0 ? '+' : '-';
  }
  return id;
}

CliffordSystem assemble_system(const GeneratorSet& g) {
  if (static_cast<int>(g.generators.size()) != g.m - 1)
    throw ValidationError("generator count does not match m - 1");
  if (const double defect = generator_defect(g); defect >= kAlgebraTol)
    throw ValidationError(fmt::format("generator relations violated by {:.3e}", defect));

  const int l = g.l;
  const Matrix id = Matrix::Identity(l, l);
  std::vector<Matrix> ps;
  ps.reserve(static_cast<std::size_t>(g.m + 1));

  Matrix p0 = Matrix::Zero(2 * l, 2 * l);
  p0.topLeftCorner(l, l) = id;
  p0.bottomRightCorner(l, l) = -id;
  ps.push_back(std::move(p0));

  Matrix p1 = Matrix::Zero(2 * l, 2 * l);
  p1.topRightCorner(l, l) = id;
  p1.bottomLeftCorner(l, l) = id;
  ps.push_back(std::move(p1));

  for (const auto& e : g.generators) {
    Matrix p = Matrix::Zero(2 * l, 2 * l);
    p.topRightCorner(l, l) = e;
    p.bottomLeftCorner(l, l) = -e;
    ps.push_back(std::move(p));
  }
  return CliffordSystem(g.m, g.k, g.block_signs, std::move(ps));
}

CliffordSystem make_system(int m, int k, std::span<const int> block_signs) {
  return assemble_system(build_generators(m, k, block_signs));
}

Matrix full_product(const CliffordSystem& s) {
  Matrix prod = s[0];
  for (int i = 1; i <= s.m(); ++i) prod = prod * s[i];
  return prod;
}

VariantTag variant_classify(const CliffordSystem& s) {
  VariantTag tag;
  if (s.m() % 4 != 0) return tag;
  tag.product_trace = full_product(s).trace();
  const double full = s.dim_ambient();
  tag.kind = std::abs(std::abs(tag.product_trace) - full) < 1e-9 ? VariantKind::Definite
                                                                  : VariantKind::Indefinite;
  return tag;
}

CliffordSystem conjugate(const CliffordSystem& s, const Matrix& rotation) {
  std::vector<Matrix> ps;
  ps.reserve(s.matrices().size());
  for (const auto& p : s.matrices()) {
    Matrix q = rotation * p * rotation.transpose();
    // Re-symmetrize away the rounding asymmetry of the triple product.
    ps.push_back(0.5 * (q + q.transpose()));
  }
  return CliffordSystem(s.m(), s.k(), s.block_signs(), std::move(ps));
}

std::string dump_system_json(const CliffordSystem& s) {
  nlohmann::ordered_json j;
  j["m"] = s.m();
  j["k"] = s.k();
  j["block_signs"] = s.block_signs();
  auto& mats = j["matrices"] = nlohmann::ordered_json::array();
  for (const auto& p : s.matrices())
    mats.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return j.dump(1) + "\n";
}

CliffordSystem parse_system_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("system file is not valid JSON: {}", e.what()));
  }
  try {
    const int m = j.at("m").get<int>();
    const int k = j.at("k").get<int>();
    auto signs = j.at("block_signs").get<std::vector<int>>();
    const auto& mats = j.at("matrices");
    if (!mats.is_array() || mats.empty()) throw SchemaError("system file: empty matrix list");
    std::vector<Matrix> ps;
    for (const auto& entry : mats) {
      const auto flat = entry.get<std::vector<double>>();
      const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(double(flat.size()))));
      if (dim * dim != static_cast<Eigen::Index>(flat.size()))
        throw SchemaError("system file: matrix entry count is not a perfect square");
      ps.push_back(Eigen::Map<const Matrix>(flat.data(), dim, dim));
    }
    return CliffordSystem(m, k, std::move(signs), std::move(ps));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("system file schema mismatch: {}", e.what()));
  }
}

}  // namespace cliffym
