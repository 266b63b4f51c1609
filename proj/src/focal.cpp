#include "cliffym/focal.hpp"

#include <cmath>
#include <fmt/format.h>
#include <random>

namespace cliffym {
namespace {

// Separate random streams for point sampling and frame completion.
constexpr std::uint64_t kPointStream = 0x5eed'f0ca'1000'0001ULL;
constexpr std::uint64_t kFrameStream = 0x5eed'f0ca'1000'0002ULL;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

Matrix normal_basis(const CliffordSystem& s, const Vector& x) {
  Matrix out(s.dim_ambient(), s.normal_count());
  for (int a = 0; a <= s.m(); ++a) out.col(a) = s[a] * x;
  return out;
}

// Removes the components along x, the normals, and the first `filled` columns of `basis`,
// twice for stability. Returns the norm of the remainder before normalization.
double orthogonalize(Vector& v, const Vector& x, const Matrix& normal, const Matrix& basis,
                     int filled) {
  for (int pass = 0; pass < 2; ++pass) {
    v -= x.dot(v) * x;
    for (Eigen::Index a = 0; a < normal.cols(); ++a) v -= normal.col(a).dot(v) * normal.col(a);
    for (int i = 0; i < filled; ++i) v -= basis.col(i).dot(v) * basis.col(i);
  }
  return v.norm();
}

AdaptedFrame complete_frame(const CliffordSystem& s, const FocalPoint& p, const Matrix& leading,
                            std::uint64_t seed) {
  const int n = s.n();
  AdaptedFrame f;
  f.point = p;
  f.normal = normal_basis(s, p.x);
  f.tangent = Matrix::Zero(s.dim_ambient(), n);
  int filled = 0;
  for (Eigen::Index c = 0; c < leading.cols(); ++c) {
    if (filled == n) throw DegenerateFrame("too many leading tangent vectors");
    Vector v = leading.col(c);
    const double pivot = orthogonalize(v, p.x, f.normal, f.tangent, filled);
    if (pivot < kPivotTol) throw DegenerateFrame("leading vector is not tangent or is dependent");
    f.tangent.col(filled++) = v / pivot;
  }
  auto rng = make_engine(seed, kFrameStream);
  while (filled < n) {
    Vector v = gaussian_vector(rng, s.dim_ambient());
    const double pivot = orthogonalize(v, p.x, f.normal, f.tangent, filled);
    if (pivot < kPivotTol)
      throw DegenerateFrame(fmt::format("Gram-Schmidt pivot {:.3e} below tolerance", pivot));
    f.tangent.col(filled++) = v / pivot;
  }
  return f;
}

}  // namespace

void FdConfig::validate() const {
  if (!(step >= 1e-8 && step <= 1e-2))
    throw ConfigError(fmt::format("fd step {} outside [1e-8, 1e-2]", step));
  if (!(newton_tol > 0.0)) throw ConfigError("newton tolerance must be positive");
  if (newton_max_iter < 1) throw ConfigError("newton iteration cap must be positive");
}

double focal_residual(const CliffordSystem& s, const Vector& x) {
  double r = std::abs(x.squaredNorm() - 1.0);
  for (int a = 0; a <= s.m(); ++a) r = std::max(r, std::abs(x.dot(s[a] * x)));
  return r;
}

FocalPoint project_to_focal(const CliffordSystem& s, const Vector& x0, const FdConfig& cfg) {
  if (x0.size() != s.dim_ambient())
    throw ValidationError("project_to_focal: dimension mismatch");
  if (x0.norm() <= 0.5) throw ValidationError("project_to_focal: |x0| must exceed 0.5");

  FocalPoint p{x0, focal_residual(s, x0), 0};
  const int rows = s.m() + 2;
  Eigen::MatrixXd jac(rows, s.dim_ambient());
  Eigen::VectorXd value(rows);
  while (p.residual >= cfg.newton_tol) {
    if (p.newton_steps >= cfg.newton_max_iter)
      throw NonConvergence(fmt::format("Newton projection stalled at residual {:.3e} after {} steps",
                                       p.residual, p.newton_steps));
    jac.row(0) = 2.0 * p.x.transpose();
    value[0] = p.x.squaredNorm() - 1.0;
    for (int a = 0; a <= s.m(); ++a) {
      const Vector px = s[a] * p.x;
      jac.row(a + 1) = 2.0 * px.transpose();
      value[a + 1] = px.dot(p.x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv[rows - 1] <= 0.0 || sv[0] / sv[rows - 1] > kMaxJacobianCondition)
      throw SingularJacobian("constraint Jacobian lost rank");
    p.x -= svd.solve(value);
    p.residual = focal_residual(s, p.x);
    ++p.newton_steps;
  }
  return p;
}

FocalPoint sample_focal_point(const CliffordSystem& s, std::uint64_t seed, const FdConfig& cfg) {
  auto rng = make_engine(seed, kPointStream);
  constexpr int kAttempts = 8;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Vector v = gaussian_vector(rng, s.dim_ambient());
    v.normalize();
    try {
      return project_to_focal(s, v, cfg);
    } catch (const SolverError&) {
      if (attempt + 1 == kAttempts) throw;
    }
  }
  throw NonConvergence("unreachable");
}

AdaptedFrame adapted_frame(const CliffordSystem& s, const FocalPoint& p, std::uint64_t seed) {
  return complete_frame(s, p, Matrix(s.dim_ambient(), 0), seed);
}

AdaptedFrame adapted_frame_with(const CliffordSystem& s, const FocalPoint& p,
                                const Matrix& leading, std::uint64_t seed) {
  return complete_frame(s, p, leading, seed);
}

FocalPoint retract(const CliffordSystem& s, const FocalPoint& p, const Vector& v, double t,
                   const FdConfig& cfg) {
  if (t == 0.0) return p;
  const double scale = std::max(1.0, v.norm());
  double leak = std::abs(p.x.dot(v));
  for (int a = 0; a <= s.m(); ++a) leak = std::max(leak, std::abs((s[a] * p.x).dot(v)));
  if (leak > 1e-10 * scale) throw ValidationError("retract: direction is not tangent");
  if (std::abs(t) * v.norm() >= 0.1) throw ValidationError("retract: displacement too large");
  return project_to_focal(s, p.x + t * v, cfg);
}

AdaptedFrame transport_frame(const CliffordSystem& s, const AdaptedFrame& f, const FocalPoint& q) {
  if ((q.x - f.point.x).norm() > kTransportRadius)
    throw ValidationError("transport_frame: target point too far from frame base point");
  AdaptedFrame out;
  out.point = q;
  out.normal = normal_basis(s, q.x);
  out.tangent = Matrix::Zero(f.tangent.rows(), f.tangent.cols());
  for (int i = 0; i < f.n(); ++i) {
    Vector v = f.tangent.col(i);
    const double pivot = orthogonalize(v, q.x, out.normal, out.tangent, i);
    if (pivot < kPivotTol) throw DegenerateFrame("transported frame collapsed");
    out.tangent.col(i) = v / pivot;
  }
  return out;
}

double frame_orthonormality_defect(const AdaptedFrame& f) {
  Matrix all(f.point.x.size(), 1 + f.normal.cols() + f.tangent.cols());
  all.col(0) = f.point.x;
  all.middleCols(1, f.normal.cols()) = f.normal;
  all.rightCols(f.tangent.cols()) = f.tangent;
  const Matrix gram = all.transpose() * all;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Vector fd_covariant_derivative(const CliffordSystem& s, const FrameField& field,
                               const AdaptedFrame& f, int j, const FdConfig& cfg) {
  const double h = cfg.step;
  const Vector dir = f.tangent.col(j);
  const auto plus = transport_frame(s, f, retract(s, f.point, dir, h, cfg));
  const auto minus = transport_frame(s, f, retract(s, f.point, dir, -h, cfg));
  return (field(plus) - field(minus)) / (2.0 * h);
}

Matrix fd_gradient(const CliffordSystem& s, const FrameField& field, const AdaptedFrame& f,
                   const FdConfig& cfg) {
  Matrix out;
  for (int j = 0; j < f.n(); ++j) {
    const Vector d = fd_covariant_derivative(s, field, f, j, cfg);
    if (j == 0) out.resize(f.n(), d.size());
    out.row(j) = d.transpose();
  }
  return out;
}

}  // namespace cliffym
