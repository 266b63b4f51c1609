#include "cliffym/yang_mills.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <thread>

namespace cliffym {
namespace {

Matrix as_row(const Vector& v) { return Matrix(v.transpose()); }

Vector flatten(const std::vector<Matrix>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  Vector out(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = Eigen::Map<const Vector>(b.data(), b.size());
    at += b.size();
  }
  return out;
}

std::vector<Matrix> commutators(const ShapeOperators& shape) {
  const int c = shape.normal_count();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(c * c));
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) out.push_back(shape[a] * shape[b] - shape[b] * shape[a]);
  return out;
}

// W_i = sum_{b != a} sum_k h^b_ik D^{ab}_k
Vector nym_tangent_field(const ShapeOperators& shape, const CliffordPairings& pairings, int a) {
  Vector w = Vector::Zero(pairings.n());
  for (int b = 0; b < pairings.normal_count(); ++b)
    if (b != a) w += shape[b] * commutator_divergence(pairings, a, b);
  return w;
}

double max_abs_vec(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double fd_relative_deviation(const Matrix& fd, const Matrix& closed) {
  if (fd.rows() != closed.rows() || fd.cols() != closed.cols())
    throw ValidationError("fd_relative_deviation: shape mismatch");
  if (fd.size() == 0) return 0.0;
  const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
  return (fd - closed).cwiseAbs().maxCoeff() / scale;
}

Matrix pairing_gradient(const CliffordPairings& pairings, int a, int b) {
  const int n = pairings.n();
  // pair_operator is indexed (j, k) = <P_a P_b e_j, e_k>
  Matrix out = pairings.pair_operator(a, b);
  if (a == b) out -= Matrix::Identity(n, n);
  return out;
}

std::vector<Matrix> pairing_gradient_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                        const FdConfig& cfg) {
  const int c = s.normal_count();
  const int n = f.n();
  const FrameField field = [&](const AdaptedFrame& g) {
    const CliffordPairings p(s, g);
    Vector out(c * c * n);
    for (int a = 0; a < c; ++a)
      for (int b = 0; b < c; ++b) out.segment((a * c + b) * n, n) = p.g2(a, b);
    return out;
  };
  const Matrix grad = fd_gradient(s, field, f, cfg);
  std::vector<Matrix> out;
  for (int ab = 0; ab < c * c; ++ab) out.push_back(grad.middleCols(ab * n, n));
  return out;
}

Vector commutator_divergence(const CliffordPairings& pairings, int a, int b) {
  if (a == b) throw std::invalid_argument("commutator_divergence requires a != b");
  const int c = pairings.normal_count();
  const int n = pairings.n();
  const int m = pairings.m();
  Vector out = -2.0 * (n - 2 * m + 1) * pairings.g2(a, b);
  for (int g = 0; g < c; ++g) {
    if (g == a || g == b) continue;
    for (int d = 0; d < c; ++d) {
      if (d == a || d == b || d == g) continue;
      out += 2.0 * pairings.q4(d, b, a, g) * pairings.g2(g, d);
    }
  }
  return out;
}

std::vector<Vector> commutator_divergence_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                             const FdConfig& cfg) {
  const int c = s.normal_count();
  const int n = f.n();
  const FrameField field = [&](const AdaptedFrame& g) {
    return flatten(commutators(shape_operators(s, g)));
  };
  const Matrix grad = fd_gradient(s, field, f, cfg);
  std::vector<Vector> out;
  for (int ab = 0; ab < c * c; ++ab) {
    Vector d = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i] += grad(j, ab * n * n + i * n + j);
    out.push_back(std::move(d));
  }
  return out;
}

NymResidual classical_nym_residual(const CliffordPairings& pairings) {
  const int c = pairings.normal_count();
  const int n = pairings.n();
  const int m = pairings.m();
  NymResidual out;
  out.distinguished = Matrix::Zero(c, c);
  out.distinguished_predicted = Matrix::Zero(c, c);
  out.max_distinguished = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      if (a == b) {
        out.divergence.push_back(Vector::Zero(n));
        continue;
      }
      Vector d = commutator_divergence(pairings, a, b);
      // P_a P_b x is a unit tangent vector with frame coordinates g2(a, b).
      out.distinguished(a, b) = d.dot(pairings.g2(a, b));
      double predicted = -2.0 * (n - 2 * m + 1);
      for (int g = 0; g < c; ++g) {
        if (g == a || g == b) continue;
        for (int e = 0; e < c; ++e) {
          if (e == a || e == b || e == g) continue;
          const double q = pairings.q4(e, b, a, g);
          predicted -= 2.0 * q * q;
        }
      }
      out.distinguished_predicted(a, b) = predicted;
      out.max_abs = std::max(out.max_abs, d.cwiseAbs().maxCoeff());
      out.max_distinguished = std::max(out.max_distinguished, out.distinguished(a, b));
      out.divergence.push_back(std::move(d));
    }
  if (c < 2) out.max_distinguished = 0.0;
  return out;
}

CodazziResidual ricci_codazzi_residual(const CliffordPairings& pairings) {
  const int c = pairings.normal_count();
  const int n = pairings.n();
  CodazziResidual out;
  out.n = n;
  out.c.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      if (a == b) continue;
      const Matrix K = pairings.pair_operator(a, b);  // nabla_j g_ab(e_i) = K(j, i)
      const Vector g = pairings.g2(a, b);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            out.c[static_cast<std::size_t>((i * n + j) * n + k)] +=
                K(j, i) * g[k] + g[i] * K(j, k) - K(k, i) * g[j] - g[i] * K(k, j);
    }
  out.max_abs = max_abs_vec(out.c);
  return out;
}

CodazziResidual ricci_codazzi_residual_fd(const CliffordSystem& s, const AdaptedFrame& f,
                                          const FdConfig& cfg) {
  const int n = f.n();
  const FrameField field = [&](const AdaptedFrame& g) {
    const Matrix ric = gauss_ricci(shape_operators(s, g));
    return Vector(Eigen::Map<const Vector>(ric.data(), ric.size()));
  };
  const Matrix grad = fd_gradient(s, field, f, cfg);  // (j, i*n + k) = nabla_j Ric_ik
  CodazziResidual out;
  out.n = n;
  out.c.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.c[static_cast<std::size_t>((i * n + j) * n + k)] = grad(j, i * n + k) - grad(k, i * n + j);
  out.max_abs = max_abs_vec(out.c);
  return out;
}

double ObstructionValues::max_abs() const { return max_abs_vec(T); }

ObstructionValues obstruction_T(const CliffordPairings& pairings) {
  const int c = pairings.normal_count();
  ObstructionValues out;
  for (int a = 0; a < c; ++a) out.T.push_back(distinct_quintuple_sum(pairings, a));
  if (pairings.m() == 4) {
    for (int a = 0; a < c; ++a) {
      std::array<int, 4> rest{};
      int len = 0;
      for (int b = 0; b < c; ++b)
        if (b != a) rest[static_cast<std::size_t>(len++)] = b;
      const double collapsed = 24.0 * pairings.q4(rest[0], rest[1], rest[2], rest[3]) *
                               pairings.q5(a, rest[0], rest[1], rest[2], rest[3]);
      if (std::abs(collapsed - out.T[static_cast<std::size_t>(a)]) >= kCollapsedTol)
        throw ValidationError(fmt::format("collapsed obstruction {} disagrees with sum {}", collapsed,
                                          out.T[static_cast<std::size_t>(a)]));
      out.collapsed.push_back(collapsed);
    }
  }
  return out;
}

bool DensityPair::consistent(double rel_tol) const {
  return std::abs(fd_value - algebraic_value) < rel_tol * (1.0 + std::abs(algebraic_value));
}

DensityPair nym_density(const CliffordSystem& s, const AdaptedFrame& f, int a, const FdConfig& cfg) {
  const auto shape = shape_operators(s, f);
  const CliffordPairings pairings(s, f);
  const FrameField field = [&](const AdaptedFrame& g) {
    return nym_tangent_field(shape_operators(s, g), CliffordPairings(s, g), a);
  };
  const Matrix grad = fd_gradient(s, field, f, cfg);  // (j, i) = e_j(W_i)
  const auto quintic = quintic_traces(shape);
  DensityPair out;
  out.derivative_term = grad.trace();
  out.trace_terms = quintic.alternating[static_cast<std::size_t>(a)] -
                    quintic.nested[static_cast<std::size_t>(a)];
  out.fd_value = out.derivative_term + out.trace_terms;
  out.algebraic_value = -7.0 * distinct_quintuple_sum(pairings, a);
  return out;
}

DensityPair tym_density(const CliffordSystem& s, const AdaptedFrame& f, int a, const FdConfig& cfg) {
  const auto shape = shape_operators(s, f);
  const CliffordPairings pairings(s, f);
  const int c = s.normal_count();
  const int n = f.n();
  const FrameField field = [&](const AdaptedFrame& g) {
    auto r = ricci_codazzi_residual(CliffordPairings(s, g));
    return Vector(Eigen::Map<const Vector>(r.c.data(), static_cast<Eigen::Index>(r.c.size())));
  };
  const Matrix grad = fd_gradient(s, field, f, cfg);  // (l, (i*n + j)*n + k)
  double derivative = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double div = 0.0;
      for (int k = 0; k < n; ++k) div += grad(k, (i * n + j) * n + k);
      derivative += shape[a](i, j) * div;
    }

  double traces = 0.0;
  for (int b = 0; b < c; ++b) {
    traces -= 2.0 * (shape[a] * shape[b] * shape[b]).trace();
    for (int g = 0; g < c; ++g)
      traces += (shape[a] * shape[b] * shape[g]).trace() * (shape[b] * shape[g]).trace();
  }
  traces -= quintic_traces(shape).alternating[static_cast<std::size_t>(a)];

  DensityPair out;
  out.derivative_term = derivative;
  out.trace_terms = traces;
  out.fd_value = derivative + traces;
  out.algebraic_value = -8.0 * distinct_quintuple_sum(pairings, a);
  return out;
}

double cubic_trace_terms(const ShapeOperators& shape) {
  const int c = shape.normal_count();
  double worst = 0.0;
  for (int a = 0; a < c; ++a) {
    double squares = 0.0, mixed = 0.0;
    for (int b = 0; b < c; ++b) {
      squares += (shape[a] * shape[b] * shape[b]).trace();
      for (int g = 0; g < c; ++g)
        mixed += (shape[a] * shape[b] * shape[g]).trace() * (shape[b] * shape[g]).trace();
    }
    worst = std::max({worst, std::abs(squares), std::abs(mixed)});
  }
  return worst;
}

// ---------------------------------------------------------------------------------------

void ClassifyConfig::validate() const {
  if (samples < 1 || samples > 1'000'000)
    throw ConfigError(fmt::format("sample count {} outside [1, 1000000]", samples));
  if (!std::isfinite(thresholds.zero) || thresholds.zero < 0.0)
    throw ConfigError("zero threshold must be finite and non-negative");
  if (!(thresholds.fd_relative > 0.0) || !std::isfinite(thresholds.fd_relative))
    throw ConfigError("fd relative tolerance must be positive");
  fd.validate();
}

FamilyInfo family_info(const CliffordSystem& s) {
  FamilyInfo out;
  out.id = s.family_id();
  out.m = s.m();
  out.k = s.k();
  out.l = s.l();
  out.n = s.n();
  out.m1 = s.m1();
  out.m2 = s.m2();
  out.block_signs = s.block_signs();
  out.variant = std::string(to_string(variant_classify(s).kind));
  return out;
}

SampleRecord evaluate_sample(const CliffordSystem& s, std::uint64_t seed, const ClassifyConfig& cfg) {
  SampleRecord rec;
  rec.seed = seed;
  try {
    const auto point = sample_focal_point(s, seed, cfg.fd);
    rec.newton_steps = point.newton_steps;
    rec.residual = point.residual;
    const auto frame = adapted_frame(s, point, seed);
    const auto shape = shape_operators(s, frame);
    const CliffordPairings pairings(s, frame);

    const auto curv = curvature_pack(shape, pairings, s.n(), s.m());
    double curv_defect = std::max(curv.riemann_symmetry_defect(), curv.ricci_route_defect());
    for (int a = 0; a <= s.m(); ++a)
      for (int b = 0; b <= s.m(); ++b)
        curv_defect = std::max(curv_defect, (normal_curvature_wedge(shape, a, b) -
                                             curv.omega_perp(a, b)).cwiseAbs().maxCoeff());
    rec.curvature_defect = curv_defect;
    rec.identity_worst = std::max(trace_identity_suite(shape, pairings, s.n(), s.m()).worst(),
                                  pairing_identity_suite(shape, pairings).worst());

    rec.T = obstruction_T(pairings).T;
    rec.q_form = point.x.dot(full_product(s) * point.x);
    const auto nym = classical_nym_residual(pairings);
    rec.nym_residual = nym.max_abs;
    rec.nym_distinguished = nym.max_distinguished;
    const auto codazzi = ricci_codazzi_residual(pairings);
    rec.codazzi_residual = codazzi.max_abs;
    rec.cubic_traces = cubic_trace_terms(shape);

    if (cfg.fd_crosscheck) {
      double dev = 0.0;
      const auto grad_fd = pairing_gradient_fd(s, frame, cfg.fd);
      const auto div_fd = commutator_divergence_fd(s, frame, cfg.fd);
      const int c = s.normal_count();
      for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) {
          const auto ab = static_cast<std::size_t>(a * c + b);
          dev = std::max(dev, fd_relative_deviation(grad_fd[ab], pairing_gradient(pairings, a, b)));
          if (a != b)
            dev = std::max(dev, fd_relative_deviation(as_row(div_fd[ab]),
                                                      as_row(nym.divergence[ab])));
        }
      const auto codazzi_fd = ricci_codazzi_residual_fd(s, frame, cfg.fd);
      const Eigen::Map<const Vector> cf(codazzi.c.data(), static_cast<Eigen::Index>(codazzi.c.size()));
      const Eigen::Map<const Vector> ff(codazzi_fd.c.data(),
                                        static_cast<Eigen::Index>(codazzi_fd.c.size()));
      dev = std::max(dev, fd_relative_deviation(as_row(ff), as_row(cf)));
      rec.fd_deviation = dev;
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec = SampleRecord{};
    rec.seed = seed;
    rec.error = e.what();
  }
  return rec;
}

Stats aggregate_stats(const std::vector<SampleRecord>& samples) {
  Stats st;
  bool first = true;
  for (const auto& r : samples) {
    if (!r.ok) {
      ++st.error_count;
      continue;
    }
    ++st.ok_count;
    st.max_abs_T = std::max(st.max_abs_T, max_abs_vec(r.T));
    st.max_abs_q_form = std::max(st.max_abs_q_form, std::abs(r.q_form));
    st.max_identity = std::max(st.max_identity, r.identity_worst);
    st.max_curvature_defect = std::max(st.max_curvature_defect, r.curvature_defect);
    st.max_nym_residual = std::max(st.max_nym_residual, r.nym_residual);
    st.max_codazzi_residual = std::max(st.max_codazzi_residual, r.codazzi_residual);
    st.max_cubic_traces = std::max(st.max_cubic_traces, r.cubic_traces);
    if (first) {
      st.min_nym_residual = r.nym_residual;
      st.min_codazzi_residual = r.codazzi_residual;
      st.max_nym_distinguished = r.nym_distinguished;
      first = false;
    } else {
      st.min_nym_residual = std::min(st.min_nym_residual, r.nym_residual);
      st.min_codazzi_residual = std::min(st.min_codazzi_residual, r.codazzi_residual);
      st.max_nym_distinguished = std::max(st.max_nym_distinguished, r.nym_distinguished);
    }
    if (r.fd_deviation)
      st.max_fd_deviation = std::max(st.max_fd_deviation.value_or(0.0), *r.fd_deviation);
  }
  return st;
}

Verdicts derive_verdicts(const Stats& stats, const Thresholds& thresholds, const FamilyInfo& family) {
  Verdicts v;
  v.zero_threshold = thresholds.zero_for(family.n);
  const double z = v.zero_threshold;
  v.is_NYM_evidence = stats.max_abs_T < z;
  v.is_TYM_evidence = stats.max_abs_T < z && stats.max_cubic_traces < z;
  v.classical_NYM = stats.max_nym_residual < z;
  v.classical_TYM = stats.max_codazzi_residual < z;
  v.paper_exception_candidate = 2 * family.m2 - family.m1 + 1 <= 0;
  v.invariants_hold = stats.max_identity < z && stats.max_curvature_defect < z &&
                      stats.max_fd_deviation.value_or(0.0) < thresholds.fd_relative;
  return v;
}

unsigned worker_count(const ClassifyConfig& cfg) {
  unsigned workers = cfg.sequential ? 1u : cfg.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CLIFFORD_YM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) workers = std::min(workers, static_cast<unsigned>(cap));
  }
  return std::max(1u, std::min(workers, static_cast<unsigned>(cfg.samples)));
}

ClassificationReport classify(const CliffordSystem& s, const ClassifyConfig& cfg) {
  cfg.validate();
  ClassificationReport rep;
  rep.family = family_info(s);
  rep.config = cfg;
  rep.samples.resize(static_cast<std::size_t>(cfg.samples));

  const unsigned workers = worker_count(cfg);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < cfg.samples; i = next++)
      rep.samples[static_cast<std::size_t>(i)] =
          evaluate_sample(s, cfg.seed + static_cast<std::uint64_t>(i), cfg);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  rep.stats = aggregate_stats(rep.samples);
  if (rep.stats.error_count * 5 > cfg.samples)
    throw SolverError(fmt::format("{} of {} samples failed; first error: {}", rep.stats.error_count,
                                  cfg.samples,
                                  std::find_if(rep.samples.begin(), rep.samples.end(),
                                               [](const SampleRecord& r) { return !r.ok; })
                                      ->error));
  rep.verdicts = derive_verdicts(rep.stats, cfg.thresholds, rep.family);

  if (rep.stats.max_abs_T >= rep.verdicts.zero_threshold) {
    const SampleRecord* best = nullptr;
    int alpha = 0;
    double best_t = -1.0;
    for (const auto& r : rep.samples) {
      if (!r.ok) continue;
      for (std::size_t a = 0; a < r.T.size(); ++a)
        if (std::abs(r.T[a]) > best_t) {
          best_t = std::abs(r.T[a]);
          best = &r;
          alpha = static_cast<int>(a);
        }
    }
    Witness w;
    w.seed = best->seed;
    w.alpha = alpha;
    w.T = best->T[static_cast<std::size_t>(alpha)];
    const auto point = sample_focal_point(s, w.seed, cfg.fd);
    const auto frame = adapted_frame(s, point, w.seed);
    w.x = point.x;
    w.nym = nym_density(s, frame, alpha, cfg.fd);
    w.tym = tym_density(s, frame, alpha, cfg.fd);
    rep.witness = std::move(w);
  }
  return rep;
}

}  // namespace cliffym
