#include "philr/cond.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <gsl/gsl_integration.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "philr/error.hpp"
#include "philr/kernels.hpp"
#include "philr/phikernel.hpp"

namespace philr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(CondStrategy s) noexcept {
  switch (s) {
    case CondStrategy::exact: return "exact";
    case CondStrategy::strategy_one: return "strategy-one";
    case CondStrategy::strategy_two: return "strategy-two";
  }
  return "unknown";
}

namespace {

void require_square_pair(const MatrixXd& a, const MatrixXd& e, const char* who) {
  require(a.rows() == a.cols() && e.rows() == a.rows() && e.cols() == a.cols(),
          ErrorKind::dimension_mismatch, std::string(who) + ": A and E must be square, same size");
  require(a.allFinite() && e.allFinite(), ErrorKind::non_finite_input,
          std::string(who) + ": non-finite input");
}

MatrixXd unvec(const VectorXd& v, Index n) { return Eigen::Map<const MatrixXd>(v.data(), n, n); }

// Orthogonal polar factor U V^T of m.
MatrixXd polar_factor(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double relative_of(double absolute, double norm_a, double phi_norm, std::map<std::string, double>& diag) {
  if (phi_norm > 0.0) return absolute * norm_a / phi_norm;
  diag["degenerate"] = 1.0;
  return 0.0;
}

}  // namespace

MatrixXd frechet_phi(const MatrixXd& a, const MatrixXd& e, int ell) {
  require_square_pair(a, e, "frechet_augmented");
  require(ell >= 0, ErrorKind::dimension_mismatch, "frechet_augmented: ell must be >= 0");
  const Index n = a.rows();
  MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = e;
  block.bottomRightCorner(n, n) = a;
  const auto fam = phi_family(block, ell);
  return fam.back().topRightCorner(n, n);
}

DenseMatrix frechet_augmented(const DenseMatrix& a, const DenseMatrix& e, int ell) {
  return DenseMatrix(frechet_phi(a.eigen(), e.eigen(), ell));
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {n == 0 ? 1.0 : p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre_unit(int points) {
  require(points >= 1, ErrorKind::dimension_mismatch, "gauss_legendre_unit: need >= 1 point");
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(points));
  require(table != nullptr, ErrorKind::convergence_failure, "Gauss-Legendre table allocation");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double x = 0.0;
    double w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x, &w, table);
    // GSL's on-the-fly rules (orders it does not tabulate) are good to about
    // 1e-12; two Newton steps bring nodes and weights to full precision.
    if (points > 1) {
      for (int it = 0; it < 2; ++it) x -= legendre(points, x).first / legendre(points, x).second;
      const double dp = legendre(points, x).second;
      w = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
  }
  gsl_integration_glfixed_table_free(table);
  return rule;
}

DenseMatrix frechet_quadrature(const DenseMatrix& a, const DenseMatrix& e, int ell, int nodes) {
  require_square_pair(a.eigen(), e.eigen(), "frechet_quadrature");
  require(ell >= 0 && nodes >= 1, ErrorKind::dimension_mismatch,
          "frechet_quadrature: ell >= 0 and nodes >= 1 required");
  const auto rule = gauss_legendre_unit(nodes);
  const MatrixXd& am = a.eigen();
  MatrixXd sum = MatrixXd::Zero(a.rows(), a.cols());
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    const double s = rule.nodes[g];
    const MatrixXd left = expm((1.0 - s) * am);
    const MatrixXd right = phi_family(s * am, ell).back();
    sum += (rule.weights[g] * std::pow(s, ell)) * (left * e.eigen() * right);
  }
  return DenseMatrix(std::move(sum));
}

AdaptiveQuadrature frechet_quadrature_adaptive(const DenseMatrix& a, const DenseMatrix& e, int ell,
                                               int start, int max_nodes, double tol) {
  AdaptiveQuadrature out;
  int nodes = start;
  MatrixXd prev = frechet_quadrature(a, e, ell, nodes).eigen();
  while (true) {
    const int next_nodes = 2 * nodes;
    if (next_nodes > max_nodes) break;
    MatrixXd next = frechet_quadrature(a, e, ell, next_nodes).eigen();
    out.last_change = (next - prev).norm() / std::max(next.norm(), 1e-300);
    prev = std::move(next);
    nodes = next_nodes;
    if (out.last_change < tol) {
      out.converged = true;
      break;
    }
  }
  out.value = DenseMatrix(std::move(prev));
  out.nodes = nodes;
  return out;
}

double perturbation_identity_check(const DenseMatrix& a, const DenseMatrix& e, int ell, int nodes) {
  require_square_pair(a.eigen(), e.eigen(), "perturbation_identity_check");
  const MatrixXd& am = a.eigen();
  const MatrixXd& em = e.eigen();
  const MatrixXd ae = am + em;
  const MatrixXd lhs = phi_family(ae, ell).back() - phi_family(am, ell).back();
  const auto rule = gauss_legendre_unit(nodes);
  MatrixXd rhs = MatrixXd::Zero(am.rows(), am.cols());
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    const double s = rule.nodes[g];
    rhs += (rule.weights[g] * std::pow(s, ell)) *
           (expm((1.0 - s) * am) * em * phi_family(s * ae, ell).back());
  }
  return (lhs - rhs).norm();
}

KroneckerForm kronecker_form(const DenseMatrix& a, int ell, Exec exec) {
  require(a.is_square(), ErrorKind::dimension_mismatch, "kronecker_form: A must be square");
  const Index n = a.rows();
  require(n <= kKroneckerColumnLimit, ErrorKind::dimension_mismatch,
          "kronecker_form: n = " + std::to_string(n) + " exceeds " +
              std::to_string(kKroneckerColumnLimit));
  const Index n2 = n * n;
  MatrixXd k(n2, n2);
  const MatrixXd& am = a.eigen();
  auto column = [&](Index c) {
    MatrixXd e = MatrixXd::Zero(n, n);
    e(c % n, c / n) = 1.0;
    const MatrixXd l = frechet_phi(am, e, ell);
    k.col(c) = Eigen::Map<const VectorXd>(l.data(), n2);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (Index c = 0; c < n2; ++c) column(c);
  } else {
    for (Index c = 0; c < n2; ++c) column(c);
  }
  return {n, DenseMatrix(std::move(k))};
}

std::vector<KroneckerForm> kronecker_family_quadrature(const DenseMatrix& a, int p, Exec exec,
                                                       int* nodes_used) {
  require(a.is_square(), ErrorKind::dimension_mismatch,
          "kronecker_family_quadrature: A must be square");
  require(p >= 0, ErrorKind::dimension_mismatch, "kronecker_family_quadrature: p must be >= 0");
  const Index n = a.rows();
  require(n <= kKroneckerQuadratureLimit, ErrorKind::dimension_mismatch,
          "kronecker_family_quadrature: n = " + std::to_string(n) + " exceeds " +
              std::to_string(kKroneckerQuadratureLimit));
  const MatrixXd& am = a.eigen();

  auto assemble = [&](int points) {
    const auto rule = gauss_legendre_unit(points);
    std::vector<MatrixXd> left;
    std::vector<std::vector<MatrixXd>> right(static_cast<std::size_t>(p) + 1);
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(p) + 1);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = rule.nodes[g];
      left.push_back(expm((1.0 - s) * am));
      auto phis = phi_family(s * am, p);
      for (int ell = 0; ell <= p; ++ell) {
        right[static_cast<std::size_t>(ell)].push_back(std::move(phis[static_cast<std::size_t>(ell)]));
        weights[static_cast<std::size_t>(ell)].push_back(rule.weights[g] * std::pow(s, ell));
      }
    }
    std::vector<MatrixXd> ks;
    for (int ell = 0; ell <= p; ++ell) {
      ks.push_back(kernels::kron_accumulate(right[static_cast<std::size_t>(ell)], left,
                                            weights[static_cast<std::size_t>(ell)], exec));
    }
    return ks;
  };

  int points = 32;
  auto prev = assemble(points);
  while (2 * points <= 128) {
    auto next = assemble(2 * points);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      change = std::max(change, (next[i] - prev[i]).cwiseAbs().maxCoeff() /
                                    std::max(next[i].cwiseAbs().maxCoeff(), 1e-300));
    }
    prev = std::move(next);
    points *= 2;
    if (change < 1e-12) break;
  }
  if (nodes_used != nullptr) *nodes_used = points;
  std::vector<KroneckerForm> out;
  for (auto& k : prev) out.push_back({n, DenseMatrix(std::move(k))});
  return out;
}

std::vector<double> phi_series_coefficients(int ell, int trunc) {
  std::vector<double> alpha;
  for (int i = 0; i <= trunc; ++i) alpha.push_back(inverse_factorial(i + ell));
  return alpha;
}

KroneckerForm kronecker_form_lowrank_series(const SparseMatrix& x, const DenseMatrix& t,
                                            const SparseMatrix& y, std::span<const double> coeffs,
                                            int trunc) {
  const Index n = x.rows();
  const Index r = x.cols();
  require(y.rows() == n && y.cols() == r && t.rows() == r && t.cols() == r,
          ErrorKind::dimension_mismatch, "kronecker_form_lowrank_series: factor shapes disagree");
  require(n <= kKroneckerColumnLimit, ErrorKind::dimension_mismatch,
          "kronecker_form_lowrank_series: n exceeds " + std::to_string(kKroneckerColumnLimit));
  const int top = std::min<int>(trunc, static_cast<int>(coeffs.size()) - 1);
  auto alpha = [&](int i) { return i <= top ? coeffs[static_cast<std::size_t>(i)] : 0.0; };

  const MatrixXd xd = x.to_dense();
  const MatrixXd yd = y.to_dense();
  const MatrixXd w = yd * t.eigen().transpose();
  const MatrixXd z = t.eigen() * yd.transpose() * xd;
  const MatrixXd zt = z.transpose();
  const MatrixXd id_n = MatrixXd::Identity(n, n);

  std::vector<MatrixXd> zpow{MatrixXd::Identity(r, r)};
  std::vector<MatrixXd> ztpow{MatrixXd::Identity(r, r)};
  for (int i = 1; i <= std::max(top, 0); ++i) {
    zpow.push_back(zpow.back() * z);
    ztpow.push_back(ztpow.back() * zt);
  }

  MatrixXd k = alpha(1) * MatrixXd::Identity(n * n, n * n);  // Psi_1

  MatrixXd m2a = MatrixXd::Zero(r, r);
  MatrixXd m2b = MatrixXd::Zero(r, r);
  for (int i = 2; i <= top; ++i) {
    m2a += alpha(i) * ztpow[static_cast<std::size_t>(i - 2)];
    m2b += alpha(i) * zpow[static_cast<std::size_t>(i - 2)];
  }
  // Psi_2 = (W M2a X^T) kron I + I kron (X M2b W^T)
  k += Eigen::kroneckerProduct(MatrixXd(w * m2a * xd.transpose()), id_n).eval();
  k += Eigen::kroneckerProduct(id_n, MatrixXd(xd * m2b * w.transpose())).eval();

  if (top >= 3 && r > 0) {
    MatrixXd s3 = MatrixXd::Zero(r * r, r * r);
    for (int i = 3; i <= top; ++i) {
      for (int j = 2; j <= i - 1; ++j) {
        s3 += alpha(i) * Eigen::kroneckerProduct(ztpow[static_cast<std::size_t>(i - j - 1)],
                                                 zpow[static_cast<std::size_t>(j - 2)])
                             .eval();
      }
    }
    const MatrixXd wx = Eigen::kroneckerProduct(w, xd);
    const MatrixXd xw = Eigen::kroneckerProduct(xd, w);
    k += wx * s3 * xw.transpose();  // Psi_3
  }
  return {n, DenseMatrix(std::move(k))};
}

KroneckerForm kronecker_form_lowrank_series(const ScrFactors& f, std::span<const double> coeffs,
                                            int trunc) {
  return kronecker_form_lowrank_series(f.x, f.t, f.y, coeffs, trunc);
}

CondEstimate cond_exact_small(const DenseMatrix& a, int ell) {
  require(a.is_square(), ErrorKind::dimension_mismatch, "cond_exact_small: A must be square");
  require(a.rows() <= kKroneckerColumnLimit, ErrorKind::dimension_mismatch,
          "cond_exact_small: exact mode requires n <= " + std::to_string(kKroneckerColumnLimit) +
              ", got n = " + std::to_string(a.rows()));
  const KroneckerForm k = kronecker_form(a, ell);
  CondEstimate est;
  est.ell = ell;
  est.strategy = CondStrategy::exact;
  est.absolute = norm2_exact_small(k.entries);
  est.norm_a = norm2_exact_small(a);
  est.phi_norm = norm2_exact_small(phi_family(a.eigen(), ell).back());
  est.relative = relative_of(est.absolute, est.norm_a, est.phi_norm, est.diagnostics);
  return est;
}

std::vector<CondEstimate> cond_exact_family(const DenseMatrix& a, int p) {
  int nodes = 0;
  const auto ks = kronecker_family_quadrature(a, p, Exec::parallel, &nodes);
  const auto phis = phi_family(a.eigen(), p);
  const double norm_a = norm2_exact_small(a);
  std::vector<CondEstimate> out;
  for (int ell = 0; ell <= p; ++ell) {
    CondEstimate est;
    est.ell = ell;
    est.strategy = CondStrategy::exact;
    const MatrixXd& k = ks[static_cast<std::size_t>(ell)].entries.eigen();
    if (k.rows() <= 400) {
      est.absolute = norm2_exact_small(k);
    } else {
      const NormReport rep = norm2_lanczos(k);
      est.absolute = rep.value;
      est.converged = rep.converged;
      est.diagnostics["lanczos_steps"] = rep.iterations;
    }
    est.diagnostics["quadrature_nodes"] = nodes;
    est.norm_a = norm_a;
    est.phi_norm = norm2_exact_small(phis[static_cast<std::size_t>(ell)]);
    est.relative = relative_of(est.absolute, est.norm_a, est.phi_norm, est.diagnostics);
    out.push_back(std::move(est));
  }
  return out;
}

CondEstimate strategy_one(const LowRankPhiFamily& fam, int ell, double norm_a) {
  require(ell >= 0 && ell <= fam.order(), ErrorKind::dimension_mismatch,
          "strategy_one: ell outside 0..p");
  CondEstimate est;
  est.ell = ell;
  est.strategy = CondStrategy::strategy_one;
  est.norm_a = norm_a;
  const EtaBounds eta = norm_estimate_eta(fam, ell);
  est.phi_norm = eta.eta;
  if (fam.rank() > 0) {
    const MatrixXd r2t = fam.r2().eigen().transpose();
    const MatrixXd first = fam.r1().eigen() * fam.coefficient(0).eigen() * r2t;
    const MatrixXd second = fam.r1().eigen() * fam.coefficient(ell).eigen() * r2t;
    est.absolute = norm2_exact_small(MatrixXd(first * second));
  }
  require(est.phi_norm > 0.0 || est.absolute == 0.0, ErrorKind::singular_factor,
          "strategy_one: eta_ell vanishes while the estimate does not");
  est.relative = relative_of(est.absolute, norm_a, est.phi_norm, est.diagnostics);
  return est;
}

NormReport reduced_frechet_norm(const MatrixXd& z, const MatrixXd& t, const MatrixXd& r1,
                                const MatrixXd& r2, int order, const PowerMethodOptions& options) {
  const Index r = z.rows();
  NormReport rep;
  rep.kind = NormKind::frobenius;
  rep.method = NormMethod::power_iteration;
  rep.converged = true;
  if (r == 0) return rep;
  const MatrixXd zt = z.transpose();
  const MatrixXd r2t = r2.transpose();
  const MatrixXd tt = t.transpose();
  auto forward = [&](const MatrixXd& f) -> MatrixXd {
    return r1 * frechet_phi(z, f, order) * t * r2t;
  };
  auto adjoint = [&](const MatrixXd& h) -> MatrixXd {
    return frechet_phi(zt, MatrixXd(r1.transpose() * h * r2 * tt), order);
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  MatrixXd f(r, r);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = normal(rng);
  f /= f.norm();

  rep.converged = false;
  double gamma = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const MatrixXd h = forward(f);
    const double next = h.norm();
    rep.iterations = it;
    const bool settled = it > 1 && std::abs(next - gamma) <= options.tol * next;
    gamma = next;
    if (next == 0.0 || settled) {
      rep.converged = true;
      break;
    }
    MatrixXd g = adjoint(h);
    const double gn = g.norm();
    if (gn == 0.0) {
      rep.converged = true;
      break;
    }
    f = g / gn;
  }
  rep.value = gamma;
  if (!rep.converged && options.strict) {
    fail(ErrorKind::convergence_failure,
         "strategy_two: power iteration did not settle in " + std::to_string(options.max_iter) +
             " steps");
  }
  return rep;
}

CondEstimate strategy_two(const LowRankPhiFamily& fam, int ell, double norm_a,
                          const PowerMethodOptions& options) {
  require(ell >= 0 && ell <= fam.order(), ErrorKind::dimension_mismatch,
          "strategy_two: ell outside 0..p");
  CondEstimate est;
  est.ell = ell;
  est.strategy = CondStrategy::strategy_two;
  est.norm_a = norm_a;
  est.phi_norm = norm_estimate_eta(fam, ell).eta;
  if (fam.rank() > 0) {
    const NormReport rep = reduced_frechet_norm(fam.z().eigen(), fam.t().eigen(), fam.r1().eigen(),
                                                fam.r2().eigen(), ell + 1, options);
    est.absolute = rep.value;
    est.converged = rep.converged;
    est.diagnostics["iterations"] = rep.iterations;
  }
  est.diagnostics["tolerance"] = options.tol;
  require(est.phi_norm > 0.0 || est.absolute == 0.0, ErrorKind::singular_factor,
          "strategy_two: eta_ell vanishes while the estimate does not");
  est.relative = relative_of(est.absolute, norm_a, est.phi_norm, est.diagnostics);
  return est;
}

SandwichResult norm_sandwich_check(const DenseMatrix& a, int ell, int samples, std::uint64_t seed) {
  require(a.is_square() && a.rows() <= 8, ErrorKind::dimension_mismatch,
          "norm_sandwich_check: requires square A with n <= 8");
  const Index n = a.rows();
  const MatrixXd& am = a.eigen();
  const MatrixXd at = am.transpose();
  const KroneckerForm k = kronecker_form(a, ell);

  Eigen::JacobiSVD<MatrixXd> ksvd(k.entries.eigen(), Eigen::ComputeFullV);
  SandwichResult res;
  res.kron_norm = ksvd.singularValues()(0);
  res.sqrt_n = std::sqrt(static_cast<double>(n));

  auto ratio = [&](const MatrixXd& e) {
    const double en = norm2_exact_small(e);
    return en > 0.0 ? norm2_exact_small(frechet_phi(am, e, ell)) / en : 0.0;
  };
  // One ascent step for max ||L(E)||_2 over ||E||_2 <= 1: the dual of the
  // spectral norm is the nuclear norm, so the step is the polar factor of
  // the adjoint applied to the top singular pair of L(E).
  auto ascend = [&](MatrixXd e) {
    double best = ratio(e);
    for (int it = 0; it < 20; ++it) {
      const MatrixXd g = frechet_phi(am, e, ell);
      Eigen::JacobiSVD<MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const MatrixXd uv = svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
      const MatrixXd candidate = polar_factor(frechet_phi(at, uv, ell));
      const double value = ratio(candidate);
      if (value <= best * (1.0 + 1e-12)) break;
      best = value;
      e = candidate;
    }
    return best;
  };

  // vec^{-1} of the top right singular vector of K guarantees
  // ||L(E)||_2 / ||E||_2 >= ||K||_2 / sqrt(n).
  const MatrixXd top = unvec(ksvd.matrixV().col(0), n);
  double best = ascend(top);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < samples; ++s) {
    MatrixXd e(n, n);
    for (Index i = 0; i < e.size(); ++i) e.data()[i] = normal(rng);
    const MatrixXd q = polar_factor(e);
    const double v = std::max(ratio(e), ratio(q));
    if (v > best) best = v;
  }
  // Refine from a few random orthogonal starts as well.
  for (int s = 0; s < std::min(samples, 5); ++s) {
    MatrixXd e(n, n);
    for (Index i = 0; i < e.size(); ++i) e.data()[i] = normal(rng);
    best = std::max(best, ascend(polar_factor(e)));
  }
  res.l2_search = best;
  // Round-off guard only: both sides are the same quantity when n = 1.
  res.lower_ok = res.l2_search / res.sqrt_n <= res.kron_norm * (1.0 + 1e-12);
  res.upper_ok = res.kron_norm <= res.sqrt_n * res.l2_search * 1.05;
  return res;
}

}  // namespace philr
