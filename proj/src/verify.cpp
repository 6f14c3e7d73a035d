#include "philr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "philr/cond.hpp"
#include "philr/error.hpp"
#include "philr/linalg.hpp"
#include "philr/lowrank.hpp"
#include "philr/phikernel.hpp"
#include "philr/scr.hpp"
#include "philr/synthetic.hpp"

namespace philr::verify {

namespace {

using Eigen::MatrixXd;

class Recorder {
 public:
  explicit Recorder(std::string suite) { result_.suite = std::move(suite); }

  void le(std::string name, double measured, double bound) {
    const bool ok = std::isfinite(measured) && measured <= bound;
    result_.checks.push_back({std::move(name), measured, bound, bound - measured, ok});
  }
  void within(std::string name, double measured, double lo, double hi) {
    const bool ok = std::isfinite(measured) && measured >= lo && measured <= hi;
    const double slack = std::min(measured - lo, hi - measured);
    result_.checks.push_back({std::move(name), measured, hi, slack, ok});
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

double rel(const MatrixXd& a, const MatrixXd& b) {
  const double d = b.norm();
  return (a - b).norm() / (d > 0.0 ? d : 1.0);
}

MatrixXd random_scaled(Index n, double norm, std::uint64_t seed) {
  MatrixXd m = synthetic::gaussian(n, n, seed);
  return m * (norm / norm2_exact_small(m));
}

std::string tag(const std::string& base, int instance, int ell) {
  return base + "[" + std::to_string(instance) + "].ell" + std::to_string(ell);
}

SuiteResult identity_suite(std::uint64_t seed) {
  Recorder rec("identity");
  const Index ranks[] = {2, 5, 8};
  for (int i = 0; i < 3; ++i) {
    const auto f = synthetic::random_factored(80, ranks[i], 0.1, 2.0, seed + 11 * i);
    const auto fam = build_phi_family(f.x, f.t, f.y, 4);
    const MatrixXd dense = f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
    for (int ell = 0; ell <= 4; ++ell) {
      const MatrixXd oracle = phi_taylor_oracle(DenseMatrix(dense), ell, 80).eigen();
      rec.le(tag("lowrank_vs_taylor", i, ell), rel(materialize(fam, ell).eigen(), oracle), 1e-12);
    }
  }
  for (int i = 0; i < 4; ++i) {
    const MatrixXd m = random_scaled(10, 1.0 + 3.0 * i, seed + 101 * i);
    const auto phis = phi_family(m, 5);
    for (int ell = 0; ell <= 4; ++ell) {
      const auto& a = phis[static_cast<std::size_t>(ell)];
      const MatrixXd resid = a - m * phis[static_cast<std::size_t>(ell) + 1] -
                             inverse_factorial(ell) * MatrixXd::Identity(10, 10);
      rec.le(tag("recurrence", i, ell), resid.norm() / a.norm(), 1e-10);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const DenseMatrix a(random_scaled(4, 1.0, seed + 201 * i));
    const DenseMatrix e(random_scaled(4, 0.3, seed + 203 * i));
    for (int ell = 0; ell <= 2; ++ell) {
      const double scale = 1.0 + phi_family(a.eigen(), ell).back().norm();
      rec.le(tag("perturbation_identity", i, ell), perturbation_identity_check(a, e, ell) / scale,
             1e-10);
    }
  }
  return rec.take();
}

SuiteResult frechet_suite(std::uint64_t seed) {
  Recorder rec("frechet");
  for (int i = 0; i < 3; ++i) {
    const Index n = 3 + i;
    const DenseMatrix a(random_scaled(n, 1.5, seed + 301 * i));
    const DenseMatrix e(synthetic::gaussian(n, n, seed + 303 * i));
    for (int ell = 0; ell <= 4; ++ell) {
      const MatrixXd aug = frechet_augmented(a, e, ell).eigen();
      const MatrixXd quad = frechet_quadrature(a, e, ell, 48).eigen();
      rec.le(tag("augmented_vs_quadrature", i, ell), rel(quad, aug), 1e-9);
    }
    const auto k = kronecker_form(a, 1);
    const MatrixXd l = frechet_augmented(a, e, 1).eigen();
    const Eigen::VectorXd kv = k.entries.eigen() * Eigen::Map<const Eigen::VectorXd>(e.eigen().data(), n * n);
    rec.le(tag("kronecker_matvec", i, 1), rel(Eigen::Map<const MatrixXd>(kv.data(), n, n), l), 1e-11);

    // Finite differences: error shrinks linearly in h.
    const MatrixXd base = phi_family(a.eigen(), 1).back();
    auto fd_error = [&](double h) {
      const MatrixXd shifted = phi_family(MatrixXd(a.eigen() + h * e.eigen()), 1).back();
      return ((shifted - base) / h - l).norm();
    };
    rec.within(tag("finite_difference_ratio", i, 1), fd_error(1e-4) / fd_error(1e-5), 8.0, 12.0);
  }
  for (int i = 0; i < 2; ++i) {
    const auto f = synthetic::random_factored(5, 1 + 2 * i, 0.4, 1.0, seed + 401 * i);
    const auto coeffs = phi_series_coefficients(0, 20);
    const auto series = kronecker_form_lowrank_series(f.x, f.t, f.y, coeffs, 20);
    const MatrixXd dense = f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
    const auto column = kronecker_form(DenseMatrix(dense), 0);
    rec.le(tag("series_vs_column_kronecker", i, 0),
           rel(series.entries.eigen(), column.entries.eigen()), 1e-10);
  }
  return rec.take();
}

SuiteResult sandwich_suite(std::uint64_t seed) {
  Recorder rec("sandwich");
  for (int i = 0; i < 3; ++i) {
    const DenseMatrix a(random_scaled(3 + i, 1.0 + i, seed + 501 * i));
    for (int ell = 0; ell <= 2; ++ell) {
      const auto s = norm_sandwich_check(a, ell, 40, seed + 503 * i + ell);
      rec.le(tag("l2_over_sqrt_n_le_k", i, ell), s.l2_search / s.sqrt_n,
             s.kron_norm * (1.0 + 1e-12));
      rec.le(tag("k_le_sqrt_n_l2", i, ell), s.kron_norm, s.sqrt_n * s.l2_search * 1.05);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const auto f = synthetic::random_factored(60, 4 + 3 * i, 0.1, 3.0, seed + 601 * i);
    const auto fam = build_phi_family(f.x, f.t, f.y, 4);
    for (int ell = 0; ell <= 4; ++ell) {
      const auto eta = norm_estimate_eta(fam, ell);
      const double exact = norm2_exact_small(materialize(fam, ell));
      const double guard = 1e-12 * eta.upper;
      rec.le(tag("eta_lower", i, ell), eta.lower, exact + guard);
      rec.le(tag("eta_upper", i, ell), exact, eta.upper + guard);
    }
  }
  return rec.take();
}

SuiteResult bounds_suite(std::uint64_t seed) {
  Recorder rec("bounds");
  const synthetic::SpectrumSpec specs[] = {{synthetic::Decay::geometric, 2.0, 1.0, 0},
                                           {synthetic::Decay::algebraic, 2.0, 1.0, 0}};
  for (int i = 0; i < 2; ++i) {
    const SparseMatrix a = synthetic::sparse_decaying(120, specs[i], 120, seed + 701 * i);
    ScrOptions opts;
    opts.tol_col = opts.tol_row = 1e-6;
    opts.max_rank = 60;
    const auto f = scr_approximate(a, opts);
    const double resid = scr_residual(a, f);
    rec.le("scr_bound[" + std::to_string(i) + "]", resid,
           std::hypot(f.eps_col, f.eps_row) + 1e-10 * a.frobenius_norm());
  }

  // First-order error transfer and strategy agreement on a small instance.
  const MatrixXd dense = synthetic::decaying_matrix(10, {synthetic::Decay::geometric, 4.0, 1.0, 0},
                                                    seed + 801);
  const SparseMatrix a = SparseMatrix::from_dense(dense);
  ScrOptions opts;
  opts.max_rank = 4;
  const auto f = scr_approximate(a, opts);
  const auto fam = build_phi_family(f, 4);
  const MatrixXd approx = f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
  const double eps = (dense - approx).norm();
  const double norm_a = norm2_exact_small(dense);
  const auto exact_approx = cond_exact_family(DenseMatrix(approx), 4);
  for (int ell = 0; ell <= 4; ++ell) {
    const auto exact = cond_exact_small(DenseMatrix(dense), ell);
    const double diff =
        (phi_family(dense, ell).back() - phi_family(approx, ell).back()).norm();
    rec.le(tag("error_transfer", 0, ell), diff, 10.0 * exact.absolute * eps);
    const double ref = exact_approx[static_cast<std::size_t>(ell)].absolute;
    const auto one = strategy_one(fam, ell, norm_a);
    const auto two = strategy_two(fam, ell, norm_a);
    rec.le(tag("strategy_one_order", 0, ell),
           std::abs(std::log10(one.absolute / ref)), 2.0);
    rec.le(tag("strategy_two_order", 0, ell),
           std::abs(std::log10(two.absolute / ref)), 2.0);
  }
  return rec.take();
}

}  // namespace

bool SuiteResult::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identity", "frechet", "sandwich", "bounds"};
  return names;
}

std::vector<SuiteResult> run(std::string_view suite, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  auto one = [&](std::string_view name) {
    if (name == "identity") return identity_suite(seed);
    if (name == "frechet") return frechet_suite(seed);
    if (name == "sandwich") return sandwich_suite(seed);
    if (name == "bounds") return bounds_suite(seed);
    fail(ErrorKind::dimension_mismatch, "unknown verify suite '" + std::string(name) + "'");
  };
  if (suite == "all") {
    for (const auto& name : suite_names()) out.push_back(one(name));
  } else {
    out.push_back(one(suite));
  }
  return out;
}

}  // namespace philr::verify
