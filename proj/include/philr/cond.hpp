#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "philr/dense.hpp"
#include "philr/exec.hpp"
#include "philr/linalg.hpp"
#include "philr/lowrank.hpp"
#include "philr/scr.hpp"

namespace philr {

enum class CondStrategy { exact, strategy_one, strategy_two };

std::string_view to_string(CondStrategy s) noexcept;

/// Absolute and relative 2-norm condition estimates of phi_ell.
/// relative == absolute * norm_a / phi_norm (0 when both numerator and phi_norm vanish).
struct CondEstimate {
  int ell = 0;
  double absolute = 0.0;
  double relative = 0.0;
  CondStrategy strategy = CondStrategy::exact;
  double norm_a = 0.0;
  double phi_norm = 0.0;
  bool converged = true;
  std::map<std::string, double> diagnostics;
};

/// vec(L(A, E)) = entries * vec(E); n^2 x n^2.
struct KroneckerForm {
  Index n = 0;
  DenseMatrix entries;

  Index dimension() const noexcept { return n * n; }
};

// ---- Frechet derivative of phi_ell ------------------------------------------

/// Top-right block of phi_ell([[A, E], [0, A]]).
DenseMatrix frechet_augmented(const DenseMatrix& a, const DenseMatrix& e, int ell);
Eigen::MatrixXd frechet_phi(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e, int ell);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule mapped to [0, 1].
QuadratureRule gauss_legendre_unit(int points);

/// int_0^1 exp((1-s)A) s^ell E phi_ell(sA) ds with a fixed Gauss-Legendre rule.
DenseMatrix frechet_quadrature(const DenseMatrix& a, const DenseMatrix& e, int ell, int nodes);

struct AdaptiveQuadrature {
  DenseMatrix value;
  int nodes = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Doubles the node count from `start` until successive results agree to `tol`
/// (relative, Frobenius) or `max_nodes` is reached.
AdaptiveQuadrature frechet_quadrature_adaptive(const DenseMatrix& a, const DenseMatrix& e, int ell,
                                               int start = 32, int max_nodes = 128,
                                               double tol = 1e-12);

/// || [phi_ell(A+E) - phi_ell(A)] - int_0^1 exp((1-s)A) s^ell E phi_ell(s(A+E)) ds ||_F.
/// The identity is exact, so this is round-off plus quadrature error.
double perturbation_identity_check(const DenseMatrix& a, const DenseMatrix& e, int ell,
                                   int nodes = 48);

// ---- Kronecker forms ---------------------------------------------------------

inline constexpr Index kKroneckerColumnLimit = 12;
inline constexpr Index kKroneckerQuadratureLimit = 64;

/// Column (j n + i) is vec(L(A, e_i e_j^T)); n <= 12.
KroneckerForm kronecker_form(const DenseMatrix& a, int ell, Exec exec = Exec::parallel);

/// K_ell for ell = 0..p from the integral form
///   K = int_0^1 s^ell (phi_ell(sA)^T kron exp((1-s)A)) ds,
/// with node doubling (32 -> 128) until consecutive K agree to 1e-12. n <= 64.
std::vector<KroneckerForm> kronecker_family_quadrature(const DenseMatrix& a, int p,
                                                       Exec exec = Exec::parallel,
                                                       int* nodes_used = nullptr);

/// alpha_i = 1/(i+ell)! for i = 0..trunc.
std::vector<double> phi_series_coefficients(int ell, int trunc);

/// K_f(X T Y^T) for f = sum alpha_i z^i assembled from r x r pieces as
/// Psi_1 + Psi_2 + Psi_3 with W = Y T^T and Z = T Y^T X. n <= 12.
KroneckerForm kronecker_form_lowrank_series(const ScrFactors& f, std::span<const double> coeffs,
                                            int trunc);
KroneckerForm kronecker_form_lowrank_series(const SparseMatrix& x, const DenseMatrix& t,
                                            const SparseMatrix& y, std::span<const double> coeffs,
                                            int trunc);

// ---- condition numbers ------------------------------------------------------

/// ||K||_2 from the column-built Kronecker form; n <= 12.
CondEstimate cond_exact_small(const DenseMatrix& a, int ell);

/// Same reference quantity for ell = 0..p via the quadrature-built Kronecker
/// form, for 12 < n <= 64 where column building is too slow.
std::vector<CondEstimate> cond_exact_family(const DenseMatrix& a, int p);

/// ||R1 phi_1(Z) T R2^T  R1 phi_{ell+1}(Z) T R2^T||_2, relative via eta_ell.
CondEstimate strategy_one(const LowRankPhiFamily& fam, int ell, double norm_a);

struct PowerMethodOptions {
  double tol = 1e-3;
  int max_iter = 50;
  std::uint64_t seed = 0x57a7e2ULL;
  bool strict = false;
};

/// Frobenius-operator norm of F -> R1 L_{phi_order}(Z, F) T R2^T by power
/// iteration on the map and its adjoint F -> L_{phi_order}(Z^T, R1^T F R2 T^T).
NormReport reduced_frechet_norm(const Eigen::MatrixXd& z, const Eigen::MatrixXd& t,
                                const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2, int order,
                                const PowerMethodOptions& options = {});

/// ||R1 L_{phi_{ell+1}}(Z) T R2^T||, relative via eta_ell.
CondEstimate strategy_two(const LowRankPhiFamily& fam, int ell, double norm_a,
                          const PowerMethodOptions& options = {});

struct SandwichResult {
  bool lower_ok = false;
  bool upper_ok = false;
  double kron_norm = 0.0;        ///< ||K||_2
  double l2_search = 0.0;        ///< lower bound on ||L||_2 = max ||L(E)||_2 / ||E||_2
  double sqrt_n = 0.0;
};

/// ||L||_2 / sqrt(n) <= ||K||_2 <= sqrt(n) ||L||_2 with ||L||_2 replaced by a
/// search lower bound; the upper side allows 5% for the search gap. The search
/// starts from the top right singular vector of K, so it holds without it. n <= 8.
SandwichResult norm_sandwich_check(const DenseMatrix& a, int ell, int samples,
                                   std::uint64_t seed = 0x5a4dULL);

}  // namespace philr
