#include "philr/phikernel.hpp"

#include <array>
#include <cmath>

#include <Eigen/LU>

#include "philr/error.hpp"
#include "philr/linalg.hpp"

namespace philr {

namespace {

using Eigen::MatrixXd;

// Degree-m Pade: returns U (odd part) and V (even part); r_m = (V - U)^{-1}(V + U).
void pade_terms(const MatrixXd& a, int degree, MatrixXd& u, MatrixXd& v) {
  const Index n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  switch (degree) {
    case 3: {
      constexpr std::array<double, 4> b{120.0, 60.0, 12.0, 1.0};
      u = a * (b[3] * a2 + b[1] * id);
      v = b[2] * a2 + b[0] * id;
      return;
    }
    case 5: {
      constexpr std::array<double, 6> b{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
      const MatrixXd a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    case 7: {
      constexpr std::array<double, 8> b{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                        25200.0,    1512.0,    56.0,      1.0};
      const MatrixXd a4 = a2 * a2;
      const MatrixXd a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    case 9: {
      constexpr std::array<double, 10> b{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                         30270240.0,    2162160.0,    110880.0,     3960.0,
                                         90.0,          1.0};
      const MatrixXd a4 = a2 * a2;
      const MatrixXd a6 = a4 * a2;
      const MatrixXd a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    default: {
      constexpr std::array<double, 14> b{64764752532480000.0,
                                         32382376266240000.0,
                                         7771770303897600.0,
                                         1187353796428800.0,
                                         129060195264000.0,
                                         10559470521600.0,
                                         670442572800.0,
                                         33522128640.0,
                                         1323241920.0,
                                         40840800.0,
                                         960960.0,
                                         16380.0,
                                         182.0,
                                         1.0};
      const MatrixXd a4 = a2 * a2;
      const MatrixXd a6 = a4 * a2;
      u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
               b[1] * id);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * id;
      return;
    }
  }
}

// Backward-error thresholds on ||A||_1 for degrees 3, 5, 7, 9, 13.
constexpr std::array<double, 5> kTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                       9.504178996162932e-1, 2.097847961257068e0,
                                       5.371920351148152e0};
constexpr std::array<int, 5> kDegree{3, 5, 7, 9, 13};

}  // namespace

double inverse_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f /= static_cast<double>(i);
  return f;
}

MatrixXd expm(const MatrixXd& m) {
  require(m.rows() == m.cols(), ErrorKind::dimension_mismatch, "expm: matrix must be square");
  require(m.allFinite(), ErrorKind::non_finite_input, "expm: non-finite input");
  const Index n = m.rows();
  if (n == 0) return MatrixXd(0, 0);
  const double norm = norm1(m);
  MatrixXd u;
  MatrixXd v;
  for (std::size_t i = 0; i + 1 < kDegree.size(); ++i) {
    if (norm <= kTheta[i]) {
      pade_terms(m, kDegree[i], u, v);
      return Eigen::PartialPivLU<MatrixXd>(v - u).solve(v + u);
    }
  }
  int squarings = 0;
  if (norm > kTheta.back()) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta.back())));
  const MatrixXd scaled = m * std::ldexp(1.0, -squarings);
  pade_terms(scaled, 13, u, v);
  MatrixXd e = Eigen::PartialPivLU<MatrixXd>(v - u).solve(v + u);
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

DenseMatrix expm_dense(const DenseMatrix& m) { return DenseMatrix(expm(m.eigen())); }

std::vector<MatrixXd> phi_family(const MatrixXd& m, int p) {
  require(m.rows() == m.cols(), ErrorKind::dimension_mismatch,
          "phi_family: matrix must be square");
  require(p >= 0, ErrorKind::dimension_mismatch, "phi_family: order must be >= 0");
  const Index r = m.rows();
  const Index dim = r * (p + 1);
  require(dim <= kDenseLimit, ErrorKind::dimension_mismatch,
          "phi_family: augmented dimension " + std::to_string(dim) + " exceeds dense threshold");
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(p) + 1);
  if (p == 0) {
    out.push_back(expm(m));
    return out;
  }
  MatrixXd block = MatrixXd::Zero(dim, dim);
  block.topLeftCorner(r, r) = m;
  for (int k = 0; k < p; ++k) block.block(k * r, (k + 1) * r, r, r).setIdentity();
  const MatrixXd e = expm(block);
  for (int k = 0; k <= p; ++k) out.push_back(e.block(0, k * r, r, r));
  return out;
}

PhiFamilyDense phi_family_dense(const DenseMatrix& m, int p) {
  auto raw = phi_family(m.eigen(), p);
  PhiFamilyDense fam;
  fam.order = p;
  fam.matrices.reserve(raw.size());
  for (auto& mat : raw) fam.matrices.emplace_back(std::move(mat));
  return fam;
}

DenseMatrix phi_taylor_oracle(const DenseMatrix& m, int ell, int terms) {
  require(m.is_square(), ErrorKind::dimension_mismatch, "phi_taylor_oracle: square input only");
  require(ell >= 0 && terms >= 0, ErrorKind::dimension_mismatch,
          "phi_taylor_oracle: ell and terms must be >= 0");
  const Index n = m.rows();
  const MatrixXd& a = m.eigen();
  MatrixXd term = MatrixXd::Identity(n, n) * inverse_factorial(ell);  // M^0 / ell!
  MatrixXd sum = MatrixXd::Zero(n, n);
  MatrixXd carry = MatrixXd::Zero(n, n);
  const double anorm = a.norm();
  for (int j = 0; j <= terms; ++j) {
    // Kahan step: sum += term
    const MatrixXd y = term - carry;
    const MatrixXd t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    const double tn = term.norm();
    if (j > anorm && tn <= 1e-20 * sum.norm()) break;
    if (j < terms) term = (term * a) / static_cast<double>(ell + j + 1);
  }
  return DenseMatrix(std::move(sum));
}

double taylor_truncation_bound(double norm, int ell, int terms) {
  // norm^(terms+1) / (terms+ell+1)!, evaluated in log space.
  const double log_bound = (terms + 1) * std::log(std::max(norm, 1e-300)) -
                           std::lgamma(static_cast<double>(terms + ell + 2));
  return std::exp(log_bound);
}

}  // namespace philr
