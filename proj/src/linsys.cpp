#include "arcsearch/linsys.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "arcsearch/errors.hpp"

namespace arcsearch {

KktFactorization::KktFactorization(KktFactorization&& other) noexcept
    : a_reg_(std::move(other.a_reg_)),
      row_scale_(std::move(other.row_scale_)),
      lu_(std::move(other.lu_)),
      lambda_(other.lambda_),
      rcond_(other.rcond_),
      flag_(other.flag_),
      decompositions_(other.decompositions_),
      solves_(other.solves_.load()) {}

namespace {

// Pivots of exactly zero (or NaN) make the LU unusable regardless of rcond.
bool singular_pivots(const Eigen::PartialPivLU<Mat>& lu) {
  const auto diag = lu.matrixLU().diagonal();
  const double scale = diag.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !diag.allFinite()) return true;
  return diag.cwiseAbs().minCoeff() <=
         std::numeric_limits<double>::epsilon() * scale * diag.size();
}

}  // namespace

KktFactorization factorize(const Mat& A, int hessian_block,
                           const RegularizationPolicy& policy, double lambda_floor) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw ContractViolation("factorize needs a non-empty square matrix");
  if (hessian_block < 0 || hessian_block > A.rows())
    throw ContractViolation("hessian block exceeds matrix size");
  if (!(lambda_floor >= 0.0)) throw ContractViolation("lambda_floor must be non-negative");
  if (!A.allFinite()) throw FactorizationError("KKT matrix has non-finite entries");

  KktFactorization fac;
  fac.row_scale_.resize(A.rows());
  auto attempt = [&](double lambda) {
    fac.a_reg_ = A;
    if (lambda > 0.0) fac.a_reg_.diagonal().head(hessian_block).array() += lambda;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double rmax = fac.a_reg_.row(i).cwiseAbs().maxCoeff();
      fac.row_scale_(i) = rmax > 0.0 ? 1.0 / rmax : 1.0;
    }
    fac.lu_.compute(fac.row_scale_.asDiagonal() * fac.a_reg_);
    ++fac.decompositions_;
    const bool singular = singular_pivots(fac.lu_);
    fac.rcond_ = singular ? 0.0 : fac.lu_.rcond();
    fac.lambda_ = lambda;
    return !singular;
  };

  // Escalate while singular or badly conditioned. If lambda stops improving
  // the estimate, the ill-conditioning lives outside the hess L block: fall
  // back to the smallest lambda that gave a nonsingular factorization.
  double lambda = hessian_block > 0 ? lambda_floor : 0.0;
  double first_nonsingular = -1.0;
  double prev_rcond = 0.0;
  for (;;) {
    const bool ok = attempt(lambda);
    if (ok && fac.rcond_ >= policy.min_rcond) break;
    if (ok && first_nonsingular < 0.0) first_nonsingular = lambda;
    const bool stagnant = ok && prev_rcond > 0.0 && fac.rcond_ < 1.1 * prev_rcond;
    const double next = lambda == 0.0 ? policy.initial : lambda * policy.growth;
    if (hessian_block == 0 || stagnant || next > policy.max * (1.0 + 1e-12)) {
      if (first_nonsingular < 0.0)
        throw FactorizationError("KKT matrix singular after maximum regularization");
      if (first_nonsingular != lambda) attempt(first_nonsingular);
      break;
    }
    prev_rcond = ok ? fac.rcond_ : 0.0;
    lambda = next;
  }
  fac.flag_ = fac.lambda_ > 0.0 ? ConditionFlag::regularized : ConditionFlag::ok;
  return fac;
}

KktFactorization factorize(const KktMatrix& K, const RegularizationPolicy& policy) {
  double floor = policy.minimum;
  if (policy.curvature_correction) floor = std::max(floor, curvature_shift(K, policy));
  return factorize(K.matrix, K.dims.n, policy, floor);
}

double curvature_shift(const KktMatrix& K, const RegularizationPolicy& policy) {
  const Dims& d = K.dims;
  if (K.matrix.rows() != d.total()) throw ContractViolation("KKT matrix/dims mismatch");
  const Mat& A = K.matrix;
  const Mat Jg = -A.block(0, d.w_offset(), d.n, d.p);
  const Vec z = A.block(d.z_offset(), d.s_offset(), d.p, d.p).diagonal();
  const Vec s = A.block(d.z_offset(), d.z_offset(), d.p, d.p).diagonal();
  Mat M = A.topLeftCorner(d.n, d.n);
  M += Jg * (z.array() / s.array()).matrix().asDiagonal() * Jg.transpose();
  M = 0.5 * (M + M.transpose()).eval();

  Mat N = Mat::Identity(d.n, d.n);
  if (d.m > 0) {
    const Mat Jh = -A.block(0, d.y_offset(), d.n, d.m);
    Eigen::ColPivHouseholderQR<Mat> qr(Jh);
    const Mat Q = qr.householderQ();
    N = Q.rightCols(d.n - qr.rank());
  }
  if (N.cols() == 0) return 0.0;
  const Mat R = N.transpose() * M * N;
  if (!R.allFinite()) return policy.max;
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Mat>(R, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double tol = policy.initial * std::max(1.0, R.cwiseAbs().maxCoeff());
  if (lmin > tol) return 0.0;
  for (double lambda = policy.initial; lambda <= policy.max * (1.0 + 1e-12);
       lambda *= policy.growth)
    if (lmin + lambda > tol) return lambda;
  return policy.max;
}

Vec KktFactorization::solve(const Vec& rhs) const {
  if (rhs.size() != row_scale_.size())
    throw ContractViolation("right-hand side has wrong dimension");
  solves_.fetch_add(1, std::memory_order_relaxed);
  Vec x = lu_.solve(row_scale_.asDiagonal() * rhs);
  // one step of iterative refinement
  const Vec r = rhs - a_reg_ * x;
  x += lu_.solve(row_scale_.asDiagonal() * r);
  return x;
}

Vec solve(const KktFactorization& fac, const Vec& rhs) { return fac.solve(rhs); }

LeastSquaresResult least_squares_y(const Mat& Jh, const Vec& r) {
  if (Jh.rows() != r.size())
    throw ContractViolation("least_squares_y: dimension mismatch");
  LeastSquaresResult out;
  if (Jh.cols() == 0) {
    out.y = Vec(0);
    return out;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(Jh);
  if (qr.rank() == Jh.cols()) {
    out.y = qr.solve(r);
    return out;
  }
  out.rank_deficient = true;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(Jh);
  out.y = cod.solve(r);
  return out;
}

}  // namespace arcsearch
