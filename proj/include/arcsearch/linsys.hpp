#pragma once

#include <atomic>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "arcsearch/kkt.hpp"
#include "arcsearch/types.hpp"

namespace arcsearch {

/// Primal regularization schedule: lambda * I is added to the hess L block
/// when the factorization is singular or its reciprocal condition estimate
/// drops below `min_rcond`. With `curvature_correction`, the KktMatrix
/// overload also starts from the smallest schedule value that makes the
/// condensed matrix positive definite (see curvature_shift).
struct RegularizationPolicy {
  double initial = 1e-8;
  double growth = 10.0;
  double max = 1e6;
  double min_rcond = std::sqrt(std::numeric_limits<double>::epsilon());
  bool curvature_correction = true;
  /// Lower bound on lambda for the KktMatrix overload.
  double minimum = 0.0;
  /// The solver refactorizes without the curvature shift when the shifted
  /// direction does not promise enough merit decrease.
  bool descent_fallback = true;
};

enum class ConditionFlag { ok, regularized };

/// Row-equilibrated, row-pivoted LU of the (possibly regularized) KKT matrix.
/// Immutable once built; solve() may be called concurrently.
class KktFactorization {
 public:
  KktFactorization(KktFactorization&& other) noexcept;
  KktFactorization& operator=(KktFactorization&&) = delete;
  KktFactorization(const KktFactorization&) = delete;

  int size() const { return static_cast<int>(row_scale_.size()); }
  double lambda() const { return lambda_; }
  ConditionFlag condition_flag() const { return flag_; }
  double rcond() const { return rcond_; }
  /// Number of LU decompositions performed while building this object.
  int decompositions() const { return decompositions_; }
  /// Number of solves served so far.
  long solve_count() const { return solves_.load(std::memory_order_relaxed); }
  /// The matrix actually factorized, before row scaling.
  const Mat& regularized_matrix() const { return a_reg_; }

  Vec solve(const Vec& rhs) const;

 private:
  friend KktFactorization factorize(const Mat& A, int hessian_block,
                                    const RegularizationPolicy& policy,
                                    double lambda_floor);
  KktFactorization() = default;

  Mat a_reg_;
  Vec row_scale_;
  Eigen::PartialPivLU<Mat> lu_;
  double lambda_ = 0.0;
  double rcond_ = 0.0;
  ConditionFlag flag_ = ConditionFlag::ok;
  int decompositions_ = 0;
  mutable std::atomic<long> solves_{0};
};

/// Factorizes A; regularization touches the leading `hessian_block` diagonal
/// entries only and starts at `lambda_floor`. Throws FactorizationError when
/// the matrix is still singular at policy.max.
KktFactorization factorize(const Mat& A, int hessian_block,
                           const RegularizationPolicy& policy = {},
                           double lambda_floor = 0.0);
KktFactorization factorize(const KktMatrix& K,
                           const RegularizationPolicy& policy = {});

Vec solve(const KktFactorization& fac, const Vec& rhs);

/// Smallest lambda in {0, initial, initial*growth, ..., max} for which
/// hess L + lambda I + grad g S^-1 Z grad g' is positive definite on the null
/// space of grad h'. Returns policy.max when no schedule value suffices.
double curvature_shift(const KktMatrix& K, const RegularizationPolicy& policy = {});

struct LeastSquaresResult {
  Vec y;
  bool rank_deficient = false;
};

/// argmin_y ||Jh y - r||_2 via column-pivoted QR; minimum-norm solution
/// when Jh is rank deficient.
LeastSquaresResult least_squares_y(const Mat& Jh, const Vec& r);

}  // namespace arcsearch
