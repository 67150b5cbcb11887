#pragma once

#include <string>

#include "arcsearch/kkt.hpp"
#include "arcsearch/linsys.hpp"
#include "arcsearch/model.hpp"

namespace arcsearch {

/// Right-hand side used for the second derivative v̈.
enum class RhsMode {
  full,        // includes the third-order Lagrangian term
  third_free,  // drops the third-order term, keeps Hessian contractions
  naive,       // complementarity row only
};

const char* to_string(RhsMode mode);
RhsMode rhs_mode_from_string(const std::string& s);

/// First and second derivatives of the search ellipse at the current iterate.
struct ArcState {
  Iterate vdot;
  Iterate vddot;
  double sigma = 0.0;
  double mu = 0.0;
  RhsMode rhs_mode = RhsMode::third_free;
  /// Set when `full` mode had to difference Hessians for lack of an oracle.
  bool third_order_fd = false;
};

/// (r_L, r_h, r_g, r_wz, r_comp - sigma mu e), flattened.
Vec first_order_rhs(const KktResidual& res, double sigma, double mu);

/// Second-order right-hand side, flattened. `pe` must hold Hessians at v.x.
Vec second_order_rhs(const NlpProblem& prob, const PointEval& pe, const Iterate& v,
                     const Iterate& vdot, RhsMode mode, bool* used_fd = nullptr);
Vec second_order_rhs(const NlpProblem& prob, const Iterate& v, const Iterate& vdot,
                     RhsMode mode);

/// Solves both derivative systems against one factorization.
ArcState compute_arc(const NlpProblem& prob, const PointEval& pe, const Iterate& v,
                     const KktResidual& res, const KktFactorization& fac,
                     double sigma, RhsMode mode);

/// v(alpha) = v - vdot sin(alpha) + vddot (1 - cos(alpha)), alpha in [0, pi/2].
Iterate eval_arc(const Iterate& v, const ArcState& arc, double alpha);

/// Closed-form z_i(alpha) s_i(alpha) along the arc.
double complementarity_along_arc(int i, const Iterate& v, const ArcState& arc,
                                 double alpha);

}  // namespace arcsearch
