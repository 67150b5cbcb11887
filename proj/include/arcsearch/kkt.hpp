#pragma once

#include "arcsearch/model.hpp"
#include "arcsearch/types.hpp"

namespace arcsearch {

/// The five blocks of k(v). Flattening order is (r_L, r_h, r_g, r_wz, r_comp).
struct KktResidual {
  Vec r_L;     // grad_x L
  Vec r_h;     // h(x)
  Vec r_g;     // g(x) - s
  Vec r_wz;    // w - z
  Vec r_comp;  // Z s

  Dims dims() const {
    return {static_cast<int>(r_L.size()), static_cast<int>(r_h.size()),
            static_cast<int>(r_g.size())};
  }
  Vec flat() const;
};

KktResidual residual(const PointEval& pe, const Iterate& v);
KktResidual residual(const NlpProblem& prob, const Iterate& v);

/// phi = ||k(v)||^2.
double merit(const KktResidual& res);

/// mu = z's / p.
double dual_measure(const Vec& z, const Vec& s);

/// Dense k'(v):
///
///   [ hess L   -grad h  -grad g   0   0 ]
///   [ grad h'     0        0      0   0 ]
///   [ grad g'     0        0     -I   0 ]
///   [   0         0        I      0  -I ]
///   [   0         0        0      Z   S ]
struct KktMatrix {
  Dims dims;
  Mat matrix;
};

KktMatrix jacobian(const PointEval& pe, const Iterate& v);
KktMatrix jacobian(const NlpProblem& prob, const Iterate& v);

/// Reference data of the neighborhood min(Zs) >= 1/2 (min(Z0 s0) / phi0) phi.
struct NeighborhoodRef {
  double min_comp0 = 0.0;
  double phi0 = 0.0;

  static NeighborhoodRef from_initial(const KktResidual& res0);
};

/// min_i(comp_i) - 1/2 (min_comp0 / phi0) phi(res). Non-negative inside the
/// neighborhood.
double neighborhood_margin(const KktResidual& res, const Vec& comp,
                           const NeighborhoodRef& ref);

}  // namespace arcsearch
