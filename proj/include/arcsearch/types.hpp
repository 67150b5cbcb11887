#pragma once

#include <Eigen/Dense>

namespace arcsearch {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Sizes of the stacked primal-dual vector v = (x, y, w, s, z).
struct Dims {
  int n = 0;
  int m = 0;
  int p = 0;

  int total() const { return n + m + 3 * p; }
  int x_offset() const { return 0; }
  int y_offset() const { return n; }
  int w_offset() const { return n + m; }
  int s_offset() const { return n + m + p; }
  int z_offset() const { return n + m + 2 * p; }

  bool operator==(const Dims&) const = default;
};

/// Primal-dual point. Also used for direction-shaped quantities (v̇, v̈).
struct Iterate {
  Vec x;
  Vec y;
  Vec w;
  Vec s;
  Vec z;

  Dims dims() const {
    return {static_cast<int>(x.size()), static_cast<int>(y.size()),
            static_cast<int>(w.size())};
  }

  Vec stacked() const {
    const Dims d = dims();
    Vec v(d.total());
    v << x, y, w, s, z;
    return v;
  }

  static Iterate unstack(const Vec& v, const Dims& d) {
    Iterate it;
    it.x = v.segment(d.x_offset(), d.n);
    it.y = v.segment(d.y_offset(), d.m);
    it.w = v.segment(d.w_offset(), d.p);
    it.s = v.segment(d.s_offset(), d.p);
    it.z = v.segment(d.z_offset(), d.p);
    return it;
  }

  static Iterate zeros(const Dims& d) {
    return {Vec::Zero(d.n), Vec::Zero(d.m), Vec::Zero(d.p), Vec::Zero(d.p),
            Vec::Zero(d.p)};
  }
};

}  // namespace arcsearch
