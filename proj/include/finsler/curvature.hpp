#ifndef FINSLER_CURVATURE_HPP
#define FINSLER_CURVATURE_HPP

#include "finsler/geometry.hpp"

namespace finsler {

/// Spray coefficients G^i (degree 2) and the nonlinear connection
/// N^j_i = dG^j/dy^i (degree 1, slots [j][i]).
struct SprayField {
  HomogeneousField G;
  HomogeneousField N;
};

/// Reduced curvature R^i_k (slots [i][k]), its trace ric = R^i_i, and the
/// symmetric tensor Ric_jk = [F^2 ric / 2]_{y^j y^k}; all degree 0.
struct CurvatureBundle {
  HomogeneousField R;
  HomogeneousField ric_scalar;
  HomogeneousField ric_tensor;
};

/// G^i = 1/4 g^{ih} (d^2F^2/dy^h dx^j y^j - dF^2/dx^h). When d_f2 is given
/// it must be the precomputed dF^2/dy covector (fundamental_tensor shares it).
SprayField spray(const FinslerField& f, const MetricField& m,
                 const HomogeneousField* d_f2 = nullptr);

/// R^i_k = (1/F^2)(2 dG^i/dx^k - d^2G^i/dx^j dy^k y^j
///          + 2 G^j d^2G^i/dy^j dy^k - dG^i/dy^j dG^j/dy^k).
HomogeneousField reduced_curvature(const SprayField& s, const FinslerField& f);

HomogeneousField ricci_scalar(const HomogeneousField& r);

/// Vertical Hessian of the degree-2 scalar F^2 ric / 2; symmetric bitwise.
HomogeneousField ricci_tensor(const FinslerField& f,
                              const HomogeneousField& ric);

/// Stages R -> ric -> Ric for one metric, given its spray.
CurvatureBundle curvature_pipeline(const FinslerField& f, const SprayField& s);

}  // namespace finsler

#endif
