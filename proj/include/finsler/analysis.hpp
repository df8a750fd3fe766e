#ifndef FINSLER_ANALYSIS_HPP
#define FINSLER_ANALYSIS_HPP

#include <array>

#include "finsler/flow.hpp"

namespace finsler {

/// Pointwise tensor norm |f|_g: every Upper slot contracted with g, every
/// Lower slot with g^{-1}; returns the degree-0 scalar field.
HomogeneousField tensor_norm_field(const HomogeneousField& f,
                                   const MetricField& m);

struct SupResult {
  double sup = 0.0;
  GridNode worst;
};

/// Grid supremum of |f|_g (0-homogeneity makes this the sup over the whole
/// sphere bundle up to discretization).
SupResult tensor_norm_sup(const HomogeneousField& f, const MetricField& m);

/// Per-snapshot norm series of the deformation: u_m in the evolving metric
/// with the time-t Cartan derivative, u-hat_m in the fixed g(0) metric with
/// the fixed background derivative; running trapezoid integrals.
struct NormSeries {
  std::vector<double> t;
  std::vector<double> u0, u1, uhat0, uhat1;
  std::vector<double> int_u0, int_u1, int_uhat0, int_uhat1;
};

NormSeries norm_series(const FlowRun& run);

struct Certificate {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string witness;
};

/// Generalized eigenvalues of g(t) against g(0) at every snapshot and node
/// must lie in [exp(-L(t)), exp(L(t))] with L(t) the accepted-step integral
/// of u0; the residual is the worst violation (negative = margin).
Certificate uniform_equivalence_certificate(const FlowRun& run, double tol);

/// Difference tensor from the background derivative of the evolving metric:
/// Gamma^i_{jk} = 1/2 g^{is} [(Dg)_{j;ks} + (Dg)_{k;js} - (Dg)_{s;jk}].
/// When coefficient_diff_residual is given it receives the nodewise mismatch
/// against (time-t coefficients) - (background coefficients).
HomogeneousField gamma_difference(const MetricField& g_t,
                                  const ConnectionField& conn_t,
                                  const ConnectionField& conn_0,
                                  double* coefficient_diff_residual = nullptr);

/// Worst nodewise mismatch of the first-order commutation identity
/// (nabla w - D w)(X;Y,Z) = -w(Gamma(X,Y),Z) - w(Y,Gamma(X,Z)) at one
/// snapshot.
double commutation_residual_at(const FlowRun& run, int snapshot_index);

Certificate gamma_difference_certificate(const FlowRun& run, double tol);
Certificate commutation_certificate(const FlowRun& run, double tol);

/// sup |g(t) - gbar|_{g(0)} <= tail integral of u-hat0 (+ tol) per snapshot.
Certificate cauchy_tail_certificate(const FlowRun& run, const LimitMetric& lim,
                                    double tol);

Certificate limit_positive_definite_certificate(const LimitMetric& lim);

/// Reconstruction residual |1/2 [Fbar^2]_{y^k y^l} - gbar|_inf.
Certificate fbar_hessian_certificate(const LimitMetric& lim, double tol);

/// The full certificate suite in a fixed order.
std::vector<Certificate> verify_certificates(const FlowRun& run, double tol,
                                             double fbar_tol);

/// Closed-form generalized eigenvalues of the 2x2 pencil (a, b), b positive.
std::array<double, 2> pencil_eigenvalues(double a11, double a12, double a22,
                                         double b11, double b12, double b22);

}  // namespace finsler

#endif
