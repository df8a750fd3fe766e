#ifndef FINSLER_VERTICAL_HPP
#define FINSLER_VERTICAL_HPP

#include "finsler/field.hpp"

namespace finsler {

/// Spectral derivative along the fiber circle, order 1 or 2. Realized as
/// dense trig differentiation matrices: exact for band-limited data, works
/// for any even ntheta. Degree and rank unchanged.
HomogeneousField theta_derivative(const HomogeneousField& f, int order);

/// 4th-order central difference along chart axis (1 or 2), periodic,
/// order 1 or 2. Degree and rank unchanged.
HomogeneousField x_derivative(const HomogeneousField& f, int axis, int order);

/// Vertical derivative d/dy^i of a degree-k field, realized through Euler's
/// theorem on the unit fiber: (df/dy^i)|_{r=1} = k psi e_i + psi_theta m_i.
/// Result has degree k-1 and one extra Lower slot appended last.
HomogeneousField y_derivative(const HomogeneousField& f);

/// Contraction of one slot with the canonical vector y on the unit fiber
/// (multiply by e over that slot and sum). Degree increases by one.
HomogeneousField contract_unit_y(const HomogeneousField& f, int slot);

/// Trace over two slots of opposite variance. Rank drops by two.
HomogeneousField trace(const HomogeneousField& f, int slot_a, int slot_b);

/// Row-major ntheta x ntheta spectral differentiation matrix (order 1 or 2),
/// shared with the pointwise chart evaluator.
std::span<const double> theta_diff_matrix(int ntheta, int order);

/// Projection onto fiber harmonics of order <= max_mode (exact on kept
/// modes). A field constant in theta passes through bitwise unchanged.
/// max_mode < 0 or >= ntheta/2 is a no-op.
HomogeneousField theta_lowpass(const HomogeneousField& f, int max_mode);

/// Symmetrized second vertical derivative of a scalar field (the two index
/// orders agree to roundoff; the off-diagonal is stored bitwise equal).
HomogeneousField vertical_hessian(const HomogeneousField& scalar);

}  // namespace finsler

#endif
