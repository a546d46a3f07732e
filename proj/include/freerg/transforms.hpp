#pragma once

#include <complex>
#include <functional>
#include <utility>

#include "freerg/measures.hpp"

namespace freerg {

using cd = std::complex<double>;

enum class AxisSign { lower, upper };

// Evaluable Cauchy/F/R transform attached to a measure representation.
struct TransformHandle {
    MeasureSpec source;
    double newton_tol = 1e-12;
    int newton_max_iter = 100;
    AxisSign eval_axis_sign = AxisSign::lower;

    explicit TransformHandle(MeasureSpec m) : source(std::move(m)) {}
};

// G(z) = int (z-t)^{-1} dmu(t); closed form per variant, principal branch
// fixed by G(z) ~ 1/z at infinity. Im z > 0 => Im G < 0.
cd cauchy(const TransformHandle& h, cd z);

// Analytic derivative G'(z) = -int (z-t)^{-2} dmu(t) (never finite differences).
cd cauchy_prime(const TransformHandle& h, cd z);

// F = 1/G; errors if |G| is numerically zero.
cd f_transform(const TransformHandle& h, cd z);

// Newton inversion of F: returns u with |F(u)-w| <= newton_tol*max(1,|w|).
// Start u0 = w (F ~ id at infinity); step damping (up to 8 halvings while the
// residual does not decrease); iterates must stay in the half-plane of w.
cd f_inverse(const TransformHandle& h, cd w);

// R(z) = F^{-1}(1/z) - 1/z on the working imaginary axis, 0 < |z| <= 1/4.
cd r_transform(const TransformHandle& h, cd z);

// lambda * R(lambda z): the R-transform of the dilated measure.
cd r_of_dilated(const TransformHandle& h, double lambda, cd z);

// density(x) ~= -(1/pi) Im G(x + i eps), Richardson-extrapolated linearly in
// eps from the two schedule values (eps1 > eps2 > 0), clamped at 0. The output
// is raw: it is NOT renormalized, so its trapezoid mass reflects the actual
// inversion quality (normalizing would smear edge-quadrature error over the
// whole grid).
GridDensity stieltjes_density(const TransformHandle& h, const std::vector<double>& xs,
                              std::pair<double, double> eps_schedule);

// Same inversion for any (G, G') evaluator; used for composed convolution
// handles that are not plain measures.
using GPair = std::pair<cd, cd>; // (G(z), G'(z))
using GFun = std::function<GPair(cd)>;
GridDensity stieltjes_density_fn(const GFun& g, const std::vector<double>& xs,
                                 std::pair<double, double> eps_schedule);

// (G, G') evaluator of a measure's own transform.
GFun cauchy_fn(const MeasureSpec& mu);

} // namespace freerg
