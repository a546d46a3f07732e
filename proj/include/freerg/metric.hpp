#pragma once

#include <memory>

#include "freerg/free_conv.hpp"

namespace freerg {

// Geometric y-grid approximating sup over 0 < y <= 1/4. The y->0 end is safe:
// the residual |R_mu - R_nu|/y^2 extends continuously to 0 for centered
// unit-variance laws with finite third moment.
struct MetricGrid {
    double y_min = 1e-4;
    double y_max = 0.25;
    int points = 200;

    std::vector<double> ys() const; // geometric, last point exactly y_max
};

struct MetricResidual {
    double y = 0;
    double value = 0; // |R_mu(z) - R_nu(z)| / y^2 at z = -iy (or +iy)
};

struct DistanceReport {
    double value = 0;
    double argmax_y = 0;
    std::vector<MetricResidual> residuals;
    bool extended_domain = false; // evaluated outside the standardized class
    AxisSign axis = AxisSign::lower;
};

// Evaluable R-transform; leaves switch between the cumulant series and Newton
// inversion at the leaf-level argument (see kRSeriesSwitch).
class RSource {
  public:
    virtual ~RSource() = default;
    virtual cd eval(cd z) const = 0;
};
using RSourcePtr = std::shared_ptr<const RSource>;

RSourcePtr make_source(const MeasureSpec& mu);
RSourcePtr make_source(const RGIterate& it);
// s * inner(t z): dilations (s=t=lambda) and CLT scalings (s=sqrt n, t=1/sqrt n).
RSourcePtr scaled_source(RSourcePtr inner, double s, double t);
// R of a free sum: sum of the R's.
RSourcePtr sum_source(std::vector<RSourcePtr> parts);

// Grid sup of |R_a - R_b|/y^2. No membership check: callers flag whether the
// evaluation lives outside the standardized class.
DistanceReport distance_sources(const RSourcePtr& a, const RSourcePtr& b, const MetricGrid& grid,
                                AxisSign axis = AxisSign::lower, bool extended_domain = false);

// Membership-checked fronts (centered, unit variance, finite third moment).
DistanceReport distance(const MeasureSpec& a, const MeasureSpec& b, const MetricGrid& grid,
                        AxisSign axis = AxisSign::lower);
DistanceReport distance(const RGIterate& a, const MeasureSpec& b, const MetricGrid& grid,
                        AxisSign axis = AxisSign::lower);
DistanceReport distance(const RGIterate& a, const RGIterate& b, const MetricGrid& grid,
                        AxisSign axis = AxisSign::lower);

// distance(T a, T b) / distance(a, b); errors when the denominator vanishes.
double contraction_ratio(const MeasureSpec& a, const MeasureSpec& b, const MetricGrid& grid);

// lhs = d(dilate(a,lambda), dilate(b,lambda)) on the extended domain,
// bound = lambda^3 d(a,b); lambda in (0,1]. Throws if lhs > bound + 1e-9.
std::pair<double, double> ideality_check(const MeasureSpec& a, const MeasureSpec& b, double lambda,
                                         const MetricGrid& grid);

// lhs = d(law(a+a2), law(b+b2)) via R-additivity (extended domain),
// rhs = d(a,b) + d(a2,b2). Throws if lhs > rhs + 1e-9.
std::pair<double, double> subadditivity_check(const MeasureSpec& a, const MeasureSpec& a2,
                                              const MeasureSpec& b, const MeasureSpec& b2,
                                              const MetricGrid& grid);

// lhs = d(law of n^{-1/2} free sum, semicircle), bound = d(mu, semicircle)/sqrt(n);
// any n >= 1. Throws if lhs > bound + 1e-9.
std::pair<double, double> clt_bound_check(const MeasureSpec& mu, int n, const MetricGrid& grid);

} // namespace freerg
