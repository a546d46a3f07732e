#pragma once

#include <optional>

#include "freerg/transforms.hpp"

namespace freerg {

// Cumulants add under free additive convolution. Equal max order required.
std::vector<Rat> conv_cumulants(const std::vector<Rat>& a, const std::vector<Rat>& b);
std::vector<double> conv_cumulants(const std::vector<double>& a, const std::vector<double>& b);

// Truncated R-transform series sum_{k>=1} kappa_k z^{k-1} (Horner).
cd r_series(const std::vector<double>& kappa, cd z);

// Crossover between the truncated-series evaluator and Newton inversion for
// R evaluation, applied to the seed-level argument. Below this the Newton
// route loses the tiny residuals to cancellation; the order-12 series is
// accurate to ~1e-16 there (tail term |kappa_13 z^12| is negligible).
inline constexpr double kRSeriesSwitch = 0.02;
inline constexpr int kRSeriesOrder = 12;

// State of T^n applied to a seed law, carried in synchronized representations:
// exact cumulants (when the seed has rational moments), an evaluable R rule
// R_n(z) = 2^{n/2} R_seed(2^{-n/2} z), and an optional density grid.
struct RGIterate {
    int n = 0;
    MeasureSpec seed;
    int K = 8;                                        // cumulant truncation order
    std::optional<std::vector<Rat>> seed_kappa_exact; // orders 1..K
    std::vector<double> seed_kappa_series;            // orders 1..max(K,12)
    std::optional<GridDensity> density;

    static RGIterate make(MeasureSpec seed, int K = 8);

    // kappa_k(n) = 2^{n(2-k)/2} kappa_k(seed), orders 1..K.
    std::vector<double> cumulants() const;
    std::optional<std::vector<Q2>> cumulants_exact() const;
};

// n -> n+1. The cumulant rule kappa_k -> 2^{1-k/2} kappa_k and the r_eval
// scaling update are both implied by the stored (seed, n) pair. Seed must be
// centered with unit variance.
RGIterate renormalize_T(const RGIterate& it);

// R_{T^n seed}(z) = 2^{n/2} R_seed(2^{-n/2} z). Series evaluator below the
// crossover, Newton inversion above it.
cd r_eval_iterate(const RGIterate& it, cd z);

// R of n^{-1/2}(a_1+...+a_n) for free copies: sqrt(n) R(z/sqrt(n)); any n >= 1.
cd clt_scale_r(const TransformHandle& h, int n, cd z);

struct SubordinationState {
    cd z;
    cd omega;
    double residual = 0;
    int iterations = 0;
};

// G_{mu (+) mu}(z) via the subordination fixed point omega = z + F(omega) - omega,
// i.e. 2*omega = z + F(omega): Newton steps with a Picard fallback that
// preserves Im omega >= Im z; stop when the self-map displacement is
// <= 1e-12 (1+|omega|); iteration cap 10^4.
cd subordination_selfconv(const TransformHandle& h, cd z);
SubordinationState subordination_selfconv_state(const TransformHandle& h, cd z);

// (G, G') evaluator of mu (+) mu (self-convolution of a plain measure).
GFun selfconv_fn(const MeasureSpec& mu);

// (G, G') evaluator of T^n mu: per step, self-convolution at sqrt(2) z
// composed with the 1/sqrt(2) dilation (O(n) recursion depth, not 2^n fold).
GFun t_iterated_fn(const MeasureSpec& seed, int n);

// Density grid of T^n seed by Stieltjes inversion of t_iterated_fn. Raw
// (unnormalized) values; resolve support edges with refined xs if grid
// moments matter. Rejects n = 0 for purely atomic seeds.
GridDensity measure_of_T(const RGIterate& it, const std::vector<double>& xs,
                         std::pair<double, double> eps_schedule);

} // namespace freerg
