#include "freerg/free_conv.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace freerg {

namespace {

constexpr double kSubTol = 1e-12;
constexpr int kSubCap = 10000;

struct SelfconvResult {
    cd g;   // G_{mu(+)mu}(z)
    cd gp;  // d/dz G_{mu(+)mu}(z)
    cd omega;
    double residual = 0;
    int iterations = 0;
};

// Fixed point of 2w = z + F(w). Newton with the analytic derivative; any step
// that would break Im w >= Im z falls back to the Picard map w -> z + F(w) - w,
// which preserves it (Im F(u) >= Im u).
SelfconvResult selfconv_core(const GFun& inner, cd z, double tol, int cap) {
    if (!(z.imag() > 0)) throw input_error("subordination: Im z must be positive");
    auto [g0, gp0] = inner(z);
    (void)gp0;
    if (std::abs(g0) < 1e-300) throw numeric_error("subordination: vanishing Cauchy transform at start");
    cd w = 1.0 / g0; // F(z): valid start with Im w >= Im z
    cd g, gp;
    double res = 0;
    int it = 0;
    for (;; ++it) {
        std::tie(g, gp) = inner(w);
        cd F = 1.0 / g;
        cd Fp = -gp / (g * g);
        cd phi = 2.0 * w - z - F; // displacement of the Picard self-map
        res = std::abs(phi);
        if (res <= tol * (1.0 + std::abs(w))) break;
        if (it >= cap)
            throw numeric_error("subordination: iteration cap " + std::to_string(cap) +
                                " exceeded, residual " + std::to_string(res));
        cd dn = 2.0 - Fp;
        cd wn = (std::abs(dn) > 1e-300) ? w - phi / dn : w + phi; // degenerate: nudge
        if (!(wn.imag() >= z.imag())) wn = z + F - w;
        w = wn;
    }
    cd Fp = -gp / (g * g);
    cd wprime = 1.0 / (2.0 - Fp); // from differentiating 2w(z) = z + F(w(z))
    return {g, gp * wprime, w, res, it};
}

} // namespace

std::vector<Rat> conv_cumulants(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    if (a.size() != b.size()) throw input_error("conv_cumulants: order mismatch");
    std::vector<Rat> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

std::vector<double> conv_cumulants(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw input_error("conv_cumulants: order mismatch");
    std::vector<double> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

cd r_series(const std::vector<double>& kappa, cd z) {
    cd acc = 0;
    for (size_t k = kappa.size(); k-- > 0;) acc = acc * z + kappa[k];
    return acc;
}

RGIterate RGIterate::make(MeasureSpec seed, int K) {
    if (K < 1) throw input_error("RGIterate: K must be >= 1");
    RGIterate it;
    it.seed = std::move(seed);
    it.K = K;
    it.seed_kappa_exact = freerg::cumulants_exact(it.seed, K);
    it.seed_kappa_series = cumulants_double(it.seed, std::max(K, kRSeriesOrder));
    return it;
}

std::vector<double> RGIterate::cumulants() const {
    std::vector<double> out(K);
    for (int k = 1; k <= K; ++k)
        out[k - 1] = std::exp2(n * (2 - k) / 2.0) * seed_kappa_series[k - 1];
    return out;
}

std::optional<std::vector<Q2>> RGIterate::cumulants_exact() const {
    if (!seed_kappa_exact) return std::nullopt;
    std::vector<Q2> out;
    out.reserve(K);
    for (int k = 1; k <= K; ++k)
        out.push_back(pow2_half(static_cast<long>(n) * (2 - k)) * Q2((*seed_kappa_exact)[k - 1]));
    return out;
}

RGIterate renormalize_T(const RGIterate& it) {
    auto cert = q3_check(it.seed);
    if (!cert.is_member)
        throw input_error("renormalize_T: seed must be centered with unit variance (mean=" +
                          std::to_string(cert.mean) + ", var=" + std::to_string(cert.variance) + ")");
    RGIterate next = it;
    next.n = it.n + 1;
    next.density.reset(); // density view is stale after the map
    return next;
}

cd r_eval_iterate(const RGIterate& it, cd z) {
    const double c = std::exp2(it.n / 2.0);
    const cd zp = z / c;
    if (std::abs(zp) < kRSeriesSwitch) return c * r_series(it.seed_kappa_series, zp);
    TransformHandle h(it.seed);
    return c * r_transform(h, zp);
}

cd clt_scale_r(const TransformHandle& h, int n, cd z) {
    if (n < 1) throw input_error("clt_scale_r: n must be >= 1");
    const double c = std::sqrt(static_cast<double>(n));
    const cd zp = z / c;
    if (std::abs(zp) < kRSeriesSwitch)
        return c * r_series(cumulants_double(h.source, kRSeriesOrder), zp);
    return c * r_transform(h, zp);
}

cd subordination_selfconv(const TransformHandle& h, cd z) {
    return selfconv_core(cauchy_fn(h.source), z, h.newton_tol, kSubCap).g;
}

SubordinationState subordination_selfconv_state(const TransformHandle& h, cd z) {
    auto r = selfconv_core(cauchy_fn(h.source), z, h.newton_tol, kSubCap);
    return {z, r.omega, r.residual, r.iterations};
}

GFun selfconv_fn(const MeasureSpec& mu) {
    GFun inner = cauchy_fn(mu);
    return [inner](cd z) -> GPair {
        auto r = selfconv_core(inner, z, kSubTol, kSubCap);
        return {r.g, r.gp};
    };
}

namespace {

GFun t_step_fn(GFun inner) {
    return [inner](cd z) -> GPair {
        auto r = selfconv_core(inner, std::numbers::sqrt2 * z, kSubTol, kSubCap);
        return {std::numbers::sqrt2 * r.g, 2.0 * r.gp};
    };
}

} // namespace

GFun t_iterated_fn(const MeasureSpec& seed, int n) {
    if (n < 0) throw input_error("t_iterated_fn: n must be >= 0");
    GFun f = cauchy_fn(seed);
    for (int i = 0; i < n; ++i) f = t_step_fn(f);
    return f;
}

GridDensity measure_of_T(const RGIterate& it, const std::vector<double>& xs,
                         std::pair<double, double> eps_schedule) {
    if (it.n == 0 &&
        (std::holds_alternative<Atomic>(it.seed.v) || std::holds_alternative<BernoulliStd>(it.seed.v)))
        throw input_error("measure_of_T: atomic seeds have no density at n = 0");
    return stieltjes_density_fn(t_iterated_fn(it.seed, it.n), xs, eps_schedule);
}

} // namespace freerg
