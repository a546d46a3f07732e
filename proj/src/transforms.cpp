#include "freerg/transforms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "freerg/parallel.hpp"

namespace freerg {

namespace {

// z * sqrt(1 - c/z^2): the branch of sqrt(z^2 - c) with s ~ z at infinity,
// correct on both half-planes (principal sqrt of a value near 1).
cd branch_sqrt(cd z, double c) { return z * std::sqrt(1.0 - c / (z * z)); }

// Trapezoid weights of a sorted grid.
double trap_weight(const std::vector<double>& xs, size_t i) {
    double left = (i == 0) ? xs[0] : xs[i - 1];
    double right = (i + 1 == xs.size()) ? xs.back() : xs[i + 1];
    return 0.5 * (right - left);
}

GPair cauchy_pair(const MeasureSpec& mu, cd z) {
    return std::visit(
        [z](const auto& m) -> GPair {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                cd g = 0, gp = 0;
                for (const auto& a : m.atoms) {
                    cd d = z - a.x;
                    g += a.w / d;
                    gp -= a.w / (d * d);
                }
                return {g, gp};
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                // (z - sqrt(z^2-4s^2))/(2s^2) in conjugate form: the naive
                // difference cancels ~|z|^2/s^2 digits at large |z| and that
                // noise defeats the Newton tolerance in f_inverse
                double s2 = m.sigma * m.sigma;
                cd rt = std::sqrt(1.0 - 4.0 * s2 / (z * z)); // s = z*rt
                cd onep = 1.0 + rt;
                return {2.0 / (z * onep), -2.0 / (z * z * rt * onep)};
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                cd s = branch_sqrt(z, m.halfwidth * m.halfwidth);
                return {1.0 / s, -z / (s * s * s)};
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                double q = 1 - m.p;
                double x1 = std::sqrt(q / m.p), x2 = -std::sqrt(m.p / q);
                cd d1 = z - x1, d2 = z - x2;
                return {m.p / d1 + q / d2, -m.p / (d1 * d1) - q / (d2 * d2)};
            } else {
                cd g = 0, gp = 0;
                for (size_t i = 0; i < m.xs.size(); ++i) {
                    double w = trap_weight(m.xs, i) * m.fs[i];
                    cd d = z - m.xs[i];
                    g += w / d;
                    gp -= w / (d * d);
                }
                return {g, gp};
            }
        },
        mu.v);
}

std::string cstr(cd z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

} // namespace

cd cauchy(const TransformHandle& h, cd z) {
    if (z.imag() == 0) throw input_error("cauchy: z must be off the real axis");
    return cauchy_pair(h.source, z).first;
}

cd cauchy_prime(const TransformHandle& h, cd z) {
    if (z.imag() == 0) throw input_error("cauchy_prime: z must be off the real axis");
    return cauchy_pair(h.source, z).second;
}

cd f_transform(const TransformHandle& h, cd z) {
    cd g = cauchy(h, z);
    if (std::abs(g) < 1e-300) throw numeric_error("f_transform: Cauchy transform numerically zero at z=" + cstr(z));
    return 1.0 / g;
}

cd f_inverse(const TransformHandle& h, cd w) {
    if (w.imag() == 0) throw input_error("f_inverse: w must be off the real axis");
    const double half_plane = (w.imag() > 0) ? 1.0 : -1.0;
    const double tol = h.newton_tol * std::max(1.0, std::abs(w));

    cd u = w;
    cd fu = f_transform(h, u);
    double res = std::abs(fu - w);

    auto newton_step = [&](cd at) -> cd {
        auto [g, gp] = cauchy_pair(h.source, at);
        cd fp = -gp / (g * g);
        if (!std::isfinite(fp.real()) || !std::isfinite(fp.imag()) || std::abs(fp) < 1e-300)
            throw numeric_error("f_inverse: vanishing F' at u=" + cstr(at));
        return (1.0 / g - w) / fp;
    };

    for (int iter = 0; iter < h.newton_max_iter; ++iter) {
        if (res <= tol) {
            // one guarded polish step: quadratic convergence parks the
            // residual near machine precision instead of just under tol
            cd u2 = u - newton_step(u);
            if (u2.imag() * half_plane > 0) {
                cd fu2 = f_transform(h, u2);
                if (std::abs(fu2 - w) < res) u = u2;
            }
            return u;
        }
        cd step = newton_step(u);
        bool accepted = false;
        bool stayed_in_plane = false;
        for (int halve = 0; halve <= 8; ++halve) {
            cd un = u - step;
            if (un.imag() * half_plane > 0) {
                stayed_in_plane = true;
                cd fun = f_transform(h, un);
                double resn = std::abs(fun - w);
                if (resn < res) {
                    u = un;
                    fu = fun;
                    res = resn;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!stayed_in_plane)
                throw numeric_error("f_inverse: iterate escaped the working half-plane at u=" + cstr(u));
            throw numeric_error("f_inverse: residual stalled at " + std::to_string(res) + " (w=" + cstr(w) + ")");
        }
    }
    if (res <= tol) return u;
    throw numeric_error("f_inverse: no convergence after " + std::to_string(h.newton_max_iter) +
                        " iterations, last residual " + std::to_string(res));
}

cd r_transform(const TransformHandle& h, cd z) {
    double az = std::abs(z);
    if (az == 0) throw input_error("r_transform: z must be nonzero");
    if (std::abs(z.real()) > 1e-13 * az)
        throw input_error("r_transform: z must lie on the imaginary axis, got z=" + cstr(z));
    if (az > 0.25 * (1 + 1e-9))
        throw input_error("r_transform: |z| must be <= 1/4 (working axis), got |z|=" + std::to_string(az));
    cd w = 1.0 / z;
    return f_inverse(h, w) - w;
}

cd r_of_dilated(const TransformHandle& h, double lambda, cd z) {
    if (!(lambda > 0)) throw input_error("r_of_dilated: lambda must be positive");
    return lambda * r_transform(h, lambda * z);
}

GridDensity stieltjes_density(const TransformHandle& h, const std::vector<double>& xs,
                              std::pair<double, double> eps_schedule) {
    return stieltjes_density_fn(cauchy_fn(h.source), xs, eps_schedule);
}

GridDensity stieltjes_density_fn(const GFun& g, const std::vector<double>& xs,
                                 std::pair<double, double> eps_schedule) {
    auto [e1, e2] = eps_schedule;
    if (!(e1 > e2 && e2 > 0))
        throw input_error("stieltjes_density: eps schedule must satisfy eps1 > eps2 > 0");
    if (xs.size() < 2) throw input_error("stieltjes_density: need at least 2 grid points");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw input_error("stieltjes_density: xs must be strictly increasing");

    const double alpha = -e2 / (e1 - e2); // weight of f(eps1)
    const double beta = e1 / (e1 - e2);   // weight of f(eps2); extrapolates to eps=0
    GridDensity out;
    out.xs = xs;
    out.fs.assign(xs.size(), 0.0);
    parallel_for(xs.size(), [&](size_t i) {
        double f1 = -g(cd(xs[i], e1)).first.imag() / std::numbers::pi;
        double f2 = -g(cd(xs[i], e2)).first.imag() / std::numbers::pi;
        out.fs[i] = std::max(0.0, alpha * f1 + beta * f2);
    });
    return out;
}

GFun cauchy_fn(const MeasureSpec& mu) {
    return [mu](cd z) { return cauchy_pair(mu, z); };
}

} // namespace freerg
