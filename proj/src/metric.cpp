#include "freerg/metric.hpp"

#include <cmath>
#include <string>

#include "freerg/parallel.hpp"

namespace freerg {

std::vector<double> MetricGrid::ys() const {
    if (!(y_min > 0) || !(y_min < y_max) || !(y_max <= 0.25 + 1e-12))
        throw input_error("metric grid requires 0 < y_min < y_max <= 1/4");
    if (points < 2) throw input_error("metric grid needs at least 2 points");
    std::vector<double> out(points);
    const double ratio = y_max / y_min;
    for (int i = 0; i < points; ++i)
        out[i] = y_min * std::pow(ratio, static_cast<double>(i) / (points - 1));
    out.back() = y_max;
    return out;
}

namespace {

class MeasureRSource : public RSource {
  public:
    explicit MeasureRSource(MeasureSpec mu)
        : h_(std::move(mu)), kappa_(cumulants_double(h_.source, kRSeriesOrder)) {}

    cd eval(cd z) const override {
        if (std::abs(z) < kRSeriesSwitch) return r_series(kappa_, z);
        return r_transform(h_, z);
    }

  private:
    TransformHandle h_;
    std::vector<double> kappa_;
};

class IterateRSource : public RSource {
  public:
    explicit IterateRSource(RGIterate it) : it_(std::move(it)) {}
    cd eval(cd z) const override { return r_eval_iterate(it_, z); }

  private:
    RGIterate it_;
};

class ScaledRSource : public RSource {
  public:
    ScaledRSource(RSourcePtr inner, double s, double t) : inner_(std::move(inner)), s_(s), t_(t) {}
    cd eval(cd z) const override { return s_ * inner_->eval(t_ * z); }

  private:
    RSourcePtr inner_;
    double s_, t_;
};

class SumRSource : public RSource {
  public:
    explicit SumRSource(std::vector<RSourcePtr> parts) : parts_(std::move(parts)) {}
    cd eval(cd z) const override {
        cd acc = 0;
        for (const auto& p : parts_) acc += p->eval(z);
        return acc;
    }

  private:
    std::vector<RSourcePtr> parts_;
};

void require_standard(const MeasureSpec& mu, const char* what) {
    auto cert = q3_check(mu);
    if (!cert.is_member)
        throw input_error(std::string(what) +
                          ": measure must be centered with unit variance (mean=" +
                          std::to_string(cert.mean) + ", var=" + std::to_string(cert.variance) +
                          "); use the extended-domain evaluation for others");
}

} // namespace

RSourcePtr make_source(const MeasureSpec& mu) { return std::make_shared<MeasureRSource>(mu); }
RSourcePtr make_source(const RGIterate& it) { return std::make_shared<IterateRSource>(it); }
RSourcePtr scaled_source(RSourcePtr inner, double s, double t) {
    return std::make_shared<ScaledRSource>(std::move(inner), s, t);
}
RSourcePtr sum_source(std::vector<RSourcePtr> parts) {
    return std::make_shared<SumRSource>(std::move(parts));
}

DistanceReport distance_sources(const RSourcePtr& a, const RSourcePtr& b, const MetricGrid& grid,
                                AxisSign axis, bool extended_domain) {
    const auto ys = grid.ys();
    DistanceReport rep;
    rep.axis = axis;
    rep.extended_domain = extended_domain;
    rep.residuals.assign(ys.size(), {});
    parallel_for(ys.size(), [&](size_t i) {
        const double y = ys[i];
        const cd z = (axis == AxisSign::lower) ? cd(0.0, -y) : cd(0.0, y);
        try {
            const cd da = a->eval(z);
            const cd db = b->eval(z);
            const double r = std::abs(da - db) / (y * y);
            if (!std::isfinite(r)) throw numeric_error("non-finite residual");
            rep.residuals[i] = {y, r};
        } catch (const input_error&) {
            throw;
        } catch (const std::exception& e) {
            throw numeric_error("distance: evaluation failed at y=" + std::to_string(y) + ": " +
                                e.what());
        }
    });
    rep.value = 0;
    rep.argmax_y = ys.front();
    for (const auto& r : rep.residuals) {
        if (r.value > rep.value) {
            rep.value = r.value;
            rep.argmax_y = r.y;
        }
    }
    return rep;
}

DistanceReport distance(const MeasureSpec& a, const MeasureSpec& b, const MetricGrid& grid,
                        AxisSign axis) {
    require_standard(a, "distance");
    require_standard(b, "distance");
    return distance_sources(make_source(a), make_source(b), grid, axis, false);
}

DistanceReport distance(const RGIterate& a, const MeasureSpec& b, const MetricGrid& grid,
                        AxisSign axis) {
    require_standard(a.seed, "distance");
    require_standard(b, "distance");
    return distance_sources(make_source(a), make_source(b), grid, axis, false);
}

DistanceReport distance(const RGIterate& a, const RGIterate& b, const MetricGrid& grid,
                        AxisSign axis) {
    require_standard(a.seed, "distance");
    require_standard(b.seed, "distance");
    return distance_sources(make_source(a), make_source(b), grid, axis, false);
}

double contraction_ratio(const MeasureSpec& a, const MeasureSpec& b, const MetricGrid& grid) {
    require_standard(a, "contraction_ratio");
    require_standard(b, "contraction_ratio");
    const double d0 = distance(a, b, grid).value;
    if (d0 <= 1e-15)
        throw input_error("contraction_ratio: undefined ratio, the laws coincide (distance 0)");
    const auto ta = renormalize_T(RGIterate::make(a));
    const auto tb = renormalize_T(RGIterate::make(b));
    const double d1 = distance(ta, tb, grid).value;
    return d1 / d0;
}

std::pair<double, double> ideality_check(const MeasureSpec& a, const MeasureSpec& b, double lambda,
                                         const MetricGrid& grid) {
    if (!(lambda > 0 && lambda <= 1))
        throw input_error("ideality_check: lambda must lie in (0,1]");
    require_standard(a, "ideality_check");
    require_standard(b, "ideality_check");
    const double d = distance(a, b, grid).value;
    const double lhs =
        distance_sources(make_source(dilate(a, lambda)), make_source(dilate(b, lambda)), grid,
                         AxisSign::lower, /*extended=*/lambda != 1.0)
            .value;
    const double bound = lambda * lambda * lambda * d;
    if (lhs > bound + 1e-9)
        throw numeric_error("ideality violated: lhs=" + std::to_string(lhs) + " > bound=" +
                            std::to_string(bound));
    return {lhs, bound};
}

std::pair<double, double> subadditivity_check(const MeasureSpec& a, const MeasureSpec& a2,
                                              const MeasureSpec& b, const MeasureSpec& b2,
                                              const MetricGrid& grid) {
    for (const auto* m : {&a, &a2, &b, &b2}) require_standard(*m, "subadditivity_check");
    const double rhs = distance(a, b, grid).value + distance(a2, b2, grid).value;
    const double lhs = distance_sources(sum_source({make_source(a), make_source(a2)}),
                                        sum_source({make_source(b), make_source(b2)}), grid,
                                        AxisSign::lower, /*extended=*/true)
                           .value;
    if (lhs > rhs + 1e-9)
        throw numeric_error("subadditivity violated: lhs=" + std::to_string(lhs) + " > rhs=" +
                            std::to_string(rhs));
    return {lhs, rhs};
}

std::pair<double, double> clt_bound_check(const MeasureSpec& mu, int n, const MetricGrid& grid) {
    if (n < 1) throw input_error("clt_bound_check: n must be >= 1");
    require_standard(mu, "clt_bound_check");
    const auto rho = MeasureSpec::semicircle(1.0);
    const double d = distance(mu, rho, grid).value;
    const double c = std::sqrt(static_cast<double>(n));
    const double lhs =
        distance_sources(scaled_source(make_source(mu), c, 1.0 / c), make_source(rho), grid).value;
    const double bound = d / c;
    if (lhs > bound + 1e-9)
        throw numeric_error("free-CLT bound violated: lhs=" + std::to_string(lhs) + " > bound=" +
                            std::to_string(bound));
    return {lhs, bound};
}

} // namespace freerg
