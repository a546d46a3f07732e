#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freerg/metric.hpp"

using namespace freerg;

namespace {

MetricGrid coarse() { return MetricGrid{1e-4, 0.25, 200}; }

std::vector<MeasureSpec> standard_laws() {
    return {MeasureSpec::semicircle(), MeasureSpec::rademacher(), MeasureSpec::bernoulli_std(0.25)};
}

} // namespace

TEST_CASE("metric grid") {
    auto ys = coarse().ys();
    REQUIRE(ys.size() == 200);
    CHECK(ys.front() == doctest::Approx(1e-4));
    CHECK(ys.back() == 0.25); // exact endpoint
    for (size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] > ys[i - 1]);
    // geometric spacing: constant ratio
    double r0 = ys[1] / ys[0], r1 = ys[100] / ys[99];
    CHECK(r0 == doctest::Approx(r1).epsilon(1e-10));

    CHECK_THROWS_AS((MetricGrid{0.0, 0.25, 10}.ys()), input_error);
    CHECK_THROWS_AS((MetricGrid{1e-4, 0.3, 10}.ys()), input_error);
    CHECK_THROWS_AS((MetricGrid{1e-4, 0.25, 1}.ys()), input_error);
    CHECK_THROWS_AS((MetricGrid{0.2, 0.1, 10}.ys()), input_error);
}

TEST_CASE("distance between rademacher and the semicircle") {
    auto rep = distance(MeasureSpec::rademacher(), MeasureSpec::semicircle(), coarse());
    // exact value 28 - 16 sqrt(3), attained at the y = 1/4 endpoint
    CHECK(rep.value == doctest::Approx(0.2871870788979633).epsilon(1e-10));
    CHECK(rep.argmax_y == doctest::Approx(0.25));
    CHECK_FALSE(rep.extended_domain);
    CHECK(rep.axis == AxisSign::lower);
    REQUIRE(rep.residuals.size() == 200);
    // residual curve is monotone increasing in y for this pair
    for (size_t i = 1; i < rep.residuals.size(); ++i)
        CHECK(rep.residuals[i].value >= rep.residuals[i - 1].value - 1e-12);
    // finite all the way down to y_min
    CHECK(std::isfinite(rep.residuals.front().value));
}

TEST_CASE("metric axioms on the standard laws") {
    auto laws = standard_laws();
    auto g = coarse();
    // identity of indiscernibles (within numerics) and symmetry
    for (const auto& mu : laws) {
        CHECK(distance(mu, mu, g).value <= 1e-12);
    }
    for (size_t i = 0; i < laws.size(); ++i)
        for (size_t j = i + 1; j < laws.size(); ++j) {
            double dij = distance(laws[i], laws[j], g).value;
            double dji = distance(laws[j], laws[i], g).value;
            CHECK(dij == doctest::Approx(dji).epsilon(1e-12));
            CHECK(dij > 1e-6); // distinct laws are separated
        }
    // triangle inequality, including an RG iterate as one vertex
    auto t_rad = renormalize_T(RGIterate::make(MeasureSpec::rademacher(), 8));
    std::vector<double> to_t;
    for (const auto& mu : laws) to_t.push_back(distance(t_rad, mu, g).value);
    for (size_t i = 0; i < laws.size(); ++i)
        for (size_t j = 0; j < laws.size(); ++j) {
            if (i == j) continue;
            double dij = distance(laws[i], laws[j], g).value;
            for (size_t k = 0; k < laws.size(); ++k) {
                if (k == i || k == j) continue;
                double dik = distance(laws[i], laws[k], g).value;
                double dkj = distance(laws[k], laws[j], g).value;
                CHECK(dij <= dik + dkj + 1e-10);
            }
            CHECK(dij <= to_t[i] + to_t[j] + 1e-10); // detour through T rad
        }
}

TEST_CASE("distance requires the standardized class") {
    auto g = coarse();
    CHECK_THROWS_AS(distance(MeasureSpec::semicircle(2.0), MeasureSpec::semicircle(), g),
                    input_error);
    CHECK_THROWS_AS(distance(MeasureSpec::semicircle(), MeasureSpec::arcsine(2.0), g), input_error);
}

TEST_CASE("distance upper axis option") {
    auto rep = distance(MeasureSpec::rademacher(), MeasureSpec::semicircle(), coarse(),
                        AxisSign::upper);
    // symmetric laws: same value on the mirrored axis
    CHECK(rep.value == doctest::Approx(0.2871870788979633).epsilon(1e-9));
    CHECK(rep.axis == AxisSign::upper);
}

TEST_CASE("grid refinement changes the distance by less than 1e-6") {
    auto a = MeasureSpec::rademacher();
    auto b = MeasureSpec::semicircle();
    double d1 = distance(a, b, MetricGrid{1e-4, 0.25, 200}).value;
    double d2 = distance(a, b, MetricGrid{1e-4, 0.25, 800}).value;
    CHECK(std::abs(d1 - d2) < 1e-6);
}

TEST_CASE("contraction: one T step contracts by at least 2^{-1/2}") {
    auto g = coarse();
    double r_rad = contraction_ratio(MeasureSpec::rademacher(), MeasureSpec::semicircle(), g);
    CHECK(r_rad == doctest::Approx(0.4647903268).epsilon(1e-6));
    CHECK(r_rad <= std::pow(2.0, -0.5) + 0.01);

    double r_bern = contraction_ratio(MeasureSpec::bernoulli_std(0.25), MeasureSpec::semicircle(), g);
    CHECK(r_bern == doctest::Approx(0.6763932023).epsilon(1e-6));
    CHECK(r_bern <= std::pow(2.0, -0.5) + 0.01);

    // coinciding laws leave the ratio undefined
    CHECK_THROWS_AS(contraction_ratio(MeasureSpec::semicircle(), MeasureSpec::semicircle(), g),
                    input_error);
}

TEST_CASE("iterated contraction: geometric decay for ten steps") {
    auto g = coarse();
    auto semi = MeasureSpec::semicircle();
    const double c = std::pow(2.0, -0.5) + 0.01;
    for (const auto& seed : {MeasureSpec::rademacher(), MeasureSpec::bernoulli_std(0.25)}) {
        auto it = RGIterate::make(seed, 8);
        double d0 = distance(it, semi, g).value;
        double prev = d0;
        for (int n = 1; n <= 10; ++n) {
            it = renormalize_T(it);
            double dn = distance(it, semi, g).value;
            CHECK(dn <= c * prev + 1e-12);                      // stepwise contraction
            CHECK(dn <= d0 * std::pow(2.0, -n / 2.0) + 1e-9);   // geometric envelope
            prev = dn;
        }
    }
}

TEST_CASE("T fixes the semicircle law") {
    auto g = coarse();
    auto it = renormalize_T(RGIterate::make(MeasureSpec::semicircle(), 8));
    CHECK(distance(it, MeasureSpec::semicircle(), g).value <= 1e-9);
}

TEST_CASE("distance between two RG iterates") {
    auto g = coarse();
    auto a = renormalize_T(RGIterate::make(MeasureSpec::rademacher(), 8));
    auto b = renormalize_T(RGIterate::make(MeasureSpec::bernoulli_std(0.25), 8));
    double dab = distance(a, b, g).value;
    double d_ar = distance(a, MeasureSpec::semicircle(), g).value;
    double d_br = distance(b, MeasureSpec::semicircle(), g).value;
    CHECK(dab > 1e-6);
    CHECK(dab <= d_ar + d_br + 1e-10);
}

TEST_CASE("ideality: dilation shrinks distances at cubic rate") {
    auto g = coarse();
    auto rad = MeasureSpec::rademacher();
    auto semi = MeasureSpec::semicircle();
    for (double lam : {0.3, 0.5, std::pow(2.0, -0.5), 1.0}) {
        auto [lhs, bound] = ideality_check(rad, semi, lam, g);
        CHECK(lhs <= bound + 1e-9);
        if (lam == 1.0) CHECK(lhs == doctest::Approx(bound));
    }
    // frozen spot values
    auto [l3, b3] = ideality_check(rad, semi, 0.3, g);
    CHECK(l3 == doctest::Approx(0.0020481067).epsilon(1e-5));
    CHECK(b3 == doctest::Approx(0.0077540511).epsilon(1e-5));

    CHECK_THROWS_AS(ideality_check(rad, semi, 0.0, g), input_error);
    CHECK_THROWS_AS(ideality_check(rad, semi, 1.2, g), input_error);
    CHECK_THROWS_AS(ideality_check(rad, semi, -0.5, g), input_error);
}

TEST_CASE("subadditivity of the metric under free convolution") {
    auto g = coarse();
    auto rad = MeasureSpec::rademacher();
    auto semi = MeasureSpec::semicircle();
    auto bern = MeasureSpec::bernoulli_std(0.25);
    auto [lhs, rhs] = subadditivity_check(rad, bern, semi, semi, g);
    CHECK(lhs <= rhs + 1e-9);
    CHECK(rhs == doctest::Approx(distance(rad, semi, g).value + distance(bern, semi, g).value)
                     .epsilon(1e-12));
    // same-law pairs give zero on both sides
    auto [l0, r0] = subadditivity_check(semi, semi, semi, semi, g);
    CHECK(l0 <= 1e-12);
    CHECK(r0 <= 1e-12);
}

TEST_CASE("clt bound: the normalized free sum approaches the semicircle") {
    auto g = coarse();
    for (const auto& mu : {MeasureSpec::rademacher(), MeasureSpec::bernoulli_std(0.25)}) {
        for (int n : {1, 2, 3, 4, 8}) {
            auto [lhs, bound] = clt_bound_check(mu, n, g);
            CHECK(lhs <= bound + 1e-9);
        }
    }
    // frozen spot values for the rademacher seed
    auto [l2, b2] = clt_bound_check(MeasureSpec::rademacher(), 2, g);
    CHECK(l2 == doctest::Approx(0.13348181).epsilon(1e-5));
    CHECK(b2 == doctest::Approx(0.20307193).epsilon(1e-5));
    auto [l8, b8] = clt_bound_check(MeasureSpec::rademacher(), 8, g);
    CHECK(l8 == doctest::Approx(0.031748032).epsilon(1e-5));
    CHECK(b8 == doctest::Approx(0.10153597).epsilon(1e-5));

    CHECK_THROWS_AS(clt_bound_check(MeasureSpec::rademacher(), 0, g), input_error);
}

TEST_CASE("composed sources: scaled and summed R evaluators") {
    auto g = coarse();
    auto rad = MeasureSpec::rademacher();
    // scaled_source with s=t=1 is the identity composition
    auto base = make_source(rad);
    auto same = scaled_source(base, 1.0, 1.0);
    auto rep = distance_sources(base, same, g.ys().empty() ? coarse() : coarse());
    CHECK(rep.value <= 1e-14);
    // sum of two half-variance sources reproduces... the convolution cumulants
    // (variance adds: two dilations by 1/sqrt(2) sum to unit variance)
    auto half = scaled_source(base, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    auto summed = sum_source({half, half});
    // law(2^{-1/2} rad (+) 2^{-1/2} rad) = T rad = arcsine(sqrt 2)
    auto arc = make_source(MeasureSpec::arcsine(std::sqrt(2.0)));
    CHECK(distance_sources(summed, arc, coarse(), AxisSign::lower, true).value <= 1e-9);
}
