#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "freerg/nc_calculus.hpp"
#include "freerg/rational.hpp"

namespace freerg {

// One atom; exact rational position/weight kept alongside the double when the
// input allows it (drives the exact cumulant paths).
struct Atom {
    double x = 0;
    double w = 0;
    std::optional<Rat> xr;
    std::optional<Rat> wr;
};

struct Atomic {
    std::vector<Atom> atoms; // weights positive, sum to 1 within 1e-12
};

// density (1/(2 pi sigma^2)) sqrt((4 sigma^2 - x^2)_+); sigma=1 is the
// standard semicircle (variance 1, even moments Catalan).
struct Semicircle {
    double sigma = 1;
    std::optional<Rat> sigma_r;
};

// density 1/(pi sqrt(a^2 - x^2)) on (-a, a); variance a^2/2.
struct Arcsine {
    double halfwidth = 2;
    std::optional<Rat> halfwidth_r;
};

// atoms sqrt(q/p) w.p. p and -sqrt(p/q) w.p. q=1-p; mean 0, variance 1.
struct BernoulliStd {
    double p = 0.5;
    std::optional<Rat> p_r;
};

// Sampled density on a sorted grid. As a raw container (e.g. Stieltjes
// inversion output) it carries whatever mass the data has; wrapped into a
// MeasureSpec it must integrate to 1 within 1e-6 (trapezoid).
struct GridDensity {
    std::vector<double> xs;
    std::vector<double> fs;
};

struct MeasureSpec {
    std::variant<Atomic, Semicircle, Arcsine, BernoulliStd, GridDensity> v;

    static MeasureSpec atomic(std::vector<Atom> atoms);
    static MeasureSpec semicircle(double sigma = 1);
    static MeasureSpec arcsine(double halfwidth = 2);
    static MeasureSpec bernoulli_std(double p);
    static MeasureSpec bernoulli_std(const Rat& p);
    static MeasureSpec grid(GridDensity g); // validates mass within 1e-6
    static MeasureSpec rademacher();        // atoms +-1, weights 1/2
};

struct Q3Certificate {
    double mean = 0;
    double variance = 0;
    double third_abs_moment = 0;
    bool is_member = false; // |mean|<=1e-10, |var-1|<=1e-10, finite third
};

double moment(const MeasureSpec& mu, int k);
std::optional<Rat> moment_exact(const MeasureSpec& mu, int k);

MeasureSpec standardize(const MeasureSpec& mu);           // mean 0, variance 1
MeasureSpec dilate(const MeasureSpec& mu, double lambda); // x -> lambda x
Q3Certificate q3_check(const MeasureSpec& mu);

double grid_mass(const GridDensity& g); // trapezoid integral
double grid_moment(const GridDensity& g, int k);

// Free cumulants of mu up to order K. The exact path needs rational moments
// (rational atoms / parameters); the double path always works.
std::optional<std::vector<Rat>> cumulants_exact(const MeasureSpec& mu, int K);
std::vector<double> cumulants_double(const MeasureSpec& mu, int K);

// JSON schema: {"type": "atomic"|"semicircle"|"arcsine"|"bernoulli_std"|"grid", ...}
// Numeric fields accept JSON numbers or exact-rational strings "p/q".
MeasureSpec measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const MeasureSpec& mu);

// Path to a JSON file, or a builtin alias: "rademacher", "semicircle[:sigma]",
// "arcsine[:halfwidth]", "bernoulli_std:p".
MeasureSpec measure_from_arg(const std::string& arg);

std::string measure_name(const MeasureSpec& mu);

} // namespace freerg
