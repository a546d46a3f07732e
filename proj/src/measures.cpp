#include "freerg/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace freerg {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kGridMassTol = 1e-6;

Int binom(int n, int k) {
    Int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void validate_atoms(const std::vector<Atom>& atoms) {
    if (atoms.empty()) throw input_error("atomic measure needs at least one atom");
    double sum = 0;
    for (const auto& a : atoms) {
        if (!(a.w > 0)) throw input_error("atomic weights must be positive");
        sum += a.w;
    }
    if (std::abs(sum - 1.0) > kWeightTol)
        throw input_error("atomic weights must sum to 1 within 1e-12 (got " + std::to_string(sum) + ")");
}

void validate_grid(const GridDensity& g) {
    if (g.xs.size() != g.fs.size() || g.xs.size() < 2)
        throw input_error("grid density needs matching xs/fs with >= 2 points");
    for (size_t i = 1; i < g.xs.size(); ++i)
        if (!(g.xs[i] > g.xs[i - 1])) throw input_error("grid xs must be strictly increasing");
    for (double f : g.fs)
        if (f < 0 || !std::isfinite(f)) throw input_error("grid density values must be finite and >= 0");
    double mass = grid_mass(g);
    if (std::abs(mass - 1.0) > kGridMassTol)
        throw input_error("grid density must integrate to 1 within 1e-6 (got " + std::to_string(mass) + ")");
}

// Exact atoms for BernoulliStd(p) when sqrt(q/p) is rational.
std::optional<std::pair<Rat, Rat>> bernoulli_exact_atoms(const BernoulliStd& b) {
    if (!b.p_r) return std::nullopt;
    Rat p = *b.p_r, q = Rat(1) - p;
    auto s = rat_sqrt(q / p);
    if (!s) return std::nullopt;
    return std::make_pair(*s, -Rat(1) / *s); // x1 = sqrt(q/p), x2 = -sqrt(p/q) = -1/x1
}

} // namespace

MeasureSpec MeasureSpec::atomic(std::vector<Atom> atoms) {
    validate_atoms(atoms);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    return MeasureSpec{Atomic{std::move(atoms)}};
}

MeasureSpec MeasureSpec::semicircle(double sigma) {
    if (!(sigma > 0)) throw input_error("semicircle sigma must be positive");
    return MeasureSpec{Semicircle{sigma, rat_from_double(sigma)}};
}

MeasureSpec MeasureSpec::arcsine(double halfwidth) {
    if (!(halfwidth > 0)) throw input_error("arcsine halfwidth must be positive");
    return MeasureSpec{Arcsine{halfwidth, rat_from_double(halfwidth)}};
}

MeasureSpec MeasureSpec::bernoulli_std(double p) {
    if (!(p > 0 && p < 1)) throw input_error("bernoulli_std p must lie in (0,1)");
    return MeasureSpec{BernoulliStd{p, rat_from_double(p)}};
}

MeasureSpec MeasureSpec::bernoulli_std(const Rat& p) {
    if (!(p > 0 && p < 1)) throw input_error("bernoulli_std p must lie in (0,1)");
    return MeasureSpec{BernoulliStd{rat_to_double(p), p}};
}

MeasureSpec MeasureSpec::grid(GridDensity g) {
    validate_grid(g);
    return MeasureSpec{std::move(g)};
}

MeasureSpec MeasureSpec::rademacher() {
    return atomic({Atom{-1.0, 0.5, Rat(-1), Rat(1, 2)}, Atom{1.0, 0.5, Rat(1), Rat(1, 2)}});
}

double grid_mass(const GridDensity& g) { return grid_moment(g, 0); }

double grid_moment(const GridDensity& g, int k) {
    double acc = 0;
    for (size_t i = 0; i + 1 < g.xs.size(); ++i) {
        double h = g.xs[i + 1] - g.xs[i];
        double a = g.fs[i] * std::pow(g.xs[i], k);
        double b = g.fs[i + 1] * std::pow(g.xs[i + 1], k);
        acc += 0.5 * h * (a + b);
    }
    return acc;
}

double moment(const MeasureSpec& mu, int k) {
    if (k < 0) throw input_error("moment order must be >= 0");
    if (k == 0) return 1.0;
    return std::visit(
        [k](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                double acc = 0;
                for (const auto& a : m.atoms) acc += a.w * std::pow(a.x, k);
                return acc;
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                if (k % 2) return 0.0;
                return catalan(k / 2).convert_to<double>() * std::pow(m.sigma, k);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                if (k % 2) return 0.0;
                return binom(k, k / 2).convert_to<double>() * std::pow(m.halfwidth / 2, k);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                double q = 1 - m.p;
                double x1 = std::sqrt(q / m.p), x2 = -std::sqrt(m.p / q);
                return m.p * std::pow(x1, k) + q * std::pow(x2, k);
            } else {
                return grid_moment(m, k);
            }
        },
        mu.v);
}

std::optional<Rat> moment_exact(const MeasureSpec& mu, int k) {
    if (k < 0) throw input_error("moment order must be >= 0");
    if (k == 0) return Rat(1);
    return std::visit(
        [k](const auto& m) -> std::optional<Rat> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                Rat acc(0);
                for (const auto& a : m.atoms) {
                    if (!a.xr || !a.wr) return std::nullopt;
                    acc += *a.wr * rat_pow(*a.xr, k);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                if (!m.sigma_r) return std::nullopt;
                if (k % 2) return Rat(0);
                return Rat(catalan(k / 2)) * rat_pow(*m.sigma_r, k);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                if (!m.halfwidth_r) return std::nullopt;
                if (k % 2) return Rat(0);
                return Rat(binom(k, k / 2)) * rat_pow(*m.halfwidth_r / 2, k);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                auto atoms = bernoulli_exact_atoms(m);
                if (!atoms) return std::nullopt;
                Rat p = *m.p_r, q = Rat(1) - p;
                return p * rat_pow(atoms->first, k) + q * rat_pow(atoms->second, k);
            } else {
                return std::nullopt;
            }
        },
        mu.v);
}

MeasureSpec standardize(const MeasureSpec& mu) {
    double m1 = moment(mu, 1);
    double var = moment(mu, 2) - m1 * m1;
    if (!(var > 1e-300)) throw input_error("standardize: degenerate measure (zero variance)");
    double s = std::sqrt(var);
    return std::visit(
        [&](const auto& m) -> MeasureSpec {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                // exact affine map when the atom data and sqrt(var) are rational
                std::optional<Rat> m1r, sr;
                auto em1 = moment_exact(mu, 1), em2 = moment_exact(mu, 2);
                if (em1 && em2) {
                    m1r = *em1;
                    sr = rat_sqrt(*em2 - *em1 * *em1);
                }
                std::vector<Atom> atoms;
                for (const auto& a : m.atoms) {
                    Atom na;
                    na.x = (a.x - m1) / s;
                    na.w = a.w;
                    na.wr = a.wr;
                    if (a.xr && m1r && sr) na.xr = (*a.xr - *m1r) / *sr;
                    atoms.push_back(na);
                }
                return MeasureSpec::atomic(std::move(atoms));
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                return MeasureSpec::semicircle(1.0);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                return MeasureSpec::arcsine(std::numbers::sqrt2);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                return MeasureSpec{m}; // already centered and reduced
            } else {
                GridDensity g;
                g.xs.reserve(m.xs.size());
                g.fs.reserve(m.fs.size());
                for (size_t i = 0; i < m.xs.size(); ++i) {
                    g.xs.push_back((m.xs[i] - m1) / s);
                    g.fs.push_back(m.fs[i] * s);
                }
                return MeasureSpec::grid(std::move(g));
            }
        },
        mu.v);
}

MeasureSpec dilate(const MeasureSpec& mu, double lambda) {
    if (!(lambda > 0)) throw input_error("dilate: lambda must be positive");
    if (lambda == 1.0) return mu;
    auto lr = rat_from_double(lambda);
    return std::visit(
        [&](const auto& m) -> MeasureSpec {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                std::vector<Atom> atoms;
                for (const auto& a : m.atoms) {
                    Atom na;
                    na.x = lambda * a.x;
                    na.w = a.w;
                    na.wr = a.wr;
                    if (a.xr && lr) na.xr = *a.xr * *lr;
                    atoms.push_back(na);
                }
                return MeasureSpec::atomic(std::move(atoms));
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                return MeasureSpec::semicircle(lambda * m.sigma);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                return MeasureSpec::arcsine(lambda * m.halfwidth);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                double q = 1 - m.p;
                double x1 = std::sqrt(q / m.p), x2 = -std::sqrt(m.p / q);
                std::vector<Atom> atoms{Atom{lambda * x2, q, {}, {}}, Atom{lambda * x1, m.p, {}, {}}};
                if (auto ex = bernoulli_exact_atoms(m); ex && lr) {
                    atoms[0].xr = ex->second * *lr;
                    atoms[0].wr = Rat(1) - *m.p_r;
                    atoms[1].xr = ex->first * *lr;
                    atoms[1].wr = *m.p_r;
                }
                return MeasureSpec::atomic(std::move(atoms));
            } else {
                GridDensity g;
                g.xs.reserve(m.xs.size());
                g.fs.reserve(m.fs.size());
                for (size_t i = 0; i < m.xs.size(); ++i) {
                    g.xs.push_back(lambda * m.xs[i]);
                    g.fs.push_back(m.fs[i] / lambda);
                }
                return MeasureSpec::grid(std::move(g));
            }
        },
        mu.v);
}

Q3Certificate q3_check(const MeasureSpec& mu) {
    Q3Certificate c;
    c.mean = moment(mu, 1);
    c.variance = moment(mu, 2) - c.mean * c.mean;
    c.third_abs_moment = std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                double acc = 0;
                for (const auto& a : m.atoms) acc += a.w * std::abs(a.x * a.x * a.x);
                return acc;
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                return std::pow(m.sigma, 3) * 64.0 / (15.0 * std::numbers::pi);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                return 4.0 * std::pow(m.halfwidth, 3) / (3.0 * std::numbers::pi);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                double q = 1 - m.p;
                double x1 = std::sqrt(q / m.p), x2 = std::sqrt(m.p / q);
                return m.p * x1 * x1 * x1 + q * x2 * x2 * x2;
            } else {
                double acc = 0;
                for (size_t i = 0; i + 1 < m.xs.size(); ++i) {
                    double h = m.xs[i + 1] - m.xs[i];
                    acc += 0.5 * h *
                           (m.fs[i] * std::abs(std::pow(m.xs[i], 3)) +
                            m.fs[i + 1] * std::abs(std::pow(m.xs[i + 1], 3)));
                }
                return acc;
            }
        },
        mu.v);
    c.is_member = std::abs(c.mean) <= 1e-10 && std::abs(c.variance - 1.0) <= 1e-10 &&
                  std::isfinite(c.third_abs_moment);
    return c;
}

std::optional<std::vector<Rat>> cumulants_exact(const MeasureSpec& mu, int K) {
    std::vector<Rat> m;
    m.reserve(K);
    for (int k = 1; k <= K; ++k) {
        auto mk = moment_exact(mu, k);
        if (!mk) return std::nullopt;
        m.push_back(*mk);
    }
    return cumulants_from_moments(m);
}

std::vector<double> cumulants_double(const MeasureSpec& mu, int K) {
    if (auto exact = cumulants_exact(mu, K)) {
        std::vector<double> out;
        out.reserve(K);
        for (const auto& r : *exact) out.push_back(rat_to_double(r));
        return out;
    }
    std::vector<double> m;
    m.reserve(K);
    for (int k = 1; k <= K; ++k) m.push_back(moment(mu, k));
    return cumulants_from_moments(m);
}

namespace {

struct NumIn {
    double d = 0;
    std::optional<Rat> r;
};

NumIn parse_num(const nlohmann::json& j, const std::string& what) {
    NumIn n;
    if (j.is_string()) {
        n.r = parse_rational(j.get<std::string>());
        n.d = rat_to_double(*n.r);
    } else if (j.is_number()) {
        n.d = j.get<double>();
        n.r = rat_from_double(n.d);
    } else {
        throw input_error(what + ": expected a number or a \"p/q\" string");
    }
    return n;
}

nlohmann::json num_out(double d, const std::optional<Rat>& r) {
    if (r) return format_rational(*r);
    return d;
}

} // namespace

MeasureSpec measure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw input_error("measure spec: expected an object with a \"type\" string");
    std::string type = j["type"].get<std::string>();
    if (type == "atomic") {
        if (!j.contains("positions") || !j.contains("weights"))
            throw input_error("atomic spec needs \"positions\" and \"weights\" arrays");
        const auto& ps = j["positions"];
        const auto& ws = j["weights"];
        if (!ps.is_array() || !ws.is_array() || ps.size() != ws.size())
            throw input_error("atomic positions/weights must be arrays of equal length");
        std::vector<Atom> atoms;
        for (size_t i = 0; i < ps.size(); ++i) {
            NumIn x = parse_num(ps[i], "position"), w = parse_num(ws[i], "weight");
            atoms.push_back(Atom{x.d, w.d, x.r, w.r});
        }
        return MeasureSpec::atomic(std::move(atoms));
    }
    if (type == "semicircle") {
        if (!j.contains("sigma")) return MeasureSpec::semicircle(1.0);
        NumIn s = parse_num(j["sigma"], "sigma");
        auto mu = MeasureSpec::semicircle(s.d);
        std::get<Semicircle>(mu.v).sigma_r = s.r;
        return mu;
    }
    if (type == "arcsine") {
        if (!j.contains("halfwidth")) return MeasureSpec::arcsine(2.0);
        NumIn a = parse_num(j["halfwidth"], "halfwidth");
        auto mu = MeasureSpec::arcsine(a.d);
        std::get<Arcsine>(mu.v).halfwidth_r = a.r;
        return mu;
    }
    if (type == "bernoulli_std") {
        if (!j.contains("p")) throw input_error("bernoulli_std spec needs \"p\"");
        NumIn p = parse_num(j["p"], "p");
        if (p.r) return MeasureSpec::bernoulli_std(*p.r);
        return MeasureSpec::bernoulli_std(p.d);
    }
    if (type == "grid") {
        if (!j.contains("xs") || !j.contains("fs"))
            throw input_error("grid spec needs \"xs\" and \"fs\" arrays");
        GridDensity g;
        for (const auto& x : j["xs"]) g.xs.push_back(x.get<double>());
        for (const auto& f : j["fs"]) g.fs.push_back(f.get<double>());
        return MeasureSpec::grid(std::move(g));
    }
    throw input_error("unknown measure type '" + type +
                      "' (expected atomic|semicircle|arcsine|bernoulli_std|grid)");
}

nlohmann::json measure_to_json(const MeasureSpec& mu) {
    return std::visit(
        [](const auto& m) -> nlohmann::json {
            using T = std::decay_t<decltype(m)>;
            nlohmann::json j;
            if constexpr (std::is_same_v<T, Atomic>) {
                j["type"] = "atomic";
                for (const auto& a : m.atoms) {
                    j["positions"].push_back(num_out(a.x, a.xr));
                    j["weights"].push_back(num_out(a.w, a.wr));
                }
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                j["type"] = "semicircle";
                j["sigma"] = num_out(m.sigma, m.sigma_r);
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                j["type"] = "arcsine";
                j["halfwidth"] = num_out(m.halfwidth, m.halfwidth_r);
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                j["type"] = "bernoulli_std";
                j["p"] = num_out(m.p, m.p_r);
            } else {
                j["type"] = "grid";
                j["xs"] = m.xs;
                j["fs"] = m.fs;
            }
            return j;
        },
        mu.v);
}

MeasureSpec measure_from_arg(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        if (!in) throw input_error("cannot open measure file '" + arg + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw input_error("malformed JSON in '" + arg + "': " + e.what());
        }
        return measure_from_json(j);
    }
    std::string name = arg, param;
    if (auto colon = arg.find(':'); colon != std::string::npos) {
        name = arg.substr(0, colon);
        param = arg.substr(colon + 1);
    }
    if (name == "rademacher") return MeasureSpec::rademacher();
    if (name == "semicircle")
        return param.empty() ? MeasureSpec::semicircle(1.0)
                             : MeasureSpec::semicircle(rat_to_double(parse_rational(param)));
    if (name == "arcsine")
        return param.empty() ? MeasureSpec::arcsine(2.0)
                             : MeasureSpec::arcsine(rat_to_double(parse_rational(param)));
    if (name == "bernoulli_std") {
        if (param.empty()) throw input_error("bernoulli_std alias needs a parameter, e.g. bernoulli_std:1/4");
        return MeasureSpec::bernoulli_std(parse_rational(param));
    }
    throw input_error("'" + arg +
                      "' is neither a file nor a builtin measure "
                      "(rademacher | semicircle[:sigma] | arcsine[:halfwidth] | bernoulli_std:p)");
}

std::string measure_name(const MeasureSpec& mu) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Atomic>) {
                if (m.atoms.size() <= 4) {
                    std::string s = "atomic(";
                    for (size_t i = 0; i < m.atoms.size(); ++i) {
                        if (i) s += ", ";
                        char buf[48];
                        std::snprintf(buf, sizeof(buf), "%g:%g", m.atoms[i].x, m.atoms[i].w);
                        s += buf;
                    }
                    return s + ")";
                }
                return "atomic(" + std::to_string(m.atoms.size()) + " atoms)";
            } else if constexpr (std::is_same_v<T, Semicircle>) {
                return "semicircle(sigma=" + std::to_string(m.sigma) + ")";
            } else if constexpr (std::is_same_v<T, Arcsine>) {
                return "arcsine(halfwidth=" + std::to_string(m.halfwidth) + ")";
            } else if constexpr (std::is_same_v<T, BernoulliStd>) {
                return "bernoulli_std(p=" + std::to_string(m.p) + ")";
            } else {
                return "grid(" + std::to_string(m.xs.size()) + " points)";
            }
        },
        mu.v);
}

} // namespace freerg
