#include "sbm/bernstein.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace sbm {

namespace {

std::map<std::string, double> parse_kv(const std::string& s) {
    std::map<std::string, double> kv;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad parameter '" + item + "'");
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return kv;
}

}  // namespace

BernsteinFunction make_stable(double alpha, double a) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("stable: alpha must be in (0,2)");
    if (!(a > 0.0)) throw std::invalid_argument("stable: a must be positive");
    const double beta = 0.5 * alpha;
    const double coef = std::pow(a, alpha) * beta / std::tgamma(1.0 - beta);
    BernsteinFunction f;
    f.levy_density = [coef, beta](double t) {
        return coef * std::pow(t, -1.0 - beta);
    };
    f.closed_form_psi = [alpha, a](double lam) {
        return std::pow(a, alpha) * std::pow(lam, 0.5 * alpha);
    };
    std::ostringstream nm;
    nm << "stable(alpha=" << alpha << ",a=" << a << ")";
    f.name = nm.str();
    return f;
}

BernsteinFunction make_gamma() {
    BernsteinFunction f;
    f.levy_density = [](double t) { return std::exp(-t) / t; };
    f.closed_form_psi = [](double lam) { return std::log1p(lam); };
    f.name = "gamma";
    return f;
}

BernsteinFunction make_pure_bm() {
    BernsteinFunction f;
    f.name = "pure_bm";
    return f;
}

BernsteinFunction make_sum(const std::vector<BernsteinFunction>& parts) {
    BernsteinFunction f;
    std::vector<std::function<double(double)>> mus, psis;
    bool all_closed = true;
    std::string nm = "sum[";
    for (const auto& p : parts) {
        if (p.levy_density) mus.push_back(p.levy_density);
        if (p.closed_form_psi)
            psis.push_back(p.closed_form_psi);
        else if (p.has_jumps())
            all_closed = false;
        nm += p.name + ";";
    }
    nm += "]";
    if (!mus.empty())
        f.levy_density = [mus](double t) {
            double s = 0.0;
            for (const auto& m : mus) s += m(t);
            return s;
        };
    if (all_closed && !psis.empty())
        f.closed_form_psi = [psis](double lam) {
            double s = 0.0;
            for (const auto& p : psis) s += p(lam);
            return s;
        };
    f.name = nm;
    return f;
}

BernsteinFunction parse_bernstein(const std::string& spec) {
    if (spec == "pure_bm") return make_pure_bm();
    if (spec == "gamma") return make_gamma();
    if (spec.rfind("stable:", 0) == 0) {
        auto kv = parse_kv(spec.substr(7));
        const double alpha = kv.count("alpha") ? kv["alpha"] : 1.0;
        const double a = kv.count("a") ? kv["a"] : 1.0;
        return make_stable(alpha, a);
    }
    if (spec.rfind("sum:[", 0) == 0 && spec.back() == ']') {
        std::string inner = spec.substr(5, spec.size() - 6);
        std::vector<BernsteinFunction> parts;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ';'))
            if (!item.empty()) parts.push_back(parse_bernstein(item));
        if (parts.empty())
            throw std::invalid_argument("sum: needs at least one component");
        return make_sum(parts);
    }
    throw std::invalid_argument("unknown kernel family spec '" + spec + "'");
}

double psi_eval_quadrature(const BernsteinFunction& f, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("psi: lambda must be > 0");
    if (!f.has_jumps()) return 0.0;
    auto integrand = [&](double t) {
        return -std::expm1(-lambda * t) * f.mu(t);
    };
    QuadResult q = integrate_gk_log_axis(integrand, {1.0 / lambda, 1.0});
    if (!q.converged)
        throw QuadratureError("psi quadrature did not converge", q);
    return q.value;
}

double phi_eval(const BernsteinFunction& f, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("phi: lambda must be > 0");
    return f.drift * lambda + psi_eval_quadrature(f, lambda);
}

double check_growth_condition(const BernsteinFunction& f, double K,
                              int grid_size) {
    if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
    if (!f.has_jumps()) return 1.0;
    const double lo = std::log(K * 1e-6);
    const double hi = std::log(K);
    double sup = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        // Inclusive endpoints; the sup is often approached at r -> K.
        const double r = std::exp(lo + (hi - lo) * i / (grid_size - 1.0));
        const double num = f.mu(r);
        const double den = f.mu(2.0 * r);
        if (den <= 0.0) {
            if (num > 0.0)
                throw GrowthViolation("mu(2r)=0 with mu(r)>0 at r=" +
                                          std::to_string(r),
                                      r);
            continue;
        }
        sup = std::max(sup, num / den);
    }
    return sup;
}

namespace {

// Sum of integral octaves toward an endpoint, with geometric extrapolation
// of the remainder. A ratio that refuses to drop below 1 is the divergence
// signal (monotone densities give clean geometric octave decay).
double octave_sum_or_throw(const std::function<double(int)>& octave,
                           const std::string& endpoint) {
    double total = 0.0;
    double prev = -1.0;
    for (int k = 0; k < 280; ++k) {
        const double piece = octave(k);
        if (!std::isfinite(piece))
            throw DivergentLevyMass(
                "int (1^t) mu(t) dt diverges at the endpoint " + endpoint,
                endpoint);
        total += piece;
        if (piece <= 1e-13 * std::max(total, 1e-300)) return total;
        if (prev > 0.0 && k >= 8) {
            const double ratio = piece / prev;
            if (ratio < 0.9) {
                // Stable geometric decay; extrapolate once it is resolved.
                if (piece <= 1e-12 * total / (1.0 - ratio)) {
                    return total + piece * ratio / (1.0 - ratio);
                }
            }
        }
        prev = piece;
    }
    throw DivergentLevyMass(
        "int (1^t) mu(t) dt diverges at the endpoint " + endpoint, endpoint);
}

}  // namespace

double levy_tail_mass(const BernsteinFunction& f) {
    if (!f.has_jumps()) return 0.0;
    const double near = octave_sum_or_throw(
        [&](int k) {
            return integrate_gk(
                       [&](double t) { return t * f.mu(t); },
                       std::exp(-static_cast<double>(k + 1)),
                       std::exp(-static_cast<double>(k)))
                .value;
        },
        "0");
    const double far = octave_sum_or_throw(
        [&](int k) {
            return integrate_gk([&](double t) { return f.mu(t); },
                                std::exp(static_cast<double>(k)),
                                std::exp(static_cast<double>(k + 1)))
                .value;
        },
        "inf");
    return near + far;
}

}  // namespace sbm
