#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbm/quadrature.hpp"

namespace sbm {

// Laplace exponent phi(lambda) = drift*lambda + int (1 - e^{-lambda t}) mu(t) dt
// of a subordinator with unit drift and a completely monotone jump density
// mu. The built-in families are analytically completely monotone; grid-based
// property tests check the decreasing/convex proxy.
struct BernsteinFunction {
    double drift = 1.0;
    // Jump density mu(t), t > 0. Empty (mu == nullptr) means mu == 0.
    std::function<double(double)> levy_density;
    // Exact psi(lambda) when known; quadrature stays available either way.
    std::function<double(double)> closed_form_psi;
    std::string name = "custom";

    bool has_jumps() const { return static_cast<bool>(levy_density); }
    double mu(double t) const { return levy_density ? levy_density(t) : 0.0; }
};

struct GrowthViolation : std::runtime_error {
    double offending_r;
    GrowthViolation(const std::string& msg, double r)
        : std::runtime_error(msg), offending_r(r) {}
};

struct DivergentLevyMass : std::runtime_error {
    // "0" or "inf": the endpoint where the (1 ^ t) mu(t) integral diverges.
    std::string endpoint;
    DivergentLevyMass(const std::string& msg, std::string ep)
        : std::runtime_error(msg), endpoint(std::move(ep)) {}
};

// Built-in families.
// stable: phi(lambda) = lambda + a^alpha lambda^{alpha/2},
//         mu(t) = a^alpha (alpha/2)/Gamma(1-alpha/2) t^{-1-alpha/2}.
BernsteinFunction make_stable(double alpha, double a = 1.0);
// gamma:  mu(t) = t^{-1} e^{-t}, psi(lambda) = log(1+lambda).
BernsteinFunction make_gamma();
// pure_bm: mu == 0 (baseline only; excluded from kernel-condition claims).
BernsteinFunction make_pure_bm();
// Sum of jump parts (drift stays 1).
BernsteinFunction make_sum(const std::vector<BernsteinFunction>& parts);

// Parse a family spec string: "stable:alpha=0.5,a=1", "gamma", "pure_bm",
// "sum:[stable:alpha=1,a=1;gamma]". Throws std::invalid_argument.
BernsteinFunction parse_bernstein(const std::string& spec);

// phi(lambda) by adaptive quadrature with splits at t = 1/lambda and t = 1.
// Throws QuadratureError when refinement stalls.
double phi_eval(const BernsteinFunction& f, double lambda);

// psi only (the integral part), same quadrature path.
double psi_eval_quadrature(const BernsteinFunction& f, double lambda);

// sup over a log grid on (K*1e-6, K) of mu(r)/mu(2r). Throws GrowthViolation
// if mu(2r) == 0 while mu(r) > 0.
double check_growth_condition(const BernsteinFunction& f, double K,
                              int grid_size = 200);

// int_0^inf (1 ^ t) mu(t) dt. Throws DivergentLevyMass when the integral
// fails to converge at an endpoint.
double levy_tail_mass(const BernsteinFunction& f);

}  // namespace sbm
