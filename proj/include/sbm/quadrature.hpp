#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sbm {

// Result of an adaptive integration: value plus an error estimate and a
// convergence flag. Callers that need hard guarantees check `converged`.
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    int subdivisions = 0;
};

struct QuadratureError : std::runtime_error {
    QuadResult partial;
    explicit QuadratureError(const std::string& msg, QuadResult p)
        : std::runtime_error(msg), partial(p) {}
};

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
QuadResult integrate_gk(const Integrand& f, double a, double b,
                        const QuadOptions& opt = {});

// Adaptive GK over [a, inf) via the rational substitution t = a + s/(1-s).
QuadResult integrate_gk_to_inf(const Integrand& f, double a,
                               const QuadOptions& opt = {});

// Convenience: piecewise adaptive GK over (0, inf) with interior split
// points (each finite piece integrated separately, last piece to infinity).
QuadResult integrate_gk_semiaxis(const Integrand& f,
                                 const std::vector<double>& splits,
                                 const QuadOptions& opt = {});

// Adaptive GK over (0, inf) after the substitution t = e^v. Power-law
// endpoint behavior of f becomes exponential decay in v, which the rational
// tail transform handles quickly; a divergent endpoint shows up as
// non-convergence.
QuadResult integrate_gk_log_axis(const Integrand& f,
                                 const std::vector<double>& splits,
                                 const QuadOptions& opt = {});

// Double-exponential (exp-sinh) rule for integrals over (0, inf).
// `scale` centers the node cluster near t = scale. Independent of the GK
// path; used as the second route in dual-quadrature checks.
QuadResult integrate_de_semiaxis(const Integrand& f, double scale = 1.0,
                                 double tol = 1e-12);

// Double-exponential (tanh-sinh) rule on a finite interval.
QuadResult integrate_de_finite(const Integrand& f, double a, double b,
                               double tol = 1e-12);

}  // namespace sbm
