#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbm/bernstein.hpp"

namespace sbm {

using Vec = Eigen::VectorXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

// Surface area of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
double surface_area(int dim);

struct IntegrationDisagreement : std::runtime_error {
    double value_a, value_b;
    IntegrationDisagreement(const std::string& msg, double a, double b)
        : std::runtime_error(msg), value_a(a), value_b(b) {}
};

// Radial jump intensity j(r) = int_0^inf (4 pi t)^{-d/2} e^{-r^2/(4t)} mu(t) dt,
// evaluated by two independent quadrature routes (Gauss-Kronrod after the
// substitution s = r^2/(4t), and a double-exponential rule on the t axis).
// Throws IntegrationDisagreement when the routes differ by more than 1e-6
// relative.
double j_eval(const BernsteinFunction& f, int dim, double r);

// Single-route evaluations, exposed for the dual-route tests.
double j_eval_gk(const BernsteinFunction& f, int dim, double r);
double j_eval_de(const BernsteinFunction& f, int dim, double r);

// Natural cubic spline through (x_i, y_i); linear extrapolation outside.
class CubicSpline {
 public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

 private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives
};

struct KernelConditions {
    bool satisfied = true;
    double c1 = 0.0;   // sup_{r<K} j(r)/j(2r)
    double c2 = 0.0;   // sup_{1<r} j(r)/j(r+1)
    double nu = 0.0;   // log2(c1)
    double violation_r = 0.0;  // witness radius when !satisfied
};

struct KernelBuildOptions {
    double eps = 0.05;           // jump cutoff radius for the cached moments
    double r_min = 1e-6;
    double r_max = 1e3;
    int table_nodes = 4096;
    std::optional<double> truncation_radius;  // j == 0 for r >= this
};

// Per-cutoff sampling data: total intensity above eps, folded small-jump
// second moment, and the inverse radial CDF for jump radii >= eps.
struct JumpCutoff {
    double eps = 0.0;
    double lambda_eps = 0.0;  // surface(d) * int_eps^inf r^{d-1} j(r) dr
    double m2_eps = 0.0;      // surface(d) * int_0^eps r^{d+1} j(r) dr
    std::vector<double> cdf_u;      // CDF values in [0,1]
    std::vector<double> cdf_logr;   // matching log radii
    double sample_radius(double u) const;  // u in (0,1) -> jump radius
};

class JumpKernel {
 public:
    static JumpKernel build(const BernsteinFunction& f, int dim,
                            const KernelBuildOptions& opts = {});

    int dim() const { return dim_; }
    bool is_zero() const { return zero_; }
    bool truncated() const { return trunc_.has_value(); }
    std::optional<double> truncation_radius() const { return trunc_; }
    const std::string& family_name() const { return name_; }

    // O(1) interpolated intensity; exact zero beyond a truncation radius.
    double j(double r) const;
    double log_j(double r) const;

    // Cached cutoff data for the build-time eps.
    const JumpCutoff& base_cutoff() const { return base_; }
    // Cutoff data for an arbitrary eps (recomputed from the table).
    JumpCutoff make_cutoff(double eps) const;

    // surface(d) * int_a^b r^{p} j(r) dr computed from the table.
    double radial_moment(double p, double a, double b) const;

    KernelConditions verify_conditions(double K) const;

    void export_csv(const std::string& path) const;

    double table_r_min() const { return r_min_; }
    double table_r_max() const { return r_last_; }

 private:
    int dim_ = 0;
    bool zero_ = false;
    std::optional<double> trunc_;
    std::string name_;
    double r_min_ = 0.0, r_last_ = 0.0;
    CubicSpline loglog_;          // log j as a function of log r
    double small_slope_ = 0.0;    // power-law exponent of j near 0
    double small_icept_ = 0.0;
    double tail_a_ = 0.0, tail_b_ = 0.0;  // log j ~ tail_a - tail_b * r
    JumpCutoff base_;

    friend double generator_apply_impl(const JumpKernel&, int, double);
};

// Smooth test function with analytic derivatives, as needed by the
// generator and the Dynkin-residual estimator.
struct SmoothField {
    std::function<double(ConstVecRef)> value;
    std::function<Vec(ConstVecRef)> gradient;
    std::function<double(ConstVecRef)> laplacian;
    // Radial profile metadata; enables cached generator evaluation.
    bool radial = false;
    Vec center;
};

SmoothField make_constant_field(int dim, double c);
SmoothField make_quadratic_field(int dim);  // f(x) = |x|^2
SmoothField make_gaussian_bump(const Vec& center, double width);

struct GeneratorError : std::runtime_error {
    double shell_lo, shell_hi;
    GeneratorError(const std::string& msg, double lo, double hi)
        : std::runtime_error(msg), shell_lo(lo), shell_hi(hi) {}
};

// (Delta + A) f at x: analytic Laplacian plus the compensated jump part
// evaluated by product quadrature in (radius, sphere) coordinates.
// Supported for dim in {1,2,3}.
double generator_apply(const JumpKernel& kernel, const SmoothField& f,
                       ConstVecRef x);

// Jump part A f only.
double jump_generator_apply(const JumpKernel& kernel, const SmoothField& f,
                            ConstVecRef x);

}  // namespace sbm
