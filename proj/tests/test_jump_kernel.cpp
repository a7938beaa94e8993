#include "doctest.h"

#include <cmath>

#include "sbm/jump_kernel.hpp"
#include "sbm/rng.hpp"

using namespace sbm;

namespace {

// Closed form for the stable family: the jump part of X is the rotationally
// invariant alpha-stable process, whose Levy density is
//   A(d,alpha) a^alpha r^{-d-alpha},
//   A(d,alpha) = alpha 2^{alpha-1} pi^{-d/2} Gamma((d+alpha)/2)/Gamma(1-alpha/2).
double stable_j_exact(double alpha, double a, int d, double r) {
    const double A = alpha * std::pow(2.0, alpha - 1.0) *
                     std::pow(M_PI, -0.5 * d) *
                     std::tgamma(0.5 * (d + alpha)) /
                     std::tgamma(1.0 - 0.5 * alpha);
    return A * std::pow(a, alpha) * std::pow(r, -static_cast<double>(d) - alpha);
}

}  // namespace

TEST_CASE("sphere surface constants") {
    CHECK(surface_area(1) == doctest::Approx(2.0));
    CHECK(surface_area(2) == doctest::Approx(2.0 * M_PI));
    CHECK(surface_area(3) == doctest::Approx(4.0 * M_PI));
    CHECK(surface_area(4) == doctest::Approx(2.0 * M_PI * M_PI));
}

TEST_CASE("j_eval matches the stable closed form") {
    for (double r : {1e-3, 0.05, 0.7, 3.0}) {
        CHECK(j_eval(make_stable(1.0, 1.0), 3, r) ==
              doctest::Approx(stable_j_exact(1.0, 1.0, 3, r)).epsilon(1e-8));
        CHECK(j_eval(make_stable(0.5, 1.3), 2, r) ==
              doctest::Approx(stable_j_exact(0.5, 1.3, 2, r)).epsilon(1e-8));
    }
}

TEST_CASE("dual quadrature routes agree") {
    auto gm = make_gamma();
    for (double r : {0.01, 0.3, 1.0, 7.0, 40.0}) {
        const double a = j_eval_gk(gm, 2, r);
        const double b = j_eval_de(gm, 2, r);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(a, b));
    }
    CHECK(j_eval(make_pure_bm(), 3, 1.0) == 0.0);
}

TEST_CASE("small-radius log-log slope equals -(d+alpha)") {
    auto f = make_stable(0.5, 1.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 12;
    for (int i = 0; i < n; ++i) {
        const double r = std::pow(10.0, -3.0 + i / (n - 1.0));
        const double u = std::log(r), v = std::log(j_eval_gk(f, 3, r));
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-3.5).epsilon(0.02 / 3.5));
}

TEST_CASE("table interpolation error stays below 1e-6 relative") {
    auto f = make_gamma();
    auto k = JumpKernel::build(f, 2);
    Philox rng(1234, 0);
    for (int i = 0; i < 100; ++i) {
        const double r =
            std::exp(std::log(2e-6) +
                     rng.uniform() * (std::log(300.0) - std::log(2e-6)));
        const double exact = j_eval_gk(f, 2, r);
        CHECK(std::abs(k.j(r) - exact) <= 1e-6 * exact);
    }
}

TEST_CASE("cutoff moments are monotone in eps") {
    auto k = JumpKernel::build(make_stable(1.0, 1.0), 3);
    double prev_m2 = 0.0, prev_lam = 1e300;
    for (double eps : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        auto c = k.make_cutoff(eps);
        CHECK(c.m2_eps > prev_m2);
        CHECK(c.lambda_eps < prev_lam);
        prev_m2 = c.m2_eps;
        prev_lam = c.lambda_eps;
    }
}

TEST_CASE("fitted small-r tail integrates to the power-law antiderivative") {
    const int d = 3;
    auto k = JumpKernel::build(make_stable(1.0, 1.0), d);
    // Fit A, p on the table at small radii.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 10;
    for (int i = 0; i < n; ++i) {
        const double r = std::pow(10.0, -5.0 + i / (n - 1.0));
        const double u = std::log(r), v = k.log_j(r);
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double p = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double A = std::exp((sy + p * sx) / n);
    const double eps = 1e-2;
    const double closed = surface_area(d) * A *
                          (std::pow(1.0, d + 2 - p) - std::pow(eps, d + 2 - p)) /
                          (d + 2 - p);
    const double table = k.radial_moment(d + 1.0, eps, 1.0);
    CHECK(table == doctest::Approx(closed).epsilon(0.01));
}

TEST_CASE("radial cdf is a proper inverse sampler") {
    auto k = JumpKernel::build(make_stable(1.0, 1.0), 2);
    auto c = k.make_cutoff(0.05);
    // Nondecreasing from 0 to 1.
    for (size_t i = 1; i < c.cdf_u.size(); ++i)
        CHECK(c.cdf_u[i] >= c.cdf_u[i - 1]);
    CHECK(c.cdf_u.front() == 0.0);
    CHECK(c.cdf_u.back() == 1.0);
    // Samples live above eps; empirical survival matches the intensity tail.
    Philox rng(99, 1);
    const int n = 100000;
    int above1 = 0;
    for (int i = 0; i < n; ++i) {
        const double r = c.sample_radius(rng.uniform());
        REQUIRE(r >= 0.05 * (1.0 - 1e-9));
        if (r > 1.0) ++above1;
    }
    const double p_exact =
        k.radial_moment(1.0, 1.0, 1e9) / c.lambda_eps;
    const double se = std::sqrt(p_exact * (1 - p_exact) / n);
    CHECK(std::abs(static_cast<double>(above1) / n - p_exact) <= 3.0 * se);
}

TEST_CASE("truncated kernel vanishes beyond the range and fails conditions") {
    KernelBuildOptions opts;
    opts.truncation_radius = 1.0;
    auto k = JumpKernel::build(make_stable(1.0, 1.0), 2, opts);
    CHECK(k.j(0.5) > 0.0);
    CHECK(k.j(1.0) == 0.0);
    CHECK(k.j(2.0) == 0.0);
    auto cond = k.verify_conditions(1.0);
    CHECK_FALSE(cond.satisfied);
    CHECK(cond.violation_r == doctest::Approx(0.5));
    // Sampled jump radii respect the range.
    auto c = k.make_cutoff(0.05);
    Philox rng(5, 0);
    for (int i = 0; i < 20000; ++i)
        REQUIRE(c.sample_radius(rng.uniform()) < 1.0 + 1e-12);
}

TEST_CASE("kernel conditions for the stable and gamma families") {
    auto ks = JumpKernel::build(make_stable(0.5, 1.0), 3);
    auto cond = ks.verify_conditions(1.0);
    CHECK(cond.satisfied);
    // Pure power law: the doubling ratio is 2^{d+alpha} at every radius.
    CHECK(cond.c1 == doctest::Approx(std::pow(2.0, 3.5)).epsilon(0.01));
    CHECK(cond.nu == doctest::Approx(3.5).epsilon(0.01));

    auto kg = JumpKernel::build(make_gamma(), 2);
    auto cg = kg.verify_conditions(1.0);
    CHECK(cg.satisfied);
    CHECK(cg.c1 > 1.0);
    CHECK(cg.c2 > 1.0);
    CHECK(std::isfinite(cg.c1));
    CHECK(std::isfinite(cg.c2));
}

TEST_CASE("generator annihilates constants") {
    auto k = JumpKernel::build(make_stable(1.0, 1.0), 2);
    auto f = make_constant_field(2, 3.25);
    Vec x = Vec::Zero(2);
    CHECK(generator_apply(k, f, x) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("generator symbol identity on plane waves") {
    // (Delta + A) cos(k.x) = -phi(|k|^2) cos(k.x) for the full generator;
    // the jump part alone contributes -psi(|k|^2) cos(k.x).
    auto bf = make_gamma();
    auto k = JumpKernel::build(bf, 2);
    Vec kk(2);
    kk << 1.5, 0.7;
    const double k2 = kk.squaredNorm();
    SmoothField f;
    Vec kcopy = kk;
    f.value = [kcopy](ConstVecRef x) { return std::cos(kcopy.dot(x)); };
    f.gradient = [kcopy](ConstVecRef x) {
        return (-std::sin(kcopy.dot(x)) * kcopy).eval();
    };
    f.laplacian = [kcopy, k2](ConstVecRef x) {
        return -k2 * std::cos(kcopy.dot(x));
    };
    Vec x(2);
    x << 0.3, -0.2;
    const double expected = -bf.closed_form_psi(k2) * std::cos(kk.dot(x));
    CHECK(jump_generator_apply(k, f, x) ==
          doctest::Approx(expected).epsilon(2e-5));
}

TEST_CASE("generator far from a compact bump reduces to the plain integral") {
    const int d = 2;
    auto bf = make_stable(1.0, 1.0);
    auto k = JumpKernel::build(bf, d);
    const double w = 0.2;
    auto f = make_gaussian_bump(Vec::Zero(d), w);
    Vec x(2);
    x << 3.0, 0.0;
    const double got = jump_generator_apply(k, f, x);
    CHECK(got > 0.0);
    // Independent two-route oracle: polar quadrature about the bump center.
    double oracle = 0.0;
    {
        const int na = 256;
        for (int ia = 0; ia < na; ++ia) {
            const double a = 2.0 * M_PI * (ia + 0.5) / na;
            std::vector<double> vals;
            const int nr = 400;
            const double rmax = 1.6;
            double acc = 0.0;
            for (int ir = 0; ir < nr; ++ir) {
                const double s = rmax * (ir + 0.5) / nr;
                Vec z(2);
                z << s * std::cos(a), s * std::sin(a);
                acc += std::exp(-z.squaredNorm() / (w * w)) *
                       k.j((z - x).norm()) * s * (rmax / nr);
            }
            oracle += acc * (2.0 * M_PI / na);
        }
    }
    CHECK(got == doctest::Approx(oracle).epsilon(1e-3));
}
