#include "doctest.h"

#include <cmath>

#include "sbm/bernstein.hpp"

using namespace sbm;

TEST_CASE("phi matches closed forms") {
    // stable(alpha=1, a=1): phi(4) = 4 + sqrt(4) = 6.
    auto st = make_stable(1.0, 1.0);
    CHECK(phi_eval(st, 4.0) == doctest::Approx(6.0).epsilon(1e-9));

    // pure Brownian baseline: psi == 0.
    auto bm = make_pure_bm();
    CHECK(phi_eval(bm, 7.0) == doctest::Approx(7.0).epsilon(1e-14));

    // gamma: psi(1) = log 2.
    auto gm = make_gamma();
    CHECK(phi_eval(gm, 1.0) ==
          doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("quadrature agrees with closed form over lambda in [1e-2,1e2]") {
    for (const auto& f :
         {make_gamma(), make_stable(0.5, 1.0), make_stable(1.0, 1.0),
          make_stable(1.5, 0.7)}) {
        for (int i = 0; i <= 24; ++i) {
            const double lam = std::pow(10.0, -2.0 + 4.0 * i / 24.0);
            const double quad = psi_eval_quadrature(f, lam);
            const double exact = f.closed_form_psi(lam);
            CHECK(std::abs(quad - exact) <= 1e-8 * std::abs(exact));
        }
    }
}

TEST_CASE("psi is nondecreasing and psi/lambda nonincreasing") {
    auto f = make_gamma();
    double prev = 0.0, prev_ratio = 1e300;
    for (int i = 0; i <= 40; ++i) {
        const double lam = std::pow(10.0, -2.0 + 4.0 * i / 40.0);
        const double p = f.closed_form_psi(lam);
        CHECK(p >= prev - 1e-12);
        CHECK(p / lam <= prev_ratio * (1.0 + 1e-12));
        prev = p;
        prev_ratio = p / lam;
    }
}

TEST_CASE("levy density is nonincreasing and convex on grids") {
    for (const auto& f : {make_gamma(), make_stable(0.8, 1.0)}) {
        double prev_mu = 1e300, prev_diff = -1e300;
        bool first = true;
        double prev_t = 0.0;
        for (int i = 0; i <= 60; ++i) {
            const double t = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
            const double m = f.mu(t);
            CHECK(m >= 0.0);
            CHECK(m <= prev_mu * (1.0 + 1e-12));
            if (!first) {
                const double diff = (m - prev_mu) / (t - prev_t);
                // First divided differences nondecreasing (convexity).
                CHECK(diff >= prev_diff - 1e-12 * std::abs(prev_diff));
                prev_diff = diff;
            }
            prev_mu = m;
            prev_t = t;
            first = false;
        }
    }
}

TEST_CASE("growth constant for the stable family") {
    // mu(t) = C t^{-1-alpha/2}, so mu(r)/mu(2r) = 2^{1+alpha/2} exactly.
    for (double alpha : {0.5, 1.0}) {
        const double expected = std::pow(2.0, 1.0 + 0.5 * alpha);
        const double got = check_growth_condition(make_stable(alpha, 1.0), 1.0);
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        // Independent of K.
        for (double K : {0.1, 10.0}) {
            CHECK(std::abs(check_growth_condition(make_stable(alpha, 1.0), K) -
                           got) <= 1e-12 * got);
        }
    }
}

TEST_CASE("growth constant for gamma peaks at 2e near r = K = 1") {
    const double got = check_growth_condition(make_gamma(), 1.0, 400);
    CHECK(got == doctest::Approx(2.0 * std::exp(1.0)).epsilon(0.01));
}

TEST_CASE("compact-support density trips the growth check") {
    BernsteinFunction f;
    f.levy_density = [](double t) {
        return t < 2.0 ? std::exp(-t) / t : 0.0;
    };
    f.name = "truncated-mu";
    CHECK_THROWS_AS(check_growth_condition(f, 4.0), GrowthViolation);
    try {
        check_growth_condition(f, 4.0);
    } catch (const GrowthViolation& e) {
        CHECK(e.offending_r >= 1.0);
    }
}

TEST_CASE("levy tail mass") {
    // stable(0.5, 1): closed-form antiderivative oracle.
    const double beta = 0.25;
    const double C = beta / std::tgamma(1.0 - beta);
    const double expected = C * (1.0 / (1.0 - beta) + 1.0 / beta);
    CHECK(levy_tail_mass(make_stable(0.5, 1.0)) ==
          doctest::Approx(expected).epsilon(1e-8));

    CHECK(levy_tail_mass(make_pure_bm()) == 0.0);

    BernsteinFunction bad;
    bad.levy_density = [](double t) { return 1.0 / (t * t); };
    bad.name = "t^-2";
    CHECK_THROWS_AS(levy_tail_mass(bad), DivergentLevyMass);
    try {
        levy_tail_mass(bad);
    } catch (const DivergentLevyMass& e) {
        CHECK(e.endpoint == "0");
    }
}

TEST_CASE("family spec parsing") {
    CHECK(parse_bernstein("pure_bm").name == "pure_bm");
    CHECK(parse_bernstein("gamma").closed_form_psi(1.0) ==
          doctest::Approx(std::log(2.0)));
    auto st = parse_bernstein("stable:alpha=0.5,a=2");
    CHECK(st.closed_form_psi(4.0) ==
          doctest::Approx(std::pow(2.0, 0.5) * std::pow(4.0, 0.25)));
    auto sum = parse_bernstein("sum:[stable:alpha=1,a=1;gamma]");
    CHECK(sum.closed_form_psi(1.0) ==
          doctest::Approx(1.0 + std::log(2.0)));
    CHECK_THROWS_AS(parse_bernstein("nope"), std::invalid_argument);
}
