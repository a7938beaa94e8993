#include "doctest.h"

#include <cmath>

#include "sbm/geometry.hpp"
#include "sbm/rng.hpp"

using namespace sbm;

namespace {
Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}
}  // namespace

TEST_CASE("ball signed distance") {
    auto b = make_ball(Vec::Zero(3), 1.0);
    CHECK(b.signed_distance(Vec::Zero(3)) == doctest::Approx(1.0));
    CHECK(b.signed_distance(v3(1.5, 0, 0)) == doctest::Approx(-0.5));
    CHECK(std::abs(b.signed_distance(v3(0, 1.0, 0))) < 1e-15);
    CHECK(b.characteristics->R == doctest::Approx(1.0));
}

TEST_CASE("halfspace signed distance") {
    Vec n = Vec::Zero(3);
    n[2] = 1.0;
    auto h = make_halfspace(n, 0.0);
    CHECK(h.signed_distance(v3(0, 0, 2)) == doctest::Approx(2.0));
    CHECK(h.signed_distance(v3(5, -3, 0)) == doctest::Approx(0.0));
    CHECK(h.signed_distance(v3(0, 0, -1)) == doctest::Approx(-1.0));
    CHECK_FALSE(h.bounded);
}

TEST_CASE("slit box with the sharp default parameters") {
    auto d = make_slit_box(3, 100.0, 0.5, 49.0, 0.0);
    // Probe above the slit: distance to the slab top plane.
    CHECK(d.signed_distance(v3(0, 0, 0.2)) == doctest::Approx(0.2));
    // Inside the removed slab.
    CHECK(d.signed_distance(v3(0, 0, -0.25)) < 0.0);
    // Beyond the slit reach the slab is absent.
    CHECK(d.signed_distance(v3(99, 99, -0.25)) > 0.0);
    CHECK_FALSE(d.characteristics.has_value());
}

TEST_CASE("slit box rejects degenerate smoothing") {
    CHECK_THROWS_AS(make_slit_box(3, 100.0, 0.5, 49.0, 0.3),
                    std::invalid_argument);
}

TEST_CASE("signed distance is 1-Lipschitz on random pairs") {
    auto dom = make_slit_box(2, 4.0, 0.25, 1.5, 0.05);
    Philox rng(2024, 0);
    for (int i = 0; i < 1000; ++i) {
        Vec x(2), y(2);
        for (int k = 0; k < 2; ++k) {
            x[k] = -4.5 + 9.0 * rng.uniform();
            y[k] = -4.5 + 9.0 * rng.uniform();
        }
        const double dx = dom.signed_distance(x) - dom.signed_distance(y);
        CHECK(std::abs(dx) <= (x - y).norm() * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("finite-difference gradient norm stays below 1 + 1e-6") {
    Philox rng(77, 0);
    auto ball = make_ball(Vec::Zero(3), 1.0);
    auto slit = make_slit_box(2, 4.0, 0.25, 1.5, 0.05);
    int checked = 0;
    while (checked < 1000) {
        Vec x(3);
        for (int k = 0; k < 3; ++k) x[k] = -1.0 + 2.0 * rng.uniform();
        if (ball.signed_distance(x) <= 1e-3) continue;
        CHECK(sdf_gradient(ball, x).norm() <= 1.0 + 1e-6);
        Vec y(2);
        y << x[0] * 4.0, x[1] * 4.0;
        if (slit.signed_distance(y) > 1e-3)
            CHECK(sdf_gradient(slit, y).norm() <= 1.0 + 1e-6);
        ++checked;
    }
}

TEST_CASE("boundary projection lands on the boundary") {
    auto ball = make_ball(Vec::Zero(3), 1.0);
    Vec x = v3(0.3, -0.2, 0.4);
    Vec p = project_to_boundary(ball, x);
    CHECK(std::abs(ball.signed_distance(p)) < 1e-12);

    Vec n = Vec::Zero(3);
    n[2] = 1.0;
    auto h = make_halfspace(n, 0.0);
    p = project_to_boundary(h, v3(1.0, 2.0, 0.7));
    CHECK(std::abs(h.signed_distance(p)) < 1e-12);
}

TEST_CASE("smoothed slit box passes two-sided ball probes") {
    const double rho = 0.05;
    for (int dim : {2, 3}) {
        auto dom = make_slit_box(dim, 4.0, 0.25, 1.5, rho);
        REQUIRE(dom.characteristics.has_value());
        Philox rng(31415, dim);
        int probes = 0;
        while (probes < (dim == 2 ? 200 : 100)) {
            Vec x(dim);
            for (int k = 0; k < dim; ++k) x[k] = -4.2 + 8.4 * rng.uniform();
            // Bias half the seeds toward the slab sheet.
            if (probes % 2 == 0) {
                for (int k = 0; k + 1 < dim; ++k)
                    x[k] = -3.9 + 5.6 * rng.uniform();
                x[dim - 1] = -0.5 + 1.0 * rng.uniform();
            }
            Vec p = project_to_boundary(dom, x);
            if (std::abs(dom.signed_distance(p)) > 1e-9) continue;
            Vec g = sdf_gradient(dom, p);
            if (g.norm() < 0.99) continue;  // projection hit a medial point
            g.normalize();
            const double probe = rho * (1.0 - 1e-6);
            CHECK(dom.signed_distance(p + probe * g) >= probe - 1e-7);
            CHECK(dom.signed_distance(p - probe * g) <= -(probe - 1e-7));
            ++probes;
        }
    }
}

TEST_CASE("graph box membership over the unit ball") {
    auto ball = make_ball(Vec::Zero(3), 1.0);
    Vec q = v3(0, 0, -1.0);  // south pole; inward normal +e_z
    GraphBox gb(ball, q, 0.1, 0.1);
    CHECK(gb.member(v3(0, 0, -0.95)));
    CHECK_FALSE(gb.member(v3(0, 0, -0.85)));  // rho = 0.15 > r1
    CHECK_FALSE(gb.member(v3(0.11, 0, -0.95)));  // lateral beyond r2
    CHECK(gb.rho(v3(0, 0, -0.95)) == doctest::Approx(0.05).epsilon(1e-6));

    CHECK_THROWS_AS(GraphBox(ball, v3(0, 0, -0.9), 0.1, 0.1),
                    std::invalid_argument);
}

TEST_CASE("domain spec parsing") {
    auto b = parse_domain("ball:r=2", 3);
    CHECK(b.signed_distance(Vec::Zero(3)) == doctest::Approx(2.0));
    auto s = parse_domain("slitbox:side=4,thickness=0.25,reach=1.5,smooth=0.05", 2);
    CHECK(s.dim == 2);
    auto i = parse_domain("interval:a=0,b=1", 1);
    CHECK(i.signed_distance(Vec::Constant(1, 0.25)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(parse_domain("pyramid", 3), std::invalid_argument);
}
