#include "sbm/geometry.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sbm {

namespace {

// Exact signed distance (positive inside) of an axis-aligned box.
double box_sd(ConstVecRef x, const Vec& lo, const Vec& hi) {
    double max_q = -std::numeric_limits<double>::infinity();
    double out2 = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double q = std::max(lo[i] - x[i], x[i] - hi[i]);
        max_q = std::max(max_q, q);
        if (q > 0.0) out2 += q * q;
    }
    if (out2 > 0.0) return -std::sqrt(out2);
    return -max_q;
}

// Box with every edge rounded at radius rho (Minkowski dilation of the
// box shrunk by rho; exact signed distance).
double rounded_box_sd(ConstVecRef x, const Vec& lo, const Vec& hi,
                      double rho) {
    if (rho <= 0.0) return box_sd(x, lo, hi);
    return box_sd(x, (lo.array() + rho).matrix(),
                  (hi.array() - rho).matrix()) +
           rho;
}

std::map<std::string, double> parse_kv(const std::string& s) {
    std::map<std::string, double> kv;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad domain parameter '" + item + "'");
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return kv;
}

}  // namespace

Domain make_ball(const Vec& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be > 0");
    Domain d;
    d.dim = static_cast<int>(center.size());
    Vec c = center;
    d.signed_distance = [c, radius](ConstVecRef x) {
        return radius - (x - c).norm();
    };
    d.characteristics = Characteristics{std::min(radius, 1.0), 1.0};
    d.bounding_box = {(c.array() - radius).matrix(),
                      (c.array() + radius).matrix()};
    std::ostringstream nm;
    nm << "ball(r=" << radius << ")";
    d.name = nm.str();
    return d;
}

Domain make_halfspace(const Vec& normal, double offset) {
    const double nn = normal.norm();
    if (std::abs(nn - 1.0) > 1e-12)
        throw std::invalid_argument("halfspace: normal must be a unit vector");
    Domain d;
    d.dim = static_cast<int>(normal.size());
    Vec n = normal;
    d.signed_distance = [n, offset](ConstVecRef x) {
        return x.dot(n) - offset;
    };
    d.characteristics = Characteristics{1.0, 1.0};
    d.bounded = false;
    d.bounding_box = {Vec::Constant(d.dim, -50.0), Vec::Constant(d.dim, 50.0)};
    d.name = "halfspace";
    return d;
}

Domain make_box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size() || !((hi - lo).array() > 0.0).all())
        throw std::invalid_argument("box: need lo < hi");
    Domain d;
    d.dim = static_cast<int>(lo.size());
    Vec l = lo, h = hi;
    d.signed_distance = [l, h](ConstVecRef x) { return box_sd(x, l, h); };
    d.bounding_box = {l, h};
    d.name = "box";
    return d;
}

Domain make_interval(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("interval: need a < b");
    Domain d;
    d.dim = 1;
    d.signed_distance = [a, b](ConstVecRef x) {
        return std::min(x[0] - a, b - x[0]);
    };
    d.bounding_box = {Vec::Constant(1, a), Vec::Constant(1, b)};
    std::ostringstream nm;
    nm << "interval(" << a << "," << b << ")";
    d.name = nm.str();
    return d;
}

Domain make_slit_box(int dim, double side, double slab_thickness,
                     double slit_reach, double smoothing) {
    if (dim < 2) throw std::invalid_argument("slitbox: dim must be >= 2");
    if (!(slab_thickness > 0.0 && slab_thickness < side))
        throw std::invalid_argument("slitbox: need 0 < thickness < side");
    if (!(slit_reach > 0.0 && slit_reach < side))
        throw std::invalid_argument("slitbox: need 0 < reach < side");
    if (smoothing < 0.0 || smoothing > slab_thickness / 2.0)
        throw std::invalid_argument(
            "slitbox: smoothing must lie in [0, thickness/2]");

    const double rho = smoothing;
    Vec box_lo = Vec::Constant(dim, -side);
    Vec box_hi = Vec::Constant(dim, side);

    // Removed slab. Sharp case: reaches through the far walls. Smoothed
    // case: retracted by 4*rho so the rounded slab surface stays clear of
    // the (rounded) outer walls, keeping the boundary a disjoint union of
    // two C^{1,1} sheets.
    Vec slab_lo(dim), slab_hi(dim);
    for (int i = 0; i + 1 < dim; ++i) {
        slab_lo[i] = (rho > 0.0) ? -side + 4.0 * rho : -side - 1.0;
        slab_hi[i] = slit_reach;
    }
    slab_lo[dim - 1] = -slab_thickness;
    slab_hi[dim - 1] = 0.0;

    Domain d;
    d.dim = dim;
    d.signed_distance = [box_lo, box_hi, slab_lo, slab_hi,
                         rho](ConstVecRef x) {
        const double outer = rounded_box_sd(x, box_lo, box_hi, rho);
        const double slab = rounded_box_sd(x, slab_lo, slab_hi, rho);
        return std::min(outer, -slab);
    };
    if (rho > 0.0) d.characteristics = Characteristics{std::min(rho, 1.0), 1.0};
    d.bounding_box = {box_lo, box_hi};
    std::ostringstream nm;
    nm << "slitbox(side=" << side << ",t=" << slab_thickness
       << ",reach=" << slit_reach << ",smooth=" << smoothing << ")";
    d.name = nm.str();
    return d;
}

Domain intersect(const Domain& a, const Domain& b, const std::string& name) {
    if (a.dim != b.dim) throw std::invalid_argument("intersect: dim mismatch");
    Domain d;
    d.dim = a.dim;
    auto sa = a.signed_distance;
    auto sb = b.signed_distance;
    d.signed_distance = [sa, sb](ConstVecRef x) {
        return std::min(sa(x), sb(x));
    };
    d.bounded = a.bounded || b.bounded;
    d.bounding_box = {a.bounding_box.lo.cwiseMax(b.bounding_box.lo),
                      a.bounding_box.hi.cwiseMin(b.bounding_box.hi)};
    d.name = name;
    return d;
}

Vec sdf_gradient(const Domain& d, ConstVecRef x, double h) {
    Vec g(x.size());
    Vec p = x;
    for (int i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        const double up = d.signed_distance(p);
        p[i] = x[i] - h;
        const double dn = d.signed_distance(p);
        p[i] = x[i];
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

Vec project_to_boundary(const Domain& d, ConstVecRef x) {
    Vec p = x;
    for (int it = 0; it < 3; ++it) {
        const double s = d.signed_distance(p);
        if (std::abs(s) < 1e-14) break;
        Vec g = sdf_gradient(d, p);
        const double g2 = g.squaredNorm();
        if (g2 < 1e-12) break;
        p -= (s / g2) * g;
    }
    return p;
}

GraphBox::GraphBox(const Domain& parent, const Vec& q, double r1, double r2)
    : parent_(&parent), q_(q), r1_(r1), r2_(r2) {
    if (!parent.characteristics)
        throw std::invalid_argument("graph box: parent has no characteristics");
    const double R = parent.characteristics->R;
    if (!(r1 > 0.0 && r2 > 0.0 && r1 <= R && r2 <= R))
        throw std::invalid_argument("graph box: need 0 < r1, r2 <= R");
    if (std::abs(parent.signed_distance(q)) > 1e-9)
        throw std::invalid_argument("graph box: Q is not a boundary point");
    normal_ = sdf_gradient(parent, q);
    normal_.normalize();
    // Orthonormal frame with the inward normal in the last column.
    const int d = parent.dim;
    frame_.resize(d, d);
    frame_.col(d - 1) = normal_;
    int filled = 0;
    for (int i = 0; i < d && filled < d - 1; ++i) {
        Vec v = Vec::Zero(d);
        v[i] = 1.0;
        for (int j = d - 1; j >= d - 1 - filled; --j)
            v -= frame_.col(j).dot(v) * frame_.col(j);
        if (v.norm() > 1e-6) {
            v.normalize();
            frame_.col(filled) = v;
            ++filled;
        }
    }
    if (filled != d - 1)
        throw std::runtime_error("graph box: frame construction failed");
}

double GraphBox::lateral_norm(ConstVecRef y) const {
    const Vec rel = y - q_;
    const int d = parent_->dim;
    double s = 0.0;
    for (int i = 0; i < d - 1; ++i) {
        const double c = frame_.col(i).dot(rel);
        s += c * c;
    }
    return std::sqrt(s);
}

double GraphBox::rho(ConstVecRef y) const {
    const Vec rel = y - q_;
    const int d = parent_->dim;
    const double height = normal_.dot(rel);
    // Boundary height under y: bisect sd == 0 along the normal through the
    // lateral foot of y.
    Vec foot = q_;
    for (int i = 0; i < d - 1; ++i)
        foot += frame_.col(i).dot(rel) * frame_.col(i);
    double lo = -2.0 * r1_ - r2_;
    double hi = 2.0 * r1_ + r2_;
    auto sd_at = [&](double s) {
        return parent_->signed_distance(foot + s * normal_);
    };
    if (sd_at(lo) > 0.0 || sd_at(hi) < 0.0)
        return height;  // graph not bracketed; fall back to plane height
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sd_at(mid) > 0.0 ? hi : lo) = mid;
    }
    return height - 0.5 * (lo + hi);
}

bool GraphBox::member(ConstVecRef y) const {
    if (!parent_->inside(y)) return false;
    if (lateral_norm(y) >= r2_) return false;
    const double p = rho(y);
    return p > 0.0 && p < r1_;
}

Vec GraphBox::point_at_height(double t) const { return q_ + t * normal_; }

Domain parse_domain(const std::string& spec, int dim) {
    if (spec.rfind("ball", 0) == 0) {
        double r = 1.0;
        Vec c = Vec::Zero(dim);
        if (spec.size() > 5 && spec[4] == ':') {
            auto kv = parse_kv(spec.substr(5));
            if (kv.count("r")) r = kv["r"];
            if (kv.count("cx") && dim >= 1) c[0] = kv["cx"];
            if (kv.count("cy") && dim >= 2) c[1] = kv["cy"];
            if (kv.count("cz") && dim >= 3) c[2] = kv["cz"];
        }
        return make_ball(c, r);
    }
    if (spec == "halfspace") {
        Vec n = Vec::Zero(dim);
        n[dim - 1] = 1.0;
        return make_halfspace(n, 0.0);
    }
    if (spec.rfind("slitbox:", 0) == 0) {
        auto kv = parse_kv(spec.substr(8));
        const double side = kv.count("side") ? kv["side"] : 100.0;
        const double t = kv.count("thickness") ? kv["thickness"] : 0.5;
        const double reach = kv.count("reach") ? kv["reach"] : 49.0;
        const double smooth = kv.count("smooth") ? kv["smooth"] : 0.0;
        return make_slit_box(dim, side, t, reach, smooth);
    }
    if (spec.rfind("box:", 0) == 0) {
        auto kv = parse_kv(spec.substr(4));
        const double h = kv.count("halfside") ? kv["halfside"] : 1.0;
        return make_box(Vec::Constant(dim, -h), Vec::Constant(dim, h));
    }
    if (spec.rfind("interval:", 0) == 0) {
        auto kv = parse_kv(spec.substr(9));
        return make_interval(kv.count("a") ? kv["a"] : 0.0,
                             kv.count("b") ? kv["b"] : 1.0);
    }
    throw std::invalid_argument("unknown domain spec '" + spec + "'");
}

}  // namespace sbm
