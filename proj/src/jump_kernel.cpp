#include "sbm/jump_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sbm/quadrature.hpp"

namespace sbm {

double surface_area(int dim) {
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// ---------------------------------------------------------------------------
// Pointwise evaluation of the subordination integral.

double j_eval_gk(const BernsteinFunction& f, int dim, double r) {
    if (!f.has_jumps()) return 0.0;
    if (!(r > 0.0)) throw std::invalid_argument("j_eval: r must be > 0");
    // s = r^2/(4t):  j(r) = (pi r^2)^{-d/2} (r^2/4) *
    //                       int_0^inf s^{d/2-2} e^{-s} mu(r^2/(4s)) ds.
    const double r2q = 0.25 * r * r;
    const double pref = std::pow(M_PI * r * r, -0.5 * dim) * r2q;
    auto integrand = [&](double s) {
        const double t = r2q / s;
        const double m = f.mu(t);
        if (m <= 0.0) return 0.0;
        return std::pow(s, 0.5 * dim - 2.0) * std::exp(-s) * m;
    };
    QuadOptions opt;
    opt.abs_tol = 1e-300;  // pure relative control; j spans many decades
    opt.rel_tol = 1e-11;
    QuadResult q = integrate_gk_semiaxis(integrand, {0.5 * dim, 1.0}, opt);
    return pref * q.value;
}

double j_eval_de(const BernsteinFunction& f, int dim, double r) {
    if (!f.has_jumps()) return 0.0;
    if (!(r > 0.0)) throw std::invalid_argument("j_eval: r must be > 0");
    const double r2q = 0.25 * r * r;
    auto integrand = [&](double t) {
        const double m = f.mu(t);
        if (m <= 0.0) return 0.0;
        return std::pow(4.0 * M_PI * t, -0.5 * dim) * std::exp(-r2q / t) * m;
    };
    QuadResult q = integrate_de_semiaxis(integrand, r2q + 1e-6, 1e-13);
    return q.value;
}

double j_eval(const BernsteinFunction& f, int dim, double r) {
    const double a = j_eval_gk(f, dim, r);
    const double b = j_eval_de(f, dim, r);
    const double big = std::max(std::abs(a), std::abs(b));
    if (big < 1e-280) return 0.0;  // underflow region; both routes vanish
    if (std::abs(a - b) > 1e-6 * big)
        throw IntegrationDisagreement(
            "quadrature routes disagree on j(" + std::to_string(r) + ")", a, b);
    return a;
}

// ---------------------------------------------------------------------------
// CubicSpline

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    // Thomas algorithm.
    for (size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

double CubicSpline::operator()(double x) const {
    const size_t n = x_.size();
    if (n == 0) return 0.0;
    if (n == 1) return y_[0];
    if (x <= x_.front()) {
        const double s = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        return y_[0] + s * (x - x_[0]);
    }
    if (x >= x_.back()) {
        const double s =
            (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
        return y_[n - 1] + s * (x - x_[n - 1]);
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const size_t i = static_cast<size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h;
    const double B = (x - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) *
               (h * h) / 6.0;
}

// ---------------------------------------------------------------------------
// JumpKernel

double JumpKernel::log_j(double r) const {
    if (zero_ || !(r > 0.0)) return -std::numeric_limits<double>::infinity();
    if (trunc_ && r >= *trunc_) return -std::numeric_limits<double>::infinity();
    const double u = std::log(r);
    if (r < r_min_) return small_icept_ + small_slope_ * u;
    if (r > r_last_) return tail_a_ - tail_b_ * r;
    return loglog_(u);
}

double JumpKernel::j(double r) const { return std::exp(log_j(r)); }

double JumpKernel::radial_moment(double p, double a, double b) const {
    if (zero_) return 0.0;
    if (trunc_) b = std::min(b, *trunc_);
    if (!(b > a) || !(a >= 0.0)) return 0.0;
    const double surf = surface_area(dim_);
    double total = 0.0;
    // Piece below the table: power-law extrapolation, closed form.
    const double lo_tab = std::max(a, r_min_);
    if (a < r_min_) {
        const double up = std::min(b, r_min_);
        const double q = p + small_slope_;  // integrand r^{p} * C r^{slope}
        const double C = std::exp(small_icept_);
        if (q <= -1.0)
            throw std::runtime_error("radial moment diverges at 0");
        total += C * (std::pow(up, q + 1.0) - std::pow(a, q + 1.0)) / (q + 1.0);
    }
    // Table region, integrated in log-radius.
    const double hi_tab = std::min(b, r_last_);
    if (hi_tab > lo_tab) {
        auto g = [&](double u) {
            const double r = std::exp(u);
            return std::exp((p + 1.0) * u + loglog_(u));
        };
        QuadOptions opt;
        opt.abs_tol = 1e-300;
        opt.rel_tol = 1e-9;
        QuadResult q =
            integrate_gk(g, std::log(lo_tab), std::log(hi_tab), opt);
        total += q.value;
    }
    // Exponential tail above the table.
    if (b > r_last_ && tail_b_ > 0.0) {
        const double lo = std::max(a, r_last_);
        const double hi = std::min(b, lo + 80.0 / tail_b_);
        if (hi > lo) {
            auto g = [&](double r) {
                return std::pow(r, p) * std::exp(tail_a_ - tail_b_ * r);
            };
            total += integrate_gk(g, lo, hi).value;
        }
    }
    return surf * total;
}

JumpCutoff JumpKernel::make_cutoff(double eps) const {
    JumpCutoff c;
    c.eps = eps;
    if (zero_) return c;
    const double hi = trunc_ ? *trunc_ : std::numeric_limits<double>::infinity();
    if (!(eps > 0.0) || eps >= hi)
        throw std::invalid_argument("cutoff eps outside kernel support");
    c.lambda_eps = radial_moment(dim_ - 1.0, eps,
                                 std::numeric_limits<double>::infinity());
    c.m2_eps = radial_moment(dim_ + 1.0, 0.0, eps);

    // Radial CDF of jump radii >= eps on a log grid.
    const double top = trunc_ ? *trunc_ : r_last_;
    const int n = 1024;
    c.cdf_logr.resize(n + 1);
    c.cdf_u.resize(n + 1);
    const double ulo = std::log(eps), uhi = std::log(top);
    double acc = 0.0;
    c.cdf_logr[0] = ulo;
    c.cdf_u[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double ua = ulo + (uhi - ulo) * (i - 1) / n;
        const double ub = ulo + (uhi - ulo) * i / n;
        auto g = [&](double u) {
            const double r = std::exp(u);
            return std::pow(r, static_cast<double>(dim_)) * j(r);
        };
        acc += integrate_gk(g, ua, ub).value;
        c.cdf_logr[i] = ub;
        c.cdf_u[i] = acc;
    }
    // Tail mass beyond the table goes into the last bin (negligible unless
    // truncated, in which case there is none).
    const double total = c.lambda_eps / surface_area(dim_);
    const double norm = std::max(acc, total);
    for (auto& u : c.cdf_u) u /= norm;
    c.cdf_u.back() = 1.0;
    return c;
}

double JumpCutoff::sample_radius(double u) const {
    const auto it = std::upper_bound(cdf_u.begin(), cdf_u.end(), u);
    size_t i = static_cast<size_t>(it - cdf_u.begin());
    if (i == 0) i = 1;
    if (i >= cdf_u.size()) i = cdf_u.size() - 1;
    const double u0 = cdf_u[i - 1], u1 = cdf_u[i];
    const double w = (u1 > u0) ? (u - u0) / (u1 - u0) : 0.5;
    return std::exp(cdf_logr[i - 1] + w * (cdf_logr[i] - cdf_logr[i - 1]));
}

JumpKernel JumpKernel::build(const BernsteinFunction& f, int dim,
                             const KernelBuildOptions& opts) {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    JumpKernel k;
    k.dim_ = dim;
    k.name_ = f.name;
    k.trunc_ = opts.truncation_radius;
    if (k.trunc_ && !(*k.trunc_ > opts.r_min))
        throw std::invalid_argument("truncation radius below table range");
    if (!f.has_jumps()) {
        k.zero_ = true;
        k.base_.eps = opts.eps;
        return k;
    }

    // Tabulate log j on log-spaced nodes; stop early if j underflows.
    const double ulo = std::log(opts.r_min);
    double utop = std::log(opts.r_max);
    if (k.trunc_) utop = std::min(utop, std::log(*k.trunc_));
    std::vector<double> us, vs;
    us.reserve(opts.table_nodes);
    vs.reserve(opts.table_nodes);
    for (int i = 0; i < opts.table_nodes; ++i) {
        const double u = ulo + (utop - ulo) * i / (opts.table_nodes - 1.0);
        const double r = std::exp(u);
        const double val = j_eval_gk(f, dim, r);
        if (!(val > 0.0) || !std::isfinite(val)) break;  // underflow region
        us.push_back(u);
        vs.push_back(std::log(val));
    }
    if (us.size() < 16)
        throw std::runtime_error("kernel table construction failed for " +
                                 f.name);
    k.r_min_ = std::exp(us.front());
    k.r_last_ = std::exp(us.back());

    // Power-law extension below the table from the first few nodes.
    {
        const double s =
            (vs[8] - vs[0]) / (us[8] - us[0]);
        k.small_slope_ = s;
        k.small_icept_ = vs[0] - s * us[0];
    }
    // Exponential-decay fit over the last decade of nodes.
    {
        const double u_from = us.back() - std::log(10.0);
        double sr = 0, sv = 0, srr = 0, srv = 0;
        int n = 0;
        for (size_t i = 0; i < us.size(); ++i) {
            if (us[i] < u_from) continue;
            const double r = std::exp(us[i]);
            sr += r;
            sv += vs[i];
            srr += r * r;
            srv += r * vs[i];
            ++n;
        }
        const double det = n * srr - sr * sr;
        if (n >= 2 && std::abs(det) > 0.0) {
            const double slope = (n * srv - sr * sv) / det;
            k.tail_b_ = std::max(0.0, -slope);
            k.tail_a_ = (sv + k.tail_b_ * sr) / n;
        }
    }
    k.loglog_ = CubicSpline(us, vs);
    k.base_ = k.make_cutoff(opts.eps);
    return k;
}

KernelConditions JumpKernel::verify_conditions(double K) const {
    KernelConditions out;
    if (zero_) {
        out.satisfied = false;
        out.violation_r = 0.0;
        return out;
    }
    const int n = 400;
    if (trunc_) {
        // Finite range: j(r)/j(2r) has a zero denominator from rho_max/2 on.
        out.satisfied = false;
        out.violation_r = *trunc_ / 2.0;
        return out;
    }
    const double lo = std::log(std::max(r_min_ * 2.0, K * 1e-6));
    const double hi = std::log(K);
    for (int i = 0; i <= n; ++i) {
        const double r = std::exp(lo + (hi - lo) * i / n);
        out.c1 = std::max(out.c1, std::exp(log_j(r) - log_j(2.0 * r)));
    }
    const double rtop = std::min(r_last_ - 1.0, 50.0);
    for (int i = 0; i <= n; ++i) {
        const double r = 1.0 + (rtop - 1.0) * i / n;
        if (r <= 1.0) continue;
        out.c2 = std::max(out.c2, std::exp(log_j(r) - log_j(r + 1.0)));
    }
    out.nu = std::log2(std::max(out.c1, 1.0));
    return out;
}

void JumpKernel::export_csv(const std::string& path) const {
    std::ofstream out(path);
    out << "r,j\n";
    if (zero_) return;
    const auto& us = loglog_.xs();
    const auto& vs = loglog_.ys();
    for (size_t i = 0; i < us.size(); ++i)
        out << std::exp(us[i]) << "," << std::exp(vs[i]) << "\n";
}

// ---------------------------------------------------------------------------
// Smooth fields

SmoothField make_constant_field(int dim, double c) {
    SmoothField f;
    f.value = [c](ConstVecRef) { return c; };
    f.gradient = [dim](ConstVecRef) { return Vec::Zero(dim).eval(); };
    f.laplacian = [](ConstVecRef) { return 0.0; };
    f.radial = true;
    f.center = Vec::Zero(dim);
    return f;
}

SmoothField make_quadratic_field(int dim) {
    SmoothField f;
    f.value = [](ConstVecRef x) { return x.squaredNorm(); };
    f.gradient = [](ConstVecRef x) { return (2.0 * x).eval(); };
    f.laplacian = [dim](ConstVecRef) { return 2.0 * dim; };
    f.radial = true;
    f.center = Vec::Zero(dim);
    return f;
}

SmoothField make_gaussian_bump(const Vec& center, double width) {
    SmoothField f;
    const double w2 = width * width;
    const int dim = static_cast<int>(center.size());
    Vec c = center;
    f.value = [c, w2](ConstVecRef x) {
        return std::exp(-(x - c).squaredNorm() / w2);
    };
    f.gradient = [c, w2](ConstVecRef x) {
        const double v = std::exp(-(x - c).squaredNorm() / w2);
        return ((-2.0 / w2) * v * (x - c)).eval();
    };
    f.laplacian = [c, w2, dim](ConstVecRef x) {
        const double q = (x - c).squaredNorm();
        const double v = std::exp(-q / w2);
        return v * (4.0 * q / (w2 * w2) - 2.0 * dim / w2);
    };
    f.radial = true;
    f.center = c;
    return f;
}

// ---------------------------------------------------------------------------
// Generator: product quadrature in (radius, sphere) coordinates.

namespace {

// Antipodally symmetric sphere rules for d = 1,2,3 (nodes and weights sum
// to surface_area(d)).
struct SphereRule {
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

SphereRule sphere_rule(int dim) {
    SphereRule rule;
    if (dim == 1) {
        Vec p(1), m(1);
        p << 1.0;
        m << -1.0;
        rule.nodes = {p, m};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    if (dim == 2) {
        const int n = 48;
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * M_PI * i / n;
            Vec v(2);
            v << std::cos(a), std::sin(a);
            rule.nodes.push_back(v);
            rule.weights.push_back(2.0 * M_PI / n);
        }
        return rule;
    }
    if (dim == 3) {
        // Gauss-Legendre in cos(theta) x uniform in phi.
        const int nt = 12, np = 24;
        // 12-point Gauss-Legendre nodes/weights on [-1,1].
        static const double gx[6] = {0.125233408511469, 0.367831498998180,
                                     0.587317954286617, 0.769902674194305,
                                     0.904117256370475, 0.981560634246719};
        static const double gw[6] = {0.249147045813403, 0.233492536538355,
                                     0.203167426723066, 0.160078328543346,
                                     0.106939325995318, 0.047175336386512};
        for (int i = 0; i < nt; ++i) {
            const int h = i / 2;
            const double mu = (i % 2 == 0) ? -gx[5 - h] : gx[h];
            const double wmu = (i % 2 == 0) ? gw[5 - h] : gw[h];
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int k = 0; k < np; ++k) {
                const double a = 2.0 * M_PI * (k + 0.5) / np;
                Vec v(3);
                v << st * std::cos(a), st * std::sin(a), mu;
                rule.nodes.push_back(v);
                rule.weights.push_back(wmu * 2.0 * M_PI / np);
            }
        }
        return rule;
    }
    throw std::invalid_argument("generator quadrature supports dim <= 3");
}

// 15-point Gauss-Legendre on [a,b] (non adaptive; panel building block).
template <typename F>
double gl15(const F& f, double a, double b) {
    static const double x[8] = {0.0, 0.201194093997435, 0.394151347077563,
                                0.570972172608539, 0.724417731360170,
                                0.848206583410427, 0.937273392400706,
                                0.987992518020485};
    static const double w[8] = {0.202578241925561, 0.198431485327112,
                                0.186161000015562, 0.166269205816994,
                                0.139570677926154, 0.107159220467172,
                                0.070366047488108, 0.030753241996117};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = w[0] * f(c);
    for (int i = 1; i < 8; ++i)
        s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
    return s * h;
}

}  // namespace

double jump_generator_apply(const JumpKernel& kernel, const SmoothField& f,
                            ConstVecRef x) {
    if (kernel.is_zero()) return 0.0;
    const int dim = kernel.dim();
    const SphereRule rule = sphere_rule(dim);
    const double fx = f.value(x);
    const Vec gx = f.gradient(x);

    Vec y(dim);
    // Spherical mean of the compensated difference at radius r.
    auto compensated_mean = [&](double r) {
        double s = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            y = x + r * rule.nodes[i];
            s += rule.weights[i] *
                 (f.value(y) - fx - r * rule.nodes[i].dot(gx));
        }
        return s;
    };
    auto plain_mean = [&](double r) {
        double s = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            y = x + r * rule.nodes[i];
            s += rule.weights[i] * (f.value(y) - fx);
        }
        return s;
    };

    // Inner part over |y| < 1 by dyadic shells.
    double inner = 0.0;
    double hi = 1.0;
    const double tol = 1e-10;
    int k = 0;
    for (; k < 64; ++k) {
        const double lo = 0.5 * hi;
        auto g = [&](double r) {
            return compensated_mean(r) * kernel.j(r) * std::pow(r, dim - 1);
        };
        const double shell = gl15(g, lo, hi) ;
        inner += shell;
        if (k >= 6 && std::abs(shell) <=
                          tol * std::max(1.0, std::abs(inner)))
            break;
        hi = lo;
    }
    if (k == 64)
        throw GeneratorError("inner generator integral stalled in shell", 0.0,
                             hi);

    // Outer part over |y| >= 1 in octaves until the contribution dies.
    double outer = 0.0;
    double lo = 1.0;
    const double rtop = kernel.truncation_radius()
                            ? *kernel.truncation_radius()
                            : kernel.table_r_max();
    while (lo < rtop) {
        const double up = std::min(2.0 * lo, rtop);
        auto g = [&](double r) {
            return plain_mean(r) * kernel.j(r) * std::pow(r, dim - 1);
        };
        const double piece = gl15(g, lo, up);
        outer += piece;
        if (lo > 4.0 && std::abs(piece) <=
                            1e-12 * std::max(1.0, std::abs(outer)))
            break;
        lo = up;
    }
    return inner + outer;
}

double generator_apply(const JumpKernel& kernel, const SmoothField& f,
                       ConstVecRef x) {
    return f.laplacian(x) + jump_generator_apply(kernel, f, x);
}

}  // namespace sbm
