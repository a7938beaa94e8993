#include "sbm/sampler.hpp"

#include <cmath>

namespace sbm {

namespace {

constexpr int kMaxDim = 8;

inline void random_direction(Philox& rng, int d, double* out) {
    if (d == 1) {
        out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return;
    }
    if (d == 2) {
        const double a = 6.283185307179586 * rng.uniform();
        out[0] = std::cos(a);
        out[1] = std::sin(a);
        return;
    }
    if (d == 3) {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double a = 6.283185307179586 * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        out[0] = s * std::cos(a);
        out[1] = s * std::sin(a);
        out[2] = z;
        return;
    }
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
        out[i] = rng.gaussian();
        norm2 += out[i] * out[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < d; ++i) out[i] *= inv;
}

}  // namespace

ExitRecord simulate_exit(const Domain& domain, ConstVecRef start,
                         const JumpKernel& kernel, const JumpCutoff& cutoff,
                         const SchemeConfig& scheme, Philox& rng,
                         const PathControls& controls) {
    scheme.validate();
    const int d = domain.dim;
    if (d < 1 || d > kMaxDim)
        throw std::invalid_argument("simulate_exit: unsupported dimension");
    if (!kernel.is_zero() && kernel.dim() != d)
        throw std::invalid_argument("simulate_exit: kernel/domain dim mismatch");
    if (start.size() != d)
        throw std::invalid_argument("simulate_exit: start/domain dim mismatch");

    double x[kMaxDim], y[kMaxDim], dir[kMaxDim];
    for (int i = 0; i < d; ++i) x[i] = start[i];

    const auto& sd_fn = domain.signed_distance;
    auto sd_at = [&](const double* p) {
        return sd_fn(Eigen::Map<const Vec>(p, d));
    };

    double sd_before = sd_at(x);
    if (!(sd_before > 0.0))
        throw std::invalid_argument(
            "simulate_exit: start must be strictly inside the domain");

    ExitRecord rec;
    rec.started_near_boundary = sd_before < 2.0 * std::sqrt(2.0 * scheme.dt);

    const double fold =
        (scheme.fold_small_jumps && !kernel.is_zero())
            ? 1.0 + cutoff.m2_eps / (2.0 * d)
            : 1.0;
    const double sigma = std::sqrt(2.0 * scheme.dt * fold);
    const double p_jump =
        kernel.is_zero() ? 0.0 : -std::expm1(-cutoff.lambda_eps * scheme.dt);
    const double inv_dt = 1.0 / scheme.dt;

    const StopPlane* plane = controls.stop_plane;
    PathObserver* obs = controls.observer;
    const bool watch_box = !domain.bounded;
    const BoundingBox& bb = domain.bounding_box;

    auto finish_at = [&](const double* pre, const double* post, bool by_jump,
                         double t) {
        rec.exit_time = t;
        rec.pre_exit_position = Eigen::Map<const Vec>(pre, d);
        rec.exited_by_jump = by_jump;
        Vec outside = Eigen::Map<const Vec>(post, d);
        rec.exit_position =
            by_jump ? outside : project_to_boundary(domain, outside);
    };

    double t = 0.0;
    for (;;) {
        if (t >= scheme.time_cap) {
            rec.truncated = true;
            rec.exit_time = t;
            rec.exit_position = Eigen::Map<const Vec>(x, d);
            rec.pre_exit_position = rec.exit_position;
            return rec;
        }

        // Diffusion.
        for (int i = 0; i < d; ++i) y[i] = x[i] + sigma * rng.gaussian();
        t += scheme.dt;

        if (watch_box) {
            bool in_box = true;
            for (int i = 0; i < d; ++i)
                if (y[i] < bb.lo[i] || y[i] > bb.hi[i]) in_box = false;
            if (!in_box) {
                rec.truncated = true;
                rec.exit_time = t;
                rec.exit_position = Eigen::Map<const Vec>(y, d);
                rec.pre_exit_position = Eigen::Map<const Vec>(x, d);
                return rec;
            }
        }

        // Interpolated stop-plane crossing for the segment x -> y. Valid
        // only when the crossing point itself is still inside the domain
        // (otherwise the path left the domain before reaching the plane).
        auto try_plane_hit = [&]() -> bool {
            if (!plane || x[plane->axis] <= plane->level ||
                y[plane->axis] > plane->level)
                return false;
            const double drop = x[plane->axis] - y[plane->axis];
            const double w = (x[plane->axis] - plane->level) / drop;
            double q[kMaxDim];
            for (int i = 0; i < d; ++i) q[i] = x[i] + w * (y[i] - x[i]);
            q[plane->axis] = plane->level;
            if (sd_at(q) <= 0.0) return false;
            rec.hit_stop = true;
            rec.exit_time = t;
            rec.exit_position = Eigen::Map<const Vec>(q, d);
            rec.pre_exit_position = Eigen::Map<const Vec>(x, d);
            return true;
        };

        double sd_after = sd_at(y);
        if (sd_after <= 0.0) {
            // Diffusive exit; the crossing may have passed the stop plane
            // first.
            if (try_plane_hit()) return rec;
            finish_at(x, y, false, t);
            return rec;
        }

        // Brownian-bridge boundary crossing between two interior points.
        if (scheme.bridge_correction) {
            const double e = sd_before * sd_after * inv_dt;
            if (e < 30.0 && rng.uniform() < std::exp(-e)) {
                if (plane && y[plane->axis] > plane->level) {
                    // The excursion touched the boundary mid-step. If the
                    // nearest boundary lies below the plane, the plane was
                    // crossed on the way; stop there (lateral position
                    // approximated by the nearest-boundary foot).
                    Vec foot = project_to_boundary(
                        domain, Eigen::Map<const Vec>(y, d));
                    if (foot[plane->axis] <= plane->level) {
                        foot[plane->axis] = plane->level;
                        if (domain.inside(foot)) {
                            rec.hit_stop = true;
                            rec.exit_time = t;
                            rec.exit_position = foot;
                            rec.pre_exit_position = Eigen::Map<const Vec>(x, d);
                            return rec;
                        }
                    }
                }
                finish_at(x, y, false, t);
                return rec;
            }
        }

        // Diffusive crossing of the stop plane between two interior points.
        if (try_plane_hit()) return rec;

        if (obs) obs->occupation(y, d, scheme.dt);

        // At most one compensated jump per step (diffuse-then-jump order).
        if (p_jump > 0.0 && rng.uniform() < p_jump) {
            const double radius = cutoff.sample_radius(rng.uniform());
            random_direction(rng, d, dir);
            if (obs) obs->jump(radius);
            double z[kMaxDim];
            for (int i = 0; i < d; ++i) z[i] = y[i] + radius * dir[i];
            const double sd_z = sd_at(z);
            if (sd_z <= 0.0) {
                finish_at(y, z, true, t);
                return rec;
            }
            if (plane && y[plane->axis] > plane->level &&
                z[plane->axis] <= plane->level) {
                rec.hit_stop = true;
                rec.exit_time = t;
                rec.exit_position = Eigen::Map<const Vec>(z, d);
                rec.pre_exit_position = Eigen::Map<const Vec>(y, d);
                return rec;
            }
            for (int i = 0; i < d; ++i) y[i] = z[i];
            sd_after = sd_z;
        }

        for (int i = 0; i < d; ++i) x[i] = y[i];
        sd_before = sd_after;
    }
}

ExitRecord simulate_exit(const Domain& domain, ConstVecRef start,
                         const JumpKernel& kernel, const SchemeConfig& scheme,
                         Philox& rng, const PathControls& controls) {
    if (kernel.is_zero() || kernel.base_cutoff().eps == scheme.eps)
        return simulate_exit(domain, start, kernel, kernel.base_cutoff(),
                             scheme, rng, controls);
    const JumpCutoff cutoff = kernel.make_cutoff(scheme.eps);
    return simulate_exit(domain, start, kernel, cutoff, scheme, rng, controls);
}

}  // namespace sbm
