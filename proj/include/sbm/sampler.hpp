#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "sbm/geometry.hpp"
#include "sbm/jump_kernel.hpp"
#include "sbm/rng.hpp"

namespace sbm {

// Euler scheme parameters. The Brownian part uses per-coordinate variance
// 2*dt (characteristic function e^{-t|theta|^2}); with folding on, the
// variance of the discarded sub-eps jumps is absorbed into the Gaussian
// step as a factor (1 + m2(eps)/(2d)).
struct SchemeConfig {
    double dt = 1e-3;
    double eps = 0.05;
    bool fold_small_jumps = true;
    bool bridge_correction = true;
    double time_cap = 1e4;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("scheme: dt must be > 0");
        if (!(eps > 0.0 && eps <= 1.0))
            throw std::invalid_argument("scheme: eps must be in (0,1]");
        if (!(time_cap >= 100.0 * dt))
            throw std::invalid_argument("scheme: time_cap must be >= 100*dt");
    }
};

struct ExitRecord {
    double exit_time = 0.0;
    Vec exit_position;
    Vec pre_exit_position;
    bool exited_by_jump = false;
    bool truncated = false;
    bool started_near_boundary = false;  // bias-risk warning
    bool hit_stop = false;               // stopped at a stop plane instead
};

// Per-step callbacks. occupation() receives the post-diffusion, pre-jump
// position with weight dt on every completed interior step.
struct PathObserver {
    virtual ~PathObserver() = default;
    virtual void occupation(const double* x, int dim, double dt) {}
    virtual void jump(double radius) {}
};

// Stop the path when it first crosses below level along the given axis
// (linearly interpolated crossing point for diffusive crossings).
struct StopPlane {
    int axis = 0;
    double level = 0.0;
};

struct PathControls {
    PathObserver* observer = nullptr;
    const StopPlane* stop_plane = nullptr;
};

// Simulate the jump diffusion to its first exit from `domain`. The start
// must be strictly inside. Cutoff data must come from kernel/scheme with
// matching eps (see make_cutoff).
ExitRecord simulate_exit(const Domain& domain, ConstVecRef start,
                         const JumpKernel& kernel, const JumpCutoff& cutoff,
                         const SchemeConfig& scheme, Philox& rng,
                         const PathControls& controls = {});

// Convenience overload using the kernel's build-time cutoff when it matches
// scheme.eps, otherwise a fresh one.
ExitRecord simulate_exit(const Domain& domain, ConstVecRef start,
                         const JumpKernel& kernel, const SchemeConfig& scheme,
                         Philox& rng, const PathControls& controls = {});

// ---------------------------------------------------------------------------
// Deterministic chunked path driver.
//
// Paths are partitioned into fixed-size chunks; path g draws from the
// Philox stream (seed, g), so the sample is a pure function of (seed,
// chunk_size, n). Chunk partials are computed independently and merged in
// chunk order, which makes aggregates byte-identical for any worker count.

struct RunOptions {
    std::uint64_t n_paths = 0;
    std::uint64_t chunk_size = 4096;
    int workers = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_offset = 0;  // shifts the path-index space
};

template <class Acc, class PathFn>
Acc run_paths(const RunOptions& opt, PathFn&& fn) {
    const std::uint64_t n = opt.n_paths;
    if (n == 0) return Acc{};
    const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk_size);
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Acc> partials(n_chunks);

    auto run_chunk = [&](std::uint64_t ci) {
        Acc acc;
        const std::uint64_t lo = ci * chunk;
        const std::uint64_t hi = std::min(n, lo + chunk);
        for (std::uint64_t g = lo; g < hi; ++g) {
            Philox rng(opt.seed, opt.stream_offset + g);
            fn(g, rng, acc);
        }
        partials[ci] = std::move(acc);
    };

    const int workers = std::max(1, opt.workers);
    if (workers == 1 || n_chunks == 1) {
        for (std::uint64_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        const int nw = static_cast<int>(
            std::min<std::uint64_t>(workers, n_chunks));
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::uint64_t ci = next.fetch_add(1);
                    if (ci >= n_chunks) return;
                    run_chunk(ci);
                }
            });
        for (auto& t : pool) t.join();
    }

    Acc total;
    for (auto& p : partials) total.merge(p);
    return total;
}

}  // namespace sbm
