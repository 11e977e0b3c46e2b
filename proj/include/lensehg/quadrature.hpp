#pragma once

// Multidimensional periodic trapezoidal quadrature. For integrands that
// are analytic in a strip around the (shifted) real torus the node-doubling
// scheme converges geometrically, with rate set by the distance to the
// nearest singularity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "lensehg/config.hpp"
#include "lensehg/errors.hpp"
#include "lensehg/modular.hpp"

namespace lensehg {

// A product contour: axis a runs over [0, period) + i * imag_offsets[a].
struct ContourSpec {
    int dim = 1;
    std::vector<double> imag_offsets; // empty means all offsets zero
    double period = 1.0;

    double offset(int axis) const {
        return imag_offsets.empty() ? 0.0 : imag_offsets.at(axis);
    }

    void validate() const {
        if (dim < 1) throw config_error("ContourSpec: dim must be >= 1");
        if (!imag_offsets.empty() &&
            static_cast<int>(imag_offsets.size()) != dim)
            throw config_error("ContourSpec: imag_offsets size mismatch");
        if (!(period > 0.0)) throw config_error("ContourSpec: period must be > 0");
    }
};

struct ValueWithError {
    cplx value{0.0, 0.0};
    double est_rel_error = 0.0;
    int nodes_used = 0; // per axis
    bool converged = false;
};

namespace detail {

// Deterministic parallel reduction: the node range is cut into a fixed
// number of blocks, each block is summed sequentially, and the block sums
// are added in block order. The result is bit-identical for any worker
// count.
inline constexpr int reduction_blocks = 64;

template <typename F>
cplx sum_nodes(F&& f, const ContourSpec& spec, int nodes) {
    const int dim = spec.dim;
    std::int64_t total = 1;
    for (int a = 0; a < dim; ++a) total *= nodes;

    const int blocks =
        static_cast<int>(std::min<std::int64_t>(reduction_blocks, total));
    std::vector<cplx> partial(blocks, cplx{0.0, 0.0});

    const double step = spec.period / nodes;
    auto run_block = [&](int b) {
        const std::int64_t lo = total * b / blocks;
        const std::int64_t hi = total * (b + 1) / blocks;
        std::vector<cplx> zs(dim);
        cplx acc{0.0, 0.0};
        for (std::int64_t idx = lo; idx < hi; ++idx) {
            std::int64_t rest = idx;
            for (int a = dim - 1; a >= 0; --a) {
                const int k = static_cast<int>(rest % nodes);
                rest /= nodes;
                zs[a] = cplx{step * k, spec.offset(a)};
            }
            acc += f(zs);
        }
        partial[b] = acc;
    };

    const int workers = std::min(thread_count(), blocks);
    if (workers <= 1) {
        for (int b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::exception_ptr first_error;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        std::mutex err_mutex;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (int b = t; b < blocks; b += workers) run_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    cplx sum{0.0, 0.0};
    for (int b = 0; b < blocks; ++b) sum += partial[b];
    return sum;
}

} // namespace detail

// Trapezoidal rule with `nodes` points per axis on the contour described
// by `spec`.
template <typename F>
cplx integrate_periodic(F&& f, const ContourSpec& spec, int nodes) {
    spec.validate();
    if (nodes < 1) throw config_error("integrate_periodic: nodes must be >= 1");
    double weight = 1.0;
    for (int a = 0; a < spec.dim; ++a) weight *= spec.period / nodes;
    return weight * detail::sum_nodes(f, spec, nodes);
}

// Node doubling until two successive grids agree to cfg.quad_tol in
// relative terms, or the per-axis cap is reached.
template <typename F>
ValueWithError refine_until(F&& f, const ContourSpec& spec,
                            const NumericsConfig& cfg) {
    cfg.validate();
    int n = cfg.quad_start_nodes;
    cplx prev = integrate_periodic(f, spec, n);
    ValueWithError out;
    out.value = prev;
    out.nodes_used = n;
    out.est_rel_error = 1.0;
    while (2 * n <= cfg.quad_max_nodes) {
        n *= 2;
        const cplx cur = integrate_periodic(f, spec, n);
        const double scale = std::max(std::abs(cur), 1e-300);
        out.value = cur;
        out.nodes_used = n;
        out.est_rel_error = std::abs(cur - prev) / scale;
        if (out.est_rel_error <= cfg.quad_tol) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    return out;
}

// Smallest vertical distance between any contour axis and any of the
// listed singularity heights.
inline double nearest_pole_distance(const std::vector<cplx>& poles,
                                    const ContourSpec& spec) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < spec.dim; ++a)
        for (const cplx& P : poles)
            best = std::min(best, std::abs(P.imag() - spec.offset(a)));
    return best;
}

} // namespace lensehg
