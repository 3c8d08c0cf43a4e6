#include "siapprox/spaces.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "siapprox/signals.hpp"

#include <fftw3.h>
#include <nlohmann/json.hpp>

namespace siapprox {

double weight(std::span<const double> x, double alpha) {
    if (alpha == 0.0) return 1.0;
    return std::pow(1.0 + squared_norm(x), 0.5 * alpha);
}

namespace detail {

std::vector<double> simpson_axis_weights(std::int64_t npoints, double delta) {
    std::vector<double> w(static_cast<size_t>(npoints), 0.0);
    if (npoints == 1) {
        w[0] = delta;  // degenerate, unused in practice
        return w;
    }
    for (std::int64_t j = 0; j < npoints; ++j) {
        double c;
        if (j == 0 || j == npoints - 1)
            c = 1.0;
        else if (j % 2 == 1)
            c = 4.0;
        else
            c = 2.0;
        w[static_cast<size_t>(j)] = c * delta / 3.0;
    }
    return w;
}

double weighted_tail_bound(double p, double signed_alpha, const GrowthCert& g, double T,
                           int dim) {
    const double expo = g.beta + signed_alpha;  // integrand decays like <x>^{expo}
    if (p == kInfinity) {
        if (expo > 0) return kInfinity;
        return g.constant * std::pow(1.0 + T * T, 0.5 * expo);
    }
    const double q = -expo * p;  // decay exponent of |.|^p
    if (q <= static_cast<double>(dim)) return kInfinity;
    // int_{||x|| > T} ||x||^{-q} dx = s_d T^{d-q} / (q - d),  s_1 = 2, s_2 = 2 pi
    const double sd = (dim == 1) ? 2.0 : (dim == 2 ? 2.0 * std::acos(-1.0) : 4.0 * std::acos(-1.0));
    const double integral =
        sd * std::pow(T, static_cast<double>(dim) - q) / (q - static_cast<double>(dim));
    return g.constant * std::pow(integral, 1.0 / p);
}

}  // namespace detail

GridSignal::GridSignal(GridGeometry geom, std::vector<double> values, std::string provenance)
    : geom_(geom), values_(std::move(values)), provenance_(std::move(provenance)) {
    if (static_cast<std::int64_t>(values_.size()) != geom_.total_points())
        throw std::invalid_argument("GridSignal: value count does not match geometry");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("GridSignal: non-finite sample (upstream failure)");
}

GridSignal GridSignal::sample(const TestSignal& f, const GridGeometry& geom) {
    if (f.dim() != geom.dim) throw std::invalid_argument("GridSignal::sample: rank mismatch");
    std::vector<double> vals(static_cast<size_t>(geom.total_points()));
    const std::int64_t n = geom.points_per_axis();
    std::vector<double> x(static_cast<size_t>(geom.dim));
    Index idx(static_cast<size_t>(geom.dim), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < geom.dim; ++a) x[static_cast<size_t>(a)] = geom.coord(idx[static_cast<size_t>(a)]);
        vals[static_cast<size_t>(flat++)] = f.value(x);
        int a = geom.dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    GridSignal g(geom, std::move(vals), "sampled:" + f.family());
    g.callback_ = [&f](std::span<const double> p) { return f.value(p); };
    g.growth_ = GrowthCert{f.growth_order(), f.growth_constant()};
    return g;
}

GridSignal GridSignal::from_callback(std::function<double(std::span<const double>)> fn,
                                     const GridGeometry& geom, std::string provenance) {
    std::vector<double> vals(static_cast<size_t>(geom.total_points()));
    const std::int64_t n = geom.points_per_axis();
    std::vector<double> x(static_cast<size_t>(geom.dim));
    Index idx(static_cast<size_t>(geom.dim), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < geom.dim; ++a) x[static_cast<size_t>(a)] = geom.coord(idx[static_cast<size_t>(a)]);
        vals[static_cast<size_t>(flat++)] = fn(x);
        int a = geom.dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    GridSignal g(geom, std::move(vals), std::move(provenance));
    g.callback_ = std::move(fn);
    return g;
}

double GridSignal::at(std::span<const int> idx) const {
    const std::int64_t n = geom_.points_per_axis();
    std::int64_t off = 0;
    for (int a = 0; a < dim(); ++a) off = off * n + idx[static_cast<size_t>(a)];
    return values_[static_cast<size_t>(off)];
}

std::string GridSignal::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    const std::int64_t n = geom_.points_per_axis();
    Index idx(static_cast<size_t>(dim()), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < dim(); ++a) os << idx[static_cast<size_t>(a)] << ",";
        os << values_[static_cast<size_t>(flat++)] << "\n";
        int a = dim() - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return os.str();
}

std::string GridSignal::to_json() const {
    nlohmann::json j;
    j["dim"] = dim();
    j["T"] = geom_.T;
    j["delta"] = geom_.delta;
    j["provenance"] = provenance_;
    j["values"] = values_;
    if (growth_) j["growth"] = {{"beta", growth_->beta}, {"constant", growth_->constant}};
    j["flagged"] = flagged_;
    return j.dump();
}

NormResult weighted_lp_norm(const GridSignal& f, const WeightedNormSpec& spec) {
    if (spec.T > f.geometry().T + 1e-12)
        throw std::invalid_argument("weighted_lp_norm: spec window exceeds the signal window");
    const double ratio = spec.delta / f.geometry().delta;
    const auto m = static_cast<std::int64_t>(ratio + 0.5);
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument(
            "weighted_lp_norm: signal grid step must divide the quadrature step");
    const double off = (f.geometry().T - spec.T) / f.geometry().delta;
    const auto j0 = static_cast<std::int64_t>(off + 0.5);
    if (std::abs(off - static_cast<double>(j0)) > 1e-9)
        throw std::invalid_argument("weighted_lp_norm: windows are not node-aligned");

    const std::int64_t n = f.geometry().points_per_axis();
    const int d = f.dim();
    auto field = [&](std::span<const double> x) {
        std::int64_t offlat = 0;
        for (int a = 0; a < d; ++a) {
            const double jr = (x[static_cast<size_t>(a)] + f.geometry().T) / f.geometry().delta;
            const auto j = static_cast<std::int64_t>(jr + 0.5);
            offlat = offlat * n + j;
        }
        return f.values()[static_cast<size_t>(offlat)];
    };
    return weighted_lp_norm_fn(field, d, spec, f.growth(), f.compact_support());
}

HybridNormResult hybrid_norm_fn(const std::function<double(std::span<const double>)>& f,
                                int dim, double p, double alpha, int K, int quad_points) {
    if (p < 1.0) throw std::invalid_argument("hybrid_norm: p must be >= 1");
    if (quad_points < 3 || quad_points % 2 == 0)
        throw std::invalid_argument("hybrid_norm: quad_points must be odd and >= 3");
    const double dq = 1.0 / static_cast<double>(quad_points - 1);
    const std::vector<double> w1 = detail::simpson_axis_weights(quad_points, dq);

    const IntBox folds = IntBox::cube(dim, -K, K);
    std::vector<double> x(static_cast<size_t>(dim));
    std::vector<double> y(static_cast<size_t>(dim));
    Index idx(static_cast<size_t>(dim), 0);
    double acc = 0.0, peak = 0.0;
    while (true) {
        double qw = 1.0;
        for (int a = 0; a < dim; ++a) {
            x[static_cast<size_t>(a)] = static_cast<double>(idx[static_cast<size_t>(a)]) * dq;
            qw *= w1[static_cast<size_t>(idx[static_cast<size_t>(a)])];
        }
        double inner = 0.0;
        folds.for_each([&](std::span<const int> k) {
            for (int a = 0; a < dim; ++a)
                y[static_cast<size_t>(a)] =
                    x[static_cast<size_t>(a)] + static_cast<double>(k[static_cast<size_t>(a)]);
            const double v = f(y);
            if (v != 0.0) inner += std::abs(v) * weight(y, alpha);
        });
        if (p == kInfinity)
            peak = std::max(peak, inner);
        else
            acc += qw * std::pow(inner, p);
        int a = dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < quad_points) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    HybridNormResult r;
    r.norm = (p == kInfinity) ? peak : std::pow(acc, 1.0 / p);
    r.fold_radius = K;
    r.tail_estimate = 0.0;  // caller-supplied kernels are compactly supported
    return r;
}

HybridNormResult hybrid_norm(const GridSignal& f, double p, double alpha, int K) {
    if (!f.has_callback() && f.geometry().T < static_cast<double>(K) + 1.0)
        throw std::invalid_argument(
            "hybrid_norm: need an analytic callback or window >= K+1");
    if (f.has_callback())
        return hybrid_norm_fn([&](std::span<const double> x) { return f.call(x); }, f.dim(), p,
                              alpha, K);
    // nearest-node lookup on the stored grid
    const auto& geom = f.geometry();
    return hybrid_norm_fn(
        [&](std::span<const double> x) -> double {
            std::int64_t off = 0;
            const std::int64_t n = geom.points_per_axis();
            for (int a = 0; a < f.dim(); ++a) {
                const double jr = (x[static_cast<size_t>(a)] + geom.T) / geom.delta;
                const auto j = static_cast<std::int64_t>(std::llround(jr));
                if (j < 0 || j >= n) return 0.0;
                off = off * n + j;
            }
            return f.values()[static_cast<size_t>(off)];
        },
        f.dim(), p, alpha, K);
}

GridSignal derivative_magnitude(const TestSignal& f, const GridGeometry& geom, int L) {
    if (f.dim() != geom.dim)
        throw std::invalid_argument("derivative_magnitude: rank mismatch");
    std::vector<double> vals(static_cast<size_t>(geom.total_points()));
    const std::int64_t n = geom.points_per_axis();
    std::vector<double> x(static_cast<size_t>(geom.dim));
    Index idx(static_cast<size_t>(geom.dim), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < geom.dim; ++a) x[static_cast<size_t>(a)] = geom.coord(idx[static_cast<size_t>(a)]);
        vals[static_cast<size_t>(flat++)] = f.derivative_magnitude(L, x);
        int a = geom.dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    GridSignal g(geom, std::move(vals), "derivative-magnitude L=" + std::to_string(L));
    // self-certify growth on the outermost shell: the library families keep
    // their envelope order under differentiation
    double c = 1e-300;
    {
        const std::int64_t last = n - 1;
        std::vector<double> xb(static_cast<size_t>(geom.dim));
        Index ib(static_cast<size_t>(geom.dim), 0);
        std::int64_t fl = 0;
        for (double v : g.values()) {
            bool edge = false;
            for (int a = 0; a < geom.dim; ++a)
                if (ib[static_cast<size_t>(a)] == 0 || ib[static_cast<size_t>(a)] == last)
                    edge = true;
            if (edge) {
                for (int a = 0; a < geom.dim; ++a)
                    xb[static_cast<size_t>(a)] = geom.coord(ib[static_cast<size_t>(a)]);
                c = std::max(c, std::abs(v) / weight(xb, f.growth_order()));
            }
            ++fl;
            int a = geom.dim - 1;
            while (a >= 0) {
                if (++ib[static_cast<size_t>(a)] < n) break;
                ib[static_cast<size_t>(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }
    g.set_growth({f.growth_order(), 2.0 * c});
    return g;
}

namespace {

// Solve for finite-difference stencil weights on the given offsets:
// sum_i w_i o_i^k = k! [k == order], k = 0..n-1.
std::vector<double> fd_stencil(const std::vector<int>& offsets, int order) {
    const size_t n = offsets.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < n; ++i)
            A[k][i] = std::pow(static_cast<double>(offsets[i]), static_cast<double>(k));
        double rhs = 0.0;
        if (static_cast<int>(k) == order) {
            rhs = 1.0;
            for (int s = 2; s <= order; ++s) rhs *= static_cast<double>(s);
        }
        A[k][n] = rhs;
    }
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double m = A[r][col] / A[col][col];
            for (size_t c = col; c <= n; ++c) A[r][c] -= m * A[col][c];
        }
    }
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) w[i] = A[i][n] / A[i][i];
    return w;
}

}  // namespace

GridSignal derivative_magnitude_fd(const GridSignal& f, int L) {
    const auto& geom = f.geometry();
    const int d = geom.dim;
    const auto n = static_cast<int>(geom.points_per_axis());
    const double h = geom.delta;

    std::vector<double> out(static_cast<size_t>(geom.total_points()), 0.0);
    const auto orders = multi_indices_of_order(d, L);

    // per-axis, per-derivative-order stencil cache; one-sided near the border
    auto stencil_for = [&](int order, int pos) {
        const int half = (order + 5) / 2;  // central width (order+4 or +5, odd count)
        const int width = 2 * half + 1;
        std::vector<int> off(static_cast<size_t>(width));
        int lo = -half;
        if (pos - half < 0) lo = -pos;
        if (pos + (lo + width - 1) > n - 1) lo = (n - 1 - pos) - (width - 1);
        for (int i = 0; i < width; ++i) off[static_cast<size_t>(i)] = lo + i;
        return std::make_pair(off, fd_stencil(off, order));
    };

    Index idx(static_cast<size_t>(d), 0);
    std::int64_t flat = 0;
    const int band = 4;
    bool boundary_touched = false;
    std::vector<int> probe(static_cast<size_t>(d));
    while (true) {
        double sum = 0.0;
        for (const Index& l : orders) {
            // apply per-axis stencils by recursive contraction
            std::function<double(int, Index&)> apply = [&](int axis, Index& at) -> double {
                if (axis == d) return f.at(at);
                const int order = l[static_cast<size_t>(axis)];
                if (order == 0) return apply(axis + 1, at);
                auto [off, w] = stencil_for(order, at[static_cast<size_t>(axis)]);
                double acc = 0.0;
                const int base = at[static_cast<size_t>(axis)];
                for (size_t i = 0; i < off.size(); ++i) {
                    at[static_cast<size_t>(axis)] = base + off[i];
                    acc += w[i] * apply(axis + 1, at);
                }
                at[static_cast<size_t>(axis)] = base;
                return acc / std::pow(h, order);
            };
            Index at = idx;
            sum += std::abs(apply(0, at));
        }
        out[static_cast<size_t>(flat++)] = sum;
        for (int a = 0; a < d; ++a)
            if (idx[static_cast<size_t>(a)] < band || idx[static_cast<size_t>(a)] >= n - band)
                boundary_touched = true;
        int a = d - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < n) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    GridSignal g(geom, std::move(out), "derivative-magnitude-fd L=" + std::to_string(L));
    if (f.growth()) g.set_growth(*f.growth());
    if (boundary_touched)
        g.set_flag("one-sided finite-difference stencils in the boundary band");
    return g;
}

namespace {
std::mutex fftw_mutex;
}

namespace {

GridSignal fractional_core(const GridSignal& f, double r) {
    const auto& geom = f.geometry();
    const int d = geom.dim;
    const auto n = static_cast<int>(geom.points_per_axis());
    const int m = n - 1;  // periodic length per axis
    const double period = 2.0 * geom.T;

    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= m;

    std::vector<std::complex<double>> buf(static_cast<size_t>(total));
    {
        Index idx(static_cast<size_t>(d), 0);
        std::int64_t flat = 0;
        while (true) {
            buf[static_cast<size_t>(flat++)] = f.at(idx);
            int a = d - 1;
            while (a >= 0) {
                if (++idx[static_cast<size_t>(a)] < m) break;
                idx[static_cast<size_t>(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        std::vector<int> sizes(static_cast<size_t>(d), m);
        fftw_plan plan = fftw_plan_dft(d, sizes.data(),
                                       reinterpret_cast<fftw_complex*>(buf.data()),
                                       reinterpret_cast<fftw_complex*>(buf.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    const double base = 2.0 * std::acos(-1.0) / period;
    {
        Index idx(static_cast<size_t>(d), 0);
        std::int64_t flat = 0;
        while (true) {
            double wsq = 0.0;
            for (int a = 0; a < d; ++a) {
                int j = idx[static_cast<size_t>(a)];
                if (j > m / 2) j -= m;
                const double w = base * static_cast<double>(j);
                wsq += w * w;
            }
            buf[static_cast<size_t>(flat++)] *= std::pow(1.0 + wsq, 0.5 * r);
            int a = d - 1;
            while (a >= 0) {
                if (++idx[static_cast<size_t>(a)] < m) break;
                idx[static_cast<size_t>(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        std::vector<int> sizes(static_cast<size_t>(d), m);
        fftw_plan plan = fftw_plan_dft(d, sizes.data(),
                                       reinterpret_cast<fftw_complex*>(buf.data()),
                                       reinterpret_cast<fftw_complex*>(buf.data()),
                                       FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    std::vector<double> vals(static_cast<size_t>(geom.total_points()));
    {
        const double scale = 1.0 / static_cast<double>(total);
        Index idx(static_cast<size_t>(d), 0);
        std::int64_t flat = 0;
        const std::int64_t np = geom.points_per_axis();
        while (true) {
            std::int64_t src = 0;
            for (int a = 0; a < d; ++a) {
                int j = idx[static_cast<size_t>(a)];
                if (j == m) j = 0;  // periodic duplicate node
                src = src * m + j;
            }
            vals[static_cast<size_t>(flat++)] = buf[static_cast<size_t>(src)].real() * scale;
            int a = d - 1;
            while (a >= 0) {
                if (++idx[static_cast<size_t>(a)] < static_cast<int>(np)) break;
                idx[static_cast<size_t>(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }
    GridSignal out(geom, std::move(vals), "spectral");
    out.set_window_periodic(f.window_periodic());
    if (f.growth()) out.set_growth(*f.growth());
    return out;
}

}  // namespace

GridSignal fractional_derivative(const GridSignal& f, double r) {
    if (r == 0.0) return f;
    bool contaminated = false;
    if (!f.window_periodic()) {
        const auto n = static_cast<int>(f.geometry().points_per_axis());
        double peak = 0.0;
        for (double v : f.values()) peak = std::max(peak, std::abs(v));
        double boundary = 0.0;
        Index idx(static_cast<size_t>(f.dim()), 0);
        for (double v : f.values()) {
            bool on_edge = false;
            for (int a = 0; a < f.dim(); ++a)
                if (idx[static_cast<size_t>(a)] == 0 || idx[static_cast<size_t>(a)] == n - 1)
                    on_edge = true;
            if (on_edge) boundary = std::max(boundary, std::abs(v));
            int a = f.dim() - 1;
            while (a >= 0) {
                if (++idx[static_cast<size_t>(a)] < n) break;
                idx[static_cast<size_t>(a)] = 0;
                --a;
            }
            if (a < 0) break;
        }
        contaminated = peak > 0.0 && boundary > 1e-6 * peak;
    }
    GridSignal out = fractional_core(f, r);
    if (contaminated)
        out.set_flag("wrap-around contamination: boundary magnitude above 1e-6 of max");
    return out;
}

double sequence_lp_norm(const std::vector<double>& values, const IntBox& box, double h,
                        double p, double signed_alpha) {
    if (static_cast<std::int64_t>(values.size()) != box.size())
        throw std::invalid_argument("sequence_lp_norm: size mismatch");
    double acc = 0.0, peak = 0.0;
    std::vector<double> x(static_cast<size_t>(box.dim()));
    box.for_each([&](std::span<const int> k) {
        for (int a = 0; a < box.dim(); ++a)
            x[static_cast<size_t>(a)] = h * static_cast<double>(k[static_cast<size_t>(a)]);
        const double v = std::abs(values[static_cast<size_t>(box.offset(k))]) *
                         weight(x, signed_alpha);
        if (p == kInfinity)
            peak = std::max(peak, v);
        else
            acc += std::pow(v, p);
    });
    return (p == kInfinity) ? peak : std::pow(acc, 1.0 / p);
}

}  // namespace siapprox
