// Weighted L_p / l_p / hybrid W_p norms on grid-discretized signals, Sobolev
// weights, derivative-magnitude fields and the fractional operator D^r as a
// Fourier multiplier on window-periodized grids.
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siapprox/box.hpp"

namespace siapprox {

class TestSignal;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Sobolev weight <x>^alpha = (1 + ||x||^2)^{alpha/2}.
double weight(std::span<const double> x, double alpha);

// Growth certificate |f(x)| <= constant * <x>^beta.
struct GrowthCert {
    double beta;
    double constant;
};

struct WeightedNormSpec {
    double p = 2.0;      // in [1, inf]
    double alpha = 0.0;  // magnitude, >= 0
    int sign = -1;       // -1: growth-tolerant <.>^{-alpha}; +1: growth-penalizing
    double T = 1.0;      // window [-T, T]^d
    double delta = 1.0;  // composite-Simpson panel step

    double signed_alpha() const { return sign * alpha; }
};

struct NormResult {
    double norm = 0.0;
    double tail_bound = 0.0;
    bool flagged = false;
    std::string note;
};

class GridSignal {
public:
    GridSignal(GridGeometry geom, std::vector<double> values, std::string provenance);

    // The sampled signal keeps a reference to f for off-grid evaluation:
    // f must outlive the result.
    static GridSignal sample(const TestSignal& f, const GridGeometry& geom);
    static GridSignal from_callback(std::function<double(std::span<const double>)> fn,
                                    const GridGeometry& geom, std::string provenance);

    const GridGeometry& geometry() const { return geom_; }
    int dim() const { return geom_.dim; }

    double at(std::span<const int> idx) const;
    double at1d(std::int64_t j) const { return values_[static_cast<size_t>(j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool has_callback() const { return static_cast<bool>(callback_); }
    double call(std::span<const double> x) const { return callback_(x); }

    const std::optional<GrowthCert>& growth() const { return growth_; }
    void set_growth(GrowthCert g) { growth_ = g; }
    bool compact_support() const { return compact_; }
    void set_compact_support(bool c) { compact_ = c; }
    bool window_periodic() const { return periodic_; }
    void set_window_periodic(bool p) { periodic_ = p; }

    const std::string& provenance() const { return provenance_; }
    bool flagged() const { return flagged_; }
    const std::string& flag_note() const { return flag_note_; }
    void set_flag(std::string note) {
        flagged_ = true;
        flag_note_ = std::move(note);
    }

    // Binary-free serialization: one "k0[,k1...],value" line per node.
    std::string to_csv() const;
    std::string to_json() const;

private:
    GridGeometry geom_;
    std::vector<double> values_;
    std::function<double(std::span<const double>)> callback_;
    std::string provenance_;
    std::optional<GrowthCert> growth_;
    bool compact_ = false;
    bool periodic_ = false;
    bool flagged_ = false;
    std::string flag_note_;
};

namespace detail {

std::vector<double> simpson_axis_weights(std::int64_t npoints, double delta);

// Tail of the p-integral of C^p <x>^{(beta-alpha_signed)p} outside [-T, T]^d,
// reported in norm units (^{1/p}); infinite when the integral diverges.
double weighted_tail_bound(double p, double signed_alpha, const GrowthCert& g, double T,
                           int dim);

}  // namespace detail

// Composite-Simpson (or grid-sup for p = inf) weighted norm of a field given
// pointwise.  The growth certificate feeds the window-adequacy tail estimate;
// compact means the field vanishes outside the window (tail exactly 0).
template <typename F>
NormResult weighted_lp_norm_fn(F&& field, int dim, const WeightedNormSpec& spec,
                               const std::optional<GrowthCert>& growth, bool compact) {
    if (spec.p < 1.0) throw std::invalid_argument("weighted norm: p must be >= 1");
    const GridGeometry g(dim, spec.T, spec.delta);
    const std::int64_t n = g.points_per_axis();
    if (spec.p != kInfinity && n % 2 == 0)
        throw std::invalid_argument("weighted norm: Simpson needs an even panel count");
    const std::vector<double> w1 = detail::simpson_axis_weights(n, spec.delta);
    const double sa = spec.signed_alpha();

    double acc = 0.0, peak = 0.0;
    std::vector<double> x(static_cast<size_t>(dim));
    Index idx(static_cast<size_t>(dim), 0);
    while (true) {
        double qw = 1.0;
        for (int a = 0; a < dim; ++a) {
            x[static_cast<size_t>(a)] = g.coord(idx[static_cast<size_t>(a)]);
            qw *= w1[static_cast<size_t>(idx[static_cast<size_t>(a)])];
        }
        const double v = std::abs(field(std::span<const double>(x))) * weight(x, sa);
        if (spec.p == kInfinity)
            peak = std::max(peak, v);
        else
            acc += qw * std::pow(v, spec.p);
        int a = dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }

    NormResult r;
    r.norm = (spec.p == kInfinity) ? peak : std::pow(acc, 1.0 / spec.p);
    if (compact) {
        r.tail_bound = 0.0;
    } else if (growth) {
        r.tail_bound = detail::weighted_tail_bound(spec.p, sa, *growth, spec.T, dim);
        if (spec.p == kInfinity) {
            if (r.tail_bound > r.norm) {
                r.flagged = true;
                r.note = "window too small: exterior sup bound exceeds grid sup";
            }
        } else if (!(r.tail_bound <= 0.01 * r.norm)) {
            r.flagged = true;
            r.note = "window too small: tail bound above 1% of the windowed norm";
        }
    } else {
        r.tail_bound = std::numeric_limits<double>::quiet_NaN();
        r.note = "no growth certificate declared";
    }
    return r;
}

// Norm of a stored grid signal over the spec window (must be nested in the
// signal window with aligned nodes).
NormResult weighted_lp_norm(const GridSignal& f, const WeightedNormSpec& spec);

// Hybrid (mixed) norm over the unit cell:
// ( int_{[0,1]^d} ( sum_{||k||_inf <= K} |f(x+k)| <x+k>^alpha )^p dx )^{1/p}.
// quad_points is the per-axis Simpson node count on [0,1].
struct HybridNormResult {
    double norm;
    int fold_radius;
    double tail_estimate;
};
HybridNormResult hybrid_norm_fn(const std::function<double(std::span<const double>)>& f,
                                int dim, double p, double alpha, int K,
                                int quad_points = 65);
HybridNormResult hybrid_norm(const GridSignal& f, double p, double alpha, int K);

// f^{(L)} on a grid from analytic partials.
GridSignal derivative_magnitude(const TestSignal& f, const GridGeometry& geom, int L);
// Finite-difference fallback (4th order central, one-sided near the border;
// the boundary band is flagged on the result).
GridSignal derivative_magnitude_fd(const GridSignal& f, int L);

// DFT-multiplier realization of D^r on the window-periodized grid.  The
// result is flagged when the signal is neither declared window-periodic nor
// negligible (|f| < 1e-6 * max|f|) at the window boundary.
GridSignal fractional_derivative(const GridSignal& f, double r);

// l_{p,w} norm of a sequence c[k], weight <h k>^{signed_alpha}.
double sequence_lp_norm(const std::vector<double>& values, const IntBox& box, double h,
                        double p, double signed_alpha);

}  // namespace siapprox
