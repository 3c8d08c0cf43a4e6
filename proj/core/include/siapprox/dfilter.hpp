// Finitely supported sequences on Z^d: arithmetic, symbol evaluation and
// stable periodic inversion, used to build the interpolation prefilter and
// the dual-projection filter.
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siapprox/box.hpp"

namespace siapprox {

class PiecewisePoly1D;
class SeparableKernel;

// Geometric decay certificate for truncated IIR impulse responses:
// |a[k]| <= C * rho^{||k||_inf} on the stored support.
struct DecayCert {
    double rho;
    double C;
};

class DiscreteFilter {
public:
    DiscreteFilter() : box_(IntBox::cube(1, 0, 0)), values_{0.0} {}
    DiscreteFilter(IntBox box, std::vector<double> values);

    static DiscreteFilter delta(int dim);
    static DiscreteFilter from_range1d(int lo, std::vector<double> values);
    // Outer product of 1-D factors.
    static DiscreteFilter tensor(const std::vector<DiscreteFilter>& axes);

    int dim() const { return box_.dim(); }
    const IntBox& box() const { return box_; }
    double at(std::span<const int> k) const {
        return box_.contains(k) ? values_[static_cast<size_t>(box_.offset(k))] : 0.0;
    }
    double at1d(int k) const {
        const int kk[1] = {k};
        return at(kk);
    }
    const std::vector<double>& values() const { return values_; }

    bool is_symmetric(double tol = 0.0) const;

    // ahat(omega) = sum_k a[k] e^{-j <omega, k>}
    std::complex<double> symbol(std::span<const double> omega) const;

    double sup_norm() const;
    double l1_norm() const;

    const std::optional<DecayCert>& decay() const { return decay_; }
    void set_decay(DecayCert c) { decay_ = c; }

    // Drops entries below the threshold from the border inward, keeping the
    // support box tight.  Records the threshold used.
    DiscreteFilter truncated(double threshold) const;
    double truncation_threshold() const { return truncation_threshold_; }

private:
    IntBox box_;
    std::vector<double> values_;
    std::optional<DecayCert> decay_;
    double truncation_threshold_ = 0.0;
};

// Exact finite convolution; support is the Minkowski sum.
DiscreteFilter convolve(const DiscreteFilter& a, const DiscreteFilter& b);

// Integer samples phi[k] of a kernel, exact piecewise-polynomial evaluation.
DiscreteFilter sample_kernel(const SeparableKernel& kernel);
DiscreteFilter sample_kernel_axis(const PiecewisePoly1D& axis);

// Impulse response of 1/ahat on the N-point DFT grid, centered truncation at
// |entry| < 1e-14, with a geometric decay certificate estimated from the
// stored tail.  Refuses (std::domain_error) if |ahat| < tol anywhere on the
// grid, reporting the offending frequency.  1-D only; multi-dimensional
// inverses are built per axis from separable factors.
DiscreteFilter invert_symbol_periodic(const DiscreteFilter& f, int N, double tol);

// Inverse-autocorrelation filter q with qhat = 1/ahat_phi, per axis, so that
// the dual kernel is phi_dual = sum_k q[k] phi(. - k).  Refuses when the
// Riesz lower bound fails on the grid, reporting the minimum symbol value.
DiscreteFilter dual_filter(const SeparableKernel& kernel, int N = 4096);
DiscreteFilter dual_filter_axis(const PiecewisePoly1D& axis, int N = 4096);

// Interpolation prefilter a with ahat = 1 / sum_k phi[k] e^{-j<omega,k>}.
DiscreteFilter interp_prefilter(const SeparableKernel& kernel, int N = 4096);
DiscreteFilter interp_prefilter_axis(const PiecewisePoly1D& axis, int N = 4096);

// JSON round-trip: {dim, entries: [[k..., value], ...], decay: {rho, C}|null}.
std::string filter_to_json(const DiscreteFilter& f);
DiscreteFilter filter_from_json(const std::string& text);

}  // namespace siapprox
