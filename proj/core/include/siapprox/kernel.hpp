// Compactly supported piecewise-polynomial kernels: B-splines and tensor
// products, exact derivatives and inner products, Fourier transforms with
// spectral derivatives, and numerical certification of the Strang-Fix order.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siapprox/box.hpp"

namespace siapprox {

class DiscreteFilter;  // dfilter.hpp

// One-dimensional piecewise polynomial on ascending breakpoints.
// On [knots[i], knots[i+1]) the value is sum_j coeffs[i][j] * (x - knots[i])^j
// (monomial basis in the local coordinate of the interval).  Evaluation is
// right-continuous at breakpoints and zero outside [knots.front(), knots.back()).
class PiecewisePoly1D {
public:
    PiecewisePoly1D(std::vector<double> knots, std::vector<std::vector<double>> coeffs);

    double operator()(double x) const;
    // Pointwise derivative of the given order, right-continuous convention.
    // Orders above the polynomial degree are rejected: the distributional
    // derivative picks up point masses at the breakpoints there.
    double derivative_at(double x, int order) const;
    PiecewisePoly1D derivative(int order) const;

    // phi(. + s): breakpoints move to knots - s.
    PiecewisePoly1D shifted(double s) const;

    double integral() const;
    // \int f(x) g(x - shift) dx, exact per-interval polynomial integration.
    double inner_product(const PiecewisePoly1D& g, double shift) const;

    // Fourier transform fhat(w) = \int f(x) e^{-jwx} dx and its w-derivatives
    // d^m/dw^m fhat(w) = \int (-jx)^m f(x) e^{-jwx} dx, both exact.
    std::complex<double> fourier(double omega, int deriv_order = 0) const;

    int degree() const { return degree_; }
    double support_lo() const { return knots_.front(); }
    double support_hi() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<std::vector<double>>& coeffs() const { return coeffs_; }

private:
    std::vector<double> knots_;
    std::vector<std::vector<double>> coeffs_;
    int degree_ = 0;

    int interval_of(double x) const;  // -1 if outside
};

// Causal B-spline of order L (degree L-1), support [0, L], built by the exact
// L-fold convolution of the unit box with itself.
PiecewisePoly1D bspline1d(int order_L);
// Centered variant: support [-L/2, L/2].
PiecewisePoly1D bspline1d_centered(int order_L);

// Exact rational coefficient table of the causal B-spline, for orders <= 8.
// Per interval, per monomial power: {numerator, denominator} in lowest terms.
struct RationalPoly {
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> intervals;
};
RationalPoly bspline1d_exact_coeffs(int order_L);

// Separable (tensor-product) kernel phi(x) = prod_i axis_i(x_i).
class SeparableKernel {
public:
    explicit SeparableKernel(std::vector<PiecewisePoly1D> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    const PiecewisePoly1D& axis(int i) const { return axes_[static_cast<size_t>(i)]; }

    double operator()(std::span<const double> x) const;
    double eval_deriv(std::span<const int> l, std::span<const double> x) const;

    SeparableKernel centered() const;       // shift every axis by +mid(support)
    SeparableKernel shifted(std::span<const double> s) const;

    double integral() const;
    // Half-width of the support box, per axis.
    double support_radius(int axis) const;

    std::string describe() const;

private:
    std::vector<PiecewisePoly1D> axes_;
};

SeparableKernel bspline(int order_L);           // 1-D causal
SeparableKernel bspline_centered(int order_L);  // 1-D centered
SeparableKernel tensor_product(std::vector<PiecewisePoly1D> axes);
SeparableKernel tensor_product(const std::vector<SeparableKernel>& axes);

// Fourier transform of a separable kernel and its partial derivatives,
// phihat(w) = prod_i axis_i^(w_i), d^l phihat = prod_i d^{l_i} axis_i^.
class KernelSpectrum {
public:
    explicit KernelSpectrum(const SeparableKernel& kernel) : kernel_(&kernel) {}

    std::complex<double> value(std::span<const double> omega) const;
    std::complex<double> deriv(std::span<const int> l, std::span<const double> omega) const;

private:
    const SeparableKernel* kernel_;
};

// Largest L <= max_L with phihat(0) != 0 and |d^l phihat(2 pi k)| <= tol for
// all |l| <= L-1 and 0 < ||k||_inf <= k_max.  Returns 0 when phihat(0) = 0.
int strang_fix_order(const SeparableKernel& kernel, int max_L, double tol, int k_max = 8);

// a_phi[k] = \int phi(x) phi(x-k) dx for ||k||_inf <= radius, exact.
DiscreteFilter autocorrelation_sequence(const SeparableKernel& kernel, int radius);

// Max over the grid of |sum_{||k||_inf <= K} k^l phi_int(x - k) - x^l| where
// phi_int = sum_m prefilter[m] phi(. - m).  Returns {residual, K}.
struct ReproductionResidual {
    double residual;
    int truncation;
};
ReproductionResidual polynomial_reproduction_residual(
    const SeparableKernel& kernel, const DiscreteFilter& prefilter,
    std::span<const int> l, std::span<const Point> grid, int K);

// JSON round-trip of the kernel description:
// {dim, axes: [{knots: [...], coeffs: [[...]]}], rational (optional)}.
std::string kernel_to_json(const SeparableKernel& kernel,
                           std::optional<int> exact_bspline_order = std::nullopt);
SeparableKernel kernel_from_json(const std::string& text);

}  // namespace siapprox
