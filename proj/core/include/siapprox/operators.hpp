// The approximation operators: projection onto V(phi, h) via the dual
// kernel, direct interpolation with the prefiltered interpolant, the
// mollified finite-difference smoother J_h, synthesis from coefficients, and
// the difference / directional-derivative operators.
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "siapprox/box.hpp"
#include "siapprox/dfilter.hpp"
#include "siapprox/kernel.hpp"
#include "siapprox/spaces.hpp"

namespace siapprox {

class TestSignal;

struct CoefficientField {
    double h = 1.0;
    IntBox box;                  // region where coefficients are exact
    std::vector<double> values;  // row-major over box
    std::shared_ptr<const SeparableKernel> kernel;
    std::string provenance;

    int dim() const { return box.dim(); }
    double at(std::span<const int> k) const {
        return box.contains(k) ? values[static_cast<size_t>(box.offset(k))] : 0.0;
    }
    std::string to_json() const;
};

// Gauss-Legendre panels for the projection analysis integrals.  Panels of
// width 1/panels_per_unit in kernel coordinates align with the spline knots
// for any panel count, so every panel integrand is polynomial times smooth.
struct AnalysisQuad {
    int panels_per_unit = 16;
    int gauss_nodes = 5;  // 2..8
};

// sum_k c[k] phi(x/h - k); refuses points whose kernel support is not fully
// covered by the stored coefficient box.
double synthesize(const CoefficientField& c, std::span<const double> x);

GridSignal synthesize_grid(const CoefficientField& c, const GridGeometry& geom);

// Stateful row-cached evaluator for streaming large d = 2 grids: fastest
// when evaluation proceeds with the first coordinate as the slow axis (the
// iteration order of weighted_lp_norm_fn); correct in any order.
class SynthesisEvaluator {
public:
    explicit SynthesisEvaluator(const CoefficientField& c) : c_(&c) {}
    double operator()(std::span<const double> x);

private:
    const CoefficientField* c_;
    double outer_cache_ = kInfinity;
    std::vector<double> row_;  // contracted coefficients for the cached outer slab
    int row_lo_ = 0;
};

// Projection coefficients: analysis inner products with phi followed by the
// inverse-autocorrelation (dual) filter.  cover_T is the half-width of the
// region whose synthesis the coefficients must support.
CoefficientField project(const TestSignal& f, std::shared_ptr<const SeparableKernel> kernel,
                         double h, double cover_T, const AnalysisQuad& quad = {},
                         int dft_N = 4096);
// Grid-signal surface: h / delta must be an integer m >= 8 (even); analysis
// integrals use composite Simpson on the stored samples.
CoefficientField project(const GridSignal& f, std::shared_ptr<const SeparableKernel> kernel,
                         double h, int dft_N = 4096);

// Interpolation coefficients c = f(h .)[.] * a, a = inverse sampled-kernel
// symbol, so synthesis matches f at every node h k.
CoefficientField interpolate(const TestSignal& f,
                             std::shared_ptr<const SeparableKernel> kernel, double h,
                             double cover_T, int dft_N = 4096);
CoefficientField interpolate(const GridSignal& f,
                             std::shared_ptr<const SeparableKernel> kernel, double h,
                             int dft_N = 4096);

// Normalized smooth bump supported on the unit ball.  The tilted variant
// multiplies in (1 + u_1), killing no odd moment: with the symmetric bump
// the odd-order terms of the smoothing bias cancel and J_h super-converges,
// so rate measurements at odd L need the tilted kernel.
class Mollifier {
public:
    static const Mollifier& standard(int dim);
    static const Mollifier& tilted(int dim);
    int dim() const { return dim_; }
    double operator()(std::span<const double> u) const;
    double normalization() const { return norm_const_; }

private:
    Mollifier(int dim, bool tilt);
    int dim_;
    bool tilt_;
    double norm_const_;
};

// J_h f = f * psi_h with psi_h = sum_{n=1}^{L} (-1)^{n-1} C(L,n) (nh)^{-d}
// chi(./(nh)), realized as a discrete convolution on the signal grid with
// each scaled bump normalized to unit discrete mass.  Refuses when the grid
// resolves any bump with fewer than 16 points per axis.
GridSignal smooth(const GridSignal& f, double h, int L,
                  const Mollifier& chi = Mollifier::standard(1));
GridSignal smooth(const TestSignal& f, const GridGeometry& geom, double h, int L,
                  const Mollifier& chi);
GridSignal smooth(const TestSignal& f, const GridGeometry& geom, double h, int L);

// Delta_u^L f(x) = sum_n (-1)^n C(L,n) f(x - n u)
double finite_difference(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> u, int L, std::span<const double> x);

// D_u^L f(x) by multinomial expansion over analytic partials.
double directional_derivative(const TestSignal& f, std::span<const double> u, int L,
                              std::span<const double> x);

double binomial(int n, int k);

}  // namespace siapprox
