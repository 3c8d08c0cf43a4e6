#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "siapprox/dfilter.hpp"
#include "siapprox/kernel.hpp"

#include "oracles.hpp"

using namespace siapprox;

TEST_CASE("bspline(1) is the unit box, right-continuous") {
    const auto b0 = bspline1d(1);
    CHECK(b0(0.5) == 1.0);
    CHECK(b0(0.0) == 1.0);   // value from the right
    CHECK(b0(1.0) == 0.0);   // outside, right-continuity at the upper knot
    CHECK(b0(-0.1) == 0.0);
    CHECK(b0(1.1) == 0.0);
    CHECK(b0.integral() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bspline(0) is rejected") {
    CHECK_THROWS_AS(bspline1d(0), std::invalid_argument);
}

TEST_CASE("bspline(2) peaks at 1 and has unit integral") {
    const auto b1 = bspline1d(2);
    CHECK(b1(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b1.integral() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b1(0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("bspline(4) integer samples match the convolution oracle") {
    const auto b3 = bspline1d(4);
    for (int k = 0; k <= 4; ++k) {
        const double expect = oracles::bspline_by_convolution(4, static_cast<double>(k));
        CHECK(b3(static_cast<double>(k)) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(b3(1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(b3(2.0) == doctest::Approx(4.0 / 6.0).epsilon(1e-14));
    CHECK(b3(3.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("B-spline positivity inside the open support, zero outside") {
    std::mt19937_64 rng(42);
    for (int L = 1; L <= 8; ++L) {
        const auto b = bspline1d(L);
        std::uniform_real_distribution<double> inside(1e-6, static_cast<double>(L) - 1e-6);
        for (int it = 0; it < 200; ++it) CHECK(b(inside(rng)) > 0.0);
        CHECK(b(-0.3) == 0.0);
        CHECK(b(static_cast<double>(L) + 0.3) == 0.0);
        CHECK(b.integral() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("convolution recursion consistency at random points") {
    std::mt19937_64 rng(7);
    for (int L = 2; L <= 8; ++L) {
        const auto bl = bspline1d(L);
        const auto bl1 = bspline1d(L - 1);
        std::uniform_real_distribution<double> xs(-0.5, static_cast<double>(L) + 0.5);
        for (int it = 0; it < 100; ++it) {
            const double x = xs(rng);
            // (b_{L-1} * box)(x) = int_{x-1}^x b_{L-1}, GL between knots
            double lo = std::max(x - 1.0, 0.0), hi = std::min(x, static_cast<double>(L - 1));
            double conv = 0.0;
            double a = lo;
            while (a < hi - 1e-14) {
                double b = std::floor(a + 1e-12) + 1.0;
                if (b <= a + 1e-14) b = a + 1.0;
                b = std::min(b, hi);
                const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
                for (int i = 0; i < 8; ++i)
                    conv += half * oracles::kGL8w[i] * bl1(mid + half * oracles::kGL8x[i]);
                a = b;
            }
            CHECK(bl(x) == doctest::Approx(conv).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact rational coefficients agree with the double recursion") {
    for (int L = 1; L <= 8; ++L) {
        const auto exact = bspline1d_exact_coeffs(L);
        const auto b = bspline1d(L);
        REQUIRE(exact.intervals.size() == b.coeffs().size());
        for (size_t i = 0; i < exact.intervals.size(); ++i) {
            REQUIRE(exact.intervals[i].size() == b.coeffs()[i].size());
            for (size_t j = 0; j < exact.intervals[i].size(); ++j) {
                const auto [num, den] = exact.intervals[i][j];
                CHECK(static_cast<double>(num) / static_cast<double>(den) ==
                      doctest::Approx(b.coeffs()[i][j]).epsilon(1e-15));
            }
        }
    }
    CHECK_THROWS(bspline1d_exact_coeffs(9));
}

TEST_CASE("derivatives: hat slope, quadratic curvature, cubic symmetry") {
    const auto b1 = bspline1d(2);
    CHECK(b1.derivative_at(0.5, 1) == doctest::Approx(1.0));

    const auto b2 = bspline1d(3);
    CHECK(b2.derivative_at(0.5, 2) == doctest::Approx(1.0));
    CHECK(b2.derivative_at(1.5, 2) == doctest::Approx(-2.0));
    CHECK(b2.derivative_at(2.5, 2) == doctest::Approx(1.0));

    // first derivative of the causal cubic vanishes at its center x = 2
    const auto b3 = bspline1d(4);
    CHECK(b3.derivative_at(2.0, 1) == doctest::Approx(0.0).epsilon(1e-14));
    // finite-difference cross-check
    const double h = 1e-6;
    const double fd = (b3(2.0 + h) - b3(2.0 - h)) / (2.0 * h);
    CHECK(std::abs(fd) < 1e-6);

    // order above the degree is rejected for splines (jump in the top derivative)
    CHECK_THROWS_AS(b1.derivative_at(0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(b3.derivative_at(0.5, 4), std::invalid_argument);
}

TEST_CASE("tensor products") {
    const auto b3 = bspline1d(4);
    const auto k1 = tensor_product({b3});
    const double x1[1] = {2.0};
    CHECK(k1(x1) == doctest::Approx(bspline1d(4)(2.0)));

    const auto k2 = tensor_product({b3, b3});
    const double x2[2] = {2.0, 2.0};
    CHECK(k2(x2) == doctest::Approx((4.0 / 6.0) * (4.0 / 6.0)).epsilon(1e-13));
    CHECK(k2.integral() == doctest::Approx(1.0).epsilon(1e-13));

    const auto box2 = tensor_product({bspline1d(1), bspline1d(1)});
    CHECK(box2.integral() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(tensor_product(std::vector<PiecewisePoly1D>{}), std::invalid_argument);
}

TEST_CASE("mixed partial derivative of a tensor kernel") {
    const auto k2 = tensor_product({bspline1d(3), bspline1d(3)});
    const int l[2] = {1, 2};
    const double x[2] = {0.7, 1.3};
    const double expect = bspline1d(3).derivative_at(0.7, 1) * bspline1d(3).derivative_at(1.3, 2);
    CHECK(k2.eval_deriv(l, x) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("autocorrelation sequences") {
    const auto hat = bspline(2);
    const auto a = autocorrelation_sequence(hat, 3);
    CHECK(a.at1d(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(a.at1d(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(a.at1d(-1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(a.at1d(2) == doctest::Approx(0.0));

    const auto box = bspline(1);
    const auto a0 = autocorrelation_sequence(box, 2);
    CHECK(a0.at1d(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a0.at1d(1) == doctest::Approx(0.0));

    // Riesz lower bound of the cubic autocorrelation symbol on a 1024 grid
    const auto acub = autocorrelation_sequence(bspline(4), 7);
    const double two_pi = 2.0 * std::acos(-1.0);
    double mn = 1e300;
    for (int j = 0; j < 1024; ++j) {
        const double w[1] = {two_pi * j / 1024.0};
        mn = std::min(mn, std::abs(acub.symbol(w)));
    }
    CHECK(mn > 0.0);
    CHECK(mn > 0.01);
}

TEST_CASE("autocorrelation symbol equals the folded spectrum sum") {
    const auto cub = bspline(4);
    const auto a = autocorrelation_sequence(cub, 7);
    const KernelSpectrum spec(cub);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (double w : {0.3, 1.0, 2.5, 3.1}) {
        double folded = 0.0;
        for (int k = -64; k <= 64; ++k) {
            const double om[1] = {w + two_pi * k};
            folded += std::norm(spec.value(om));
        }
        const double ww[1] = {w};
        CHECK(a.symbol(ww).real() == doctest::Approx(folded).epsilon(1e-8));
        CHECK(std::abs(a.symbol(ww).imag()) < 1e-12);
    }
}

TEST_CASE("spectrum: phihat(0) is the integral; B-spline closed form") {
    const auto b3 = bspline1d(4);
    CHECK(b3.fourier(0.0).real() == doctest::Approx(b3.integral()).epsilon(1e-14));
    // phihat(w) = ((1 - e^{-jw}) / (jw))^4
    for (double w : {0.1, 0.7, 1.9, 3.14, -2.2}) {
        const std::complex<double> jw(0.0, w);
        const std::complex<double> expect = std::pow((1.0 - std::exp(-jw)) / jw, 4.0);
        const auto got = b3.fourier(w);
        CHECK(std::abs(got - expect) < 1e-12);
    }
}

TEST_CASE("spectrum matches a dense DFT sampling within O(delta^2)") {
    const auto b2 = bspline1d(3);
    const double delta = 1.0 / 512.0;
    for (double w : {0.5, 1.5, 3.0}) {
        std::complex<double> riemann(0.0, 0.0);
        for (double x = 0.0; x < 3.0; x += delta)
            riemann += b2(x + 0.5 * delta) *
                       std::exp(std::complex<double>(0.0, -w * (x + 0.5 * delta))) * delta;
        CHECK(std::abs(b2.fourier(w) - riemann) < 10.0 * delta * delta);
    }
}

TEST_CASE("Strang-Fix order certification") {
    CHECK(strang_fix_order(bspline(4), 6, 1e-10) == 4);
    CHECK(strang_fix_order(bspline(1), 6, 1e-10) == 1);
    CHECK(strang_fix_order(bspline(2), 6, 1e-10) == 2);
    CHECK(strang_fix_order(bspline_centered(3), 6, 1e-10) == 3);  // shift-invariant
    CHECK(strang_fix_order(tensor_product({bspline1d(4), bspline1d(4)}), 6, 1e-10) == 4);

    // a sampled truncated Gaussian has no spectral zeros at 2 pi k
    std::vector<double> knots;
    std::vector<std::vector<double>> coeffs;
    const double sigma = 0.5;
    const int n = 48;
    for (int i = 0; i <= n; ++i) knots.push_back(-3.0 + 6.0 * i / n);
    for (int i = 0; i < n; ++i) {
        const double a = knots[static_cast<size_t>(i)], b = knots[static_cast<size_t>(i) + 1];
        const double fa = std::exp(-a * a / (2 * sigma * sigma));
        const double fb = std::exp(-b * b / (2 * sigma * sigma));
        coeffs.push_back({fa, (fb - fa) / (b - a)});  // linear interpolant
    }
    const SeparableKernel gauss({PiecewisePoly1D(knots, coeffs)});
    CHECK(std::abs(gauss.axis(0).fourier(2.0 * std::acos(-1.0))) > 1e-10);
    CHECK(strang_fix_order(gauss, 6, 1e-10) == 0);
}

TEST_CASE("strang_fix_order is monotone under tol tightening") {
    const auto k = bspline(4);
    int prev = 100;
    for (double tol : {1e-4, 1e-8, 1e-10, 1e-12}) {
        const int ord = strang_fix_order(k, 6, tol);
        CHECK(ord <= prev);
        prev = ord;
    }
}

TEST_CASE("polynomial reproduction residuals of the cubic interpolant") {
    const auto kernel = bspline_centered(4);
    const DiscreteFilter a = interp_prefilter(kernel);
    std::vector<Point> grid;
    for (double x = -5.0; x <= 5.0 + 1e-9; x += 0.5) grid.push_back({x});

    const int l0[1] = {0};
    const auto r0 = polynomial_reproduction_residual(kernel, a, l0, grid, 40);
    CHECK(r0.truncation == 40);
    CHECK(r0.residual <= 1e-8);

    const int l3[1] = {3};
    const auto r3 = polynomial_reproduction_residual(kernel, a, l3, grid, 40);
    CHECK(r3.residual <= 1e-6);

    // box-kernel partition of unity is exact
    const auto box = bspline(1);
    const auto rbox = polynomial_reproduction_residual(box, DiscreteFilter::delta(1), l0,
                                                       grid, 40);
    CHECK(rbox.residual == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("centering transform moves the support symmetrically") {
    const auto c4 = bspline_centered(4);
    CHECK(c4.axis(0).support_lo() == doctest::Approx(-2.0));
    CHECK(c4.axis(0).support_hi() == doctest::Approx(2.0));
    const auto c3 = bspline_centered(3);
    CHECK(c3.axis(0).support_lo() == doctest::Approx(-1.5));
    // centered quadratic integer samples are symmetric: {1/8, 3/4, 1/8}
    CHECK(c3.axis(0)(0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(c3.axis(0)(1.0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(c3.axis(0)(-1.0) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("continuity across knots up to degree - 1") {
    for (int L = 2; L <= 6; ++L) {
        const auto b = bspline1d(L);
        for (int d = 0; d <= L - 2; ++d) {
            for (int knot = 1; knot < L; ++knot) {
                const double eps = 1e-9;
                const double left = b.derivative_at(static_cast<double>(knot) - eps, d);
                const double right = b.derivative_at(static_cast<double>(knot), d);
                CHECK(std::abs(left - right) < 1e-7);
            }
        }
    }
}

TEST_CASE("kernel JSON round trip with exact rationals") {
    const auto k = bspline_centered(4);
    const std::string text = kernel_to_json(k, 4);
    CHECK(text.find("rational") != std::string::npos);
    const auto back = kernel_from_json(text);
    for (double x : {-1.7, -0.3, 0.0, 0.9, 1.99}) {
        const double xx[1] = {x};
        CHECK(back(xx) == doctest::Approx(k(xx)).epsilon(1e-15));
    }
}
