// Library of non-decaying test signals with analytic derivatives, certified
// growth orders, seeded random generators and (for the spectral family) an
// exact realization of the fractional operator D^r.
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "siapprox/box.hpp"

namespace siapprox {

class TestSignal {
public:
    virtual ~TestSignal() = default;

    virtual int dim() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    virtual double partial(std::span<const int> l, std::span<const double> x) const = 0;

    // f^{(L)}(x) = sum_{|l| = L} |d^l f(x)|
    virtual double derivative_magnitude(int L, std::span<const double> x) const;

    // Exact D^r f when the signal has a closed spectral form; null otherwise.
    virtual std::unique_ptr<TestSignal> fractional(double r) const;

    virtual int max_derivative_order() const = 0;

    // Growth certificate: |f(x)| <= growth_constant() * <x>^growth_order().
    virtual double growth_order() const = 0;
    virtual double growth_constant() const = 0;

    virtual std::string family() const = 0;
    virtual std::string params() const = 0;  // short reproducibility string

    // Analytic partials against 4th-order central differences at random
    // interior points; throws on disagreement beyond tol.
    void self_check(int npoints = 100, double tol = 1e-6, unsigned rng_seed = 12345) const;

    // Max over a boundary shell ||x||_inf in [T - 1, T] of |f(x)| / <x>^beta.
    double boundary_growth_ratio(double T, int samples = 512) const;
};

// f(x) = <x>^beta * sin(omega0 x_1 + 0.3 sum_i x_i)
std::unique_ptr<TestSignal> make_growing_oscillation(double beta, double omega0, int dim = 1);

// f(x) = <x>^beta * sum_{k=1..K} (a_k / k^s) sin(k <u, x> + phi_k), seeded.
std::unique_ptr<TestSignal> make_random_trig_poly(unsigned seed, int K, double beta,
                                                  int dim = 1, double smoothness = 1.5);

// Exact polynomial; 1-D convenience takes monomial coefficients c0 + c1 x + ...
std::unique_ptr<TestSignal> make_polynomial(std::vector<double> coeffs1d);
std::unique_ptr<TestSignal> make_polynomial(int dim,
                                            std::vector<std::pair<Index, double>> terms);

// f(x) = exp(sin(<c, x>)): bounded, infinitely smooth; identity-suite fodder.
std::unique_ptr<TestSignal> make_exp_sin(int dim = 1);

// Finite trig sum with a polynomial envelope: closed under d^l and D^r, so
// fractional-regularity norms are computed exactly rather than through the
// windowed DFT multiplier.  envelope_degree in {0, 1, 2}.
std::unique_ptr<TestSignal> make_spectral_growing(unsigned seed, int terms,
                                                  int envelope_degree, double omega_max,
                                                  int dim = 1);

// Assemble a signal from its family id and parameters (CLI configs).
std::unique_ptr<TestSignal> make_signal(const std::string& family, int dim, unsigned seed,
                                        double beta, double omega0, int K,
                                        double smoothness,
                                        const std::vector<double>& poly_coeffs);

}  // namespace siapprox
