#include "siapprox/signals.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "siapprox/taylor.hpp"

namespace siapprox {

namespace {

constexpr double kPi = 3.14159265358979323846;

double round_sig(double v, int digits) {
    if (v == 0.0) return 0.0;
    const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * mag) / mag;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Signals whose partials come from one jet evaluation of a closed-form
// expression.
class JetSignal : public TestSignal {
public:
    double partial(std::span<const int> l, std::span<const double> x) const override {
        const int n = multi_index_sum(l);
        if (n > max_derivative_order())
            throw std::invalid_argument("partial: order above the declared maximum");
        const JetSpace& js = JetSpace::get(dim(), n);
        return eval_jet(seed_jets(js, x)).partial(l);
    }

    double derivative_magnitude(int L, std::span<const double> x) const override {
        if (L > max_derivative_order())
            throw std::invalid_argument("derivative_magnitude: order above the declared maximum");
        const JetSpace& js = JetSpace::get(dim(), L);
        const Jet j = eval_jet(seed_jets(js, x));
        double s = 0.0;
        for (int p = 0; p < js.size(); ++p)
            if (js.total_degree(p) == L)
                s += std::abs(j.coeff(p) * js.factorial_of(p));
        return s;
    }

    int max_derivative_order() const override { return 8; }

protected:
    std::vector<Jet> seed_jets(const JetSpace& js, std::span<const double> x) const {
        std::vector<Jet> v;
        v.reserve(x.size());
        for (int a = 0; a < dim(); ++a)
            v.push_back(Jet::variable(js, a, x[static_cast<size_t>(a)]));
        return v;
    }

    virtual Jet eval_jet(const std::vector<Jet>& x) const = 0;
};

class GrowingOscillation final : public JetSignal {
public:
    GrowingOscillation(double beta, double omega0, int dim)
        : beta_(beta), omega0_(omega0), dim_(dim) {
        if (beta < 0) throw std::invalid_argument("growing oscillation: beta must be >= 0");
    }

    int dim() const override { return dim_; }

    double value(std::span<const double> x) const override {
        double t = omega0_ * x[0];
        for (double v : x) t += 0.3 * v;
        return std::pow(1.0 + squared_norm(x), 0.5 * beta_) * std::sin(t);
    }

    double growth_order() const override { return beta_; }
    double growth_constant() const override { return 1.0; }
    std::string family() const override { return "growing-oscillation"; }
    std::string params() const override {
        return "beta=" + fmt(beta_) + " omega0=" + fmt(omega0_) + " dim=" + std::to_string(dim_);
    }

protected:
    Jet eval_jet(const std::vector<Jet>& x) const override {
        Jet q = Jet::constant(x[0].space(), 1.0);
        for (const Jet& xi : x) q = q + xi * xi;
        Jet t = x[0] * omega0_;
        for (const Jet& xi : x) t = t + xi * 0.3;
        if (beta_ == 0.0) return sin(t);
        return pow(q, 0.5 * beta_) * sin(t);
    }

private:
    double beta_;
    double omega0_;
    int dim_;
};

class RandomTrigPoly final : public JetSignal {
public:
    RandomTrigPoly(unsigned seed, int K, double beta, int dim, double smoothness)
        : seed_(seed), K_(K), beta_(beta), dim_(dim), s_(smoothness) {
        if (K < 1) throw std::invalid_argument("random trig poly: K must be >= 1");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        for (int k = 1; k <= K; ++k) {
            a_.push_back(round_sig(amp(rng), 15));
            phi_.push_back(round_sig(phase(rng), 15));
        }
        dir_.assign(static_cast<size_t>(dim), 1.0 / std::sqrt(static_cast<double>(dim)));
    }

    int dim() const override { return dim_; }

    double value(std::span<const double> x) const override {
        double t = 0.0;
        for (int a = 0; a < dim_; ++a) t += dir_[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
        double sum = 0.0;
        for (int k = 1; k <= K_; ++k)
            sum += a_[static_cast<size_t>(k - 1)] / std::pow(static_cast<double>(k), s_) *
                   std::sin(static_cast<double>(k) * t + phi_[static_cast<size_t>(k - 1)]);
        return std::pow(1.0 + squared_norm(x), 0.5 * beta_) * sum;
    }

    double growth_order() const override { return beta_; }
    double growth_constant() const override {
        double c = 0.0;
        for (int k = 1; k <= K_; ++k)
            c += std::abs(a_[static_cast<size_t>(k - 1)]) / std::pow(static_cast<double>(k), s_);
        return c;
    }
    std::string family() const override { return "random-trig-poly"; }
    std::string params() const override {
        return "seed=" + std::to_string(seed_) + " K=" + std::to_string(K_) + " beta=" +
               fmt(beta_) + " s=" + fmt(s_) + " dim=" + std::to_string(dim_);
    }

    const std::vector<double>& amplitudes() const { return a_; }

protected:
    Jet eval_jet(const std::vector<Jet>& x) const override {
        Jet t = Jet::constant(x[0].space(), 0.0);
        for (int a = 0; a < dim_; ++a) t = t + x[static_cast<size_t>(a)] * dir_[static_cast<size_t>(a)];
        Jet sum = Jet::constant(x[0].space(), 0.0);
        for (int k = 1; k <= K_; ++k) {
            const double c = a_[static_cast<size_t>(k - 1)] / std::pow(static_cast<double>(k), s_);
            sum = sum + sin(t * static_cast<double>(k) + phi_[static_cast<size_t>(k - 1)]) * c;
        }
        if (beta_ == 0.0) return sum;
        Jet q = Jet::constant(x[0].space(), 1.0);
        for (const Jet& xi : x) q = q + xi * xi;
        return pow(q, 0.5 * beta_) * sum;
    }

private:
    unsigned seed_;
    int K_;
    double beta_;
    int dim_;
    double s_;
    std::vector<double> a_, phi_;
    std::vector<double> dir_;
};

class ExpSin final : public JetSignal {
public:
    explicit ExpSin(int dim) : dim_(dim) {
        c_.resize(static_cast<size_t>(dim));
        for (int a = 0; a < dim; ++a) c_[static_cast<size_t>(a)] = (a == 0) ? 1.0 : 0.7;
    }

    int dim() const override { return dim_; }
    double value(std::span<const double> x) const override {
        double t = 0.0;
        for (int a = 0; a < dim_; ++a) t += c_[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
        return std::exp(std::sin(t));
    }
    double growth_order() const override { return 0.0; }
    double growth_constant() const override { return std::exp(1.0); }
    std::string family() const override { return "exp-sin"; }
    std::string params() const override { return "dim=" + std::to_string(dim_); }

protected:
    Jet eval_jet(const std::vector<Jet>& x) const override {
        Jet t = Jet::constant(x[0].space(), 0.0);
        for (int a = 0; a < dim_; ++a) t = t + x[static_cast<size_t>(a)] * c_[static_cast<size_t>(a)];
        return exp(sin(t));
    }

private:
    int dim_;
    std::vector<double> c_;
};

class PolynomialSignal final : public TestSignal {
public:
    PolynomialSignal(int dim, std::vector<std::pair<Index, double>> terms)
        : dim_(dim), terms_(std::move(terms)) {
        for (const auto& [m, c] : terms_) {
            if (static_cast<int>(m.size()) != dim)
                throw std::invalid_argument("polynomial: exponent rank mismatch");
            degree_ = std::max(degree_, multi_index_sum(m));
            (void)c;
        }
        if (degree_ > 8) throw std::invalid_argument("polynomial: total degree must be <= 8");
    }

    int dim() const override { return dim_; }

    double value(std::span<const double> x) const override {
        double s = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = c;
            for (int a = 0; a < dim_; ++a)
                for (int e = 0; e < m[static_cast<size_t>(a)]; ++e) t *= x[static_cast<size_t>(a)];
            s += t;
        }
        return s;
    }

    double partial(std::span<const int> l, std::span<const double> x) const override {
        double s = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = c;
            bool dead = false;
            for (int a = 0; a < dim_ && !dead; ++a) {
                const int e = m[static_cast<size_t>(a)];
                const int r = l[static_cast<size_t>(a)];
                if (r > e) {
                    dead = true;
                    break;
                }
                for (int s2 = 0; s2 < r; ++s2) t *= static_cast<double>(e - s2);
                for (int s2 = 0; s2 < e - r; ++s2) t *= x[static_cast<size_t>(a)];
            }
            if (!dead) s += t;
        }
        return s;
    }

    int max_derivative_order() const override { return 8; }
    double growth_order() const override { return static_cast<double>(degree_); }
    double growth_constant() const override {
        double c = 0.0;
        for (const auto& [m, v] : terms_) {
            c += std::abs(v);
            (void)m;
        }
        return std::max(c, 1e-300);
    }
    std::string family() const override { return "polynomial"; }
    std::string params() const override {
        std::ostringstream os;
        os << "dim=" << dim_ << " terms=" << terms_.size() << " degree=" << degree_;
        return os.str();
    }

private:
    int dim_;
    std::vector<std::pair<Index, double>> terms_;
    int degree_ = 0;
};

// Finite sums  A x^m sin(<w, x> + theta): closed under partial derivatives
// (product rule) and under D^r via
//   D^r (x_i g) = x_i D^r g - r D^{r-2} (d_i g),
// which bottoms out at D^s sin(<w,.>+theta) = <w>^s sin(<w,.>+theta).
struct TrigTerm {
    double A;
    Index m;
    Point omega;
    double theta;
};

std::vector<TrigTerm> trig_partial(const std::vector<TrigTerm>& terms, int axis) {
    std::vector<TrigTerm> out;
    for (const auto& t : terms) {
        if (t.m[static_cast<size_t>(axis)] > 0) {
            TrigTerm d = t;
            d.A *= static_cast<double>(t.m[static_cast<size_t>(axis)]);
            d.m[static_cast<size_t>(axis)] -= 1;
            out.push_back(std::move(d));
        }
        if (t.omega[static_cast<size_t>(axis)] != 0.0) {
            TrigTerm d = t;
            d.A *= t.omega[static_cast<size_t>(axis)];
            d.theta += 0.5 * kPi;
            out.push_back(std::move(d));
        }
    }
    return out;
}

std::vector<TrigTerm> trig_fractional(const std::vector<TrigTerm>& terms, double r) {
    std::vector<TrigTerm> out;
    for (const auto& t : terms) {
        const int deg = multi_index_sum(t.m);
        if (deg == 0) {
            TrigTerm s = t;
            s.A *= std::pow(1.0 + squared_norm(t.omega), 0.5 * r);
            out.push_back(std::move(s));
            continue;
        }
        int axis = 0;
        while (t.m[static_cast<size_t>(axis)] == 0) ++axis;
        TrigTerm g = t;
        g.m[static_cast<size_t>(axis)] -= 1;
        // x_i * D^r g
        for (auto& s : trig_fractional({g}, r)) {
            s.m[static_cast<size_t>(axis)] += 1;
            out.push_back(std::move(s));
        }
        // - r * D^{r-2} (d_i g)
        for (auto& s : trig_fractional(trig_partial({g}, axis), r - 2.0)) {
            s.A *= -r;
            out.push_back(std::move(s));
        }
    }
    return out;
}

class TrigPolySignal final : public TestSignal {
public:
    TrigPolySignal(int dim, std::vector<TrigTerm> terms, std::string family,
                   std::string params)
        : dim_(dim), terms_(std::move(terms)), family_(std::move(family)),
          params_(std::move(params)) {
        for (const auto& t : terms_)
            degree_ = std::max(degree_, multi_index_sum(t.m));
    }

    int dim() const override { return dim_; }

    double value(std::span<const double> x) const override {
        double s = 0.0;
        for (const auto& t : terms_) {
            double v = t.A;
            for (int a = 0; a < dim_; ++a)
                for (int e = 0; e < t.m[static_cast<size_t>(a)]; ++e)
                    v *= x[static_cast<size_t>(a)];
            double ph = t.theta;
            for (int a = 0; a < dim_; ++a)
                ph += t.omega[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
            s += v * std::sin(ph);
        }
        return s;
    }

    double partial(std::span<const int> l, std::span<const double> x) const override {
        std::vector<TrigTerm> cur = terms_;
        for (int a = 0; a < dim_; ++a)
            for (int rep = 0; rep < l[static_cast<size_t>(a)]; ++rep)
                cur = trig_partial(cur, a);
        return TrigPolySignal(dim_, cur, family_, params_).value(x);
    }

    std::unique_ptr<TestSignal> fractional(double r) const override {
        return std::make_unique<TrigPolySignal>(dim_, trig_fractional(terms_, r), family_,
                                                params_ + " D^" + fmt(r));
    }

    int max_derivative_order() const override { return 32; }
    double growth_order() const override { return static_cast<double>(degree_); }
    double growth_constant() const override {
        double c = 0.0;
        for (const auto& t : terms_) c += std::abs(t.A);
        return std::max(c, 1e-300);
    }
    std::string family() const override { return family_; }
    std::string params() const override { return params_; }

private:
    int dim_;
    std::vector<TrigTerm> terms_;
    std::string family_;
    std::string params_;
    int degree_ = 0;
};

}  // namespace

double TestSignal::derivative_magnitude(int L, std::span<const double> x) const {
    double s = 0.0;
    for (const Index& l : multi_indices_of_order(dim(), L)) s += std::abs(partial(l, x));
    return s;
}

std::unique_ptr<TestSignal> TestSignal::fractional(double) const { return nullptr; }

void TestSignal::self_check(int npoints, double tol, unsigned rng_seed) const {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    const double h = 2e-3;
    Point x(static_cast<size_t>(dim()));
    for (int it = 0; it < npoints; ++it) {
        for (double& v : x) v = coord(rng);
        for (int axis = 0; axis < dim(); ++axis) {
            Index l(static_cast<size_t>(dim()), 0);
            l[static_cast<size_t>(axis)] = 1;
            const double analytic = partial(l, x);
            Point xp = x;
            auto at = [&](double off) {
                xp[static_cast<size_t>(axis)] = x[static_cast<size_t>(axis)] + off;
                return value(xp);
            };
            const double fd =
                (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
            const double scale = std::max(1.0, std::abs(analytic));
            if (std::abs(analytic - fd) > tol * scale)
                throw std::runtime_error("signal self-check failed: " + family() +
                                         " axis " + std::to_string(axis));
        }
    }
}

double TestSignal::boundary_growth_ratio(double T, int samples) const {
    // shell [T-4, T] on each face: wide enough that every library family
    // passes through a full oscillation period
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> inner(-(T - 4.0), T - 4.0);
    double worst = 0.0;
    Point x(static_cast<size_t>(dim()));
    for (int face = 0; face < 2 * dim(); ++face) {
        const int axis = face / 2;
        const double sgn = (face % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i < samples; ++i) {
            for (double& v : x) v = inner(rng);
            x[static_cast<size_t>(axis)] =
                sgn * (T - 4.0 * static_cast<double>(i) / (samples - 1));
            const double w = std::pow(1.0 + squared_norm(x), 0.5 * growth_order());
            worst = std::max(worst, std::abs(value(x)) / w);
        }
    }
    return worst;
}

std::unique_ptr<TestSignal> make_growing_oscillation(double beta, double omega0, int dim) {
    auto s = std::make_unique<GrowingOscillation>(beta, omega0, dim);
    s->self_check(20);
    return s;
}

std::unique_ptr<TestSignal> make_random_trig_poly(unsigned seed, int K, double beta, int dim,
                                                  double smoothness) {
    auto s = std::make_unique<RandomTrigPoly>(seed, K, beta, dim, smoothness);
    s->self_check(20);
    return s;
}

std::unique_ptr<TestSignal> make_polynomial(std::vector<double> coeffs1d) {
    std::vector<std::pair<Index, double>> terms;
    for (size_t j = 0; j < coeffs1d.size(); ++j)
        if (coeffs1d[j] != 0.0) terms.push_back({Index{static_cast<int>(j)}, coeffs1d[j]});
    if (terms.empty()) terms.push_back({Index{0}, 0.0});
    return std::make_unique<PolynomialSignal>(1, std::move(terms));
}

std::unique_ptr<TestSignal> make_polynomial(int dim,
                                            std::vector<std::pair<Index, double>> terms) {
    return std::make_unique<PolynomialSignal>(dim, std::move(terms));
}

std::unique_ptr<TestSignal> make_exp_sin(int dim) {
    auto s = std::make_unique<ExpSin>(dim);
    s->self_check(20);
    return s;
}

std::unique_ptr<TestSignal> make_spectral_growing(unsigned seed, int terms,
                                                  int envelope_degree, double omega_max,
                                                  int dim) {
    if (envelope_degree < 0 || envelope_degree > 2)
        throw std::invalid_argument("spectral signal: envelope degree must be 0, 1 or 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.3, 1.0);
    std::uniform_real_distribution<double> freq(0.5, omega_max);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<TrigTerm> list;
    for (int t = 0; t < terms; ++t) {
        TrigTerm base;
        base.A = round_sig(amp(rng), 15);
        base.m.assign(static_cast<size_t>(dim), 0);
        base.omega.resize(static_cast<size_t>(dim));
        for (double& w : base.omega) w = round_sig(freq(rng), 15);
        base.theta = round_sig(phase(rng), 15);
        list.push_back(base);
        if (envelope_degree >= 1) {
            TrigTerm grow = base;
            grow.A = round_sig(0.5 * amp(rng), 15);
            grow.m[0] = envelope_degree;
            grow.theta = round_sig(phase(rng), 15);
            list.push_back(grow);
        }
    }
    std::ostringstream ps;
    ps << "seed=" << seed << " terms=" << terms << " envelope=" << envelope_degree
       << " omega_max=" << omega_max << " dim=" << dim;
    auto s = std::make_unique<TrigPolySignal>(dim, std::move(list), "spectral-growing",
                                              ps.str());
    s->self_check(20);
    return s;
}

std::unique_ptr<TestSignal> make_signal(const std::string& family, int dim, unsigned seed,
                                        double beta, double omega0, int K,
                                        double smoothness,
                                        const std::vector<double>& poly_coeffs) {
    if (family == "growing-oscillation") return make_growing_oscillation(beta, omega0, dim);
    if (family == "random-trig-poly")
        return make_random_trig_poly(seed, K, beta, dim, smoothness);
    if (family == "polynomial") {
        if (dim != 1)
            throw std::invalid_argument("polynomial family via config is 1-D");
        return make_polynomial(poly_coeffs);
    }
    if (family == "exp-sin") return make_exp_sin(dim);
    if (family == "spectral-growing")
        return make_spectral_growing(seed, K, static_cast<int>(beta), omega0, dim);
    throw std::invalid_argument("unknown signal family: " + family);
}

}  // namespace siapprox
