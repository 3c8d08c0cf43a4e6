// Truncated multivariate Taylor arithmetic ("jets").  A Jet carries all
// Taylor coefficients c_l = d^l f / l! up to a total order, so one evaluation
// of a composite expression yields every mixed partial derivative at once.
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "siapprox/box.hpp"

namespace siapprox {

class JetSpace {
public:
    static const JetSpace& get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    const std::vector<Index>& exponents() const { return exponents_; }
    int total_degree(int pos) const { return degrees_[static_cast<size_t>(pos)]; }

    int position(std::span<const int> l) const {
        const auto it = lookup_.find(encode(l));
        return it == lookup_.end() ? -1 : it->second;
    }

    // position of exponents_[i] + exponents_[j], or -1 if above the order
    int product_position(int i, int j) const {
        return mul_[static_cast<size_t>(i) * exponents_.size() + static_cast<size_t>(j)];
    }

    double factorial_of(int pos) const { return factorials_[static_cast<size_t>(pos)]; }

private:
    JetSpace(int dim, int order);

    long encode(std::span<const int> l) const {
        long code = 0;
        for (int v : l) code = code * (order_ + 2) + v;
        return code;
    }

    int dim_;
    int order_;
    std::vector<Index> exponents_;
    std::vector<int> degrees_;
    std::vector<double> factorials_;  // l! per position
    std::map<long, int> lookup_;
    std::vector<int> mul_;
};

inline JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
    for (int n = 0; n <= order; ++n)
        for (auto& l : multi_indices_of_order(dim, n)) {
            degrees_.push_back(n);
            exponents_.push_back(std::move(l));
        }
    for (size_t p = 0; p < exponents_.size(); ++p) {
        lookup_[encode(exponents_[p])] = static_cast<int>(p);
        double f = 1.0;
        for (int v : exponents_[p])
            for (int s = 2; s <= v; ++s) f *= static_cast<double>(s);
        factorials_.push_back(f);
    }
    const size_t n = exponents_.size();
    mul_.assign(n * n, -1);
    Index sum(static_cast<size_t>(dim));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (degrees_[i] + degrees_[j] > order) continue;
            for (int a = 0; a < dim; ++a)
                sum[static_cast<size_t>(a)] = exponents_[i][static_cast<size_t>(a)] +
                                              exponents_[j][static_cast<size_t>(a)];
            mul_[i * n + j] = position(sum);
        }
}

inline const JetSpace& JetSpace::get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot.reset(new JetSpace(dim, order));
    return *slot;
}

class Jet {
public:
    Jet() : space_(nullptr) {}
    explicit Jet(const JetSpace& s) : space_(&s), c_(static_cast<size_t>(s.size()), 0.0) {}

    static Jet constant(const JetSpace& s, double v) {
        Jet j(s);
        j.c_[0] = v;
        return j;
    }
    static Jet variable(const JetSpace& s, int axis, double v) {
        Jet j(s);
        j.c_[0] = v;
        if (s.order() >= 1) {
            Index e(static_cast<size_t>(s.dim()), 0);
            e[static_cast<size_t>(axis)] = 1;
            j.c_[static_cast<size_t>(s.position(e))] = 1.0;
        }
        return j;
    }

    const JetSpace& space() const { return *space_; }
    double value() const { return c_[0]; }
    double coeff(int pos) const { return c_[static_cast<size_t>(pos)]; }
    double& coeff(int pos) { return c_[static_cast<size_t>(pos)]; }

    // d^l f at the expansion point
    double partial(std::span<const int> l) const {
        const int p = space_->position(l);
        if (p < 0) throw std::invalid_argument("Jet::partial: order above truncation");
        return c_[static_cast<size_t>(p)] * space_->factorial_of(p);
    }

    Jet operator+(const Jet& o) const {
        Jet r(*space_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
        return r;
    }
    Jet operator-(const Jet& o) const {
        Jet r(*space_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
        return r;
    }
    Jet operator*(double s) const {
        Jet r(*space_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * s;
        return r;
    }
    Jet operator+(double s) const {
        Jet r = *this;
        r.c_[0] += s;
        return r;
    }
    Jet operator*(const Jet& o) const {
        Jet r(*space_);
        const int n = space_->size();
        for (int i = 0; i < n; ++i) {
            const double ci = c_[static_cast<size_t>(i)];
            if (ci == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                const int t = space_->product_position(i, j);
                if (t < 0) continue;
                r.c_[static_cast<size_t>(t)] += ci * o.c_[static_cast<size_t>(j)];
            }
        }
        return r;
    }

    // Composition with a univariate function given its Taylor coefficients
    // t_k = g^{(k)}(value())/k!, k = 0..order.
    Jet compose(std::span<const double> t) const {
        Jet tilde = *this;
        tilde.c_[0] = 0.0;
        Jet r = Jet::constant(*space_, t[static_cast<size_t>(space_->order())]);
        for (int k = space_->order() - 1; k >= 0; --k)
            r = r * tilde + t[static_cast<size_t>(k)];
        return r;
    }

private:
    const JetSpace* space_;
    std::vector<double> c_;
};

inline Jet operator*(double s, const Jet& j) { return j * s; }

inline Jet sin(const Jet& u) {
    const int M = u.space().order();
    std::vector<double> t(static_cast<size_t>(M) + 1);
    double fact = 1.0;
    for (int k = 0; k <= M; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        t[static_cast<size_t>(k)] =
            std::sin(u.value() + 0.5 * std::acos(-1.0) * static_cast<double>(k)) / fact;
    }
    return u.compose(t);
}

inline Jet cos(const Jet& u) {
    const int M = u.space().order();
    std::vector<double> t(static_cast<size_t>(M) + 1);
    double fact = 1.0;
    for (int k = 0; k <= M; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        t[static_cast<size_t>(k)] =
            std::cos(u.value() + 0.5 * std::acos(-1.0) * static_cast<double>(k)) / fact;
    }
    return u.compose(t);
}

inline Jet exp(const Jet& u) {
    const int M = u.space().order();
    std::vector<double> t(static_cast<size_t>(M) + 1);
    const double e0 = std::exp(u.value());
    double fact = 1.0;
    for (int k = 0; k <= M; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        t[static_cast<size_t>(k)] = e0 / fact;
    }
    return u.compose(t);
}

// u^a for real exponent a; requires u > 0 at the expansion point.
inline Jet pow(const Jet& u, double a) {
    if (u.value() <= 0.0) throw std::domain_error("Jet pow: base must be positive");
    const int M = u.space().order();
    std::vector<double> t(static_cast<size_t>(M) + 1);
    double coef = 1.0;  // a (a-1) ... (a-k+1) / k!
    for (int k = 0; k <= M; ++k) {
        t[static_cast<size_t>(k)] = coef * std::pow(u.value(), a - static_cast<double>(k));
        coef *= (a - static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    return u.compose(t);
}

}  // namespace siapprox
