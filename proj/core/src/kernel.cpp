#include "siapprox/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "siapprox/dfilter.hpp"

#include <nlohmann/json.hpp>

namespace siapprox {

namespace {

using Poly = std::vector<double>;  // monomial coefficients, c[j] * u^j

double poly_eval(const Poly& p, double u) {
    double v = 0.0;
    for (size_t j = p.size(); j-- > 0;) v = v * u + p[j];
    return v;
}

// Small exact rational arithmetic for the B-spline coefficient tables.
struct Rat {
    std::int64_t n = 0;
    std::int64_t d = 1;

    Rat() = default;
    Rat(std::int64_t num, std::int64_t den = 1) : n(num), d(den) { normalize(); }

    void normalize() {
        if (d == 0) throw std::overflow_error("rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
    }
    Rat operator+(const Rat& o) const { return Rat(n * o.d + o.n * d, d * o.d); }
    Rat operator-(const Rat& o) const { return Rat(n * o.d - o.n * d, d * o.d); }
    Rat operator*(const Rat& o) const { return Rat(n * o.n, d * o.d); }
    Rat div_int(std::int64_t k) const { return Rat(n, d * k); }
    double to_double() const { return static_cast<double>(n) / static_cast<double>(d); }
};

template <typename T>
T divide_by_int(const T& v, std::int64_t k);
template <>
double divide_by_int<double>(const double& v, std::int64_t k) {
    return v / static_cast<double>(k);
}
template <>
Rat divide_by_int<Rat>(const Rat& v, std::int64_t k) {
    return v.div_int(k);
}

template <typename T>
T eval_at_one(const std::vector<T>& p) {
    T s(0);
    for (const auto& c : p) s = s + c;
    return s;
}

// One box-convolution step on unit-interval pieces: input has pieces on
// [i, i+1), i = 0..n-1; output on i = 0..n.  Works in local coordinates:
// (f * box)(i+u) = F(i+u) - F(i-1+u) with F the running antiderivative.
template <typename T>
std::vector<std::vector<T>> box_convolve_impl(const std::vector<std::vector<T>>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<std::vector<T>> prim(static_cast<size_t>(n));
    std::vector<T> cum(static_cast<size_t>(n) + 1, T(0));
    for (int i = 0; i < n; ++i) {
        const auto& p = f[static_cast<size_t>(i)];
        std::vector<T> P(p.size() + 1, T(0));
        for (size_t j = 0; j < p.size(); ++j)
            P[j + 1] = divide_by_int(p[j], static_cast<std::int64_t>(j) + 1);
        cum[static_cast<size_t>(i) + 1] = cum[static_cast<size_t>(i)] + eval_at_one(P);
        prim[static_cast<size_t>(i)] = std::move(P);
    }
    std::vector<std::vector<T>> g(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const size_t deg1 = (i < n ? prim[static_cast<size_t>(i)].size() : 1);
        const size_t deg2 = (i > 0 ? prim[static_cast<size_t>(i) - 1].size() : 1);
        std::vector<T> gi(std::max(deg1, deg2), T(0));
        if (i < n)
            for (size_t j = 0; j < prim[static_cast<size_t>(i)].size(); ++j)
                gi[j] = gi[j] + prim[static_cast<size_t>(i)][j];
        gi[0] = gi[0] + (i < n ? cum[static_cast<size_t>(i)] : cum[static_cast<size_t>(n)]);
        if (i > 0)
            for (size_t j = 0; j < prim[static_cast<size_t>(i) - 1].size(); ++j)
                gi[j] = gi[j] - prim[static_cast<size_t>(i) - 1][j];
        if (i > 0) gi[0] = gi[0] - cum[static_cast<size_t>(i) - 1];
        g[static_cast<size_t>(i)] = std::move(gi);
    }
    return g;
}

template <typename T>
std::vector<std::vector<T>> bspline_pieces(int order_L) {
    if (order_L < 1)
        throw std::invalid_argument("bspline: order must be a positive integer");
    std::vector<std::vector<T>> pieces{{T(1)}};
    for (int step = 1; step < order_L; ++step) pieces = box_convolve_impl(pieces);
    return pieces;
}

// Shift a local-coordinate polynomial: returns q with q(v) = p(v + a).
Poly poly_rebase(const Poly& p, double a) {
    Poly q(p.size(), 0.0);
    for (size_t j = 0; j < p.size(); ++j) {
        // expand c_j (v + a)^j
        double binom = 1.0;
        double apow = 1.0;
        // term v^{j-s} a^s * C(j, s)
        for (size_t s = 0; s <= j; ++s) {
            q[j - s] += p[j] * binom * apow;
            binom = binom * static_cast<double>(j - s) / static_cast<double>(s + 1);
            apow *= a;
        }
    }
    return q;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

double poly_integral(const Poly& p, double w) {
    double s = 0.0;
    double wp = w;
    for (size_t j = 0; j < p.size(); ++j) {
        s += p[j] * wp / static_cast<double>(j + 1);
        wp *= w;
    }
    return s;
}

// I_n = int_0^w u^n e^{-j omega u} du for n = 0..max_n.
std::vector<std::complex<double>> exp_moments(double omega, double w, int max_n) {
    std::vector<std::complex<double>> I(static_cast<size_t>(max_n) + 1);
    const std::complex<double> A(0.0, -omega);
    if (std::abs(omega) * w <= 8.0) {
        // power series sum_s A^s w^{n+s+1} / (s! (n+s+1)), no cancellation
        for (int n = 0; n <= max_n; ++n) {
            std::complex<double> term(1.0, 0.0);
            std::complex<double> sum(0.0, 0.0);
            double wpow = std::pow(w, n + 1);
            for (int s = 0; s < 64; ++s) {
                sum += term * wpow / static_cast<double>(n + s + 1);
                term *= A / static_cast<double>(s + 1);
                wpow *= w;
            }
            I[static_cast<size_t>(n)] = sum;
        }
        return I;
    }
    const std::complex<double> eAw = std::exp(A * w);
    I[0] = (eAw - 1.0) / A;
    double wn = 1.0;
    for (int n = 1; n <= max_n; ++n) {
        wn *= w;
        I[static_cast<size_t>(n)] = (wn * eAw - static_cast<double>(n) * I[static_cast<size_t>(n) - 1]) / A;
    }
    return I;
}

}  // namespace

PiecewisePoly1D::PiecewisePoly1D(std::vector<double> knots,
                                 std::vector<std::vector<double>> coeffs)
    : knots_(std::move(knots)), coeffs_(std::move(coeffs)) {
    if (knots_.size() < 2) throw std::invalid_argument("PiecewisePoly1D: need >= 2 knots");
    if (coeffs_.size() + 1 != knots_.size())
        throw std::invalid_argument("PiecewisePoly1D: coeffs/knots size mismatch");
    for (size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw std::invalid_argument("PiecewisePoly1D: knots must be strictly ascending");
    for (const auto& c : coeffs_) {
        if (c.empty()) throw std::invalid_argument("PiecewisePoly1D: empty interval polynomial");
        degree_ = std::max(degree_, static_cast<int>(c.size()) - 1);
    }
}

int PiecewisePoly1D::interval_of(double x) const {
    if (x < knots_.front() || x >= knots_.back()) return -1;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<int>(it - knots_.begin()) - 1;
}

double PiecewisePoly1D::operator()(double x) const {
    const int i = interval_of(x);
    if (i < 0) return 0.0;
    return poly_eval(coeffs_[static_cast<size_t>(i)], x - knots_[static_cast<size_t>(i)]);
}

double PiecewisePoly1D::derivative_at(double x, int order) const {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (order == 0) return (*this)(x);
    if (order > degree_) {
        // Admissible only when the top pointwise derivative is continuous and
        // vanishes at the support edges; then all higher derivatives are 0.
        const PiecewisePoly1D top = derivative(degree_);
        const double tol = 1e-12;
        for (size_t i = 0; i + 1 < knots_.size(); ++i) {
            const double left = (i == 0) ? 0.0 : top(knots_[i] - 1e-9 * (knots_[i] - knots_[i - 1]));
            const double right = top(knots_[i]);
            if (std::abs(left - right) > tol)
                throw std::invalid_argument(
                    "derivative order exceeds degree and the distributional "
                    "derivative has a singular part at a breakpoint");
        }
        if (std::abs(top(knots_.back() - 1e-9)) > tol)
            throw std::invalid_argument(
                "derivative order exceeds degree and the distributional "
                "derivative has a singular part at the support edge");
        return 0.0;
    }
    const int i = interval_of(x);
    if (i < 0) return 0.0;
    const auto& p = coeffs_[static_cast<size_t>(i)];
    const double u = x - knots_[static_cast<size_t>(i)];
    double v = 0.0;
    for (size_t j = p.size(); j-- > static_cast<size_t>(order);) {
        double fac = 1.0;
        for (int s = 0; s < order; ++s) fac *= static_cast<double>(j - static_cast<size_t>(s));
        v = v * u + p[j] * fac;
    }
    return v;
}

PiecewisePoly1D PiecewisePoly1D::derivative(int order) const {
    if (order < 0 || order > degree_)
        throw std::invalid_argument("derivative order out of range");
    std::vector<std::vector<double>> dc(coeffs_.size());
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        const auto& p = coeffs_[i];
        const int nd = std::max<int>(0, static_cast<int>(p.size()) - 1 - order);
        std::vector<double> q(static_cast<size_t>(nd) + 1, 0.0);
        for (size_t j = static_cast<size_t>(order); j < p.size(); ++j) {
            double fac = 1.0;
            for (int s = 0; s < order; ++s) fac *= static_cast<double>(j - static_cast<size_t>(s));
            q[j - static_cast<size_t>(order)] = p[j] * fac;
        }
        dc[i] = std::move(q);
    }
    return PiecewisePoly1D(knots_, std::move(dc));
}

PiecewisePoly1D PiecewisePoly1D::shifted(double s) const {
    std::vector<double> k(knots_);
    for (double& v : k) v -= s;
    return PiecewisePoly1D(std::move(k), coeffs_);
}

double PiecewisePoly1D::integral() const {
    double s = 0.0;
    for (size_t i = 0; i < coeffs_.size(); ++i)
        s += poly_integral(coeffs_[i], knots_[i + 1] - knots_[i]);
    return s;
}

double PiecewisePoly1D::inner_product(const PiecewisePoly1D& g, double shift) const {
    double total = 0.0;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        const double a = knots_[i], b = knots_[i + 1];
        for (size_t j = 0; j < g.coeffs_.size(); ++j) {
            const double c = g.knots_[j] + shift, d = g.knots_[j + 1] + shift;
            const double lo = std::max(a, c), hi = std::min(b, d);
            if (hi <= lo) continue;
            const Poly pf = poly_rebase(coeffs_[i], lo - a);
            const Poly pg = poly_rebase(g.coeffs_[j], lo - c);
            total += poly_integral(poly_mul(pf, pg), hi - lo);
        }
    }
    return total;
}

std::complex<double> PiecewisePoly1D::fourier(double omega, int deriv_order) const {
    if (deriv_order < 0) throw std::invalid_argument("fourier: derivative order must be >= 0");
    const int m = deriv_order;
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        const double a = knots_[i];
        const double w = knots_[i + 1] - a;
        // r(u) = (a + u)^m * p(u), real coefficients
        Poly xm{1.0};
        {
            Poly lin{a, 1.0};
            for (int s = 0; s < m; ++s) xm = poly_mul(xm, lin);
        }
        const Poly r = poly_mul(xm, coeffs_[i]);
        std::complex<double> part(0.0, 0.0);
        if (omega == 0.0) {
            part = poly_integral(r, w);
        } else {
            const auto I = exp_moments(omega, w, static_cast<int>(r.size()) - 1);
            for (size_t j = 0; j < r.size(); ++j) part += r[j] * I[j];
            part *= std::exp(std::complex<double>(0.0, -omega * a));
        }
        acc += part;
    }
    // the (-j x)^m integrand carries the factor (-j)^m
    const std::complex<double> mj(0.0, -1.0);
    std::complex<double> phase(1.0, 0.0);
    for (int s = 0; s < m; ++s) phase *= mj;
    return phase * acc;
}

PiecewisePoly1D bspline1d(int order_L) {
    std::vector<std::vector<double>> pieces;
    if (order_L >= 1 && order_L <= 8) {
        // exact rational coefficients, correctly rounded once; keeps mirrored
        // integer samples bit-identical
        for (const auto& iv : bspline_pieces<Rat>(order_L)) {
            std::vector<double> row;
            row.reserve(iv.size());
            for (const auto& c : iv) row.push_back(c.to_double());
            pieces.push_back(std::move(row));
        }
    } else {
        pieces = bspline_pieces<double>(order_L);
    }
    std::vector<double> knots(static_cast<size_t>(order_L) + 1);
    for (int i = 0; i <= order_L; ++i) knots[static_cast<size_t>(i)] = static_cast<double>(i);
    return PiecewisePoly1D(std::move(knots), std::move(pieces));
}

PiecewisePoly1D bspline1d_centered(int order_L) {
    return bspline1d(order_L).shifted(static_cast<double>(order_L) / 2.0);
}

RationalPoly bspline1d_exact_coeffs(int order_L) {
    if (order_L < 1 || order_L > 8)
        throw std::invalid_argument("exact rational coefficients supported for orders 1..8");
    const auto pieces = bspline_pieces<Rat>(order_L);
    RationalPoly out;
    out.intervals.reserve(pieces.size());
    for (const auto& p : pieces) {
        std::vector<std::pair<std::int64_t, std::int64_t>> row;
        row.reserve(p.size());
        for (const auto& c : p) row.emplace_back(c.n, c.d);
        out.intervals.push_back(std::move(row));
    }
    return out;
}

SeparableKernel::SeparableKernel(std::vector<PiecewisePoly1D> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw std::invalid_argument("SeparableKernel: empty axis list");
}

double SeparableKernel::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("SeparableKernel: point dimension mismatch");
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) {
        v *= axes_[static_cast<size_t>(i)](x[static_cast<size_t>(i)]);
        if (v == 0.0) return 0.0;
    }
    return v;
}

double SeparableKernel::eval_deriv(std::span<const int> l, std::span<const double> x) const {
    if (static_cast<int>(l.size()) != dim() || static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("SeparableKernel: dimension mismatch");
    double v = 1.0;
    for (int i = 0; i < dim(); ++i)
        v *= axes_[static_cast<size_t>(i)].derivative_at(x[static_cast<size_t>(i)],
                                                         l[static_cast<size_t>(i)]);
    return v;
}

SeparableKernel SeparableKernel::centered() const {
    std::vector<PiecewisePoly1D> out;
    out.reserve(axes_.size());
    for (const auto& a : axes_)
        out.push_back(a.shifted(0.5 * (a.support_lo() + a.support_hi())));
    return SeparableKernel(std::move(out));
}

SeparableKernel SeparableKernel::shifted(std::span<const double> s) const {
    if (static_cast<int>(s.size()) != dim())
        throw std::invalid_argument("SeparableKernel: shift dimension mismatch");
    std::vector<PiecewisePoly1D> out;
    out.reserve(axes_.size());
    for (int i = 0; i < dim(); ++i)
        out.push_back(axes_[static_cast<size_t>(i)].shifted(s[static_cast<size_t>(i)]));
    return SeparableKernel(std::move(out));
}

double SeparableKernel::integral() const {
    double v = 1.0;
    for (const auto& a : axes_) v *= a.integral();
    return v;
}

double SeparableKernel::support_radius(int axis) const {
    const auto& a = axes_[static_cast<size_t>(axis)];
    return std::max(std::abs(a.support_lo()), std::abs(a.support_hi()));
}

std::string SeparableKernel::describe() const {
    std::ostringstream os;
    os << "separable dim=" << dim() << " degrees=[";
    for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << axes_[static_cast<size_t>(i)].degree();
    os << "]";
    return os.str();
}

SeparableKernel bspline(int order_L) { return SeparableKernel({bspline1d(order_L)}); }
SeparableKernel bspline_centered(int order_L) {
    return SeparableKernel({bspline1d_centered(order_L)});
}

SeparableKernel tensor_product(std::vector<PiecewisePoly1D> axes) {
    return SeparableKernel(std::move(axes));
}

SeparableKernel tensor_product(const std::vector<SeparableKernel>& parts) {
    if (parts.empty()) throw std::invalid_argument("tensor_product: empty kernel list");
    std::vector<PiecewisePoly1D> axes;
    for (const auto& p : parts)
        for (int i = 0; i < p.dim(); ++i) axes.push_back(p.axis(i));
    return SeparableKernel(std::move(axes));
}

std::complex<double> KernelSpectrum::value(std::span<const double> omega) const {
    std::complex<double> v(1.0, 0.0);
    for (int i = 0; i < kernel_->dim(); ++i)
        v *= kernel_->axis(i).fourier(omega[static_cast<size_t>(i)], 0);
    return v;
}

std::complex<double> KernelSpectrum::deriv(std::span<const int> l,
                                           std::span<const double> omega) const {
    std::complex<double> v(1.0, 0.0);
    for (int i = 0; i < kernel_->dim(); ++i)
        v *= kernel_->axis(i).fourier(omega[static_cast<size_t>(i)],
                                      l[static_cast<size_t>(i)]);
    return v;
}

int strang_fix_order(const SeparableKernel& kernel, int max_L, double tol, int k_max) {
    if (max_L < 1) throw std::invalid_argument("strang_fix_order: max_L must be >= 1");
    const int d = kernel.dim();
    const double two_pi = 2.0 * std::acos(-1.0);

    {
        const Point zero(static_cast<size_t>(d), 0.0);
        if (std::abs(KernelSpectrum(kernel).value(zero)) <= tol) return 0;
    }

    // per-axis spectral derivative tables at 2 pi k
    std::vector<std::vector<std::vector<std::complex<double>>>> table(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
        auto& ta = table[static_cast<size_t>(a)];
        ta.assign(static_cast<size_t>(max_L), {});
        for (int m = 0; m < max_L; ++m) {
            auto& row = ta[static_cast<size_t>(m)];
            row.resize(static_cast<size_t>(2 * k_max) + 1);
            for (int k = -k_max; k <= k_max; ++k)
                row[static_cast<size_t>(k + k_max)] =
                    kernel.axis(a).fourier(two_pi * static_cast<double>(k), m);
        }
    }

    const IntBox kbox = IntBox::cube(d, -k_max, k_max);
    for (int L = 1; L <= max_L; ++L) {
        // new multi-indices of total order L-1
        for (const Index& l : multi_indices_of_order(d, L - 1)) {
            bool ok = true;
            kbox.for_each([&](std::span<const int> k) {
                if (!ok) return;
                bool zero = true;
                for (int a = 0; a < d; ++a)
                    if (k[static_cast<size_t>(a)] != 0) zero = false;
                if (zero) return;
                std::complex<double> v(1.0, 0.0);
                for (int a = 0; a < d; ++a)
                    v *= table[static_cast<size_t>(a)][static_cast<size_t>(
                        l[static_cast<size_t>(a)])][static_cast<size_t>(
                        k[static_cast<size_t>(a)] + k_max)];
                if (std::abs(v) > tol) ok = false;
            });
            if (!ok) return L - 1;
        }
    }
    return max_L;
}

DiscreteFilter autocorrelation_sequence(const SeparableKernel& kernel, int radius) {
    if (radius < 0) throw std::invalid_argument("autocorrelation_sequence: radius must be >= 0");
    std::vector<DiscreteFilter> axes;
    axes.reserve(static_cast<size_t>(kernel.dim()));
    for (int a = 0; a < kernel.dim(); ++a) {
        const auto& ax = kernel.axis(a);
        std::vector<double> vals(static_cast<size_t>(2 * radius) + 1, 0.0);
        for (int k = 0; k <= radius; ++k) {
            const double v = ax.inner_product(ax, static_cast<double>(k));
            vals[static_cast<size_t>(radius + k)] = v;
            vals[static_cast<size_t>(radius - k)] = v;  // exact symmetry
        }
        axes.push_back(DiscreteFilter::from_range1d(-radius, std::move(vals)));
    }
    return DiscreteFilter::tensor(axes);
}

ReproductionResidual polynomial_reproduction_residual(
    const SeparableKernel& kernel, const DiscreteFilter& prefilter,
    std::span<const int> l, std::span<const Point> grid, int K) {
    const int d = kernel.dim();
    if (static_cast<int>(l.size()) != d)
        throw std::invalid_argument("polynomial_reproduction_residual: multi-index rank mismatch");
    if (prefilter.dim() != d)
        throw std::invalid_argument("polynomial_reproduction_residual: prefilter rank mismatch");

    const auto phi_int = [&](std::span<const double> y) {
        double acc = 0.0;
        prefilter.box().for_each([&](std::span<const int> m) {
            const double am = prefilter.at(m);
            if (am == 0.0) return;
            Point z(static_cast<size_t>(d));
            for (int a = 0; a < d; ++a)
                z[static_cast<size_t>(a)] =
                    y[static_cast<size_t>(a)] - static_cast<double>(m[static_cast<size_t>(a)]);
            acc += am * kernel(z);
        });
        return acc;
    };

    double worst = 0.0;
    const IntBox kbox = IntBox::cube(d, -K, K);
    for (const Point& x : grid) {
        double sum = 0.0;
        kbox.for_each([&](std::span<const int> k) {
            Point y(static_cast<size_t>(d));
            bool feasible = true;
            for (int a = 0; a < d; ++a) {
                y[static_cast<size_t>(a)] =
                    x[static_cast<size_t>(a)] - static_cast<double>(k[static_cast<size_t>(a)]);
                const double r = kernel.support_radius(a) +
                                 std::max(std::abs(prefilter.box().lo[static_cast<size_t>(a)]),
                                          std::abs(prefilter.box().hi[static_cast<size_t>(a)])) + 1.0;
                if (std::abs(y[static_cast<size_t>(a)]) > r) feasible = false;
            }
            if (!feasible) return;
            double kp = 1.0;  // k^l with 0^0 = 1
            for (int a = 0; a < d; ++a)
                for (int e = 0; e < l[static_cast<size_t>(a)]; ++e)
                    kp *= static_cast<double>(k[static_cast<size_t>(a)]);
            if (kp == 0.0) return;
            sum += kp * phi_int(y);
        });
        double xp = 1.0;
        for (int a = 0; a < d; ++a)
            xp *= std::pow(x[static_cast<size_t>(a)], static_cast<double>(l[static_cast<size_t>(a)]));
        worst = std::max(worst, std::abs(sum - xp));
    }
    return {worst, K};
}

std::string kernel_to_json(const SeparableKernel& kernel,
                           std::optional<int> exact_bspline_order) {
    nlohmann::json j;
    j["dim"] = kernel.dim();
    nlohmann::json axes = nlohmann::json::array();
    for (int a = 0; a < kernel.dim(); ++a) {
        nlohmann::json ja;
        ja["knots"] = kernel.axis(a).knots();
        ja["coeffs"] = kernel.axis(a).coeffs();
        axes.push_back(std::move(ja));
    }
    j["axes"] = std::move(axes);
    if (exact_bspline_order) {
        const RationalPoly exact = bspline1d_exact_coeffs(*exact_bspline_order);
        nlohmann::json je = nlohmann::json::array();
        for (const auto& iv : exact.intervals) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& [n, dd] : iv) row.push_back({n, dd});
            je.push_back(std::move(row));
        }
        j["rational"] = {{"order", *exact_bspline_order}, {"intervals", std::move(je)}};
    }
    return j.dump(2);
}

SeparableKernel kernel_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    std::vector<PiecewisePoly1D> axes;
    for (const auto& ja : j.at("axes")) {
        axes.emplace_back(ja.at("knots").get<std::vector<double>>(),
                          ja.at("coeffs").get<std::vector<std::vector<double>>>());
    }
    return SeparableKernel(std::move(axes));
}

}  // namespace siapprox
