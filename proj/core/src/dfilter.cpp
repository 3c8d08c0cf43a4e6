#include "siapprox/dfilter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "siapprox/kernel.hpp"

#include <nlohmann/json.hpp>

namespace siapprox {

DiscreteFilter::DiscreteFilter(IntBox box, std::vector<double> values)
    : box_(std::move(box)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != box_.size())
        throw std::invalid_argument("DiscreteFilter: value count does not match box");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("DiscreteFilter: non-finite entry");
}

DiscreteFilter DiscreteFilter::delta(int dim) {
    return DiscreteFilter(IntBox::cube(dim, 0, 0), {1.0});
}

DiscreteFilter DiscreteFilter::from_range1d(int lo, std::vector<double> values) {
    const int hi = lo + static_cast<int>(values.size()) - 1;
    return DiscreteFilter(IntBox({lo}, {hi}), std::move(values));
}

DiscreteFilter DiscreteFilter::tensor(const std::vector<DiscreteFilter>& axes) {
    if (axes.empty()) throw std::invalid_argument("DiscreteFilter::tensor: empty factor list");
    Index lo, hi;
    for (const auto& a : axes) {
        if (a.dim() != 1)
            throw std::invalid_argument("DiscreteFilter::tensor: factors must be 1-D");
        lo.push_back(a.box().lo[0]);
        hi.push_back(a.box().hi[0]);
    }
    IntBox box(std::move(lo), std::move(hi));
    std::vector<double> vals(static_cast<size_t>(box.size()));
    box.for_each([&](std::span<const int> k) {
        double v = 1.0;
        for (size_t a = 0; a < axes.size(); ++a) {
            const int ka[1] = {k[a]};
            v *= axes[a].at(ka);
        }
        vals[static_cast<size_t>(box.offset(k))] = v;
    });
    return DiscreteFilter(std::move(box), std::move(vals));
}

bool DiscreteFilter::is_symmetric(double tol) const {
    bool ok = true;
    box_.for_each([&](std::span<const int> k) {
        Index mk(k.begin(), k.end());
        for (int& v : mk) v = -v;
        const double a = at(k);
        const double b = at(mk);
        if (std::abs(a - b) > tol) ok = false;
    });
    return ok;
}

std::complex<double> DiscreteFilter::symbol(std::span<const double> omega) const {
    if (static_cast<int>(omega.size()) != dim())
        throw std::invalid_argument("DiscreteFilter::symbol: frequency rank mismatch");
    std::complex<double> acc(0.0, 0.0);
    box_.for_each([&](std::span<const int> k) {
        double phase = 0.0;
        for (int a = 0; a < dim(); ++a)
            phase += omega[static_cast<size_t>(a)] * static_cast<double>(k[static_cast<size_t>(a)]);
        acc += values_[static_cast<size_t>(box_.offset(k))] *
               std::exp(std::complex<double>(0.0, -phase));
    });
    return acc;
}

double DiscreteFilter::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double DiscreteFilter::l1_norm() const {
    double m = 0.0;
    for (double v : values_) m += std::abs(v);
    return m;
}

DiscreteFilter DiscreteFilter::truncated(double threshold) const {
    Index lo = box_.lo, hi = box_.hi;
    for (int a = 0; a < dim(); ++a) {
        auto slab_below = [&](int coord) {
            bool below = true;
            box_.for_each([&](std::span<const int> k) {
                if (k[static_cast<size_t>(a)] != coord) return;
                if (std::abs(values_[static_cast<size_t>(box_.offset(k))]) > threshold)
                    below = false;
            });
            return below;
        };
        while (lo[static_cast<size_t>(a)] < hi[static_cast<size_t>(a)] &&
               slab_below(lo[static_cast<size_t>(a)]))
            ++lo[static_cast<size_t>(a)];
        while (hi[static_cast<size_t>(a)] > lo[static_cast<size_t>(a)] &&
               slab_below(hi[static_cast<size_t>(a)]))
            --hi[static_cast<size_t>(a)];
    }
    IntBox nb(lo, hi);
    std::vector<double> nv(static_cast<size_t>(nb.size()));
    nb.for_each([&](std::span<const int> k) {
        nv[static_cast<size_t>(nb.offset(k))] = at(k);
    });
    DiscreteFilter out(std::move(nb), std::move(nv));
    out.decay_ = decay_;
    out.truncation_threshold_ = threshold;
    return out;
}

DiscreteFilter convolve(const DiscreteFilter& a, const DiscreteFilter& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("convolve: rank mismatch");
    IntBox box = minkowski_sum(a.box(), b.box());
    std::vector<double> vals(static_cast<size_t>(box.size()), 0.0);
    a.box().for_each([&](std::span<const int> i) {
        const double av = a.at(i);
        if (av == 0.0) return;
        b.box().for_each([&](std::span<const int> j) {
            Index k(a.dim());
            for (int t = 0; t < a.dim(); ++t)
                k[static_cast<size_t>(t)] = i[static_cast<size_t>(t)] + j[static_cast<size_t>(t)];
            vals[static_cast<size_t>(box.offset(k))] += av * b.at(j);
        });
    });
    return DiscreteFilter(std::move(box), std::move(vals));
}

DiscreteFilter sample_kernel_axis(const PiecewisePoly1D& axis) {
    const int lo = static_cast<int>(std::ceil(axis.support_lo() - 1e-12));
    const int hi = static_cast<int>(std::floor(axis.support_hi() + 1e-12));
    std::vector<double> vals;
    for (int k = lo; k <= hi; ++k) vals.push_back(axis(static_cast<double>(k)));
    DiscreteFilter raw = DiscreteFilter::from_range1d(lo, std::move(vals));
    return raw.truncated(0.0);
}

DiscreteFilter sample_kernel(const SeparableKernel& kernel) {
    std::vector<DiscreteFilter> axes;
    for (int a = 0; a < kernel.dim(); ++a) axes.push_back(sample_kernel_axis(kernel.axis(a)));
    return DiscreteFilter::tensor(axes);
}

DiscreteFilter invert_symbol_periodic(const DiscreteFilter& f, int N, double tol) {
    if (f.dim() != 1)
        throw std::invalid_argument(
            "invert_symbol_periodic: 1-D filters only; build multi-dimensional "
            "inverses from separable factors");
    if (N < 8) throw std::invalid_argument("invert_symbol_periodic: N too small");
    if (tol <= 0) throw std::invalid_argument("invert_symbol_periodic: tol must be > 0");

    const double two_pi = 2.0 * std::acos(-1.0);

    // near-symmetric inputs (rounding-level mismatches) are symmetrized so
    // the inverse mirrors exactly
    const bool symmetric = f.is_symmetric(1e-13 * std::max(1.0, f.sup_norm()));
    DiscreteFilter work = f;
    if (symmetric && !f.is_symmetric(0.0)) {
        const int K0 = std::max(std::abs(f.box().lo[0]), std::abs(f.box().hi[0]));
        std::vector<double> sym(static_cast<size_t>(2 * K0) + 1);
        for (int k = 0; k <= K0; ++k) {
            const double v = 0.5 * (f.at1d(k) + f.at1d(-k));
            sym[static_cast<size_t>(K0 + k)] = v;
            sym[static_cast<size_t>(K0 - k)] = v;
        }
        work = DiscreteFilter::from_range1d(-K0, std::move(sym)).truncated(0.0);
    }

    std::vector<std::complex<double>> inv(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double w[1] = {two_pi * static_cast<double>(j) / static_cast<double>(N)};
        const std::complex<double> s = work.symbol(w);
        if (std::abs(s) < tol) {
            std::ostringstream os;
            os << "invert_symbol_periodic: symbol magnitude " << std::abs(s)
               << " below tolerance " << tol << " at omega = " << w[0];
            throw std::domain_error(os.str());
        }
        inv[static_cast<size_t>(j)] = 1.0 / s;
    }

    constexpr double kStoreThreshold = 1e-14;
    const int k_cap = N / 2 - 1;

    // b[k] = (1/N) sum_j inv_j e^{+j w_j k}; phases advanced incrementally.
    std::vector<std::complex<double>> rot(static_cast<size_t>(N));
    std::vector<std::complex<double>> cur(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
        rot[static_cast<size_t>(j)] =
            std::exp(std::complex<double>(0.0, two_pi * static_cast<double>(j) / N));
        cur[static_cast<size_t>(j)] = inv[static_cast<size_t>(j)];
    }
    auto row_value = [&]() {
        std::complex<double> s(0.0, 0.0);
        for (int j = 0; j < N; ++j) s += cur[static_cast<size_t>(j)];
        return s.real() / static_cast<double>(N);
    };

    std::vector<double> plus;   // b[0], b[1], ...
    std::vector<double> minus;  // b[-1], b[-2], ...
    plus.push_back(row_value());
    int quiet = 0;
    for (int k = 1; k <= k_cap; ++k) {
        for (int j = 0; j < N; ++j) cur[static_cast<size_t>(j)] *= rot[static_cast<size_t>(j)];
        const double bp = row_value();
        plus.push_back(bp);
        double bm;
        if (symmetric) {
            bm = bp;
        } else {
            std::complex<double> s(0.0, 0.0);
            for (int j = 0; j < N; ++j)
                s += inv[static_cast<size_t>(j)] *
                     std::exp(std::complex<double>(
                         0.0, -two_pi * static_cast<double>(j) * k / static_cast<double>(N)));
            bm = s.real() / static_cast<double>(N);
        }
        minus.push_back(bm);
        if (std::abs(bp) < kStoreThreshold && std::abs(bm) < kStoreThreshold)
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 3) break;
    }

    int K = static_cast<int>(plus.size()) - 1;
    while (K > 0 && std::abs(plus[static_cast<size_t>(K)]) < kStoreThreshold &&
           std::abs(minus[static_cast<size_t>(K) - 1]) < kStoreThreshold)
        --K;

    std::vector<double> vals(static_cast<size_t>(2 * K) + 1, 0.0);
    for (int k = 0; k <= K; ++k) vals[static_cast<size_t>(K + k)] = plus[static_cast<size_t>(k)];
    for (int k = 1; k <= K; ++k)
        vals[static_cast<size_t>(K - k)] =
            symmetric ? plus[static_cast<size_t>(k)] : minus[static_cast<size_t>(k) - 1];

    DiscreteFilter out = DiscreteFilter::from_range1d(-K, std::move(vals)).truncated(kStoreThreshold);

    // decay certificate from the stored tail
    const int Ks = std::max(std::abs(out.box().lo[0]), std::abs(out.box().hi[0]));
    if (Ks >= 3) {
        auto shell = [&](int k) {
            return std::max(std::abs(out.at1d(k)), std::abs(out.at1d(-k)));
        };
        const int k1 = std::max(1, (2 * Ks) / 3);
        const int k2 = Ks;
        const double m1 = shell(k1), m2 = shell(k2);
        if (m1 > 0.0 && m2 > 0.0 && m2 < m1) {
            const double rho = std::pow(m2 / m1, 1.0 / static_cast<double>(k2 - k1));
            double C = 0.0;
            for (int k = 0; k <= Ks; ++k)
                C = std::max(C, shell(k) / std::pow(rho, static_cast<double>(k)));
            out.set_decay({rho, C});
        }
    }
    return out;
}

DiscreteFilter dual_filter_axis(const PiecewisePoly1D& axis, int N) {
    const int width =
        static_cast<int>(std::ceil(axis.support_hi() - axis.support_lo() - 1e-12));
    std::vector<double> vals(static_cast<size_t>(2 * width) + 1, 0.0);
    for (int k = 0; k <= width; ++k) {
        const double v = axis.inner_product(axis, static_cast<double>(k));
        vals[static_cast<size_t>(width + k)] = v;
        vals[static_cast<size_t>(width - k)] = v;
    }
    const DiscreteFilter acorr =
        DiscreteFilter::from_range1d(-width, std::move(vals)).truncated(0.0);
    try {
        return invert_symbol_periodic(acorr, N, 1e-8);
    } catch (const std::domain_error&) {
        double mn = 1e300;
        const double two_pi = 2.0 * std::acos(-1.0);
        for (int j = 0; j < N; ++j) {
            const double w[1] = {two_pi * static_cast<double>(j) / static_cast<double>(N)};
            mn = std::min(mn, std::abs(acorr.symbol(w)));
        }
        std::ostringstream os;
        os << "dual_filter: Riesz lower bound violated; min symbol value " << mn;
        throw std::domain_error(os.str());
    }
}

DiscreteFilter dual_filter(const SeparableKernel& kernel, int N) {
    std::vector<DiscreteFilter> axes;
    for (int a = 0; a < kernel.dim(); ++a) axes.push_back(dual_filter_axis(kernel.axis(a), N));
    return DiscreteFilter::tensor(axes);
}

DiscreteFilter interp_prefilter_axis(const PiecewisePoly1D& axis, int N) {
    return invert_symbol_periodic(sample_kernel_axis(axis), N, 1e-8);
}

DiscreteFilter interp_prefilter(const SeparableKernel& kernel, int N) {
    std::vector<DiscreteFilter> axes;
    for (int a = 0; a < kernel.dim(); ++a)
        axes.push_back(interp_prefilter_axis(kernel.axis(a), N));
    return DiscreteFilter::tensor(axes);
}

std::string filter_to_json(const DiscreteFilter& f) {
    nlohmann::json j;
    j["dim"] = f.dim();
    nlohmann::json entries = nlohmann::json::array();
    f.box().for_each([&](std::span<const int> k) {
        const double v = f.at(k);
        if (v == 0.0) return;
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < f.dim(); ++a) row.push_back(k[static_cast<size_t>(a)]);
        row.push_back(v);
        entries.push_back(std::move(row));
    });
    j["entries"] = std::move(entries);
    if (f.decay())
        j["decay"] = {{"rho", f.decay()->rho}, {"C", f.decay()->C}};
    else
        j["decay"] = nullptr;
    return j.dump(2);
}

DiscreteFilter filter_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int d = j.at("dim").get<int>();
    const auto& entries = j.at("entries");
    if (entries.empty()) return DiscreteFilter(IntBox::cube(d, 0, 0),
                                               std::vector<double>(1, 0.0));
    Index lo(static_cast<size_t>(d), 0), hi(static_cast<size_t>(d), 0);
    bool first = true;
    for (const auto& e : entries) {
        for (int a = 0; a < d; ++a) {
            const int k = e.at(static_cast<size_t>(a)).get<int>();
            if (first) {
                lo[static_cast<size_t>(a)] = hi[static_cast<size_t>(a)] = k;
            } else {
                lo[static_cast<size_t>(a)] = std::min(lo[static_cast<size_t>(a)], k);
                hi[static_cast<size_t>(a)] = std::max(hi[static_cast<size_t>(a)], k);
            }
        }
        first = false;
    }
    IntBox box(lo, hi);
    std::vector<double> vals(static_cast<size_t>(box.size()), 0.0);
    for (const auto& e : entries) {
        Index k(static_cast<size_t>(d));
        for (int a = 0; a < d; ++a) k[static_cast<size_t>(a)] = e.at(static_cast<size_t>(a)).get<int>();
        vals[static_cast<size_t>(box.offset(k))] = e.at(static_cast<size_t>(d)).get<double>();
    }
    DiscreteFilter out(std::move(box), std::move(vals));
    if (!j.at("decay").is_null())
        out.set_decay({j.at("decay").at("rho").get<double>(), j.at("decay").at("C").get<double>()});
    return out;
}

}  // namespace siapprox
