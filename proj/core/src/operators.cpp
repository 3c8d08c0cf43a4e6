#include "siapprox/operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "siapprox/signals.hpp"

#include <nlohmann/json.hpp>

namespace siapprox {

namespace {

// Gauss-Legendre nodes/weights on [0, 1].
struct GaussRule {
    std::vector<double> xi;
    std::vector<double> wi;
};

GaussRule gauss_rule(int n) {
    // standard [-1, 1] abscissae
    static const std::map<int, std::pair<std::vector<double>, std::vector<double>>> table = {
        {2, {{-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}}},
        {3, {{-0.7745966692414834, 0.0, 0.7745966692414834},
             {0.5555555555555556, 0.8888888888888888, 0.5555555555555556}}},
        {4, {{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
              0.8611363115940526},
             {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
              0.3478548451374538}}},
        {5, {{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
              0.9061798459386640},
             {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
              0.4786286704993665, 0.2369268850561891}}},
        {6, {{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
              0.2386191860831969, 0.6612093864662645, 0.9324695142031521},
             {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
              0.4679139345726910, 0.3607615730481386, 0.1713244923791704}}},
        {8, {{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
              -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
              0.7966664774136267, 0.9602898564975363},
             {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
              0.2223810344533745, 0.1012285362903763}}},
    };
    const auto it = table.find(n);
    if (it == table.end())
        throw std::invalid_argument("gauss_rule: supported node counts are 2,3,4,5,6,8");
    GaussRule r;
    for (size_t i = 0; i < it->second.first.size(); ++i) {
        r.xi.push_back(0.5 * (1.0 + it->second.first[i]));
        r.wi.push_back(0.5 * it->second.second[i]);
    }
    return r;
}

// Apply a 1-D filter along `axis`: out[k] = sum_m q[m] in[k - m], where the
// input box must contain out_box (+) supp(q) along that axis.
std::vector<double> apply_filter_axis(const std::vector<double>& in, const IntBox& in_box,
                                      const IntBox& out_box, int axis,
                                      const DiscreteFilter& q) {
    std::vector<double> out(static_cast<size_t>(out_box.size()), 0.0);
    const int qlo = q.box().lo[0], qhi = q.box().hi[0];
    out_box.for_each([&](std::span<const int> k) {
        Index src(k.begin(), k.end());
        double acc = 0.0;
        for (int m = qlo; m <= qhi; ++m) {
            src[static_cast<size_t>(axis)] = k[static_cast<size_t>(axis)] - m;
            acc += q.at1d(m) * in[static_cast<size_t>(in_box.offset(src))];
        }
        out[static_cast<size_t>(out_box.offset(k))] = acc;
    });
    return out;
}

// Integer k-range whose kernel support contains the scaled point t.
std::pair<int, int> active_range(const PiecewisePoly1D& axis, double t) {
    const int kmin = static_cast<int>(std::ceil(t - axis.support_hi() - 1e-12));
    const int kmax = static_cast<int>(std::floor(t - axis.support_lo() + 1e-12));
    return {kmin, kmax};
}

IntBox coefficient_box(const SeparableKernel& kernel, double h, double cover_T, int pad) {
    Index lo(static_cast<size_t>(kernel.dim())), hi(static_cast<size_t>(kernel.dim()));
    for (int a = 0; a < kernel.dim(); ++a) {
        const int M = static_cast<int>(std::ceil(cover_T / h)) +
                      static_cast<int>(std::ceil(kernel.support_radius(a))) + pad;
        lo[static_cast<size_t>(a)] = -M;
        hi[static_cast<size_t>(a)] = M;
    }
    return IntBox(std::move(lo), std::move(hi));
}

}  // namespace

double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i)
        v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

std::string CoefficientField::to_json() const {
    nlohmann::json j;
    j["h"] = h;
    j["support"] = {{"lo", box.lo}, {"hi", box.hi}};
    j["values"] = values;
    j["provenance"] = provenance;
    return j.dump();
}

double synthesize(const CoefficientField& c, std::span<const double> x) {
    const int d = c.dim();
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("synthesize: point rank mismatch");
    const SeparableKernel& phi = *c.kernel;

    // per-axis active coefficient ranges and kernel values
    std::vector<std::vector<double>> axvals(static_cast<size_t>(d));
    Index klo(static_cast<size_t>(d)), khi(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double t = x[static_cast<size_t>(a)] / c.h;
        auto [kmin, kmax] = active_range(phi.axis(a), t);
        if (kmin < c.box.lo[static_cast<size_t>(a)] || kmax > c.box.hi[static_cast<size_t>(a)])
            throw std::invalid_argument(
                "synthesize: point not covered by the coefficient support box");
        klo[static_cast<size_t>(a)] = kmin;
        khi[static_cast<size_t>(a)] = kmax;
        auto& vals = axvals[static_cast<size_t>(a)];
        vals.resize(static_cast<size_t>(kmax - kmin + 1));
        for (int k = kmin; k <= kmax; ++k)
            vals[static_cast<size_t>(k - kmin)] = phi.axis(a)(t - static_cast<double>(k));
    }
    double acc = 0.0;
    IntBox(klo, khi).for_each([&](std::span<const int> k) {
        double w = 1.0;
        for (int a = 0; a < d; ++a)
            w *= axvals[static_cast<size_t>(a)][static_cast<size_t>(
                k[static_cast<size_t>(a)] - klo[static_cast<size_t>(a)])];
        if (w != 0.0) acc += w * c.values[static_cast<size_t>(c.box.offset(k))];
    });
    return acc;
}

GridSignal synthesize_grid(const CoefficientField& c, const GridGeometry& geom) {
    std::vector<double> vals(static_cast<size_t>(geom.total_points()));
    const std::int64_t n = geom.points_per_axis();
    std::vector<double> x(static_cast<size_t>(geom.dim));
    SynthesisEvaluator ev(c);
    Index idx(static_cast<size_t>(geom.dim), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < geom.dim; ++a) x[static_cast<size_t>(a)] = geom.coord(idx[static_cast<size_t>(a)]);
        vals[static_cast<size_t>(flat++)] = ev(x);
        int a = geom.dim - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(n)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return GridSignal(geom, std::move(vals), "synthesized:" + c.provenance);
}

double SynthesisEvaluator::operator()(std::span<const double> x) {
    const CoefficientField& c = *c_;
    const int d = c.dim();
    if (d == 1) return synthesize(c, x);

    if (d == 2) {
        const SeparableKernel& phi = *c.kernel;
        if (x[0] != outer_cache_) {
            // contract the first axis at x0 into a 1-D coefficient row
            const double t0 = x[0] / c.h;
            auto [kmin, kmax] = active_range(phi.axis(0), t0);
            if (kmin < c.box.lo[0] || kmax > c.box.hi[0])
                throw std::invalid_argument(
                    "synthesize: point not covered by the coefficient support box");
            row_lo_ = c.box.lo[1];
            const int n1 = c.box.extent(1);
            row_.assign(static_cast<size_t>(n1), 0.0);
            for (int k0 = kmin; k0 <= kmax; ++k0) {
                const double w0 = phi.axis(0)(t0 - static_cast<double>(k0));
                if (w0 == 0.0) continue;
                const int base[2] = {k0, row_lo_};
                const auto off = static_cast<size_t>(c.box.offset(base));
                for (int j = 0; j < n1; ++j)
                    row_[static_cast<size_t>(j)] += w0 * c.values[off + static_cast<size_t>(j)];
            }
            outer_cache_ = x[0];
        }
        const double t1 = x[1] / c.h;
        auto [kmin, kmax] = active_range(phi.axis(1), t1);
        if (kmin < c.box.lo[1] || kmax > c.box.hi[1])
            throw std::invalid_argument(
                "synthesize: point not covered by the coefficient support box");
        double acc = 0.0;
        for (int k1 = kmin; k1 <= kmax; ++k1)
            acc += phi.axis(1)(t1 - static_cast<double>(k1)) *
                   row_[static_cast<size_t>(k1 - row_lo_)];
        return acc;
    }
    return synthesize(c, x);
}

namespace {

// s[k] = int f(h t) prod_a phi_a(t_a - k_a) dt over the panel grid, shared
// between the 1-D and 2-D analysis passes.
struct AxisQuadTable {
    // phi values at Gauss nodes of each unit-fraction panel across the support
    std::vector<double> phi;  // [panel][node] flattened
    int panels;               // support width * m
    int first_panel;          // panel index of support_lo * m
    int m;
    int nodes;
};

AxisQuadTable axis_table(const PiecewisePoly1D& axis, int m, const GaussRule& g) {
    AxisQuadTable t;
    t.m = m;
    t.nodes = static_cast<int>(g.xi.size());
    const double lo = axis.support_lo();
    const double width = axis.support_hi() - lo;
    t.panels = static_cast<int>(std::lround(width * m));
    if (std::abs(width * m - std::lround(width * m)) > 1e-9)
        throw std::invalid_argument("analysis quadrature: support width must be a panel multiple");
    t.first_panel = static_cast<int>(std::lround(lo * m));
    if (std::abs(lo * m - std::lround(lo * m)) > 1e-9)
        throw std::invalid_argument(
            "analysis quadrature: panel grid must align with the kernel support "
            "(use an even panels_per_unit for half-integer knots)");
    t.phi.resize(static_cast<size_t>(t.panels) * static_cast<size_t>(t.nodes));
    for (int p = 0; p < t.panels; ++p)
        for (int i = 0; i < t.nodes; ++i) {
            const double tt = (static_cast<double>(t.first_panel + p) + g.xi[static_cast<size_t>(i)]) /
                              static_cast<double>(m);
            t.phi[static_cast<size_t>(p) * static_cast<size_t>(t.nodes) + static_cast<size_t>(i)] =
                axis(tt);
        }
    return t;
}

}  // namespace

CoefficientField project(const TestSignal& f, std::shared_ptr<const SeparableKernel> kernel,
                         double h, double cover_T, const AnalysisQuad& quad, int dft_N) {
    const int d = kernel->dim();
    if (f.dim() != d) throw std::invalid_argument("project: signal/kernel rank mismatch");
    if (quad.panels_per_unit < 8 || quad.panels_per_unit % 2 != 0)
        throw std::invalid_argument("project: panels_per_unit must be even and >= 8");

    std::vector<DiscreteFilter> duals;
    duals.reserve(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) duals.push_back(dual_filter_axis(kernel->axis(a), dft_N));

    const IntBox cbox = coefficient_box(*kernel, h, cover_T, 2);
    Index slo = cbox.lo, shi = cbox.hi;
    for (int a = 0; a < d; ++a) {
        slo[static_cast<size_t>(a)] += duals[static_cast<size_t>(a)].box().lo[0];
        shi[static_cast<size_t>(a)] += duals[static_cast<size_t>(a)].box().hi[0];
    }
    const IntBox sbox(slo, shi);

    const GaussRule g = gauss_rule(quad.gauss_nodes);
    const int m = quad.panels_per_unit;
    std::vector<AxisQuadTable> tables;
    tables.reserve(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) tables.push_back(axis_table(kernel->axis(a), m, g));

    std::vector<double> s(static_cast<size_t>(sbox.size()), 0.0);

    if (d == 1) {
        const auto& tb = tables[0];
        const int klo = sbox.lo[0], khi = sbox.hi[0];
        // cache f at all Gauss nodes across the union of supports
        const int p_first = klo * m + tb.first_panel;
        const int p_count = (khi - klo) * m + tb.panels;
        std::vector<double> fcache(static_cast<size_t>(p_count) * g.xi.size());
        double xx[1];
        for (int p = 0; p < p_count; ++p)
            for (size_t i = 0; i < g.xi.size(); ++i) {
                const double t = (static_cast<double>(p_first + p) + g.xi[i]) /
                                 static_cast<double>(m);
                xx[0] = h * t;
                fcache[static_cast<size_t>(p) * g.xi.size() + i] =
                    g.wi[i] / static_cast<double>(m) * f.value(xx);
            }
        for (int k = klo; k <= khi; ++k) {
            double acc = 0.0;
            const int pbase = (k - klo) * m;
            for (int q = 0; q < tb.panels; ++q)
                for (int i = 0; i < tb.nodes; ++i)
                    acc += tb.phi[static_cast<size_t>(q) * static_cast<size_t>(tb.nodes) +
                                  static_cast<size_t>(i)] *
                           fcache[static_cast<size_t>(pbase + q) * g.xi.size() +
                                  static_cast<size_t>(i)];
            const int kk[1] = {k};
            s[static_cast<size_t>(sbox.offset(kk))] = acc;
        }
    } else if (d == 2) {
        const auto& tb0 = tables[0];
        const auto& tb1 = tables[1];
        const int klo0 = sbox.lo[0], khi0 = sbox.hi[0];
        const int klo1 = sbox.lo[1], khi1 = sbox.hi[1];
        const int n1 = khi1 - klo1 + 1;
        const int p1_first = klo1 * m + tb1.first_panel;
        const int p1_count = (khi1 - klo1) * m + tb1.panels;
        std::vector<double> frow(static_cast<size_t>(p1_count) * g.xi.size());
        std::vector<double> rowint(static_cast<size_t>(n1));
        const int p0_first = klo0 * m + tb0.first_panel;
        const int p0_count = (khi0 - klo0) * m + tb0.panels;
        double xx[2];
        for (int p0 = 0; p0 < p0_count; ++p0) {
            for (size_t i0 = 0; i0 < g.xi.size(); ++i0) {
                const double t0 = (static_cast<double>(p0_first + p0) + g.xi[i0]) /
                                  static_cast<double>(m);
                xx[0] = h * t0;
                // row of weighted f values along axis 1
                for (int p1 = 0; p1 < p1_count; ++p1)
                    for (size_t i1 = 0; i1 < g.xi.size(); ++i1) {
                        const double t1 = (static_cast<double>(p1_first + p1) + g.xi[i1]) /
                                          static_cast<double>(m);
                        xx[1] = h * t1;
                        frow[static_cast<size_t>(p1) * g.xi.size() + i1] =
                            g.wi[i1] / static_cast<double>(m) * f.value(xx);
                    }
                // contract axis 1 against phi1
                for (int k1 = klo1; k1 <= khi1; ++k1) {
                    double acc = 0.0;
                    const int pbase = (k1 - klo1) * m;
                    for (int q = 0; q < tb1.panels; ++q)
                        for (int i = 0; i < tb1.nodes; ++i)
                            acc += tb1.phi[static_cast<size_t>(q) * static_cast<size_t>(tb1.nodes) +
                                           static_cast<size_t>(i)] *
                                   frow[static_cast<size_t>(pbase + q) * g.xi.size() +
                                        static_cast<size_t>(i)];
                    rowint[static_cast<size_t>(k1 - klo1)] = acc;
                }
                // scatter into the few active k0 rows
                const double w0 = g.wi[i0] / static_cast<double>(m);
                const int panel_abs = p0_first + p0;
                // k0 with panel_abs in [k0*m + first_panel, k0*m + first_panel + panels)
                const int k0_hi = static_cast<int>(
                    std::floor(static_cast<double>(panel_abs - tb0.first_panel) / m));
                const int k0_lo = static_cast<int>(std::ceil(
                    static_cast<double>(panel_abs - tb0.first_panel - tb0.panels + 1) / m));
                for (int k0 = std::max(k0_lo, klo0); k0 <= std::min(k0_hi, khi0); ++k0) {
                    const int q0 = panel_abs - (k0 * m + tb0.first_panel);
                    const double pv =
                        tb0.phi[static_cast<size_t>(q0) * static_cast<size_t>(tb0.nodes) +
                                i0] *
                        w0;
                    if (pv == 0.0) continue;
                    double* dst = s.data() +
                                  (static_cast<size_t>(k0 - klo0) * static_cast<size_t>(n1));
                    for (int j = 0; j < n1; ++j) dst[j] += pv * rowint[static_cast<size_t>(j)];
                }
            }
        }
    } else {
        throw std::invalid_argument("project: analysis pass implemented for d <= 2");
    }

    // dual filtering per axis, shrinking from the s box to the coefficient box
    std::vector<double> cur = std::move(s);
    IntBox cur_box = sbox;
    for (int a = 0; a < d; ++a) {
        Index nlo = cur_box.lo, nhi = cur_box.hi;
        nlo[static_cast<size_t>(a)] = cbox.lo[static_cast<size_t>(a)];
        nhi[static_cast<size_t>(a)] = cbox.hi[static_cast<size_t>(a)];
        IntBox next(nlo, nhi);
        cur = apply_filter_axis(cur, cur_box, next, a, duals[static_cast<size_t>(a)]);
        cur_box = next;
    }

    CoefficientField out;
    out.h = h;
    out.box = cbox;
    out.values = std::move(cur);
    out.kernel = std::move(kernel);
    out.provenance = "projection";
    return out;
}

CoefficientField project(const GridSignal& f, std::shared_ptr<const SeparableKernel> kernel,
                         double h, int dft_N) {
    const int d = kernel->dim();
    if (f.dim() != d) throw std::invalid_argument("project: signal/kernel rank mismatch");
    const double ratio = h / f.geometry().delta;
    const auto m = static_cast<int>(std::lround(ratio));
    if (m < 8 || std::abs(ratio - static_cast<double>(m)) > 1e-9 || m % 2 != 0)
        throw std::invalid_argument(
            "project: h must be an even integer multiple (>= 8) of the grid step");

    std::vector<DiscreteFilter> duals;
    for (int a = 0; a < d; ++a) duals.push_back(dual_filter_axis(kernel->axis(a), dft_N));

    // coefficient box limited by the stored window
    Index clo(static_cast<size_t>(d)), chi(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double R = kernel->support_radius(a);
        const int M = static_cast<int>(std::floor(f.geometry().T / h - R)) -
                      std::max(-duals[static_cast<size_t>(a)].box().lo[0],
                               duals[static_cast<size_t>(a)].box().hi[0]) - 1;
        if (M < 1) throw std::invalid_argument("project: window too small for this h");
        clo[static_cast<size_t>(a)] = -M;
        chi[static_cast<size_t>(a)] = M;
    }
    const IntBox cbox(clo, chi);
    Index slo = cbox.lo, shi = cbox.hi;
    for (int a = 0; a < d; ++a) {
        slo[static_cast<size_t>(a)] += duals[static_cast<size_t>(a)].box().lo[0];
        shi[static_cast<size_t>(a)] += duals[static_cast<size_t>(a)].box().hi[0];
    }
    const IntBox sbox(slo, shi);

    if (d != 1)
        throw std::invalid_argument("project(GridSignal): implemented for d = 1; use the "
                                    "analytic-signal overload for d = 2");

    // composite Simpson on the stored samples, panels aligned with knots
    const auto& ax = kernel->axis(0);
    const int lo_panel = static_cast<int>(std::lround(ax.support_lo() * m));
    const int panels = static_cast<int>(std::lround((ax.support_hi() - ax.support_lo()) * m));
    std::vector<double> phi_nodes(static_cast<size_t>(panels) + 1);
    for (int p = 0; p <= panels; ++p)
        phi_nodes[static_cast<size_t>(p)] =
            ax((static_cast<double>(lo_panel + p)) / static_cast<double>(m));

    std::vector<double> s(static_cast<size_t>(sbox.size()), 0.0);
    const auto n = static_cast<std::int64_t>(f.geometry().points_per_axis());
    for (int k = sbox.lo[0]; k <= sbox.hi[0]; ++k) {
        // y = h t, t = k + (lo_panel + p)/m; grid index j with y = -T + j delta
        double acc = 0.0;
        for (int p = 0; p <= panels; ++p) {
            const std::int64_t j =
                static_cast<std::int64_t>(k) * m + lo_panel + p +
                static_cast<std::int64_t>(std::llround(f.geometry().T / f.geometry().delta));
            if (j < 0 || j >= n) continue;
            double sw;  // Simpson weight over the kernel support in t units
            if (p == 0 || p == panels)
                sw = 1.0 / 3.0;
            else if (p % 2 == 1)
                sw = 4.0 / 3.0;
            else
                sw = 2.0 / 3.0;
            acc += sw / static_cast<double>(m) * f.at1d(j) * phi_nodes[static_cast<size_t>(p)];
        }
        const int kk[1] = {k};
        s[static_cast<size_t>(sbox.offset(kk))] = acc;
    }

    std::vector<double> c = apply_filter_axis(s, sbox, cbox, 0, duals[0]);
    CoefficientField out;
    out.h = h;
    out.box = cbox;
    out.values = std::move(c);
    out.kernel = std::move(kernel);
    out.provenance = "projection";
    return out;
}

namespace {

CoefficientField interpolate_impl(const std::function<double(std::span<const double>)>& sample_at,
                                  std::shared_ptr<const SeparableKernel> kernel, double h,
                                  const IntBox& cbox, int dft_N) {
    const int d = kernel->dim();
    std::vector<DiscreteFilter> pre;
    pre.reserve(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) pre.push_back(interp_prefilter_axis(kernel->axis(a), dft_N));

    Index slo = cbox.lo, shi = cbox.hi;
    for (int a = 0; a < d; ++a) {
        slo[static_cast<size_t>(a)] += pre[static_cast<size_t>(a)].box().lo[0];
        shi[static_cast<size_t>(a)] += pre[static_cast<size_t>(a)].box().hi[0];
    }
    const IntBox sbox(slo, shi);

    std::vector<double> samples(static_cast<size_t>(sbox.size()));
    std::vector<double> x(static_cast<size_t>(d));
    sbox.for_each([&](std::span<const int> k) {
        for (int a = 0; a < d; ++a)
            x[static_cast<size_t>(a)] = h * static_cast<double>(k[static_cast<size_t>(a)]);
        samples[static_cast<size_t>(sbox.offset(k))] = sample_at(x);
    });

    std::vector<double> cur = std::move(samples);
    IntBox cur_box = sbox;
    for (int a = 0; a < d; ++a) {
        Index nlo = cur_box.lo, nhi = cur_box.hi;
        nlo[static_cast<size_t>(a)] = cbox.lo[static_cast<size_t>(a)];
        nhi[static_cast<size_t>(a)] = cbox.hi[static_cast<size_t>(a)];
        IntBox next(nlo, nhi);
        cur = apply_filter_axis(cur, cur_box, next, a, pre[static_cast<size_t>(a)]);
        cur_box = next;
    }

    CoefficientField out;
    out.h = h;
    out.box = cbox;
    out.values = std::move(cur);
    out.kernel = std::move(kernel);
    out.provenance = "interpolation";
    return out;
}

}  // namespace

CoefficientField interpolate(const TestSignal& f,
                             std::shared_ptr<const SeparableKernel> kernel, double h,
                             double cover_T, int dft_N) {
    if (f.dim() != kernel->dim())
        throw std::invalid_argument("interpolate: signal/kernel rank mismatch");
    const IntBox cbox = coefficient_box(*kernel, h, cover_T, 2);
    return interpolate_impl([&](std::span<const double> x) { return f.value(x); },
                            std::move(kernel), h, cbox, dft_N);
}

CoefficientField interpolate(const GridSignal& f,
                             std::shared_ptr<const SeparableKernel> kernel, double h,
                             int dft_N) {
    const int d = kernel->dim();
    if (f.dim() != d) throw std::invalid_argument("interpolate: signal/kernel rank mismatch");
    if (f.has_callback()) {
        Index clo(static_cast<size_t>(d)), chi(static_cast<size_t>(d));
        for (int a = 0; a < d; ++a) {
            const int M = static_cast<int>(std::ceil(f.geometry().T / h)) +
                          static_cast<int>(std::ceil(kernel->support_radius(a))) + 2;
            clo[static_cast<size_t>(a)] = -M;
            chi[static_cast<size_t>(a)] = M;
        }
        return interpolate_impl([&](std::span<const double> x) { return f.call(x); },
                                std::move(kernel), h, IntBox(clo, chi), dft_N);
    }
    const double ratio = h / f.geometry().delta;
    const auto m = static_cast<std::int64_t>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("interpolate: h must be an integer multiple of the grid step");
    const auto n = f.geometry().points_per_axis();
    const auto half = static_cast<std::int64_t>(std::llround(f.geometry().T / h));
    Index clo(static_cast<size_t>(d)), chi(static_cast<size_t>(d));
    std::vector<DiscreteFilter> pre;
    for (int a = 0; a < d; ++a) pre.push_back(interp_prefilter_axis(kernel->axis(a), dft_N));
    for (int a = 0; a < d; ++a) {
        const int margin = std::max(-pre[static_cast<size_t>(a)].box().lo[0],
                                    pre[static_cast<size_t>(a)].box().hi[0]) +
                           static_cast<int>(std::ceil(kernel->support_radius(a))) + 1;
        const int M = static_cast<int>(half) - margin;
        if (M < 1) throw std::invalid_argument("interpolate: window too small for this h");
        clo[static_cast<size_t>(a)] = -M;
        chi[static_cast<size_t>(a)] = M;
    }
    return interpolate_impl(
        [&](std::span<const double> x) -> double {
            std::int64_t off = 0;
            for (int a = 0; a < d; ++a) {
                const double jr =
                    (x[static_cast<size_t>(a)] + f.geometry().T) / f.geometry().delta;
                const auto j = static_cast<std::int64_t>(std::llround(jr));
                if (j < 0 || j >= n) return 0.0;
                off = off * n + j;
            }
            return f.values()[static_cast<size_t>(off)];
        },
        std::move(kernel), h, IntBox(clo, chi), dft_N);
}

const Mollifier& Mollifier::standard(int dim) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Mollifier>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[dim];
    if (!slot) slot.reset(new Mollifier(dim, false));
    return *slot;
}

const Mollifier& Mollifier::tilted(int dim) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Mollifier>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[dim];
    if (!slot) slot.reset(new Mollifier(dim, true));
    return *slot;
}

Mollifier::Mollifier(int dim, bool tilt) : dim_(dim), tilt_(tilt) {
    if (dim < 1 || dim > 2)
        throw std::invalid_argument("Mollifier: dimensions 1 and 2 supported");
    // unit integral by trapezoid on a fine grid; the bump is smooth and
    // compactly supported, so the rule converges super-algebraically
    const int n = (dim == 1) ? (1 << 16) : (1 << 12);
    const double step = 2.0 / static_cast<double>(n);
    auto raw = [&](double u0, double u1) {
        const double q = 1.0 - u0 * u0 - u1 * u1;
        if (q <= 0.0) return 0.0;
        return std::exp(-1.0 / q) * (tilt_ ? 1.0 + u0 : 1.0);
    };
    double total = 0.0;
    if (dim == 1) {
        for (int i = 0; i <= n; ++i) total += raw(-1.0 + step * i, 0.0) * step;
    } else {
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                total += raw(-1.0 + step * i, -1.0 + step * j) * step * step;
    }
    norm_const_ = 1.0 / total;
}

double Mollifier::operator()(std::span<const double> u) const {
    const double q = 1.0 - squared_norm(u);
    if (q <= 0.0) return 0.0;
    return norm_const_ * std::exp(-1.0 / q) * (tilt_ ? 1.0 + u[0] : 1.0);
}

namespace {

GridSignal smooth_impl(const std::function<double(std::span<const double>)>& f_at,
                       const GridGeometry& geom, double h, int L, const Mollifier& chi,
                       const std::optional<GrowthCert>& growth) {
    const int d = geom.dim;
    const double delta = geom.delta;
    const double mratio = h / delta;
    const auto m = static_cast<int>(std::llround(mratio));
    if (m < 1 || std::abs(mratio - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("smooth: h must be an integer multiple of the grid step");
    if (2 * m + 1 < 16)
        throw std::invalid_argument(
            "smooth: grid does not resolve the mollifier (fewer than 16 points per support)");

    // discrete bumps chi(j delta / (n h)), normalized to unit discrete mass
    struct Taps {
        int radius;
        std::vector<double> w;  // flattened box (2r+1)^d
    };
    std::vector<Taps> taps;
    std::vector<double> u(static_cast<size_t>(d));
    for (int n = 1; n <= L; ++n) {
        Taps t;
        t.radius = n * m;
        const IntBox b = IntBox::cube(d, -t.radius, t.radius);
        t.w.resize(static_cast<size_t>(b.size()));
        double total = 0.0;
        b.for_each([&](std::span<const int> j) {
            for (int a = 0; a < d; ++a)
                u[static_cast<size_t>(a)] = static_cast<double>(j[static_cast<size_t>(a)]) *
                                            delta / (static_cast<double>(n) * h);
            const double v = chi(u);
            t.w[static_cast<size_t>(b.offset(j))] = v;
            total += v;
        });
        for (double& v : t.w) v /= total;
        const double cn = (n % 2 == 1 ? 1.0 : -1.0) * binomial(L, n);
        for (double& v : t.w) v *= cn;
        taps.push_back(std::move(t));
    }

    const std::int64_t npts = geom.points_per_axis();
    std::vector<double> out(static_cast<size_t>(geom.total_points()), 0.0);
    std::vector<double> x(static_cast<size_t>(d)), y(static_cast<size_t>(d));
    Index idx(static_cast<size_t>(d), 0);
    std::int64_t flat = 0;
    while (true) {
        for (int a = 0; a < d; ++a) x[static_cast<size_t>(a)] = geom.coord(idx[static_cast<size_t>(a)]);
        double acc = 0.0;
        for (const auto& t : taps) {
            const IntBox b = IntBox::cube(d, -t.radius, t.radius);
            size_t w_off = 0;
            b.for_each([&](std::span<const int> j) {
                const double w = t.w[w_off++];
                if (w == 0.0) return;
                for (int a = 0; a < d; ++a)
                    y[static_cast<size_t>(a)] =
                        x[static_cast<size_t>(a)] -
                        static_cast<double>(j[static_cast<size_t>(a)]) * delta;
                acc += w * f_at(y);
            });
        }
        out[static_cast<size_t>(flat++)] = acc;
        int a = d - 1;
        while (a >= 0) {
            if (++idx[static_cast<size_t>(a)] < static_cast<int>(npts)) break;
            idx[static_cast<size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    GridSignal g(geom, std::move(out), "smoothed L=" + std::to_string(L));
    if (growth) g.set_growth(*growth);
    return g;
}

}  // namespace

GridSignal smooth(const GridSignal& f, double h, int L, const Mollifier& chi) {
    if (chi.dim() != f.dim()) throw std::invalid_argument("smooth: mollifier rank mismatch");
    const auto& geom = f.geometry();
    if (f.has_callback())
        return smooth_impl([&](std::span<const double> y) { return f.call(y); }, geom, h, L,
                           chi, f.growth());
    const auto n = geom.points_per_axis();
    bool clipped = false;
    auto at = [&](std::span<const double> y) -> double {
        std::int64_t off = 0;
        for (int a = 0; a < f.dim(); ++a) {
            const double jr = (y[static_cast<size_t>(a)] + geom.T) / geom.delta;
            const auto j = static_cast<std::int64_t>(std::llround(jr));
            if (j < 0 || j >= n) {
                clipped = true;
                return 0.0;
            }
            off = off * n + j;
        }
        return f.values()[static_cast<size_t>(off)];
    };
    GridSignal g = smooth_impl(at, geom, h, L, chi, f.growth());
    if (clipped) g.set_flag("smoothing stencil zero-padded outside the window");
    return g;
}

GridSignal smooth(const TestSignal& f, const GridGeometry& geom, double h, int L,
                  const Mollifier& chi) {
    if (f.dim() != geom.dim) throw std::invalid_argument("smooth: rank mismatch");
    if (chi.dim() != geom.dim) throw std::invalid_argument("smooth: mollifier rank mismatch");
    // materialize f once on the window extended by the stencil radius L h;
    // the convolution then runs on stored values
    const auto m = static_cast<std::int64_t>(std::llround(h / geom.delta));
    const GridGeometry ext(geom.dim, geom.T + static_cast<double>(L) * h, geom.delta);
    const GridSignal fx = GridSignal::sample(f, ext);
    const std::int64_t n_ext = ext.points_per_axis();
    (void)m;
    auto at = [&](std::span<const double> y) {
        std::int64_t off = 0;
        for (int a = 0; a < geom.dim; ++a) {
            const auto j = static_cast<std::int64_t>(
                std::llround((y[static_cast<size_t>(a)] + ext.T) / ext.delta));
            off = off * n_ext + j;
        }
        return fx.values()[static_cast<size_t>(off)];
    };
    return smooth_impl(at, geom, h, L, chi,
                       GrowthCert{f.growth_order(), f.growth_constant()});
}

GridSignal smooth(const TestSignal& f, const GridGeometry& geom, double h, int L) {
    return smooth(f, geom, h, L, Mollifier::standard(geom.dim));
}

double finite_difference(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> u, int L, std::span<const double> x) {
    std::vector<double> y(x.size());
    double acc = 0.0;
    for (int n = 0; n <= L; ++n) {
        for (size_t a = 0; a < x.size(); ++a)
            y[a] = x[a] - static_cast<double>(n) * u[a];
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binomial(L, n) * f(y);
    }
    return acc;
}

double directional_derivative(const TestSignal& f, std::span<const double> u, int L,
                              std::span<const double> x) {
    if (L > f.max_derivative_order())
        throw std::invalid_argument("directional_derivative: partials unavailable at this order");
    double acc = 0.0;
    for (const Index& l : multi_indices_of_order(f.dim(), L)) {
        double coef = 1.0;  // L! / l!
        {
            int consumed = 0;
            for (int a = 0; a < f.dim(); ++a) {
                for (int s = 1; s <= l[static_cast<size_t>(a)]; ++s) {
                    ++consumed;
                    coef *= static_cast<double>(consumed) / static_cast<double>(s);
                }
            }
        }
        double upow = 1.0;
        for (int a = 0; a < f.dim(); ++a)
            for (int s = 0; s < l[static_cast<size_t>(a)]; ++s) upow *= u[static_cast<size_t>(a)];
        acc += coef * upow * f.partial(l, x);
    }
    return acc;
}

}  // namespace siapprox
