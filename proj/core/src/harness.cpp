#include "siapprox/harness.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "siapprox/kernel.hpp"
#include "siapprox/operators.hpp"
#include "siapprox/signals.hpp"

#include <nlohmann/json.hpp>

namespace siapprox {

namespace {

using nlohmann::json;

json p_to_json(double p) {
    if (p == kInfinity) return json("inf");
    return json(p);
}

double p_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfinity;
        throw std::invalid_argument("config: p must be a number or \"inf\"");
    }
    return j.get<double>();
}

std::shared_ptr<const SeparableKernel> build_kernel(const ExperimentConfig& cfg) {
    PiecewisePoly1D axis =
        cfg.kernel_centered ? bspline1d_centered(cfg.kernel_order) : bspline1d(cfg.kernel_order);
    std::vector<PiecewisePoly1D> axes(static_cast<size_t>(cfg.dim), axis);
    return std::make_shared<SeparableKernel>(std::move(axes));
}

std::unique_ptr<TestSignal> build_signal(const ExperimentConfig& cfg) {
    return make_signal(cfg.signal_family, cfg.dim, cfg.seed, cfg.beta, cfg.omega0, cfg.K,
                       cfg.smoothness, cfg.poly_coeffs);
}

// Growth constant of an arbitrary field, measured on the boundary shell
// [T-1, T] of the window; doubled for headroom.  Samples sit on the field's
// quadrature nodes: grid-backed fields are only defined there.
template <typename F>
double shell_constant(F&& field, int dim, const WeightedNormSpec& spec, double beta) {
    const GridGeometry g(dim, spec.T, spec.delta);
    const std::int64_t n = g.points_per_axis();
    const auto stride = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(1.0 / (33.0 * spec.delta))));
    double c = 0.0;
    std::vector<double> x(static_cast<size_t>(dim), 0.0);
    const int samples = 33;
    for (int face = 0; face < 2 * dim; ++face) {
        const int axis = face / 2;
        const bool upper = (face % 2 == 0);
        for (int i = 0; i < samples; ++i) {
            for (int a = 0; a < dim; ++a) {
                const std::int64_t scatter =
                    (static_cast<std::int64_t>(i + 1) * 7919 + 131 * a) % n;
                x[static_cast<size_t>(a)] = g.coord(scatter);
            }
            const std::int64_t js = i * stride;
            x[static_cast<size_t>(axis)] = g.coord(upper ? (n - 1 - js) : js);
            c = std::max(c, std::abs(field(std::span<const double>(x))) / weight(x, beta));
        }
    }
    return 2.0 * c + 1e-300;
}

template <typename F>
NormResult norm_with_shell_cert(F&& field, int dim, const WeightedNormSpec& spec,
                                double beta) {
    const double c = shell_constant(field, dim, spec, beta);
    return weighted_lp_norm_fn(field, dim, spec, GrowthCert{beta, c}, false);
}

double interior_window(const ExperimentConfig& cfg, const SeparableKernel& kernel) {
    if (cfg.interior_shrink >= 0.0) return cfg.T - cfg.interior_shrink;
    double R = 0.0;
    for (int a = 0; a < kernel.dim(); ++a) R = std::max(R, kernel.support_radius(a));
    const double hmax = cfg.h_list.front();
    const double shrink =
        std::ceil(hmax * (R + static_cast<double>(cfg.kernel_order) + 1.0) + 1.0);
    return cfg.T - shrink;
}

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

HRecord run_single_h(const ExperimentConfig& cfg, const TestSignal& f,
                     const std::shared_ptr<const SeparableKernel>& kernel, double rhs_norm,
                     double T_int, double h) {
    HRecord rec;
    rec.h = h;
    rec.rhs_norm = rhs_norm;
    std::vector<std::string> flags;

    WeightedNormSpec err_spec;
    err_spec.p = cfg.p;
    err_spec.alpha = cfg.alpha;
    err_spec.sign = -1;
    err_spec.T = T_int;
    err_spec.delta = h / static_cast<double>(cfg.m);

    const double beta = f.growth_order();

    if (cfg.mode == "projection" || cfg.mode == "interpolation") {
        CoefficientField c;
        if (cfg.mode == "projection") {
            AnalysisQuad quad;
            quad.panels_per_unit = cfg.m;
            quad.gauss_nodes = cfg.gauss_nodes;
            c = project(f, kernel, h, cfg.T, quad);
        } else {
            c = interpolate(f, kernel, h, cfg.T);
        }

        SynthesisEvaluator synth_err(c);
        auto err_field = [&](std::span<const double> x) {
            return f.value(x) - synth_err(x);
        };
        const NormResult err = norm_with_shell_cert(err_field, cfg.dim, err_spec, beta);
        rec.error_norm = err.norm;
        if (err.flagged) flags.push_back("tail:" + err.note);

        SynthesisEvaluator synth_op(c);
        auto op_field = [&](std::span<const double> x) { return synth_op(x); };
        rec.op_norm = norm_with_shell_cert(op_field, cfg.dim, err_spec, beta).norm;
    } else if (cfg.mode == "smoothing") {
        const GridGeometry geom(cfg.dim, T_int, err_spec.delta);
        // the tilted mollifier keeps every moment alive, so the measured
        // decay exponent is L itself rather than the even-kernel bonus order
        const GridSignal jf = smooth(f, geom, h, cfg.smoothing_L, Mollifier::tilted(cfg.dim));
        auto node_of = [&](std::span<const double> x) {
            std::int64_t off = 0;
            const std::int64_t n = geom.points_per_axis();
            for (int a = 0; a < cfg.dim; ++a) {
                const auto j = static_cast<std::int64_t>(
                    std::llround((x[static_cast<size_t>(a)] + geom.T) / geom.delta));
                off = off * n + j;
            }
            return off;
        };
        auto err_field = [&](std::span<const double> x) {
            return f.value(x) - jf.values()[static_cast<size_t>(node_of(x))];
        };
        const NormResult err = norm_with_shell_cert(err_field, cfg.dim, err_spec, beta);
        rec.error_norm = err.norm;
        if (err.flagged) flags.push_back("tail:" + err.note);
        auto op_field = [&](std::span<const double> x) {
            return jf.values()[static_cast<size_t>(node_of(x))];
        };
        rec.op_norm = norm_with_shell_cert(op_field, cfg.dim, err_spec, beta).norm;
    } else {
        throw std::invalid_argument("run: unsupported mode " + cfg.mode);
    }

    const double L = cfg.effective_expected_order();
    rec.ratio = rec.error_norm / (std::pow(h, L) * rhs_norm);

    std::ostringstream fl;
    for (size_t i = 0; i < flags.size(); ++i) fl << (i ? ";" : "") << flags[i];
    rec.flags = fl.str();
    return rec;
}

}  // namespace

double ExperimentConfig::effective_expected_order() const {
    if (expected_order > 0.0) return expected_order;
    if (mode == "smoothing") return static_cast<double>(smoothing_L);
    return static_cast<double>(kernel_order);
}

void ExperimentConfig::validate() const {
    if (mode != "projection" && mode != "interpolation" && mode != "smoothing" &&
        mode != "identity-checks")
        throw std::invalid_argument("config: unknown mode " + mode);
    if (dim < 1 || dim > 2) throw std::invalid_argument("config: dim must be 1 or 2");
    if (kernel_order < 1) throw std::invalid_argument("config: kernel order must be >= 1");
    if (h_list.empty()) throw std::invalid_argument("config: empty h list");
    for (size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw std::invalid_argument("config: h list must be strictly decreasing");
    if (m < 8) throw std::invalid_argument("config: grid refinement m must be >= 8");
    if (m % 2 != 0) throw std::invalid_argument("config: m must be even");
    if (p < 1.0) throw std::invalid_argument("config: p must be >= 1");
    if (alpha < 0.0) throw std::invalid_argument("config: alpha must be >= 0");
    if (mode == "interpolation") {
        const double dp = static_cast<double>(dim) / p;  // d/inf = 0
        const double need = (p == kInfinity) ? 0.0 : dp;
        if (!(r > need))
            throw std::invalid_argument("config: interpolation requires r > d/p");
    }
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig c;
    c.mode = j.value("mode", c.mode);
    c.dim = j.value("dim", c.dim);
    if (j.contains("kernel")) {
        c.kernel_order = j["kernel"].value("order", c.kernel_order);
        c.kernel_centered = j["kernel"].value("centered", c.kernel_centered);
    }
    if (j.contains("signal")) {
        const auto& s = j["signal"];
        c.signal_family = s.value("family", c.signal_family);
        c.seed = s.value("seed", c.seed);
        c.beta = s.value("beta", c.beta);
        c.omega0 = s.value("omega0", c.omega0);
        c.K = s.value("K", c.K);
        c.smoothness = s.value("smoothness", c.smoothness);
        if (s.contains("coeffs")) c.poly_coeffs = s["coeffs"].get<std::vector<double>>();
    }
    if (j.contains("p")) c.p = p_from_json(j["p"]);
    c.alpha = j.value("alpha", c.alpha);
    c.r = j.value("r", c.r);
    if (j.contains("h")) {
        if (j["h"].is_array()) {
            c.h_list = j["h"].get<std::vector<double>>();
        } else {
            const int from = j["h"].at("log2_from").get<int>();
            const int to = j["h"].at("log2_to").get<int>();
            for (int e = from; e >= to; --e) c.h_list.push_back(std::ldexp(1.0, e));
        }
    }
    c.T = j.value("T", c.T);
    c.m = j.value("m", c.m);
    c.gauss_nodes = j.value("gauss_nodes", c.gauss_nodes);
    c.rhs_delta = j.value("rhs_delta", c.rhs_delta);
    if (j.contains("interior_shrink") && !j["interior_shrink"].is_string())
        c.interior_shrink = j["interior_shrink"].get<double>();
    if (j.contains("expected_order") && !j["expected_order"].is_null())
        c.expected_order = j["expected_order"].get<double>();
    c.slope_band = j.value("slope_band", c.slope_band);
    c.smoothing_L = j.value("smoothing_L", c.smoothing_L);
    c.threads = j.value("threads", c.threads);
    c.out_path = j.value("out", c.out_path);
    return c;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["mode"] = mode;
    j["dim"] = dim;
    j["kernel"] = {{"order", kernel_order}, {"centered", kernel_centered}};
    json s;
    s["family"] = signal_family;
    s["seed"] = seed;
    s["beta"] = beta;
    s["omega0"] = omega0;
    s["K"] = K;
    s["smoothness"] = smoothness;
    if (!poly_coeffs.empty()) s["coeffs"] = poly_coeffs;
    j["signal"] = std::move(s);
    j["p"] = p_to_json(p);
    j["alpha"] = alpha;
    j["r"] = r;
    j["h"] = h_list;
    j["T"] = T;
    j["m"] = m;
    j["gauss_nodes"] = gauss_nodes;
    j["rhs_delta"] = rhs_delta;
    j["interior_shrink"] = interior_shrink < 0 ? json("auto") : json(interior_shrink);
    j["expected_order"] = expected_order < 0 ? json() : json(expected_order);
    j["slope_band"] = slope_band;
    j["smoothing_L"] = smoothing_L;
    j["threads"] = threads;
    j["out"] = out_path;
    return j.dump(2);
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
    SlopeFit fit;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [h, e] : points) {
        if (h <= 0.0) throw std::invalid_argument("fit_slope: h must be positive");
        if (e < 0.0) throw std::invalid_argument("fit_slope: errors must be non-negative");
        if (e == 0.0) {
            fit.notes.push_back("dropped h = " + std::to_string(h) +
                                ": exact reproduction (zero error)");
            continue;
        }
        logs.emplace_back(std::log(h), std::log(e));
    }
    if (logs.size() < 4)
        throw std::invalid_argument("fit_slope: need at least 4 positive-error points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(logs.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - fit.slope * sx) / n;
    fit.residual = 0.0;
    for (const auto& [x, y] : logs)
        fit.residual = std::max(fit.residual, std::abs(y - (intercept + fit.slope * x)));
    return fit;
}

ConvergenceReport run(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.mode == "identity-checks")
        throw std::invalid_argument("run: use identity_checks() for identity-checks mode");

    ConvergenceReport rep;
    rep.config = cfg;
    rep.timestamp = now_iso8601();

    const auto kernel = build_kernel(cfg);
    const auto f = build_signal(cfg);
    const double T_int = interior_window(cfg, *kernel);
    if (T_int <= 1.0) throw std::invalid_argument("run: window too small after interior shrink");
    rep.interior_T = T_int;

    // RHS norm, h-independent: ||f^{(L)}|| or ||(D^r f)^{(L)}||
    const auto L = static_cast<int>(std::lround(cfg.effective_expected_order()));
    std::unique_ptr<TestSignal> rhs_base;
    const TestSignal* rhs_signal = f.get();
    if (cfg.mode == "interpolation") {
        rhs_base = f->fractional(cfg.r);
        if (!rhs_base)
            throw std::invalid_argument(
                "run: interpolation mode needs a signal with an exact spectral form "
                "(family spectral-growing or polynomial envelope)");
        rhs_signal = rhs_base.get();
    }
    WeightedNormSpec rhs_spec;
    rhs_spec.p = cfg.p;
    rhs_spec.alpha = cfg.alpha;
    rhs_spec.sign = -1;
    rhs_spec.T = T_int;
    rhs_spec.delta = cfg.rhs_delta;
    auto rhs_field = [&](std::span<const double> x) {
        return rhs_signal->derivative_magnitude(L, x);
    };
    const NormResult rhs = norm_with_shell_cert(rhs_field, cfg.dim, rhs_spec,
                                                rhs_signal->growth_order());
    if (rhs.flagged) rep.notes.push_back("rhs norm tail-flagged: " + rhs.note);

    // reference norm for the stability read-out
    auto ref_field = [&](std::span<const double> x) { return rhs_signal->value(x); };
    rep.reference_norm =
        norm_with_shell_cert(ref_field, cfg.dim, rhs_spec, rhs_signal->growth_order()).norm;

    rep.records.resize(cfg.h_list.size());
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (size_t i = 0; i < cfg.h_list.size(); ++i)
            rep.records[i] = run_single_h(cfg, *f, kernel, rhs.norm, T_int, cfg.h_list[i]);
    } else {
        std::vector<std::future<HRecord>> futs;
        futs.reserve(cfg.h_list.size());
        for (size_t i = 0; i < cfg.h_list.size(); ++i)
            futs.push_back(std::async(std::launch::async, [&, i] {
                return run_single_h(cfg, *f, kernel, rhs.norm, T_int, cfg.h_list[i]);
            }));
        for (size_t i = 0; i < futs.size(); ++i) rep.records[i] = futs[i].get();
    }

    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rep.records)
        if (r.flags.empty()) pts.emplace_back(r.h, r.error_norm);
    try {
        const SlopeFit fit = fit_slope(pts);
        rep.slope = fit.slope;
        rep.residual = fit.residual;
        for (const auto& n : fit.notes) rep.notes.push_back(n);
    } catch (const std::invalid_argument& e) {
        rep.inconclusive = true;
        rep.notes.push_back(std::string("inconclusive: ") + e.what());
    }
    const double L_exp = cfg.effective_expected_order();
    rep.bands_met = !rep.inconclusive && std::abs(rep.slope - L_exp) <= cfg.slope_band;
    return rep;
}

std::string ConvergenceReport::to_json() const {
    json j;
    j["config"] = json::parse(config.to_json());
    json recs = json::array();
    for (const auto& r : records) {
        recs.push_back({{"h", r.h},
                        {"error_norm", r.error_norm},
                        {"rhs_norm", r.rhs_norm},
                        {"ratio", r.ratio},
                        {"op_norm", r.op_norm},
                        {"flags", r.flags}});
    }
    j["records"] = std::move(recs);
    j["slope"] = slope;
    j["residual"] = residual;
    j["inconclusive"] = inconclusive;
    j["bands_met"] = bands_met;
    j["interior_T"] = interior_T;
    j["reference_norm"] = reference_norm;
    j["notes"] = notes;
    j["version"] = version;
    j["timestamp"] = timestamp;
    return j.dump(2);
}

std::string ConvergenceReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "h,error,rhs,ratio,flags\n";
    for (const auto& r : records)
        os << r.h << "," << r.error_norm << "," << r.rhs_norm << "," << r.ratio << ","
           << r.flags << "\n";
    return os.str();
}

namespace {

// RHS of the Peano identity: int_0^L D_u^L f(x - t u) beta^{L-1}(t) dt by
// composite Gauss-Legendre between the integer spline knots.
double peano_rhs(const TestSignal& f, std::span<const double> u, int L,
                 std::span<const double> x, const PiecewisePoly1D& bsp) {
    static const double gx[10] = {-0.9739065285171717, -0.8650633666889845,
                                  -0.6794095682990244, -0.4333953941292472,
                                  -0.1488743389816312, 0.1488743389816312,
                                  0.4333953941292472,  0.6794095682990244,
                                  0.8650633666889845,  0.9739065285171717};
    static const double gw[10] = {0.0666713443086881, 0.1494513491505806,
                                  0.2190863625159820, 0.2692667193099963,
                                  0.2955242247147529, 0.2955242247147529,
                                  0.2692667193099963, 0.2190863625159820,
                                  0.1494513491505806, 0.0666713443086881};
    std::vector<double> y(x.size());
    double acc = 0.0;
    for (int seg = 0; seg < L; ++seg) {
        for (int i = 0; i < 10; ++i) {
            const double t = static_cast<double>(seg) + 0.5 * (1.0 + gx[i]);
            for (size_t a = 0; a < x.size(); ++a) y[a] = x[a] - t * u[a];
            acc += 0.5 * gw[i] * directional_derivative(f, u, L, y) * bsp(t);
        }
    }
    return acc;
}

}  // namespace

IdentityReport identity_checks(const ExperimentConfig& cfg) {
    IdentityReport rep;
    const int d = cfg.dim;
    const auto kernel = build_kernel(cfg);
    const int L = cfg.kernel_order;

    // Peano identity, L = 3, f = exp(sin(.))
    {
        const auto f = make_exp_sin(d);
        const PiecewisePoly1D bsp = bspline1d(3);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> ux(-3.0, 3.0), uu(-1.0, 1.0);
        double worst = 0.0;
        Point x(static_cast<size_t>(d)), u(static_cast<size_t>(d));
        for (int it = 0; it < 50; ++it) {
            for (double& v : x) v = ux(rng);
            for (double& v : u) v = uu(rng);
            const double lhs = finite_difference(
                [&](std::span<const double> y) { return f->value(y); }, u, 3, x);
            const double rhs = peano_rhs(*f, u, 3, x, bsp);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        rep.suites.push_back({"peano-identity", worst <= 1e-8, worst, 1e-8,
                              "max residual over 50 draws, L=3, f=exp(sin)"});
    }

    // Directional-derivative bound, counting ordered derivative tuples
    {
        std::vector<std::unique_ptr<TestSignal>> sigs;
        sigs.push_back(make_growing_oscillation(1.0, 3.0, d));
        sigs.push_back(make_random_trig_poly(7, 5, 1.0, d));
        sigs.push_back(make_exp_sin(d));
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_real_distribution<double> ux(-4.0, 4.0), uu(-2.0, 2.0);
        std::uniform_int_distribution<int> pick(0, 2), ordpick(1, 3);
        int violations = 0;
        Point x(static_cast<size_t>(d)), u(static_cast<size_t>(d));
        for (int it = 0; it < 10000; ++it) {
            const auto& f = *sigs[static_cast<size_t>(pick(rng))];
            const int Ld = ordpick(rng);
            for (double& v : x) v = ux(rng);
            for (double& v : u) v = uu(rng);
            const double lhs = std::abs(directional_derivative(f, u, Ld, x));
            double rhs = 0.0;  // sum over ordered tuples = multinomial-weighted sum
            for (const Index& l : multi_indices_of_order(d, Ld)) {
                double coef = 1.0;
                int consumed = 0;
                for (int a = 0; a < d; ++a)
                    for (int s = 1; s <= l[static_cast<size_t>(a)]; ++s) {
                        ++consumed;
                        coef *= static_cast<double>(consumed) / static_cast<double>(s);
                    }
                rhs += coef * std::abs(f.partial(l, x));
            }
            rhs *= std::pow(sup_norm(u), Ld);
            if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) ++violations;
        }
        rep.suites.push_back({"directional-bound", violations == 0,
                              static_cast<double>(violations), 0.0,
                              "violations over 10^4 draws"});
    }

    // Polynomial reproduction of the interpolant, all |l| <= L-1
    {
        const DiscreteFilter a = interp_prefilter(*kernel);
        std::vector<Point> grid;
        for (double x = -5.0; x <= 5.0 + 1e-9; x += 0.25) {
            Point p(static_cast<size_t>(d), 0.0);
            p[0] = x;
            if (d == 2) p[1] = 0.5 * x;
            grid.push_back(std::move(p));
        }
        double worst = 0.0;
        for (int n = 0; n <= L - 1; ++n)
            for (const Index& l : multi_indices_of_order(d, n)) {
                const auto rr = polynomial_reproduction_residual(*kernel, a, l, grid, 40);
                worst = std::max(worst, rr.residual);
            }
        rep.suites.push_back({"polynomial-reproduction", worst <= 1e-6, worst, 1e-6,
                              "max residual, |l| <= L-1, K=40, grid [-5,5]"});
    }

    // Interpolating property phi_int(k) = delta[k] via the filter composition
    {
        const DiscreteFilter a = interp_prefilter(*kernel);
        const DiscreteFilter comp = convolve(a, sample_kernel(*kernel));
        double worst = 0.0;
        IntBox::cube(d, -16, 16).for_each([&](std::span<const int> k) {
            bool zero = true;
            for (int v : k)
                if (v != 0) zero = false;
            worst = std::max(worst, std::abs(comp.at(k) - (zero ? 1.0 : 0.0)));
        });
        rep.suites.push_back({"interpolating-property", worst <= 1e-9, worst, 1e-9,
                              "max |phi_int(k) - delta[k]|, ||k|| <= 16"});
        rep.suites.push_back({"prefilter-composition", worst <= 1e-10, worst, 1e-10,
                              "max |(a * phi[.])[k] - delta[k]|, ||k|| <= 16"});
    }

    // Dual-filter composition q * a_phi = delta
    {
        const DiscreteFilter q = dual_filter(*kernel);
        const DiscreteFilter acorr = autocorrelation_sequence(*kernel, 2 * L);
        const DiscreteFilter comp = convolve(q, acorr);
        double worst = 0.0;
        IntBox::cube(d, -16, 16).for_each([&](std::span<const int> k) {
            bool zero = true;
            for (int v : k)
                if (v != 0) zero = false;
            worst = std::max(worst, std::abs(comp.at(k) - (zero ? 1.0 : 0.0)));
        });
        rep.suites.push_back({"dual-composition", worst <= 1e-10, worst, 1e-10,
                              "max |(q * a_phi)[k] - delta[k]|, ||k|| <= 16"});
    }

    // Smoother scaling: h^{d/p} ||(J_h f)(h .)||_{l_{p,1/w_h}} / ||f|| bounded
    {
        const auto f = build_signal(cfg);
        WeightedNormSpec fs;
        fs.p = cfg.p;
        fs.alpha = cfg.alpha;
        fs.sign = -1;
        fs.T = cfg.T - 4.0;
        fs.delta = 1.0 / 32.0;
        auto f_field = [&](std::span<const double> x) { return f->value(x); };
        const double fnorm =
            norm_with_shell_cert(f_field, d, fs, f->growth_order()).norm;

        const Mollifier& chi = Mollifier::standard(d);
        double qmin = kInfinity, qmax = 0.0;
        for (double h : cfg.h_list) {
            const int m = cfg.m;
            const double delta = h / m;
            const auto khalf = static_cast<int>(std::floor(fs.T / h));
            IntBox kb = IntBox::cube(d, -khalf, khalf);
            std::vector<double> vals(static_cast<size_t>(kb.size()));
            // J_h f at the scaled nodes h k, evaluated directly from the callback
            std::vector<Point> taps;  // offsets j delta
            std::vector<double> w;
            {
                std::vector<double> u(static_cast<size_t>(d));
                for (int n2 = 1; n2 <= cfg.smoothing_L; ++n2) {
                    const int radius = n2 * m;
                    const IntBox b = IntBox::cube(d, -radius, radius);
                    std::vector<double> raw(static_cast<size_t>(b.size()));
                    double total = 0.0;
                    b.for_each([&](std::span<const int> jj) {
                        for (int a = 0; a < d; ++a)
                            u[static_cast<size_t>(a)] =
                                static_cast<double>(jj[static_cast<size_t>(a)]) * delta /
                                (static_cast<double>(n2) * h);
                        const double v = chi(u);
                        raw[static_cast<size_t>(b.offset(jj))] = v;
                        total += v;
                    });
                    const double cn =
                        (n2 % 2 == 1 ? 1.0 : -1.0) * binomial(cfg.smoothing_L, n2);
                    b.for_each([&](std::span<const int> jj) {
                        const double v = raw[static_cast<size_t>(b.offset(jj))];
                        if (v == 0.0) return;
                        Point off(static_cast<size_t>(d));
                        for (int a = 0; a < d; ++a)
                            off[static_cast<size_t>(a)] =
                                static_cast<double>(jj[static_cast<size_t>(a)]) * delta;
                        taps.push_back(std::move(off));
                        w.push_back(cn * v / total);
                    });
                }
            }
            Point y(static_cast<size_t>(d));
            kb.for_each([&](std::span<const int> k) {
                double acc = 0.0;
                for (size_t t = 0; t < taps.size(); ++t) {
                    for (int a = 0; a < d; ++a)
                        y[static_cast<size_t>(a)] =
                            h * static_cast<double>(k[static_cast<size_t>(a)]) -
                            taps[t][static_cast<size_t>(a)];
                    acc += w[t] * f->value(y);
                }
                vals[static_cast<size_t>(kb.offset(k))] = acc;
            });
            const double lnorm = sequence_lp_norm(vals, kb, h, cfg.p, -cfg.alpha);
            const double dp = (cfg.p == kInfinity) ? 0.0 : static_cast<double>(d) / cfg.p;
            const double Q = std::pow(h, dp) * lnorm / fnorm;
            qmin = std::min(qmin, Q);
            qmax = std::max(qmax, Q);
        }
        const double spread = qmax / qmin;
        rep.suites.push_back({"smoother-scaling", spread <= 3.0, spread, 3.0,
                              "max/min of h^{d/p} l-norm ratio over the h sweep"});
    }

    rep.all_passed = true;
    for (const auto& s : rep.suites) rep.all_passed = rep.all_passed && s.passed;
    return rep;
}

std::string IdentityReport::to_json() const {
    json j;
    json suites_j = json::array();
    for (const auto& s : suites)
        suites_j.push_back({{"name", s.name},
                            {"passed", s.passed},
                            {"metric", s.metric},
                            {"threshold", s.threshold},
                            {"detail", s.detail}});
    j["suites"] = std::move(suites_j);
    j["all_passed"] = all_passed;
    j["version"] = kVersion;
    return j.dump(2);
}

KernelCertificate certify_kernel(int order, int dim) {
    KernelCertificate cert;
    cert.order = order;
    cert.dim = dim;
    PiecewisePoly1D axis = bspline1d_centered(order);
    std::vector<PiecewisePoly1D> axes(static_cast<size_t>(dim), axis);
    const SeparableKernel kernel(std::move(axes));

    cert.strang_fix = strang_fix_order(kernel, order + 2, 1e-10);

    const DiscreteFilter acorr = autocorrelation_sequence(kernel, order);
    const int N = 4096;
    double mn = kInfinity, mx = 0.0;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int j = 0; j < N; ++j) {
        Point w(static_cast<size_t>(dim), 0.0);
        w[0] = two_pi * j / N;
        if (dim == 2) w[1] = two_pi * ((j * 37) % N) / N;
        const double v = std::abs(acorr.symbol(w));
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    cert.riesz_min = mn;
    cert.riesz_max = mx;

    cert.prefilter_decay = interp_prefilter_axis(axis).decay();

    cert.kernel_json =
        kernel_to_json(kernel, order <= 8 ? std::optional<int>(order) : std::nullopt);
    return cert;
}

std::string KernelCertificate::to_json() const {
    json j;
    j["order"] = order;
    j["dim"] = dim;
    j["strang_fix_order"] = strang_fix;
    j["riesz_min"] = riesz_min;
    j["riesz_max"] = riesz_max;
    if (prefilter_decay)
        j["prefilter_decay"] = {{"rho", prefilter_decay->rho}, {"C", prefilter_decay->C}};
    j["kernel"] = json::parse(kernel_json);
    j["version"] = kVersion;
    return j.dump(2);
}

}  // namespace siapprox
