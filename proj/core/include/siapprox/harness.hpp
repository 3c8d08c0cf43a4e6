// Experiment runner: configured projection / interpolation / smoothing
// sweeps over h with weighted error norms, log-log slope fits, identity
// suites and machine-readable reports.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siapprox/box.hpp"
#include "siapprox/dfilter.hpp"
#include "siapprox/spaces.hpp"

namespace siapprox {

inline constexpr const char* kVersion = "siapprox 0.1.0";

struct ExperimentConfig {
    std::string mode = "projection";  // projection | interpolation | smoothing | identity-checks
    int dim = 1;

    int kernel_order = 4;
    bool kernel_centered = true;

    std::string signal_family = "growing-oscillation";
    unsigned seed = 1;
    double beta = 1.0;
    double omega0 = 3.0;
    int K = 6;
    double smoothness = 1.5;
    std::vector<double> poly_coeffs;

    double p = 2.0;  // kInfinity for sup
    double alpha = 2.5;
    double r = 0.0;  // fractional order, interpolation mode

    std::vector<double> h_list;  // strictly decreasing
    double T = 64.0;
    int m = 16;  // grid refinement h/delta
    int gauss_nodes = 5;
    double rhs_delta = 1.0 / 32.0;

    double interior_shrink = -1.0;  // < 0: automatic
    double expected_order = -1.0;   // < 0: kernel order (or smoothing_L)
    double slope_band = 0.2;
    int smoothing_L = 3;

    int threads = 1;
    std::string out_path;

    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;
    void validate() const;
    double effective_expected_order() const;
};

struct HRecord {
    double h = 0.0;
    double error_norm = 0.0;
    double rhs_norm = 0.0;
    double ratio = 0.0;     // error / (h^L rhs)
    double op_norm = 0.0;   // norm of the reconstruction itself (stability)
    std::string flags;      // empty = clean
};

struct SlopeFit {
    double slope = 0.0;
    double residual = 0.0;  // max |log-deviation|
    std::vector<std::string> notes;
};

// Least-squares line through (log h, log e); points with e = 0 are dropped
// with a note; fewer than 4 usable points is refused.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

struct ConvergenceReport {
    ExperimentConfig config;
    std::vector<HRecord> records;
    double slope = 0.0;
    double residual = 0.0;
    bool inconclusive = false;
    bool bands_met = false;
    double interior_T = 0.0;
    double reference_norm = 0.0;  // ||f|| (projection) or ||D^r f|| (interpolation)
    std::vector<std::string> notes;
    std::string version = kVersion;
    std::string timestamp;

    std::string to_json() const;
    std::string to_csv() const;  // columns: h,error,rhs,ratio,flags
};

ConvergenceReport run(const ExperimentConfig& config);

struct SuiteResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct IdentityReport {
    std::vector<SuiteResult> suites;
    bool all_passed = false;
    std::string to_json() const;
};

IdentityReport identity_checks(const ExperimentConfig& config);

struct KernelCertificate {
    int order = 0;
    int dim = 1;
    int strang_fix = 0;
    double riesz_min = 0.0;
    double riesz_max = 0.0;
    std::optional<DecayCert> prefilter_decay;
    std::string kernel_json;
    std::string to_json() const;
};

KernelCertificate certify_kernel(int order, int dim = 1);

}  // namespace siapprox
