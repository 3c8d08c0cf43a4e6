// siapprox command line: run convergence experiments, identity suites and
// kernel certifications from JSON configs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "siapprox/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shift-invariant approximation experiments"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int seed = -1, threads = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output path stem (writes <out>.json / <out>.csv)");
        cmd->add_option("--seed", seed, "override the signal seed");
        cmd->add_option("--threads", threads, "parallelism across h values");
    };

    auto* run_cmd = app.add_subcommand("run", "run a convergence experiment");
    run_cmd->add_option("config", config_path, "experiment config JSON")->required();
    add_common(run_cmd);

    auto* check_cmd = app.add_subcommand("check", "run the identity suites");
    check_cmd->add_option("config", config_path, "experiment config JSON")->required();
    add_common(check_cmd);

    int order = 4, dim = 1;
    auto* cert_cmd = app.add_subcommand("certify-kernel", "certify a B-spline kernel");
    cert_cmd->add_option("--order", order, "B-spline order")->required();
    cert_cmd->add_option("--dim", dim, "dimension (tensor product)");
    cert_cmd->add_option("--out", out_path, "output path stem");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto cfg = siapprox::ExperimentConfig::from_json(slurp(config_path));
            if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
            if (threads > 0) cfg.threads = threads;
            if (!out_path.empty()) cfg.out_path = out_path;
            const auto rep = siapprox::run(cfg);
            for (const auto& r : rep.records)
                std::cout << "h=" << r.h << " error=" << r.error_norm << " rhs=" << r.rhs_norm
                          << " ratio=" << r.ratio
                          << (r.flags.empty() ? "" : (" [" + r.flags + "]")) << "\n";
            std::cout << "slope=" << rep.slope << " residual=" << rep.residual
                      << " expected=" << cfg.effective_expected_order() << " band=+-"
                      << cfg.slope_band << (rep.bands_met ? " PASS" : " FAIL") << "\n";
            if (!cfg.out_path.empty()) {
                spill(cfg.out_path + ".json", rep.to_json());
                spill(cfg.out_path + ".csv", rep.to_csv());
            }
            return rep.bands_met ? 0 : 1;
        }
        if (check_cmd->parsed()) {
            auto cfg = siapprox::ExperimentConfig::from_json(slurp(config_path));
            if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
            if (threads > 0) cfg.threads = threads;
            const auto rep = siapprox::identity_checks(cfg);
            for (const auto& s : rep.suites)
                std::cout << (s.passed ? "PASS" : "FAIL") << " " << s.name
                          << " metric=" << s.metric << " threshold=" << s.threshold << " ("
                          << s.detail << ")\n";
            if (!out_path.empty()) spill(out_path + ".json", rep.to_json());
            return rep.all_passed ? 0 : 1;
        }
        if (cert_cmd->parsed()) {
            const auto cert = siapprox::certify_kernel(order, dim);
            std::cout << "order=" << cert.order << " strang_fix=" << cert.strang_fix
                      << " riesz=[" << cert.riesz_min << ", " << cert.riesz_max << "]\n";
            if (!out_path.empty())
                spill(out_path + ".json", cert.to_json());
            else
                std::cout << cert.to_json() << "\n";
            return (cert.strang_fix == cert.order && cert.riesz_min > 0.0) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
