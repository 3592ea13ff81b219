#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "tct/contour.hpp"
#include "tct/contraction.hpp"
#include "tct/dyson.hpp"
#include "tct/harness.hpp"
#include "tct/spectra.hpp"
#include "tct/stats.hpp"
#include "tct/tensor.hpp"
#include "tct/testing.hpp"

namespace {

std::uint64_t env_seed(std::uint64_t fallback) {
    if (const char* e = std::getenv("TCT_SEED")) return std::strtoull(e, nullptr, 10);
    return fallback;
}

std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> dims;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
    return dims;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw tct::ConfigError("cannot open output file " + path);
    return file;
}

void print_report(const tct::TestReport& r, bool json) {
    if (json) {
        std::cout << "{\"statistic\":" << r.statistic << ",\"xi_hat\":" << r.xi_hat
                  << ",\"sigma_hat\":" << r.sigma_hat << ",\"normalized\":" << r.normalized
                  << ",\"alpha\":" << r.alpha << ",\"z_alpha\":" << r.z_alpha
                  << ",\"reject\":" << (r.reject ? "true" : "false")
                  << ",\"p_value\":" << r.p_value << ",\"kappa3_hat\":" << r.kappa3_hat
                  << ",\"kappa4_hat\":" << r.kappa4_hat << "}\n";
        return;
    }
    std::cout << "statistic=" << r.statistic << '\n'
              << "xi_hat=" << r.xi_hat << '\n'
              << "sigma_hat=" << r.sigma_hat << '\n'
              << "normalized=" << r.normalized << '\n'
              << "alpha=" << r.alpha << '\n'
              << "z_alpha=" << r.z_alpha << '\n'
              << "reject=" << (r.reject ? 1 : 0) << '\n'
              << "p_value=" << r.p_value << '\n'
              << "kappa3_hat=" << r.kappa3_hat << '\n'
              << "kappa4_hat=" << r.kappa4_hat << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiked-tensor signal testing via blockwise contraction"};
    app.require_subcommand(1);

    // ---- lsd ----
    auto* lsd = app.add_subcommand("lsd", "Limiting spectral density over a grid");
    std::string lsd_dims = "100,100,100";
    double lsd_min = -2.0, lsd_max = 2.0, lsd_eta = 1e-6;
    int lsd_points = 201;
    std::string lsd_out;
    lsd->add_option("--dims", lsd_dims, "comma-separated mode sizes");
    lsd->add_option("--grid-min", lsd_min);
    lsd->add_option("--grid-max", lsd_max);
    lsd->add_option("--grid-points", lsd_points);
    lsd->add_option("--eta", lsd_eta, "smoothing parameter");
    lsd->add_option("-o,--output", lsd_out);

    // ---- limits ----
    auto* limits = app.add_subcommand("limits", "CLT calibration constants xi and sigma");
    std::string lim_dims = "100,100,100", lim_dist = "gaussian", lim_vectors = "delocalized";
    std::string lim_vectors_file, lim_f = "x2", lim_convention = "d3";
    double lim_k3 = std::nan(""), lim_k4 = std::nan("");
    std::vector<double> lim_probe;
    limits->add_option("--dims", lim_dims);
    limits->add_option("--dist", lim_dist, "gaussian | uniform_pm_sqrt3");
    limits->add_option("--vectors", lim_vectors, "delocalized | localized | file");
    limits->add_option("--vectors-file", lim_vectors_file);
    limits->add_option("--f", lim_f, "x2 | expx | cosx | ratio | poly:c0,c1,...");
    limits->add_option("--kappa3", lim_k3, "override third cumulant");
    limits->add_option("--kappa4", lim_k4, "override fourth cumulant");
    limits->add_option("--convention", lim_convention, "d3 | general");
    limits->add_option("--probe", lim_probe, "z_re z_im: print mu(z) and C(z, conj z)")
        ->expected(2);

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue histogram vs the LSD");
    tct::ExperimentConfig spec_config;
    spec_config.kind = "spectrum";
    spec_config.reps = 1;
    std::string spec_dims = "100,100,100", spec_dist = "gaussian", spec_vectors = "delocalized";
    std::string spec_out, spec_eigs;
    spectrum->add_option("--dims", spec_dims);
    spectrum->add_option("--dist", spec_dist);
    spectrum->add_option("--vectors", spec_vectors);
    spectrum->add_option("--reps", spec_config.reps);
    spectrum->add_option("--bins", spec_config.bins);
    spectrum->add_option("--seed", spec_config.seed);
    spectrum->add_option("--threads", spec_config.threads);
    spectrum->add_option("-o,--output", spec_out, "histogram CSV path");
    spectrum->add_option("--eigenvalues", spec_eigs, "raw eigenvalue CSV path");

    // ---- simulate (table1 / qq / matching) ----
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments (table1, qq, matching)");
    tct::ExperimentConfig sim_config;
    std::string sim_config_file, sim_dims, sim_dist, sim_vectors, sim_out, sim_convention;
    std::string sim_kind, sim_f;
    int sim_reps = -1;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    simulate->add_option("--config", sim_config_file, "key=value config file");
    simulate->add_option("--experiment", sim_kind, "table1 | qq | matching");
    simulate->add_option("--dims", sim_dims);
    simulate->add_option("--dist", sim_dist);
    simulate->add_option("--vectors", sim_vectors);
    simulate->add_option("--f", sim_f);
    simulate->add_option("--reps", sim_reps);
    simulate->add_option("--convention", sim_convention, "d3 | general");
    simulate->add_option("--threads", sim_config.threads);
    simulate->add_option("--seed", sim_seed)->each([&](const std::string&) { sim_seed_set = true; });
    simulate->add_option("-o,--output", sim_out);

    // ---- power ----
    auto* power = app.add_subcommand("power", "Alignment-test size and power over a beta grid");
    tct::ExperimentConfig pow_config;
    pow_config.kind = "power";
    pow_config.reps = 200;
    std::string pow_dims = "100,100,100", pow_dist = "gaussian", pow_vectors = "delocalized";
    std::string pow_betas, pow_out, pow_convention = "d3";
    power->add_option("--dims", pow_dims);
    power->add_option("--dist", pow_dist);
    power->add_option("--vectors", pow_vectors);
    power->add_option("--betas", pow_betas, "comma-separated ascending SNR grid");
    power->add_option("--reps", pow_config.reps);
    power->add_option("--alpha", pow_config.alpha);
    power->add_option("--seed", pow_config.seed);
    power->add_option("--threads", pow_config.threads);
    power->add_option("--convention", pow_convention);
    power->add_option("-o,--output", pow_out);

    // ---- test-align ----
    auto* talign = app.add_subcommand("test-align", "Alignment test of a tensor file");
    std::string ta_tensor, ta_vectors;
    double ta_alpha = 0.05;
    bool ta_json = false;
    talign->add_option("--tensor", ta_tensor)->required();
    talign->add_option("--vectors", ta_vectors)->required();
    talign->add_option("--alpha", ta_alpha);
    talign->add_flag("--json", ta_json);

    // ---- test-match ----
    auto* tmatch = app.add_subcommand("test-match", "Matching test of two tensor files");
    std::string tm_t0, tm_t1;
    int tm_rank = 1;
    double tm_alpha = 0.05;
    bool tm_json = false;
    tmatch->add_option("--tensor0", tm_t0)->required();
    tmatch->add_option("--tensor1", tm_t1)->required();
    tmatch->add_option("--rank", tm_rank);
    tmatch->add_option("--alpha", tm_alpha);
    tmatch->add_flag("--json", tm_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lsd) {
            tct::DimensionProfile profile(parse_dims(lsd_dims));
            tct::DysonSolver solver(profile.ratios());
            std::ofstream file;
            std::ostream& out = open_output(lsd_out, file);
            out << "# zeta=" << solver.support_edge() << " m2=" << solver.moment(2) << '\n';
            out << "E,density\n";
            for (int i = 0; i < lsd_points; ++i) {
                const double e = lsd_min + (lsd_max - lsd_min) * i / (lsd_points - 1);
                out << e << ',' << solver.density(e, lsd_eta) << '\n';
            }
        } else if (*limits) {
            tct::DimensionProfile profile(parse_dims(lim_dims));
            const tct::NoiseDist dist = tct::parse_noise_dist(lim_dist);
            tct::ExperimentConfig vc;
            vc.dims = parse_dims(lim_dims);
            vc.vector_mode = lim_vectors;
            vc.vectors_file = lim_vectors_file;
            const tct::UnitVectorSet vectors = vc.vectors();
            double k3 = dist == tct::NoiseDist::Gaussian ? 0.0 : 0.0;
            double k4 = dist == tct::NoiseDist::Gaussian ? 0.0 : -1.2;
            if (!std::isnan(lim_k3)) k3 = lim_k3;
            if (!std::isnan(lim_k4)) k4 = lim_k4;
            const tct::Convention conv = lim_convention == "general"
                                             ? tct::Convention::GeneralD
                                             : tct::Convention::MainTextD3;
            tct::DysonSolver solver(profile.ratios());
            tct::LimitContext ctx(solver, tct::vector_stats(vectors), k3, k4, conv);
            if (!lim_probe.empty()) {
                const std::complex<double> z(lim_probe[0], lim_probe[1]);
                const auto mu = ctx.mu_function(z);
                const auto cov = ctx.cov_function(z, std::conj(z));
                std::cout << "mu(z)=(" << mu.real() << ", " << mu.imag() << "i)\n";
                std::cout << "C(z, conj z)=(" << cov.real() << ", " << cov.imag() << "i)\n";
            } else {
                const tct::ContourSpec inner = tct::ContourSpec::default_for(solver);
                tct::ContourCalibration cal(ctx, inner, inner.enlarged());
                const tct::LimitConstants constants = cal.constants(tct::analytic_function(lim_f));
                std::cout << "xi=" << constants.xi << '\n'
                          << "sigma_sq=" << constants.sigma_sq << '\n'
                          << "sigma=" << constants.sigma << '\n';
            }
        } else if (*spectrum) {
            spec_config.dims = parse_dims(spec_dims);
            spec_config.dist = tct::parse_noise_dist(spec_dist);
            spec_config.vector_mode = spec_vectors;
            spec_config.seed = env_seed(spec_config.seed);
            std::ofstream file, eigs_file;
            std::ostream& out = open_output(spec_out, file);
            if (!spec_eigs.empty()) {
                eigs_file.open(spec_eigs);
                if (!eigs_file) throw tct::ConfigError("cannot open " + spec_eigs);
                tct::run_spectrum(spec_config, out, &eigs_file);
            } else {
                tct::run_spectrum(spec_config, out);
            }
        } else if (*simulate) {
            tct::ExperimentConfig config =
                sim_config_file.empty() ? tct::ExperimentConfig{} : tct::load_config_file(sim_config_file);
            config.threads = sim_config.threads ? sim_config.threads : config.threads;
            if (!sim_kind.empty()) config.kind = sim_kind;
            if (!sim_dims.empty()) config.dims = parse_dims(sim_dims);
            if (!sim_dist.empty()) config.dist = tct::parse_noise_dist(sim_dist);
            if (!sim_vectors.empty()) config.vector_mode = sim_vectors;
            if (!sim_f.empty()) config.f_name = sim_f;
            if (sim_reps > 0) config.reps = sim_reps;
            if (!sim_convention.empty())
                config.convention = sim_convention == "general" ? tct::Convention::GeneralD
                                                                : tct::Convention::MainTextD3;
            if (sim_seed_set) config.seed = sim_seed;
            config.seed = sim_seed_set ? sim_seed : env_seed(config.seed);
            if (!sim_out.empty()) config.output = sim_out;
            if (config.kind != "table1" && config.kind != "qq" && config.kind != "matching")
                throw tct::ConfigError("simulate handles table1, qq, matching");
            std::ofstream file;
            std::ostream& out = open_output(config.output, file);
            tct::run_experiment(config, out);
        } else if (*power) {
            pow_config.dims = parse_dims(pow_dims);
            pow_config.dist = tct::parse_noise_dist(pow_dist);
            pow_config.vector_mode = pow_vectors;
            pow_config.convention = pow_convention == "general" ? tct::Convention::GeneralD
                                                                : tct::Convention::MainTextD3;
            if (!pow_betas.empty()) {
                pow_config.betas.clear();
                std::stringstream ss(pow_betas);
                std::string tok;
                while (std::getline(ss, tok, ',')) pow_config.betas.push_back(std::stod(tok));
            }
            pow_config.seed = env_seed(pow_config.seed);
            std::ofstream file;
            std::ostream& out = open_output(pow_out, file);
            tct::run_power(pow_config, out);
        } else if (*talign) {
            const tct::DenseTensor tensor = tct::load_tensor(ta_tensor);
            const tct::UnitVectorSet vectors = tct::load_vectors(ta_vectors);
            print_report(tct::alignment_test(tensor, vectors, ta_alpha), ta_json);
        } else if (*tmatch) {
            const tct::DenseTensor t0 = tct::load_tensor(tm_t0);
            const tct::DenseTensor t1 = tct::load_tensor(tm_t1);
            const tct::MatchingReport report = tct::matching_test(t0, t1, tm_alpha, tm_rank);
            for (std::size_t r = 0; r < report.per_component.size(); ++r) {
                std::cout << "component=" << r << '\n';
                print_report(report.per_component[r], tm_json);
            }
            std::cout << "recovery_converged=" << (report.recovery_converged ? 1 : 0) << '\n';
            std::cout << "overall_h0_accepted=" << (report.overall_h0_accepted ? 1 : 0) << '\n';
        }
    } catch (const tct::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const tct::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const tct::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
