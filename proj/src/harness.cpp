#include "tct/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tct/contour.hpp"
#include "tct/contraction.hpp"
#include "tct/dyson.hpp"
#include "tct/parallel.hpp"
#include "tct/quadrature.hpp"
#include "tct/rng.hpp"
#include "tct/spectra.hpp"
#include "tct/stats.hpp"
#include "tct/testing.hpp"

namespace tct {

namespace {

std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::pair<double, double> true_cumulants(NoiseDist dist) {
    return dist == NoiseDist::Gaussian ? std::make_pair(0.0, 0.0) : std::make_pair(0.0, -1.2);
}

std::function<double(double)> real_function(const AnalyticFn& f) {
    return [f](double x) { return f(std::complex<double>(x, 0.0)).real(); };
}

DenseTensor replicate_tensor(const ExperimentConfig& config, const SpikedModel& model,
                             const std::string& purpose, int rep) {
    const auto seed = derive_seed(config.seed, purpose, static_cast<std::uint64_t>(rep));
    DenseTensor noise = generate_noise(model.profile(), config.dist, seed);
    return assemble_spiked(model, noise);
}

} // namespace

UnitVectorSet ExperimentConfig::vectors() const {
    const DimensionProfile p = profile();
    if (vector_mode == "delocalized") return delocalized_vectors(p);
    if (vector_mode == "localized") return localized_vectors(p);
    if (vector_mode == "file") {
        if (vectors_file.empty()) throw ConfigError("vector mode 'file' needs vectors_file");
        UnitVectorSet v = load_vectors(vectors_file);
        if (v.profile() != p) throw DimensionError("vectors file does not match dims");
        return v;
    }
    throw ConfigError("unknown vector mode '" + vector_mode + "'");
}

void ExperimentConfig::validate() const {
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in (0,1)");
    for (std::size_t i = 0; i + 1 < betas.size(); ++i)
        if (betas[i] > betas[i + 1]) throw ConfigError("beta grid must be ascending");
    if (!betas.empty() && betas.front() < 0.0) throw ConfigError("betas must be nonnegative");
    if (bins < 2) throw ConfigError("bins must be >= 2");
    (void)profile();
}

ExperimentConfig load_config(std::istream& is) {
    ExperimentConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto parse_list = [](const std::string& s) {
            std::vector<double> out;
            std::istringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
            return out;
        };
        if (key == "kind") config.kind = value;
        else if (key == "dims") {
            config.dims.clear();
            std::istringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) config.dims.push_back(std::stoi(tok));
        } else if (key == "dist") config.dist = parse_noise_dist(value);
        else if (key == "vectors") config.vector_mode = value;
        else if (key == "vectors_file") config.vectors_file = value;
        else if (key == "f") config.f_name = value;
        else if (key == "reps") config.reps = std::stoi(value);
        else if (key == "alpha") config.alpha = std::stod(value);
        else if (key == "betas") config.betas = parse_list(value);
        else if (key == "beta0s") config.beta0s = parse_list(value);
        else if (key == "beta1s") config.beta1s = parse_list(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "output") config.output = value;
        else if (key == "threads") config.threads = std::stoi(value);
        else if (key == "bins") config.bins = std::stoi(value);
        else if (key == "convention")
            config.convention = (value == "general") ? Convention::GeneralD : Convention::MainTextD3;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return load_config(is);
}

void run_table1(const ExperimentConfig& config, std::ostream& out) {
    config.validate();
    const DimensionProfile profile = config.profile();
    const UnitVectorSet vectors = config.vectors();
    const auto [k3, k4] = true_cumulants(config.dist);

    DysonSolver solver(profile.ratios());
    LimitContext ctx(solver, vector_stats(vectors), k3, k4, config.convention);
    const ContourSpec inner = ContourSpec::default_for(solver);
    ContourCalibration cal(ctx, inner, inner.enlarged());

    const auto names = analytic_function_names();
    std::vector<AnalyticFn> fs;
    std::vector<LimitConstants> limits;
    std::vector<double> integrals;
    for (const auto& name : names) {
        fs.push_back(analytic_function(name));
        limits.push_back(cal.constants(fs.back()));
        integrals.push_back(cal.lsd_integral(fs.back()));
    }

    const SpikedModel model(profile, {}, {}, config.dist);
    std::vector<std::vector<double>> g_values(names.size(),
                                              std::vector<double>(static_cast<std::size_t>(config.reps)));
    parallel_for(config.reps, config.threads, [&](int rep) {
        const DenseTensor t = replicate_tensor(config, model, "table1", rep);
        const ContractedMatrix m = phi_d(t, vectors);
        const Spectrum spectrum = symmetric_eigenvalues(m.entries());
        for (std::size_t fi = 0; fi < fs.size(); ++fi)
            g_values[fi][static_cast<std::size_t>(rep)] =
                g_n_statistic(spectrum, real_function(fs[fi]), integrals[fi]);
    });

    out << "f,dist,vector_type,empirical_mean,empirical_var,limit_mean,limit_var\n";
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        const Summary s = summarize(g_values[fi]);
        out << names[fi] << ',' << to_string(config.dist) << ',' << config.vector_mode << ','
            << fmt6(s.mean) << ',' << fmt6(s.variance) << ',' << fmt6(limits[fi].xi) << ','
            << fmt6(limits[fi].sigma_sq) << '\n';
    }
}

void run_qq(const ExperimentConfig& config, std::ostream& out) {
    config.validate();
    const DimensionProfile profile = config.profile();
    const UnitVectorSet vectors = config.vectors();
    const auto [k3, k4] = true_cumulants(config.dist);

    DysonSolver solver(profile.ratios());
    LimitContext ctx(solver, vector_stats(vectors), k3, k4, config.convention);
    const ContourSpec inner = ContourSpec::default_for(solver);
    ContourCalibration cal(ctx, inner, inner.enlarged());
    const AnalyticFn f = analytic_function(config.f_name);
    const LimitConstants constants = cal.constants(f);
    const double integral = cal.lsd_integral(f);

    const SpikedModel model(profile, {}, {}, config.dist);
    std::vector<double> normalized(static_cast<std::size_t>(config.reps));
    parallel_for(config.reps, config.threads, [&](int rep) {
        const DenseTensor t = replicate_tensor(config, model, "qq", rep);
        const Spectrum spectrum = symmetric_eigenvalues(phi_d(t, vectors).entries());
        const double g = g_n_statistic(spectrum, real_function(f), integral);
        normalized[static_cast<std::size_t>(rep)] = (g - constants.xi) / constants.sigma;
    });
    std::sort(normalized.begin(), normalized.end());

    out << "index,normal_quantile,normalized_value\n";
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(normalized.size());
        out << i << ',' << fmt6(normal_quantile(p)) << ',' << fmt6(normalized[i]) << '\n';
    }
}

void run_power(const ExperimentConfig& config, std::ostream& out) {
    config.validate();
    const DimensionProfile profile = config.profile();
    const UnitVectorSet vectors = config.vectors();
    const auto [k3, k4] = true_cumulants(config.dist);

    DysonSolver solver(profile.ratios());
    const AlignmentCalibration cal =
        calibrate_alignment(solver, vector_stats(vectors), k3, k4, config.convention);
    const double z_alpha = normal_quantile(1.0 - config.alpha);
    const double n_total = static_cast<double>(profile.total_dim());

    out << "beta,empirical_power,theoretical_power\n";
    for (std::size_t bi = 0; bi < config.betas.size(); ++bi) {
        const double beta = config.betas[bi];
        const SpikedModel model =
            beta == 0.0 ? SpikedModel(profile, {}, {}, config.dist)
                        : SpikedModel(profile, {beta}, {vectors}, config.dist);
        const double d_value = beta == 0.0 ? 0.0 : drift(model, vectors);
        const double theo = theoretical_power(d_value, cal.sigma, config.alpha);

        const std::string purpose = "power/" + std::to_string(bi);
        std::vector<int> rejections(static_cast<std::size_t>(config.reps));
        parallel_for(config.reps, config.threads, [&](int rep) {
            const DenseTensor t = replicate_tensor(config, model, purpose, rep);
            const double stat = frobenius_sq(phi_d(t, vectors)) - n_total * cal.m2;
            rejections[static_cast<std::size_t>(rep)] = ((stat - cal.xi) / cal.sigma > z_alpha) ? 1 : 0;
        });
        double hits = 0;
        for (int r : rejections) hits += r;
        out << fmt6(beta) << ',' << fmt6(hits / config.reps) << ',' << fmt6(theo) << '\n';
    }
}

void run_matching(const ExperimentConfig& config, std::ostream& out) {
    config.validate();
    const DimensionProfile profile = config.profile();
    const UnitVectorSet vectors = config.vectors();
    const auto [k3, k4] = true_cumulants(config.dist);

    DysonSolver solver(profile.ratios());
    const AlignmentCalibration cal =
        calibrate_alignment(solver, vector_stats(vectors), k3, k4, config.convention);
    const double z_alpha = normal_quantile(1.0 - config.alpha);
    const double n_total = static_cast<double>(profile.total_dim());

    out << "beta0,beta1,empirical_power_known,empirical_power_estimated\n";
    for (std::size_t i0 = 0; i0 < config.beta0s.size(); ++i0) {
        const double beta0 = config.beta0s[i0];
        const SpikedModel model0(profile, {beta0}, {vectors}, config.dist);
        for (std::size_t i1 = 0; i1 < config.beta1s.size(); ++i1) {
            const double beta1 = config.beta1s[i1];
            const SpikedModel model1 =
                beta1 == 0.0 ? SpikedModel(profile, {}, {}, config.dist)
                             : SpikedModel(profile, {beta1}, {vectors}, config.dist);

            const std::string tag = std::to_string(i0) + "/" + std::to_string(i1);
            std::vector<int> known(static_cast<std::size_t>(config.reps));
            std::vector<int> estimated(static_cast<std::size_t>(config.reps));
            parallel_for(config.reps, config.threads, [&](int rep) {
                const DenseTensor t0 = replicate_tensor(config, model0, "match0/" + tag, rep);
                const DenseTensor t1 = replicate_tensor(config, model1, "match1/" + tag, rep);
                const double stat = frobenius_sq(phi_d(t1, vectors)) - n_total * cal.m2;
                known[static_cast<std::size_t>(rep)] =
                    ((stat - cal.xi) / cal.sigma > z_alpha) ? 1 : 0;
                const MatchingReport report =
                    matching_test(t0, t1, config.alpha, 1, config.convention);
                estimated[static_cast<std::size_t>(rep)] = report.overall_h0_accepted ? 0 : 1;
            });
            double hk = 0, he = 0;
            for (int r : known) hk += r;
            for (int r : estimated) he += r;
            out << fmt6(beta0) << ',' << fmt6(beta1) << ',' << fmt6(hk / config.reps) << ','
                << fmt6(he / config.reps) << '\n';
        }
    }
}

void run_spectrum(const ExperimentConfig& config, std::ostream& out, std::ostream* eigenvalues_out) {
    config.validate();
    const DimensionProfile profile = config.profile();
    const UnitVectorSet vectors = config.vectors();

    DysonSolver solver(profile.ratios());
    const double edge = solver.support_edge();
    const double lo = -edge - 0.3, hi = edge + 0.3;
    const double width = (hi - lo) / config.bins;
    const auto n_total = profile.total_dim();

    const SpikedModel model(profile, {}, {}, config.dist);
    std::vector<Eigen::VectorXd> spectra(static_cast<std::size_t>(config.reps));
    parallel_for(config.reps, config.threads, [&](int rep) {
        const DenseTensor t = replicate_tensor(config, model, "spectrum", rep);
        spectra[static_cast<std::size_t>(rep)] =
            symmetric_eigenvalues(phi_d(t, vectors).entries()).eigenvalues;
    });

    std::vector<std::int64_t> counts(static_cast<std::size_t>(config.bins), 0);
    std::int64_t near_zero = 0;
    for (const auto& eigs : spectra)
        for (Eigen::Index i = 0; i < eigs.size(); ++i) {
            const double x = eigs[i];
            if (std::abs(x) <= 0.05) ++near_zero;
            const int b = static_cast<int>((x - lo) / width);
            if (b >= 0 && b < config.bins) ++counts[static_cast<std::size_t>(b)];
        }

    out << "# zeta=" << fmt6(edge) << " bound=" << fmt6(solver.spectral_bound())
        << " point_mass=" << (solver.has_point_mass() ? 1 : 0) << " near_zero_fraction="
        << fmt6(static_cast<double>(near_zero) / (static_cast<double>(config.reps) * n_total))
        << '\n';
    out << "bin_lo,bin_hi,empirical_density,lsd_density\n";
    const double total = static_cast<double>(config.reps) * static_cast<double>(n_total);
    for (int b = 0; b < config.bins; ++b) {
        const double b_lo = lo + b * width, b_hi = b_lo + width;
        const double emp = static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width);
        const double lsd = solver.density(0.5 * (b_lo + b_hi), 1e-6);
        out << fmt6(b_lo) << ',' << fmt6(b_hi) << ',' << fmt6(emp) << ',' << fmt6(lsd) << '\n';
    }

    if (eigenvalues_out) {
        *eigenvalues_out << "rep,eigenvalue\n";
        (*eigenvalues_out).precision(17);
        for (std::size_t r = 0; r < spectra.size(); ++r)
            for (Eigen::Index i = 0; i < spectra[r].size(); ++i)
                *eigenvalues_out << r << ',' << spectra[r][i] << '\n';
    }
}

void run_experiment(const ExperimentConfig& config, std::ostream& out) {
    if (config.kind == "table1") run_table1(config, out);
    else if (config.kind == "power") run_power(config, out);
    else if (config.kind == "matching") run_matching(config, out);
    else if (config.kind == "qq") run_qq(config, out);
    else if (config.kind == "spectrum") run_spectrum(config, out);
    else throw ConfigError("unknown experiment kind '" + config.kind + "'");
}

} // namespace tct
