// Command-line front end: ingest close prices, build return datasets, fit the
// candidate densities, run goodness-of-fit tests, and drive the simulator.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hestonfit/calibrate.hpp"
#include "hestonfit/density_model.hpp"
#include "hestonfit/dy_density.hpp"
#include "hestonfit/errors.hpp"
#include "hestonfit/gof.hpp"
#include "hestonfit/market_data.hpp"
#include "hestonfit/mc_oracle.hpp"
#include "hestonfit/mlp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hestonfit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

const std::vector<int> kDefaultLags = {1, 5, 20, 40, 80, 100, 200, 250};

FtVariant parse_variant(const std::string& s) {
    if (s == "three-term") return FtVariant::ThreeTerm;
    if (s == "one-term") return FtVariant::OneTerm;
    throw CLI::ValidationError("--ft-variant must be three-term or one-term");
}

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

HestonParams initial_guess(const std::vector<double>& centred, double tau_days) {
    double var = 0.0;
    for (double x : centred) var += x * x;
    var /= std::max<std::size_t>(centred.size(), 1);
    HestonParams init;
    init.gamma = 0.1;
    init.theta = std::max(var / tau_days, 1e-10);
    init.k = std::sqrt(init.gamma * init.theta);  // Feller ratio 2
    init.mu = 0.0;
    init.rho = 0.0;
    return init;
}

// ---------------------------------------------------------------------------
// replicate: overlapping returns + reference trimming, joint fit, plot data
// ---------------------------------------------------------------------------

struct ReplicateOpts {
    std::string input;
    std::vector<int> lags = kDefaultLags;
    std::string out_dir = ".";
    std::string variant = "three-term";
    bool no_trim = false;
    std::uint64_t seed = 1;
    int fit_evals = 2000;
};

int cmd_replicate(const ReplicateOpts& opt) {
    const auto prices = parse_prices_file(opt.input);
    const FtVariant variant = parse_variant(opt.variant);
    fs::create_directories(opt.out_dir);

    std::vector<EmpiricalPdf> hists;
    std::vector<GaussianModel> gaussians;
    std::vector<std::size_t> removed_counts;
    for (int lag : opt.lags) {
        const TimeLag tau(lag);
        auto returns = overlapping_returns(prices, tau);
        std::size_t removed = 0;
        if (!opt.no_trim) {
            if (auto bounds = reference_trim_bounds(tau)) {
                auto trimmed = trim_returns(returns, *bounds);
                returns = std::move(trimmed.kept);
                removed = trimmed.removed;
            }
        }
        auto centred = center_returns(returns);
        hists.push_back(empirical_pdf(centred, tau));
        gaussians.push_back(fit_gaussian(centred));
        removed_counts.push_back(removed);
    }

    DyFitOptions fit_opt;
    fit_opt.variant = variant;
    fit_opt.seed = opt.seed;
    fit_opt.max_evals_per_restart = opt.fit_evals;
    const auto guess = initial_guess(hists.front().centers, hists.front().tau.days());
    const FitReport report = fit_dy(hists, guess, fit_opt);

    json fit_json = {
        {"dy",
         {{"gamma", report.params.gamma},
          {"theta", report.params.theta},
          {"k", report.params.k},
          {"mu", report.params.mu},
          {"rho", report.params.rho},
          {"objective", report.objective},
          {"skipped_bins", report.skipped_bins},
          {"evaluations", report.evaluations},
          {"restarts", report.restarts},
          {"converged", report.converged}}},
        {"gaussian", json::array()},
        {"lags", opt.lags},
        {"trimmed", !opt.no_trim},
        {"removed_by_trimming", removed_counts},
        // presentation hint: stack successive lags by x10 when plotting
        {"stacking_offset_factor", 10},
    };

    for (std::size_t i = 0; i < hists.size(); ++i) {
        const TimeLag tau(opt.lags[i]);
        DyModel dy(report.params, tau, variant);
        std::string tsv = "x\tempirical\tdy\tgaussian\n";
        for (std::size_t b = 0; b < hists[i].centers.size(); ++b) {
            const double x = hists[i].centers[b];
            tsv += fmt(x, "%.12g") + "\t" + fmt(hists[i].densities[b], "%.12g") + "\t" +
                   fmt(dy.pdf(x), "%.12g") + "\t" + fmt(gaussians[i].pdf(x), "%.12g") + "\n";
        }
        write_text(fs::path(opt.out_dir) / ("plot_tau" + std::to_string(opt.lags[i]) + ".tsv"),
                   tsv);
        fit_json["gaussian"].push_back({{"tau", opt.lags[i]},
                                        {"mean", gaussians[i].mean()},
                                        {"std", gaussians[i].stddev()}});
    }
    write_json(fs::path(opt.out_dir) / "fit.json", fit_json);

    std::cout << "fitted gamma=" << fmt(report.params.gamma) << " theta=" << fmt(report.params.theta)
              << " k=" << fmt(report.params.k) << " mu=" << fmt(report.params.mu)
              << "  E=" << fmt(report.objective) << " (evals " << report.evaluations
              << ", restarts " << report.restarts << (report.converged ? "" : ", NOT converged")
              << ")\n"
              << "wrote " << opt.lags.size() << " plot-data files and fit.json to " << opt.out_dir
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// test: per-path KS / chi-square tables over non-overlapping paths
// ---------------------------------------------------------------------------

struct TestOpts {
    std::string input;
    std::string test;  // ks | chi2
    std::vector<int> lags = kDefaultLags;
    std::vector<std::string> models = {"gaussian", "dy", "nn"};
    std::string out_dir = ".";
    std::string variant = "three-term";
    std::string fit_file;  // reuse a replicate fit.json for the dy model (pooled)
    bool overlap = false;
    bool trim = false;
    bool pooled = false;
    int per_bin = 5;
    int nn_epochs = 40000;
    int fit_evals = 2000;
    std::uint64_t seed = 1;
};

struct RowResult {
    int tau = 0;
    bool skipped = false;
    std::string skip_reason;
    std::optional<GofResult> gof;
    std::size_t n_paths = 0;
};

std::unique_ptr<DensityModel> fit_model_for(const std::string& name,
                                            const std::vector<double>& centred, TimeLag tau,
                                            const TestOpts& opt,
                                            const std::optional<HestonParams>& fixed_dy) {
    if (name == "gaussian") {
        return std::make_unique<GaussianModel>(fit_gaussian(centred));
    }
    if (name == "dy") {
        if (fixed_dy) return std::make_unique<DyModel>(*fixed_dy, tau, parse_variant(opt.variant));
        DyFitOptions fit_opt;
        fit_opt.variant = parse_variant(opt.variant);
        fit_opt.seed = opt.seed;
        fit_opt.max_evals_per_restart = opt.fit_evals;
        fit_opt.max_restarts = 12;  // per-path fits; restarts dominate runtime
        const auto hist = empirical_pdf(centred, tau);
        const auto report = fit_dy({hist}, initial_guess(centred, tau.days()), fit_opt);
        return std::make_unique<DyModel>(report.params, tau, fit_opt.variant);
    }
    if (name == "nn") {
        const auto hist = empirical_pdf(centred, tau);
        const auto trained = train_mlp(hist, opt.nn_epochs, opt.seed);
        return std::make_unique<NnModel>(NnModel::from_histogram(trained.params, hist));
    }
    throw CLI::ValidationError("unknown model '" + name + "'");
}

RowResult test_one_lag(const std::string& model_name, const PriceSeries& prices, TimeLag tau,
                       const TestOpts& opt, const std::optional<HestonParams>& fixed_dy) {
    RowResult row;
    row.tau = tau.tau;

    std::vector<std::vector<double>> paths;
    if (opt.overlap) {
        paths.push_back(overlapping_returns(prices, tau));
    } else {
        for (auto& p : path_returns(prices, tau)) paths.push_back(std::move(p.returns));
    }
    if (opt.trim) {
        if (auto bounds = reference_trim_bounds(tau)) {
            for (auto& p : paths) p = trim_returns(p, *bounds).kept;
        }
    }
    for (auto& p : paths) p = center_returns(p);
    row.n_paths = paths.size();

    // pooled mode fits one model on the concatenation, then tests each path
    std::unique_ptr<DensityModel> pooled_model;
    if (opt.pooled || fixed_dy) {
        std::vector<double> all;
        for (const auto& p : paths) all.insert(all.end(), p.begin(), p.end());
        try {
            pooled_model = fit_model_for(model_name, center_returns(all), tau, opt, fixed_dy);
        } catch (const InsufficientData& e) {
            row.skipped = true;
            row.skip_reason = e.what();
            return row;
        }
    }

    std::vector<double> stats;
    std::optional<int> df;
    std::size_t insufficient = 0;
    std::string last_reason;
    for (const auto& path : paths) {
        try {
            const DensityModel* model = pooled_model.get();
            std::unique_ptr<DensityModel> own;
            if (!model) {
                own = fit_model_for(model_name, path, tau, opt, fixed_dy);
                model = own.get();
            }
            if (opt.test == "ks") {
                stats.push_back(ks_statistic(path, *model));
            } else {
                const auto part = equal_freq_bins(*model, path.size(), opt.per_bin);
                const auto [chi2, nbins] = chi2_statistic(path, part);
                stats.push_back(chi2);
                if (!df) df = nbins - 1 - model->param_count();
            }
        } catch (const InsufficientData& e) {
            ++insufficient;
            last_reason = e.what();
        }
    }
    if (stats.empty()) {
        row.skipped = true;
        row.skip_reason = last_reason.empty() ? "no testable paths" : last_reason;
        return row;
    }

    const std::size_t n_ret = paths.front().size();
    std::function<double(double)> pfun;
    if (opt.test == "ks") {
        pfun = [n_ret](double z) { return ks_pvalue(z, n_ret); };
    } else if (df && *df >= 1) {
        const int dof = *df;
        pfun = [dof](double c) { return chi2_pvalue(std::max(c, 0.0), dof); };
    } else {
        pfun = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    }
    row.gof = aggregate_paths(stats, pfun);
    row.gof->df = df;
    if (insufficient > 0)
        row.skip_reason = std::to_string(insufficient) + " path(s) skipped: " + last_reason;
    return row;
}

int cmd_test(const TestOpts& opt) {
    if (opt.test != "ks" && opt.test != "chi2")
        throw CLI::ValidationError("--test must be ks or chi2");
    const auto prices = parse_prices_file(opt.input);
    fs::create_directories(opt.out_dir);

    std::optional<HestonParams> fixed_dy;
    if (!opt.fit_file.empty()) {
        std::ifstream in(opt.fit_file);
        if (!in) throw ParseError("cannot open fit file '" + opt.fit_file + "'");
        json j = json::parse(in);
        HestonParams p;
        p.gamma = j.at("dy").at("gamma").get<double>();
        p.theta = j.at("dy").at("theta").get<double>();
        p.k = j.at("dy").at("k").get<double>();
        p.mu = j.at("dy").at("mu").get<double>();
        p.rho = j.at("dy").at("rho").get<double>();
        fixed_dy = p;
    }

    json out_json;
    out_json["test"] = opt.test;
    out_json["per_bin"] = opt.per_bin;
    out_json["overlap"] = opt.overlap;
    out_json["trim"] = opt.trim;
    out_json["pooled"] = opt.pooled;
    out_json["models"] = json::object();

    std::string table_text;
    for (const auto& model_name : opt.models) {
        json rows = json::array();
        std::string table = (opt.test == "ks")
                                ? "KS test, model = " + model_name + "\ntau\tZ_mean\tZ_std\tp(m+s)\tp(m)\tp(m-s)\n"
                                : "chi2 test, model = " + model_name +
                                      "\ntau\tchi2_mean\tchi2_std\tdf\tp(m+s)\tp(m)\tp(m-s)\n";
        for (int lag : opt.lags) {
            const auto dy_fix =
                (model_name == "dy") ? fixed_dy : std::optional<HestonParams>{};
            RowResult row = test_one_lag(model_name, prices, TimeLag(lag), opt, dy_fix);
            json jrow = {{"tau", row.tau}, {"n_paths", row.n_paths}};
            if (row.skipped) {
                jrow["skipped"] = true;
                jrow["reason"] = row.skip_reason;
                table += std::to_string(lag) + "\tSKIPPED: " + row.skip_reason + "\n";
            } else {
                const auto& g = *row.gof;
                jrow["mean"] = g.mean;
                if (g.stddev) jrow["std"] = *g.stddev;
                if (g.df) jrow["df"] = *g.df;
                jrow["p_mid"] = g.p_mid;
                if (g.p_low) jrow["p_low"] = *g.p_low;
                if (g.p_high) jrow["p_high"] = *g.p_high;
                jrow["per_path"] = g.per_path;
                if (!row.skip_reason.empty()) jrow["note"] = row.skip_reason;

                table += std::to_string(lag) + "\t" + fmt(g.mean, "%.4g") + "\t" +
                         (g.stddev ? fmt(*g.stddev, "%.4g") : std::string("-"));
                if (opt.test == "chi2")
                    table += "\t" + (g.df ? std::to_string(*g.df) : std::string("-"));
                table += "\t" + (g.p_low ? fmt(*g.p_low, "%.3g") : std::string("-")) + "\t" +
                         fmt(g.p_mid, "%.3g") + "\t" +
                         (g.p_high ? fmt(*g.p_high, "%.3g") : std::string("-")) + "\n";
            }
            rows.push_back(jrow);
        }
        out_json["models"][model_name] = rows;
        table_text += table + "\n";
    }

    const std::string stem = opt.test + "_results";
    write_json(fs::path(opt.out_dir) / (stem + ".json"), out_json);
    write_text(fs::path(opt.out_dir) / (stem + ".txt"), table_text);
    std::cout << table_text;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate: dump a terminal-return sample plus a JSON summary
// ---------------------------------------------------------------------------

struct SimulateOpts {
    double gamma = 2.0, theta = 0.04, k = 0.3, rho = 0.0;
    int t = 1;
    double dt = 1e-3;
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    double v0 = 0.0;  // <= 0 means stationary draws
    int threads = 0;
    std::string out_dir = ".";
};

int cmd_simulate(const SimulateOpts& opt) {
    SimConfig cfg;
    cfg.params.gamma = opt.gamma;
    cfg.params.theta = opt.theta;
    cfg.params.k = opt.k;
    cfg.params.rho = opt.rho;
    cfg.horizon = TimeLag(opt.t);
    cfg.dt = opt.dt;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    if (opt.v0 > 0.0) cfg.v0 = opt.v0;

    const auto result = simulate_returns(cfg);
    fs::create_directories(opt.out_dir);

    std::string sample;
    sample.reserve(result.returns.size() * 20);
    for (double x : result.returns) sample += fmt(x, "%.17g") + "\n";
    write_text(fs::path(opt.out_dir) / "sample.txt", sample);

    double mean = 0.0;
    for (double x : result.returns) mean += x;
    mean /= double(result.returns.size());
    double var = 0.0;
    for (double x : result.returns) var += (x - mean) * (x - mean);
    var /= double(result.returns.size());

    json summary = {{"n_paths", result.returns.size()},
                    {"mean", mean},
                    {"variance", var},
                    {"excess_kurtosis", excess_kurtosis(result.returns)},
                    {"clamp_count", result.clamp_count},
                    {"seed", opt.seed},
                    {"dt", opt.dt},
                    {"t", opt.t},
                    {"v0", opt.v0 > 0.0 ? json(opt.v0) : json("stationary")}};
    write_json(fs::path(opt.out_dir) / "summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// kurtosis: per-lag excess kurtosis, untrimmed vs reference-trimmed
// ---------------------------------------------------------------------------

struct KurtosisOpts {
    std::string input;
    std::vector<int> lags = kDefaultLags;
    std::string out_dir;
};

int cmd_kurtosis(const KurtosisOpts& opt) {
    const auto prices = parse_prices_file(opt.input);
    std::string table = "tau\tkurtosis_untrimmed\tkurtosis_trimmed\tremoved\n";
    json rows = json::array();
    for (int lag : opt.lags) {
        const TimeLag tau(lag);
        const auto returns = overlapping_returns(prices, tau);
        const double raw = excess_kurtosis(returns);
        std::string trimmed_text = "-";
        json jrow = {{"tau", lag}, {"untrimmed", raw}};
        std::size_t removed = 0;
        if (auto bounds = reference_trim_bounds(tau)) {
            const auto trimmed = trim_returns(returns, *bounds);
            removed = trimmed.removed;
            const double kt = excess_kurtosis(trimmed.kept);
            trimmed_text = fmt(kt, "%.4f");
            jrow["trimmed"] = kt;
        }
        jrow["removed"] = removed;
        rows.push_back(jrow);
        table += std::to_string(lag) + "\t" + fmt(raw, "%.4f") + "\t" + trimmed_text + "\t" +
                 std::to_string(removed) + "\n";
    }
    std::cout << table;
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        write_json(fs::path(opt.out_dir) / "kurtosis.json", rows);
        write_text(fs::path(opt.out_dir) / "kurtosis.txt", table);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form stochastic-volatility return density: calibration and "
                 "goodness-of-fit tooling"};
    app.require_subcommand(1);

    ReplicateOpts rep;
    auto* c_rep = app.add_subcommand("replicate",
                                     "Overlapping-return pipeline with reference trimming; "
                                     "joint fit and per-lag plot data");
    c_rep->add_option("--input", rep.input, "price file (date,close)")->required();
    c_rep->add_option("--lags", rep.lags, "time lags in trading days")->delimiter(',');
    c_rep->add_option("--out", rep.out_dir, "output directory");
    c_rep->add_option("--ft-variant", rep.variant, "three-term|one-term");
    c_rep->add_option("--seed", rep.seed, "fit restart seed");
    c_rep->add_option("--fit-evals", rep.fit_evals, "objective evaluations per restart");
    c_rep->add_flag("--no-trim", rep.no_trim, "skip reference trimming");

    TestOpts tst;
    auto* c_test = app.add_subcommand("test", "KS or chi-square tables over return paths");
    c_test->add_option("--input", tst.input, "price file (date,close)")->required();
    c_test->add_option("--test", tst.test, "ks|chi2")->required();
    c_test->add_option("--lags", tst.lags, "time lags in trading days")->delimiter(',');
    c_test->add_option("--models", tst.models, "gaussian,dy,nn")->delimiter(',');
    c_test->add_option("--out", tst.out_dir, "output directory");
    c_test->add_option("--ft-variant", tst.variant, "three-term|one-term");
    c_test->add_option("--per-bin", tst.per_bin, "expected observations per chi2 bin");
    c_test->add_option("--seed", tst.seed, "seed for fits and training");
    c_test->add_option("--nn-epochs", tst.nn_epochs, "network training epochs");
    c_test->add_option("--fit-evals", tst.fit_evals, "objective evaluations per restart");
    c_test->add_option("--fit", tst.fit_file, "reuse dy parameters from a fit.json");
    c_test->add_flag("--overlap", tst.overlap, "single overlapping series instead of paths");
    c_test->add_flag("--trim", tst.trim, "apply reference trimming");
    c_test->add_flag("--pooled", tst.pooled, "fit once on pooled paths, test per path");

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "Euler full-truncation terminal returns");
    c_sim->add_option("--gamma", sim.gamma, "relaxation rate (1/day)");
    c_sim->add_option("--theta", sim.theta, "long-run variance (per day)");
    c_sim->add_option("--k", sim.k, "variance noise");
    c_sim->add_option("--rho", sim.rho, "Wiener correlation");
    c_sim->add_option("--t", sim.t, "horizon in days");
    c_sim->add_option("--dt", sim.dt, "Euler step (days)");
    c_sim->add_option("--paths", sim.paths, "number of paths");
    c_sim->add_option("--seed", sim.seed, "seed");
    c_sim->add_option("--v0", sim.v0, "fixed initial variance (omit for stationary draws)");
    c_sim->add_option("--threads", sim.threads, "worker threads (0 = hardware)");
    c_sim->add_option("--out", sim.out_dir, "output directory");

    KurtosisOpts kur;
    auto* c_kur = app.add_subcommand("kurtosis", "untrimmed vs trimmed excess kurtosis per lag");
    c_kur->add_option("--input", kur.input, "price file (date,close)")->required();
    c_kur->add_option("--lags", kur.lags, "time lags in trading days")->delimiter(',');
    c_kur->add_option("--out", kur.out_dir, "optional output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message/help
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_rep) {
            if (rep.lags.empty()) throw CLI::ValidationError("--lags must be non-empty");
            return cmd_replicate(rep);
        }
        if (*c_test) {
            if (tst.lags.empty()) throw CLI::ValidationError("--lags must be non-empty");
            return cmd_test(tst);
        }
        if (*c_sim) return cmd_simulate(sim);
        if (*c_kur) return cmd_kurtosis(kur);
        return kExitUsage;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
