// Command-line front end: exact solves, complexity reports, hard-alternative
// construction, single-instance algorithm evaluation, and the gamma-grid
// slope experiments.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrpeval/complexity.hpp"
#include "mrpeval/errors.hpp"
#include "mrpeval/experiment.hpp"
#include "mrpeval/mrp_io.hpp"
#include "mrpeval/sampling.hpp"
#include "mrpeval/td.hpp"
#include "mrpeval/vrpe.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kPhaseGaussianMc = 1;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MRPEVAL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw mrpeval::ValidationError("MRPEVAL_SEED is not a valid unsigned integer");
        }
    }
    return 0;
}

mrpeval::StepsizeChoice parse_stepsize(const std::string& text) {
    using Kind = mrpeval::StepsizeSchedule::Kind;
    mrpeval::StepsizeChoice choice;
    if (text == "rlin") {
        choice.kind = Kind::RecenteredLinear;
        return choice;
    }
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::optional<double> param;
    if (colon != std::string::npos) {
        try {
            param = std::stod(text.substr(colon + 1));
        } catch (const std::exception&) {
            throw mrpeval::ValidationError("bad stepsize parameter in '" + text + "'");
        }
    }
    if (head == "constant") {
        choice.kind = Kind::Constant;
        choice.parameter = param;
        return choice;
    }
    if (head == "poly") {
        choice.kind = Kind::Polynomial;
        choice.parameter = param;
        return choice;
    }
    throw mrpeval::ValidationError("unknown stepsize '" + text +
                                   "' (expected constant:a, poly:w, or rlin)");
}

json slope_report(const mrpeval::SlopeFit& fit, double ideal) {
    json j;
    j["slope_hat"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["slope_stderr"] = fit.slope_stderr;
    j["slope_ideal"] = ideal;
    j["abs_slope_gap"] = std::fabs(fit.slope - ideal);
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"Instance-dependent policy evaluation for tabular Markov reward processes"};
    app.require_subcommand(1);

    // ---- solve ----
    std::string solve_mrp_path;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the value function exactly");
    solve_cmd->add_option("--mrp", solve_mrp_path, "MRP JSON file")->required();

    // ---- complexity ----
    std::string cx_mrp_path, cx_theta_path;
    std::uint64_t cx_n = 1000;
    std::uint64_t cx_mc = 100000;
    std::uint64_t cx_seed = 0;
    bool cx_seed_given = false;
    auto* cx_cmd = app.add_subcommand("complexity", "Report complexity functionals");
    cx_cmd->add_option("--mrp", cx_mrp_path, "MRP JSON file")->required();
    cx_cmd->add_option("--theta", cx_theta_path,
                       "JSON array; profile is evaluated here instead of at theta*");
    cx_cmd->add_option("--n", cx_n, "Sample size for the lower-bound value")
        ->check(CLI::PositiveNumber);
    cx_cmd->add_option("--mc-samples", cx_mc, "Draws for the E||Z||_inf estimate")
        ->check(CLI::PositiveNumber);
    cx_cmd->add_option("--seed", cx_seed, "Master seed")->each([&](const std::string&) {
        cx_seed_given = true;
    });

    // ---- hard-alt ----
    std::string ha_mrp_path, ha_out_path = "-";
    std::uint64_t ha_n = 0;
    auto* ha_cmd = app.add_subcommand("hard-alt", "Construct the hardest local alternative");
    ha_cmd->add_option("--mrp", ha_mrp_path, "MRP JSON file")->required();
    ha_cmd->add_option("--n", ha_n, "Sample size")->required()->check(CLI::PositiveNumber);
    ha_cmd->add_option("--out", ha_out_path, "Output path ('-' for stdout)");

    // ---- evaluate ----
    std::string ev_mrp_path, ev_algo = "td", ev_stepsize = "rlin", ev_mode = "budgeted";
    std::uint64_t ev_n = 0, ev_trials = 1, ev_seed = 0;
    bool ev_seed_given = false;
    double ev_delta = 0.1;
    auto* ev_cmd = app.add_subcommand("evaluate", "Run an algorithm on one MRP");
    ev_cmd->add_option("--mrp", ev_mrp_path, "MRP JSON file")->required();
    ev_cmd->add_option("--algo", ev_algo, "td or vrpe")
        ->check(CLI::IsMember({"td", "vrpe"}));
    ev_cmd->add_option("--stepsize", ev_stepsize, "constant:a, poly:w, or rlin");
    ev_cmd->add_option("--n", ev_n, "Sample budget")->required()->check(CLI::PositiveNumber);
    ev_cmd->add_option("--trials", ev_trials, "Trial count")->check(CLI::PositiveNumber);
    ev_cmd->add_option("--seed", ev_seed, "Master seed")->each([&](const std::string&) {
        ev_seed_given = true;
    });
    ev_cmd->add_option("--delta", ev_delta, "Failure probability (vrpe)");
    ev_cmd->add_option("--mode", ev_mode, "budgeted or paper (vrpe)")
        ->check(CLI::IsMember({"budgeted", "paper"}));

    // ---- experiment ----
    std::string ex_algo = "vrpe", ex_stepsize = "rlin", ex_mode = "budgeted", ex_out;
    std::vector<double> ex_gammas = {0.75, 0.80, 0.85, 0.90, 0.93};
    double ex_lambda = 1.0, ex_delta = 0.1;
    int ex_exponent = 3;
    std::uint64_t ex_trials = 200, ex_seed = 0;
    bool ex_seed_given = false;
    unsigned ex_threads = 0;
    auto* ex_cmd = app.add_subcommand("experiment", "Gamma-grid slope experiment");
    ex_cmd->add_option("--lambda", ex_lambda, "Family parameter lambda >= 0")->required();
    ex_cmd->add_option("--exponent", ex_exponent, "Sample-size exponent, 2 or 3")
        ->check(CLI::IsMember({2, 3}));
    ex_cmd->add_option("--algo", ex_algo, "td_pr or vrpe")
        ->check(CLI::IsMember({"td_pr", "vrpe"}));
    ex_cmd->add_option("--stepsize", ex_stepsize, "constant:a, poly:w, or rlin");
    ex_cmd->add_option("--gammas", ex_gammas, "Discount grid, strictly increasing")
        ->delimiter(',');
    ex_cmd->add_option("--trials", ex_trials, "Trials per gamma")->check(CLI::PositiveNumber);
    ex_cmd->add_option("--seed", ex_seed, "Master seed")->each([&](const std::string&) {
        ex_seed_given = true;
    });
    ex_cmd->add_option("--delta", ex_delta, "Failure probability (vrpe)");
    ex_cmd->add_option("--mode", ex_mode, "budgeted or paper (vrpe)")
        ->check(CLI::IsMember({"budgeted", "paper"}));
    ex_cmd->add_option("--threads", ex_threads, "Worker threads (0 = hardware)");
    ex_cmd->add_option("--out", ex_out, "Output directory for trials.csv/summary.csv")
        ->required();

    // ---- slopes ----
    std::string sl_csv_path;
    int sl_exponent = 3;
    auto* sl_cmd = app.add_subcommand("slopes", "Fit the log-log slope of a trial CSV");
    sl_cmd->add_option("--csv", sl_csv_path, "trials.csv produced by 'experiment'")->required();
    sl_cmd->add_option("--exponent", sl_exponent, "Sample-size exponent, 2 or 3")
        ->check(CLI::IsMember({2, 3}));

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        const mrpeval::Mrp mrp = mrpeval::load_mrp(solve_mrp_path);
        const mrpeval::ValueFunction theta = mrpeval::solve_value_function(mrp);
        json j;
        j["theta_star"] = theta;
        j["residual"] = mrpeval::linf_distance(theta, mrpeval::bellman_apply(mrp, theta));
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (cx_cmd->parsed()) {
        const mrpeval::Mrp mrp = mrpeval::load_mrp(cx_mrp_path);
        const mrpeval::ValueFunction theta_star = mrpeval::solve_value_function(mrp);
        mrpeval::ValueFunction theta = theta_star;
        if (!cx_theta_path.empty()) {
            theta = mrpeval::load_vector(cx_theta_path);
            if (theta.size() != mrp.dim())
                throw mrpeval::ValidationError("theta length does not match the MRP dimension");
        }
        const auto profile = mrpeval::complexity_profile(mrp, theta);
        const std::uint64_t seed = cx_seed_given ? cx_seed : default_seed();
        mrpeval::RandomSource rng(seed, mrpeval::make_stream_id(0, kPhaseGaussianMc));
        const auto risk = mrpeval::gaussian_linf_expectation(
            mrpeval::asymptotic_covariance(mrp, theta_star), cx_mc, rng);

        json j;
        j["nu"] = profile.nu;
        j["rho"] = profile.rho;
        j["b"] = profile.b;
        j["span"] = profile.span;
        j["sigma_sq"] = profile.sigma_sq;
        const double n0 = mrpeval::sample_threshold_n0(mrp, profile);
        if (std::isinf(n0))
            j["n0"] = "infinity";
        else
            j["n0"] = n0;
        j["n"] = cx_n;
        j["lower_bound"] = mrpeval::lower_bound_value(profile, mrp.discount, cx_n);
        j["linf_mean"] = risk.linf_mean;
        j["linf_stderr"] = risk.mc_stderr;
        j["mc_samples"] = risk.mc_samples;
        j["seed"] = seed;
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (ha_cmd->parsed()) {
        const mrpeval::Mrp mrp = mrpeval::load_mrp(ha_mrp_path);
        const auto alt = mrpeval::construct_hard_alternative(mrp, ha_n);
        mrpeval::Mrp perturbed = mrp;
        perturbed.transitions = alt.matrix;
        perturbed = mrpeval::validate(std::move(perturbed));

        json meta;
        meta["target_row"] = alt.target_row;
        meta["chi_square"] = alt.chi_square;
        meta["n"] = alt.sample_size;
        std::cerr << meta.dump() << '\n';

        if (ha_out_path == "-") {
            std::cout << mrpeval::mrp_to_json(perturbed).dump(2) << '\n';
        } else {
            mrpeval::save_mrp(perturbed, ha_out_path);
        }
        return 0;
    }

    if (ev_cmd->parsed()) {
        const mrpeval::Mrp mrp = mrpeval::load_mrp(ev_mrp_path);
        const mrpeval::ValueFunction theta_star = mrpeval::solve_value_function(mrp);
        const mrpeval::GenerativeModel model(mrp);
        const mrpeval::StepsizeChoice choice = parse_stepsize(ev_stepsize);
        const mrpeval::StepsizeSchedule schedule =
            mrpeval::resolve_stepsize(choice, mrp.discount);
        const std::uint64_t seed = ev_seed_given ? ev_seed : default_seed();
        const mrpeval::ValueFunction theta0(mrp.dim(), 0.0);
        std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);

        if (ev_algo == "vrpe") {
            const auto mode = ev_mode == "paper" ? mrpeval::BudgetMode::PaperConstants
                                                 : mrpeval::BudgetMode::Budgeted;
            const auto config =
                mrpeval::vrpe_parameters(ev_n, mrp.dim(), ev_delta, mrp.discount, schedule, mode);
            json echo;
            echo["algo"] = "vrpe";
            echo["n"] = ev_n;
            echo["epochs"] = config.epochs;
            echo["epoch_length"] = config.epoch_length;
            echo["recentering_sizes"] = config.recentering_sizes;
            echo["delta"] = config.delta;
            echo["mode"] = ev_mode;
            echo["stepsize"] = ev_stepsize;
            echo["seed"] = seed;
            std::cout << echo.dump() << '\n';
            std::cout << "trial,linf_error\n";
            for (std::uint64_t t = 0; t < ev_trials; ++t) {
                mrpeval::RandomSource rng(seed, mrpeval::make_stream_id(t, 0));
                mrpeval::ObservationStream stream(model, rng);
                const auto estimate = mrpeval::run_vrpe(stream, config, theta0);
                std::cout << t << ',' << mrpeval::linf_distance(estimate, theta_star) << '\n';
            }
        } else {
            std::cout << "trial,linf_iterate,linf_average\n";
            for (std::uint64_t t = 0; t < ev_trials; ++t) {
                mrpeval::RandomSource rng(seed, mrpeval::make_stream_id(t, 0));
                mrpeval::ObservationStream stream(model, rng);
                const auto traj = mrpeval::run_td(stream, schedule, ev_n, theta0);
                std::cout << t << ',' << mrpeval::linf_distance(traj.final_iterate, theta_star)
                          << ',' << mrpeval::linf_distance(traj.final_average, theta_star)
                          << '\n';
            }
        }
        return 0;
    }

    if (ex_cmd->parsed()) {
        mrpeval::ExperimentSpec spec;
        spec.lambda = ex_lambda;
        spec.gamma_grid = ex_gammas;
        spec.sample_exponent = ex_exponent;
        spec.algorithm =
            ex_algo == "td_pr" ? mrpeval::Algorithm::TdPr : mrpeval::Algorithm::Vrpe;
        spec.stepsize = parse_stepsize(ex_stepsize);
        spec.trials = ex_trials;
        spec.master_seed = ex_seed_given ? ex_seed : default_seed();
        spec.delta = ex_delta;
        spec.budget_mode = ex_mode == "paper" ? mrpeval::BudgetMode::PaperConstants
                                              : mrpeval::BudgetMode::Budgeted;
        spec.threads = ex_threads;

        const auto results = mrpeval::run_experiment(spec);
        const auto rows = mrpeval::summarize(results);
        const double ideal = mrpeval::ideal_slope(spec.lambda, spec.sample_exponent);

        std::optional<mrpeval::SlopeFit> fit;
        if (rows.size() >= 2) {
            std::vector<std::pair<double, double>> points;
            for (const auto& row : rows) points.emplace_back(row.ln_inv_gap, row.ln_mean_linf);
            fit = mrpeval::fit_slope(points);
        }
        mrpeval::emit_csv(results, fit ? &*fit : nullptr, &ideal, ex_out);

        json j;
        j["algo"] = mrpeval::algorithm_name(spec.algorithm);
        j["lambda"] = spec.lambda;
        j["exponent"] = spec.sample_exponent;
        j["trials"] = spec.trials;
        j["seed"] = spec.master_seed;
        j["out_dir"] = ex_out;
        if (fit) j["fit"] = slope_report(*fit, ideal);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (sl_cmd->parsed()) {
        std::ifstream in(sl_csv_path);
        if (!in) throw mrpeval::IoError("cannot open " + sl_csv_path);
        const auto results = mrpeval::read_trials_csv(in);
        const double lambda = results.front().lambda;
        for (const auto& r : results)
            if (r.lambda != lambda)
                throw mrpeval::ValidationError("slopes: trial rows mix lambda values");
        const auto rows = mrpeval::summarize(results);
        if (rows.size() < 2)
            throw mrpeval::ValidationError("slopes: need at least two gamma values");
        std::vector<std::pair<double, double>> points;
        for (const auto& row : rows) points.emplace_back(row.ln_inv_gap, row.ln_mean_linf);
        const auto fit = mrpeval::fit_slope(points);
        const double ideal = mrpeval::ideal_slope(lambda, sl_exponent);
        json j = slope_report(fit, ideal);
        j["lambda"] = lambda;
        j["exponent"] = sl_exponent;
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mrpeval::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const mrpeval::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
