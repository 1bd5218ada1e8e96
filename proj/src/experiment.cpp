#include "mrpeval/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "mrpeval/errors.hpp"

namespace mrpeval {

namespace {

constexpr std::uint64_t kPhaseAlgorithm = 0;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* context) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("csv: bad number in column ") + context);
    return v;
}

std::uint64_t parse_u64(std::string_view s, const char* context) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("csv: bad integer in column ") + context);
    return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

std::string algorithm_name(Algorithm algo) {
    return algo == Algorithm::TdPr ? "td_pr" : "vrpe";
}

StepsizeSchedule resolve_stepsize(const StepsizeChoice& choice, double gamma) {
    switch (choice.kind) {
    case StepsizeSchedule::Kind::Constant:
        return StepsizeSchedule::constant(
            choice.parameter ? *choice.parameter : 0.1 * (1.0 - gamma) * (1.0 - gamma));
    case StepsizeSchedule::Kind::Polynomial:
        return StepsizeSchedule::polynomial(choice.parameter ? *choice.parameter : 2.0 / 3.0);
    case StepsizeSchedule::Kind::RecenteredLinear:
        return StepsizeSchedule::recentered_linear(gamma);
    }
    throw ValidationError("resolve_stepsize: unknown stepsize kind");
}

double ideal_slope(double lambda, int sample_exponent) {
    if (sample_exponent == 2) return 0.5 - lambda;
    if (sample_exponent == 3) return -lambda;
    throw ValidationError("ideal_slope: exponent must be 2 or 3");
}

std::vector<TrialResult> run_experiment(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw ValidationError("experiment: trials must be >= 1");
    if (spec.gamma_grid.empty()) throw ValidationError("experiment: gamma grid is empty");
    for (std::size_t i = 0; i + 1 < spec.gamma_grid.size(); ++i)
        if (!(spec.gamma_grid[i] < spec.gamma_grid[i + 1]))
            throw ValidationError("experiment: gamma grid must be strictly increasing");
    if (spec.sample_exponent != 2 && spec.sample_exponent != 3)
        throw ValidationError("experiment: sample exponent must be 2 or 3");

    struct GammaContext {
        GenerativeModel model;
        ValueFunction theta_star;
        std::uint64_t sample_size;
        StepsizeSchedule schedule;
        VrpeConfig vrpe_config; // unused for TD runs
    };
    std::vector<GammaContext> contexts;
    contexts.reserve(spec.gamma_grid.size());
    for (double gamma : spec.gamma_grid) {
        Mrp mrp = two_state_family(gamma, spec.lambda);
        ValueFunction theta_star = solve_value_function(mrp);
        const std::uint64_t n = sample_size_rule(gamma, spec.sample_exponent);
        StepsizeSchedule schedule = resolve_stepsize(spec.stepsize, gamma);
        VrpeConfig config;
        if (spec.algorithm == Algorithm::Vrpe)
            config = vrpe_parameters(n, mrp.dim(), spec.delta, gamma, schedule, spec.budget_mode);
        contexts.push_back(GammaContext{GenerativeModel(std::move(mrp)), std::move(theta_star), n,
                                        schedule, std::move(config)});
    }

    const std::size_t total_tasks = spec.gamma_grid.size() * spec.trials;
    std::vector<TrialResult> results(total_tasks);
    std::vector<std::string> failures(total_tasks);
    std::atomic<std::size_t> next_task{0};
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= total_tasks) return;
            const std::size_t gamma_index = task / spec.trials;
            const std::uint64_t trial = task % spec.trials;
            const GammaContext& ctx = contexts[gamma_index];
            const std::uint64_t global_trial =
                static_cast<std::uint64_t>(gamma_index) * spec.trials + trial;
            const std::uint64_t stream_id = make_stream_id(global_trial, kPhaseAlgorithm);
            try {
                RandomSource rng(spec.master_seed, stream_id);
                ObservationStream stream(ctx.model, rng);
                const ValueFunction theta0(ctx.model.dim(), 0.0);
                ValueFunction estimate;
                if (spec.algorithm == Algorithm::TdPr) {
                    estimate = run_td(stream, ctx.schedule, ctx.sample_size, theta0).final_average;
                } else {
                    estimate = run_vrpe(stream, ctx.vrpe_config, theta0);
                }
                TrialResult& out = results[task];
                out.gamma = spec.gamma_grid[gamma_index];
                out.lambda = spec.lambda;
                out.sample_size = ctx.sample_size;
                out.algo = algorithm_name(spec.algorithm);
                out.trial = trial;
                out.linf_error = linf_distance(estimate, ctx.theta_star);
                out.master_seed = spec.master_seed;
                out.stream_id = stream_id;
            } catch (const std::exception& e) {
                failures[task] = "gamma=" + format_double(spec.gamma_grid[gamma_index]) +
                                 ", trial=" + std::to_string(trial) + ": " + e.what();
                failed.store(true);
            }
        }
    };

    unsigned thread_count = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
    if (thread_count == 0) thread_count = 1;
    thread_count = static_cast<unsigned>(
        std::min<std::size_t>(thread_count, total_tasks));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    if (failed.load()) {
        for (const std::string& msg : failures)
            if (!msg.empty()) throw ValidationError("experiment: " + msg);
    }
    return results;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw ValidationError("fit_slope: need at least two points");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(points.size());
    mean_y /= static_cast<double>(points.size());

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if (sxx == 0.0) throw ValidationError("fit_slope: x values are degenerate");

    SlopeFit fit;
    fit.points = points;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;

    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double resid = y - (fit.intercept + fit.slope * x);
        ss_res += resid * resid;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : std::max(0.0, std::min(1.0, 1.0 - ss_res / syy));
    if (points.size() > 2)
        fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(points.size() - 2) / sxx);
    return fit;
}

std::vector<GammaSummary> summarize(const std::vector<TrialResult>& results) {
    if (results.empty()) throw ValidationError("summarize: no results");
    std::map<double, std::vector<const TrialResult*>> groups;
    for (const TrialResult& r : results) groups[r.gamma].push_back(&r);

    std::vector<GammaSummary> rows;
    rows.reserve(groups.size());
    for (const auto& [gamma, group] : groups) {
        GammaSummary row;
        row.gamma = gamma;
        row.lambda = group.front()->lambda;
        row.sample_size = group.front()->sample_size;
        row.algo = group.front()->algo;
        row.trials = group.size();

        double mean = 0.0;
        for (const TrialResult* r : group) mean += r->linf_error;
        mean /= static_cast<double>(group.size());
        double var = 0.0;
        for (const TrialResult* r : group)
            var += (r->linf_error - mean) * (r->linf_error - mean);
        row.mean_linf = mean;
        row.stderr_linf = group.size() > 1
                              ? std::sqrt(var / static_cast<double>(group.size() - 1) /
                                          static_cast<double>(group.size()))
                              : 0.0;
        row.ln_inv_gap = std::log(1.0 / (1.0 - gamma));
        row.ln_mean_linf = std::log(mean);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results) {
    if (results.empty()) throw ValidationError("write_trials_csv: no results");
    out << kTrialCsvHeader << '\n';
    for (const TrialResult& r : results) {
        out << format_double(r.gamma) << ',' << format_double(r.lambda) << ',' << r.sample_size
            << ',' << r.algo << ',' << r.trial << ',' << format_double(r.linf_error) << ','
            << r.master_seed << ',' << r.stream_id << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<GammaSummary>& rows,
                       const SlopeFit* fit, const double* ideal) {
    if (rows.empty()) throw ValidationError("write_summary_csv: no rows");
    out << kSummaryCsvHeader << '\n';
    for (const GammaSummary& row : rows) {
        out << format_double(row.gamma) << ',' << format_double(row.lambda) << ','
            << row.sample_size << ',' << row.algo << ',' << format_double(row.mean_linf) << ','
            << format_double(row.stderr_linf) << ',' << format_double(row.ln_inv_gap) << ','
            << format_double(row.ln_mean_linf) << '\n';
    }
    out << "# fit: slope_hat,intercept,r_squared,slope_ideal,abs_slope_gap\n";
    out << "# fit: ";
    if (fit != nullptr) {
        out << format_double(fit->slope) << ',' << format_double(fit->intercept) << ','
            << format_double(fit->r_squared);
    } else {
        out << ",,";
    }
    out << ',';
    if (ideal != nullptr) out << format_double(*ideal);
    out << ',';
    if (fit != nullptr && ideal != nullptr) out << format_double(std::fabs(fit->slope - *ideal));
    out << '\n';
}

void emit_csv(const std::vector<TrialResult>& results, const SlopeFit* fit, const double* ideal,
              const std::filesystem::path& out_dir) {
    if (results.empty()) throw ValidationError("emit_csv: no results");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir.string());

    const auto trials_path = out_dir / "trials.csv";
    std::ofstream trials(trials_path);
    if (!trials) throw IoError("cannot write " + trials_path.string());
    write_trials_csv(trials, results);
    if (!trials.flush()) throw IoError("write failed for " + trials_path.string());

    const auto summary_path = out_dir / "summary.csv";
    std::ofstream summary(summary_path);
    if (!summary) throw IoError("cannot write " + summary_path.string());
    write_summary_csv(summary, summarize(results), fit, ideal);
    if (!summary.flush()) throw IoError("write failed for " + summary_path.string());
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrialCsvHeader)
        throw ValidationError("csv: missing or unexpected trial header");
    std::vector<TrialResult> results;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) throw ValidationError("csv: expected 8 fields per trial row");
        TrialResult r;
        r.gamma = parse_double(fields[0], "gamma");
        r.lambda = parse_double(fields[1], "lambda");
        r.sample_size = parse_u64(fields[2], "n");
        r.algo = std::string(fields[3]);
        r.trial = parse_u64(fields[4], "trial");
        r.linf_error = parse_double(fields[5], "linf_error");
        r.master_seed = parse_u64(fields[6], "master_seed");
        r.stream_id = parse_u64(fields[7], "stream_id");
        results.push_back(std::move(r));
    }
    if (results.empty()) throw ValidationError("csv: no trial rows");
    return results;
}

} // namespace mrpeval
