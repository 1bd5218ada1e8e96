#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrpeval/td.hpp"
#include "mrpeval/vrpe.hpp"

// Monte Carlo experiment orchestration over the two-state family: gamma
// grids, trial fan-out, log-log slope regression against the predicted
// exponents, and CSV emission.

namespace mrpeval {

enum class Algorithm { TdPr, Vrpe };

std::string algorithm_name(Algorithm algo);

/// Stepsize intent that may depend on the grid point: the recentered-linear
/// rate always uses the current discount, and an omitted constant parameter
/// defaults to 0.1 (1 - gamma)^2.
struct StepsizeChoice {
    StepsizeSchedule::Kind kind = StepsizeSchedule::Kind::RecenteredLinear;
    std::optional<double> parameter; // alpha for constant, omega for polynomial
};

StepsizeSchedule resolve_stepsize(const StepsizeChoice& choice, double gamma);

struct ExperimentSpec {
    double lambda = 1.0;
    std::vector<double> gamma_grid; // strictly increasing, all in (1/4, 1)
    int sample_exponent = 3;        // 2 or 3
    Algorithm algorithm = Algorithm::Vrpe;
    StepsizeChoice stepsize;
    std::uint64_t trials = 200;
    std::uint64_t master_seed = 0;
    double delta = 0.1;             // vrpe only
    BudgetMode budget_mode = BudgetMode::Budgeted; // vrpe only
    unsigned threads = 0;           // 0 = hardware concurrency
};

struct TrialResult {
    double gamma = 0.0;
    double lambda = 0.0;
    std::uint64_t sample_size = 0;
    std::string algo;
    std::uint64_t trial = 0;
    double linf_error = 0.0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    std::vector<std::pair<double, double>> points;
};

struct GammaSummary {
    double gamma = 0.0;
    double lambda = 0.0;
    std::uint64_t sample_size = 0;
    std::string algo;
    std::uint64_t trials = 0;
    double mean_linf = 0.0;
    double stderr_linf = 0.0;
    double ln_inv_gap = 0.0;   // ln(1 / (1 - gamma))
    double ln_mean_linf = 0.0; // ln(mean_linf)
};

/// Predicted log-log slope of the error against 1/(1-gamma):
/// 1/2 - lambda when n ~ (1-gamma)^-2, and -lambda when n ~ (1-gamma)^-3.
double ideal_slope(double lambda, int sample_exponent);

/// Runs trials for every gamma on the grid. One stream per (gamma, trial)
/// pair, so results are identical regardless of thread count or completion
/// order. Errors are measured in the sup norm against the exact value
/// function; TD reports the averaged iterate's error.
std::vector<TrialResult> run_experiment(const ExperimentSpec& spec);

/// Exact ordinary least squares. Requires at least two distinct x values.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

/// Per-gamma mean and standard error, ordered by gamma.
std::vector<GammaSummary> summarize(const std::vector<TrialResult>& results);

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results);
/// Data rows under the fixed header, then the fit as trailing comment lines
/// (empty-marked when no fit was possible).
void write_summary_csv(std::ostream& out, const std::vector<GammaSummary>& rows,
                       const SlopeFit* fit, const double* ideal);
/// Writes trials.csv and summary.csv into the directory; byte-stable for
/// identical inputs.
void emit_csv(const std::vector<TrialResult>& results, const SlopeFit* fit, const double* ideal,
              const std::filesystem::path& out_dir);

std::vector<TrialResult> read_trials_csv(std::istream& in);

inline constexpr char kTrialCsvHeader[] =
    "gamma,lambda,n,algo,trial,linf_error,master_seed,stream_id";
inline constexpr char kSummaryCsvHeader[] =
    "gamma,lambda,n,algo,mean_linf,stderr,ln_inv_gap,ln_mean_linf";

} // namespace mrpeval
