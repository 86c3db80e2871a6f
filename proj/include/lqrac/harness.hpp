// Experiment harness: config/model file loading, CSV serialization of
// training logs, multi-T sweeps with slope regression, and the analytic
// verification suites behind the `check` subcommand.

#ifndef LQRAC_HARNESS_HPP
#define LQRAC_HARNESS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqrac/trainer.hpp"

namespace lqrac {

struct ExperimentSpec {
    LqrModel model;
    std::vector<int> t_list;
    int runs_per_t = 10;
    double stepsize_product = 4.0;  // alpha = beta = product / T
    SampleConfig sample;
    std::uint64_t seed = 0;

    void validate() const;
};

struct RunSummary {
    int T = 0;
    int run = 0;
    bool completed = false;
    std::string message;
    double final_critic_err_sq = 0;
    double final_actor_gap = 0;
    // Trajectory maxima of the monitored norms.
    double max_rho = 0;
    double max_norm_AmBK = 0;
    double max_norm_E = 0;
    double max_norm_K = 0;
    double max_norm_theta = 0;
};

struct SweepResult {
    std::vector<RunSummary> runs;  // row-major over (t_list index, run index)
    std::vector<int> t_values;     // T values with at least one completed run
    std::vector<int> completed_runs;
    std::vector<int> failed_runs;
    std::vector<double> mean_critic_err_sq;
    std::vector<double> std_critic_err_sq;
    std::vector<double> mean_actor_gap;
    std::vector<double> std_actor_gap;
    bool slope_available = false;
    double slope_critic = 0;
    double slope_actor = 0;
};

// --- file formats ------------------------------------------------------

LqrModel parse_model_json(const std::string& text);
LqrModel load_model(const std::string& path);

/// Training config (everything but the model). Missing optional fields keep
/// their defaults; T, alpha and beta are required.
TrainConfig parse_train_config_json(const std::string& text);
TrainConfig load_train_config(const std::string& path);

/// Experiment spec; "model" may be an inline object or a path resolved
/// relative to the spec file.
ExperimentSpec load_experiment(const std::string& path);

/// CSV columns: t, critic_err_sq, critic_err, actor_gap, lyapunov,
/// rho_closed_loop, norm_AmBK, norm_E, norm_K, norm_theta_F, alpha_eff,
/// beta_eff. Floats carry 17 significant digits. Aborted runs append a
/// trailing `status,...` row.
void write_train_csv(const std::string& path, const TrainResult& result);

std::string format_double(double v);  // %.17g

// --- sweep -------------------------------------------------------------

/// Executes runs_per_t x |t_list| runs with alpha = beta = product / T and
/// the configured warmup. Per-run CSVs land in out_dir (skipped when empty)
/// as run_T<T>_r<r>.csv. `on_run` fires after each run completes.
SweepResult run_sweep(const ExperimentSpec& spec, int threads, const std::string& out_dir,
                      const std::function<void(const RunSummary&)>& on_run = {});

void write_sweep_json(const std::string& path, const ExperimentSpec& spec,
                      const SweepResult& result);

/// Ordinary least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- verification ------------------------------------------------------

struct CheckItem {
    std::string name;
    bool pass = false;
    double residual = 0;  // worst value over the suite, in the suite's units
    std::string note;
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool all_pass = true;
};

/// Runs every analytic identity suite plus a reduced statistical
/// unbiasedness check against the given model.
CheckReport run_checks(const LqrModel& model, std::uint64_t seed);

// --- helpers shared by checks, tests and the acceptance suite ----------

/// Random gain with rho(A - BK) <= rho_cap, drawn as a perturbation of the
/// Riccati-optimal gain (rejection sampled).
Mat random_stable_gain(const LqrModel& model, RngStream& rng, double spread,
                       double rho_cap = 0.92);

Mat random_symmetric(Eigen::Index n, RngStream& rng, double scale = 1.0);

}  // namespace lqrac

#endif
