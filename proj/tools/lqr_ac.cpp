// Command-line entry point. Subcommands:
//   check  — run the analytic verification suites against a model file
//   solve  — print the Riccati solution and optimal cost
//   train  — one training run, iterate log written as CSV
//   sweep  — multi-T experiment with slope regression
//
// Exit codes: 0 success, 1 verification failure, 2 parse/config error,
// 3 runtime abort (destabilized policy or diverged trajectory).

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "lqrac/errors.hpp"
#include "lqrac/harness.hpp"

namespace {

using namespace lqrac;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitParseError = 2;
constexpr int kExitRuntimeAbort = 3;

void print_matrix(const char* name, const Mat& M) {
    std::cout << name << " =\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        std::cout << "  ";
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            std::cout << format_double(M(i, j)) << (j + 1 < M.cols() ? " " : "");
        std::cout << '\n';
    }
}

int cmd_check(const std::string& model_path, std::uint64_t seed) {
    const LqrModel model = load_model(model_path);
    const CheckReport report = run_checks(model, seed);
    for (const CheckItem& item : report.items) {
        std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.name
                  << "  residual=" << format_double(item.residual);
        if (!item.note.empty()) std::cout << "  (" << item.note << ")";
        std::cout << '\n';
    }
    std::cout << (report.all_pass ? "all checks passed" : "CHECKS FAILED") << '\n';
    return report.all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_solve(const std::string& model_path) {
    const LqrModel model = load_model(model_path);
    const RiccatiSolution sol = solve_riccati(model);
    const StationaryOps ops = stationary_operators(model, sol.K);
    print_matrix("P*", sol.P);
    print_matrix("K*", sol.K);
    std::cout << "J(K*) = " << format_double(ops.J) << '\n';
    std::cout << "rho(A - BK*) = " << format_double(ops.rho) << '\n';
    std::cout << "Riccati residual = " << format_double(sol.residual) << " ("
              << sol.iterations << " iterations)\n";
    std::cout << "|G_K*|_F = " << format_double(natural_gradient(model, sol.K).norm()) << '\n';
    return kExitOk;
}

int cmd_train(const std::string& model_path, const std::string& config_path,
              const std::string& out_path, std::optional<std::uint64_t> seed_override) {
    const LqrModel model = load_model(model_path);
    TrainConfig cfg = load_train_config(config_path);
    if (seed_override) cfg.seed = *seed_override;

    const EnvHandle env = make_env(model);
    const TrainResult result = train(env, model, cfg);
    write_train_csv(out_path, result);

    if (!result.ok()) {
        std::cerr << "run aborted at iteration " << result.fail_iteration << ": "
                  << result.message << '\n';
        std::cerr << "partial log written to " << out_path << '\n';
        return kExitRuntimeAbort;
    }
    const IterateLog& last = result.iterates.empty() ? IterateLog{} : result.iterates.back();
    std::cout << "completed " << cfg.T << " iterations; final critic_err_sq = "
              << format_double(last.critic_err_sq)
              << ", actor_gap = " << format_double(last.actor_gap) << '\n';
    std::cout << "log written to " << out_path << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override, int threads) {
    ExperimentSpec spec = load_experiment(config_path);
    if (seed_override) spec.seed = *seed_override;

    int done = 0;
    const int total = static_cast<int>(spec.t_list.size()) * spec.runs_per_t;
    const SweepResult result =
        run_sweep(spec, threads, out_dir, [&](const RunSummary& s) {
            ++done;
            std::cout << "[" << done << "/" << total << "] T=" << s.T << " run=" << s.run
                      << (s.completed ? " final critic_err_sq=" +
                                            format_double(s.final_critic_err_sq) +
                                            " actor_gap=" + format_double(s.final_actor_gap)
                                      : " FAILED: " + s.message)
                      << '\n';
        });

    write_sweep_json(out_dir + "/summary.json", spec, result);
    std::cout << "summary written to " << out_dir << "/summary.json\n";

    bool any_failed = false;
    for (const RunSummary& s : result.runs) any_failed = any_failed || !s.completed;
    if (result.slope_available)
        std::cout << "slope_critic = " << format_double(result.slope_critic)
                  << ", slope_actor = " << format_double(result.slope_actor) << '\n';
    else
        std::cout << "slope unavailable (need completed runs at two or more T values)\n";
    if (any_failed) {
        std::cerr << "some runs aborted; see summary.json\n";
        return kExitRuntimeAbort;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-timescale actor-critic for the stochastic LQR"};
    app.require_subcommand(1);

    std::string model_path, config_path, out_path;
    std::optional<std::uint64_t> seed_override;
    std::uint64_t check_seed = 0;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    auto* check = app.add_subcommand("check", "run analytic verification suites");
    check->add_option("--model", model_path, "model JSON file")->required();
    check->add_option("--seed", check_seed, "seed for randomized checks");

    auto* solve = app.add_subcommand("solve", "print the Riccati solution");
    solve->add_option("--model", model_path, "model JSON file")->required();

    auto* train_cmd = app.add_subcommand("train", "single training run -> CSV");
    train_cmd->add_option("--model", model_path, "model JSON file")->required();
    train_cmd->add_option("--config", config_path, "train config JSON file")->required();
    train_cmd->add_option("--out", out_path, "output CSV path")->required();
    train_cmd->add_option("--seed", seed_override, "override config seed");

    auto* sweep = app.add_subcommand("sweep", "multi-T sweep -> summary + per-run CSVs");
    sweep->add_option("--config", config_path, "experiment JSON file")->required();
    sweep->add_option("--out", out_path, "output directory")->required();
    sweep->add_option("--seed", seed_override, "override experiment seed");
    sweep->add_option("--threads", threads, "parallel runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(model_path, check_seed);
        if (solve->parsed()) return cmd_solve(model_path);
        if (train_cmd->parsed()) return cmd_train(model_path, config_path, out_path, seed_override);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path, seed_override, threads);
    } catch (const ModelParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const AssumptionViolated& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeAbort;
    } catch (const StateBlowup& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeAbort;
    } catch (const UnstableGain& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    }
    return kExitOk;
}
