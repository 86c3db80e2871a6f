#include "lqrac/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lqrac/errors.hpp"

namespace lqrac {

namespace {

using nlohmann::json;

Mat mat_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ModelParseError(std::string(name) + " must be a nested array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Mat M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ModelParseError(std::string(name) + " rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ModelParseError(std::string(name) + " entries must be numbers");
            M(i, c) = j[i][c].get<double>();
        }
    }
    if (!all_finite(M)) throw ModelParseError(std::string(name) + " entries must be finite");
    return M;
}

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

LqrModel model_from_json(const json& j) {
    LqrModel model;
    for (const char* field : {"A", "B", "Q", "R", "D_xi", "sigma"})
        if (!j.contains(field))
            throw ModelParseError(std::string("model file missing field ") + field);
    model.A = mat_from_json(j.at("A"), "A");
    model.B = mat_from_json(j.at("B"), "B");
    model.Q = mat_from_json(j.at("Q"), "Q");
    model.R = mat_from_json(j.at("R"), "R");
    model.D_xi = mat_from_json(j.at("D_xi"), "D_xi");
    if (!j.at("sigma").is_number()) throw ModelParseError("sigma must be a number");
    model.sigma = j.at("sigma").get<double>();
    model.validate();
    return model;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelParseError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

void apply_sample_fields(const json& j, SampleConfig* sample) {
    if (j.contains("N")) sample->N = j.at("N").get<int>();
    if (j.contains("N0")) sample->N0 = j.at("N0").get<int>();
    if (j.contains("N1")) sample->N1 = j.at("N1").get<int>();
}

}  // namespace

void ExperimentSpec::validate() const {
    if (t_list.empty()) throw ModelParseError("t_list must be non-empty");
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        if (t_list[i] <= 0) throw ModelParseError("t_list entries must be positive");
        if (i > 0 && t_list[i] <= t_list[i - 1])
            throw ModelParseError("t_list must be strictly increasing");
    }
    if (runs_per_t < 1) throw ModelParseError("runs_per_t must be at least 1");
    if (!(stepsize_product > 0)) throw ModelParseError("stepsize_product must be positive");
}

LqrModel parse_model_json(const std::string& text) {
    try {
        return model_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ModelParseError(std::string("invalid model JSON: ") + e.what());
    }
}

LqrModel load_model(const std::string& path) { return model_from_json(parse_file(path)); }

TrainConfig parse_train_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelParseError(std::string("invalid config JSON: ") + e.what());
    }
    TrainConfig cfg;
    for (const char* field : {"T", "alpha", "beta"})
        if (!j.contains(field))
            throw ModelParseError(std::string("train config missing field ") + field);
    cfg.T = j.at("T").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.beta = j.at("beta").get<double>();
    if (j.contains("warmup_factor")) cfg.warmup_factor = j.at("warmup_factor").get<double>();
    if (j.contains("warmup_fraction")) cfg.warmup_fraction = j.at("warmup_fraction").get<double>();
    if (j.contains("guard_rho")) cfg.guard_rho = j.at("guard_rho").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    apply_sample_fields(j, &cfg.sample);
    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_train_config_json(buf.str());
}

ExperimentSpec load_experiment(const std::string& path) {
    const json j = parse_file(path);
    ExperimentSpec spec;
    if (!j.contains("model")) throw ModelParseError("experiment file missing field model");
    if (j.at("model").is_string()) {
        const auto model_path =
            std::filesystem::path(path).parent_path() / j.at("model").get<std::string>();
        spec.model = load_model(model_path.string());
    } else {
        spec.model = model_from_json(j.at("model"));
    }
    if (!j.contains("t_list")) throw ModelParseError("experiment file missing field t_list");
    spec.t_list = j.at("t_list").get<std::vector<int>>();
    if (j.contains("runs_per_t")) spec.runs_per_t = j.at("runs_per_t").get<int>();
    if (j.contains("stepsize_product"))
        spec.stepsize_product = j.at("stepsize_product").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    apply_sample_fields(j, &spec.sample);
    spec.validate();
    return spec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_train_csv(const std::string& path, const TrainResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "t,critic_err_sq,critic_err,actor_gap,lyapunov,rho_closed_loop,"
           "norm_AmBK,norm_E,norm_K,norm_theta_F,alpha_eff,beta_eff\n";
    for (const IterateLog& row : result.iterates) {
        out << row.t << ',' << format_double(row.critic_err_sq) << ','
            << format_double(row.critic_err) << ',' << format_double(row.actor_gap) << ','
            << format_double(row.lyapunov) << ',' << format_double(row.rho_closed_loop) << ','
            << format_double(row.norm_AmBK) << ',' << format_double(row.norm_E) << ','
            << format_double(row.norm_K) << ',' << format_double(row.norm_theta_F) << ','
            << format_double(row.alpha_eff) << ',' << format_double(row.beta_eff) << '\n';
    }
    if (result.status == TrainStatus::kAssumptionViolated)
        out << "status,assumption_violated," << result.fail_iteration << ',' << result.message
            << '\n';
    else if (result.status == TrainStatus::kStateBlowup)
        out << "status,state_blowup," << result.fail_iteration << ',' << result.message << '\n';
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_slope: degenerate abscissa");
    return sxy / sxx;
}

SweepResult run_sweep(const ExperimentSpec& spec, int threads, const std::string& out_dir,
                      const std::function<void(const RunSummary&)>& on_run) {
    spec.validate();
    spec.model.validate();
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    const int n_t = static_cast<int>(spec.t_list.size());
    const int total = n_t * spec.runs_per_t;
    SweepResult result;
    result.runs.resize(total);

    std::mutex mu;
    int next_job = 0;

    auto worker = [&]() {
        const EnvHandle env = make_env(spec.model);
        for (;;) {
            int job;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next_job >= total) return;
                job = next_job++;
            }
            const int ti = job / spec.runs_per_t;
            const int r = job % spec.runs_per_t;
            const int T = spec.t_list[ti];

            TrainConfig cfg;
            cfg.T = T;
            cfg.alpha = cfg.beta = spec.stepsize_product / T;
            cfg.sample = spec.sample;
            cfg.seed = spec.seed;
            cfg.run = static_cast<std::uint64_t>(job);

            RunSummary summary;
            summary.T = T;
            summary.run = r;
            try {
                const TrainResult res = train(env, spec.model, cfg);
                summary.completed = res.ok() && !res.iterates.empty();
                summary.message = res.message;
                for (const IterateLog& row : res.iterates) {
                    summary.max_rho = std::max(summary.max_rho, row.rho_closed_loop);
                    summary.max_norm_AmBK = std::max(summary.max_norm_AmBK, row.norm_AmBK);
                    summary.max_norm_E = std::max(summary.max_norm_E, row.norm_E);
                    summary.max_norm_K = std::max(summary.max_norm_K, row.norm_K);
                    summary.max_norm_theta = std::max(summary.max_norm_theta, row.norm_theta_F);
                }
                if (summary.completed) {
                    summary.final_critic_err_sq = res.iterates.back().critic_err_sq;
                    summary.final_actor_gap = res.iterates.back().actor_gap;
                }
                if (!out_dir.empty()) {
                    const auto csv = std::filesystem::path(out_dir) /
                                     ("run_T" + std::to_string(T) + "_r" + std::to_string(r) +
                                      ".csv");
                    write_train_csv(csv.string(), res);
                }
            } catch (const std::exception& e) {
                summary.completed = false;
                summary.message = e.what();
            }
            {
                std::lock_guard<std::mutex> lock(mu);
                result.runs[job] = summary;
                if (on_run) on_run(summary);
            }
        }
    };

    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Aggregate per T over completed runs, in run order.
    std::vector<double> log2_t, log2_critic, log2_actor;
    for (int ti = 0; ti < n_t; ++ti) {
        double sum_c = 0, sum_a = 0;
        int n_done = 0, n_fail = 0;
        for (int r = 0; r < spec.runs_per_t; ++r) {
            const RunSummary& s = result.runs[ti * spec.runs_per_t + r];
            if (s.completed) {
                sum_c += s.final_critic_err_sq;
                sum_a += s.final_actor_gap;
                ++n_done;
            } else {
                ++n_fail;
            }
        }
        if (n_done == 0) continue;
        const double mean_c = sum_c / n_done;
        const double mean_a = sum_a / n_done;
        double var_c = 0, var_a = 0;
        for (int r = 0; r < spec.runs_per_t; ++r) {
            const RunSummary& s = result.runs[ti * spec.runs_per_t + r];
            if (!s.completed) continue;
            var_c += (s.final_critic_err_sq - mean_c) * (s.final_critic_err_sq - mean_c);
            var_a += (s.final_actor_gap - mean_a) * (s.final_actor_gap - mean_a);
        }
        result.t_values.push_back(spec.t_list[ti]);
        result.completed_runs.push_back(n_done);
        result.failed_runs.push_back(n_fail);
        result.mean_critic_err_sq.push_back(mean_c);
        result.mean_actor_gap.push_back(mean_a);
        result.std_critic_err_sq.push_back(n_done > 1 ? std::sqrt(var_c / (n_done - 1)) : 0.0);
        result.std_actor_gap.push_back(n_done > 1 ? std::sqrt(var_a / (n_done - 1)) : 0.0);
        log2_t.push_back(std::log2(static_cast<double>(spec.t_list[ti])));
        log2_critic.push_back(std::log2(mean_c));
        log2_actor.push_back(std::log2(mean_a));
    }

    result.slope_available = log2_t.size() >= 2;
    if (result.slope_available) {
        result.slope_critic = fit_slope(log2_t, log2_critic);
        result.slope_actor = fit_slope(log2_t, log2_actor);
    }
    return result;
}

void write_sweep_json(const std::string& path, const ExperimentSpec& spec,
                      const SweepResult& result) {
    json j;
    j["t_list"] = spec.t_list;
    j["runs_per_t"] = spec.runs_per_t;
    j["stepsize_product"] = spec.stepsize_product;
    j["seed"] = spec.seed;
    j["sample"] = {{"N", spec.sample.N}, {"N0", spec.sample.N0}, {"N1", spec.sample.N1}};
    j["model"] = {{"A", mat_to_json(spec.model.A)},   {"B", mat_to_json(spec.model.B)},
                  {"Q", mat_to_json(spec.model.Q)},   {"R", mat_to_json(spec.model.R)},
                  {"D_xi", mat_to_json(spec.model.D_xi)}, {"sigma", spec.model.sigma}};

    json per_t = json::array();
    for (std::size_t i = 0; i < result.t_values.size(); ++i) {
        per_t.push_back({{"T", result.t_values[i]},
                         {"completed", result.completed_runs[i]},
                         {"failed", result.failed_runs[i]},
                         {"mean_critic_err_sq", result.mean_critic_err_sq[i]},
                         {"std_critic_err_sq", result.std_critic_err_sq[i]},
                         {"mean_actor_gap", result.mean_actor_gap[i]},
                         {"std_actor_gap", result.std_actor_gap[i]}});
    }
    j["per_t"] = per_t;

    json runs = json::array();
    for (const RunSummary& s : result.runs) {
        runs.push_back({{"T", s.T},
                        {"run", s.run},
                        {"completed", s.completed},
                        {"message", s.message},
                        {"final_critic_err_sq", s.final_critic_err_sq},
                        {"final_actor_gap", s.final_actor_gap},
                        {"max_rho", s.max_rho},
                        {"max_norm_AmBK", s.max_norm_AmBK},
                        {"max_norm_E", s.max_norm_E},
                        {"max_norm_K", s.max_norm_K},
                        {"max_norm_theta", s.max_norm_theta}});
    }
    j["runs"] = runs;

    j["slope_available"] = result.slope_available;
    if (result.slope_available) {
        j["slope_critic"] = result.slope_critic;
        j["slope_actor"] = result.slope_actor;
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

Mat random_symmetric(Eigen::Index n, RngStream& rng, double scale) {
    Mat M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = scale * rng.next_gaussian();
    return symmetrize(M);
}

Mat random_stable_gain(const LqrModel& model, RngStream& rng, double spread, double rho_cap) {
    const Mat K_star = solve_riccati(model).K;
    double s = spread;
    for (int attempt = 0; attempt < 2000; ++attempt) {
        Mat K = K_star;
        for (Eigen::Index i = 0; i < K.rows(); ++i)
            for (Eigen::Index j = 0; j < K.cols(); ++j) K(i, j) += s * rng.next_gaussian();
        if (spectral_radius(closed_loop(model, K)) <= rho_cap) return K;
        if (attempt % 100 == 99) s *= 0.5;
    }
    return K_star;
}

}  // namespace lqrac
