#pragma once

#include "vqls/trainer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vqls::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kTrainingFailed = 3 };

struct SolveOptions {
    std::filesystem::path problem;
    Method method = Method::Direct;
    CostKind kind = CostKind::Global;
    double lr = 0.01;
    std::size_t steps = 50;
    std::optional<std::size_t> shots;
    std::size_t shots_final = 1000;
    std::uint64_t seed = 0;
    unsigned depth = 1;
    unsigned max_depth = 10;
    bool grow = true;
    std::filesystem::path output = ".";
    std::size_t seeds = 1;
};

/// Data behind one training run: the loss curve and the final
/// distribution next to the classical ground truth.
struct RunReport {
    nlohmann::json config;
    std::vector<double> losses;
    std::vector<std::size_t> growth_events;
    std::vector<double> final_probabilities;
    std::vector<double> exact_probabilities;
    std::optional<std::vector<double>> ground_truth;
    std::optional<double> total_variation;
    std::size_t circuit_count_total = 0;
    EvaluationBudget budget;
    unsigned final_depth = 0;
    std::vector<double> final_params;
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const;
};

/// 0.5 * sum |p_i - q_i|
double total_variation_distance(std::span<const double> p, std::span<const double> q);

/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// "step,loss" header plus one row per step, 17 significant digits.
std::string losses_csv(std::span<const double> losses);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

RunReport run_single(const LSEProblem &problem, const SolveOptions &options, std::uint64_t seed);

int run_solve(const SolveOptions &options, std::ostream &out, std::ostream &err);
int run_decompose(const std::filesystem::path &matrix_file, std::ostream &out, std::ostream &err);
int run_bench(const std::vector<unsigned> &ns, const std::vector<std::size_t> &ms, std::ostream &out);

/// Parses argv (solve | decompose | bench) and dispatches.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace vqls::cli
