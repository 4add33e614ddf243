#pragma once

#include "vqls/ansatz.hpp"
#include "vqls/cost.hpp"
#include "vqls/problem.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace vqls {

enum class GradientMode { ParameterShift, FiniteDifference };

struct TrainConfig {
    std::size_t steps = 50;
    double learning_rate = 0.01;
    CostSpec cost;
    GrowthPolicy growth;
    unsigned initial_depth = 1;
    std::uint64_t seed = 0;
    std::optional<double> abort_loss;
    GradientMode gradient_mode = GradientMode::ParameterShift;
    double finite_difference_step = 1e-5;
    /// Shots for sampling the final state; nullopt keeps exact probabilities.
    std::optional<std::size_t> final_shots;

    void validate() const;
};

/// Training failed with a non-finite loss.
class TrainingDivergedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TrainingTrace {
    std::vector<double> losses;
    std::vector<std::size_t> growth_events;
    AnsatzParams final_params;
    std::vector<double> final_probabilities;
    /// Exact |amplitude|^2 of the final ansatz state regardless of sampling.
    std::vector<double> exact_probabilities;
    Vector final_amplitudes;
    std::size_t circuit_count_total = 0;
};

/// dC/dtheta for the composed cost. Numerator and norm are each
/// trigonometric of degree one in every angle, so the +-pi/2 shift rule is
/// applied to them separately and combined with the quotient rule.
/// Finite-difference mode takes central differences of C itself.
std::vector<double> gradient(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                             const CostSpec &spec, GradientMode mode = GradientMode::ParameterShift,
                             double step = 1e-5, Rng *rng = nullptr, CircuitCounter *counter = nullptr);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t t = 0;
    std::vector<double> m;
    std::vector<double> v;

    /// Appends zero moments for newly added parameters.
    void resize(std::size_t n);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::vector<double> &params, std::span<const double> gradient, AdamState &state, double lr);

/// Windowed stagnation test on the losses recorded since `since`: the best
/// of the last `window` losses improves on the best of the `window` before
/// it by less than threshold * |previous best|.
bool stagnated(std::span<const double> losses, std::size_t since, unsigned window, double threshold);

TrainingTrace solve(const LSEProblem &problem, const TrainConfig &config);
TrainingTrace solve(const LSEProblem &problem, const TrainConfig &config, std::shared_ptr<const Ansatz> ansatz);

/// Library front end:
///   VarLSESolver({"III","XZI","XII"}, b, {1.0, 0.2, 0.2}, options).solve()
class VarLSESolver {
  public:
    struct Options {
        Method method = Method::Direct;
        bool local = false;
        double lr = 0.01;
        std::size_t steps = 50;
        std::optional<std::size_t> shots;
        std::optional<std::size_t> final_shots;
        std::uint64_t seed = 0;
        unsigned depth = 1;
        GrowthPolicy growth;
        std::optional<double> abort_loss;
    };

    VarLSESolver(const std::vector<std::string> &pauli_terms, const Vector &b, const std::vector<cplx> &coeffs,
                 Options options);
    VarLSESolver(const std::vector<Matrix> &unitaries, const Vector &b, const std::vector<cplx> &coeffs,
                 Options options);
    VarLSESolver(const Matrix &a, const Vector &b, Options options);

    const LSEProblem &problem() const { return problem_; }
    TrainConfig config() const;
    void set_ansatz(std::shared_ptr<const Ansatz> ansatz) { ansatz_ = std::move(ansatz); }

    /// Solution probabilities (sampled when final shots are set) and the trace.
    std::pair<std::vector<double>, TrainingTrace> solve() const;

  private:
    LSEProblem problem_;
    Options options_;
    std::shared_ptr<const Ansatz> ansatz_;
};

} // namespace vqls
