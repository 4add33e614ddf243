#include "vqls/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vqls {

namespace {

struct Point {
    double numerator;
    double norm;
};

Point evaluate_point(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                     const CostSpec &spec, Rng *rng, CircuitCounter *counter) {
    const CostEvaluation e = evaluate_cost(problem, ansatz, params, spec, rng);
    if (counter != nullptr) {
        *counter += e.norm_circuits;
        *counter += e.raw_circuits;
    }
    return {e.cost.numerator, e.cost.norm};
}

double cost_at(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params, const CostSpec &spec,
               Rng *rng, CircuitCounter *counter) {
    const Point p = evaluate_point(problem, ansatz, params, spec, rng, counter);
    return compose_cost(p.numerator, p.norm, spec.kind).value;
}

} // namespace

void TrainConfig::validate() const {
    if (steps < 1) {
        throw std::invalid_argument("steps must be at least 1");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (gradient_mode == GradientMode::FiniteDifference && !(finite_difference_step > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    if (final_shots && *final_shots == 0) {
        throw std::invalid_argument("final shot count must be positive");
    }
    growth.validate(initial_depth);
}

std::vector<double> gradient(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                             const CostSpec &spec, GradientMode mode, double step, Rng *rng,
                             CircuitCounter *counter) {
    std::vector<double> grad(params.size(), 0.0);
    AnsatzParams shifted = params;

    if (mode == GradientMode::FiniteDifference) {
        for (std::size_t p = 0; p < params.size(); ++p) {
            shifted.angles[p] = params.angles[p] + step;
            const double plus = cost_at(problem, ansatz, shifted, spec, rng, counter);
            shifted.angles[p] = params.angles[p] - step;
            const double minus = cost_at(problem, ansatz, shifted, spec, rng, counter);
            shifted.angles[p] = params.angles[p];
            grad[p] = (plus - minus) / (2.0 * step);
        }
        return grad;
    }

    constexpr double kShift = std::numbers::pi / 2.0;
    const Point base = evaluate_point(problem, ansatz, params, spec, rng, counter);
    if (!(base.norm > 0.0)) {
        compose_cost(base.numerator, base.norm, spec.kind);
    }
    for (std::size_t p = 0; p < params.size(); ++p) {
        shifted.angles[p] = params.angles[p] + kShift;
        const Point plus = evaluate_point(problem, ansatz, shifted, spec, rng, counter);
        shifted.angles[p] = params.angles[p] - kShift;
        const Point minus = evaluate_point(problem, ansatz, shifted, spec, rng, counter);
        shifted.angles[p] = params.angles[p];
        const double d_num = (plus.numerator - minus.numerator) / 2.0;
        const double d_norm = (plus.norm - minus.norm) / 2.0;
        // C = 1 - N / D
        grad[p] = -(d_num * base.norm - base.numerator * d_norm) / (base.norm * base.norm);
    }
    return grad;
}

void AdamState::resize(std::size_t n) {
    m.resize(n, 0.0);
    v.resize(n, 0.0);
}

void adam_step(std::vector<double> &params, std::span<const double> gradient, AdamState &state, double lr) {
    if (gradient.size() != params.size()) {
        throw std::invalid_argument("gradient length differs from parameter count");
    }
    state.resize(params.size());
    state.t += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = gradient[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

bool stagnated(std::span<const double> losses, std::size_t since, unsigned window, double threshold) {
    if (since > losses.size() || window == 0) {
        return false;
    }
    const std::size_t count = losses.size() - since;
    if (count < 2 * static_cast<std::size_t>(window)) {
        return false;
    }
    const auto end = losses.end();
    const double recent = *std::min_element(end - window, end);
    const double previous = *std::min_element(end - 2 * window, end - window);
    return previous - recent < threshold * std::abs(previous);
}

TrainingTrace solve(const LSEProblem &problem, const TrainConfig &config) {
    return solve(problem, config, std::make_shared<LayeredAnsatz>(problem.n_qubits()));
}

TrainingTrace solve(const LSEProblem &problem, const TrainConfig &config, std::shared_ptr<const Ansatz> ansatz) {
    config.validate();
    config.cost.validate(problem);
    if (!ansatz || ansatz->n_qubits() != problem.n_qubits()) {
        throw DimensionError("ansatz register differs from the problem size");
    }

    Rng rng(config.seed);
    AnsatzParams params = ansatz->initial(config.initial_depth, rng);
    AdamState adam;
    adam.resize(params.size());

    TrainingTrace trace;
    CircuitCounter circuits;
    std::size_t window_start = 0;
    bool may_grow = config.growth.enabled;

    for (std::size_t step = 0; step < config.steps; ++step) {
        const double loss = cost_at(problem, *ansatz, params, config.cost, &rng, &circuits);
        if (!std::isfinite(loss)) {
            throw TrainingDivergedError("loss became non-finite at step " + std::to_string(step));
        }
        trace.losses.push_back(loss);
        if (config.abort_loss && loss <= *config.abort_loss) {
            break;
        }
        if (step + 1 == config.steps) {
            break;
        }
        if (may_grow && stagnated(trace.losses, window_start, config.growth.window, config.growth.threshold)) {
            if (auto grown = ansatz->grow(params, config.growth.max_depth, rng)) {
                params = std::move(*grown);
                adam.resize(params.size());
                trace.growth_events.push_back(step);
                window_start = trace.losses.size();
            } else {
                may_grow = false;
            }
        }
        const auto grad = gradient(problem, *ansatz, params, config.cost, config.gradient_mode,
                                   config.finite_difference_step, &rng, &circuits);
        adam_step(params.angles, grad, adam, config.learning_rate);
    }

    const StateVector final_state = ansatz->prepare(params);
    trace.exact_probabilities = probabilities(final_state);
    trace.final_amplitudes = final_state.amplitudes();
    if (config.final_shots) {
        trace.final_probabilities = frequencies(sample(final_state, *config.final_shots, rng), final_state.dim());
    } else {
        trace.final_probabilities = trace.exact_probabilities;
    }
    trace.final_params = std::move(params);
    trace.circuit_count_total = circuits.total();
    return trace;
}

namespace {

RightHandSide rhs_from(const Vector &b) { return RightHandSide::from_vector(b); }

} // namespace

VarLSESolver::VarLSESolver(const std::vector<std::string> &pauli_terms, const Vector &b,
                           const std::vector<cplx> &coeffs, Options options)
    : problem_([&] {
          if (pauli_terms.size() != coeffs.size()) {
              throw ProblemError("one coefficient per term is required");
          }
          std::vector<PauliTerm> terms;
          for (std::size_t k = 0; k < pauli_terms.size(); ++k) {
              terms.push_back({pauli_terms[k], coeffs[k]});
          }
          return make_pauli_problem(terms, rhs_from(b));
      }()),
      options_(std::move(options)) {}

VarLSESolver::VarLSESolver(const std::vector<Matrix> &unitaries, const Vector &b, const std::vector<cplx> &coeffs,
                           Options options)
    : problem_([&] {
          if (unitaries.size() != coeffs.size()) {
              throw ProblemError("one coefficient per term is required");
          }
          std::vector<std::pair<Matrix, cplx>> terms;
          for (std::size_t k = 0; k < unitaries.size(); ++k) {
              terms.emplace_back(unitaries[k], coeffs[k]);
          }
          return make_unitary_problem(terms, rhs_from(b));
      }()),
      options_(std::move(options)) {}

VarLSESolver::VarLSESolver(const Matrix &a, const Vector &b, Options options)
    : problem_(make_matrix_problem(a, rhs_from(b))), options_(std::move(options)) {}

TrainConfig VarLSESolver::config() const {
    TrainConfig c;
    c.steps = options_.steps;
    c.learning_rate = options_.lr;
    c.cost = CostSpec{options_.local ? CostKind::Local : CostKind::Global, options_.method, options_.shots};
    c.growth = options_.growth;
    c.initial_depth = options_.depth;
    c.seed = options_.seed;
    c.abort_loss = options_.abort_loss;
    c.final_shots = options_.final_shots;
    return c;
}

std::pair<std::vector<double>, TrainingTrace> VarLSESolver::solve() const {
    TrainingTrace trace = ansatz_ ? vqls::solve(problem_, config(), ansatz_) : vqls::solve(problem_, config());
    std::vector<double> solution = trace.final_probabilities;
    return {std::move(solution), std::move(trace)};
}

} // namespace vqls
