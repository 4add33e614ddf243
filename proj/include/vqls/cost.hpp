#pragma once

#include "vqls/ansatz.hpp"
#include "vqls/problem.hpp"

#include <functional>
#include <map>
#include <optional>

namespace vqls {

enum class CostKind { Global, Local };
enum class Method { Direct, Hadamard, Overlap, Coherent };

std::string to_string(CostKind kind);
std::string to_string(Method method);
Method parse_method(const std::string &name);

/// Invalid kind/method/mode combination.
class CostSpecError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// <psi|psi> estimate was not positive, i.e. A annihilates the ansatz state.
class DegenerateNormError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct CostSpec {
    CostKind kind = CostKind::Global;
    Method method = Method::Direct;
    /// nullopt means exact expectation values.
    std::optional<std::size_t> shots;

    /// Throws CostSpecError when the combination is not allowed for `problem`.
    void validate(const LSEProblem &problem) const;
    /// Same rules without a problem at hand; `matrix_mode` marks a raw-matrix system.
    void validate(bool matrix_mode) const;
};

/// Execution log for simulated circuits, used to check budgets and
/// register sizes against the closed forms.
class CircuitCounter {
  public:
    void record(unsigned width, bool imaginary);

    std::size_t total() const { return real_ + imag_; }
    std::size_t real_circuits() const { return real_; }
    std::size_t imaginary_circuits() const { return imag_; }
    unsigned max_width() const { return max_width_; }
    const std::map<unsigned, std::size_t> &by_width() const { return by_width_; }

    CircuitCounter &operator+=(const CircuitCounter &other);

  private:
    std::size_t real_ = 0;
    std::size_t imag_ = 0;
    unsigned max_width_ = 0;
    std::map<unsigned, std::size_t> by_width_;
};

/// Shot configuration for one estimator call.
struct Sampling {
    std::optional<std::size_t> shots;
    Rng *rng = nullptr;

    bool analytic() const { return !shots.has_value(); }
};

/// Everything an estimator needs for one parameter point.
class EstimatorContext {
  public:
    EstimatorContext(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                     Sampling sampling = {}, CircuitCounter *counter = nullptr);

    const LSEProblem &problem() const { return problem_; }
    const Ansatz &ansatz() const { return ansatz_; }
    const AnsatzParams &params() const { return params_; }
    const Sampling &sampling() const { return sampling_; }
    CircuitCounter *counter() const { return counter_; }
    void set_counter(CircuitCounter *counter) { counter_ = counter; }

    unsigned n_qubits() const { return problem_.n_qubits(); }
    /// V(theta) as a dense matrix, built once on first use.
    const Matrix &ansatz_unitary() const;
    /// Every mu_k is real for all parameters (real terms, real U_b, real V).
    bool amplitudes_real() const;

  private:
    const LSEProblem &problem_;
    const Ansatz &ansatz_;
    const AnsatzParams &params_;
    Sampling sampling_;
    CircuitCounter *counter_;
    mutable std::optional<Matrix> v_matrix_;
};

/// Prepares |phi> on the system wires of a larger register.
using Preparation = std::function<void(StateVector &, std::span<const unsigned>)>;
/// Applies W on the system wires, controlled on `control` being |1>.
using ControlledOperator = std::function<void(StateVector &, unsigned, std::span<const unsigned>)>;

/// One-ancilla interference circuit on n_system + 1 qubits estimating
/// Re<phi|W|phi>, or Im<phi|W|phi> when `imaginary` inserts S^dagger on the
/// ancilla before the closing Hadamard.
double hadamard_test(unsigned n_system, const Preparation &prep, const ControlledOperator &controlled_w,
                     bool imaginary, const Sampling &sampling, CircuitCounter *counter = nullptr);

/// Which parts of a complex term to measure.
enum class Parts { Real, Both };

/// beta_kl = <0|V^dagger A_l^dagger A_k V|0>. The diagonal is exactly 1 and costs nothing.
/// beta, delta and gamma measure k < l and return the conjugate for k > l.
cplx beta(const EstimatorContext &ctx, std::size_t k, std::size_t l, Parts parts = Parts::Both);

/// mu_k = <b|A_k V|0> through a Hadamard test on U_b^dagger A_k V.
cplx mu(const EstimatorContext &ctx, std::size_t k, Parts parts = Parts::Both);

/// delta_kl^(j) = <0|V^dagger A_l^dagger U_b Z_j U_b^dagger A_k V|0>.
cplx delta(const EstimatorContext &ctx, std::size_t k, std::size_t l, unsigned j, Parts parts = Parts::Both);

/// Hadamard-overlap test on 2n + 1 qubits estimating Re (or Im) of
/// gamma_kl = mu_k conj(mu_l) without controlled V or controlled U_b.
double overlap_test(const EstimatorContext &ctx, std::size_t k, std::size_t l, bool imaginary);
cplx gamma(const EstimatorContext &ctx, std::size_t k, std::size_t l, Parts parts = Parts::Both);

enum class NormMethod { Direct, Hadamard };

/// <psi|psi> with |psi> = A V|0>. The Hadamard route evaluates only the
/// strictly upper triangle of beta and skips Im(beta_kl) whenever
/// c_k conj(c_l) is real.
double norm_psi(const EstimatorContext &ctx, NormMethod method);

/// Estimate of |<b|psi>|^2.
double raw_global(const EstimatorContext &ctx, Method method);

/// Estimate of (1/n) sum_j <psi|U_b (|0><0|_j x I) U_b^dagger|psi>. The
/// Hadamard route needs <psi|psi>; pass a known estimate to reuse it,
/// otherwise it is measured here.
double raw_local(const EstimatorContext &ctx, Method method, std::optional<double> norm = std::nullopt);

struct CostValue {
    double value = 0.0;
    double numerator = 0.0;
    double norm = 0.0;
};

/// 1 - numerator / norm. The leading 1 is exact; only the ratio carries
/// estimator error.
CostValue compose_cost(double raw_numerator, double norm, CostKind kind);

struct EvaluationBudget {
    std::size_t norm_real = 0;
    std::size_t norm_imaginary = 0;
    std::size_t raw_real = 0;
    std::size_t raw_imaginary = 0;
    std::size_t circuits_norm = 0;
    std::size_t circuits_raw_cost = 0;
    unsigned norm_qubits = 0;
    /// Register width of the raw-cost circuits for the chosen method.
    unsigned qubits_required = 0;
    bool imaginary_doubling_applied = false;

    std::size_t total() const { return circuits_norm + circuits_raw_cost; }
    bool operator==(const EvaluationBudget &) const = default;
};

/// Closed-form circuit counts for one cost evaluation. `amplitudes_real`
/// states that every mu_k is real, which lets the global Hadamard route
/// skip its imaginary circuits.
EvaluationBudget count_evaluations(Method method, CostKind kind, unsigned n_qubits,
                                   std::span<const cplx> coefficients, bool amplitudes_real = false);

/// Base (real-part) counts only, as tabulated for m terms.
EvaluationBudget count_evaluations(Method method, CostKind kind, unsigned n_qubits, std::size_t m);

struct CostEvaluation {
    CostValue cost;
    CircuitCounter norm_circuits;
    CircuitCounter raw_circuits;
};

/// Full cost C = 1 - raw / <psi|psi> for one parameter point. The norm is
/// measured directly for the direct method and by Hadamard tests otherwise.
CostEvaluation evaluate_cost(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                             const CostSpec &spec, Rng *rng = nullptr);

/// Closed-form budget for `spec` on `problem` with `ansatz`.
EvaluationBudget expected_budget(const LSEProblem &problem, const Ansatz &ansatz, const CostSpec &spec);

/// Minimum qubit count for the raw-cost circuits of a method.
unsigned method_qubits(Method method, unsigned n_qubits, std::size_t m);

unsigned ceil_log2(std::size_t m);

} // namespace vqls
