#include "vqls/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vqls {

namespace {

bool is_real(cplx z) { return z.imag() == 0.0; }

bool pair_is_real(const std::vector<cplx> &c, std::size_t k, std::size_t l) {
    return is_real(c[k] * std::conj(c[l]));
}

std::vector<unsigned> wire_range(unsigned first, unsigned count) {
    std::vector<unsigned> w(count);
    std::iota(w.begin(), w.end(), first);
    return w;
}

/// Turns an exact +/-1 expectation into an estimate from `shots` draws.
double estimate_pm1(double expectation, const Sampling &sampling) {
    if (sampling.analytic()) {
        return expectation;
    }
    if (sampling.rng == nullptr) {
        throw std::invalid_argument("shot-based estimation needs a random generator");
    }
    const double p_plus = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
    std::binomial_distribution<std::size_t> dist(*sampling.shots, p_plus);
    const auto plus = static_cast<double>(dist(*sampling.rng));
    return 2.0 * plus / static_cast<double>(*sampling.shots) - 1.0;
}

double estimate_probability(double p, const Sampling &sampling) {
    if (sampling.analytic()) {
        return p;
    }
    if (sampling.rng == nullptr) {
        throw std::invalid_argument("shot-based estimation needs a random generator");
    }
    std::binomial_distribution<std::size_t> dist(*sampling.shots, std::clamp(p, 0.0, 1.0));
    return static_cast<double>(dist(*sampling.rng)) / static_cast<double>(*sampling.shots);
}

void record(CircuitCounter *counter, unsigned width, bool imaginary) {
    if (counter != nullptr) {
        counter->record(width, imaginary);
    }
}

void controlled(StateVector &s, const Matrix &op, unsigned control, std::span<const unsigned> wires) {
    const unsigned ctrl[1] = {control};
    const int one[1] = {1};
    apply_controlled(s, op, wires, ctrl, one);
}

void check_index(const EstimatorContext &ctx, std::size_t k) {
    if (k >= ctx.problem().term_count()) {
        throw std::out_of_range("term index " + std::to_string(k) + " out of range for " +
                                std::to_string(ctx.problem().term_count()) + " terms");
    }
}

void require_terms(const EstimatorContext &ctx, const char *what) {
    if (ctx.problem().mode() == InputMode::Matrix) {
        throw CostSpecError(std::string(what) + " needs a unitary decomposition; matrix mode supports direct only");
    }
}

/// |psi> = A V|0> on the bare system register.
StateVector evolve_psi(const EstimatorContext &ctx) {
    StateVector s = ctx.ansatz().prepare(ctx.params());
    return apply_matrix(s, assemble_matrix(ctx.problem()));
}

/// sum_k |c_k|^2 t_kk + 2 sum_{k<l} Re(c_k conj(c_l) t_kl) for a Hermitian
/// family t, measuring Im(t_kl) only where the coefficient product is complex.
template <typename Term>
double hermitian_double_sum(const std::vector<cplx> &c, bool diagonal_is_one, Term &&term) {
    double total = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double w = std::norm(c[k]);
        total += diagonal_is_one ? w : w * term(k, k, Parts::Real).real();
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
        for (std::size_t l = k + 1; l < c.size(); ++l) {
            const cplx ckl = c[k] * std::conj(c[l]);
            const Parts parts = is_real(ckl) ? Parts::Real : Parts::Both;
            total += 2.0 * (ckl * term(k, l, parts)).real();
        }
    }
    return total;
}

} // namespace

std::string to_string(CostKind kind) { return kind == CostKind::Global ? "global" : "local"; }

std::string to_string(Method method) {
    switch (method) {
    case Method::Direct: return "direct";
    case Method::Hadamard: return "hadamard";
    case Method::Overlap: return "overlap";
    case Method::Coherent: return "coherent";
    }
    return "?";
}

Method parse_method(const std::string &name) {
    if (name == "direct") return Method::Direct;
    if (name == "hadamard") return Method::Hadamard;
    if (name == "overlap") return Method::Overlap;
    if (name == "coherent") return Method::Coherent;
    throw CostSpecError("unknown method '" + name + "'");
}

void CostSpec::validate(bool matrix_mode) const {
    if (kind == CostKind::Local && method == Method::Overlap) {
        throw CostSpecError("overlap supports global cost only");
    }
    if (kind == CostKind::Local && method == Method::Coherent) {
        throw CostSpecError("coherent supports global cost only");
    }
    if (matrix_mode && method != Method::Direct) {
        throw CostSpecError("a raw system matrix supports the direct method only");
    }
    if (shots && *shots == 0) {
        throw CostSpecError("shot count must be positive");
    }
    if (shots && method == Method::Direct) {
        throw CostSpecError("direct evaluation is exact; use hadamard, overlap or coherent for shot-based costs");
    }
}

void CostSpec::validate(const LSEProblem &problem) const { validate(problem.mode() == InputMode::Matrix); }

void CircuitCounter::record(unsigned width, bool imaginary) {
    (imaginary ? imag_ : real_) += 1;
    max_width_ = std::max(max_width_, width);
    ++by_width_[width];
}

CircuitCounter &CircuitCounter::operator+=(const CircuitCounter &other) {
    real_ += other.real_;
    imag_ += other.imag_;
    max_width_ = std::max(max_width_, other.max_width_);
    for (const auto &[w, c] : other.by_width_) {
        by_width_[w] += c;
    }
    return *this;
}

EstimatorContext::EstimatorContext(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                                   Sampling sampling, CircuitCounter *counter)
    : problem_(problem), ansatz_(ansatz), params_(params), sampling_(sampling), counter_(counter) {
    if (ansatz.n_qubits() != problem.n_qubits()) {
        throw DimensionError("ansatz register differs from the problem size");
    }
}

const Matrix &EstimatorContext::ansatz_unitary() const {
    if (!v_matrix_) {
        v_matrix_ = ansatz_.unitary(params_);
    }
    return *v_matrix_;
}

bool EstimatorContext::amplitudes_real() const {
    const Matrix &ub = problem_.rhs().preparation_unitary();
    return problem_.mode() != InputMode::Matrix && problem_.terms_real() &&
           ub.imag().cwiseAbs().maxCoeff() == 0.0 && ansatz_.real_valued();
}

double hadamard_test(unsigned n_system, const Preparation &prep, const ControlledOperator &controlled_w,
                     bool imaginary, const Sampling &sampling, CircuitCounter *counter) {
    const unsigned width = n_system + 1;
    StateVector s = init_zero(width);
    const auto system = wire_range(1, n_system);
    const unsigned ancilla[1] = {0};
    if (prep) {
        prep(s, system);
    }
    apply_gate(s, Gate{GateKind::H}, ancilla);
    controlled_w(s, 0, system);
    if (imaginary) {
        apply_gate(s, Gate{GateKind::Sdg}, ancilla);
    }
    apply_gate(s, Gate{GateKind::H}, ancilla);
    const int zero[1] = {0};
    const double p0 = marginal_probability(s, ancilla, zero);
    record(counter, width, imaginary);
    return estimate_pm1(2.0 * p0 - 1.0, sampling);
}

cplx beta(const EstimatorContext &ctx, std::size_t k, std::size_t l, Parts parts) {
    require_terms(ctx, "beta");
    check_index(ctx, k);
    check_index(ctx, l);
    if (k == l) {
        return {1.0, 0.0};
    }
    if (k > l) {
        return std::conj(beta(ctx, l, k, parts));
    }
    const auto &terms = ctx.problem().terms();
    const Matrix &ak = terms[k].matrix;
    const Matrix al_dag = terms[l].matrix.adjoint();
    const Preparation prep = [&](StateVector &s, std::span<const unsigned> w) { ctx.ansatz().apply(ctx.params(), s, w); };
    const ControlledOperator w = [&](StateVector &s, unsigned c, std::span<const unsigned> sys) {
        controlled(s, ak, c, sys);
        controlled(s, al_dag, c, sys);
    };
    const unsigned n = ctx.n_qubits();
    const double re = hadamard_test(n, prep, w, false, ctx.sampling(), ctx.counter());
    const double im = parts == Parts::Both ? hadamard_test(n, prep, w, true, ctx.sampling(), ctx.counter()) : 0.0;
    return {re, im};
}

cplx mu(const EstimatorContext &ctx, std::size_t k, Parts parts) {
    require_terms(ctx, "mu");
    check_index(ctx, k);
    const Matrix &v = ctx.ansatz_unitary();
    const Matrix &ak = ctx.problem().terms()[k].matrix;
    const Matrix ub_dag = ctx.problem().rhs().preparation_unitary().adjoint();
    const ControlledOperator w = [&](StateVector &s, unsigned c, std::span<const unsigned> sys) {
        controlled(s, v, c, sys);
        controlled(s, ak, c, sys);
        controlled(s, ub_dag, c, sys);
    };
    const unsigned n = ctx.n_qubits();
    const double re = hadamard_test(n, nullptr, w, false, ctx.sampling(), ctx.counter());
    const double im = parts == Parts::Both ? hadamard_test(n, nullptr, w, true, ctx.sampling(), ctx.counter()) : 0.0;
    return {re, im};
}

cplx delta(const EstimatorContext &ctx, std::size_t k, std::size_t l, unsigned j, Parts parts) {
    require_terms(ctx, "delta");
    check_index(ctx, k);
    check_index(ctx, l);
    const unsigned n = ctx.n_qubits();
    if (j >= n) {
        throw std::out_of_range("qubit index " + std::to_string(j) + " out of range");
    }
    if (k > l) {
        return std::conj(delta(ctx, l, k, j, parts));
    }
    const auto &terms = ctx.problem().terms();
    const Matrix &ak = terms[k].matrix;
    const Matrix al_dag = terms[l].matrix.adjoint();
    const Matrix &ub = ctx.problem().rhs().preparation_unitary();
    const Matrix ub_dag = ub.adjoint();
    const Matrix z = gate_matrix(Gate{GateKind::Z});
    const Preparation prep = [&](StateVector &s, std::span<const unsigned> w) { ctx.ansatz().apply(ctx.params(), s, w); };
    // U_b and U_b^dagger cancel on the ancilla-|0> branch, so only Z_j is controlled.
    const ControlledOperator w = [&](StateVector &s, unsigned c, std::span<const unsigned> sys) {
        controlled(s, ak, c, sys);
        apply_operator(s, ub_dag, sys);
        const unsigned zj[1] = {sys[j]};
        controlled(s, z, c, zj);
        apply_operator(s, ub, sys);
        controlled(s, al_dag, c, sys);
    };
    const double re = hadamard_test(n, prep, w, false, ctx.sampling(), ctx.counter());
    const double im = parts == Parts::Both ? hadamard_test(n, prep, w, true, ctx.sampling(), ctx.counter()) : 0.0;
    return {re, im};
}

double overlap_test(const EstimatorContext &ctx, std::size_t k, std::size_t l, bool imaginary) {
    require_terms(ctx, "overlap test");
    check_index(ctx, k);
    check_index(ctx, l);
    const unsigned n = ctx.n_qubits();
    const unsigned width = 2 * n + 1;
    const auto reg1 = wire_range(1, n);
    const auto reg2 = wire_range(n + 1, n);
    const unsigned ancilla[1] = {0};
    const int one[1] = {1};
    const int zero[1] = {0};
    const auto &terms = ctx.problem().terms();

    // ancilla | V|0> | U_b|0>; A_k on the |1> branch, A_l on the |0> branch.
    StateVector s = init_zero(width);
    ctx.ansatz().apply(ctx.params(), s, reg1);
    apply_operator(s, ctx.problem().rhs().preparation_unitary(), reg2);
    apply_gate(s, Gate{GateKind::H}, ancilla);
    apply_controlled(s, terms[k].matrix, reg1, ancilla, one);
    apply_controlled(s, terms[l].matrix, reg1, ancilla, zero);
    if (imaginary) {
        apply_gate(s, Gate{GateKind::Sdg}, ancilla);
    }
    apply_gate(s, Gate{GateKind::H}, ancilla);

    // Transversal Bell-basis measurement: the SWAP eigenvalue of each pair is
    // (-1)^(a AND b) after CNOT(a -> b), H(a).
    for (unsigned i = 0; i < n; ++i) {
        const unsigned pair[2] = {reg1[i], reg2[i]};
        apply_gate(s, Gate{GateKind::CNOT}, pair);
        const unsigned a[1] = {reg1[i]};
        apply_gate(s, Gate{GateKind::H}, a);
    }

    const std::size_t anc_bit = std::size_t{1} << (width - 1);
    double expectation = 0.0;
    for (std::size_t x = 0; x < s.dim(); ++x) {
        const double p = std::norm(s[x]);
        if (p == 0.0) {
            continue;
        }
        int parity = (x & anc_bit) ? 1 : 0;
        for (unsigned i = 0; i < n; ++i) {
            const bool a = (x >> (width - 1 - reg1[i])) & 1U;
            const bool b = (x >> (width - 1 - reg2[i])) & 1U;
            parity ^= static_cast<int>(a && b);
        }
        expectation += parity ? -p : p;
    }
    record(ctx.counter(), width, imaginary);
    return estimate_pm1(expectation, ctx.sampling());
}

cplx gamma(const EstimatorContext &ctx, std::size_t k, std::size_t l, Parts parts) {
    if (k > l) {
        return std::conj(gamma(ctx, l, k, parts));
    }
    const double re = overlap_test(ctx, k, l, false);
    // gamma_kk = |mu_k|^2 is real
    const double im = parts == Parts::Both && k != l ? overlap_test(ctx, k, l, true) : 0.0;
    return {re, im};
}

double norm_psi(const EstimatorContext &ctx, NormMethod method) {
    if (method == NormMethod::Direct) {
        const StateVector psi = evolve_psi(ctx);
        record(ctx.counter(), ctx.n_qubits(), false);
        return psi.squared_norm();
    }
    require_terms(ctx, "Hadamard norm estimation");
    return hermitian_double_sum(ctx.problem().coefficients(), true,
                                [&](std::size_t k, std::size_t l, Parts p) { return beta(ctx, k, l, p); });
}

namespace {

double coherent_global(const EstimatorContext &ctx) {
    const auto &terms = ctx.problem().terms();
    const std::size_t m = terms.size();
    const unsigned n = ctx.n_qubits();
    const unsigned r = ceil_log2(m);
    const unsigned width = n + r;

    double l1 = 0.0;
    for (const auto &t : terms) {
        l1 += std::abs(t.coefficient);
    }
    if (l1 == 0.0) {
        record(ctx.counter(), width, false);
        return 0.0;
    }

    const auto ancillas = wire_range(0, r);
    const auto system = wire_range(r, n);
    StateVector s = init_zero(width);
    Matrix prep_dag;
    if (r > 0) {
        Vector weights = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << r));
        for (std::size_t k = 0; k < m; ++k) {
            weights[static_cast<Eigen::Index>(k)] = std::sqrt(std::abs(terms[k].coefficient) / l1);
        }
        const Matrix prep = complete_unitary(weights);
        prep_dag = prep.adjoint();
        apply_operator(s, prep, ancillas);
    }
    ctx.ansatz().apply(ctx.params(), s, system);
    for (std::size_t k = 0; k < m; ++k) {
        const cplx c = terms[k].coefficient;
        const cplx phase = std::abs(c) > 0.0 ? c / std::abs(c) : cplx{1.0, 0.0};
        std::vector<int> pattern(r);
        for (unsigned b = 0; b < r; ++b) {
            pattern[b] = static_cast<int>((k >> (r - 1 - b)) & 1U);
        }
        apply_controlled(s, phase * terms[k].matrix, system, ancillas, pattern);
    }
    apply_operator(s, ctx.problem().rhs().preparation_unitary().adjoint(), system);
    if (r > 0) {
        apply_operator(s, prep_dag, ancillas);
    }
    const double p0 = std::norm(s[0]);
    record(ctx.counter(), width, false);
    return l1 * l1 * estimate_probability(p0, ctx.sampling());
}

} // namespace

double raw_global(const EstimatorContext &ctx, Method method) {
    switch (method) {
    case Method::Direct: {
        const StateVector psi = evolve_psi(ctx);
        const StateVector b = ctx.problem().rhs().prepare();
        record(ctx.counter(), ctx.n_qubits(), false);
        return std::norm(inner_product(b, psi));
    }
    case Method::Hadamard: {
        require_terms(ctx, "Hadamard global cost");
        const Parts parts = ctx.amplitudes_real() ? Parts::Real : Parts::Both;
        cplx overlap{0.0, 0.0};
        const auto &terms = ctx.problem().terms();
        for (std::size_t k = 0; k < terms.size(); ++k) {
            overlap += terms[k].coefficient * mu(ctx, k, parts);
        }
        return std::norm(overlap);
    }
    case Method::Overlap:
        require_terms(ctx, "Hadamard-overlap global cost");
        return hermitian_double_sum(ctx.problem().coefficients(), false,
                                    [&](std::size_t k, std::size_t l, Parts p) { return gamma(ctx, k, l, p); });
    case Method::Coherent:
        require_terms(ctx, "coherent global cost");
        return coherent_global(ctx);
    }
    return 0.0;
}

double raw_local(const EstimatorContext &ctx, Method method, std::optional<double> norm) {
    const unsigned n = ctx.n_qubits();
    switch (method) {
    case Method::Direct: {
        const StateVector psi = evolve_psi(ctx);
        const StateVector rotated = apply_matrix(psi, ctx.problem().rhs().preparation_unitary().adjoint());
        record(ctx.counter(), n, false);
        double total = 0.0;
        for (std::size_t x = 0; x < rotated.dim(); ++x) {
            const double p = std::norm(rotated[x]);
            for (unsigned j = 0; j < n; ++j) {
                if (((x >> (n - 1 - j)) & 1U) == 0) {
                    total += p;
                }
            }
        }
        return total / static_cast<double>(n);
    }
    case Method::Hadamard: {
        require_terms(ctx, "Hadamard local cost");
        const double psi_norm = norm ? *norm : norm_psi(ctx, NormMethod::Hadamard);
        const auto c = ctx.problem().coefficients();
        double z_sum = 0.0;
        for (unsigned j = 0; j < n; ++j) {
            z_sum += hermitian_double_sum(c, false,
                                          [&](std::size_t k, std::size_t l, Parts p) { return delta(ctx, k, l, j, p); });
        }
        // |0><0|_j = (I + Z_j) / 2
        return 0.5 * psi_norm + z_sum / (2.0 * n);
    }
    case Method::Overlap:
    case Method::Coherent:
        throw CostSpecError(to_string(method) + " supports global cost only");
    }
    return 0.0;
}

CostValue compose_cost(double raw_numerator, double norm, CostKind) {
    if (!(norm > 0.0)) {
        throw DegenerateNormError("norm estimate <psi|psi> = " + std::to_string(norm) +
                                  " is not positive; A annihilates the ansatz state");
    }
    return {1.0 - raw_numerator / norm, raw_numerator, norm};
}

unsigned ceil_log2(std::size_t m) {
    unsigned r = 0;
    while ((std::size_t{1} << r) < m) {
        ++r;
    }
    return r;
}

unsigned method_qubits(Method method, unsigned n_qubits, std::size_t m) {
    switch (method) {
    case Method::Direct: return n_qubits;
    case Method::Hadamard: return n_qubits + 1;
    case Method::Overlap: return 2 * n_qubits + 1;
    case Method::Coherent: return n_qubits + ceil_log2(m);
    }
    return n_qubits;
}

EvaluationBudget count_evaluations(Method method, CostKind kind, unsigned n_qubits, std::span<const cplx> coefficients,
                                   bool amplitudes_real) {
    CostSpec{kind, method, std::nullopt}.validate(false);
    const std::size_t m = coefficients.size();
    const std::vector<cplx> c(coefficients.begin(), coefficients.end());
    std::size_t complex_pairs = 0;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k + 1; l < m; ++l) {
            complex_pairs += pair_is_real(c, k, l) ? 0 : 1;
        }
    }

    EvaluationBudget b;
    if (method == Method::Direct) {
        b.norm_real = 1;
        b.norm_qubits = n_qubits;
    } else {
        b.norm_real = (m * m - m) / 2;
        b.norm_imaginary = complex_pairs;
        b.norm_qubits = n_qubits + 1;
    }
    switch (method) {
    case Method::Direct:
        b.raw_real = 1;
        break;
    case Method::Hadamard:
        if (kind == CostKind::Global) {
            b.raw_real = m;
            b.raw_imaginary = amplitudes_real ? 0 : m;
        } else {
            b.raw_real = n_qubits * (m * m + m) / 2;
            b.raw_imaginary = n_qubits * complex_pairs;
        }
        break;
    case Method::Overlap:
        b.raw_real = (m * m + m) / 2;
        b.raw_imaginary = complex_pairs;
        break;
    case Method::Coherent:
        b.raw_real = 1;
        break;
    }
    b.qubits_required = method_qubits(method, n_qubits, m);
    b.circuits_norm = b.norm_real + b.norm_imaginary;
    b.circuits_raw_cost = b.raw_real + b.raw_imaginary;
    b.imaginary_doubling_applied = b.norm_imaginary + b.raw_imaginary > 0;
    return b;
}

EvaluationBudget count_evaluations(Method method, CostKind kind, unsigned n_qubits, std::size_t m) {
    const std::vector<cplx> ones(m, cplx{1.0, 0.0});
    return count_evaluations(method, kind, n_qubits, ones, true);
}

EvaluationBudget expected_budget(const LSEProblem &problem, const Ansatz &ansatz, const CostSpec &spec) {
    spec.validate(problem);
    if (problem.mode() == InputMode::Matrix) {
        EvaluationBudget b;
        b.norm_real = b.raw_real = b.circuits_norm = b.circuits_raw_cost = 1;
        b.norm_qubits = b.qubits_required = problem.n_qubits();
        return b;
    }
    const AnsatzParams unused{ansatz.n_qubits(), 0, {}};
    const EstimatorContext ctx(problem, ansatz, unused);
    const auto c = problem.coefficients();
    return count_evaluations(spec.method, spec.kind, problem.n_qubits(), c, ctx.amplitudes_real());
}

CostEvaluation evaluate_cost(const LSEProblem &problem, const Ansatz &ansatz, const AnsatzParams &params,
                             const CostSpec &spec, Rng *rng) {
    spec.validate(problem);
    CostEvaluation out;
    EstimatorContext ctx(problem, ansatz, params, Sampling{spec.shots, rng}, &out.norm_circuits);
    const double norm = norm_psi(ctx, spec.method == Method::Direct ? NormMethod::Direct : NormMethod::Hadamard);
    ctx.set_counter(&out.raw_circuits);
    const double numerator =
        spec.kind == CostKind::Global ? raw_global(ctx, spec.method) : raw_local(ctx, spec.method, norm);
    out.cost = compose_cost(numerator, norm, spec.kind);
    return out;
}

} // namespace vqls
