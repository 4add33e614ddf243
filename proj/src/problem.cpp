#include "vqls/problem.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace vqls {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kMinReciprocalCondition = 1e-12;

bool matrix_is_real(const Matrix &m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

unsigned register_size(const Matrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw ProblemError(std::string(what) + " must be square");
    }
    if (!is_power_of_two(static_cast<std::size_t>(m.rows())) || m.rows() < 2) {
        throw ProblemError(std::string(what) + " dimension " + std::to_string(m.rows()) +
                           " is not a power of two");
    }
    return log2_exact(static_cast<std::size_t>(m.rows()));
}

} // namespace

std::string to_string(InputMode mode) {
    switch (mode) {
    case InputMode::Circuit: return "circuit";
    case InputMode::Unitary: return "unitary";
    case InputMode::Pauli: return "pauli";
    case InputMode::Matrix: return "matrix";
    }
    return "?";
}

InputMode parse_input_mode(const std::string &name) {
    if (name == "circuit") return InputMode::Circuit;
    if (name == "unitary") return InputMode::Unitary;
    if (name == "pauli") return InputMode::Pauli;
    if (name == "matrix") return InputMode::Matrix;
    throw ProblemError("unknown mode '" + name + "'");
}

PauliString::PauliString(std::string label) : label_(std::move(label)) {
    if (label_.empty()) {
        throw ProblemError("empty Pauli label");
    }
    for (char c : label_) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw ProblemError("invalid Pauli character '" + std::string(1, c) + "' in \"" + label_ + "\"");
        }
    }
}

Matrix PauliString::matrix() const {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : label_) {
        const GateKind kind = c == 'X' ? GateKind::X : c == 'Y' ? GateKind::Y : c == 'Z' ? GateKind::Z : GateKind::I;
        const Matrix p = gate_matrix(Gate{kind});
        Matrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c2 = 0; c2 < m.cols(); ++c2) {
                next.block(2 * r, 2 * c2, 2, 2) = m(r, c2) * p;
            }
        }
        m = std::move(next);
    }
    return m;
}

Circuit PauliString::circuit() const {
    Circuit out;
    for (unsigned q = 0; q < n_qubits(); ++q) {
        switch (label_[q]) {
        case 'X': out.push_back({Gate{GateKind::X}, {q}}); break;
        case 'Y': out.push_back({Gate{GateKind::Y}, {q}}); break;
        case 'Z': out.push_back({Gate{GateKind::Z}, {q}}); break;
        default: break;
        }
    }
    return out;
}

PauliString parse_pauli(const std::string &label) { return PauliString(label); }

bool UnitaryTerm::is_real() const { return matrix_is_real(matrix); }

RightHandSide RightHandSide::from_vector(Vector b) {
    if (!is_power_of_two(static_cast<std::size_t>(b.size())) || b.size() < 2) {
        throw ProblemError("right-hand side length " + std::to_string(b.size()) + " is not a power of two");
    }
    const double norm = b.norm();
    if (!(norm > 0.0)) {
        throw ProblemError("right-hand side is the zero vector");
    }
    RightHandSide rhs;
    rhs.n_qubits_ = log2_exact(static_cast<std::size_t>(b.size()));
    rhs.renormalized_ = std::abs(norm - 1.0) > 1e-10;
    rhs.unitary_ = complete_unitary(b / norm);
    return rhs;
}

RightHandSide RightHandSide::from_circuit(Circuit circuit, unsigned n_qubits) {
    if (n_qubits == 0) {
        throw ProblemError("right-hand side circuit needs at least one qubit");
    }
    RightHandSide rhs;
    rhs.n_qubits_ = n_qubits;
    rhs.unitary_ = circuit_unitary(circuit, n_qubits);
    rhs.circuit_ = std::move(circuit);
    return rhs;
}

StateVector RightHandSide::prepare() const {
    if (circuit_) {
        StateVector s = init_zero(n_qubits_);
        apply_circuit(s, *circuit_);
        return s;
    }
    return StateVector(n_qubits_, unitary_.col(0));
}

StateVector prepare_b(const RightHandSide &rhs) { return rhs.prepare(); }

LSEProblem::LSEProblem(InputMode mode, std::vector<UnitaryTerm> terms, RightHandSide rhs)
    : mode_(mode), terms_(std::move(terms)), rhs_(std::move(rhs)) {
    if (mode_ == InputMode::Matrix) {
        throw ProblemError("matrix mode takes a raw matrix, not a term list");
    }
    if (terms_.empty()) {
        throw ProblemError("empty unitary decomposition");
    }
    n_qubits_ = rhs_.n_qubits();
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto &t = terms_[k];
        if (register_size(t.matrix, "term matrix") != n_qubits_) {
            throw ProblemError("term " + std::to_string(k) + " acts on a different number of qubits than b");
        }
        if (!is_unitary(t.matrix, kUnitaryTol)) {
            throw ProblemError("term " + std::to_string(k) + " is not unitary");
        }
    }
    if (rhs_.was_renormalized()) {
        warnings_.push_back("right-hand side was not normalised; rescaled to unit norm");
    }
}

LSEProblem::LSEProblem(Matrix raw_matrix, RightHandSide rhs)
    : mode_(InputMode::Matrix), raw_matrix_(std::move(raw_matrix)), rhs_(std::move(rhs)) {
    n_qubits_ = register_size(*raw_matrix_, "system matrix");
    if (n_qubits_ != rhs_.n_qubits()) {
        throw ProblemError("system matrix and right-hand side sizes differ");
    }
    if (rhs_.was_renormalized()) {
        warnings_.push_back("right-hand side was not normalised; rescaled to unit norm");
    }
}

std::vector<cplx> LSEProblem::coefficients() const {
    std::vector<cplx> c;
    c.reserve(terms_.size());
    for (const auto &t : terms_) {
        c.push_back(t.coefficient);
    }
    return c;
}

bool LSEProblem::terms_real() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const UnitaryTerm &t) { return t.is_real(); });
}

LSEProblem make_pauli_problem(const std::vector<PauliTerm> &terms, RightHandSide rhs) {
    std::vector<UnitaryTerm> out;
    for (const auto &t : terms) {
        PauliString p(t.label);
        out.push_back(UnitaryTerm{t.coefficient, p.matrix(), p.circuit(), t.label});
    }
    return LSEProblem(InputMode::Pauli, std::move(out), std::move(rhs));
}

LSEProblem make_unitary_problem(const std::vector<std::pair<Matrix, cplx>> &terms, RightHandSide rhs) {
    std::vector<UnitaryTerm> out;
    for (const auto &[m, c] : terms) {
        out.push_back(UnitaryTerm{c, m, std::nullopt, std::nullopt});
    }
    return LSEProblem(InputMode::Unitary, std::move(out), std::move(rhs));
}

LSEProblem make_circuit_problem(const std::vector<std::pair<Circuit, cplx>> &terms, unsigned n_qubits,
                                RightHandSide rhs) {
    std::vector<UnitaryTerm> out;
    for (const auto &[circ, c] : terms) {
        out.push_back(UnitaryTerm{c, circuit_unitary(circ, n_qubits), circ, std::nullopt});
    }
    return LSEProblem(InputMode::Circuit, std::move(out), std::move(rhs));
}

LSEProblem make_matrix_problem(Matrix a, RightHandSide rhs) { return LSEProblem(std::move(a), std::move(rhs)); }

Matrix assemble_matrix(const LSEProblem &problem) {
    if (problem.raw_matrix()) {
        return *problem.raw_matrix();
    }
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << problem.n_qubits());
    Matrix a = Matrix::Zero(dim, dim);
    for (const auto &t : problem.terms()) {
        a += t.coefficient * t.matrix;
    }
    return a;
}

Vector classical_solution(const LSEProblem &problem) {
    const Matrix a = assemble_matrix(problem);
    const Vector b = problem.rhs().prepare().amplitudes();
    if (a.cwiseAbs().maxCoeff() == 0.0) {
        throw SingularSystemError("system matrix is zero");
    }
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinReciprocalCondition)) {
        throw SingularSystemError("system matrix is singular (condition estimate " +
                                  std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) + ")");
    }
    Vector x = lu.solve(b);
    return x / x.norm();
}

std::vector<PauliTerm> decompose_matrix_to_pauli(const Matrix &matrix) {
    const unsigned n = register_size(matrix, "matrix");
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t labels = std::size_t{1} << (2 * n);
    static constexpr char kAlphabet[4] = {'I', 'X', 'Y', 'Z'};
    std::vector<PauliTerm> out;
    for (std::size_t code = 0; code < labels; ++code) {
        std::string label(n, 'I');
        std::size_t flip = 0;
        for (unsigned q = 0; q < n; ++q) {
            const char c = kAlphabet[(code >> (2 * (n - 1 - q))) & 3U];
            label[q] = c;
            if (c == 'X' || c == 'Y') {
                flip |= std::size_t{1} << (n - 1 - q);
            }
        }
        // P|j> = phase(j) |j ^ flip>, so tr(P^dagger M) = sum_j conj(phase(j)) M[j ^ flip, j].
        cplx trace{0.0, 0.0};
        for (std::size_t j = 0; j < dim; ++j) {
            cplx phase{1.0, 0.0};
            for (unsigned q = 0; q < n; ++q) {
                const bool bit = (j >> (n - 1 - q)) & 1U;
                switch (label[q]) {
                case 'Y': phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0}; break;
                case 'Z': phase *= bit ? -1.0 : 1.0; break;
                default: break;
                }
            }
            trace += std::conj(phase) * matrix(static_cast<Eigen::Index>(j ^ flip), static_cast<Eigen::Index>(j));
        }
        const cplx coeff = trace / static_cast<double>(dim);
        if (std::abs(coeff) >= 1e-12) {
            out.push_back({label, coeff});
        }
    }
    return out;
}

} // namespace vqls
