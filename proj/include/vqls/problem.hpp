#pragma once

#include "vqls/qsim.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vqls {

enum class InputMode { Circuit, Unitary, Pauli, Matrix };

std::string to_string(InputMode mode);
InputMode parse_input_mode(const std::string &name);

class ProblemError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class SingularSystemError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A tensor product of single-qubit Paulis; character i acts on qubit i.
class PauliString {
  public:
    explicit PauliString(std::string label);

    const std::string &label() const { return label_; }
    unsigned n_qubits() const { return static_cast<unsigned>(label_.size()); }

    Matrix matrix() const;
    /// One Pauli gate per non-identity position.
    Circuit circuit() const;

  private:
    std::string label_;
};

PauliString parse_pauli(const std::string &label);

struct PauliTerm {
    std::string label;
    cplx coefficient;
};

/// One summand c_k A_k. The matrix is always materialised; `circuit` and
/// `pauli` record how the caller described it.
struct UnitaryTerm {
    cplx coefficient{1.0, 0.0};
    Matrix matrix;
    std::optional<Circuit> circuit;
    std::optional<std::string> pauli;

    bool is_real() const;
};

class RightHandSide {
  public:
    static RightHandSide from_vector(Vector b);
    static RightHandSide from_circuit(Circuit circuit, unsigned n_qubits);

    unsigned n_qubits() const { return n_qubits_; }
    const std::optional<Circuit> &circuit() const { return circuit_; }

    /// Normalised |b>.
    StateVector prepare() const;
    /// U_b with U_b|0...0> = |b>.
    const Matrix &preparation_unitary() const { return unitary_; }
    /// True when |b> had to be rescaled on construction.
    bool was_renormalized() const { return renormalized_; }

  private:
    RightHandSide() = default;

    unsigned n_qubits_ = 0;
    std::optional<Circuit> circuit_;
    Matrix unitary_;
    bool renormalized_ = false;
};

/// Loaded linear system sum_k c_k A_k x = b (or a raw matrix A).
class LSEProblem {
  public:
    LSEProblem(InputMode mode, std::vector<UnitaryTerm> terms, RightHandSide rhs);
    LSEProblem(Matrix raw_matrix, RightHandSide rhs);

    InputMode mode() const { return mode_; }
    unsigned n_qubits() const { return n_qubits_; }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<UnitaryTerm> &terms() const { return terms_; }
    const RightHandSide &rhs() const { return rhs_; }
    const std::optional<Matrix> &raw_matrix() const { return raw_matrix_; }
    const std::vector<std::string> &warnings() const { return warnings_; }

    std::vector<cplx> coefficients() const;
    /// Every term matrix has only real entries.
    bool terms_real() const;

  private:
    InputMode mode_;
    unsigned n_qubits_ = 0;
    std::vector<UnitaryTerm> terms_;
    std::optional<Matrix> raw_matrix_;
    RightHandSide rhs_;
    std::vector<std::string> warnings_;
};

/// Convenience builders for each input mode.
LSEProblem make_pauli_problem(const std::vector<PauliTerm> &terms, RightHandSide rhs);
LSEProblem make_unitary_problem(const std::vector<std::pair<Matrix, cplx>> &terms, RightHandSide rhs);
LSEProblem make_circuit_problem(const std::vector<std::pair<Circuit, cplx>> &terms, unsigned n_qubits,
                                RightHandSide rhs);
LSEProblem make_matrix_problem(Matrix a, RightHandSide rhs);

/// sum_k c_k A_k, or the raw matrix in matrix mode.
Matrix assemble_matrix(const LSEProblem &problem);

/// x / |x| for A x = b via LU with partial pivoting. Rejects systems whose
/// reciprocal condition estimate falls below 1e-12.
Vector classical_solution(const LSEProblem &problem);

/// c_P = tr(P^dagger M) / 2^n over all 4^n Pauli strings, dropping |c_P| < 1e-12.
std::vector<PauliTerm> decompose_matrix_to_pauli(const Matrix &matrix);

StateVector prepare_b(const RightHandSide &rhs);

} // namespace vqls
