#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqls {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// Raised for malformed register sizes, qubit indices or operator shapes.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Dense statevector over n qubits.
///
/// Qubit 0 is the most significant bit of a basis-state index, so the
/// label "100" on three qubits is index 4 and character i of a Pauli
/// string acts on qubit i.
class StateVector {
  public:
    StateVector(unsigned n_qubits, Vector amplitudes);

    static StateVector zero(unsigned n_qubits);

    unsigned n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

    const Vector &amplitudes() const { return amps_; }
    Vector &amplitudes() { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    double squared_norm() const { return amps_.squaredNorm(); }

  private:
    unsigned n_qubits_;
    Vector amps_;
};

/// |0...0> on n qubits; n = 0 is rejected.
StateVector init_zero(unsigned n_qubits);

enum class GateKind { I, H, X, Y, Z, S, Sdg, T, RX, RY, RZ, Rot, CNOT, CZ, SWAP };

/// A named gate with up to three angles. `Rot` is Rz(a2) Ry(a1) Rz(a0).
struct Gate {
    GateKind kind = GateKind::I;
    std::array<double, 3> angles{0.0, 0.0, 0.0};

    static Gate rx(double a) { return {GateKind::RX, {a, 0.0, 0.0}}; }
    static Gate ry(double a) { return {GateKind::RY, {a, 0.0, 0.0}}; }
    static Gate rz(double a) { return {GateKind::RZ, {a, 0.0, 0.0}}; }
    static Gate rot(double a0, double a1, double a2) { return {GateKind::Rot, {a0, a1, a2}}; }
};

unsigned gate_arity(GateKind kind);
std::string gate_name(GateKind kind);
/// Parses names such as "H", "CZ", "Sdg" (case-insensitive).
GateKind parse_gate_kind(const std::string &name);

/// Unitary of the gate on its own 2^arity dimensional space.
Matrix gate_matrix(const Gate &gate);

/// A gate bound to its target qubits.
struct GateOp {
    Gate gate;
    std::vector<unsigned> targets;
};

using Circuit = std::vector<GateOp>;

void apply_gate(StateVector &state, const Gate &gate, std::span<const unsigned> targets);
StateVector apply_gate(const StateVector &state, const Gate &gate, std::span<const unsigned> targets);

void apply_circuit(StateVector &state, const Circuit &circuit);

/// Applies `op` (dimension 2^k) to `targets` on the components whose
/// `controls` read `control_pattern`. targets[0] is the most significant
/// qubit of the operator's own index space.
void apply_controlled(StateVector &state, const Matrix &op, std::span<const unsigned> targets,
                      std::span<const unsigned> controls, std::span<const int> control_pattern);
StateVector apply_controlled(const StateVector &state, const Matrix &op, std::span<const unsigned> targets,
                             std::span<const unsigned> controls, std::span<const int> control_pattern);

/// Uncontrolled form of apply_controlled.
void apply_operator(StateVector &state, const Matrix &op, std::span<const unsigned> targets);

/// Full-register matrix-vector product; no renormalisation.
StateVector apply_matrix(const StateVector &state, const Matrix &matrix);

/// sum_i conj(a_i) b_i
cplx inner_product(const StateVector &a, const StateVector &b);

/// |amp|^2 / sum |amp|^2; all zeros for a zero-norm state.
std::vector<double> probabilities(const StateVector &state);

/// Marginal probability that `qubits` read `pattern`.
double marginal_probability(const StateVector &state, std::span<const unsigned> qubits, std::span<const int> pattern);

using Histogram = std::map<std::uint64_t, std::size_t>;

/// Draws `shots` basis-state indices from the normalised distribution.
Histogram sample(const StateVector &state, std::size_t shots, Rng &rng);

/// Converts a histogram into frequencies over `dim` basis states.
std::vector<double> frequencies(const Histogram &hist, std::size_t dim);

/// Basis-state label with qubit 0 as the leftmost character.
std::string basis_label(std::uint64_t index, unsigned n_qubits);

/// Unitary realised by a circuit on n qubits, built column by column.
Matrix circuit_unitary(const Circuit &circuit, unsigned n_qubits);

/// Unitary whose first column is the unit vector `first` (Gram-Schmidt
/// completion against the standard basis).
Matrix complete_unitary(const Vector &first);

bool is_unitary(const Matrix &m, double tol = 1e-10);
bool is_power_of_two(std::size_t v);
unsigned log2_exact(std::size_t v);

} // namespace vqls
