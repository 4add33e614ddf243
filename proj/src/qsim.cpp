#include "vqls/qsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace vqls {

namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t bit_of(unsigned qubit, unsigned n_qubits) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_targets(const StateVector &state, std::span<const unsigned> targets,
                   std::span<const unsigned> controls = {}) {
    const unsigned n = state.n_qubits();
    std::vector<unsigned> all(targets.begin(), targets.end());
    all.insert(all.end(), controls.begin(), controls.end());
    for (unsigned q : all) {
        if (q >= n) {
            throw DimensionError("qubit index " + std::to_string(q) + " out of range for " +
                                 std::to_string(n) + " qubits");
        }
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        throw DimensionError("duplicate or overlapping qubit indices");
    }
}

Matrix rz(double a) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::exp(-kI * (a / 2.0));
    m(1, 1) = std::exp(kI * (a / 2.0));
    return m;
}

Matrix ry(double a) {
    Matrix m(2, 2);
    const double c = std::cos(a / 2.0), s = std::sin(a / 2.0);
    m << c, -s, s, c;
    return m;
}

Matrix rx(double a) {
    Matrix m(2, 2);
    const double c = std::cos(a / 2.0), s = std::sin(a / 2.0);
    m << c, -kI * s, -kI * s, c;
    return m;
}

} // namespace

StateVector::StateVector(unsigned n_qubits, Vector amplitudes) : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits_ >= 8 * sizeof(std::size_t) - 1 ||
        static_cast<std::size_t>(amps_.size()) != (std::size_t{1} << n_qubits_)) {
        throw DimensionError("amplitude count must equal 2^n_qubits");
    }
}

StateVector StateVector::zero(unsigned n_qubits) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
    v[0] = 1.0;
    return StateVector(n_qubits, std::move(v));
}

StateVector init_zero(unsigned n_qubits) {
    if (n_qubits == 0) {
        throw DimensionError("a register needs at least one qubit");
    }
    return StateVector::zero(n_qubits);
}

unsigned gate_arity(GateKind kind) {
    switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
        return 2;
    default:
        return 1;
    }
}

std::string gate_name(GateKind kind) {
    switch (kind) {
    case GateKind::I: return "I";
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::T: return "T";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::Rot: return "Rot";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    }
    return "?";
}

GateKind parse_gate_kind(const std::string &name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    static const std::map<std::string, GateKind> table{
        {"I", GateKind::I},       {"H", GateKind::H},     {"X", GateKind::X},         {"Y", GateKind::Y},
        {"Z", GateKind::Z},       {"S", GateKind::S},     {"SDG", GateKind::Sdg},     {"T", GateKind::T},
        {"RX", GateKind::RX},     {"RY", GateKind::RY},   {"RZ", GateKind::RZ},       {"ROT", GateKind::Rot},
        {"CNOT", GateKind::CNOT}, {"CX", GateKind::CNOT}, {"CZ", GateKind::CZ},       {"SWAP", GateKind::SWAP},
    };
    auto it = table.find(upper);
    if (it == table.end()) {
        throw std::invalid_argument("unknown gate '" + name + "'");
    }
    return it->second;
}

Matrix gate_matrix(const Gate &gate) {
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix m = Matrix::Identity(2, 2);
    switch (gate.kind) {
    case GateKind::I:
        break;
    case GateKind::H:
        m << r, r, r, -r;
        break;
    case GateKind::X:
        m << 0, 1, 1, 0;
        break;
    case GateKind::Y:
        m << 0, -kI, kI, 0;
        break;
    case GateKind::Z:
        m(1, 1) = -1.0;
        break;
    case GateKind::S:
        m(1, 1) = kI;
        break;
    case GateKind::Sdg:
        m(1, 1) = -kI;
        break;
    case GateKind::T:
        m(1, 1) = std::exp(kI * (std::numbers::pi / 4.0));
        break;
    case GateKind::RX:
        m = rx(gate.angles[0]);
        break;
    case GateKind::RY:
        m = ry(gate.angles[0]);
        break;
    case GateKind::RZ:
        m = rz(gate.angles[0]);
        break;
    case GateKind::Rot:
        m = rz(gate.angles[2]) * ry(gate.angles[1]) * rz(gate.angles[0]);
        break;
    case GateKind::CNOT:
        m = Matrix::Zero(4, 4);
        m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
        break;
    case GateKind::CZ:
        m = Matrix::Identity(4, 4);
        m(3, 3) = -1.0;
        break;
    case GateKind::SWAP:
        m = Matrix::Zero(4, 4);
        m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
        break;
    }
    return m;
}

void apply_controlled(StateVector &state, const Matrix &op, std::span<const unsigned> targets,
                      std::span<const unsigned> controls, std::span<const int> control_pattern) {
    const std::size_t k = targets.size();
    if (k == 0 || op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != (std::size_t{1} << k)) {
        throw DimensionError("operator dimension does not match the number of target qubits");
    }
    if (controls.size() != control_pattern.size()) {
        throw DimensionError("control pattern length differs from control count");
    }
    check_targets(state, targets, controls);

    const unsigned n = state.n_qubits();
    const std::size_t sub = std::size_t{1} << k;
    std::vector<std::size_t> offsets(sub, 0);
    std::size_t target_mask = 0;
    for (std::size_t t = 0; t < k; ++t) {
        target_mask |= bit_of(targets[t], n);
    }
    for (std::size_t j = 0; j < sub; ++j) {
        for (std::size_t t = 0; t < k; ++t) {
            if ((j >> (k - 1 - t)) & 1U) {
                offsets[j] |= bit_of(targets[t], n);
            }
        }
    }
    std::size_t control_mask = 0, control_value = 0;
    for (std::size_t c = 0; c < controls.size(); ++c) {
        control_mask |= bit_of(controls[c], n);
        if (control_pattern[c] != 0) {
            control_value |= bit_of(controls[c], n);
        }
    }

    Vector &amps = state.amplitudes();
    Vector gathered(static_cast<Eigen::Index>(sub));
    const std::size_t dim = state.dim();
    for (std::size_t base = 0; base < dim; ++base) {
        if ((base & target_mask) != 0 || (base & control_mask) != control_value) {
            continue;
        }
        for (std::size_t j = 0; j < sub; ++j) {
            gathered[static_cast<Eigen::Index>(j)] = amps[static_cast<Eigen::Index>(base | offsets[j])];
        }
        const Vector out = op * gathered;
        for (std::size_t j = 0; j < sub; ++j) {
            amps[static_cast<Eigen::Index>(base | offsets[j])] = out[static_cast<Eigen::Index>(j)];
        }
    }
}

StateVector apply_controlled(const StateVector &state, const Matrix &op, std::span<const unsigned> targets,
                             std::span<const unsigned> controls, std::span<const int> control_pattern) {
    StateVector out = state;
    apply_controlled(out, op, targets, controls, control_pattern);
    return out;
}

void apply_operator(StateVector &state, const Matrix &op, std::span<const unsigned> targets) {
    apply_controlled(state, op, targets, {}, {});
}

void apply_gate(StateVector &state, const Gate &gate, std::span<const unsigned> targets) {
    if (targets.size() != gate_arity(gate.kind)) {
        throw DimensionError(gate_name(gate.kind) + " expects " + std::to_string(gate_arity(gate.kind)) +
                             " target(s)");
    }
    apply_operator(state, gate_matrix(gate), targets);
}

StateVector apply_gate(const StateVector &state, const Gate &gate, std::span<const unsigned> targets) {
    StateVector out = state;
    apply_gate(out, gate, targets);
    return out;
}

void apply_circuit(StateVector &state, const Circuit &circuit) {
    for (const auto &op : circuit) {
        apply_gate(state, op.gate, op.targets);
    }
}

StateVector apply_matrix(const StateVector &state, const Matrix &matrix) {
    if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != state.dim()) {
        throw DimensionError("matrix dimension does not match state dimension");
    }
    return StateVector(state.n_qubits(), matrix * state.amplitudes());
}

cplx inner_product(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("inner product of states with different dimensions");
    }
    return a.amplitudes().dot(b.amplitudes());
}

std::vector<double> probabilities(const StateVector &state) {
    std::vector<double> p(state.dim(), 0.0);
    const double total = state.squared_norm();
    if (total == 0.0) {
        return p;
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(state[i]) / total;
    }
    return p;
}

double marginal_probability(const StateVector &state, std::span<const unsigned> qubits,
                            std::span<const int> pattern) {
    if (qubits.size() != pattern.size()) {
        throw DimensionError("pattern length differs from qubit count");
    }
    check_targets(state, qubits);
    std::size_t mask = 0, value = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        mask |= bit_of(qubits[i], state.n_qubits());
        if (pattern[i] != 0) {
            value |= bit_of(qubits[i], state.n_qubits());
        }
    }
    double p = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if ((i & mask) == value) {
            p += std::norm(state[i]);
        }
    }
    return p / state.squared_norm();
}

Histogram sample(const StateVector &state, std::size_t shots, Rng &rng) {
    if (!(state.squared_norm() > 0.0)) {
        throw std::domain_error("cannot sample from a zero-norm state");
    }
    Histogram hist;
    if (shots == 0) {
        return hist;
    }
    const std::vector<double> p = probabilities(state);
    std::discrete_distribution<std::uint64_t> dist(p.begin(), p.end());
    for (std::size_t s = 0; s < shots; ++s) {
        ++hist[dist(rng)];
    }
    return hist;
}

std::vector<double> frequencies(const Histogram &hist, std::size_t dim) {
    std::vector<double> f(dim, 0.0);
    std::size_t total = 0;
    for (const auto &[index, count] : hist) {
        total += count;
    }
    if (total == 0) {
        return f;
    }
    for (const auto &[index, count] : hist) {
        if (index >= dim) {
            throw DimensionError("histogram entry outside the register");
        }
        f[index] = static_cast<double>(count) / static_cast<double>(total);
    }
    return f;
}

std::string basis_label(std::uint64_t index, unsigned n_qubits) {
    std::string s(n_qubits, '0');
    for (unsigned q = 0; q < n_qubits; ++q) {
        if ((index >> (n_qubits - 1 - q)) & 1U) {
            s[q] = '1';
        }
    }
    return s;
}

Matrix circuit_unitary(const Circuit &circuit, unsigned n_qubits) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    Matrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        Vector e = Vector::Zero(dim);
        e[col] = 1.0;
        StateVector s(n_qubits, std::move(e));
        apply_circuit(s, circuit);
        u.col(col) = s.amplitudes();
    }
    return u;
}

Matrix complete_unitary(const Vector &first) {
    const Eigen::Index dim = first.size();
    const double norm = first.norm();
    if (!(norm > 0.0)) {
        throw std::invalid_argument("cannot complete a zero vector to a unitary");
    }
    Matrix u = Matrix::Zero(dim, dim);
    u.col(0) = first / norm;
    Eigen::Index filled = 1;
    for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
        Vector v = Vector::Zero(dim);
        v[e] = 1.0;
        // two passes of modified Gram-Schmidt for numerical orthogonality
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < filled; ++c) {
                v -= u.col(c) * u.col(c).dot(v);
            }
        }
        const double vn = v.norm();
        if (vn > 1e-8) {
            u.col(filled++) = v / vn;
        }
    }
    return u;
}

bool is_unitary(const Matrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

unsigned log2_exact(std::size_t v) {
    if (!is_power_of_two(v)) {
        throw DimensionError("dimension " + std::to_string(v) + " is not a power of two");
    }
    unsigned n = 0;
    while ((std::size_t{1} << n) < v) {
        ++n;
    }
    return n;
}

} // namespace vqls
