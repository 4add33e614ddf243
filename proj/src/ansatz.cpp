#include "vqls/ansatz.hpp"

#include <numbers>
#include <numeric>

namespace vqls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform_angle(Rng &rng) {
    // uniform_real_distribution may return its upper bound after rounding
    std::uniform_real_distribution<double> dist(0.0, kTwoPi);
    double a = dist(rng);
    return a < kTwoPi ? a : 0.0;
}

void cz_chain(StateVector &state, std::span<const unsigned> wires) {
    const Gate cz{GateKind::CZ};
    for (std::size_t q = 0; q + 1 < wires.size(); ++q) {
        const unsigned pair[2] = {wires[q], wires[q + 1]};
        apply_gate(state, cz, pair);
    }
}

std::vector<unsigned> default_wires(unsigned n) {
    std::vector<unsigned> w(n);
    std::iota(w.begin(), w.end(), 0U);
    return w;
}

} // namespace

std::size_t parameter_count(unsigned n_qubits, unsigned depth) {
    return 3 * static_cast<std::size_t>(n_qubits) * (static_cast<std::size_t>(depth) + 1);
}

void GrowthPolicy::validate(unsigned initial_depth) const {
    if (window < 1) {
        throw std::invalid_argument("growth window must be at least one step");
    }
    if (!(threshold >= 0.0)) {
        throw std::invalid_argument("growth threshold must be non-negative");
    }
    if (max_depth < initial_depth) {
        throw std::invalid_argument("max depth is below the initial depth");
    }
}

AnsatzParams initial_params(unsigned n_qubits, unsigned depth, Rng &rng) {
    if (n_qubits == 0) {
        throw DimensionError("ansatz needs at least one qubit");
    }
    AnsatzParams p{n_qubits, depth, std::vector<double>(parameter_count(n_qubits, depth))};
    for (double &a : p.angles) {
        a = uniform_angle(rng);
    }
    return p;
}

AnsatzParams initial_params(unsigned n_qubits, unsigned depth, std::uint64_t seed) {
    Rng rng(seed);
    return initial_params(n_qubits, depth, rng);
}

void apply_ansatz(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires) {
    if (wires.size() != params.n_qubits || params.size() != parameter_count(params.n_qubits, params.depth)) {
        throw DimensionError("ansatz parameters do not match the register");
    }
    for (unsigned layer = 0; layer <= params.depth; ++layer) {
        if (layer > 0) {
            cz_chain(state, wires);
        }
        for (unsigned q = 0; q < params.n_qubits; ++q) {
            const unsigned target[1] = {wires[q]};
            apply_gate(state, Gate::rot(params.at(layer, q, 0), params.at(layer, q, 1), params.at(layer, q, 2)),
                       target);
        }
        if (layer > 0) {
            cz_chain(state, wires);
        }
    }
}

void apply_ansatz(const AnsatzParams &params, StateVector &state) {
    if (state.n_qubits() != params.n_qubits) {
        throw DimensionError("state has " + std::to_string(state.n_qubits()) + " qubits, ansatz expects " +
                             std::to_string(params.n_qubits));
    }
    const auto wires = default_wires(params.n_qubits);
    apply_ansatz(params, state, wires);
}

StateVector apply_ansatz(const AnsatzParams &params, const StateVector &state) {
    StateVector out = state;
    apply_ansatz(params, out);
    return out;
}

std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, Rng &rng) {
    if (params.depth >= max_depth) {
        return std::nullopt;
    }
    AnsatzParams out = params;
    out.depth += 1;
    const double alpha = uniform_angle(rng);
    for (unsigned q = 0; q < params.n_qubits; ++q) {
        out.angles.push_back(-alpha);
        out.angles.push_back(0.0);
        out.angles.push_back(alpha);
    }
    return out;
}

std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, std::uint64_t seed) {
    Rng rng(seed);
    return grow(params, max_depth, rng);
}

std::optional<AnsatzParams> Ansatz::grow(const AnsatzParams &, unsigned, Rng &) const { return std::nullopt; }

AnsatzParams Ansatz::initial(unsigned depth, Rng &rng) const { return initial_params(n_qubits(), depth, rng); }

AnsatzParams CustomAnsatz::initial(unsigned, Rng &rng) const {
    AnsatzParams p{n_qubits_, 0, std::vector<double>(parameter_count_)};
    for (double &a : p.angles) {
        a = uniform_angle(rng);
    }
    return p;
}

void Ansatz::apply(const AnsatzParams &params, StateVector &state) const {
    if (state.n_qubits() != n_qubits()) {
        throw DimensionError("state does not match the ansatz register");
    }
    const auto wires = default_wires(n_qubits());
    apply(params, state, wires);
}

StateVector Ansatz::prepare(const AnsatzParams &params) const {
    StateVector s = init_zero(n_qubits());
    apply(params, s);
    return s;
}

Matrix Ansatz::unitary(const AnsatzParams &params) const {
    const unsigned n = n_qubits();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Matrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        Vector e = Vector::Zero(dim);
        e[col] = 1.0;
        StateVector s(n, std::move(e));
        apply(params, s);
        u.col(col) = s.amplitudes();
    }
    return u;
}

void LayeredAnsatz::apply(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires) const {
    if (params.n_qubits != n_qubits_) {
        throw DimensionError("parameters belong to a different register size");
    }
    apply_ansatz(params, state, wires);
}

std::optional<AnsatzParams> LayeredAnsatz::grow(const AnsatzParams &params, unsigned max_depth, Rng &rng) const {
    return vqls::grow(params, max_depth, rng);
}

} // namespace vqls
