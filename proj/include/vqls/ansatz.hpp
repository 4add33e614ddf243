#pragma once

#include "vqls/qsim.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace vqls {

/// Rotation angles of the layered ansatz, stored as
/// angles[(layer * n_qubits + qubit) * 3 + slot] for depth + 1 layers.
struct AnsatzParams {
    unsigned n_qubits = 0;
    unsigned depth = 0;
    std::vector<double> angles;

    std::size_t size() const { return angles.size(); }
    double &at(unsigned layer, unsigned qubit, unsigned slot) { return angles[index(layer, qubit, slot)]; }
    double at(unsigned layer, unsigned qubit, unsigned slot) const { return angles[index(layer, qubit, slot)]; }

    std::size_t index(unsigned layer, unsigned qubit, unsigned slot) const {
        return (static_cast<std::size_t>(layer) * n_qubits + qubit) * 3 + slot;
    }

    bool operator==(const AnsatzParams &) const = default;
};

/// 3 n (d + 1)
std::size_t parameter_count(unsigned n_qubits, unsigned depth);

struct GrowthPolicy {
    bool enabled = true;
    unsigned window = 10;
    double threshold = 1e-3;
    unsigned max_depth = 10;

    void validate(unsigned initial_depth) const;
};

/// Every angle drawn uniformly from [0, 2 pi).
AnsatzParams initial_params(unsigned n_qubits, unsigned depth, Rng &rng);
AnsatzParams initial_params(unsigned n_qubits, unsigned depth, std::uint64_t seed);

/// Layered circuit: rotation layer 0, then per extra layer a CZ chain on
/// (0,1), (1,2), ..., the rotation layer, and the same CZ chain again.
/// The closing chain undoes the opening one whenever the layer's rotations
/// are the identity, so a freshly grown layer leaves the state untouched.
void apply_ansatz(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires);
void apply_ansatz(const AnsatzParams &params, StateVector &state);
StateVector apply_ansatz(const AnsatzParams &params, const StateVector &state);

/// Appends one layer whose triples are all (-a, 0, a) for a single fresh
/// a ~ U[0, 2 pi). Returns nullopt once depth has reached max_depth.
std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, Rng &rng);
std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, std::uint64_t seed);

/// State-preparation circuit V(theta) seen by the cost estimators and the
/// trainer. The built-in implementation is the dynamic layered ansatz;
/// callers may plug in their own.
class Ansatz {
  public:
    virtual ~Ansatz() = default;

    virtual unsigned n_qubits() const = 0;
    virtual void apply(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires) const = 0;
    virtual std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, Rng &rng) const;
    /// Starting point for training; the layered layout by default.
    virtual AnsatzParams initial(unsigned depth, Rng &rng) const;
    /// True when V has only real matrix entries for every parameter value.
    virtual bool real_valued() const { return false; }

    void apply(const AnsatzParams &params, StateVector &state) const;
    StateVector prepare(const AnsatzParams &params) const;
    Matrix unitary(const AnsatzParams &params) const;
};

class LayeredAnsatz final : public Ansatz {
  public:
    explicit LayeredAnsatz(unsigned n_qubits) : n_qubits_(n_qubits) {}

    unsigned n_qubits() const override { return n_qubits_; }
    void apply(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires) const override;
    std::optional<AnsatzParams> grow(const AnsatzParams &params, unsigned max_depth, Rng &rng) const override;

    using Ansatz::apply;

  private:
    unsigned n_qubits_;
};

/// Wraps a user procedure (parameters, state, wires) -> applies V(theta).
class CustomAnsatz final : public Ansatz {
  public:
    using Procedure = std::function<void(const AnsatzParams &, StateVector &, std::span<const unsigned>)>;

    CustomAnsatz(unsigned n_qubits, std::size_t parameter_count, Procedure procedure, bool real_valued = false)
        : n_qubits_(n_qubits), parameter_count_(parameter_count), procedure_(std::move(procedure)),
          real_(real_valued) {}

    unsigned n_qubits() const override { return n_qubits_; }
    void apply(const AnsatzParams &params, StateVector &state, std::span<const unsigned> wires) const override {
        procedure_(params, state, wires);
    }
    bool real_valued() const override { return real_; }
    /// `parameter_count` angles drawn from U[0, 2 pi); depth is reported as 0.
    AnsatzParams initial(unsigned depth, Rng &rng) const override;

    using Ansatz::apply;

  private:
    unsigned n_qubits_;
    std::size_t parameter_count_;
    Procedure procedure_;
    bool real_;
};

} // namespace vqls
