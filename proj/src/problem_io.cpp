#include "vqls/problem_io.hpp"

#include <fstream>

namespace vqls {

using nlohmann::json;

cplx parse_complex(const json &v) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ProblemError("expected a number or a [re, im] pair, got " + v.dump());
}

Matrix parse_matrix(const json &rows) {
    if (!rows.is_array() || rows.empty()) {
        throw ProblemError("matrix must be a non-empty array of rows");
    }
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    Matrix m(n_rows, n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const json &row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_rows) {
            throw ProblemError("matrix must be square");
        }
        for (Eigen::Index c = 0; c < n_rows; ++c) {
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
        }
    }
    return m;
}

Vector parse_vector(const json &entries) {
    if (!entries.is_array() || entries.empty()) {
        throw ProblemError("vector must be a non-empty array");
    }
    Vector v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parse_complex(entries[i]);
    }
    return v;
}

Circuit parse_circuit(const json &gates) {
    if (!gates.is_array()) {
        throw ProblemError("circuit must be an array of gate objects");
    }
    Circuit out;
    for (const json &g : gates) {
        if (!g.is_object() || !g.contains("gate")) {
            throw ProblemError("gate entry needs a \"gate\" field: " + g.dump());
        }
        GateOp op;
        try {
            op.gate.kind = parse_gate_kind(g.at("gate").get<std::string>());
        } catch (const std::invalid_argument &e) {
            throw ProblemError(e.what());
        }
        if (g.contains("targets")) {
            op.targets = g.at("targets").get<std::vector<unsigned>>();
        } else if (g.contains("target")) {
            op.targets = {g.at("target").get<unsigned>()};
        } else {
            throw ProblemError("gate entry needs \"target\" or \"targets\": " + g.dump());
        }
        if (g.contains("params")) {
            const auto params = g.at("params").get<std::vector<double>>();
            for (std::size_t i = 0; i < params.size() && i < 3; ++i) {
                op.gate.angles[i] = params[i];
            }
        }
        if (op.targets.size() != gate_arity(op.gate.kind)) {
            throw ProblemError(gate_name(op.gate.kind) + " expects " + std::to_string(gate_arity(op.gate.kind)) +
                               " target(s)");
        }
        out.push_back(std::move(op));
    }
    return out;
}

namespace {

void check_circuit_range(const Circuit &c, unsigned n) {
    for (const auto &op : c) {
        for (unsigned q : op.targets) {
            if (q >= n) {
                throw ProblemError("gate target " + std::to_string(q) + " outside " + std::to_string(n) + " qubits");
            }
        }
    }
}

RightHandSide parse_rhs(const json &b, unsigned n) {
    if (b.is_object() && b.contains("vector")) {
        return RightHandSide::from_vector(parse_vector(b.at("vector")));
    }
    if (b.is_object() && b.contains("circuit")) {
        Circuit c = parse_circuit(b.at("circuit"));
        check_circuit_range(c, n);
        return RightHandSide::from_circuit(std::move(c), n);
    }
    if (b.is_array()) {
        return RightHandSide::from_vector(parse_vector(b));
    }
    throw ProblemError("\"b\" must hold a \"vector\" or a \"circuit\"");
}

} // namespace

LSEProblem load_problem(const json &doc) {
    try {
        if (!doc.is_object()) {
            throw ProblemError("problem document must be a JSON object");
        }
        const auto n = doc.at("n").get<int>();
        if (n < 1) {
            throw ProblemError("\"n\" must be at least 1");
        }
        const auto nq = static_cast<unsigned>(n);
        const InputMode mode = parse_input_mode(doc.at("mode").get<std::string>());
        RightHandSide rhs = parse_rhs(doc.at("b"), nq);
        if (rhs.n_qubits() != nq) {
            throw ProblemError("right-hand side does not match n = " + std::to_string(n));
        }

        if (mode == InputMode::Matrix) {
            Matrix a = parse_matrix(doc.at("matrix"));
            if (static_cast<std::size_t>(a.rows()) != (std::size_t{1} << nq)) {
                throw ProblemError("matrix dimension does not match n = " + std::to_string(n));
            }
            return make_matrix_problem(std::move(a), std::move(rhs));
        }

        const json &terms = doc.at("terms");
        if (!terms.is_array() || terms.empty()) {
            throw ProblemError("empty unitary decomposition");
        }
        std::vector<UnitaryTerm> out;
        for (const json &t : terms) {
            const cplx coeff = t.contains("coeff") ? parse_complex(t.at("coeff")) : cplx{1.0, 0.0};
            switch (mode) {
            case InputMode::Pauli: {
                PauliString p(t.at("pauli").get<std::string>());
                if (p.n_qubits() != nq) {
                    throw ProblemError("Pauli label \"" + p.label() + "\" does not have n characters");
                }
                out.push_back(UnitaryTerm{coeff, p.matrix(), p.circuit(), p.label()});
                break;
            }
            case InputMode::Unitary:
                out.push_back(UnitaryTerm{coeff, parse_matrix(t.at("unitary")), std::nullopt, std::nullopt});
                break;
            case InputMode::Circuit: {
                Circuit c = parse_circuit(t.at("circuit"));
                check_circuit_range(c, nq);
                Matrix u = circuit_unitary(c, nq);
                out.push_back(UnitaryTerm{coeff, std::move(u), std::move(c), std::nullopt});
                break;
            }
            case InputMode::Matrix:
                break;
            }
        }
        return LSEProblem(mode, std::move(out), std::move(rhs));
    } catch (const json::exception &e) {
        throw ProblemError(std::string("malformed problem document: ") + e.what());
    } catch (const DimensionError &e) {
        throw ProblemError(e.what());
    }
}

json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ProblemError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ProblemError(path.string() + ": " + e.what());
    }
}

LSEProblem load_problem_file(const std::filesystem::path &path) { return load_problem(read_json_file(path)); }

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace vqls
