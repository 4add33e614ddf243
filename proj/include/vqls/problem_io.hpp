#pragma once

#include "vqls/problem.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace vqls {

/// Builds a validated problem from the JSON problem-file document:
///
///   {"n": 3, "mode": "pauli",
///    "terms": [{"pauli": "XZI", "coeff": [0.2, 0.0]}, ...],
///    "b": {"vector": [[re, im], ...]} | {"circuit": [{"gate": "H", "target": 0}, ...]}}
///
/// Unitary terms use {"unitary": [[[re, im], ...], ...]}, circuit terms use
/// {"circuit": [...]}, and matrix mode carries "matrix" instead of "terms".
/// Plain numbers are accepted wherever a complex value is expected.
LSEProblem load_problem(const nlohmann::json &doc);
LSEProblem load_problem_file(const std::filesystem::path &path);

nlohmann::json read_json_file(const std::filesystem::path &path);

cplx parse_complex(const nlohmann::json &v);
Matrix parse_matrix(const nlohmann::json &rows);
Vector parse_vector(const nlohmann::json &entries);
Circuit parse_circuit(const nlohmann::json &gates);

nlohmann::json complex_to_json(cplx z);
nlohmann::json matrix_to_json(const Matrix &m);

} // namespace vqls
