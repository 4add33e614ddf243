#pragma once

// Dense reference constructions for tests. Everything here is built from
// hard-coded 2x2 matrices and Kronecker products, independent of the
// simulator's index-gathering kernels.

#include "vqls/ansatz.hpp"
#include "vqls/problem.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <string>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Mat eye(Eigen::Index d) { return Mat::Identity(d, d); }

inline Mat pauli(char c) {
    Mat m(2, 2);
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline Mat pauli_string(const std::string &label) {
    Mat m = eye(1);
    for (char c : label) {
        m = kron(m, pauli(c));
    }
    return m;
}

inline Mat hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    Mat m(2, 2);
    m << r, r, r, -r;
    return m;
}

/// Rz(a2) Ry(a1) Rz(a0) written out in closed form.
inline Mat rot_zyz(double a0, double a1, double a2) {
    const double c = std::cos(a1 / 2), s = std::sin(a1 / 2);
    const cplx i(0, 1);
    Mat m(2, 2);
    m << std::exp(-i * (a0 + a2) / 2.0) * c, -std::exp(i * (a0 - a2) / 2.0) * s,
        std::exp(-i * (a0 - a2) / 2.0) * s, std::exp(i * (a0 + a2) / 2.0) * c;
    return m;
}

/// U acting on qubit q of n (qubit 0 leftmost factor).
inline Mat on_qubit(unsigned n, unsigned q, const Mat &u) {
    return kron(kron(eye(Eigen::Index{1} << q), u), eye(Eigen::Index{1} << (n - q - 1)));
}

inline Mat projector(int bit) {
    Mat p = Mat::Zero(2, 2);
    p(bit, bit) = 1.0;
    return p;
}

/// CZ between qubits a and b as a diagonal matrix.
inline Mat cz(unsigned n, unsigned a, unsigned b) {
    return on_qubit(n, a, projector(0)) + on_qubit(n, a, projector(1)) * on_qubit(n, b, pauli('Z'));
}

/// Single-qubit U on `target` controlled by `control` = |1>.
inline Mat controlled_single(unsigned n, unsigned control, unsigned target, const Mat &u) {
    return on_qubit(n, control, projector(0)) + on_qubit(n, control, projector(1)) * on_qubit(n, target, u);
}

/// Dense unitary of the layered ansatz, layer by layer.
inline Mat layered_unitary(const vqls::AnsatzParams &p) {
    const unsigned n = p.n_qubits;
    const auto dim = Eigen::Index{1} << n;
    Mat chain = eye(dim);
    for (unsigned q = 0; q + 1 < n; ++q) {
        chain = cz(n, q, q + 1) * chain;
    }
    Mat u = eye(dim);
    for (unsigned layer = 0; layer <= p.depth; ++layer) {
        Mat rot = eye(1);
        for (unsigned q = 0; q < n; ++q) {
            rot = kron(rot, rot_zyz(p.at(layer, q, 0), p.at(layer, q, 1), p.at(layer, q, 2)));
        }
        u = (layer == 0 ? rot : chain * rot * chain) * u;
    }
    return u;
}

/// Gaussian elimination with full pivoting.
inline Vec solve_full_pivot(Mat a, Vec b) {
    const Eigen::Index n = a.rows();
    std::vector<Eigen::Index> col_perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) col_perm[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pr = k, pc = k;
        double best = -1;
        for (Eigen::Index r = k; r < n; ++r)
            for (Eigen::Index c = k; c < n; ++c)
                if (std::abs(a(r, c)) > best) { best = std::abs(a(r, c)); pr = r; pc = c; }
        a.row(k).swap(a.row(pr));
        std::swap(b[k], b[pr]);
        a.col(k).swap(a.col(pc));
        std::swap(col_perm[static_cast<std::size_t>(k)], col_perm[static_cast<std::size_t>(pc)]);
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const cplx f = a(r, k) / a(k, k);
            a.row(r) -= f * a.row(k);
            b[r] -= f * b[k];
        }
    }
    Vec y(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        cplx s = b[r];
        for (Eigen::Index c = r + 1; c < n; ++c) s -= a(r, c) * y[c];
        y[r] = s / a(r, r);
    }
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[col_perm[static_cast<std::size_t>(i)]] = y[i];
    return x;
}

inline Mat random_matrix(Eigen::Index d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Mat m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline Mat random_unitary(Eigen::Index d, std::mt19937_64 &rng) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(d, rng));
    return qr.householderQ() * eye(d);
}

inline Vec random_state(Eigen::Index d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline vqls::AnsatzParams random_params(unsigned n, unsigned depth, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    vqls::AnsatzParams p{n, depth, std::vector<double>(3 * n * (depth + 1))};
    for (double &a : p.angles) a = u(rng);
    return p;
}

/// The three-qubit test system: I + 0.2 XZI + 0.2 XII with uniform b.
inline vqls::LSEProblem three_qubit_system() {
    std::vector<vqls::PauliTerm> terms{{"III", 1.0}, {"XZI", 0.2}, {"XII", 0.2}};
    return vqls::make_pauli_problem(terms, vqls::RightHandSide::from_vector(Vec::Constant(8, 1.0 / std::sqrt(8.0))));
}

/// Depth-1 parameters whose state is |+> (cos t|0> + sin t|1>) |+>, tan t = 1.4,
/// which is the normalised solution of three_qubit_system().
inline vqls::AnsatzParams embedded_solution_params() {
    const double half_pi = std::acos(0.0);
    vqls::AnsatzParams p{3, 1, std::vector<double>(18, 0.0)};
    p.at(0, 0, 1) = half_pi;
    p.at(0, 1, 1) = 2.0 * std::atan(1.4);
    p.at(0, 2, 1) = half_pi;
    return p;
}

/// Random problem with m unitary terms, complex coefficients, random b.
inline vqls::LSEProblem random_unitary_problem(unsigned n, std::size_t m, std::mt19937_64 &rng, bool complex = true) {
    std::normal_distribution<double> g;
    std::vector<std::pair<Mat, cplx>> terms;
    for (std::size_t k = 0; k < m; ++k) {
        const cplx c = k == 0 ? cplx(1.5, 0.0) : cplx(0.4 * g(rng), complex ? 0.4 * g(rng) : 0.0);
        terms.emplace_back(random_unitary(Eigen::Index{1} << n, rng), c);
    }
    return vqls::make_unitary_problem(terms, vqls::RightHandSide::from_vector(random_state(Eigen::Index{1} << n, rng)));
}

} // namespace oracle
