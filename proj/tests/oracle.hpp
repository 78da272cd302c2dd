#pragma once

// Test-side dense oracle, independent of the symplectic Pauli implementation:
// matrices are built directly from letter strings by Kronecker products and
// all algebra (products, commutators, traces) is done with Eigen.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <string>

namespace oracle {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix letter(char c) {
    Matrix m(2, 2);
    const Cplx i(0.0, 1.0);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::runtime_error("bad letter");
    }
    return m;
}

// Qubit 0 = leftmost letter = least significant bit of the index.
inline Matrix string_matrix(const std::string& letters) {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : letters) {
        Matrix p = letter(c);
        Matrix next(m.rows() * 2, m.cols() * 2);
        next.block(0, 0, m.rows(), m.cols()) = p(0, 0) * m;
        next.block(0, m.cols(), m.rows(), m.cols()) = p(0, 1) * m;
        next.block(m.rows(), 0, m.rows(), m.cols()) = p(1, 0) * m;
        next.block(m.rows(), m.cols(), m.rows(), m.cols()) = p(1, 1) * m;
        m = std::move(next);
    }
    return m;
}

inline std::string random_string(int n, std::mt19937_64& rng, bool non_identity = false) {
    static const char letters[] = {'I', 'X', 'Y', 'Z'};
    std::uniform_int_distribution<int> pick(0, 3);
    std::string s;
    do {
        s.clear();
        for (int q = 0; q < n; ++q) s += letters[pick(rng)];
    } while (non_identity && s == std::string(static_cast<std::size_t>(n), 'I'));
    return s;
}

inline Cplx normalized_trace(const Matrix& m) {
    return m.trace() / static_cast<double>(m.rows());
}

}  // namespace oracle
