#include "dense.hpp"

namespace aimdmft::dense {

Matrix pauli_letter(char letter) {
    Matrix m(2, 2);
    const Cplx i(0.0, 1.0);
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw PauliError("bad Pauli letter");
    }
    return m;
}

Matrix term_matrix(const PauliTerm& t) {
    // Qubit 0 is the least significant bit of the state index: build the
    // Kronecker product innermost-first so higher qubits end up outermost.
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < t.n; ++q) {
        int code = static_cast<int>((t.x_bits >> q) & 1) +
                   2 * static_cast<int>((t.z_bits >> q) & 1);
        static const char letters[4] = {'I', 'X', 'Z', 'Y'};
        Matrix p = pauli_letter(letters[code]);
        Matrix next(m.rows() * 2, m.cols() * 2);
        next.block(0, 0, m.rows(), m.cols()) = p(0, 0) * m;
        next.block(0, m.cols(), m.rows(), m.cols()) = p(0, 1) * m;
        next.block(m.rows(), 0, m.rows(), m.cols()) = p(1, 0) * m;
        next.block(m.rows(), m.cols(), m.rows(), m.cols()) = p(1, 1) * m;
        m = std::move(next);
    }
    const Cplx i(0.0, 1.0);
    Cplx phase = 1.0;
    for (int k = 0; k < (t.phase_pow & 3); ++k) phase *= i;
    return t.coeff * phase * m;
}

Matrix sum_matrix(const PauliSum& s) {
    const long dim = 1L << s.n();
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < s.size(); ++k) {
        m += term_matrix(s.term_at(k));
    }
    return m;
}

Matrix string_exponential(double theta, const PauliTerm& t) {
    if (!t.is_hermitian()) throw PauliError("string_exponential needs a Hermitian term");
    PauliTerm unit = t;
    unit.coeff = 1.0;
    unit.phase_pow = 0;
    double eff = theta * t.coeff * t.sign();
    const long dim = 1L << t.n;
    const Cplx i(0.0, 1.0);
    return std::cos(eff) * Matrix::Identity(dim, dim) +
           i * std::sin(eff) * term_matrix(unit);
}

Eigensystem hermitian_eigen(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw PauliError("eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix evolution_operator(const Eigensystem& es, double t) {
    const Cplx i(0.0, 1.0);
    Vector phases(es.values.size());
    for (long k = 0; k < es.values.size(); ++k) {
        phases[k] = std::exp(-i * t * es.values[k]);
    }
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

Matrix evolution_operator(const Matrix& h, double t) {
    return evolution_operator(hermitian_eigen(h), t);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    return (a - b).norm();
}

double phase_aligned_distance(const Matrix& a, const Matrix& b) {
    Cplx overlap = (a.adjoint() * b).trace();
    Cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Cplx(1.0, 0.0);
    return (a - phase * b).norm();
}

}  // namespace aimdmft::dense
