#pragma once

#include <Eigen/Dense>
#include <complex>

#include "pauli.hpp"

// Dense-matrix helpers over 2^n-dimensional spaces. This is the exact
// (brute-force) side of the project: matrix forms of Pauli sums, Hermitian
// eigendecompositions, and matrix exponentials used for verification and for
// the Lehmann-representation solver.

namespace aimdmft::dense {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Matrix pauli_letter(char letter);  // 2x2 I/X/Y/Z

// Dense matrix of a PauliTerm including its coefficient and phase.
Matrix term_matrix(const PauliTerm& t);

Matrix sum_matrix(const PauliSum& s);

// e^{i theta P} = cos(theta) I + i sin(theta) P for a unit Pauli string P
// (phase and coefficient of `t` are folded into the effective angle).
Matrix string_exponential(double theta, const PauliTerm& t);

struct Eigensystem {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // columns
};

// Hermitian eigendecomposition (Eigen::SelfAdjointEigenSolver).
Eigensystem hermitian_eigen(const Matrix& h);

// e^{-i t H} for Hermitian H via its eigendecomposition.
Matrix evolution_operator(const Eigensystem& es, double t);
Matrix evolution_operator(const Matrix& h, double t);

double frobenius_distance(const Matrix& a, const Matrix& b);

// min over global phase of ||a - e^{i phi} b||_F (phi from tr(a^dag b)).
double phase_aligned_distance(const Matrix& a, const Matrix& b);

}  // namespace aimdmft::dense
