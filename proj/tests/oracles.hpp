#pragma once

// Independent reference computations used by the tests. None of these call into the library's
// integrator or closed-form dressed-state code.

#include "stirap/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using stirap::Complex;
using stirap::Matrix;
using stirap::State;

/// exp(-i H t) psi for a constant Hermitian H, through the general complex eigensolver.
inline State propagate_constant(const Matrix& h, const State& psi, double t) {
    const Eigen::MatrixXcd hd = h;
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(hd);
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::MatrixXcd vinv = v.inverse();
    Eigen::VectorXcd phase(hd.rows());
    for (Eigen::Index i = 0; i < hd.rows(); ++i)
        phase(i) = std::exp(Complex(0.0, -1.0) * es.eigenvalues()(i) * t);
    const Eigen::VectorXcd out = v * phase.asDiagonal() * vinv * Eigen::VectorXcd(psi);
    return out;
}

/// Excited population of a two-level atom with H = [[0, -omega], [-omega, delta]] started in |1>.
inline double rabi_excited(double omega, double delta, double t) {
    const double w = std::sqrt(delta * delta + 4.0 * omega * omega);
    const double s = std::sin(0.5 * w * t);
    return 4.0 * omega * omega / (w * w) * s * s;
}

/// Quasi-static excited population of the lower dressed two-level state: (1 - Delta / sqrt(Delta^2 + 4 Omega^2)) / 2.
inline double adiabatic_two_level_excitation(double omega, double delta) {
    return 0.5 * (1.0 - delta / std::sqrt(delta * delta + 4.0 * omega * omega));
}

/// |det(H - lambda I)| normalised by scale^n; vanishes at every eigenvalue.
inline double char_poly(const Matrix& h, double lambda) {
    const Eigen::Index n = h.rows();
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() + std::abs(lambda));
    const Eigen::MatrixXcd m = Eigen::MatrixXcd(h) - lambda * Eigen::MatrixXcd::Identity(n, n);
    return std::abs(m.determinant()) / std::pow(scale, static_cast<double>(n));
}

/// Eigenvalues from the general (non-Hermitian) solver, real parts sorted.
inline std::vector<double> general_eigenvalues(const Matrix& h) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
    std::vector<double> out;
    for (Eigen::Index i = 0; i < h.rows(); ++i) out.push_back(es.eigenvalues()(i).real());
    std::sort(out.begin(), out.end());
    return out;
}

/// Eigenvalues from the Hermitian solver, ascending; accurate near degeneracies.
inline std::vector<double> hermitian_eigenvalues(const Matrix& h) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
    const Eigen::VectorXd v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

/// Resonant chain Hamiltonian written out by hand: ladder (0, d, 0, d, 0) truncated, couplings -omega_k.
inline Matrix chain(std::initializer_list<double> ladder, std::initializer_list<double> omegas) {
    const auto n = static_cast<Eigen::Index>(ladder.size());
    Matrix h = Matrix::Zero(n, n);
    Eigen::Index i = 0;
    for (double d : ladder) {
        h(i, i) = d;
        ++i;
    }
    i = 0;
    for (double o : omegas) {
        h(i, i + 1) = -o;
        h(i + 1, i) = -o;
        ++i;
    }
    return h;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace oracle
