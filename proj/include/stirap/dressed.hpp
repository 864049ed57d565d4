#pragma once

#include "stirap/model.hpp"

#include <array>
#include <vector>

namespace stirap {

// Closed-form dressed states of the Lambda system and of the five-level chain with Omega_4 = Omega_1.
//
// Vectors are eigenvectors of the chain Hamiltonian exactly as assembled by build_hamiltonian, i.e. with
// couplings -Omega_k. The textbook forms are usually written for +Omega couplings; the two differ by the
// gauge diag(1, -1, 1, -1, 1), which is why |2> and |4> enter below with a + sign.
//
// Every returned vector follows one phase convention: its first nonzero component is real and positive.

/// Dark state plus the two bright states of the resonant Lambda system.
struct Lambda3Dressed {
    /// tan(theta) = Omega_1 / Omega_2, theta in [0, pi/2].
    double theta = 0.0;
    /// tan(2 phi) = 2 Omega / Delta with Omega = sqrt(Omega_1^2 + Omega_2^2).
    double phi = 0.0;
    State dark;
    /// Bright state with the lower eigenvalue (Delta - sqrt(Delta^2 + 4 Omega^2)) / 2.
    State bright1;
    /// Bright state with the upper eigenvalue. Built as the orthonormal complement of dark and bright1.
    State bright2;
    /// Eigenvalues of (dark, bright1, bright2).
    std::array<double, 3> eigenvalues{};
};

/// Throws DegenerateInputError when both fields vanish (theta undefined).
Lambda3Dressed lambda3_dressed(double omega1, double omega2, double delta, double phase1 = 0.0, double phase2 = 0.0);

/// Eigenvalues labelled (Lambda_0, ..., Lambda_4) for the tied chain:
/// Lambda_0 = 0, Lambda_{1,3} = (Delta -/+ sqrt(Delta^2 + 4 Omega_1^2)) / 2,
/// Lambda_{2,4} = (Delta -/+ sqrt(Delta^2 + 4 (Omega_1^2 + Omega_2^2 + Omega_3^2))) / 2.
std::array<double, 5> five_eigenvalues_tied(double omega1, double omega2, double omega3, double delta);

/// Spectrum of the resonant five-level chain for arbitrary Omega_1..Omega_4 via the quadratic
/// x^2 - Omega_s^2 x + V^4 = 0 in x = Lambda (Lambda - Delta).
struct GeneralFiveSpectrum {
    double x1 = 0.0;
    double x2 = 0.0;
    /// Ascending.
    std::array<double, 5> lambdas{};
    double omega_s_sq = 0.0;
    double v4 = 0.0;
};

GeneralFiveSpectrum five_eigenvalues_general(double omega1, double omega2, double omega3, double omega4,
                                             double delta);

struct FiveDressed {
    /// Labelled Lambda_0..Lambda_4 as in five_eigenvalues_tied.
    std::array<double, 5> lambdas{};
    /// tan(theta) = Omega_2 / Omega_3.
    double theta = 0.0;
    /// tan(phi1) = -Lambda_1 / Omega_1. Some texts write this angle in lowercase; it is the same symbol.
    double phi1 = 0.0;
    /// tan(phi2) = -Lambda_2 / Omega_1.
    double phi2 = 0.0;
    /// tan(phi) = -(Omega / Omega_1) cos(phi2), Omega^2 = Omega_2^2 + Omega_3^2.
    double phi = 0.0;
    /// cos(theta) psi_1 - sin(theta) psi_2; no |3> component.
    State vec_lambda1;
    /// cos(phi) sin(theta) psi'_1 - sin(phi) |3> + cos(phi) cos(theta) psi'_2.
    State vec_lambda2;
};

/// Closed-form |Lambda_1>, |Lambda_2> of the tied chain. When Omega_2 = Omega_3 = 0 the mixing angle is
/// undefined and `theta_limit` is used instead (0 = the limit before an Omega_3-first sequence).
/// Throws DegenerateInputError when Omega_1 = 0 and Delta <= 0 (|1> and |2> degenerate).
FiveDressed five_eigenvectors_tied(double omega1, double omega2, double omega3, double delta,
                                   double theta_limit = 0.0);

/// Full eigendecomposition of a Hermitian chain Hamiltonian.
struct EigenPairs {
    /// Ascending; ties ordered by the index of the dominant bare-state component.
    std::vector<double> values;
    std::vector<State> vectors;
};

/// Throws InputError if the matrix is not Hermitian to 1e-12 (relative to its largest entry).
EigenPairs numeric_spectrum(const Matrix& h);
EigenPairs numeric_spectrum(const HamiltonianSample& h);

/// Multiplies v by the phase that makes its first component above `eps` real and positive.
State canonical_phase(State v, double eps = 1e-14);

/// ||H v - lambda v||.
double eigen_residual(const Matrix& h, const State& v, double lambda);

}  // namespace stirap
