#include "stirap/dressed.hpp"

#include "stirap/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stirap {

namespace {

/// Roots of Lambda^2 - Delta Lambda - x = 0 as (lower, upper), avoiding cancellation.
std::pair<double, double> quadratic_roots(double x, double delta) {
    const double s = std::sqrt(delta * delta + 4.0 * x);
    if (delta >= 0.0) {
        const double upper = 0.5 * (delta + s);
        return {upper == 0.0 ? 0.0 : -x / upper, upper};
    }
    const double lower = 0.5 * (delta - s);
    return {lower, -x / lower};
}

Eigen::Index dominant_index(const State& v) {
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    return idx;
}

}  // namespace

State canonical_phase(State v, double eps) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > eps) {
            v *= std::conj(v(i)) / a;
            v(i) = a;
            break;
        }
    }
    return v;
}

double eigen_residual(const Matrix& h, const State& v, double lambda) { return (h * v - lambda * v).norm(); }

Lambda3Dressed lambda3_dressed(double omega1, double omega2, double delta, double phase1, double phase2) {
    if (omega1 < 0.0 || omega2 < 0.0) throw InputError("lambda3_dressed: Rabi frequencies must be >= 0");
    if (!std::isfinite(delta)) throw InputError("lambda3_dressed: non-finite detuning");
    const double omega = std::hypot(omega1, omega2);
    if (omega == 0.0) throw DegenerateInputError("lambda3_dressed: mixing angle undefined when both fields vanish");

    Lambda3Dressed d;
    d.theta = std::atan2(omega1, omega2);
    d.phi = 0.5 * std::atan2(2.0 * omega, delta);
    const double st = std::sin(d.theta), ct = std::cos(d.theta);
    const double sp = std::sin(d.phi), cp = std::cos(d.phi);

    // Real-field eigenvectors, then the diagonal gauge that removes the coupling phases:
    // psi = diag(e^{i phase1}, 1, e^{-i phase2}) chi.
    const Complex u1 = std::polar(1.0, phase1);
    const Complex u3 = std::polar(1.0, -phase2);
    d.dark = State::Zero(3);
    d.dark << ct * u1, 0.0, -st * u3;
    d.bright1 = State::Zero(3);
    d.bright1 << st * cp * u1, sp, ct * cp * u3;
    d.bright2 = State::Zero(3);
    d.bright2 << -st * sp * u1, cp, -ct * sp * u3;

    const auto [lower, upper] = quadratic_roots(omega * omega, delta);
    d.eigenvalues = {0.0, lower, upper};
    d.dark = canonical_phase(d.dark);
    d.bright1 = canonical_phase(d.bright1);
    d.bright2 = canonical_phase(d.bright2);
    return d;
}

std::array<double, 5> five_eigenvalues_tied(double omega1, double omega2, double omega3, double delta) {
    const double x1 = omega1 * omega1;
    const double x2 = x1 + omega2 * omega2 + omega3 * omega3;
    const auto [l1, l3] = quadratic_roots(x1, delta);
    const auto [l2, l4] = quadratic_roots(x2, delta);
    return {0.0, l1, l2, l3, l4};
}

GeneralFiveSpectrum five_eigenvalues_general(double omega1, double omega2, double omega3, double omega4,
                                             double delta) {
    const double a = omega1 * omega1, b = omega2 * omega2, c = omega3 * omega3, e = omega4 * omega4;
    GeneralFiveSpectrum s;
    s.omega_s_sq = a + b + c + e;
    s.v4 = b * e + a * c + a * e;
    // Omega_s^4 - 4 V^4 rewritten as a sum of squares; the direct difference cancels near x_1 = x_2.
    const double split = a + b - c - e;
    const double disc = split * split + 4.0 * b * c;
    s.x2 = 0.5 * (s.omega_s_sq + std::sqrt(disc));
    s.x1 = s.x2 > 0.0 ? s.v4 / s.x2 : 0.0;
    const auto [l1, l3] = quadratic_roots(s.x1, delta);
    const auto [l2, l4] = quadratic_roots(s.x2, delta);
    s.lambdas = {0.0, l1, l2, l3, l4};
    std::sort(s.lambdas.begin(), s.lambdas.end());
    return s;
}

FiveDressed five_eigenvectors_tied(double omega1, double omega2, double omega3, double delta, double theta_limit) {
    if (omega1 < 0.0 || omega2 < 0.0 || omega3 < 0.0)
        throw InputError("five_eigenvectors_tied: Rabi frequencies must be >= 0");
    if (omega1 == 0.0 && delta <= 0.0)
        throw DegenerateInputError("five_eigenvectors_tied: phi1 undefined for Omega_1 = 0 and Delta <= 0");

    FiveDressed f;
    f.lambdas = five_eigenvalues_tied(omega1, omega2, omega3, delta);
    const double omega_sq = omega2 * omega2 + omega3 * omega3;
    const double omega = std::sqrt(omega_sq);
    const double x1 = omega1 * omega1;
    const double x2 = x1 + omega_sq;
    const double s1 = std::sqrt(delta * delta + 4.0 * x1);
    const double s2 = std::sqrt(delta * delta + 4.0 * x2);

    f.theta = omega == 0.0 ? theta_limit : std::atan2(omega2, omega3);
    // tan(phi1) = -Lambda_1 / Omega_1 = 2 Omega_1 / (Delta + S_1): finite as Omega_1 -> 0.
    f.phi1 = std::atan2(2.0 * omega1, delta + s1);
    // tan(phi2) = -Lambda_2 / Omega_1 = 2 x_2 / (Omega_1 (Delta + S_2)).
    const double cos2_num = omega1 * (delta + s2);
    f.phi2 = std::atan2(2.0 * x2, cos2_num);
    const double r = std::hypot(2.0 * x2, cos2_num);
    // tan(phi) = -(Omega / Omega_1) cos(phi2) = -Omega (Delta + S_2) / r.
    f.phi = -std::atan2(omega * (delta + s2), r);

    const double ct = std::cos(f.theta), st = std::sin(f.theta);
    const double c1 = std::cos(f.phi1), sn1 = std::sin(f.phi1);
    const double c2 = std::cos(f.phi2), sn2 = std::sin(f.phi2);
    const double cp = std::cos(f.phi), sp = std::sin(f.phi);

    f.vec_lambda1 = State::Zero(5);
    f.vec_lambda1 << ct * c1, ct * sn1, 0.0, -st * sn1, -st * c1;
    f.vec_lambda2 = State::Zero(5);
    f.vec_lambda2 << cp * st * c2, cp * st * sn2, -sp, cp * ct * sn2, cp * ct * c2;
    f.vec_lambda1 = canonical_phase(f.vec_lambda1);
    f.vec_lambda2 = canonical_phase(f.vec_lambda2);
    return f;
}

EigenPairs numeric_spectrum(const Matrix& h) {
    if (h.rows() != h.cols() || h.rows() < 1) throw DimensionError("numeric_spectrum: matrix must be square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InputError("numeric_spectrum: matrix is not Hermitian");

    const Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw AccuracyError("numeric_spectrum: eigensolver did not converge");

    const auto n = static_cast<std::size_t>(h.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const double tie = 1e-12 * scale;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        if (std::abs(vals(ia) - vals(ib)) > tie) return vals(ia) < vals(ib);
        return dominant_index(vecs.col(ia)) < dominant_index(vecs.col(ib));
    });

    EigenPairs out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (auto i : order) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.values.push_back(vals(ii));
        out.vectors.push_back(canonical_phase(vecs.col(ii)));
    }
    return out;
}

EigenPairs numeric_spectrum(const HamiltonianSample& h) { return numeric_spectrum(h.matrix); }

}  // namespace stirap
