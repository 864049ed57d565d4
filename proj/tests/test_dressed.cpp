#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "stirap/dressed.hpp"
#include "stirap/errors.hpp"

#include <cmath>
#include <numbers>

using namespace stirap;

namespace {

Matrix lambda3_h(double o1, double o2, double delta, double ph1 = 0.0, double ph2 = 0.0) {
    const double ladder[] = {0.0, delta, 0.0};
    const double rabi[] = {o1, o2};
    const double phases[] = {ph1, ph2};
    return assemble_hamiltonian(ladder, rabi, phases);
}

Matrix five_h(double o1, double o2, double o3, double o4, double delta) {
    const double ladder[] = {0.0, delta, 0.0, delta, 0.0};
    const double rabi[] = {o1, o2, o3, o4};
    const double phases[] = {0.0, 0.0, 0.0, 0.0};
    return assemble_hamiltonian(ladder, rabi, phases);
}

std::size_t nearest(const EigenPairs& p, double lambda) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.values.size(); ++i)
        if (std::abs(p.values[i] - lambda) < std::abs(p.values[best] - lambda)) best = i;
    return best;
}

}  // namespace

TEST_CASE("lambda dark state with the pump off is the initial level") {
    const auto d = lambda3_dressed(0.0, 5.0, 50.0);
    CHECK(d.theta == 0.0);
    CHECK(std::abs(d.dark(0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(d.dark(1)) == 0.0);
    CHECK(std::abs(d.dark(2)) < 1e-15);
}

TEST_CASE("equal lambda fields give the antisymmetric dark state") {
    const auto d = lambda3_dressed(10.0, 10.0, 50.0);
    CHECK(d.theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(std::abs(d.dark(0) - Complex(1 / std::sqrt(2.0))) < 1e-14);
    CHECK(std::abs(d.dark(2) - Complex(-1 / std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("lambda dressed states are eigenvectors of the model Hamiltonian") {
    for (auto [o1, o2, delta, ph1, ph2] : {std::array<double, 5>{30, 40, 50, 0, 0}, {30, 40, 50, 0.4, -1.3},
                                           {1e-3, 80, 5, 0, 0}, {120, 2, 150, 2.0, 0.1}, {10, 10, 0, 0, 0}}) {
        const auto d = lambda3_dressed(o1, o2, delta, ph1, ph2);
        const Matrix h = lambda3_h(o1, o2, delta, ph1, ph2);
        CHECK(eigen_residual(h, d.dark, d.eigenvalues[0]) < 1e-8);
        CHECK(eigen_residual(h, d.bright1, d.eigenvalues[1]) < 1e-8);
        CHECK(eigen_residual(h, d.bright2, d.eigenvalues[2]) < 1e-8);
        CHECK(d.dark(1) == Complex(0.0));
        CHECK(std::tan(d.theta) == doctest::Approx(o1 / o2));
        // Orthonormal triple.
        const State vs[] = {d.dark, d.bright1, d.bright2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(vs[i].dot(vs[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("lambda dressed state needs at least one field") {
    CHECK_THROWS_AS(lambda3_dressed(0.0, 0.0, 50.0), DegenerateInputError);
    CHECK_THROWS_AS(lambda3_dressed(-1.0, 1.0, 50.0), InputError);
}

TEST_CASE("five-level eigenvalues with all fields off") {
    const auto l = five_eigenvalues_tied(0, 0, 0, 50);
    CHECK(l == std::array<double, 5>{0, 0, 0, 50, 50});
}

TEST_CASE("five-level eigenvalues collapse pairwise without the short pulses") {
    const auto l = five_eigenvalues_tied(100, 0, 0, 50);
    const double lower = 0.5 * (50 - std::sqrt(2500.0 + 40000.0));
    const double upper = 0.5 * (50 + std::sqrt(2500.0 + 40000.0));
    CHECK(l[1] == doctest::Approx(lower).epsilon(1e-14));
    CHECK(l[2] == doctest::Approx(lower).epsilon(1e-14));
    CHECK(l[3] == doctest::Approx(upper).epsilon(1e-14));
    CHECK(l[4] == doctest::Approx(upper).epsilon(1e-14));
}

TEST_CASE("five-level eigenvalues at a generic point match the characteristic polynomial") {
    const auto l = five_eigenvalues_tied(100, 60, 80, 50);
    const Matrix h = five_h(100, 60, 80, 100, 50);
    auto sorted = std::vector<double>(l.begin(), l.end());
    std::sort(sorted.begin(), sorted.end());
    const auto reference = oracle::general_eigenvalues(h);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(sorted[i] - reference[i]) <= 1e-10 * std::max(1.0, std::abs(reference[i])));
        CHECK(oracle::char_poly(h, l[i]) < 1e-12);
    }
}

TEST_CASE("general spectrum of a hand-solvable chain") {
    const auto s = five_eigenvalues_general(1, 0, 0, 1, 0);
    CHECK(s.v4 == doctest::Approx(1.0));
    CHECK(s.omega_s_sq == doctest::Approx(2.0));
    CHECK(s.x1 == doctest::Approx(1.0));
    CHECK(s.x2 == doctest::Approx(1.0));
    const std::array<double, 5> expected{-1, -1, 0, 1, 1};
    for (int i = 0; i < 5; ++i) CHECK(s.lambdas[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    const auto zero = five_eigenvalues_general(0, 0, 0, 0, 50);
    CHECK(zero.lambdas == std::array<double, 5>{0, 0, 0, 50, 50});
}

TEST_CASE("general spectrum reduces to the tied spectrum when Omega_4 = Omega_1") {
    for (int i = 0; i < 200; ++i) {
        const double o1 = oracle::uniform(0, 150), o2 = oracle::uniform(0, 150), o3 = oracle::uniform(0, 150);
        const double delta = oracle::uniform(0, 150);
        const auto g = five_eigenvalues_general(o1, o2, o3, o1, delta);
        CHECK(g.x1 == doctest::Approx(o1 * o1).epsilon(1e-10));
        CHECK(g.x2 == doctest::Approx(o1 * o1 + o2 * o2 + o3 * o3).epsilon(1e-10));
        auto tied = five_eigenvalues_tied(o1, o2, o3, delta);
        std::sort(tied.begin(), tied.end());
        for (int k = 0; k < 5; ++k)
            CHECK(std::abs(g.lambdas[k] - tied[k]) <= 1e-10 * std::max(1.0, std::abs(tied[k])));
    }
}

TEST_CASE("Vieta relations, discriminant sign and the zero eigenvalue hold on random chains") {
    for (int i = 0; i < 500; ++i) {
        const double o[] = {oracle::uniform(0, 150), oracle::uniform(0, 150), oracle::uniform(0, 150),
                            oracle::uniform(0, 150)};
        const double delta = oracle::uniform(-150, 150);
        const auto g = five_eigenvalues_general(o[0], o[1], o[2], o[3], delta);
        CHECK(g.omega_s_sq * g.omega_s_sq - 4 * g.v4 >= -1e-12 * g.omega_s_sq * g.omega_s_sq);
        CHECK(g.x1 * g.x2 == doctest::Approx(g.v4).epsilon(1e-10));
        CHECK(g.x1 + g.x2 == doctest::Approx(g.omega_s_sq).epsilon(1e-10));
        CHECK(std::find(g.lambdas.begin(), g.lambdas.end(), 0.0) != g.lambdas.end());
        const Matrix h = five_h(o[0], o[1], o[2], o[3], delta);
        const auto reference = oracle::general_eigenvalues(h);
        for (int k = 0; k < 5; ++k)
            CHECK(std::abs(g.lambdas[k] - reference[k]) <= 1e-9 * std::max(1.0, std::abs(reference[k])));
    }
}

TEST_CASE("five-level eigenvectors at a generic point") {
    const auto f = five_eigenvectors_tied(100, 60, 80, 50);
    const Matrix h = five_h(100, 60, 80, 100, 50);
    CHECK(eigen_residual(h, f.vec_lambda1, f.lambdas[1]) < 1e-8);
    CHECK(eigen_residual(h, f.vec_lambda2, f.lambdas[2]) < 1e-8);
    CHECK(f.vec_lambda1(2) == Complex(0.0));
    CHECK(f.vec_lambda1.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.vec_lambda2.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(f.vec_lambda1.dot(f.vec_lambda2)) < 1e-12);
    CHECK(std::tan(f.theta) == doctest::Approx(60.0 / 80.0));
    CHECK(std::tan(f.phi1) == doctest::Approx(-f.lambdas[1] / 100.0).epsilon(1e-12));
    CHECK(std::tan(f.phi2) == doctest::Approx(-f.lambdas[2] / 100.0).epsilon(1e-12));
    CHECK(std::tan(f.phi) == doctest::Approx(-(100.0 / 100.0) * std::cos(f.phi2)).epsilon(1e-12));
}

TEST_CASE("Lambda_1 eigenvector limits") {
    SUBCASE("Omega_1 -> 0 leaves cos(theta)|1> - sin(theta)|5>") {
        const auto f = five_eigenvectors_tied(0.0, 3.0, 4.0, 50.0);
        const double th = std::atan(0.75);
        CHECK(std::abs(f.vec_lambda1(0) - Complex(std::cos(th))) < 1e-14);
        CHECK(std::abs(f.vec_lambda1(4) - Complex(-std::sin(th))) < 1e-14);
        CHECK(std::abs(f.vec_lambda1(1)) < 1e-14);
        CHECK(std::abs(f.vec_lambda1(3)) < 1e-14);
    }
    SUBCASE("small Omega_1 follows tan(phi1) ~ Omega_1 / Delta") {
        const auto f = five_eigenvectors_tied(1e-6, 3.0, 4.0, 50.0);
        CHECK(std::tan(f.phi1) == doctest::Approx(1e-6 / 50.0).epsilon(1e-8));
    }
    SUBCASE("Omega_3 >> Omega_2 keeps the vector on |1> and |2>") {
        const auto f = five_eigenvectors_tied(100.0, 1e-9, 100.0, 50.0);
        CHECK(std::abs(f.vec_lambda1(3)) < 1e-10);
        CHECK(std::abs(f.vec_lambda1(4)) < 1e-10);
        CHECK(std::norm(f.vec_lambda1(0)) + std::norm(f.vec_lambda1(1)) == doctest::Approx(1.0));
    }
    SUBCASE("undefined angle") { CHECK_THROWS_AS(five_eigenvectors_tied(0.0, 3.0, 4.0, 0.0), DegenerateInputError); }
}

TEST_CASE("analytic vectors obey Hellmann-Feynman against finite differences of the analytic energies") {
    // d Lambda / d Omega_1 = <v| dH/dOmega_1 |v>, with dH/dOmega_1 = -1 on the (1,2) and (4,5) couplings.
    for (int i = 0; i < 100; ++i) {
        const double o1 = oracle::uniform(5, 150), o2 = oracle::uniform(5, 150), o3 = oracle::uniform(5, 150);
        const double delta = oracle::uniform(5, 150);
        const auto f = five_eigenvectors_tied(o1, o2, o3, delta);
        const double h = 1e-5 * o1;
        const auto up = five_eigenvalues_tied(o1 + h, o2, o3, delta);
        const auto dn = five_eigenvalues_tied(o1 - h, o2, o3, delta);
        for (int k : {1, 2}) {
            const State& v = k == 1 ? f.vec_lambda1 : f.vec_lambda2;
            const double hf = -2.0 * std::real(std::conj(v(0)) * v(1)) - 2.0 * std::real(std::conj(v(3)) * v(4));
            const double fd = (up[k] - dn[k]) / (2 * h);
            CHECK(hf == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("numeric spectrum of a diagonal matrix") {
    const Matrix h = oracle::chain({0.0, 50.0, 0.0}, {0.0, 0.0});
    const auto p = numeric_spectrum(h);
    CHECK(p.values == std::vector<double>{0.0, 0.0, 50.0});
    // Ties ordered by the dominant bare component.
    CHECK(std::abs(p.vectors[0](0)) == doctest::Approx(1.0));
    CHECK(std::abs(p.vectors[1](2)) == doctest::Approx(1.0));
}

TEST_CASE("numeric spectrum: residuals, orthonormality, shift invariance, phase convention") {
    for (int i = 0; i < 100; ++i) {
        const Matrix h = five_h(oracle::uniform(0, 150), oracle::uniform(0, 150), oracle::uniform(0, 150),
                                oracle::uniform(0, 150), oracle::uniform(-150, 150));
        const auto p = numeric_spectrum(h);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(eigen_residual(h, p.vectors[k], p.values[k]) < 1e-11 * std::max(1.0, h.cwiseAbs().maxCoeff()));
            for (std::size_t m = 0; m < 5; ++m)
                CHECK(std::abs(p.vectors[k].dot(p.vectors[m]) - (k == m ? 1.0 : 0.0)) < 1e-10);
            for (Eigen::Index c = 0; c < 5; ++c) {
                if (std::abs(p.vectors[k](c)) > 1e-14) {
                    CHECK(p.vectors[k](c).imag() == 0.0);
                    CHECK(p.vectors[k](c).real() > 0.0);
                    break;
                }
            }
        }
        const double c = oracle::uniform(-50, 50);
        const auto shifted = numeric_spectrum(Matrix(h + c * Matrix::Identity(5, 5)));
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(shifted.values[k] == doctest::Approx(p.values[k] + c).epsilon(1e-10).scale(100));
            CHECK(std::abs(std::abs(shifted.vectors[k].dot(p.vectors[k])) - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("numeric spectrum rejects non-Hermitian and non-square input") {
    Matrix h = oracle::chain({0.0, 1.0}, {1.0});
    h(0, 1) = Complex(1.0, 0.5);
    CHECK_THROWS_AS(numeric_spectrum(h), InputError);
    CHECK_THROWS_AS(numeric_spectrum(Matrix(Matrix::Zero(2, 3))), DimensionError);
}

TEST_CASE("numeric oracle confirms the structural zeros of the analytic states") {
    for (int i = 0; i < 200; ++i) {
        const double o1 = oracle::uniform(5, 150), o2 = oracle::uniform(5, 150), o3 = oracle::uniform(5, 150);
        const double delta = oracle::uniform(5, 150);
        const auto p3 = numeric_spectrum(lambda3_h(o1, o2, delta));
        CHECK(std::abs(p3.vectors[nearest(p3, 0.0)](1)) < 1e-10);
        const auto f = five_eigenvectors_tied(o1, o2, o3, delta);
        const auto p5 = numeric_spectrum(five_h(o1, o2, o3, o1, delta));
        const State& v = p5.vectors[nearest(p5, f.lambdas[1])];
        CHECK(std::abs(v(2)) < 1e-10);
        CHECK(std::abs(std::abs(v.dot(f.vec_lambda1)) - 1.0) < 1e-9);
    }
}
