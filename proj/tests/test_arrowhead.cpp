#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "f3c/arrowhead.hpp"

using f3c::SpectralDecomposition;

namespace {

Eigen::MatrixXd random_bordered(int n, int borders, bool couple_borders, std::mt19937_64& rng,
                                double weight_scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 10.0 * u(rng);
    for (int b = 0; b < borders; ++b) {
        for (int j = borders; j < n; ++j) m(b, j) = m(j, b) = weight_scale * u(rng);
    }
    if (couple_borders && borders == 2) m(0, 1) = m(1, 0) = u(rng);
    return m;
}

void check_against_dense(const Eigen::MatrixXd& m, double value_tol, double q_tol) {
    SpectralDecomposition got(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> want(m);
    const double scale = std::max(1.0, want.eigenvalues().cwiseAbs().maxCoeff());
    REQUIRE(got.dim() == m.rows());
    for (int k = 0; k < got.dim(); ++k) {
        CHECK(std::abs(got.eigenvalues()[k] - want.eigenvalues()[k]) < value_tol * scale);
    }
    const Eigen::MatrixXd q = got.materialize();
    const double ortho = (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols()))
                             .cwiseAbs()
                             .maxCoeff();
    CHECK(ortho < q_tol);
    const double resid =
        (m * q - q * got.eigenvalues().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff();
    CHECK(resid < q_tol * scale * 10.0);
}

}  // namespace

TEST_CASE("diagonal matrix: eigenvalues are the sorted diagonal") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
    m.diagonal() << 3.0, -1.0, 2.0, 0.5, -4.0;
    SpectralDecomposition d(m);
    CHECK(d.used_structured_path());
    Eigen::VectorXd expect(5);
    expect << -4.0, -1.0, 0.5, 2.0, 3.0;
    for (int k = 0; k < 5; ++k) CHECK(d.eigenvalues()[k] == expect[k]);
    const Eigen::MatrixXd q = d.materialize();
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("2x2 coupled block matches the closed form") {
    const double e1 = -0.3, e3 = 0.9, g = 0.2;
    Eigen::MatrixXd m(2, 2);
    m << e1, g, g, e3;
    SpectralDecomposition d(m);
    const double mid = 0.5 * (e1 + e3);
    const double split = std::sqrt(0.25 * (e1 - e3) * (e1 - e3) + g * g);
    CHECK(d.eigenvalues()[0] == doctest::Approx(mid - split).epsilon(1e-12));
    CHECK(d.eigenvalues()[1] == doctest::Approx(mid + split).epsilon(1e-12));
}

TEST_CASE("single border row agrees with the dense solver") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        check_against_dense(random_bordered(60, 1, false, rng), 1e-12, 1e-11);
    }
}

TEST_CASE("two border rows, with and without mutual coupling") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 4; ++rep) {
        check_against_dense(random_bordered(50, 2, false, rng), 1e-12, 1e-11);
        check_against_dense(random_bordered(50, 2, true, rng), 1e-12, 1e-11);
    }
}

TEST_CASE("weak couplings stay accurate near poles") {
    std::mt19937_64 rng(13);
    check_against_dense(random_bordered(80, 2, true, rng, 1e-5), 1e-12, 1e-10);
    check_against_dense(random_bordered(80, 1, false, rng, 1e-9), 1e-12, 1e-10);
}

TEST_CASE("repeated diagonal entries are handled") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    m.diagonal() << 0.0, 1.0, 1.0, 1.0, 2.0, 2.0;
    for (int j = 1; j < 6; ++j) m(0, j) = m(j, 0) = 0.3 + 0.1 * j;
    check_against_dense(m, 1e-12, 1e-11);
}

TEST_CASE("dense fallback on unstructured input") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(20, 20);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
    }
    SpectralDecomposition d(m);
    CHECK(!d.used_structured_path());
    check_against_dense(m, 1e-12, 1e-12);
}

TEST_CASE("orthonormality at moderate production-like size") {
    // flat couplings into a uniform bin lattice plus a g-coupled second level,
    // the shape the continuum discretization produces
    const int bins = 300;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(bins + 2, bins + 2);
    m(0, 0) = 0.0;
    m(1, 1) = -1.0;
    m(0, 1) = m(1, 0) = 0.2;
    const double lo = -20.0, hi = 21.0;
    const double delta = (hi - lo) / bins;
    for (int k = 0; k < bins; ++k) m(2 + k, 2 + k) = lo + (k + 0.5) * delta;
    const double w = std::sqrt(0.4 / (2.0 * std::acos(-1.0))) * std::sqrt(delta);
    for (int k = 0; k < bins; ++k) m(0, 2 + k) = m(2 + k, 0) = w;
    SpectralDecomposition d(m);
    CHECK(d.used_structured_path());
    const Eigen::MatrixXd q = d.materialize();
    const double ortho = (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols()))
                             .cwiseAbs()
                             .maxCoeff();
    CHECK(ortho < 1e-10);
    // row extraction matches the materialized matrix
    for (int row : {0, 1, 57}) {
        const Eigen::VectorXd r = d.basis_row(row);
        CHECK((r.transpose() - q.row(row)).cwiseAbs().maxCoeff() == 0.0);
    }
    // trace conservation
    CHECK(d.eigenvalues().sum() == doctest::Approx(m.trace()).epsilon(1e-8));
}
