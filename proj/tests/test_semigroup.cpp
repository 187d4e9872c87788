#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ondelay/errors.hpp"
#include "ondelay/semigroup.hpp"
#include "oracles.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace ondelay;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ConfigError;
}

// Independent check of an envelope on a dense grid, using the Taylor oracle exponential.
bool holds_on_grid(const Matrix& a, const SemigroupEnvelope& env, int points) {
    const double end = std::min(5.0 / env.mu, env.verified_horizon);
    for (int k = 0; k <= points; ++k) {
        const double t = end * k / points;
        const double n = Eigen::JacobiSVD<Matrix>(oracle::taylor_expm(t * a)).singularValues()(0);
        if (n > env.M * std::exp(-env.mu * t) * (1 + 1e-8)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("scaled identity: every strategy gives M = 1 and mu = a") {
    const Matrix a = -2.0 * Matrix::Identity(3, 3);
    const auto g = InnerProduct::identity(3);
    for (auto s : {EnvelopeStrategy::numerical_abscissa, EnvelopeStrategy::eigen_conditioning,
                   EnvelopeStrategy::sampled_fit}) {
        const auto env = estimate_envelope(a, g, s);
        CAPTURE(to_string(s));
        CHECK(env.M == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(env.mu == doctest::Approx(2.0).epsilon(1e-5));
        CHECK(env.certified);
    }
}

TEST_CASE("rotation minus identity") {
    Matrix a(2, 2);
    a << -1, 1, -1, -1;
    const auto env = estimate_envelope(a, InnerProduct::identity(2), EnvelopeStrategy::numerical_abscissa);
    CHECK(env.M == 1.0);
    CHECK(env.mu == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("non-normal Jordan-like generator") {
    Matrix a(2, 2);
    a << -1, 10, 0, -1;
    const auto g = InnerProduct::identity(2);
    CHECK(code_of([&] { (void)estimate_envelope(a, g, EnvelopeStrategy::numerical_abscissa); }) ==
          ErrorCode::NumericalAbscissaNotNegative);
    CHECK(code_of([&] { (void)estimate_envelope(a, g, EnvelopeStrategy::eigen_conditioning); }) ==
          ErrorCode::DefectiveEigenbasis);
    const auto env = estimate_envelope(a, g, EnvelopeStrategy::sampled_fit);
    CHECK(env.mu > 0.0);
    CHECK(env.mu <= 1.0);
    CHECK(env.M >= 1.0);
    CHECK(env.certified);
    CHECK(holds_on_grid(a, env, 1000));
}

TEST_CASE("eigen_conditioning on a diagonalizable non-normal generator") {
    Matrix a(2, 2);
    a << -1, 3, 0, -2;
    const auto env = estimate_envelope(a, InnerProduct::identity(2), EnvelopeStrategy::eigen_conditioning);
    CHECK(env.mu == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(env.M > 1.0);
    CHECK(env.certified);
    CHECK(holds_on_grid(a, env, 1000));
}

TEST_CASE("unstable and marginal generators") {
    Matrix skew(2, 2);
    skew << 0, 1, -1, 0;
    for (auto s : {EnvelopeStrategy::numerical_abscissa, EnvelopeStrategy::sampled_fit}) {
        CHECK(code_of([&] { (void)estimate_envelope(skew, InnerProduct::identity(2), s); }) ==
              ErrorCode::NotExponentiallyStable);
    }
    CHECK(code_of([&] {
              (void)estimate_envelope(Matrix::Identity(2, 2), InnerProduct::identity(2),
                                      EnvelopeStrategy::sampled_fit);
          }) == ErrorCode::NotExponentiallyStable);
}

TEST_CASE("modal blocks give the same envelope as the assembled direct sum") {
    Matrix a1(2, 2);
    a1 << -0.5, 2, -2, -0.5;
    Matrix a2(2, 2);
    a2 << -1, 4, 0, -1.5;
    Matrix g2(2, 2);
    g2 << 2, 0.3, 0.3, 1;
    std::vector<ModalBlock> blocks{{a1, InnerProduct::identity(2)}, {a2, InnerProduct(g2)}};
    Matrix full = Matrix::Zero(4, 4);
    full.topLeftCorner(2, 2) = a1;
    full.bottomRightCorner(2, 2) = a2;
    Matrix gfull = Matrix::Identity(4, 4);
    gfull.bottomRightCorner(2, 2) = g2;
    const auto by_block = estimate_envelope(blocks, EnvelopeStrategy::sampled_fit);
    const auto dense = estimate_envelope(full, InnerProduct(gfull), EnvelopeStrategy::sampled_fit);
    CHECK(by_block.mu == doctest::Approx(dense.mu).epsilon(1e-9));
    CHECK(by_block.M == doctest::Approx(dense.M).epsilon(1e-9));
}

TEST_CASE("weighted norms: semigroup_norm agrees with the Gram definition") {
    Matrix a(2, 2);
    a << -1, 2, -3, -0.5;
    Matrix gm(2, 2);
    gm << 3, 1, 1, 2;
    const InnerProduct g(gm);
    const Matrix e = oracle::taylor_expm(0.8 * a);
    // max_x sqrt(x^T E^T G E x / x^T G x): largest generalized eigenvalue.
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(e.transpose() * gm * e, gm);
    const double expected = std::sqrt(ges.eigenvalues().maxCoeff());
    CHECK(semigroup_norm(a, g, 0.8) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("t_star and contraction factors") {
    CHECK(t_star(pinned_envelope(1.0, 0.7)) == 0.0);
    CHECK(t_star(pinned_envelope(std::exp(1.0), 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t_star(pinned_envelope(2.0, 0.5)) == doctest::Approx(1.3862943611198906).epsilon(1e-15));

    CHECK(contraction_factor(pinned_envelope(1.0, 1.0), std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(contraction_factor(pinned_envelope(2.0, 1.0), std::log(4.0)) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(code_of([] { (void)contraction_factor(pinned_envelope(2.0, 1.0), 0.5); }) == ErrorCode::IntervalTooShort);

    const auto env = pinned_envelope(3.0, 0.4);
    double previous = 1.0;
    for (double t = t_star(env) + 0.01; t < 60.0; t += 0.37) {
        const double c = contraction_factor(env, t);
        CHECK(c > 0.0);
        CHECK(c < previous);
        previous = c;
    }
    CHECK(previous < 1e-18);
}

TEST_CASE("pinned envelope validation") {
    CHECK(code_of([] { (void)pinned_envelope(0.5, 1.0); }) == ErrorCode::InvalidEnvelope);
    CHECK(code_of([] { (void)pinned_envelope(1.0, 0.0); }) == ErrorCode::InvalidEnvelope);
}
