#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ondelay/errors.hpp"
#include "ondelay/integrator.hpp"
#include "ondelay/linalg.hpp"
#include "ondelay/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

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

const double pi = std::numbers::pi;

}  // namespace

TEST_CASE("scalar model") {
    CHECK(code_of([] { (void)build_scalar(0.0); }) == ErrorCode::NonPositiveDecay);
    CHECK(code_of([] { (void)build_scalar(-1.0); }) == ErrorCode::NonPositiveDecay);

    const auto one = build_scalar(1.0);
    const auto env1 = estimate_envelope(one.generator(), one.inner_product(), EnvelopeStrategy::numerical_abscissa);
    CHECK(t_star(env1) == 0.0);
    CHECK(contraction_factor(env1, 1.5) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

    const auto two = build_scalar(2.0, {0.0});
    const auto env2 = estimate_envelope(two.generator(), two.inner_product(), EnvelopeStrategy::numerical_abscissa);
    CHECK(env2.M == 1.0);
    CHECK(env2.mu == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(contraction_factor(env2, 1.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));

    const auto sched = SwitchingSchedule::build({0, 1, 2, 3}, 0.5, 3.0);
    const auto traj = simulate(two, sched, Vector::Constant(1, 3.0), 0.01, 3.0);
    for (std::size_t k = 0; k < traj.node_count(); k += 17) {
        CHECK(traj.state(k)(0) == doctest::Approx(3.0 * std::exp(-2.0 * traj.time(k))).epsilon(1e-12));
    }
}

TEST_CASE("Dirichlet stiffness eigenvalues") {
    const Matrix k = dirichlet_stiffness(12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    auto closed = dirichlet_eigenvalues(12);
    std::sort(closed.begin(), closed.end());
    for (std::size_t i = 0; i < closed.size(); ++i) {
        CHECK(es.eigenvalues()(static_cast<Index>(i)) == doctest::Approx(closed[i]).epsilon(1e-12));
    }
    CHECK(closed.front() == doctest::Approx(pi * pi).epsilon(0.01));
}

TEST_CASE("memory kernel admissibility") {
    CHECK(MemoryKernel{0.5, 1.0}.mass() == 0.5);
    CHECK(code_of([] { (void)build_viscoelastic_wave(4, 10, 20.0, {2.0, 1.0}, {0.1}); }) ==
          ErrorCode::KernelMassExceedsOne);
    CHECK(code_of([] { (void)build_viscoelastic_wave(4, 10, 20.0, {1.0, 1.0}, {0.1}); }) ==
          ErrorCode::KernelMassExceedsOne);
    CHECK(code_of([] { (void)build_viscoelastic_wave(4, 10, 5.0, {0.5, 1.0}, {0.1}); }) ==
          ErrorCode::TruncationTooShort);
    CHECK(code_of([] { (void)build_viscoelastic_wave(1, 10, 20.0, {0.5, 1.0}, {0.1}); }) == ErrorCode::ConfigError);
    CHECK_NOTHROW((void)build_viscoelastic_wave(4, 10, 20.0, {0.5, 1.0}, {0.1}));
}

TEST_CASE("viscoelastic assembly") {
    const auto m = build_viscoelastic_wave(6, 12, 20.0, {0.5, 1.0}, {0.3, -0.2});
    CHECK(m.dim() == 6 * 14);
    CHECK(m.system.dim() == static_cast<Index>(m.dim()));
    CHECK(m.system.dissipativity_quotient() <= 1e-8 * spectral_norm(m.system.generator()));
    CHECK(m.system.op_norm(0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(m.system.op_norm(1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.discrete_mass < 0.5);

    // The sine modes decouple the generator: the largest block norm is the full norm.
    const auto blocks = m.modal_blocks();
    REQUIRE(blocks.size() == 6);
    for (double t : {0.1, 0.7, 2.0, 5.0}) {
        double by_block = 0.0;
        for (const auto& b : blocks) by_block = std::max(by_block, semigroup_norm(b.generator, b.inner, t));
        CHECK(by_block == doctest::Approx(semigroup_norm(m.system.generator(), m.system.inner_product(), t)).epsilon(1e-9));
    }
}

TEST_CASE("viscoelastic initial data") {
    const auto m = build_viscoelastic_wave(5, 8, 20.0, {0.5, 1.0}, {0.1});
    auto past = [](double x, double t) { return std::sin(pi * x) * (1.0 + t); };
    auto vel = [](double x) { return 2.0 * x; };
    const Vector x0 = m.initial_state(past, vel);
    const double dx = 1.0 / 6.0;
    for (Index i = 0; i < 5; ++i) {
        const double x = static_cast<double>(i + 1) * dx;
        CHECK(x0(i) == doctest::Approx(std::sin(pi * x)));
        CHECK(x0(5 + i) == doctest::Approx(2.0 * x));
        for (Index j = 1; j <= 8; ++j) {
            CHECK(x0((1 + j) * 5 + i) == doctest::Approx(std::sin(pi * x) * static_cast<double>(j) * m.ds));
        }
    }
}

TEST_CASE("viscoelastic energy without feedback never increases") {
    const auto m = build_viscoelastic_wave(8, 16, 20.0, {0.5, 1.0}, {0.0});
    const auto sched = SwitchingSchedule::build({0, 4, 5, 10}, 1.0, 10.0);
    auto past = [](double x, double t) { return std::sin(pi * x) * std::cos(t) + 0.3 * std::sin(3 * pi * x); };
    auto vel = [](double x) { return std::sin(2 * pi * x); };
    const auto traj = simulate(m.system, sched, m.initial_state(past, vel), 0.01, 10.0);
    for (std::size_t k = 1; k < traj.node_count(); ++k) {
        CHECK(traj.norm(k) <= traj.norm(k - 1) * (1.0 + 1e-12));
    }
    CHECK(traj.norms().back() < traj.norms().front());
}

TEST_CASE("memory quadrature converges at least at first order") {
    const MemoryKernel kernel{0.5, 1.0};
    std::vector<double> mass;
    std::vector<double> energy;
    auto past = [](double x, double t) { return std::sin(pi * x) * (1.0 + 0.5 * std::sin(t)); };
    auto vel = [](double x) { return std::sin(pi * x); };
    for (std::size_t ns : {40, 80, 160}) {
        const auto m = build_viscoelastic_wave(3, ns, 20.0, kernel, {0.0});
        mass.push_back(m.discrete_mass);
        const auto sched = SwitchingSchedule::build({0, 3}, 1.0, 3.0);
        const auto traj = simulate(m.system, sched, m.initial_state(past, vel), 0.05, 2.0);
        energy.push_back(traj.norms().back());
    }
    const double mass_ratio = (mass[1] - mass[0]) / (mass[2] - mass[1]);
    const double energy_ratio = (energy[1] - energy[0]) / (energy[2] - energy[1]);
    CHECK(mass_ratio == doctest::Approx(2.0).epsilon(0.05));
    // The energy differences shrink at least linearly in ds.
    CHECK(energy_ratio > 1.8);
    CHECK(std::abs(energy[2] - energy[1]) < 20.0 / 160.0 * std::abs(energy[2]));
    CHECK(std::abs(mass[2] - kernel.mass()) < 0.05);
}

TEST_CASE("locally damped wave") {
    CHECK(code_of([] { (void)build_locally_damped_wave(20, 1.0, 1.0, {0.2, 0.4}, {0.05}); }) ==
          ErrorCode::BadSubinterval);
    CHECK(code_of([] { (void)build_locally_damped_wave(20, 1.0, 0.7, {0.4, 0.2}, {0.05}); }) ==
          ErrorCode::BadSubinterval);
    CHECK(code_of([] { (void)build_locally_damped_wave(20, 1.0, 0.7, {0.2, 1.5}, {0.05}); }) ==
          ErrorCode::BadSubinterval);
    CHECK(code_of([] { (void)build_locally_damped_wave(20, 1.0, 0.7, {0.2, 0.21}, {0.05}); }) ==
          ErrorCode::BadSubinterval);
    CHECK(code_of([] { (void)build_locally_damped_wave(20, 1.0, 0.99, {0.2, 0.4}, {0.05}); }) ==
          ErrorCode::BadSubinterval);

    const auto undamped = build_locally_damped_wave(20, 0.0, 0.7, {0.2, 0.4}, {0.05});
    CHECK(code_of([&] {
              (void)estimate_envelope(undamped.system.generator(), undamped.system.inner_product(),
                                      EnvelopeStrategy::sampled_fit);
          }) == ErrorCode::NotExponentiallyStable);

    const auto local = build_locally_damped_wave(20, 1.0, 0.7, {0.2, 0.4}, {0.05, 0.08});
    CHECK(local.system.op_norm(0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(local.system.op_norm(1) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(local.system.dissipativity_quotient() <= 1e-12);
    for (std::size_t i = 0; i < 20; ++i) CHECK_FALSE((local.in_omega1[i] && local.in_omega2[i]));

    const auto global = build_locally_damped_wave(20, 1.0, 0.0, {0.2, 0.4}, {0.05});
    const auto env_local = estimate_envelope(local.system.generator(), local.system.inner_product(),
                                             EnvelopeStrategy::sampled_fit);
    const auto env_global = estimate_envelope(global.system.generator(), global.system.inner_product(),
                                              EnvelopeStrategy::sampled_fit);
    CHECK(env_local.mu > 0.0);
    CHECK(env_global.mu >= env_local.mu);
    CHECK(-spectral_abscissa(global.system.generator()) >= -spectral_abscissa(local.system.generator()));

    const Vector x0 = local.initial_state([](double x) { return x * (1 - x); }, [](double) { return 1.0; });
    CHECK(x0(0) == doctest::Approx((1.0 / 21.0) * (20.0 / 21.0)));
    CHECK(x0(20) == 1.0);
}
