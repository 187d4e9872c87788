#pragma once

#include "ondelay/semigroup.hpp"
#include "ondelay/system.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ondelay {

/// u' = -a u plus the feedback b_n on odd intervals. Throws NonPositiveDecay unless a > 0.
/// An empty b list means no feedback (a single zero operator).
[[nodiscard]] DelaySystem build_scalar(double a, std::vector<double> b_values = {},
                                       FeedbackMode mode = FeedbackMode::delayed, bool cyclic = true);

/// Second-difference Dirichlet stiffness on n interior nodes of (0, 1), scaled by 1/dx^2.
[[nodiscard]] Matrix dirichlet_stiffness(std::size_t n);

/// Eigenvalues (4/dx^2) sin^2(i pi dx / 2), i = 1..n, of dirichlet_stiffness(n).
[[nodiscard]] std::vector<double> dirichlet_eigenvalues(std::size_t n);

/// mu(s) = mu0 e^{-delta s}.
struct MemoryKernel {
    double mu0 = 0.5;
    double delta = 1.0;

    [[nodiscard]] double operator()(double s) const { return mu0 * std::exp(-delta * s); }
    /// Integral of mu over (0, inf).
    [[nodiscard]] double mass() const { return mu0 / delta; }
};

/// State layout (u, v, eta_1, ..., eta_{n_s}), each block of length n_x, with eta_j = eta(., s_j)
/// and s_j = j ds. Energy (1 - m) u'Ku + v'v + sum_j w_j eta_j' K eta_j with w_j = mu(s_j) ds and
/// m = sum_j w_j.
struct ViscoelasticWaveModel {
    std::size_t n_x = 0;
    std::size_t n_s = 0;
    double s_max = 0.0;
    MemoryKernel kernel;
    double ds = 0.0;
    std::vector<double> weights;  // w_j, j = 1..n_s
    double discrete_mass = 0.0;   // sum of the weights
    std::vector<double> b_values;
    DelaySystem system;

    [[nodiscard]] std::size_t dim() const { return n_x * (2 + n_s); }
    /// The generator decouples along the sine modes into n_x blocks of size 2 + n_s.
    [[nodiscard]] std::vector<ModalBlock> modal_blocks() const;
    /// Samples u(., 0), u_t(., 0) and eta(x, s) = u(x, 0) - u(x, -s) from the past u(x, t), t <= 0.
    [[nodiscard]] Vector initial_state(const std::function<double(double, double)>& past,
                                       const std::function<double(double)>& velocity) const;
};

/// Throws KernelMassExceedsOne when mu0/delta >= 1, TruncationTooShort when
/// e^{-delta s_max} / (1 - mu0/delta) > 1e-8, ConfigError on other invalid sizes.
[[nodiscard]] ViscoelasticWaveModel build_viscoelastic_wave(std::size_t n_x, std::size_t n_s, double s_max,
                                                            const MemoryKernel& kernel,
                                                            std::vector<double> b_values, bool cyclic = true);

struct Subinterval {
    double left = 0.0;
    double right = 1.0;
};

/// u_tt - u_xx + a chi_1 u_t + b(t) chi_2 u_t(t - tau) = 0 on (0, 1), Dirichlet, state (u, v).
struct LocallyDampedWaveModel {
    std::size_t n_x = 0;
    double a = 0.0;
    Subinterval omega1;
    Subinterval omega2;
    std::vector<bool> in_omega1;  // per node x_i = i / (n_x + 1)
    std::vector<bool> in_omega2;
    std::vector<double> b_values;
    DelaySystem system;

    [[nodiscard]] std::size_t dim() const { return 2 * n_x; }
    /// Samples (u0(x_i), u1(x_i)).
    [[nodiscard]] Vector initial_state(const std::function<double(double)>& u0,
                                       const std::function<double(double)>& u1) const;
};

/// omega1 = (l1, 1) with 0 <= l1 < 1; omega2 any (l2, r2) inside [0, 1]. Each must contain a node,
/// else BadSubinterval.
[[nodiscard]] LocallyDampedWaveModel build_locally_damped_wave(std::size_t n_x, double a, double omega1_left,
                                                               Subinterval omega2, std::vector<double> b_values,
                                                               bool cyclic = true);

}  // namespace ondelay
