#include "ondelay/models.hpp"

#include "ondelay/errors.hpp"
#include "ondelay/linalg.hpp"

#include <numbers>
#include <string>

namespace ondelay {

DelaySystem build_scalar(double a, std::vector<double> b_values, FeedbackMode mode, bool cyclic) {
    if (!(a > 0.0)) throw Error(ErrorCode::NonPositiveDecay, "scalar decay rate must be positive");
    if (b_values.empty()) b_values.push_back(0.0);
    std::vector<Matrix> ops;
    ops.reserve(b_values.size());
    for (double b : b_values) ops.push_back(Matrix::Constant(1, 1, b));
    return DelaySystem(Matrix::Constant(1, 1, -a), std::move(ops), mode, InnerProduct::identity(1), cyclic);
}

Matrix dirichlet_stiffness(std::size_t n) {
    const auto d = static_cast<Index>(n);
    const double dx = 1.0 / static_cast<double>(n + 1);
    const double s = 1.0 / (dx * dx);
    Matrix k = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        k(i, i) = 2.0 * s;
        if (i > 0) k(i, i - 1) = -s;
        if (i + 1 < d) k(i, i + 1) = -s;
    }
    return k;
}

std::vector<double> dirichlet_eigenvalues(std::size_t n) {
    const double dx = 1.0 / static_cast<double>(n + 1);
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double sn = std::sin(static_cast<double>(i) * std::numbers::pi * dx / 2.0);
        out[i - 1] = 4.0 / (dx * dx) * sn * sn;
    }
    return out;
}

namespace {

constexpr double kTruncationLimit = 1e-8;

std::vector<Matrix> velocity_feedback(const std::vector<double>& b_values, Index dim, Index v_offset,
                                      const std::vector<bool>& support) {
    std::vector<Matrix> ops;
    for (double b : b_values) {
        Matrix op = Matrix::Zero(dim, dim);
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i]) op(v_offset + static_cast<Index>(i), v_offset + static_cast<Index>(i)) = -b;
        }
        ops.push_back(std::move(op));
    }
    if (ops.empty()) ops.push_back(Matrix::Zero(dim, dim));
    return ops;
}

// eta_j' = -(eta_j - eta_{j-1}) / ds + v for one spatial component, with eta_0 = 0. Consecutive
// eta blocks are `stride` rows apart.
void fill_memory_transport(Matrix& a, Index eta0, Index v, Index ns, Index stride, Index comp, double ds) {
    for (Index j = 0; j < ns; ++j) {
        const Index row = eta0 + j * stride + comp;
        a(row, v + comp) = 1.0;
        a(row, row) = -1.0 / ds;
        if (j > 0) a(row, row - stride) = 1.0 / ds;
    }
}

}  // namespace

std::vector<ModalBlock> ViscoelasticWaveModel::modal_blocks() const {
    const auto ns = static_cast<Index>(n_s);
    const Index size = 2 + ns;
    std::vector<ModalBlock> blocks;
    for (double lambda : dirichlet_eigenvalues(n_x)) {
        Matrix a = Matrix::Zero(size, size);
        a(0, 1) = 1.0;
        a(1, 0) = -(1.0 - discrete_mass) * lambda;
        for (Index j = 0; j < ns; ++j) a(1, 2 + j) = -weights[static_cast<std::size_t>(j)] * lambda;
        fill_memory_transport(a, 2, 1, ns, 1, 0, ds);
        Matrix g = Matrix::Zero(size, size);
        g(0, 0) = (1.0 - discrete_mass) * lambda;
        g(1, 1) = 1.0;
        for (Index j = 0; j < ns; ++j) g(2 + j, 2 + j) = weights[static_cast<std::size_t>(j)] * lambda;
        blocks.push_back({std::move(a), InnerProduct(std::move(g))});
    }
    return blocks;
}

Vector ViscoelasticWaveModel::initial_state(const std::function<double(double, double)>& past,
                                            const std::function<double(double)>& velocity) const {
    const auto n = static_cast<Index>(n_x);
    const double dx = 1.0 / static_cast<double>(n_x + 1);
    Vector x0(static_cast<Index>(dim()));
    for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) * dx;
        const double now = past(x, 0.0);
        x0(i) = now;
        x0(n + i) = velocity(x);
        for (std::size_t j = 1; j <= n_s; ++j) {
            x0((1 + static_cast<Index>(j)) * n + i) = now - past(x, -static_cast<double>(j) * ds);
        }
    }
    return x0;
}

ViscoelasticWaveModel build_viscoelastic_wave(std::size_t n_x, std::size_t n_s, double s_max,
                                              const MemoryKernel& kernel, std::vector<double> b_values,
                                              bool cyclic) {
    if (n_x < 2 || n_s < 2) throw Error(ErrorCode::ConfigError, "n_x and n_s must be at least 2");
    if (!(kernel.mu0 > 0.0) || !(kernel.delta > 0.0)) {
        throw Error(ErrorCode::ConfigError, "kernel needs mu0 > 0 and delta > 0");
    }
    if (!(s_max > 0.0)) throw Error(ErrorCode::ConfigError, "s_max must be positive");
    const double mass = kernel.mass();
    if (mass >= 1.0) {
        throw Error(ErrorCode::KernelMassExceedsOne, "mu0 / delta = " + format_double(mass) + " is not below 1");
    }
    const double truncation = std::exp(-kernel.delta * s_max) / (1.0 - mass);
    if (truncation > kTruncationLimit) {
        throw Error(ErrorCode::TruncationTooShort,
                    "memory truncation error " + format_double(truncation) + " exceeds 1e-8");
    }

    const double ds = s_max / static_cast<double>(n_s);
    std::vector<double> weights(n_s);
    double discrete_mass = 0.0;
    for (std::size_t j = 0; j < n_s; ++j) {
        weights[j] = kernel(static_cast<double>(j + 1) * ds) * ds;
        discrete_mass += weights[j];
    }

    const auto n = static_cast<Index>(n_x);
    const auto ns = static_cast<Index>(n_s);
    const Index dim = n * (2 + ns);
    const Matrix k = dirichlet_stiffness(n_x);

    Matrix a = Matrix::Zero(dim, dim);
    a.block(0, n, n, n) = Matrix::Identity(n, n);
    a.block(n, 0, n, n) = -(1.0 - discrete_mass) * k;
    for (Index j = 0; j < ns; ++j) {
        a.block(n, (2 + j) * n, n, n) = -weights[static_cast<std::size_t>(j)] * k;
    }
    for (Index i = 0; i < n; ++i) fill_memory_transport(a, 2 * n, n, ns, n, i, ds);

    Matrix g = Matrix::Zero(dim, dim);
    g.block(0, 0, n, n) = (1.0 - discrete_mass) * k;
    g.block(n, n, n, n) = Matrix::Identity(n, n);
    for (Index j = 0; j < ns; ++j) g.block((2 + j) * n, (2 + j) * n, n, n) = weights[static_cast<std::size_t>(j)] * k;

    auto ops = velocity_feedback(b_values, dim, n, std::vector<bool>(n_x, true));
    DelaySystem system(std::move(a), std::move(ops), FeedbackMode::delayed, InnerProduct(std::move(g)), cyclic);
    return ViscoelasticWaveModel{n_x, n_s, s_max, kernel, ds, std::move(weights), discrete_mass,
                                 std::move(b_values), std::move(system)};
}

Vector LocallyDampedWaveModel::initial_state(const std::function<double(double)>& u0,
                                             const std::function<double(double)>& u1) const {
    const auto n = static_cast<Index>(n_x);
    const double dx = 1.0 / static_cast<double>(n_x + 1);
    Vector x0(2 * n);
    for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) * dx;
        x0(i) = u0(x);
        x0(n + i) = u1(x);
    }
    return x0;
}

LocallyDampedWaveModel build_locally_damped_wave(std::size_t n_x, double a, double omega1_left,
                                                 Subinterval omega2, std::vector<double> b_values, bool cyclic) {
    if (n_x < 2) throw Error(ErrorCode::ConfigError, "n_x must be at least 2");
    if (!(omega1_left >= 0.0 && omega1_left < 1.0)) {
        throw Error(ErrorCode::BadSubinterval, "omega1 must be (l, 1) with 0 <= l < 1");
    }
    if (!(omega2.left >= 0.0 && omega2.left < omega2.right && omega2.right <= 1.0)) {
        throw Error(ErrorCode::BadSubinterval, "omega2 must satisfy 0 <= l < r <= 1");
    }
    const double dx = 1.0 / static_cast<double>(n_x + 1);
    std::vector<bool> in1(n_x);
    std::vector<bool> in2(n_x);
    bool any1 = false;
    bool any2 = false;
    for (std::size_t i = 0; i < n_x; ++i) {
        const double x = static_cast<double>(i + 1) * dx;
        in1[i] = omega1_left < x && x < 1.0;
        in2[i] = omega2.left < x && x < omega2.right;
        any1 = any1 || in1[i];
        any2 = any2 || in2[i];
    }
    if (!any1) throw Error(ErrorCode::BadSubinterval, "omega1 contains no grid node");
    if (!any2) throw Error(ErrorCode::BadSubinterval, "omega2 contains no grid node");

    const auto n = static_cast<Index>(n_x);
    const Matrix k = dirichlet_stiffness(n_x);
    Matrix gen = Matrix::Zero(2 * n, 2 * n);
    gen.block(0, n, n, n) = Matrix::Identity(n, n);
    gen.block(n, 0, n, n) = -k;
    for (Index i = 0; i < n; ++i) {
        if (in1[static_cast<std::size_t>(i)]) gen(n + i, n + i) = -a;
    }
    Matrix g = Matrix::Zero(2 * n, 2 * n);
    g.block(0, 0, n, n) = k;
    g.block(n, n, n, n) = Matrix::Identity(n, n);

    auto ops = velocity_feedback(b_values, 2 * n, n, in2);
    DelaySystem system(std::move(gen), std::move(ops), FeedbackMode::delayed, InnerProduct(std::move(g)), cyclic);
    return LocallyDampedWaveModel{n_x,          a, {omega1_left, 1.0}, omega2, std::move(in1), std::move(in2),
                                  std::move(b_values), std::move(system)};
}

}  // namespace ondelay
