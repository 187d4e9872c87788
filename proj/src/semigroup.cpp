#include "ondelay/semigroup.hpp"

#include "ondelay/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ondelay {

namespace {

constexpr int kFitPoints = 100;
constexpr int kUniformCheckPoints = 400;
constexpr int kLogCheckPoints = 200;
constexpr double kCheckWindow = 5.0;           // in units of 1/mu
constexpr double kLogGridStart = 1e-3;         // in units of 1/mu
constexpr double kAbscissaMargin = 1e-6;
constexpr double kMaxEigenCondition = 1e10;
constexpr double kCertifySlack = 1e-8;

// Blocks in G-orthonormal coordinates, where the G-norm is the Euclidean norm.
struct OrthoBlocks {
    std::vector<Matrix> ops;
    double scale = 0.0;  // max induced norm of the generator blocks
};

OrthoBlocks orthonormalize(std::span<const ModalBlock> blocks) {
    if (blocks.empty()) throw Error(ErrorCode::DimensionMismatch, "no generator blocks");
    OrthoBlocks out;
    for (const ModalBlock& b : blocks) {
        if (b.generator.rows() != b.generator.cols() || b.generator.rows() != b.inner.dim()) {
            throw Error(ErrorCode::DimensionMismatch, "generator block does not match its Gram matrix");
        }
        out.ops.push_back(b.inner.to_orthonormal(b.generator));
        out.scale = std::max(out.scale, spectral_norm(out.ops.back()));
    }
    return out;
}

double max_spectral_abscissa(const OrthoBlocks& ob) {
    double alpha = -std::numeric_limits<double>::infinity();
    for (const Matrix& a : ob.ops) alpha = std::max(alpha, spectral_abscissa(a));
    return alpha;
}

double max_numerical_abscissa(const OrthoBlocks& ob) {
    double omega = -std::numeric_limits<double>::infinity();
    for (const Matrix& a : ob.ops) {
        const Matrix sym = 0.5 * (a + a.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
        omega = std::max(omega, es.eigenvalues().maxCoeff());
    }
    return omega;
}

double norm_at(const OrthoBlocks& ob, double t) {
    double n = 0.0;
    for (const Matrix& a : ob.ops) n = std::max(n, spectral_norm(expm(t * a)));
    return n;
}

// Norms at t = k * dt for k = 0..count, using powers of exp(dt A).
std::vector<double> norms_on_uniform_grid(const OrthoBlocks& ob, double dt, int count) {
    std::vector<double> out(static_cast<std::size_t>(count) + 1, 0.0);
    for (const Matrix& a : ob.ops) {
        const Matrix step = expm(dt * a);
        Matrix power = Matrix::Identity(a.rows(), a.cols());
        for (int k = 0; k <= count; ++k) {
            if (k > 0) power = (power * step).eval();
            out[static_cast<std::size_t>(k)] = std::max(out[static_cast<std::size_t>(k)], spectral_norm(power));
        }
    }
    return out;
}

std::vector<double> log_grid(double mu) {
    std::vector<double> t(kLogCheckPoints);
    const double lo = std::log(kLogGridStart / mu);
    const double hi = std::log(kCheckWindow / mu);
    for (int k = 0; k < kLogCheckPoints; ++k) {
        t[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * k / (kLogCheckPoints - 1));
    }
    return t;
}

bool check_log_grid(const OrthoBlocks& ob, double M, double mu) {
    for (double t : log_grid(mu)) {
        if (norm_at(ob, t) > M * std::exp(-mu * t) * (1.0 + kCertifySlack)) return false;
    }
    return true;
}

void require_stable(double alpha, double scale) {
    if (alpha >= -1e-10 * std::max(scale, 1.0)) {
        throw Error(ErrorCode::NotExponentiallyStable,
                    "spectral abscissa " + format_double(alpha) + " is not negative");
    }
}

SemigroupEnvelope numerical_abscissa_envelope(const OrthoBlocks& ob, double alpha, double omega) {
    if (omega >= 0.0) {
        throw Error(ErrorCode::NumericalAbscissaNotNegative,
                    "numerical abscissa " + format_double(omega) +
                        " is not negative; use eigen_conditioning or sampled_fit");
    }
    SemigroupEnvelope env;
    env.M = 1.0;
    env.mu = -omega;
    env.strategy = EnvelopeStrategy::numerical_abscissa;
    env.certified = check_log_grid(ob, env.M, env.mu);
    env.verified_horizon = std::numeric_limits<double>::infinity();
    env.spectral_abscissa = alpha;
    env.numerical_abscissa = omega;
    return env;
}

double eigenbasis_condition(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, true);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DefectiveEigenbasis, "eigen decomposition failed");
    }
    Eigen::MatrixXcd v = es.eigenvectors();
    for (Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

SemigroupEnvelope eigen_conditioning_envelope(const OrthoBlocks& ob, double alpha, double omega) {
    double cond = 1.0;
    for (const Matrix& a : ob.ops) cond = std::max(cond, eigenbasis_condition(a));
    if (!(cond <= kMaxEigenCondition)) {
        throw Error(ErrorCode::DefectiveEigenbasis,
                    "eigenvector condition number " + format_double(cond) + " exceeds 1e10; use sampled_fit");
    }
    SemigroupEnvelope env;
    env.M = cond;
    env.mu = -alpha * (1.0 - kAbscissaMargin);
    env.strategy = EnvelopeStrategy::eigen_conditioning;
    env.certified = check_log_grid(ob, env.M, env.mu);
    env.verified_horizon = std::numeric_limits<double>::infinity();
    env.spectral_abscissa = alpha;
    env.numerical_abscissa = omega;
    return env;
}

SemigroupEnvelope sampled_fit_envelope(const OrthoBlocks& ob, double alpha, double omega) {
    // Slope of ln ||exp(tA)|| over a few decay times of the slowest mode.
    const double fit_end = kCheckWindow / -alpha;
    const double fit_dt = fit_end / (kFitPoints - 1);
    const std::vector<double> fit_norms = norms_on_uniform_grid(ob, fit_dt, kFitPoints - 1);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (int k = 0; k < kFitPoints; ++k) {
        const double n = fit_norms[static_cast<std::size_t>(k)];
        if (!(n > 0.0)) continue;
        const double x = k * fit_dt;
        const double y = std::log(n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    const double denom = used * sxx - sx * sx;
    const double slope = denom > 0.0 ? (used * sxy - sx * sy) / denom : alpha;
    double mu = std::min(-slope, -alpha * (1.0 - kAbscissaMargin));
    if (!(mu > 0.0)) mu = -alpha / 2.0;

    // M bounds n(t) e^{mu t} on every cell of the union grid: within a cell
    // n(t) <= n(t_k) e^{omega (t - t_k)}.
    const double window = kCheckWindow / mu;
    const double dt = window / kUniformCheckPoints;
    const std::vector<double> uniform = norms_on_uniform_grid(ob, dt, kUniformCheckPoints);
    std::vector<std::pair<double, double>> samples;
    for (int k = 0; k <= kUniformCheckPoints; ++k) {
        samples.emplace_back(k * dt, uniform[static_cast<std::size_t>(k)]);
    }
    for (double t : log_grid(mu)) samples.emplace_back(t, norm_at(ob, t));
    std::sort(samples.begin(), samples.end());

    double M = 1.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto [t, n] = samples[k];
        double cell = 1.0;
        if (k + 1 < samples.size()) {
            cell = std::max(1.0, std::exp((omega + mu) * (samples[k + 1].first - t)));
        }
        M = std::max(M, n * std::exp(mu * t) * cell);
    }

    SemigroupEnvelope env;
    env.M = M;
    env.mu = mu;
    env.strategy = EnvelopeStrategy::sampled_fit;
    env.certified = check_log_grid(ob, env.M, env.mu);
    // Past the window the same cell argument extends to all t when omega <= -mu.
    env.verified_horizon = omega + mu <= 0.0 ? std::numeric_limits<double>::infinity() : window;
    env.spectral_abscissa = alpha;
    env.numerical_abscissa = omega;
    return env;
}

}  // namespace

std::string_view to_string(EnvelopeStrategy s) noexcept {
    switch (s) {
        case EnvelopeStrategy::numerical_abscissa: return "numerical_abscissa";
        case EnvelopeStrategy::eigen_conditioning: return "eigen_conditioning";
        case EnvelopeStrategy::sampled_fit: return "sampled_fit";
        case EnvelopeStrategy::pinned: return "pinned";
    }
    return "unknown";
}

EnvelopeStrategy envelope_strategy_from_string(std::string_view name) {
    for (EnvelopeStrategy s : {EnvelopeStrategy::numerical_abscissa, EnvelopeStrategy::eigen_conditioning,
                               EnvelopeStrategy::sampled_fit, EnvelopeStrategy::pinned}) {
        if (to_string(s) == name) return s;
    }
    throw Error(ErrorCode::ConfigError, "unknown envelope strategy '" + std::string(name) + "'");
}

SemigroupEnvelope pinned_envelope(double M, double mu) {
    if (!(M >= 1.0) || !std::isfinite(M)) {
        throw Error(ErrorCode::InvalidEnvelope, "M must be finite and at least 1");
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::InvalidEnvelope, "mu must be finite and positive");
    }
    SemigroupEnvelope env;
    env.M = M;
    env.mu = mu;
    env.strategy = EnvelopeStrategy::pinned;
    env.certified = true;
    return env;
}

double spectral_abscissa(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral abscissa needs a square matrix");
    Eigen::EigenSolver<Matrix> es(a, false);
    return es.eigenvalues().real().maxCoeff();
}

double semigroup_norm(const Matrix& a, const InnerProduct& g, double t) {
    return spectral_norm(expm(t * g.to_orthonormal(a)));
}

SemigroupEnvelope estimate_envelope(const Matrix& a, const InnerProduct& g, EnvelopeStrategy strategy) {
    const ModalBlock block{a, g};
    return estimate_envelope(std::span<const ModalBlock>(&block, 1), strategy);
}

SemigroupEnvelope estimate_envelope(std::span<const ModalBlock> blocks, EnvelopeStrategy strategy) {
    if (strategy == EnvelopeStrategy::pinned) {
        throw Error(ErrorCode::ConfigError, "a pinned envelope needs explicit M and mu");
    }
    const OrthoBlocks ob = orthonormalize(blocks);
    const double alpha = max_spectral_abscissa(ob);
    require_stable(alpha, ob.scale);
    const double omega = max_numerical_abscissa(ob);
    switch (strategy) {
        case EnvelopeStrategy::numerical_abscissa: return numerical_abscissa_envelope(ob, alpha, omega);
        case EnvelopeStrategy::eigen_conditioning: return eigen_conditioning_envelope(ob, alpha, omega);
        default: return sampled_fit_envelope(ob, alpha, omega);
    }
}

double t_star(const SemigroupEnvelope& env) { return std::log(env.M) / env.mu; }

double envelope_value(const SemigroupEnvelope& env, double T) { return env.M * std::exp(-env.mu * T); }

double contraction_factor(const SemigroupEnvelope& env, double T) {
    const double root = envelope_value(env, T);
    if (!(T > t_star(env)) || !(root < 1.0)) {
        throw Error(ErrorCode::IntervalTooShort,
                    "interval length " + format_double(T) + " does not exceed T* = " +
                        format_double(t_star(env)));
    }
    return root * root;
}

}  // namespace ondelay
