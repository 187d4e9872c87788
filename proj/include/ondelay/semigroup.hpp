#pragma once

#include "ondelay/system.hpp"

#include <limits>
#include <span>
#include <string_view>

namespace ondelay {

enum class EnvelopeStrategy { numerical_abscissa, eigen_conditioning, sampled_fit, pinned };

[[nodiscard]] std::string_view to_string(EnvelopeStrategy s) noexcept;
/// Throws ConfigError on an unknown name.
[[nodiscard]] EnvelopeStrategy envelope_strategy_from_string(std::string_view name);

/// Constants with ||exp(tA)||_G <= M exp(-mu t).
struct SemigroupEnvelope {
    double M = 1.0;
    double mu = 0.0;
    EnvelopeStrategy strategy = EnvelopeStrategy::pinned;
    bool certified = false;
    // Largest time for which the bound was checked numerically. Pinned envelopes
    // and the numerical-abscissa bound hold for all t.
    double verified_horizon = std::numeric_limits<double>::infinity();
    double spectral_abscissa = std::numeric_limits<double>::quiet_NaN();
    double numerical_abscissa = std::numeric_limits<double>::quiet_NaN();
};

/// Validates M >= 1 and mu > 0. The result is marked certified because the caller vouches for it.
[[nodiscard]] SemigroupEnvelope pinned_envelope(double M, double mu);

/// One decoupled block of a block-diagonalizable generator together with its Gram matrix.
/// The norm of exp(tA) on the direct sum is the largest block norm.
struct ModalBlock {
    Matrix generator;
    InnerProduct inner;
};

[[nodiscard]] SemigroupEnvelope estimate_envelope(const Matrix& a, const InnerProduct& g,
                                                  EnvelopeStrategy strategy);
[[nodiscard]] SemigroupEnvelope estimate_envelope(std::span<const ModalBlock> blocks,
                                                  EnvelopeStrategy strategy);

/// ||exp(tA)||_G.
[[nodiscard]] double semigroup_norm(const Matrix& a, const InnerProduct& g, double t);

/// Largest real part of the eigenvalues of A.
[[nodiscard]] double spectral_abscissa(const Matrix& a);

/// (1/mu) ln M: the time after which M exp(-mu t) drops below 1.
[[nodiscard]] double t_star(const SemigroupEnvelope& env);

/// M exp(-mu T), the envelope value after an interval of length T.
[[nodiscard]] double envelope_value(const SemigroupEnvelope& env, double T);

/// (M exp(-mu T))^2, the squared-norm reduction over a delay-free interval of
/// length T. Throws IntervalTooShort unless T > T*.
[[nodiscard]] double contraction_factor(const SemigroupEnvelope& env, double T);

}  // namespace ondelay
