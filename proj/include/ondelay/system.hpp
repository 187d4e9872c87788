#pragma once

#include "ondelay/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

namespace ondelay {

/// Weighted inner product <x, y> = x^T G y on R^d with G symmetric positive definite.
///
/// Operators are compared in the weighted norm by passing to the orthonormal
/// coordinates y = L^T x, where G = L L^T.
class InnerProduct {
public:
    explicit InnerProduct(Matrix gram);
    [[nodiscard]] static InnerProduct identity(Index dim);

    [[nodiscard]] Index dim() const noexcept { return gram_.rows(); }
    [[nodiscard]] const Matrix& gram() const noexcept { return gram_; }

    [[nodiscard]] double dot(const Vector& x, const Vector& y) const;
    [[nodiscard]] double squared_norm(const Vector& x) const { return dot(x, x); }
    [[nodiscard]] double norm(const Vector& x) const;

    /// L^T op L^{-T}: the matrix of `op` in G-orthonormal coordinates.
    [[nodiscard]] Matrix to_orthonormal(const Matrix& op) const;
    [[nodiscard]] Vector to_orthonormal(const Vector& x) const;
    [[nodiscard]] Vector from_orthonormal(const Vector& y) const;

private:
    Matrix gram_;
    Eigen::LLT<Matrix> llt_;
    Eigen::SparseMatrix<double> gram_sparse_;
    bool use_sparse_ = false;
};

struct DissipativityResult {
    bool dissipative = false;
    double worst_quotient = 0.0;  // max <Ax, x>_G / ||x||_G^2
};

/// Largest eigenvalue of the G-symmetrized generator compared against `tol`.
[[nodiscard]] DissipativityResult check_dissipative(const Matrix& a, const InnerProduct& g,
                                                    double tol);

/// Smallest value of <Dx, x>_G / ||x||_G^2.
[[nodiscard]] double min_rayleigh_quotient(const Matrix& d, const InnerProduct& g);

[[nodiscard]] bool check_antidamping_sign(const Matrix& d, const InnerProduct& g, double tol);

/// max_{x != 0} ||Bx||_G / ||x||_G.
[[nodiscard]] double induced_operator_norm(const Matrix& b, const InnerProduct& g);

/// Default dissipativity tolerance: 1e-9 times the induced norm of the generator.
[[nodiscard]] double default_dissipative_tolerance(const Matrix& a, const InnerProduct& g);

enum class FeedbackMode { delayed, anti_damping };

/// Operator norms of the feedback on successive odd intervals. Entry k belongs to
/// interval 2k+1; a cyclic list repeats.
struct FeedbackNorms {
    std::vector<double> values;
    bool cyclic = false;

    [[nodiscard]] bool covers(std::size_t k) const noexcept {
        return !values.empty() && (cyclic || k < values.size());
    }
    [[nodiscard]] double at(std::size_t k) const;
    [[nodiscard]] double sup() const;
};

/// Finite-dimensional evolution problem U' = A U + B(t) U(t - tau) (delayed mode) or
/// U' = A U + B(t) U(t) (anti-damping mode), with B(t) = 0 on even intervals and
/// B(t) = feedback(k) on the k-th odd interval.
class DelaySystem {
public:
    /// Validates dimensions and dissipativity of the generator; in anti-damping mode
    /// also the sign condition <Bx, x> >= 0. A negative `dissipative_tol` selects
    /// the default tolerance.
    DelaySystem(Matrix generator, std::vector<Matrix> feedback_ops, FeedbackMode mode,
                InnerProduct inner_product, bool cyclic = true, double dissipative_tol = -1.0);

    [[nodiscard]] Index dim() const noexcept { return generator_.rows(); }
    [[nodiscard]] const Matrix& generator() const noexcept { return generator_; }
    [[nodiscard]] FeedbackMode mode() const noexcept { return mode_; }
    [[nodiscard]] const InnerProduct& inner_product() const noexcept { return inner_; }
    [[nodiscard]] bool cyclic() const noexcept { return cyclic_; }
    [[nodiscard]] std::size_t feedback_count() const noexcept { return feedback_.size(); }
    [[nodiscard]] const std::vector<Matrix>& feedback_ops() const noexcept { return feedback_; }

    /// Operator of the k-th odd interval (interval index 2k+1).
    [[nodiscard]] const Matrix& feedback(std::size_t k) const;
    [[nodiscard]] double op_norm(std::size_t k) const;
    [[nodiscard]] const std::vector<double>& op_norms() const noexcept { return op_norms_; }
    [[nodiscard]] FeedbackNorms feedback_norms() const { return {op_norms_, cyclic_}; }

    [[nodiscard]] double dissipativity_quotient() const noexcept { return worst_quotient_; }

private:
    [[nodiscard]] std::size_t slot(std::size_t k) const;

    Matrix generator_;
    std::vector<Matrix> feedback_;
    FeedbackMode mode_;
    InnerProduct inner_;
    bool cyclic_;
    std::vector<double> op_norms_;
    double worst_quotient_ = 0.0;
};

}  // namespace ondelay
