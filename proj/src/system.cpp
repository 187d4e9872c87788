#include "ondelay/system.hpp"

#include "ondelay/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace ondelay {

namespace {

void require_square(const Matrix& m, Index dim, const char* what) {
    if (m.rows() != m.cols() || m.rows() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
}

Eigen::VectorXd symmetric_part_eigenvalues(const Matrix& a, const InnerProduct& g) {
    const Matrix at = g.to_orthonormal(a);
    const Matrix sym = 0.5 * (at + at.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

InnerProduct::InnerProduct(Matrix gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols() || gram_.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "Gram matrix must be square and nonempty");
    }
    const double scale = gram_.cwiseAbs().maxCoeff();
    const double asym = (gram_ - gram_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw Error(ErrorCode::GramNotSymmetric, "Gram matrix is not symmetric");
    }
    gram_ = 0.5 * (gram_ + gram_.transpose());
    llt_.compute(gram_);
    if (llt_.info() != Eigen::Success) {
        throw Error(ErrorCode::GramNotPositiveDefinite, "Gram matrix is not positive definite");
    }
    const Eigen::VectorXd diag = Matrix(llt_.matrixL()).diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
        throw Error(ErrorCode::GramNotPositiveDefinite, "Gram matrix is not positive definite");
    }
    const Index nnz = (gram_.array() != 0.0).count();
    if (gram_.rows() > 64 && nnz < gram_.size() / 10) {
        gram_sparse_ = gram_.sparseView();
        use_sparse_ = true;
    }
}

InnerProduct InnerProduct::identity(Index dim) { return InnerProduct(Matrix::Identity(dim, dim)); }

double InnerProduct::dot(const Vector& x, const Vector& y) const {
    if (x.size() != dim() || y.size() != dim()) {
        throw Error(ErrorCode::DimensionMismatch, "vector size does not match the inner product");
    }
    if (use_sparse_) return x.dot(gram_sparse_ * y);
    return x.dot(gram_ * y);
}

double InnerProduct::norm(const Vector& x) const { return std::sqrt(std::max(0.0, dot(x, x))); }

Matrix InnerProduct::to_orthonormal(const Matrix& op) const {
    // L^T * op * L^{-T}; the right factor comes from solving L X^T = op^T.
    const Matrix right = llt_.matrixL().solve(op.transpose()).transpose();
    return llt_.matrixU() * right;
}

Vector InnerProduct::to_orthonormal(const Vector& x) const { return llt_.matrixU() * x; }

Vector InnerProduct::from_orthonormal(const Vector& y) const { return llt_.matrixU().solve(y); }

DissipativityResult check_dissipative(const Matrix& a, const InnerProduct& g, double tol) {
    require_square(a, g.dim(), "generator");
    const double worst = symmetric_part_eigenvalues(a, g).maxCoeff();
    return {worst <= tol, worst};
}

double min_rayleigh_quotient(const Matrix& d, const InnerProduct& g) {
    require_square(d, g.dim(), "operator");
    return symmetric_part_eigenvalues(d, g).minCoeff();
}

bool check_antidamping_sign(const Matrix& d, const InnerProduct& g, double tol) {
    return min_rayleigh_quotient(d, g) >= -tol;
}

double induced_operator_norm(const Matrix& b, const InnerProduct& g) {
    require_square(b, g.dim(), "operator");
    return spectral_norm(g.to_orthonormal(b));
}

double default_dissipative_tolerance(const Matrix& a, const InnerProduct& g) {
    return 1e-9 * induced_operator_norm(a, g);
}

double FeedbackNorms::at(std::size_t k) const {
    if (!covers(k)) {
        throw Error(ErrorCode::MissingFeedbackOperator,
                    "no feedback norm for odd interval " + std::to_string(2 * k + 1));
    }
    return values[cyclic ? k % values.size() : k];
}

double FeedbackNorms::sup() const {
    if (values.empty()) return 0.0;
    return *std::max_element(values.begin(), values.end());
}

DelaySystem::DelaySystem(Matrix generator, std::vector<Matrix> feedback_ops, FeedbackMode mode,
                         InnerProduct inner_product, bool cyclic, double dissipative_tol)
    : generator_(std::move(generator)),
      feedback_(std::move(feedback_ops)),
      mode_(mode),
      inner_(std::move(inner_product)),
      cyclic_(cyclic) {
    require_square(generator_, inner_.dim(), "generator");
    for (const Matrix& b : feedback_) require_square(b, inner_.dim(), "feedback operator");

    const double tol =
        dissipative_tol < 0.0 ? default_dissipative_tolerance(generator_, inner_) : dissipative_tol;
    const DissipativityResult diss = check_dissipative(generator_, inner_, tol);
    worst_quotient_ = diss.worst_quotient;
    if (!diss.dissipative) {
        throw Error(ErrorCode::NotDissipative,
                    "generator has <Ax,x> / |x|^2 up to " + format_double(diss.worst_quotient));
    }

    op_norms_.reserve(feedback_.size());
    for (std::size_t k = 0; k < feedback_.size(); ++k) {
        const Matrix& b = feedback_[k];
        op_norms_.push_back(induced_operator_norm(b, inner_));
        if (mode_ == FeedbackMode::anti_damping) {
            const double sign_tol = 1e-9 * std::max(1.0, op_norms_.back());
            if (!check_antidamping_sign(b, inner_, sign_tol)) {
                throw Error(ErrorCode::AntiDampingSignViolated,
                            "anti-damping operator " + std::to_string(k) + " has <Bx,x> < 0");
            }
        }
    }
}

std::size_t DelaySystem::slot(std::size_t k) const {
    if (feedback_.empty() || (!cyclic_ && k >= feedback_.size())) {
        throw Error(ErrorCode::MissingFeedbackOperator,
                    "no feedback operator for odd interval " + std::to_string(2 * k + 1));
    }
    return cyclic_ ? k % feedback_.size() : k;
}

const Matrix& DelaySystem::feedback(std::size_t k) const { return feedback_[slot(k)]; }

double DelaySystem::op_norm(std::size_t k) const { return op_norms_[slot(k)]; }

}  // namespace ondelay
