#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ondelay {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Matrix exponential by scaling and squaring with diagonal Padé approximants
/// of degree 3, 5, 7, 9 or 13, chosen from the 1-norm of the argument.
[[nodiscard]] Matrix expm(const Matrix& a);

[[nodiscard]] double one_norm(const Matrix& a);

/// Largest singular value (Euclidean operator norm).
[[nodiscard]] double spectral_norm(const Matrix& a);

/// Dense text format: one matrix row per line, whitespace-separated decimals.
/// Blank lines and lines starting with '#' are skipped.
[[nodiscard]] Matrix read_dense_matrix(std::istream& in);
[[nodiscard]] Matrix read_dense_matrix(const std::filesystem::path& path);
void write_dense_matrix(std::ostream& out, const Matrix& m);
void write_dense_matrix(const std::filesystem::path& path, const Matrix& m);

/// Round-trip formatting: 17 significant digits.
[[nodiscard]] std::string format_double(double x);

}  // namespace ondelay
