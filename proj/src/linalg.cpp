#include "ondelay/linalg.hpp"

#include "ondelay/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ondelay {

namespace {

// Backward-error thresholds for the Padé degrees 3, 5, 7, 9 and 13 (Higham 2005).
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

Matrix pade_low(const Matrix& a, int degree) {
    static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
    static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                                 25200.0,    1512.0,    56.0,      1.0};
    static constexpr std::array<double, 10> b9 = {
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0,     110880.0,     3960.0,       90.0,        1.0};

    const double* b = nullptr;
    switch (degree) {
        case 3: b = b3.data(); break;
        case 5: b = b5.data(); break;
        case 7: b = b7.data(); break;
        default: b = b9.data(); break;
    }
    const Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;

    // Even powers A^0, A^2, A^4, ... up to A^(degree-1).
    std::vector<Matrix> even{ident, a2};
    for (int k = 4; k < degree; k += 2) even.push_back(even.back() * a2);

    Matrix u_inner = Matrix::Zero(n, n);
    Matrix v = Matrix::Zero(n, n);
    for (int k = 0; k <= degree; ++k) {
        const Matrix& p = even[static_cast<std::size_t>(k / 2)];
        if (k % 2 == 0) {
            v += b[k] * p;
        } else {
            u_inner += b[k] * p;
        }
    }
    const Matrix u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;

    const Matrix u_tail = b[13] * a6 + b[11] * a4 + b[9] * a2;
    const Matrix u = a * (a6 * u_tail + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const Matrix v_tail = b[12] * a6 + b[10] * a4 + b[8] * a2;
    const Matrix v = a6 * v_tail + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

double one_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    // The largest eigenvalue of the Gram matrix carries full relative accuracy; only the small
    // singular values would suffer from squaring.
    const Matrix gram = a.rows() >= a.cols() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "expm needs a square matrix");
    }
    if (a.size() == 0) return a;

    const double norm = one_norm(a);
    if (norm <= kTheta[0]) return pade_low(a, 3);
    if (norm <= kTheta[1]) return pade_low(a, 5);
    if (norm <= kTheta[2]) return pade_low(a, 7);
    if (norm <= kTheta[3]) return pade_low(a, 9);

    int squarings = 0;
    if (norm > kTheta[4]) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta[4])));
    }
    Matrix r = pade13(a / std::ldexp(1.0, squarings));
    for (int i = 0; i < squarings; ++i) r = (r * r).eval();
    return r;
}

Matrix read_dense_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string token;
        while (ls >> token) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw Error(ErrorCode::ParseError, "bad matrix entry '" + token + "'");
            }
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorCode::ParseError, "ragged matrix rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Matrix read_dense_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open matrix file " + path.string());
    return read_dense_matrix(in);
}

void write_dense_matrix(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_dense_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    write_dense_matrix(out, m);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace ondelay
