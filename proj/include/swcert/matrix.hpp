// Dense matrix kernels for desk-scale stability analysis problems.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace swcert {

/// Error raised when an iterative numerical routine fails to converge.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Dense real matrix, row-major. Sized for problems up to a few tens of rows;
/// no sparse storage, no complex entries.
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("Matrix: dimensions must be positive");
    }

    Matrix(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("Matrix: dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(rows) * cols)
            throw std::invalid_argument("Matrix: entry count does not match dimensions");
    }

    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = static_cast<int>(init.size());
        if (rows_ == 0) throw std::invalid_argument("Matrix: empty initializer");
        cols_ = static_cast<int>(init.begin()->size());
        data_.reserve(static_cast<std::size_t>(rows_) * cols_);
        for (const auto& row : init) {
            if (static_cast<int>(row.size()) != cols_)
                throw std::invalid_argument("Matrix: ragged initializer rows");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const { return data_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(double c) {
        for (double& v : data_) v *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double c) { return a *= c; }
    friend Matrix operator*(double c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix multiply: inner dimensions differ");
        Matrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
        if (a.cols_ != static_cast<int>(x.size()))
            throw std::invalid_argument("Matrix-vector multiply: size mismatch");
        std::vector<double> y(a.rows_, 0.0);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

/// A^p by repeated squaring; A^0 is the identity.
inline Matrix mat_pow(const Matrix& a, int p) {
    if (!a.is_square()) throw std::invalid_argument("mat_pow: matrix must be square");
    if (p < 0) throw std::invalid_argument("mat_pow: exponent must be nonnegative");
    Matrix result = Matrix::identity(a.rows());
    Matrix base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        p >>= 1;
        if (p > 0) base = base * base;
    }
    return result;
}

/// Symmetric matrix. Construction symmetrizes as (M + M^T)/2 so downstream
/// eigensolvers may assume exact symmetry.
class SymMatrix {
public:
    explicit SymMatrix(const Matrix& m) : mat_(m) {
        if (!m.is_square()) throw std::invalid_argument("SymMatrix: matrix must be square");
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < i; ++j) {
                const double avg = 0.5 * (mat_(i, j) + mat_(j, i));
                mat_(i, j) = avg;
                mat_(j, i) = avg;
            }
    }

    static SymMatrix identity(int n) { return SymMatrix(Matrix::identity(n)); }
    static SymMatrix zero(int n) { return SymMatrix(Matrix(n, n)); }

    int dim() const { return mat_.rows(); }
    double operator()(int i, int j) const { return mat_(i, j); }
    const Matrix& as_matrix() const { return mat_; }

    SymMatrix scaled(double c) const {
        Matrix m = mat_;
        m *= c;
        return SymMatrix(m);
    }

    void set(int i, int j, double v) {
        mat_(i, j) = v;
        mat_(j, i) = v;
    }

private:
    Matrix mat_;
};

/// Euclidean norm of a state vector.
inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Returns false (leaving `lower` unspecified) if a pivot is not strictly positive.
inline bool cholesky_factor(const Matrix& s, Matrix& lower) {
    const int n = s.rows();
    lower = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = s(i, j);
            for (int k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum)) return false;
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return true;
}

/// log det of an SPD matrix given its Cholesky factor.
inline double log_det_from_cholesky(const Matrix& lower) {
    double s = 0.0;
    for (int i = 0; i < lower.rows(); ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

/// Inverse of an SPD matrix from its Cholesky factor (L L^T = S).
inline Matrix spd_inverse_from_cholesky(const Matrix& lower) {
    const int n = lower.rows();
    Matrix inv(n, n);
    std::vector<double> col(n);
    for (int c = 0; c < n; ++c) {
        // forward solve L y = e_c
        for (int i = 0; i < n; ++i) {
            double sum = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) sum -= lower(i, k) * col[k];
            col[i] = sum / lower(i, i);
        }
        // back solve L^T x = y
        for (int i = n - 1; i >= 0; --i) {
            double sum = col[i];
            for (int k = i + 1; k < n; ++k) sum -= lower(k, i) * col[k];
            col[i] = sum / lower(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, c) = col[i];
    }
    // enforce exact symmetry against rounding drift
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double avg = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = avg;
            inv(j, i) = avg;
        }
    return inv;
}

}  // namespace swcert
