// Copyright 2026 The swapsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace swapsim {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Sizes here never exceed a few dozen, so
/// everything is plain loops.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw std::invalid_argument("Matrix: ragged initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(j, i) = std::conj((*this)(i, j));
            }
        }
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(j, i) = (*this)(i, j);
            }
        }
        return out;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) {
            s += std::norm(z);
        }
        return std::sqrt(s);
    }

    /// Largest entrywise |A - A^dagger|.
    double hermiticity_defect() const {
        if (!is_square()) {
            return INFINITY;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = i; j < cols_; ++j) {
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return worst;
    }

    /// Largest entrywise deviation of U U^dagger from the identity.
    double unitarity_defect() const {
        if (!is_square()) {
            return INFINITY;
        }
        const Matrix p = (*this) * adjoint();
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                worst = std::max(worst, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
            }
        }
        return worst;
    }

    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
        if (lhs.cols_ != rhs.rows_) {
            throw std::invalid_argument("Matrix: shape mismatch in product");
        }
        Matrix out(lhs.rows_, rhs.cols_);
        for (std::size_t i = 0; i < lhs.rows_; ++i) {
            for (std::size_t k = 0; k < lhs.cols_; ++k) {
                const Complex a = lhs(i, k);
                if (a == Complex{}) {
                    continue;
                }
                for (std::size_t j = 0; j < rhs.cols_; ++j) {
                    out(i, j) += a * rhs(k, j);
                }
            }
        }
        return out;
    }

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) {
        lhs.check_same_shape(rhs);
        for (std::size_t i = 0; i < lhs.data_.size(); ++i) {
            lhs.data_[i] += rhs.data_[i];
        }
        return lhs;
    }

    friend Matrix operator-(Matrix lhs, const Matrix& rhs) {
        lhs.check_same_shape(rhs);
        for (std::size_t i = 0; i < lhs.data_.size(); ++i) {
            lhs.data_[i] -= rhs.data_[i];
        }
        return lhs;
    }

    friend Matrix operator*(Complex s, Matrix m) {
        for (auto& z : m.data_) {
            z *= s;
        }
        return m;
    }

    bool operator==(const Matrix&) const = default;

private:
    void check_same_shape(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw std::invalid_argument("Matrix: shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Largest entrywise |lhs - rhs|.
inline double max_abs_diff(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
        return INFINITY;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t j = 0; j < lhs.cols(); ++j) {
            worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
        }
    }
    return worst;
}

}  // namespace swapsim
