#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "fusedstrip/scalar.hpp"

namespace fusedstrip {

// Dense row-major matrix over a generic scalar. Sizes in this project are
// small (at most a few thousand), so no blocking or sparsity.
template <class S>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, ScalarTraits<S>::from_int(0)) {}

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::from_int(1);
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    S& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    Matrix operator*(const Matrix& o) const {
        assert(cols_ == o.rows_);
        Matrix r(rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t k = 0; k < cols_; ++k) {
                const S& a = (*this)(i, k);
                if (ScalarTraits<S>::is_zero(a)) continue;
                for (size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        Matrix r(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        Matrix r(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const S& v : data_) {
            double d = std::abs(ScalarTraits<S>::to_double(v));
            if (d > m) m = d;
        }
        return m;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    size_t rows_, cols_;
    std::vector<S> data_;
};

using DMatrix = Matrix<double>;
using RMatrix = Matrix<Rational>;

// Tensor-leg helpers. Operators on a product of `nlegs` local spaces of
// dimension `d` are flattened row-major with leg 1 slowest (most significant).

inline size_t leg_stride(int leg, int nlegs, int d) {
    size_t s = 1;
    for (int k = leg + 1; k <= nlegs; ++k) s *= static_cast<size_t>(d);
    return s;
}

// M <- Op_{legs...} * M where `op` is a dim^k x dim^k matrix acting on the
// listed legs (1-based, pairwise distinct) of the row index of M. All other
// legs untouched. This is the workhorse for composing fusion graphs without
// forming big dense factors.
template <class S>
void apply_legs_left(const Matrix<S>& op, const std::vector<int>& legs, int nlegs, int d,
                     Matrix<S>& M) {
    const int k = static_cast<int>(legs.size());
    size_t opdim = 1;
    for (int i = 0; i < k; ++i) opdim *= static_cast<size_t>(d);
    assert(op.rows() == opdim && op.cols() == opdim);
    size_t total = 1;
    for (int i = 0; i < nlegs; ++i) total *= static_cast<size_t>(d);
    assert(M.rows() == total);

    std::vector<size_t> strides(k);
    for (int i = 0; i < k; ++i) strides[i] = leg_stride(legs[i], nlegs, d);

    // Enumerate base indices with all acted legs at digit 0.
    std::vector<size_t> offsets;
    offsets.reserve(total / opdim);
    for (size_t idx = 0; idx < total; ++idx) {
        bool base = true;
        for (int i = 0; i < k && base; ++i)
            if ((idx / strides[i]) % static_cast<size_t>(d) != 0) base = false;
        if (base) offsets.push_back(idx);
    }

    // Local index -> global offset for each configuration of the acted legs.
    std::vector<size_t> local_offset(opdim, 0);
    for (size_t li = 0; li < opdim; ++li) {
        size_t rem = li;
        size_t off = 0;
        for (int i = k - 1; i >= 0; --i) {
            size_t digit = rem % static_cast<size_t>(d);
            rem /= static_cast<size_t>(d);
            off += digit * strides[i];
        }
        local_offset[li] = off;
    }

    std::vector<S> buf(opdim);
    const size_t ncols = M.cols();
    for (size_t col = 0; col < ncols; ++col) {
        for (size_t base : offsets) {
            for (size_t li = 0; li < opdim; ++li) buf[li] = M(base + local_offset[li], col);
            for (size_t r = 0; r < opdim; ++r) {
                S acc = ScalarTraits<S>::from_int(0);
                for (size_t c = 0; c < opdim; ++c) {
                    const S& o = op(r, c);
                    if (!ScalarTraits<S>::is_zero(o)) acc += o * buf[c];
                }
                M(base + local_offset[r], col) = acc;
            }
        }
    }
}

// Row permutation sending row index with leg digits (x_1..x_n) to the row
// whose leg digits are (x_{perm[1]}..x_{perm[n]}); perm is 1-based: new leg i
// carries the digit of old leg perm[i].
template <class S>
Matrix<S> permute_legs_rows(const Matrix<S>& M, const std::vector<int>& perm, int d) {
    const int n = static_cast<int>(perm.size());
    size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<size_t>(d);
    assert(M.rows() == total);
    Matrix<S> R(M.rows(), M.cols());
    std::vector<int> digits(n);
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            digits[i] = static_cast<int>(rem % static_cast<size_t>(d));
            rem /= static_cast<size_t>(d);
        }
        size_t nidx = 0;
        for (int i = 0; i < n; ++i)
            nidx = nidx * static_cast<size_t>(d) + static_cast<size_t>(digits[perm[i] - 1]);
        for (size_t col = 0; col < M.cols(); ++col) R(nidx, col) = M(idx, col);
    }
    return R;
}

}  // namespace fusedstrip
