#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace xxzmagic {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Dense complex tensor with row-major entry layout. The linearized index of
/// (i_0, ..., i_{r-1}) is i_0*s_1*...*s_{r-1} + ... + i_{r-1}, so the last
/// axis is fastest. All higher-level index conventions in this codebase
/// (physical pairing d = 2s + s', Pauli order I,X,Y,Z) assume this layout.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> shape);
    DenseTensor(std::vector<std::size_t> shape, std::vector<Complex> entries);

    static DenseTensor from_matrix(const CMatrix& m);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_[axis]; }
    std::size_t size() const { return data_.size(); }

    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }
    std::span<const Complex> entries() const { return data_; }

    Complex& operator[](std::size_t flat) { return data_[flat]; }
    const Complex& operator[](std::size_t flat) const { return data_[flat]; }

    Complex& at(std::initializer_list<std::size_t> idx) { return data_[flatten(idx)]; }
    const Complex& at(std::initializer_list<std::size_t> idx) const { return data_[flatten(idx)]; }

    /// Reinterpret the entries under a new shape of equal total size.
    DenseTensor reshaped(std::vector<std::size_t> new_shape) const&;
    DenseTensor reshaped(std::vector<std::size_t> new_shape) &&;

    /// Rearrange axes: axis k of the result is axis perm[k] of the input.
    DenseTensor permuted(std::span<const std::size_t> perm) const;
    DenseTensor permuted(std::initializer_list<std::size_t> perm) const;

    /// View the tensor as a matrix splitting axes [0, split) x [split, rank).
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
    as_matrix(std::size_t split) const;

    double norm() const;
    bool all_finite() const;

    DenseTensor& operator*=(Complex factor);

private:
    std::size_t flatten(std::initializer_list<std::size_t> idx) const;

    std::vector<std::size_t> shape_;
    std::vector<Complex> data_;
};

/// Sum over paired axes of a and b. The result carries the unpaired axes of a
/// (in order) followed by the unpaired axes of b. Extents of paired axes must
/// match; throws std::invalid_argument otherwise.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::pair<std::size_t, std::size_t>> axis_pairs);
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::pair<std::size_t, std::size_t>> axis_pairs);

struct TruncationReport {
    std::size_t kept = 0;
    double discarded_weight = 0.0;  // sum of discarded s_i^2 over total, in [0,1]
};

struct SvdResult {
    DenseTensor u;                       // rows x kept
    std::vector<double> singular_values; // descending
    DenseTensor v;                       // kept x cols, so u * diag(s) * v ~= input
    TruncationReport report;
};

/// Truncated SVD of a rank-2 tensor. Keeps min(chi_max, number of singular
/// values with relative squared weight above cutoff). Throws
/// std::runtime_error on non-finite input.
SvdResult svd_truncate(const DenseTensor& m, std::size_t chi_max, double cutoff);

/// Reduced QR of a rank-2 tensor: returns (q, r) with q having orthonormal
/// columns and q*r equal to the input.
std::pair<DenseTensor, DenseTensor> qr_reduced(const DenseTensor& m);

}  // namespace xxzmagic
