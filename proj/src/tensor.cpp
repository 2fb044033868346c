#include "xxzmagic/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace xxzmagic {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), Complex{0.0, 0.0}) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<Complex> entries)
    : shape_(std::move(shape)), data_(std::move(entries)) {
    if (data_.size() != shape_product(shape_)) {
        throw std::invalid_argument("DenseTensor: entry count does not match shape");
    }
}

DenseTensor DenseTensor::from_matrix(const CMatrix& m) {
    DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            t.data_[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
        }
    }
    return t;
}

std::size_t DenseTensor::flatten(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != shape_.size()) {
        throw std::invalid_argument("DenseTensor::at: wrong index rank");
    }
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) {
        flat = flat * shape_[axis] + i;
        ++axis;
    }
    return flat;
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> new_shape) const& {
    if (shape_product(new_shape) != data_.size()) {
        throw std::invalid_argument("DenseTensor::reshaped: size mismatch");
    }
    return DenseTensor(std::move(new_shape), data_);
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> new_shape) && {
    if (shape_product(new_shape) != data_.size()) {
        throw std::invalid_argument("DenseTensor::reshaped: size mismatch");
    }
    return DenseTensor(std::move(new_shape), std::move(data_));
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> perm) const {
    const std::size_t r = rank();
    if (perm.size() != r) {
        throw std::invalid_argument("DenseTensor::permuted: wrong permutation rank");
    }
    std::vector<std::size_t> new_shape(r);
    for (std::size_t k = 0; k < r; ++k) new_shape[k] = shape_[perm[k]];

    // Stride of input axis perm[k] inside the output's row-major order.
    std::vector<std::size_t> in_strides(r, 1);
    for (std::size_t k = r; k-- > 1;) in_strides[k - 1] = in_strides[k] * shape_[k];
    std::vector<std::size_t> gather_strides(r);
    for (std::size_t k = 0; k < r; ++k) gather_strides[k] = in_strides[perm[k]];

    DenseTensor out(std::move(new_shape));
    const std::size_t n = data_.size();
    std::vector<std::size_t> counter(r, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < n; ++flat) {
        out.data_[flat] = data_[src];
        for (std::size_t k = r; k-- > 0;) {
            ++counter[k];
            src += gather_strides[k];
            if (counter[k] < out.shape_[k]) break;
            src -= counter[k] * gather_strides[k];
            counter[k] = 0;
        }
    }
    return out;
}

DenseTensor DenseTensor::permuted(std::initializer_list<std::size_t> perm) const {
    std::vector<std::size_t> p(perm);
    return permuted(std::span<const std::size_t>(p));
}

Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
DenseTensor::as_matrix(std::size_t split) const {
    std::size_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < split; ++k) rows *= shape_[k];
    for (std::size_t k = split; k < rank(); ++k) cols *= shape_[k];
    return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

double DenseTensor::norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

bool DenseTensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

DenseTensor& DenseTensor::operator*=(Complex factor) {
    for (Complex& z : data_) z *= factor;
    return *this;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::pair<std::size_t, std::size_t>> axis_pairs) {
    const std::size_t ra = a.rank(), rb = b.rank();
    std::vector<bool> a_paired(ra, false), b_paired(rb, false);
    for (const auto& [ia, ib] : axis_pairs) {
        if (ia >= ra || ib >= rb) {
            throw std::invalid_argument("contract: axis out of range");
        }
        if (a_paired[ia] || b_paired[ib]) {
            throw std::invalid_argument("contract: axis paired twice");
        }
        if (a.extent(ia) != b.extent(ib)) {
            throw std::invalid_argument("contract: paired axes have unequal extents");
        }
        a_paired[ia] = true;
        b_paired[ib] = true;
    }

    // Permute a to (free..., paired...) and b to (paired..., free...), then GEMM.
    std::vector<std::size_t> pa, pb;
    std::vector<std::size_t> out_shape;
    for (std::size_t k = 0; k < ra; ++k) {
        if (!a_paired[k]) {
            pa.push_back(k);
            out_shape.push_back(a.extent(k));
        }
    }
    std::size_t contracted = 1;
    for (const auto& [ia, ib] : axis_pairs) {
        pa.push_back(ia);
        pb.push_back(ib);
        contracted *= a.extent(ia);
    }
    for (std::size_t k = 0; k < rb; ++k) {
        if (!b_paired[k]) {
            pb.push_back(k);
            out_shape.push_back(b.extent(k));
        }
    }

    DenseTensor ap = a.permuted(pa);
    DenseTensor bp = b.permuted(pb);
    const std::size_t m = ap.size() / contracted;
    const std::size_t n = bp.size() / contracted;

    DenseTensor out(out_shape.empty() ? std::vector<std::size_t>{1} : std::move(out_shape));
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> ma(ap.data(), m, contracted);
    Eigen::Map<const RowMat> mb(bp.data(), contracted, n);
    Eigen::Map<RowMat> mo(out.data(), m, n);
    mo.noalias() = ma * mb;
    return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::pair<std::size_t, std::size_t>> axis_pairs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs(axis_pairs);
    return contract(a, b, std::span<const std::pair<std::size_t, std::size_t>>(pairs));
}

SvdResult svd_truncate(const DenseTensor& m, std::size_t chi_max, double cutoff) {
    if (m.rank() != 2) {
        throw std::invalid_argument("svd_truncate: rank-2 tensor required");
    }
    if (chi_max == 0) {
        throw std::invalid_argument("svd_truncate: chi_max must be positive");
    }
    if (!m.all_finite()) {
        throw std::runtime_error("svd_truncate: non-finite input");
    }

    CMatrix mat = m.as_matrix(1);
    Eigen::BDCSVD<CMatrix> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const std::size_t full = static_cast<std::size_t>(s.size());

    double total = 0.0;
    for (std::size_t i = 0; i < full; ++i) total += s[i] * s[i];

    std::size_t kept = 0;
    if (total > 0.0) {
        for (std::size_t i = 0; i < std::min(full, chi_max); ++i) {
            if (s[i] * s[i] > cutoff * total) ++kept;
            else break;
        }
    }
    if (kept == 0) kept = 1;  // keep at least one column so bond structure survives

    double discarded = 0.0;
    for (std::size_t i = kept; i < full; ++i) discarded += s[i] * s[i];

    SvdResult out;
    out.singular_values.assign(s.data(), s.data() + kept);
    out.report.kept = kept;
    out.report.discarded_weight = total > 0.0 ? discarded / total : 0.0;

    const std::size_t rows = m.extent(0), cols = m.extent(1);
    out.u = DenseTensor({rows, kept});
    out.v = DenseTensor({kept, cols});
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < kept; ++k) {
            out.u[i * kept + k] = svd.matrixU()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    for (std::size_t k = 0; k < kept; ++k) {
        for (std::size_t j = 0; j < cols; ++j) {
            out.v[k * cols + j] = std::conj(svd.matrixV()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
        }
    }
    return out;
}

std::pair<DenseTensor, DenseTensor> qr_reduced(const DenseTensor& m) {
    if (m.rank() != 2) {
        throw std::invalid_argument("qr_reduced: rank-2 tensor required");
    }
    CMatrix mat = m.as_matrix(1);
    const Eigen::Index rows = mat.rows(), cols = mat.cols();
    const Eigen::Index k = std::min(rows, cols);
    Eigen::HouseholderQR<CMatrix> qr(mat);
    CMatrix q = qr.householderQ() * CMatrix::Identity(rows, k);
    CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return {DenseTensor::from_matrix(q), DenseTensor::from_matrix(r)};
}

}  // namespace xxzmagic
