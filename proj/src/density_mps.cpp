#include "xxzmagic/density_mps.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace xxzmagic {

namespace {

using Complex = xxzmagic::Complex;

// Row vectors contracting the physical leg: entry order d = 2s + s'.
// pauli_row(P)[d] = P[s', s], so that sum_d pauli_row(P)[d] * rho_{s,s'} = Tr(P rho).
constexpr std::array<Complex, 4> kTraceRow = {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}};

std::array<Complex, 4> pauli_row(char label) {
    switch (label) {
        case 'I': return {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}};
        case 'X': return {Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}};
        case 'Y': return {Complex{0, 0}, Complex{0, 1}, Complex{0, -1}, Complex{0, 0}};
        case 'Z': return {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{-1, 0}};
        default: throw std::invalid_argument("pauli_expectation: label must be one of I, X, Y, Z");
    }
}

// Collapse the physical leg of a site tensor with a length-4 row vector:
// out[l, r] = sum_d row[d] * t[l, d, r].
CMatrix collapse_physical(const DenseTensor& t, const std::array<Complex, 4>& row) {
    const std::size_t l = t.extent(0), r = t.extent(2);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
    const Complex* p = t.data();
    for (std::size_t a = 0; a < l; ++a) {
        for (std::size_t d = 0; d < 4; ++d) {
            if (row[d] == Complex{0, 0}) {
                p += r;
                continue;
            }
            for (std::size_t b = 0; b < r; ++b) {
                out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += row[d] * p[b];
            }
            p += r;
        }
    }
    return out;
}

DenseTensor single_site_tensor(const BlochVector& m) {
    DenseTensor t({1, 4, 1});
    t[0] = Complex{(1.0 + m.z) / 2.0, 0.0};          // (s,s') = (0,0)
    t[1] = Complex{m.x / 2.0, -m.y / 2.0};           // (0,1)
    t[2] = Complex{m.x / 2.0, m.y / 2.0};            // (1,0)
    t[3] = Complex{(1.0 - m.z) / 2.0, 0.0};          // (1,1)
    return t;
}

}  // namespace

VectorizedDensityMps VectorizedDensityMps::infinite_temperature(std::size_t length) {
    if (length < 1) throw std::invalid_argument("infinite_temperature: length must be >= 1");
    std::vector<DenseTensor> sites;
    sites.reserve(length);
    for (std::size_t j = 0; j < length; ++j) sites.push_back(single_site_tensor({0.0, 0.0, 0.0}));
    return VectorizedDensityMps(std::move(sites));
}

VectorizedDensityMps VectorizedDensityMps::bloch_product(std::span<const BlochVector> vectors) {
    if (vectors.empty()) throw std::invalid_argument("bloch_product: empty site list");
    std::vector<DenseTensor> sites;
    sites.reserve(vectors.size());
    for (const BlochVector& m : vectors) {
        if (m.norm() > 1.0 + 1e-12) {
            throw std::invalid_argument("bloch_product: |m| > 1 is not a physical single-site state");
        }
        sites.push_back(single_site_tensor(m));
    }
    return VectorizedDensityMps(std::move(sites));
}

VectorizedDensityMps VectorizedDensityMps::neel(std::size_t length) {
    std::vector<BlochVector> ms(length);
    for (std::size_t j = 0; j < length; ++j) ms[j] = {0.0, 0.0, j % 2 == 0 ? 1.0 : -1.0};
    return bloch_product(ms);
}

VectorizedDensityMps::VectorizedDensityMps(std::vector<DenseTensor> site_tensors)
    : sites_(std::move(site_tensors)) {
    if (sites_.empty()) throw std::invalid_argument("VectorizedDensityMps: no sites");
    if (sites_.front().extent(0) != 1 || sites_.back().extent(2) != 1) {
        throw std::invalid_argument("VectorizedDensityMps: boundary bonds must have extent 1");
    }
    for (std::size_t j = 0; j < sites_.size(); ++j) {
        if (sites_[j].rank() != 3 || sites_[j].extent(1) != 4) {
            throw std::invalid_argument("VectorizedDensityMps: site tensors must be (left, 4, right)");
        }
        if (j + 1 < sites_.size() && sites_[j].extent(2) != sites_[j + 1].extent(0)) {
            throw std::invalid_argument("VectorizedDensityMps: adjacent bond extents differ");
        }
    }
}

void VectorizedDensityMps::set_site(std::size_t j, DenseTensor t) {
    sites_[j] = std::move(t);
}

std::vector<std::size_t> VectorizedDensityMps::bond_dimensions() const {
    std::vector<std::size_t> bonds(length() + 1);
    bonds[0] = sites_.front().extent(0);
    for (std::size_t j = 0; j < length(); ++j) bonds[j + 1] = sites_[j].extent(2);
    return bonds;
}

std::size_t VectorizedDensityMps::max_bond_dimension() const {
    std::size_t m = 1;
    for (const DenseTensor& t : sites_) m = std::max(m, t.extent(2));
    return m;
}

void VectorizedDensityMps::left_normalize_step(std::size_t j) {
    const std::size_t l = sites_[j].extent(0), r = sites_[j].extent(2);
    auto [q, rmat] = qr_reduced(sites_[j].reshaped({l * 4, r}));
    const std::size_t k = q.extent(1);
    sites_[j] = std::move(q).reshaped({l, 4, k});
    sites_[j + 1] = contract(rmat, sites_[j + 1], {{1, 0}});
}

void VectorizedDensityMps::right_normalize_step(std::size_t j) {
    const std::size_t l = sites_[j].extent(0), r = sites_[j].extent(2);
    // QR of the adjoint matricization gives T = R^H Q^H with Q^H row-isometric.
    DenseTensor m = sites_[j].reshaped({l, 4 * r});
    DenseTensor mh({4 * r, l});
    for (std::size_t a = 0; a < l; ++a) {
        for (std::size_t b = 0; b < 4 * r; ++b) mh[b * l + a] = std::conj(m[a * 4 * r + b]);
    }
    auto [q, rmat] = qr_reduced(mh);
    const std::size_t k = q.extent(1);
    DenseTensor qh({k, 4 * r});
    for (std::size_t b = 0; b < 4 * r; ++b) {
        for (std::size_t c = 0; c < k; ++c) qh[c * 4 * r + b] = std::conj(q[b * k + c]);
    }
    DenseTensor rh({l, k});
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t a = 0; a < l; ++a) rh[a * k + c] = std::conj(rmat[c * l + a]);
    }
    sites_[j] = std::move(qh).reshaped({k, 4, r});
    sites_[j - 1] = contract(sites_[j - 1], rh, {{2, 0}});
}

void VectorizedDensityMps::canonicalize(std::size_t center) {
    if (center >= length()) throw std::invalid_argument("canonicalize: center out of range");
    for (std::size_t j = 0; j < center; ++j) left_normalize_step(j);
    for (std::size_t j = length() - 1; j > center; --j) right_normalize_step(j);
    center_ = center;
}

void VectorizedDensityMps::move_center_to(std::size_t center) {
    if (center >= length()) throw std::invalid_argument("move_center_to: center out of range");
    if (!center_) {
        canonicalize(center);
        return;
    }
    while (*center_ < center) {
        left_normalize_step(*center_);
        ++*center_;
    }
    while (*center_ > center) {
        right_normalize_step(*center_);
        --*center_;
    }
}

double VectorizedDensityMps::trace() const {
    Eigen::RowVectorXcd env = Eigen::RowVectorXcd::Ones(1);
    for (const DenseTensor& t : sites_) env = env * collapse_physical(t, kTraceRow);
    return env(0).real();
}

double VectorizedDensityMps::normalize_trace() {
    const double tr = trace();
    if (std::abs(tr) < 1e-14) {
        throw std::runtime_error("normalize_trace: |trace| < 1e-14, evolution corrupted");
    }
    const std::size_t j = center_.value_or(0);
    sites_[j] *= Complex{1.0 / tr, 0.0};
    return tr;
}

double VectorizedDensityMps::pauli_expectation(const std::string& pauli_string, double imag_tol) const {
    if (pauli_string.size() != length()) {
        throw std::invalid_argument("pauli_expectation: string length != chain length");
    }
    Eigen::RowVectorXcd env = Eigen::RowVectorXcd::Ones(1);
    for (std::size_t j = 0; j < length(); ++j) {
        env = env * collapse_physical(sites_[j], pauli_row(pauli_string[j]));
    }
    const Complex val = env(0);
    if (std::abs(val.imag()) > imag_tol * std::max(1.0, std::abs(val.real()))) {
        throw std::runtime_error("pauli_expectation: imaginary part exceeds tolerance (Hermiticity broken)");
    }
    return val.real();
}

std::vector<BlochVector> VectorizedDensityMps::magnetization_profile() const {
    const std::size_t n = length();
    std::vector<Eigen::RowVectorXcd> left(n + 1);
    left[0] = Eigen::RowVectorXcd::Ones(1);
    for (std::size_t j = 0; j < n; ++j) left[j + 1] = left[j] * collapse_physical(sites_[j], kTraceRow);

    std::vector<Eigen::VectorXcd> right(n + 1);
    right[n] = Eigen::VectorXcd::Ones(1);
    for (std::size_t j = n; j-- > 0;) right[j] = collapse_physical(sites_[j], kTraceRow) * right[j + 1];

    const double tr = (left[n])(0).real();
    std::vector<BlochVector> out(n);
    const std::array<char, 3> labels = {'X', 'Y', 'Z'};
    for (std::size_t j = 0; j < n; ++j) {
        double comp[3];
        for (std::size_t a = 0; a < 3; ++a) {
            const Complex v = left[j] * collapse_physical(sites_[j], pauli_row(labels[a])) * right[j + 1];
            comp[a] = v.real() / tr;
        }
        out[j] = {comp[0], comp[1], comp[2]};
    }
    return out;
}

double VectorizedDensityMps::purity() const {
    CMatrix env = CMatrix::Ones(1, 1);
    for (const DenseTensor& t : sites_) {
        const std::size_t l = t.extent(0), r = t.extent(2);
        CMatrix next = CMatrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
        // next[b, b'] = sum_{a, a', d} conj(t[a, d, b]) env[a, a'] t[a', d, b']
        for (std::size_t d = 0; d < 4; ++d) {
            CMatrix slice(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
            for (std::size_t a = 0; a < l; ++a) {
                for (std::size_t b = 0; b < r; ++b) slice(a, b) = t.data()[(a * 4 + d) * r + b];
            }
            next.noalias() += slice.adjoint() * env * slice;
        }
        env = std::move(next);
    }
    return env(0, 0).real();
}

TruncationReport VectorizedDensityMps::compress(std::size_t chi_max, double cutoff) {
    canonicalize(0);
    TruncationReport worst;
    for (std::size_t j = 0; j + 1 < length(); ++j) {
        const std::size_t l = sites_[j].extent(0), r = sites_[j].extent(2);
        SvdResult svd = svd_truncate(sites_[j].reshaped({l * 4, r}), chi_max, cutoff);
        const std::size_t k = svd.report.kept;
        worst.discarded_weight = std::max(worst.discarded_weight, svd.report.discarded_weight);
        worst.kept = std::max(worst.kept, k);
        sites_[j] = std::move(svd.u).reshaped({l, 4, k});
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t b = 0; b < r; ++b) svd.v[c * r + b] *= svd.singular_values[c];
        }
        sites_[j + 1] = contract(svd.v, sites_[j + 1], {{1, 0}});
        center_ = j + 1;
    }
    normalize_trace();
    return worst;
}

void VectorizedDensityMps::apply_site_operator(std::size_t j, const CMatrix& op) {
    if (op.rows() != 4 || op.cols() != 4) {
        throw std::invalid_argument("apply_site_operator: operator must be 4x4");
    }
    DenseTensor g = DenseTensor::from_matrix(op);
    // out[l, e, r] = sum_d g[e, d] t[l, d, r]
    sites_[j] = contract(g, sites_[j], {{1, 1}}).permuted({1, 0, 2});
    if (center_ && *center_ != j) center_.reset();
}

}  // namespace xxzmagic
