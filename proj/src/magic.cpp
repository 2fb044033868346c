#include "xxzmagic/magic.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace xxzmagic {

namespace {

using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMat>;
using ConstMap = Eigen::Map<const RowMat>;
using SliceMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

// T[alpha][d = 2s+s'] = <s| P_alpha |s'> / sqrt(2); unitary on the physical leg.
const std::array<std::array<Complex, 4>, 4>& pauli_transform() {
    static const double r = 1.0 / std::sqrt(2.0);
    static const std::array<std::array<Complex, 4>, 4> t = {{
        {Complex{r, 0}, Complex{0, 0}, Complex{0, 0}, Complex{r, 0}},
        {Complex{0, 0}, Complex{r, 0}, Complex{r, 0}, Complex{0, 0}},
        {Complex{0, 0}, Complex{0, -r}, Complex{0, r}, Complex{0, 0}},
        {Complex{r, 0}, Complex{0, 0}, Complex{0, 0}, Complex{-r, 0}},
    }};
    return t;
}

// Physical slice alpha of a site tensor as an (l x r) matrix.
SliceMap phys_slice(const DenseTensor& t, std::size_t alpha) {
    const auto l = static_cast<Eigen::Index>(t.extent(0));
    const auto r = static_cast<Eigen::Index>(t.extent(2));
    return SliceMap(t.data() + alpha * t.extent(2), l, r, Eigen::OuterStride<>(4 * r));
}

}  // namespace

std::vector<std::size_t> PauliVector::bond_dimensions() const {
    std::vector<std::size_t> bonds(site_tensors.size() + 1);
    bonds[0] = site_tensors.front().extent(0);
    for (std::size_t j = 0; j < site_tensors.size(); ++j) bonds[j + 1] = site_tensors[j].extent(2);
    return bonds;
}

std::vector<std::size_t> WMpo::bond_dimensions() const {
    std::vector<std::size_t> bonds(site_tensors.size() + 1);
    bonds[0] = site_tensors.front().extent(0);
    for (std::size_t j = 0; j < site_tensors.size(); ++j) bonds[j + 1] = site_tensors[j].extent(2);
    return bonds;
}

PauliVector pauli_vector(const VectorizedDensityMps& state) {
    const auto& tf = pauli_transform();
    PauliVector pv;
    pv.site_tensors.reserve(state.length());
    for (std::size_t j = 0; j < state.length(); ++j) {
        const DenseTensor& a = state.site(j);
        const std::size_t l = a.extent(0), r = a.extent(2);
        DenseTensor b({l, 4, r});
        for (std::size_t al = 0; al < l; ++al) {
            const Complex* src = a.data() + al * 4 * r;
            Complex* dst = b.data() + al * 4 * r;
            for (std::size_t alpha = 0; alpha < 4; ++alpha) {
                for (std::size_t br = 0; br < r; ++br) {
                    Complex acc{0, 0};
                    for (std::size_t d = 0; d < 4; ++d) {
                        if (tf[alpha][d] != Complex{0, 0}) acc += tf[alpha][d] * src[d * r + br];
                    }
                    dst[alpha * r + br] = acc;
                }
            }
        }
        pv.site_tensors.push_back(std::move(b));
    }
    return pv;
}

WMpo w_mpo(const PauliVector& pv) {
    return WMpo{pv.site_tensors};
}

double pauli_vector_norm_sq(const PauliVector& pv) {
    CMatrix env = CMatrix::Ones(1, 1);
    for (const DenseTensor& t : pv.site_tensors) {
        const auto r = static_cast<Eigen::Index>(t.extent(2));
        CMatrix next = CMatrix::Zero(r, r);
        for (std::size_t alpha = 0; alpha < 4; ++alpha) {
            auto slice = phys_slice(t, alpha);
            next.noalias() += slice.adjoint() * env * slice;
        }
        env = std::move(next);
    }
    const Complex v = env(0, 0);
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
        throw std::runtime_error("pauli_vector_norm_sq: non-real overlap");
    }
    return v.real();
}

double w_squared_expectation(const PauliVector& pv, MemoryMeter* meter) {
    // sum over Pauli strings of |b^2|^2 where b is the string amplitude. The
    // environment carries four bond copies (two conjugated, two not); each
    // site update cycles it through
    //   (a1, a2 a3 a4) -> (a2 a3 a4, b1) -> ... -> (b1, b2 b3 b4)
    // with one transpose-fused GEMM per copy, for each shared alpha. The last
    // copy accumulates straight into the next environment.
    constexpr std::size_t cplx = sizeof(Complex);
    auto note = [&](std::size_t n) { if (meter) meter->allocate(n * cplx); };
    auto drop = [&](std::size_t n) { if (meter) meter->release(n * cplx); };

    std::vector<Complex> env = {Complex{1, 0}};
    note(1);
    std::size_t env_rows = 1;  // current first-copy bond
    for (const DenseTensor& t : pv.site_tensors) {
        const std::size_t l = t.extent(0), r = t.extent(2);
        const std::size_t n1 = l * l * l * r, n2 = l * l * r * r, n3 = l * r * r * r, n4 = r * r * r * r;

        // Conjugated copy for the bra-side contractions (keeps every product a
        // plain GEMM; conjugate-without-transpose has no BLAS form).
        std::vector<Complex> conj_data(t.entries().begin(), t.entries().end());
        for (Complex& z : conj_data) z = std::conj(z);
        DenseTensor tconj({l, 4, r}, std::move(conj_data));
        note(t.size());

        std::vector<Complex> acc(n4, Complex{0, 0});
        note(n4);
        std::vector<Complex> buf1(n1), buf2(n2), buf3(n3);
        note(n1);
        note(n2);
        note(n3);
        for (std::size_t alpha = 0; alpha < 4; ++alpha) {
            const auto slice = phys_slice(t, alpha);
            const auto slice_conj = phys_slice(tconj, alpha);
            ConstMap cur0(env.data(), static_cast<Eigen::Index>(env_rows),
                          static_cast<Eigen::Index>(l * l * l));
            Map m1(buf1.data(), static_cast<Eigen::Index>(l * l * l), static_cast<Eigen::Index>(r));
            m1.noalias() = cur0.transpose() * slice_conj;

            ConstMap cur1(buf1.data(), static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l * l * r));
            Map m2(buf2.data(), static_cast<Eigen::Index>(l * l * r), static_cast<Eigen::Index>(r));
            m2.noalias() = cur1.transpose() * slice_conj;

            ConstMap cur2(buf2.data(), static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l * r * r));
            Map m3(buf3.data(), static_cast<Eigen::Index>(l * r * r), static_cast<Eigen::Index>(r));
            m3.noalias() = cur2.transpose() * slice;

            ConstMap cur3(buf3.data(), static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r * r * r));
            Map macc(acc.data(), static_cast<Eigen::Index>(r * r * r), static_cast<Eigen::Index>(r));
            macc.noalias() += cur3.transpose() * slice;
        }
        drop(n3);
        drop(n2);
        drop(n1);
        drop(t.size());
        drop(env.size());
        env = std::move(acc);
        env_rows = r;
    }
    const Complex v = env[0];
    drop(1);
    if (std::abs(v.imag()) > 1e-9 * std::max(std::abs(v.real()), 1e-300)) {
        throw std::runtime_error("w_squared_expectation: non-real result (state corrupted)");
    }
    return v.real();
}

std::size_t m2_peak_additional_bytes(std::span<const std::size_t> bond_dims) {
    constexpr std::size_t cplx = sizeof(Complex);
    MemoryMeter meter;
    meter.allocate(1 * cplx);
    std::size_t env = 1;
    for (std::size_t j = 0; j + 1 < bond_dims.size(); ++j) {
        const std::size_t l = bond_dims[j], r = bond_dims[j + 1];
        const std::size_t n1 = l * l * l * r, n2 = l * l * r * r, n3 = l * r * r * r, n4 = r * r * r * r;
        meter.allocate(l * 4 * r * cplx);
        meter.allocate(n4 * cplx);
        meter.allocate(n1 * cplx);
        meter.allocate(n2 * cplx);
        meter.allocate(n3 * cplx);
        meter.release(n3 * cplx);
        meter.release(n2 * cplx);
        meter.release(n1 * cplx);
        meter.release(l * 4 * r * cplx);
        meter.release(env * cplx);
        env = n4;
    }
    return meter.peak;
}

MagicValue stabilizer_renyi_m2(const VectorizedDensityMps& state, MemoryMeter* meter) {
    const double tr = state.trace();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw std::invalid_argument("stabilizer_renyi_m2: state must be trace-normalized");
    }
    const PauliVector pv = pauli_vector(state);
    if (pv.bond_dimensions() != state.bond_dimensions()) {
        throw std::runtime_error("stabilizer_renyi_m2: Pauli vector changed bond structure");
    }

    const double den_raw = pauli_vector_norm_sq(pv);
    if (den_raw < 1e-300) throw std::runtime_error("stabilizer_renyi_m2: norm underflow");
    const double num_raw = w_squared_expectation(pv, meter);
    if (num_raw < -1e-12 * den_raw) {
        throw std::runtime_error("stabilizer_renyi_m2: negative fourth moment (state corrupted)");
    }

    const auto length = static_cast<double>(state.length());
    MagicValue out;
    out.m2 = -std::log2(num_raw / den_raw) - length;
    out.numerator = num_raw * std::exp2(2.0 * length);
    out.denominator = den_raw * std::exp2(length);
    return out;
}

double mean_field_m2(std::span<const BlochVector> profile) {
    double total = 0.0;
    for (const BlochVector& m : profile) {
        if (m.norm() > 1.0 + 1e-12) {
            throw std::invalid_argument("mean_field_m2: |m| > 1");
        }
        const double s2 = m.x * m.x + m.y * m.y + m.z * m.z;
        const double s4 = m.x * m.x * m.x * m.x + m.y * m.y * m.y * m.y + m.z * m.z * m.z * m.z;
        total += std::log2(1.0 + s2) - std::log2(1.0 + s4);
    }
    return total;
}

double single_qubit_m2_analytic(double theta, double phi, double gamma_z, double t, double b_z) {
    if (t < 0.0) throw std::invalid_argument("single_qubit_m2_analytic: t >= 0 required");
    const double ph = phi + b_z * t;
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const double sp4 = std::pow(std::sin(ph), 4) + std::pow(std::cos(ph), 4);
    const double num = 1.0 + c2 + s2 * std::exp(-gamma_z * t);
    const double den = 1.0 + c2 * c2 + s2 * s2 * sp4 * std::exp(-2.0 * gamma_z * t);
    return std::log2(num / den);
}

double two_qubit_m2_analytic(double theta, double phi, double delta, double gamma_z, double t) {
    if (t < 0.0) throw std::invalid_argument("two_qubit_m2_analytic: t >= 0 required");
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const Complex phase = std::exp(Complex{0.0, (delta - 1.0) * t / 2.0});
    const Complex a = (cp + Complex{0, 1} * ct * sp) * phase;
    const Complex b = (sp - Complex{0, 1} * ct * cp) * phase;
    const double f = std::pow(a.real(), 4) + std::pow(a.imag(), 4) +
                     std::pow(b.real(), 4) + std::pow(b.imag(), 4);
    const double et = std::exp(-gamma_z * t);
    const double num = std::pow(1.0 + ct * ct + st * st * et, 2);
    const double den = std::pow(1.0 + std::pow(ct, 4), 2) +
                       std::pow(st, 8) * std::pow(std::pow(cp, 4) + std::pow(sp, 4), 2) * et * et * et * et +
                       2.0 * std::pow(st, 4) * f * et * et;
    return std::log2(num / den);
}

double heisenberg_ness_m2_density(double theta) {
    const double c2 = std::cos(theta) * std::cos(theta);
    return std::log2((1.0 + c2) / (1.0 + c2 * c2));
}

}  // namespace xxzmagic
