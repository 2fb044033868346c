#include "xxzmagic/oracle.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace xxzmagic {

namespace {

CMatrix pauli(char label) {
    CMatrix m(2, 2);
    switch (label) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0}; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: bad label");
    }
    return m;
}

CMatrix embed_site_op(const CMatrix& op, std::size_t site, std::size_t length) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < length; ++k) {
        const CMatrix& f = (k == site) ? op : pauli('I');
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

}  // namespace

std::size_t DenseState::num_sites() const {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < static_cast<std::size_t>(matrix.rows())) ++n;
    return n;
}

DenseState to_dense(const VectorizedDensityMps& state) {
    const std::size_t length = state.length();
    if (length > 10) throw std::invalid_argument("to_dense: L <= 10 required");
    // Accumulate the full site-major vector (d_1 ... d_L), d = 2s + s'.
    Eigen::VectorXcd amp = Eigen::VectorXcd::Ones(1);
    std::size_t phys = 1;
    for (std::size_t j = 0; j < length; ++j) {
        const DenseTensor& t = state.site(j);
        const std::size_t l = t.extent(0), r = t.extent(2);
        Eigen::VectorXcd next = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(phys * 4 * r));
        for (std::size_t i = 0; i < phys; ++i) {
            for (std::size_t a = 0; a < l; ++a) {
                const Complex w = amp[static_cast<Eigen::Index>(i * l + a)];
                if (w == Complex{0, 0}) continue;
                const Complex* block = t.data() + a * 4 * r;
                for (std::size_t dr = 0; dr < 4 * r; ++dr) {
                    next[static_cast<Eigen::Index>(i * 4 * r + dr)] += w * block[dr];
                }
            }
        }
        amp = std::move(next);
        phys *= 4;
    }

    const std::size_t dim = std::size_t{1} << length;
    DenseState out;
    out.matrix = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t flat = 0; flat < phys; ++flat) {
        std::size_t row = 0, col = 0, rest = flat;
        for (std::size_t j = 0; j < length; ++j) {
            const std::size_t d = (rest / (phys / 4 >> (2 * j))) % 4;
            row = (row << 1) | (d >> 1);
            col = (col << 1) | (d & 1);
            (void)rest;
        }
        out.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            amp[static_cast<Eigen::Index>(flat)];
    }
    return out;
}

CMatrix dense_liouvillian(const XxzParams& params, const DissipatorSpec& diss) {
    params.validate();
    diss.validate();
    const std::size_t length = params.length;
    if (length > 6) throw std::invalid_argument("dense_liouvillian: L <= 6 required");
    const std::size_t dim = std::size_t{1} << length;
    const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

    CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b + 1 < length; ++b) {
        for (char label : {'X', 'Y', 'Z'}) {
            const double coeff = (label == 'Z') ? params.delta : 1.0;
            h += (params.j / 4.0) * coeff *
                 (embed_site_op(pauli(label), b, length) * embed_site_op(pauli(label), b + 1, length));
        }
    }

    std::vector<CMatrix> jumps;
    if (diss.kind == DissipatorKind::boundary_drive) {
        for (const SiteJumpOperator& jump : boundary_jump_ops(diss.gamma, diss.mu, length)) {
            jumps.push_back(embed_site_op(jump.op, jump.site, length));
        }
    } else if (diss.kind == DissipatorKind::bulk_dephasing) {
        for (std::size_t s = 0; s < length; ++s) {
            jumps.push_back(embed_site_op(dephasing_jump_op(diss.gamma_z), s, length));
        }
    }

    CMatrix gen = Complex{0, -1} * (Eigen::kroneckerProduct(h, id) - Eigen::kroneckerProduct(id, h.transpose()));
    for (const CMatrix& f : jumps) {
        const CMatrix fdf = f.adjoint() * f;
        gen += Eigen::kroneckerProduct(f, f.conjugate());
        gen -= 0.5 * Eigen::kroneckerProduct(fdf, id);
        gen -= 0.5 * Eigen::kroneckerProduct(id, fdf.transpose());
    }
    return gen;
}

CMatrix dense_propagator(const CMatrix& generator, double t) {
    if (t < 0.0) throw std::invalid_argument("dense_propagator: t >= 0 required");
    return (generator * t).exp();
}

DenseState apply_propagator(const CMatrix& propagator, const DenseState& rho) {
    const Eigen::Index dim = rho.matrix.rows();
    Eigen::VectorXcd vec(dim * dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        vec.segment(r * dim, dim) = rho.matrix.row(r).transpose();
    }
    vec = propagator * vec;
    DenseState out;
    out.matrix.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        out.matrix.row(r) = vec.segment(r * dim, dim).transpose();
    }
    return out;
}

DenseState dense_evolve(const DenseState& rho0, const CMatrix& generator, double t) {
    return apply_propagator(dense_propagator(generator, t), rho0);
}

namespace {

// Pauli coefficients c_P = Tr(P rho) for all 4^L strings: apply the per-site
// 4x4 map row_alpha[d = 2s+s'] = P_alpha[s', s] to the site-major vec(rho).
std::vector<double> pauli_coefficients(const DenseState& rho) {
    const std::size_t length = rho.num_sites();
    if (length > 8) throw std::invalid_argument("brute_force_m2: L <= 8 required");
    const std::size_t dim = std::size_t{1} << length;
    const std::size_t total = std::size_t{1} << (2 * length);

    std::vector<Complex> vec(total);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            // Interleave row/col bits into the site-major base-4 index.
            std::size_t flat = 0;
            for (std::size_t j = 0; j < length; ++j) {
                const std::size_t s = (r >> (length - 1 - j)) & 1;
                const std::size_t sp = (c >> (length - 1 - j)) & 1;
                flat = flat * 4 + (2 * s + sp);
            }
            vec[flat] = rho.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }

    const std::array<std::array<Complex, 4>, 4> rows = {{
        {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}},
        {Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}},
        {Complex{0, 0}, Complex{0, 1}, Complex{0, -1}, Complex{0, 0}},
        {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{-1, 0}},
    }};

    // Transform one site index at a time; site 0 is the most significant digit.
    std::vector<Complex> tmp(total);
    std::size_t outer = 1, inner = total / 4;
    for (std::size_t j = 0; j < length; ++j) {
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t i = 0; i < inner; ++i) {
                const std::size_t base = o * 4 * inner + i;
                for (std::size_t alpha = 0; alpha < 4; ++alpha) {
                    Complex acc{0, 0};
                    for (std::size_t d = 0; d < 4; ++d) acc += rows[alpha][d] * vec[base + d * inner];
                    tmp[base + alpha * inner] = acc;
                }
            }
        }
        vec.swap(tmp);
        outer *= 4;
        inner /= 4;
    }

    std::vector<double> coeffs(total);
    for (std::size_t p = 0; p < total; ++p) {
        if (std::abs(vec[p].imag()) > 1e-10) {
            throw std::runtime_error("brute_force_m2: complex Pauli coefficient (rho not Hermitian)");
        }
        coeffs[p] = vec[p].real();
    }
    return coeffs;
}

}  // namespace

MagicValue brute_force_m2(const DenseState& rho) {
    const std::vector<double> coeffs = pauli_coefficients(rho);
    double s2 = 0.0, s4 = 0.0;
    for (double c : coeffs) {
        const double c2 = c * c;
        s2 += c2;
        s4 += c2 * c2;
    }
    if (s2 <= 0.0 || s4 <= 0.0) throw std::runtime_error("brute_force_m2: degenerate Pauli spectrum");
    return {-std::log2(s4 / s2), s4, s2};
}

void dump_pauli_spectrum(const DenseState& rho, const std::filesystem::path& file) {
    const std::vector<double> coeffs = pauli_coefficients(rho);
    const std::size_t length = rho.num_sites();
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("dump_pauli_spectrum: cannot open " + file.string());
    out << "pauli_string,c_p\n";
    const char labels[] = "IXYZ";
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
        std::string label(length, 'I');
        std::size_t rest = p;
        for (std::size_t j = length; j-- > 0;) {
            label[j] = labels[rest % 4];
            rest /= 4;
        }
        out << label << ',' << coeffs[p] << '\n';
    }
}

}  // namespace xxzmagic
