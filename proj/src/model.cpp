#include "xxzmagic/model.hpp"

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace xxzmagic {

namespace {

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0};
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix spin_plus() { return (pauli_x() + Complex{0, 1} * pauli_y()) / 2.0; }
CMatrix spin_minus() { return (pauli_x() - Complex{0, 1} * pauli_y()) / 2.0; }

// Vectorized dissipator of a single jump operator, acting on (ket x bra)
// indices of the spanned sites: F (x) F* - 1/2 (F^dag F (x) 1 + 1 (x) (F^dag F)^T).
CMatrix dissipator_term(const CMatrix& f) {
    const Eigen::Index d = f.rows();
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix fdf = f.adjoint() * f;
    CMatrix out = Eigen::kroneckerProduct(f, f.conjugate());
    out -= 0.5 * Eigen::kroneckerProduct(fdf, id);
    out -= 0.5 * Eigen::kroneckerProduct(id, fdf.transpose());
    return out;
}

CMatrix hamiltonian_commutator(const CMatrix& h) {
    const Eigen::Index d = h.rows();
    const CMatrix id = CMatrix::Identity(d, d);
    return Complex{0, -1} * (Eigen::kroneckerProduct(h, id) - Eigen::kroneckerProduct(id, h.transpose()));
}

// Reorder a two-site superoperator from ket/bra-major indices
// (s_a s_b; s'_a s'_b) to site-major (d_a = 2 s_a + s'_a, d_b = 2 s_b + s'_b).
CMatrix to_site_major(const CMatrix& g) {
    auto site_major_of = [](std::size_t ketbra) {
        const std::size_t sa = (ketbra >> 3) & 1, sb = (ketbra >> 2) & 1;
        const std::size_t pa = (ketbra >> 1) & 1, pb = ketbra & 1;
        return ((sa * 2 + pa) << 2) | (sb * 2 + pb);
    };
    CMatrix out(16, 16);
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 16; ++c) {
            out(static_cast<Eigen::Index>(site_major_of(r)), static_cast<Eigen::Index>(site_major_of(c))) =
                g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

}  // namespace

void XxzParams::validate() const {
    if (length < 2) throw std::invalid_argument("XxzParams: L >= 2 required");
    if (j <= 0.0) throw std::invalid_argument("XxzParams: J > 0 required");
}

DissipatorSpec DissipatorSpec::boundary(double gamma, double mu) {
    DissipatorSpec d;
    d.kind = DissipatorKind::boundary_drive;
    d.gamma = gamma;
    d.mu = mu;
    d.validate();
    return d;
}

DissipatorSpec DissipatorSpec::dephasing(double gamma_z) {
    DissipatorSpec d;
    d.kind = DissipatorKind::bulk_dephasing;
    d.gamma_z = gamma_z;
    d.validate();
    return d;
}

void DissipatorSpec::validate() const {
    if (kind == DissipatorKind::boundary_drive) {
        if (std::abs(mu) > 1.0) throw std::invalid_argument("DissipatorSpec: |mu| <= 1 required");
        if (gamma < 0.0) throw std::invalid_argument("DissipatorSpec: gamma >= 0 required");
    }
    if (kind == DissipatorKind::bulk_dephasing && gamma_z < 0.0) {
        throw std::invalid_argument("DissipatorSpec: gamma_z >= 0 required");
    }
}

CMatrix bond_hamiltonian(double j_coupling, double delta) {
    CMatrix h = Eigen::kroneckerProduct(pauli_x(), pauli_x());
    h += Eigen::kroneckerProduct(pauli_y(), pauli_y());
    h += delta * Eigen::kroneckerProduct(pauli_z(), pauli_z());
    return (j_coupling / 4.0) * h;
}

std::vector<SiteJumpOperator> boundary_jump_ops(double gamma, double mu, std::size_t length) {
    if (std::abs(mu) > 1.0) throw std::invalid_argument("boundary_jump_ops: |mu| <= 1 required");
    if (gamma < 0.0) throw std::invalid_argument("boundary_jump_ops: gamma >= 0 required");
    const double lo = std::sqrt(gamma * (1.0 - mu));
    const double hi = std::sqrt(gamma * (1.0 + mu));
    return {
        {0, lo * spin_minus()},
        {0, hi * spin_plus()},
        {length - 1, hi * spin_minus()},
        {length - 1, lo * spin_plus()},
    };
}

CMatrix dephasing_jump_op(double gamma_z) {
    if (gamma_z < 0.0) throw std::invalid_argument("dephasing_jump_op: gamma_z >= 0 required");
    return std::sqrt(gamma_z) * pauli_z() / 2.0;
}

CMatrix single_site_generator(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps) {
    CMatrix g = hamiltonian_commutator(hamiltonian);
    for (const CMatrix& f : jumps) g += dissipator_term(f);
    return g;
}

CMatrix two_site_generator(const CMatrix& bond_h, const std::vector<SiteJumpOperator>& site_jumps,
                           std::size_t left_site) {
    CMatrix g = hamiltonian_commutator(bond_h);
    const CMatrix id2 = CMatrix::Identity(2, 2);
    for (const SiteJumpOperator& jump : site_jumps) {
        CMatrix f2;
        if (jump.site == left_site) {
            f2 = Eigen::kroneckerProduct(jump.op, id2);
        } else if (jump.site == left_site + 1) {
            f2 = Eigen::kroneckerProduct(id2, jump.op);
        } else {
            throw std::invalid_argument("two_site_generator: jump operator outside the bond");
        }
        g += dissipator_term(f2);
    }
    return to_site_major(g);
}

std::vector<LiouvillianGate> build_gates(const XxzParams& params, const DissipatorSpec& diss,
                                         double dt, int order) {
    params.validate();
    diss.validate();
    if (dt <= 0.0) throw std::invalid_argument("build_gates: dt > 0 required");
    if (order != 1 && order != 2) throw std::invalid_argument("build_gates: order must be 1 or 2");

    const std::size_t length = params.length;
    const CMatrix bond_h = bond_hamiltonian(params.j, params.delta);

    std::vector<SiteJumpOperator> boundary;
    if (diss.kind == DissipatorKind::boundary_drive) {
        boundary = boundary_jump_ops(diss.gamma, diss.mu, length);
    }

    auto bond_gate = [&](std::size_t bond, double tau) {
        std::vector<SiteJumpOperator> jumps;
        for (const SiteJumpOperator& jump : boundary) {
            if ((bond == 0 && jump.site == 0) || (bond == length - 2 && jump.site == length - 1)) {
                jumps.push_back(jump);
            }
        }
        LiouvillianGate g;
        g.site = bond;
        g.span = 2;
        g.dt = tau;
        g.matrix = (two_site_generator(bond_h, jumps, bond) * tau).exp();
        return g;
    };

    auto dephasing_gates = [&](double tau, std::vector<LiouvillianGate>& out) {
        if (diss.kind != DissipatorKind::bulk_dephasing || diss.gamma_z == 0.0) return;
        const CMatrix gen =
            single_site_generator(CMatrix::Zero(2, 2), {dephasing_jump_op(diss.gamma_z)});
        const CMatrix gate = (gen * tau).exp();
        for (std::size_t s = 0; s < length; ++s) out.push_back({s, 1, tau, gate});
    };

    auto bond_group = [&](std::size_t parity, double tau, std::vector<LiouvillianGate>& out) {
        for (std::size_t b = parity; b + 1 < length; b += 2) out.push_back(bond_gate(b, tau));
    };

    std::vector<LiouvillianGate> gates;
    if (order == 1) {
        dephasing_gates(dt, gates);
        bond_group(0, dt, gates);
        bond_group(1, dt, gates);
    } else {
        dephasing_gates(dt / 2.0, gates);
        bond_group(0, dt / 2.0, gates);
        bond_group(1, dt, gates);
        bond_group(0, dt / 2.0, gates);
        dephasing_gates(dt / 2.0, gates);
    }
    return gates;
}

}  // namespace xxzmagic
