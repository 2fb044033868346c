#pragma once

#include <cstddef>
#include <vector>

#include "xxzmagic/tensor.hpp"

namespace xxzmagic {

/// XXZ chain H = (J/4) sum_j (X_j X_{j+1} + Y_j Y_{j+1} + Delta Z_j Z_{j+1}).
/// J sets the time unit 1/J; all times are reported in those units.
struct XxzParams {
    double j = 1.0;
    double delta = 1.0;
    std::size_t length = 2;

    void validate() const;
};

enum class DissipatorKind { none, boundary_drive, bulk_dephasing };

/// Boundary drive: gain/loss S^+/S^- at the chain ends with bias mu at
/// coupling gamma (units of J). Bulk dephasing: F_j = sqrt(gamma_z) S_j^z at
/// every site.
struct DissipatorSpec {
    DissipatorKind kind = DissipatorKind::none;
    double gamma = 1.0;    // boundary coupling magnitude, default 1*J
    double mu = 0.0;       // drive bias in [-1, 1]
    double gamma_z = 0.0;  // dephasing rate

    static DissipatorSpec none() { return {}; }
    static DissipatorSpec boundary(double gamma, double mu);
    static DissipatorSpec dephasing(double gamma_z);

    void validate() const;
};

/// One superoperator gate acting on the combined (s, s') physical legs of
/// `span` adjacent sites starting at `site`. The matrix is laid out
/// site-major: for span 2 its 16x16 indices factorize as (d_site, d_site+1)
/// with d = 2s + s'. Every gate satisfies <<1| G = <<1| (trace preservation).
struct LiouvillianGate {
    std::size_t site = 0;
    int span = 1;
    double dt = 0.0;
    CMatrix matrix;  // 4x4 (span 1) or 16x16 (span 2)
};

/// Two-site Hamiltonian of one bond in the basis |s_j s_{j+1}>, d = 2s_j + s_{j+1}.
CMatrix bond_hamiltonian(double j_coupling, double delta);

struct SiteJumpOperator {
    std::size_t site = 0;  // 0-based
    CMatrix op;            // 2x2
};

/// The four boundary Lindblad operators: sqrt(gamma(1-mu)) S^- and
/// sqrt(gamma(1+mu)) S^+ at the first site, sqrt(gamma(1+mu)) S^- and
/// sqrt(gamma(1-mu)) S^+ at the last.
std::vector<SiteJumpOperator> boundary_jump_ops(double gamma, double mu, std::size_t length);

/// sqrt(gamma_z) * Z/2.
CMatrix dephasing_jump_op(double gamma_z);

/// Vectorized Lindblad generator restricted to one site (4x4) or one bond
/// (16x16, site-major): -i(H (x) 1 - 1 (x) H^T) + sum_k [F (x) F* - 1/2(F^dag F (x) 1 + 1 (x) (F^dag F)^T)].
CMatrix single_site_generator(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps);
CMatrix two_site_generator(const CMatrix& bond_h, const std::vector<SiteJumpOperator>& site_jumps,
                           std::size_t left_site);

/// Trotter gate sequence for one time step, applied front to back.
/// order 1: [dephasing dt] [odd bonds dt] [even bonds dt]
/// order 2: [dephasing dt/2] [odd dt/2] [even dt] [odd dt/2] [dephasing dt/2]
/// where odd bonds are (1,2), (3,4), ... in 1-based site labels (0-based bond
/// indices 0, 2, ...). Boundary dissipators are folded into the terminal bond
/// gates; dephasing gates are exact single-site superoperator exponentials.
std::vector<LiouvillianGate> build_gates(const XxzParams& params, const DissipatorSpec& diss,
                                         double dt, int order);

}  // namespace xxzmagic
