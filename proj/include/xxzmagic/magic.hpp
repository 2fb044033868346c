#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xxzmagic/density_mps.hpp"
#include "xxzmagic/oracle.hpp"

namespace xxzmagic {

/// MPS over the 4-dimensional Pauli index alpha in the fixed order I, X, Y, Z,
/// holding the per-string amplitudes b = Tr-like overlaps of rho with Pauli
/// strings scaled by 2^{-L/2}. Bond dimensions are identical to the source
/// state's at every bond.
struct PauliVector {
    std::vector<DenseTensor> site_tensors;  // (left, 4, right)

    std::vector<std::size_t> bond_dimensions() const;
};

/// Diagonal MPO whose action multiplies each Pauli-string amplitude by itself:
/// C_j^{alpha,alpha'} = B_j^alpha delta_{alpha,alpha'}. Stored as the B
/// tensors; the Kronecker delta is implicit.
struct WMpo {
    std::vector<DenseTensor> site_tensors;

    std::vector<std::size_t> bond_dimensions() const;
};

/// Byte meter for the working set of the M2 contraction (environments and
/// transients, beyond the input state and its Pauli vector).
struct MemoryMeter {
    std::size_t live = 0;
    std::size_t peak = 0;

    void allocate(std::size_t bytes) {
        live += bytes;
        peak = std::max(peak, live);
    }
    void release(std::size_t bytes) { live -= bytes; }
};

/// Per-site (s,s') -> alpha rotation of the physical leg with the 1/sqrt(2)
/// normalization; bond structure untouched, cost O(L chi^2).
PauliVector pauli_vector(const VectorizedDensityMps& state);

WMpo w_mpo(const PauliVector& pv);

/// <pv|pv> = sum_alpha |b_alpha|^2.
double pauli_vector_norm_sq(const PauliVector& pv);

/// <pv| W^2 |pv> = sum_alpha b_alpha^4, evaluated by streaming the four-copy
/// transfer environment site by site (W is never materialized onto the state).
double w_squared_expectation(const PauliVector& pv, MemoryMeter* meter = nullptr);

/// Stabilizer Renyi entropy M2 of a trace-normalized state, in bits.
/// Reported moments use unnormalized Pauli strings: numerator = sum c_P^4,
/// denominator = sum c_P^2 with c_P = Tr(rho P). The raw MPS ratio equals
/// 2^{-L} numerator/denominator, so L bits are subtracted to recover Eq.-(1)
/// semantics (zero on stabilizer states); fixed against the brute-force
/// enumeration oracle.
MagicValue stabilizer_renyi_m2(const VectorizedDensityMps& state, MemoryMeter* meter = nullptr);

/// Peak additional bytes stabilizer_renyi_m2 would allocate on a state with
/// the given bond profile (mirrors the evaluator's allocation sequence; unit
/// tests pin planner == metered actual).
std::size_t m2_peak_additional_bytes(std::span<const std::size_t> bond_dims);

/// Closed-form M2 of the factorized mean-field state reproducing the given
/// magnetization profile: sum_i [log2(1 + |m_i|^2) - log2(1 + sum_a m_i,a^4)].
double mean_field_m2(std::span<const BlochVector> profile);

/// Single qubit under pure dephasing from the Bloch state (theta, phi), with
/// an optional longitudinal field rotating phi -> phi + b_z t.
double single_qubit_m2_analytic(double theta, double phi, double gamma_z, double t, double b_z = 0.0);

/// Two identical qubits coupled by the XXZ bond (J = 1) under uniform
/// dephasing. The interaction phase advances as (delta - 1) t / 2, giving
/// F-term oscillations of period pi/|delta - 1|.
double two_qubit_m2_analytic(double theta, double phi, double delta, double gamma_z, double t);

/// Dephasing NESS magic density at the Heisenberg point:
/// log2[(1 + cos^2 theta)/(1 + cos^4 theta)].
double heisenberg_ness_m2_density(double theta);

}  // namespace xxzmagic
