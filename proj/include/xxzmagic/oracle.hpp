#pragma once

#include <filesystem>

#include "xxzmagic/density_mps.hpp"
#include "xxzmagic/model.hpp"

namespace xxzmagic {

/// Exact 2^L x 2^L density matrix for small systems.
struct DenseState {
    CMatrix matrix;

    std::size_t num_sites() const;
};

/// Full contraction of the MPS into a dense density matrix (L <= 10).
DenseState to_dense(const VectorizedDensityMps& state);

/// Full 4^L x 4^L vectorized Lindblad generator (L <= 6). Acts on vec(rho)
/// in ket-major order: vec index = row * 2^L + col.
CMatrix dense_liouvillian(const XxzParams& params, const DissipatorSpec& diss);

/// exp(generator * t) applied to vec(rho0), via scaling-and-squaring.
DenseState dense_evolve(const DenseState& rho0, const CMatrix& generator, double t);

/// Precomputed-propagator variant for repeated snapshot stepping.
CMatrix dense_propagator(const CMatrix& generator, double t);
DenseState apply_propagator(const CMatrix& propagator, const DenseState& rho);

struct MagicValue {
    double m2 = 0.0;
    double numerator = 0.0;    // sum_P c_P^4, unnormalized Pauli strings
    double denominator = 0.0;  // sum_P c_P^2
};

/// Direct enumeration of all 4^L Pauli strings (L <= 8), base-4 counter order
/// with site 0 as the most significant digit, Pauli order I, X, Y, Z.
MagicValue brute_force_m2(const DenseState& rho);

/// Debug dump: CSV rows (pauli_string, c_P) in enumeration order.
void dump_pauli_spectrum(const DenseState& rho, const std::filesystem::path& file);

}  // namespace xxzmagic
