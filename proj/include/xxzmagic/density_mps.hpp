#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xxzmagic/tensor.hpp"

namespace xxzmagic {

/// Local magnetization (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of one site.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Vectorized density matrix |rho>> as an MPS over a 4-dimensional physical
/// index per site. The physical index enumerates the ordered pair (s, s') of
/// ket/bra basis states as d = 2s + s'; site tensors have axes
/// (left bond, physical, right bond) with boundary bonds of extent 1.
///
/// Positivity of rho is not enforced; truncation can push eigenvalues
/// slightly negative. Hermiticity is monitored through pauli_expectation's
/// imaginary-part check, not enforced.
class VectorizedDensityMps {
public:
    static VectorizedDensityMps infinite_temperature(std::size_t length);
    static VectorizedDensityMps bloch_product(std::span<const BlochVector> vectors);
    static VectorizedDensityMps neel(std::size_t length);  // m = (0,0,+1), (0,0,-1), ...

    VectorizedDensityMps() = default;
    explicit VectorizedDensityMps(std::vector<DenseTensor> site_tensors);

    std::size_t length() const { return sites_.size(); }
    const DenseTensor& site(std::size_t j) const { return sites_[j]; }
    void set_site(std::size_t j, DenseTensor t);

    /// Bond extents including the two unit boundary bonds (length L+1).
    std::vector<std::size_t> bond_dimensions() const;
    std::size_t max_bond_dimension() const;

    std::optional<std::size_t> ortho_center() const { return center_; }
    void invalidate_center() { center_.reset(); }
    /// Trusts the caller that the tensors are already canonical around j
    /// (used when restoring saved states).
    void assume_center(std::optional<std::size_t> j) { center_ = j; }

    /// Full canonicalization with the orthogonality center at `center`.
    void canonicalize(std::size_t center);
    /// Incremental center move; canonicalizes from scratch if no center is set.
    void move_center_to(std::size_t center);

    double trace() const;

    /// Rescales so trace == 1; returns the prior trace. Throws
    /// std::runtime_error when |trace| < 1e-14 (corrupted evolution).
    double normalize_trace();

    /// Tr(P rho) for a Pauli string given per site as characters I, X, Y, Z.
    /// Throws std::runtime_error when the imaginary part exceeds imag_tol
    /// (broken Hermiticity).
    double pauli_expectation(const std::string& pauli_string, double imag_tol = 1e-10) const;

    /// Per-site (⟨X⟩, ⟨Y⟩, ⟨Z⟩) using cached environments, O(L chi^2).
    std::vector<BlochVector> magnetization_profile() const;

    /// Tr(rho^2) via the self-overlap of the vectorized state.
    double purity() const;

    /// Sweep truncation to bond <= chi_max; trace is renormalized afterwards.
    /// Returns the maximal per-bond discarded weight encountered.
    TruncationReport compress(std::size_t chi_max, double cutoff);

    /// Contract a 4x4 operator into the physical leg of site j.
    void apply_site_operator(std::size_t j, const CMatrix& op);

private:
    void left_normalize_step(std::size_t j);   // push center j -> j+1
    void right_normalize_step(std::size_t j);  // push center j -> j-1

    std::vector<DenseTensor> sites_;
    std::optional<std::size_t> center_;
};

}  // namespace xxzmagic
