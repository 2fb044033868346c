#include <doctest.h>

#include <random>

#include "support/test_states.hpp"
#include "xxzmagic/density_mps.hpp"
#include "xxzmagic/state_io.hpp"

using namespace xxzmagic;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("infinite temperature state: zero magnetization, unit trace") {
    auto rho = VectorizedDensityMps::infinite_temperature(1);
    CHECK(rho.pauli_expectation("X") == doctest::Approx(0.0));
    CHECK(rho.pauli_expectation("Y") == doctest::Approx(0.0));
    CHECK(rho.pauli_expectation("Z") == doctest::Approx(0.0));
    CHECK(rho.trace() == doctest::Approx(1.0));
}

TEST_CASE("infinite temperature: purity 2^-L and trace 1 at L=4") {
    auto rho = VectorizedDensityMps::infinite_temperature(4);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho.purity() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("bloch products: plus states, Neel, T states") {
    std::vector<BlochVector> plus(3, {1, 0, 0});
    auto rho = VectorizedDensityMps::bloch_product(plus);
    for (auto s : {"XII", "IXI", "IIX"}) CHECK(rho.pauli_expectation(s) == doctest::Approx(1.0));
    CHECK(rho.pauli_expectation("XXI") == doctest::Approx(1.0));  // product of <X>

    auto neel = VectorizedDensityMps::neel(4);
    CHECK(neel.pauli_expectation("ZIII") == doctest::Approx(1.0));
    CHECK(neel.pauli_expectation("IZII") == doctest::Approx(-1.0));

    std::vector<BlochVector> tvecs(2, {0.5, 0.5, kInvSqrt2});
    auto tstate = VectorizedDensityMps::bloch_product(tvecs);
    CHECK(tstate.pauli_expectation("XI") == doctest::Approx(0.5));
    CHECK(tstate.pauli_expectation("IY") == doctest::Approx(0.5));
    CHECK(tstate.pauli_expectation("ZI") == doctest::Approx(kInvSqrt2));
    CHECK(tstate.purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bloch_product rejects unphysical vectors") {
    std::vector<BlochVector> bad{{0.9, 0.9, 0.9}};
    CHECK_THROWS_AS(VectorizedDensityMps::bloch_product(bad), std::invalid_argument);
}

TEST_CASE("trace is linear and invariant under canonicalization") {
    std::mt19937 rng(3);
    auto rho = VectorizedDensityMps::bloch_product(testing::random_bloch_vectors(5, rng));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));

    auto scaled = rho;
    auto t0 = scaled.site(2);
    t0 *= Complex{0.5, 0.0};
    scaled.set_site(2, std::move(t0));
    CHECK(scaled.trace() == doctest::Approx(0.5).epsilon(1e-12));

    rho.canonicalize(3);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize_trace rescales all expectations uniformly") {
    std::mt19937 rng(5);
    auto rho = VectorizedDensityMps::bloch_product(testing::random_bloch_vectors(4, rng));
    const double z_before = rho.pauli_expectation("ZIII");
    auto t = rho.site(0);
    t *= Complex{2.0, 0.0};
    rho.set_site(0, std::move(t));
    CHECK(rho.pauli_expectation("ZIII") == doctest::Approx(2.0 * z_before).epsilon(1e-12));
    const double prior = rho.normalize_trace();
    CHECK(prior == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.pauli_expectation("ZIII") == doctest::Approx(z_before).epsilon(1e-10));
}

TEST_CASE("normalize_trace flags vanishing trace") {
    auto rho = VectorizedDensityMps::infinite_temperature(2);
    auto t = rho.site(0);
    t *= Complex{0.0, 0.0};
    rho.set_site(0, std::move(t));
    CHECK_THROWS_AS(rho.normalize_trace(), std::runtime_error);
}

TEST_CASE("pauli_expectation: all-I equals trace on any state") {
    std::mt19937 rng(7);
    auto rho = testing::random_evolved_state(4, rng);
    CHECK(rho.pauli_expectation("IIII") == doctest::Approx(rho.trace()).epsilon(1e-10));
}

TEST_CASE("magnetization_profile inverts from_bloch_product") {
    std::mt19937 rng(11);
    const auto ms = testing::random_bloch_vectors(6, rng);
    auto rho = VectorizedDensityMps::bloch_product(ms);
    const auto profile = rho.magnetization_profile();
    REQUIRE(profile.size() == ms.size());
    for (std::size_t j = 0; j < ms.size(); ++j) {
        CHECK(profile[j].x == doctest::Approx(ms[j].x).epsilon(1e-12));
        CHECK(profile[j].y == doctest::Approx(ms[j].y).epsilon(1e-12));
        CHECK(profile[j].z == doctest::Approx(ms[j].z).epsilon(1e-12));
    }
}

TEST_CASE("magnetization_profile of infinite temperature vanishes") {
    auto rho = VectorizedDensityMps::infinite_temperature(5);
    for (const BlochVector& m : rho.magnetization_profile()) CHECK(m.norm() < 1e-13);
}

TEST_CASE("purity: product states obey prod (1+|m|^2)/2") {
    std::mt19937 rng(13);
    const auto ms = testing::random_bloch_vectors(5, rng);
    auto rho = VectorizedDensityMps::bloch_product(ms);
    double expected = 1.0;
    for (const BlochVector& m : ms) expected *= (1.0 + m.norm() * m.norm()) / 2.0;
    CHECK(rho.purity() == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("purity of dephased plus state follows (1+e^{-gz t})/2") {
    // rho(t) = (1 + e^{-gz t/2} X)/2 solves the single-qubit dephasing equation
    const double gz = 0.8;
    for (double t : {0.0, 0.3, 1.7, 5.0}) {
        std::vector<BlochVector> m{{std::exp(-gz * t / 2.0), 0.0, 0.0}};
        auto rho = VectorizedDensityMps::bloch_product(m);
        CHECK(rho.purity() == doctest::Approx((1.0 + std::exp(-gz * t)) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("compress: bond-1 product state is untouched") {
    std::mt19937 rng(17);
    auto rho = VectorizedDensityMps::bloch_product(testing::random_bloch_vectors(5, rng));
    auto report = rho.compress(32, 1e-14);
    CHECK(report.discarded_weight == 0.0);
    CHECK(rho.max_bond_dimension() == 1);
}

TEST_CASE("compress: exact-rank state keeps weight 0 at matching chi") {
    std::mt19937 rng(19);
    auto dense = testing::random_mixed_dense(3, 2, rng);
    auto rho = testing::mps_from_dense(dense, 4, 0.0);
    // recompress at the state's own maximal bond; nothing should be lost
    const std::size_t chi = rho.max_bond_dimension();
    auto report = rho.compress(chi, 0.0);
    CHECK(report.discarded_weight < 1e-24);
}

TEST_CASE("compress: expectations shift by no more than the discarded weight scale") {
    std::mt19937 rng(23);
    auto dense = testing::random_mixed_dense(4, 6, rng);
    auto rho = testing::mps_from_dense(dense);
    const double z_full = rho.pauli_expectation("ZIII");
    auto trimmed = rho;
    auto report = trimmed.compress(3, 0.0);
    CHECK(trimmed.max_bond_dimension() <= 3);
    CHECK(trimmed.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(trimmed.pauli_expectation("ZIII") - z_full) <
          20.0 * std::sqrt(report.discarded_weight) + 1e-12);
}

TEST_CASE("hermiticity monitor: imaginary parts raise") {
    auto rho = VectorizedDensityMps::infinite_temperature(2);
    auto t = rho.site(0);
    t.at({0, 1, 0}) = Complex{0.0, 0.4};  // rho_{01} = i 0.4 without conjugate partner
    rho.set_site(0, std::move(t));
    CHECK_THROWS_AS(rho.pauli_expectation("YI"), std::runtime_error);
}

TEST_CASE("state container round trip preserves tensors and center") {
    std::mt19937 rng(29);
    auto rho = testing::random_evolved_state(4, rng);
    rho.canonicalize(2);
    const auto file = std::filesystem::temp_directory_path() / "xxzmagic_state_roundtrip.vdmps";
    save_state(rho, file);
    auto loaded = load_state(file);
    std::filesystem::remove(file);
    REQUIRE(loaded.length() == rho.length());
    REQUIRE(loaded.ortho_center() == rho.ortho_center());
    REQUIRE(loaded.bond_dimensions() == rho.bond_dimensions());
    for (std::size_t j = 0; j < rho.length(); ++j) {
        for (std::size_t i = 0; i < rho.site(j).size(); ++i) {
            CHECK(loaded.site(j)[i] == rho.site(j)[i]);  // bit-exact payload
        }
    }
}
