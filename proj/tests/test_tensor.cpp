#include <doctest.h>

#include <random>

#include "xxzmagic/tensor.hpp"

using namespace xxzmagic;

namespace {

DenseTensor random_tensor(std::vector<std::size_t> shape, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseTensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = Complex{gauss(rng), gauss(rng)};
    return t;
}

// Reference contraction: naive loops over all indices.
DenseTensor contract_naive(const DenseTensor& a, const DenseTensor& b,
                           std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    std::vector<bool> ap(a.rank(), false), bp(b.rank(), false);
    for (auto [ia, ib] : pairs) {
        ap[ia] = true;
        bp[ib] = true;
    }
    std::vector<std::size_t> out_shape, a_free, b_free;
    for (std::size_t k = 0; k < a.rank(); ++k) {
        if (!ap[k]) {
            out_shape.push_back(a.extent(k));
            a_free.push_back(k);
        }
    }
    for (std::size_t k = 0; k < b.rank(); ++k) {
        if (!bp[k]) {
            out_shape.push_back(b.extent(k));
            b_free.push_back(k);
        }
    }
    std::size_t contracted = 1;
    for (auto [ia, ib] : pairs) contracted *= a.extent(ia);
    DenseTensor out(out_shape.empty() ? std::vector<std::size_t>{1} : out_shape);

    auto unflatten = [](std::size_t flat, const std::vector<std::size_t>& extents) {
        std::vector<std::size_t> idx(extents.size());
        for (std::size_t k = extents.size(); k-- > 0;) {
            idx[k] = flat % extents[k];
            flat /= extents[k];
        }
        return idx;
    };
    std::vector<std::size_t> a_strides(a.rank(), 1), b_strides(b.rank(), 1);
    for (std::size_t k = a.rank(); k-- > 1;) a_strides[k - 1] = a_strides[k] * a.extent(k);
    for (std::size_t k = b.rank(); k-- > 1;) b_strides[k - 1] = b_strides[k] * b.extent(k);

    std::vector<std::size_t> free_extents;
    for (std::size_t k : a_free) free_extents.push_back(a.extent(k));
    for (std::size_t k : b_free) free_extents.push_back(b.extent(k));
    std::vector<std::size_t> pair_extents;
    for (auto [ia, ib] : pairs) pair_extents.push_back(a.extent(ia));

    for (std::size_t of = 0; of < out.size(); ++of) {
        const auto fidx = unflatten(of, free_extents);
        Complex acc{0, 0};
        for (std::size_t cf = 0; cf < contracted; ++cf) {
            const auto cidx = unflatten(cf, pair_extents);
            std::size_t ia = 0, ib = 0;
            for (std::size_t k = 0; k < a_free.size(); ++k) ia += fidx[k] * a_strides[a_free[k]];
            for (std::size_t k = 0; k < b_free.size(); ++k) {
                ib += fidx[a_free.size() + k] * b_strides[b_free[k]];
            }
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                ia += cidx[k] * a_strides[pairs[k].first];
                ib += cidx[k] * b_strides[pairs[k].second];
            }
            acc += a[ia] * b[ib];
        }
        out[of] = acc;
    }
    return out;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    REQUIRE(a.shape() == b.shape());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("contract: identity matrix acts trivially on a vector") {
    DenseTensor id({2, 2}, {1, 0, 0, 1});
    DenseTensor v({2}, {Complex{0.3, 0.1}, Complex{-0.7, 2.0}});
    DenseTensor out = contract(id, v, {{1, 0}});
    CHECK(out.shape() == std::vector<std::size_t>{2});
    CHECK(std::abs(out[0] - v[0]) < 1e-15);
    CHECK(std::abs(out[1] - v[1]) < 1e-15);
}

TEST_CASE("contract: Pauli X flips |0> to |1>") {
    DenseTensor x({2, 2}, {0, 1, 1, 0});
    DenseTensor ket0({2}, {1, 0});
    DenseTensor out = contract(x, ket0, {{1, 0}});
    CHECK(std::abs(out[0]) < 1e-15);
    CHECK(std::abs(out[1] - Complex{1, 0}) < 1e-15);
}

TEST_CASE("contract matches the naive triple loop on a 2x3 * 3x4 product") {
    std::mt19937 rng(11);
    DenseTensor a = random_tensor({2, 3}, rng);
    DenseTensor b = random_tensor({3, 4}, rng);
    DenseTensor fast = contract(a, b, {{1, 0}});
    DenseTensor slow = contract_naive(a, b, {{1, 0}});
    CHECK(fast.shape() == std::vector<std::size_t>{2, 4});
    CHECK(max_abs_diff(fast, slow) < 1e-12);
}

TEST_CASE("contract matches naive loops on random higher-rank pairings") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        DenseTensor a = random_tensor({3, 2, 4}, rng);
        DenseTensor b = random_tensor({4, 5, 2}, rng);
        DenseTensor fast = contract(a, b, {{2, 0}, {1, 2}});
        DenseTensor slow = contract_naive(a, b, {{2, 0}, {1, 2}});
        CHECK(max_abs_diff(fast, slow) < 1e-12);
    }
}

TEST_CASE("contract rejects extent mismatches") {
    std::mt19937 rng(5);
    DenseTensor a = random_tensor({2, 3}, rng);
    DenseTensor b = random_tensor({4, 2}, rng);
    CHECK_THROWS_AS(contract(a, b, {{1, 0}}), std::invalid_argument);
}

TEST_CASE("contraction is bilinear") {
    std::mt19937 rng(7);
    DenseTensor a = random_tensor({3, 4}, rng);
    DenseTensor b = random_tensor({3, 4}, rng);
    DenseTensor c = random_tensor({4, 2}, rng);
    const Complex alpha{0.37, -1.2};
    DenseTensor lhs_in = a;
    for (std::size_t i = 0; i < lhs_in.size(); ++i) lhs_in[i] = alpha * a[i] + b[i];
    DenseTensor lhs = contract(lhs_in, c, {{1, 0}});
    DenseTensor ac = contract(a, c, {{1, 0}});
    DenseTensor bc = contract(b, c, {{1, 0}});
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        worst = std::max(worst, std::abs(lhs[i] - (alpha * ac[i] + bc[i])));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("contraction of a matrix chain is associative") {
    std::mt19937 rng(13);
    DenseTensor a = random_tensor({4, 6}, rng);
    DenseTensor b = random_tensor({6, 5}, rng);
    DenseTensor c = random_tensor({5, 7}, rng);
    DenseTensor left = contract(contract(a, b, {{1, 0}}), c, {{1, 0}});
    DenseTensor right = contract(a, contract(b, c, {{1, 0}}), {{1, 0}});
    CHECK(max_abs_diff(left, right) / left.norm() < 1e-10);
}

TEST_CASE("permutation followed by its inverse is the identity") {
    std::mt19937 rng(17);
    DenseTensor t = random_tensor({2, 3, 4, 5}, rng);
    DenseTensor p = t.permuted({2, 0, 3, 1});
    // inverse of (2,0,3,1) is (1,3,0,2)
    DenseTensor back = p.permuted({1, 3, 0, 2});
    CHECK(max_abs_diff(t, back) == 0.0);
}

TEST_CASE("svd_truncate: no truncation on diag(3,2,1)") {
    DenseTensor m({3, 3});
    m.at({0, 0}) = 3;
    m.at({1, 1}) = 2;
    m.at({2, 2}) = 1;
    SvdResult r = svd_truncate(m, 3, 0.0);
    REQUIRE(r.report.kept == 3);
    CHECK(r.singular_values[0] == doctest::Approx(3.0));
    CHECK(r.singular_values[1] == doctest::Approx(2.0));
    CHECK(r.singular_values[2] == doctest::Approx(1.0));
    CHECK(r.report.discarded_weight == 0.0);
}

TEST_CASE("svd_truncate: chi cap discards weight 1/14 on diag(3,2,1)") {
    DenseTensor m({3, 3});
    m.at({0, 0}) = 3;
    m.at({1, 1}) = 2;
    m.at({2, 2}) = 1;
    SvdResult r = svd_truncate(m, 2, 0.0);
    REQUIRE(r.report.kept == 2);
    CHECK(r.report.discarded_weight == doctest::Approx(1.0 / 14.0).epsilon(1e-12));
}

TEST_CASE("svd_truncate: rank-1 outer product keeps one value") {
    std::mt19937 rng(29);
    std::normal_distribution<double> gauss;
    DenseTensor u({6}), v({5});
    for (std::size_t i = 0; i < 6; ++i) u[i] = Complex{gauss(rng), gauss(rng)};
    for (std::size_t i = 0; i < 5; ++i) v[i] = Complex{gauss(rng), gauss(rng)};
    DenseTensor m({6, 5});
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 5; ++j) m.at({i, j}) = u[i] * v[j];
    }
    SvdResult r = svd_truncate(m, 8, 1e-12);
    CHECK(r.report.kept == 1);
}

TEST_CASE("svd reconstruction error below 1e-10 relative Frobenius norm") {
    std::mt19937 rng(31);
    DenseTensor m = random_tensor({12, 9}, rng);
    SvdResult r = svd_truncate(m, 64, 0.0);
    DenseTensor sv = r.v;
    for (std::size_t k = 0; k < r.report.kept; ++k) {
        for (std::size_t j = 0; j < 9; ++j) sv[k * 9 + j] *= r.singular_values[k];
    }
    DenseTensor rec = contract(r.u, sv, {{1, 0}});
    CHECK(max_abs_diff(rec, m) / m.norm() < 1e-10);
}

TEST_CASE("svd_truncate rejects non-finite input") {
    DenseTensor m({2, 2}, {1, 0, 0, Complex{std::nan(""), 0}});
    CHECK_THROWS_AS(svd_truncate(m, 2, 0.0), std::runtime_error);
}

TEST_CASE("qr_reduced reconstructs and q is an isometry") {
    std::mt19937 rng(37);
    DenseTensor m = random_tensor({8, 5}, rng);
    auto [q, r] = qr_reduced(m);
    DenseTensor rec = contract(q, r, {{1, 0}});
    CHECK(max_abs_diff(rec, m) < 1e-12);
    CMatrix qm = q.as_matrix(1);
    CHECK((qm.adjoint() * qm - CMatrix::Identity(5, 5)).norm() < 1e-12);
}
