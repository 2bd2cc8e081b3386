#include <cmath>
#include <random>

#include "doctest.h"
#include "foamforge/simd/kernels.hpp"

using namespace foamforge;

namespace {

std::vector<float> random_vector(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
    std::vector<float> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar dot: frozen hand values") {
    std::vector<float> a{1.0f, 2.0f, 3.0f};
    std::vector<float> b{4.0f, -5.0f, 6.0f};
    CHECK(simd::dot_scalar(a, b) == doctest::Approx(12.0));  // 4 - 10 + 18
    CHECK(simd::squared_norm_scalar(a) == doctest::Approx(14.0));
}

TEST_CASE("cosine: identical vectors score 1, orthogonal score 0, opposite -1") {
    std::vector<float> a{1.0f, 0.0f, 2.0f, 0.0f};
    std::vector<float> b{0.0f, 3.0f, 0.0f, -1.0f};
    std::vector<float> neg{-1.0f, 0.0f, -2.0f, 0.0f};
    CHECK(simd::cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(simd::cosine_similarity(a, b) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(simd::cosine_similarity(a, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(simd::cosine_similarity(std::vector<float>(4, 0.0f), a) == 0.0);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels match the scalar reference on random inputs") {
    if (!simd::avx2_available()) {
        MESSAGE("AVX2 not available on this host; dispatch covers scalar only");
        return;
    }
    std::mt19937 rng(7);
    // Lengths cover the full-lane body, the residual tail, and tiny sizes.
    for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 9u, 15u, 16u, 64u, 1536u, 1537u}) {
        auto a = random_vector(rng, n);
        auto b = random_vector(rng, n);
        const double ref = simd::dot_scalar(a, b);
        const double vec = simd::dot_avx2(a, b);
        CHECK(vec == doctest::Approx(ref).epsilon(1e-12));
        CHECK(simd::squared_norm_avx2(a) ==
              doctest::Approx(simd::squared_norm_scalar(a)).epsilon(1e-12));
    }
}

TEST_CASE("avx2 equals scalar bit-for-near on many random trials") {
    if (!simd::avx2_available()) return;
    std::mt19937 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> len(1, 300);
        const std::size_t n = len(rng);
        auto a = random_vector(rng, n);
        auto b = random_vector(rng, n);
        const double ref = simd::dot_scalar(a, b);
        const double vec = simd::dot_avx2(a, b);
        // Double accumulation in both kernels keeps them within a few ulps.
        CHECK(std::abs(vec - ref) <= 1e-10 * (1.0 + std::abs(ref)));
    }
}
#endif

TEST_CASE("dispatched kernels agree with the scalar reference") {
    std::mt19937 rng(3);
    auto a = random_vector(rng, 1536);
    auto b = random_vector(rng, 1536);
    CHECK(simd::dot(a, b) == doctest::Approx(simd::dot_scalar(a, b)).epsilon(1e-12));
    CHECK(!simd::active_kernel().empty());
}

}  // TEST_SUITE
