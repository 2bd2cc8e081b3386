#include "foamforge/simd/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace foamforge::simd {

double dot_scalar(std::span<const float> a, std::span<const float> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double squared_norm_scalar(std::span<const float> a) {
    double acc = 0.0;
    for (float v : a) acc += static_cast<double>(v) * static_cast<double>(v);
    return acc;
}

namespace {

using DotFn = double (*)(std::span<const float>, std::span<const float>);
using NormFn = double (*)(std::span<const float>);

struct Dispatch {
    DotFn dot = dot_scalar;
    NormFn norm = squared_norm_scalar;
    std::string name = "scalar";
};

Dispatch select() {
    Dispatch d;
    const char* forced = std::getenv("FOAMFORGE_SIMD");
    std::string mode = forced ? forced : "auto";
    if (mode == "scalar") return d;
#if defined(__x86_64__) || defined(_M_X64)
    if ((mode == "auto" || mode == "avx2") && avx2_available()) {
        d.dot = dot_avx2;
        d.norm = squared_norm_avx2;
        d.name = "avx2";
    }
#endif
    return d;
}

const Dispatch& dispatch() {
    static const Dispatch d = select();
    return d;
}

}  // namespace

const std::string& active_kernel() { return dispatch().name; }

double dot(std::span<const float> a, std::span<const float> b) {
    return dispatch().dot(a, b);
}

double squared_norm(std::span<const float> a) { return dispatch().norm(a); }

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace foamforge::simd
