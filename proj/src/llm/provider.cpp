#include "foamforge/llm/provider.hpp"

#include <cmath>

namespace foamforge::llm {

namespace {

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<float> HashEmbedder::embed(const std::string& text) {
    const std::uint64_t seed = fnv1a64(text);
    std::vector<float> v(static_cast<std::size_t>(dim_));
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::uint64_t r = splitmix64(seed + i);
        // Map to [-1, 1).
        const double x = static_cast<double>(r >> 11) * (2.0 / 9007199254740992.0) - 1.0;
        v[i] = static_cast<float>(x);
        norm_sq += x * x;
    }
    if (norm_sq > 0.0) {
        const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
        for (auto& x : v) x *= inv;
    }
    return v;
}

std::int64_t approx_token_count(const std::string& text) {
    std::int64_t count = 0;
    bool in_token = false;
    for (char c : text) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

}  // namespace foamforge::llm
