#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace foamforge::simd {

/// Dot product over float vectors with double accumulation. Scalar
/// reference kernel; the ground truth the SIMD variants are tested
/// against.
double dot_scalar(std::span<const float> a, std::span<const float> b);

double squared_norm_scalar(std::span<const float> a);

#if defined(__x86_64__) || defined(_M_X64)
/// AVX2+FMA variants. Call only when avx2_available() is true.
double dot_avx2(std::span<const float> a, std::span<const float> b);
double squared_norm_avx2(std::span<const float> a);
bool avx2_available();
#endif

/// Name of the kernel variant the dispatcher selected ("scalar" or
/// "avx2"). Honors FOAMFORGE_SIMD=scalar|avx2|auto at first use.
const std::string& active_kernel();

/// Dispatched entry points used by retrieval scoring.
double dot(std::span<const float> a, std::span<const float> b);
double squared_norm(std::span<const float> a);

/// Cosine similarity in [-1, 1]; zero-norm inputs score 0.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace foamforge::simd
