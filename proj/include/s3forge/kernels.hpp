#pragma once

#include <cstddef>
#include <vector>

#include "s3forge/geom.hpp"

namespace s3forge::kernels {

// Structure-of-arrays box set for the batched geometry kernels. The hot
// loops (per-frame occlusion rays, grid rasterization) iterate boxes or
// cells in bulk; SoA keeps them vectorizable.
struct BoxSoA {
    std::vector<double> cx, cy, cz;
    std::vector<double> hx, hy, hz;
    std::vector<double> cos_yaw, sin_yaw;
    // world AABB of each box for the cheap reject
    std::vector<double> bx0, by0, bz0, bx1, by1, bz1;

    void push(const OrientedBox3& b);
    void clear();
    std::size_t size() const { return cx.size(); }
    OrientedBox3 box(std::size_t i) const;
};

struct Segment3 {
    Point3 p0;
    Point3 p1;
};

// Index of the first box whose interior the open segment crosses
// (slab test, t strictly inside (0,1)), skipping index `skip`;
// SIZE_MAX when none. Boxes are scanned in index order.
using SegmentHitAnyFn = std::size_t (*)(const Segment3& seg, const BoxSoA& boxes,
                                        std::size_t skip);

// Squared distance from each xy point to a rotated-rectangle footprint
// (0 inside). Writes n values to out.
using RectDistSqFn = void (*)(const double* xs, const double* ys, std::size_t n,
                              const Rect2& rect, double* out);

struct Kernels {
    SegmentHitAnyFn segment_hit_any = nullptr;
    RectDistSqFn rect_dist_sq = nullptr;
    const char* name = "";
};

// Reference implementation; the ground truth the SIMD variants are
// equivalence-tested against.
const Kernels& scalar_kernels();

// AVX2 variant; nullptr when the build or CPU lacks it.
const Kernels* avx2_kernels();

// Runtime-selected implementation. S3FORGE_KERNELS=scalar|avx2 overrides.
const Kernels& active();

}  // namespace s3forge::kernels
