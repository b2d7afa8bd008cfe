// AVX2 variants of the batched geometry kernels. Arithmetic mirrors the
// scalar reference op-for-op (no FMA, contraction disabled project-wide) so
// the equivalence tests can require bit-identical results.

#include "s3forge/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace s3forge::kernels {
namespace {

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

std::size_t segment_hit_any_avx2(const Segment3& seg, const BoxSoA& boxes,
                                 std::size_t skip) {
    const std::size_t n = boxes.size();
    const __m256d p0x = _mm256_set1_pd(seg.p0.x);
    const __m256d p0y = _mm256_set1_pd(seg.p0.y);
    const __m256d p0z = _mm256_set1_pd(seg.p0.z);
    const __m256d dxw = _mm256_set1_pd(seg.p1.x - seg.p0.x);
    const __m256d dyw = _mm256_set1_pd(seg.p1.y - seg.p0.y);
    const __m256d dzw = _mm256_set1_pd(seg.p1.z - seg.p0.z);

    const double sminx = std::min(seg.p0.x, seg.p1.x), smaxx = std::max(seg.p0.x, seg.p1.x);
    const double sminy = std::min(seg.p0.y, seg.p1.y), smaxy = std::max(seg.p0.y, seg.p1.y);
    const double sminz = std::min(seg.p0.z, seg.p1.z), smaxz = std::max(seg.p0.z, seg.p1.z);
    const __m256d vsminx = _mm256_set1_pd(sminx), vsmaxx = _mm256_set1_pd(smaxx);
    const __m256d vsminy = _mm256_set1_pd(sminy), vsmaxy = _mm256_set1_pd(smaxy);
    const __m256d vsminz = _mm256_set1_pd(sminz), vsmaxz = _mm256_set1_pd(smaxz);

    const __m256d eps_d = _mm256_set1_pd(1e-15);
    const __m256d t_lo0 = _mm256_set1_pd(1e-9);
    const __m256d t_hi0 = _mm256_set1_pd(1.0 - 1e-9);
    const __m256d pinf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    const __m256d ninf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());

    alignas(32) double lane_pad[4] = {0, 0, 0, 0};

    for (std::size_t base = 0; base < n; base += 4) {
        const std::size_t lanes = std::min<std::size_t>(4, n - base);
        auto load = [&](const std::vector<double>& v) {
            if (lanes == 4) return _mm256_loadu_pd(v.data() + base);
            for (std::size_t k = 0; k < 4; ++k)
                lane_pad[k] = k < lanes ? v[base + k] : 0.0;
            return _mm256_load_pd(lane_pad);
        };

        // AABB overlap reject
        const __m256d bx0 = load(boxes.bx0), bx1 = load(boxes.bx1);
        const __m256d by0 = load(boxes.by0), by1 = load(boxes.by1);
        const __m256d bz0 = load(boxes.bz0), bz1 = load(boxes.bz1);
        __m256d overlap = _mm256_and_pd(
            _mm256_and_pd(_mm256_cmp_pd(vsmaxx, bx0, _CMP_GE_OQ),
                          _mm256_cmp_pd(vsminx, bx1, _CMP_LE_OQ)),
            _mm256_and_pd(
                _mm256_and_pd(_mm256_cmp_pd(vsmaxy, by0, _CMP_GE_OQ),
                              _mm256_cmp_pd(vsminy, by1, _CMP_LE_OQ)),
                _mm256_and_pd(_mm256_cmp_pd(vsmaxz, bz0, _CMP_GE_OQ),
                              _mm256_cmp_pd(vsminz, bz1, _CMP_LE_OQ))));
        if (_mm256_movemask_pd(overlap) == 0) continue;

        const __m256d c = load(boxes.cos_yaw);
        const __m256d s = load(boxes.sin_yaw);
        const __m256d ox = _mm256_sub_pd(p0x, load(boxes.cx));
        const __m256d oy = _mm256_sub_pd(p0y, load(boxes.cy));
        const __m256d oz = _mm256_sub_pd(p0z, load(boxes.cz));

        const __m256d o0 = _mm256_add_pd(_mm256_mul_pd(c, ox), _mm256_mul_pd(s, oy));
        const __m256d o1 = _mm256_sub_pd(_mm256_mul_pd(c, oy), _mm256_mul_pd(s, ox));
        const __m256d d0 = _mm256_add_pd(_mm256_mul_pd(c, dxw), _mm256_mul_pd(s, dyw));
        const __m256d d1 = _mm256_sub_pd(_mm256_mul_pd(c, dyw), _mm256_mul_pd(s, dxw));

        const __m256d os[3] = {o0, o1, oz};
        const __m256d ds[3] = {d0, d1, dzw};
        const __m256d hs[3] = {load(boxes.hx), load(boxes.hy), load(boxes.hz)};

        __m256d tmin = t_lo0;
        __m256d tmax = t_hi0;
        __m256d alive = overlap;
        for (int ax = 0; ax < 3; ++ax) {
            const __m256d h = hs[ax];
            const __m256d o = os[ax];
            const __m256d d = ds[ax];
            const __m256d small = _mm256_cmp_pd(abs_pd(d), eps_d, _CMP_LT_OQ);
            const __m256d inside =
                _mm256_and_pd(_mm256_cmp_pd(o, _mm256_sub_pd(_mm256_setzero_pd(), h), _CMP_GE_OQ),
                              _mm256_cmp_pd(o, h, _CMP_LE_OQ));
            const __m256d ta = _mm256_div_pd(
                _mm256_sub_pd(_mm256_sub_pd(_mm256_setzero_pd(), h), o), d);
            const __m256d tb = _mm256_div_pd(_mm256_sub_pd(h, o), d);
            __m256d lo = _mm256_min_pd(ta, tb);
            __m256d hi = _mm256_max_pd(ta, tb);
            // degenerate axis: no constraint when inside the slab, dead otherwise
            lo = _mm256_blendv_pd(lo, _mm256_blendv_pd(pinf, ninf, inside), small);
            hi = _mm256_blendv_pd(hi, _mm256_blendv_pd(ninf, pinf, inside), small);
            tmin = _mm256_max_pd(tmin, lo);
            tmax = _mm256_min_pd(tmax, hi);
        }
        __m256d hit = _mm256_and_pd(alive, _mm256_cmp_pd(tmin, tmax, _CMP_LE_OQ));
        int mask = _mm256_movemask_pd(hit);
        while (mask) {
            const int lane = __builtin_ctz(static_cast<unsigned>(mask));
            mask &= mask - 1;
            const std::size_t idx = base + static_cast<std::size_t>(lane);
            if (idx >= n || idx == skip) continue;
            return idx;
        }
    }
    return static_cast<std::size_t>(-1);
}

void rect_dist_sq_avx2(const double* xs, const double* ys, std::size_t n,
                       const Rect2& rect, double* out) {
    const __m256d cx = _mm256_set1_pd(rect.center.x);
    const __m256d cy = _mm256_set1_pd(rect.center.y);
    const __m256d c = _mm256_set1_pd(rect.cos_yaw);
    const __m256d s = _mm256_set1_pd(rect.sin_yaw);
    const __m256d hx = _mm256_set1_pd(rect.hx);
    const __m256d hy = _mm256_set1_pd(rect.hy);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), cx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), cy);
        const __m256d lx = _mm256_add_pd(_mm256_mul_pd(c, dx), _mm256_mul_pd(s, dy));
        const __m256d ly = _mm256_sub_pd(_mm256_mul_pd(c, dy), _mm256_mul_pd(s, dx));
        const __m256d ex = _mm256_max_pd(_mm256_sub_pd(abs_pd(lx), hx), zero);
        const __m256d ey = _mm256_max_pd(_mm256_sub_pd(abs_pd(ly), hy), zero);
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - rect.center.x;
        const double dy = ys[i] - rect.center.y;
        const double lx = rect.cos_yaw * dx + rect.sin_yaw * dy;
        const double ly = rect.cos_yaw * dy - rect.sin_yaw * dx;
        const double ex = std::max(std::abs(lx) - rect.hx, 0.0);
        const double ey = std::max(std::abs(ly) - rect.hy, 0.0);
        out[i] = ex * ex + ey * ey;
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{segment_hit_any_avx2, rect_dist_sq_avx2, "avx2"};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &k : nullptr;
}

}  // namespace s3forge::kernels

#else

namespace s3forge::kernels {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace s3forge::kernels

#endif
