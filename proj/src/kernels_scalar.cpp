#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "s3forge/kernels.hpp"

namespace s3forge::kernels {

void BoxSoA::push(const OrientedBox3& b) {
    cx.push_back(b.center.x);
    cy.push_back(b.center.y);
    cz.push_back(b.center.z);
    hx.push_back(b.half_extents[0]);
    hy.push_back(b.half_extents[1]);
    hz.push_back(b.half_extents[2]);
    cos_yaw.push_back(std::cos(b.yaw));
    sin_yaw.push_back(std::sin(b.yaw));
    Aabb3 ab = b.aabb();
    bx0.push_back(ab.min.x);
    by0.push_back(ab.min.y);
    bz0.push_back(ab.min.z);
    bx1.push_back(ab.max.x);
    by1.push_back(ab.max.y);
    bz1.push_back(ab.max.z);
}

void BoxSoA::clear() {
    for (auto* v : {&cx, &cy, &cz, &hx, &hy, &hz, &cos_yaw, &sin_yaw,
                    &bx0, &by0, &bz0, &bx1, &by1, &bz1})
        v->clear();
}

OrientedBox3 BoxSoA::box(std::size_t i) const {
    OrientedBox3 b;
    b.center = {cx[i], cy[i], cz[i]};
    b.half_extents = {hx[i], hy[i], hz[i]};
    b.yaw = std::atan2(sin_yaw[i], cos_yaw[i]);
    return b;
}

namespace {

std::size_t segment_hit_any_scalar(const Segment3& seg, const BoxSoA& boxes,
                                   std::size_t skip) {
    const double dxw = seg.p1.x - seg.p0.x;
    const double dyw = seg.p1.y - seg.p0.y;
    const double dzw = seg.p1.z - seg.p0.z;
    const double sminx = std::min(seg.p0.x, seg.p1.x), smaxx = std::max(seg.p0.x, seg.p1.x);
    const double sminy = std::min(seg.p0.y, seg.p1.y), smaxy = std::max(seg.p0.y, seg.p1.y);
    const double sminz = std::min(seg.p0.z, seg.p1.z), smaxz = std::max(seg.p0.z, seg.p1.z);

    const std::size_t n = boxes.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip) continue;
        // segment AABB vs box AABB reject
        if (smaxx < boxes.bx0[i] || sminx > boxes.bx1[i] ||
            smaxy < boxes.by0[i] || sminy > boxes.by1[i] ||
            smaxz < boxes.bz0[i] || sminz > boxes.bz1[i])
            continue;

        const double c = boxes.cos_yaw[i], s = boxes.sin_yaw[i];
        const double ox = seg.p0.x - boxes.cx[i];
        const double oy = seg.p0.y - boxes.cy[i];
        const double oz = seg.p0.z - boxes.cz[i];
        const double o0 = c * ox + s * oy;
        const double o1 = -s * ox + c * oy;
        const double d0 = c * dxw + s * dyw;
        const double d1 = -s * dxw + c * dyw;

        const double o[3] = {o0, o1, oz};
        const double d[3] = {d0, d1, dzw};
        const double h[3] = {boxes.hx[i], boxes.hy[i], boxes.hz[i]};
        double tmin = 1e-9, tmax = 1.0 - 1e-9;
        bool hit = true;
        for (int ax = 0; ax < 3; ++ax) {
            if (std::abs(d[ax]) < 1e-15) {
                if (o[ax] < -h[ax] || o[ax] > h[ax]) {
                    hit = false;
                    break;
                }
                continue;
            }
            double t0 = (-h[ax] - o[ax]) / d[ax];
            double t1 = (h[ax] - o[ax]) / d[ax];
            if (t0 > t1) std::swap(t0, t1);
            tmin = std::max(tmin, t0);
            tmax = std::min(tmax, t1);
            if (tmin > tmax) {
                hit = false;
                break;
            }
        }
        if (hit) return i;
    }
    return static_cast<std::size_t>(-1);
}

void rect_dist_sq_scalar(const double* xs, const double* ys, std::size_t n,
                         const Rect2& rect, double* out) {
    const double cx = rect.center.x, cy = rect.center.y;
    const double c = rect.cos_yaw, s = rect.sin_yaw;
    const double hx = rect.hx, hy = rect.hy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - cx;
        const double dy = ys[i] - cy;
        const double lx = c * dx + s * dy;
        const double ly = c * dy - s * dx;
        const double ex = std::max(std::abs(lx) - hx, 0.0);
        const double ey = std::max(std::abs(ly) - hy, 0.0);
        out[i] = ex * ex + ey * ey;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{segment_hit_any_scalar, rect_dist_sq_scalar, "scalar"};
    return k;
}

const Kernels& active() {
    static const Kernels* selected = [] {
        const char* env = std::getenv("S3FORGE_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        if (const Kernels* avx2 = avx2_kernels()) {
            if (!env || std::strcmp(env, "avx2") == 0) return avx2;
        }
        return &scalar_kernels();
    }();
    return *selected;
}

}  // namespace s3forge::kernels
