#include <algorithm>
#include <vector>

#include "s3forge/errors.hpp"
#include "s3forge/occupancy.hpp"

namespace s3forge {

namespace {

// de Boor on a clamped uniform knot vector
Point2 de_boor(double u, int degree, const std::vector<Point2>& ctrl,
               const std::vector<double>& knots) {
    const int n = static_cast<int>(ctrl.size());
    int span = degree;
    while (span < n - 1 && u >= knots[span + 1]) ++span;

    std::vector<Point2> d(ctrl.begin() + (span - degree), ctrl.begin() + span + 1);
    for (int r = 1; r <= degree; ++r) {
        for (int j = degree; j >= r; --j) {
            const int i = span - degree + j;
            const double den = knots[i + degree - r + 1] - knots[i];
            const double alpha = den > 0.0 ? (u - knots[i]) / den : 0.0;
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    return d[degree];
}

}  // namespace

std::vector<Point2> bspline_smooth(const std::vector<Point2>& waypoints,
                                   int samples_per_segment) {
    if (waypoints.size() < 2) throw RangeError("bspline_smooth needs at least 2 waypoints");
    if (samples_per_segment < 1) throw RangeError("samples_per_segment must be >= 1");

    const int n = static_cast<int>(waypoints.size());
    const int degree = std::min(3, n - 1);

    // clamped: degree+1 repeats at both ends, uniform interior
    std::vector<double> knots;
    for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
    const int interior = n - degree - 1;
    for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i));
    const double u_max = static_cast<double>(interior + 1);
    for (int i = 0; i <= degree; ++i) knots.push_back(u_max);

    const int total = samples_per_segment * (n - 1);
    std::vector<Point2> out;
    out.reserve(total + 1);
    for (int i = 0; i <= total; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(total);
        out.push_back(de_boor(std::min(u, u_max), degree, waypoints, knots));
    }
    // clamp the endpoints exactly
    out.front() = waypoints.front();
    out.back() = waypoints.back();
    return out;
}

}  // namespace s3forge
