#include "graphwords/delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace graphwords {

namespace {

// Predicates run in long double with a relative threshold; anything below it
// counts as degenerate and falls through to the symbolic tie-break, so exact
// ties (integer coordinates, constructed cocircular sets) are handled
// deterministically instead of depending on rounding.
constexpr long double kRelEps = 1e-12L;

int sign_with_threshold(long double value, long double magnitude) {
    if (value > kRelEps * magnitude) return 1;
    if (value < -kRelEps * magnitude) return -1;
    return 0;
}

/// Sign of cross(b - a, c - a): +1 counterclockwise, -1 clockwise, 0 within
/// threshold of collinear.
int orient2d(const Point2& a, const Point2& b, const Point2& c) {
    const long double p = (long double)(b.x - a.x) * (long double)(c.y - a.y);
    const long double q = (long double)(b.y - a.y) * (long double)(c.x - a.x);
    return sign_with_threshold(p - q, std::abs(p) + std::abs(q));
}

/// True when p lies strictly inside the circumcircle of triangle (a, b, c),
/// under the symbolic lift z_i = |p_i|^2 - eps^(i+1). orient_sign is the
/// (nonzero) orientation of (a, b, c).
bool in_circumcircle(const std::vector<Point2>& pts, std::uint32_t ia, std::uint32_t ib,
                     std::uint32_t ic, std::uint32_t ip, int orient_sign) {
    const Point2 &a = pts[ia], &b = pts[ib], &c = pts[ic], &p = pts[ip];

    const long double ax = a.x - p.x, ay = a.y - p.y;
    const long double bx = b.x - p.x, by = b.y - p.y;
    const long double cx = c.x - p.x, cy = c.y - p.y;
    // Lifted third column, factored to avoid catastrophic cancellation.
    const long double la = ax * (long double)(a.x + p.x) + ay * (long double)(a.y + p.y);
    const long double lb = bx * (long double)(b.x + p.x) + by * (long double)(b.y + p.y);
    const long double lc = cx * (long double)(c.x + p.x) + cy * (long double)(c.y + p.y);

    const long double c1 = bx * cy - by * cx;  // cross(b-p, c-p)
    const long double c2 = ax * cy - ay * cx;  // cross(a-p, c-p)
    const long double c3 = ax * by - ay * bx;  // cross(a-p, b-p)

    const long double det = la * c1 - lb * c2 + lc * c3;
    const long double mag = std::abs(la) * (std::abs(bx * cy) + std::abs(by * cx)) +
                            std::abs(lb) * (std::abs(ax * cy) + std::abs(ay * cx)) +
                            std::abs(lc) * (std::abs(ax * by) + std::abs(ay * bx));

    int det_sign = sign_with_threshold(det, mag);
    if (det_sign == 0) {
        // Cocircular: the perturbed determinant is det + sum_k coef_k *
        // eps^(k+1); the lowest point index with a nonzero coefficient
        // dominates.
        const long double cross_mag_1 = std::abs(bx * cy) + std::abs(by * cx);
        const long double cross_mag_2 = std::abs(ax * cy) + std::abs(ay * cx);
        const long double cross_mag_3 = std::abs(ax * by) + std::abs(ay * bx);
        const int s1 = sign_with_threshold(c1, cross_mag_1);
        const int s2 = sign_with_threshold(c2, cross_mag_2);
        const int s3 = sign_with_threshold(c3, cross_mag_3);

        // c1 - c2 + c3 equals the orientation determinant of (a, b, c), so
        // the p coefficient reuses the already-thresholded orient_sign.
        const std::array<std::pair<std::uint32_t, int>, 4> coeffs = {{
            {ia, -s1},
            {ib, s2},
            {ic, -s3},
            {ip, orient_sign},
        }};
        std::array<std::size_t, 4> order = {0, 1, 2, 3};
        std::sort(order.begin(), order.end(),
                  [&](std::size_t u, std::size_t v) { return coeffs[u].first < coeffs[v].first; });
        for (const std::size_t k : order) {
            if (coeffs[k].second != 0) {
                det_sign = coeffs[k].second > 0 ? 1 : -1;
                break;
            }
        }
        if (det_sign == 0) return false;
    }
    return det_sign * orient_sign > 0;
}

/// Chain of consecutive points along the dominant axis, for fully collinear
/// input.
EdgeSet collinear_chain(const std::vector<Point2>& pts) {
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const auto& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const bool by_x = (max_x - min_x) >= (max_y - min_y);

    std::vector<std::uint32_t> order(pts.size());
    for (std::uint32_t i = 0; i < pts.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t u, std::uint32_t v) {
        const double ku = by_x ? pts[u].x : pts[u].y;
        const double kv = by_x ? pts[v].x : pts[v].y;
        const double su = by_x ? pts[u].y : pts[u].x;
        const double sv = by_x ? pts[v].y : pts[v].x;
        if (ku != kv) return ku < kv;
        if (su != sv) return su < sv;
        return u < v;
    });

    EdgeSet edges;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        edges.pairs.emplace_back(std::min(order[i], order[i + 1]),
                                 std::max(order[i], order[i + 1]));
    }
    std::sort(edges.pairs.begin(), edges.pairs.end());
    return edges;
}

}  // namespace

bool EdgeSet::contains(std::uint32_t a, std::uint32_t b) const {
    const Edge e{std::min(a, b), std::max(a, b)};
    return std::binary_search(pairs.begin(), pairs.end(), e);
}

EdgeSet delaunay_edges(const std::vector<Point2>& points, DelaunayInfo* info) {
    Triangulation tri = delaunay_triangulation(points);
    if (info) *info = tri.info;
    return std::move(tri.edges);
}

Triangulation delaunay_triangulation(const std::vector<Point2>& points) {
    Triangulation out;
    EdgeSet& edges = out.edges;

    const std::uint32_t n = static_cast<std::uint32_t>(points.size());
    if (n < 2) return out;
    if (n == 2) {
        edges.pairs.emplace_back(0, 1);
        return out;
    }

    std::vector<Point2> pts = points;

    // Exact coordinate duplicates get an index-scaled jitter; the golden
    // angle keeps repeated offsets from re-colliding.
    {
        std::map<std::pair<double, double>, std::uint32_t> seen;
        double span = 0.0;
        for (const auto& p : pts) span = std::max({span, std::abs(p.x), std::abs(p.y)});
        const double eps0 = std::max(span, 1.0) * 1e-9;
        for (std::uint32_t i = 0; i < n; ++i) {
            auto [it, inserted] = seen.try_emplace({pts[i].x, pts[i].y}, i);
            if (!inserted) {
                const double angle = 2.399963229728653 * (i + 1);  // golden angle * index
                pts[i].x += eps0 * (i + 1) * std::cos(angle);
                pts[i].y += eps0 * (i + 1) * std::sin(angle);
                out.info.perturbed_duplicates = true;
            }
        }
    }

    bool all_collinear = true;
    for (std::uint32_t i = 0; i < n && all_collinear; ++i)
        for (std::uint32_t j = i + 1; j < n && all_collinear; ++j)
            for (std::uint32_t k = j + 1; k < n && all_collinear; ++k)
                if (orient2d(pts[i], pts[j], pts[k]) != 0) all_collinear = false;
    if (all_collinear) {
        out.info.collinear_fallback = true;
        out.edges = collinear_chain(pts);
        return out;
    }

    // Empty-circumcircle scan over all triples.
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            for (std::uint32_t k = j + 1; k < n; ++k) {
                const int orient = orient2d(pts[i], pts[j], pts[k]);
                if (orient == 0) continue;
                bool empty = true;
                for (std::uint32_t p = 0; p < n && empty; ++p) {
                    if (p == i || p == j || p == k) continue;
                    if (in_circumcircle(pts, i, j, k, p, orient)) empty = false;
                }
                if (empty) {
                    out.triangles.push_back({i, j, k});
                    edges.pairs.emplace_back(i, j);
                    edges.pairs.emplace_back(j, k);
                    edges.pairs.emplace_back(i, k);
                }
            }
        }
    }
    std::sort(edges.pairs.begin(), edges.pairs.end());
    edges.pairs.erase(std::unique(edges.pairs.begin(), edges.pairs.end()), edges.pairs.end());
    return out;
}

}  // namespace graphwords
