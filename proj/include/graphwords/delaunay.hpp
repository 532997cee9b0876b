#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace graphwords {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Unordered vertex-index pair with first < second.
using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Set of unordered index pairs, kept sorted so the representation is unique.
struct EdgeSet {
    std::vector<Edge> pairs;

    bool contains(std::uint32_t a, std::uint32_t b) const;
    bool operator==(const EdgeSet& other) const { return pairs == other.pairs; }
};

struct DelaunayInfo {
    bool perturbed_duplicates = false;  ///< duplicate coordinates were jittered
    bool collinear_fallback = false;    ///< all points collinear, chain used
};

struct Triangulation {
    EdgeSet edges;
    std::vector<std::array<std::uint32_t, 3>> triangles;  ///< faces, ascending indices
    DelaunayInfo info;
};

/// Delaunay edge set of a small 2-D point set.
///
/// Implemented as a direct empty-circumcircle scan: a triangle belongs to the
/// triangulation iff no other input point lies inside its circumcircle. That
/// is quartic in the point count and meant for the tiny vertex sets this
/// pipeline triangulates (at most a seed plus 9 neighbors).
///
/// Degenerate cases are deterministic:
///  - one point -> no edges; two points -> the single edge
///  - all points collinear -> the chain of consecutive points along the line
///  - cocircular points -> resolved as if point i were lifted onto the
///    paraboloid and lowered by eps^(i+1); the tie falls to the
///    lowest-indexed points. For four cocircular square corners this keeps
///    the diagonal through corner 0.
///  - duplicate coordinates -> jittered by an index-scaled epsilon first,
///    reported through DelaunayInfo.
EdgeSet delaunay_edges(const std::vector<Point2>& points, DelaunayInfo* info = nullptr);

/// Same computation, keeping the face triangles (empty for degenerate
/// inputs that fall back to a chain).
Triangulation delaunay_triangulation(const std::vector<Point2>& points);

}  // namespace graphwords
