#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "svo/plant.hpp"

namespace svo {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDirection : GeometryError {
    using GeometryError::GeometryError;
};
struct NotOnBoundary : GeometryError {
    using GeometryError::GeometryError;
};
struct DegeneratePolytope : GeometryError {
    using GeometryError::GeometryError;
};

struct Halfspace {
    Vec normal;     // outward
    double offset;  // normal . x <= offset
};

// Convex polytope in R^m. Exact polygon machinery for m = 2 (vertices kept
// counter-clockwise, non-redundant H-rep synthesized from the vertex loop),
// intervals for m = 1, support/hull queries only for m = 3. Sets of affine
// dimension below m are representable but tagged degenerate; empty sets have
// no vertices. Values are immutable after construction.
class Polytope {
  public:
    Polytope() = default;

    static Polytope empty(int dim);
    static Polytope from_points(int dim, const std::vector<Vec>& points);

    int dim() const { return dim_; }
    bool is_empty() const { return vertices_.empty(); }
    bool degenerate() const { return degenerate_; }
    bool full_dimensional() const { return !is_empty() && !degenerate_; }

    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    double diameter() const;
    bool contains(const Vec& x, double tol = 1e-9) const;
    // Distance from x to the boundary; 0 exactly on it, positive otherwise.
    double boundary_distance(const Vec& x) const;
    double distance(const Vec& x) const;  // distance to the set

  private:
    int dim_{0};
    bool degenerate_{false};
    std::vector<Vec> vertices_;
    std::vector<Halfspace> halfspaces_;

    void rebuild_halfspaces();
    friend Polytope convex_hull(int, const std::vector<Vec>&);
    friend Polytope intersect_halfspaces(const Polytope&, const std::vector<Halfspace>&);
};

struct SupportResult {
    double value;
    std::vector<Vec> argmax;
};

SupportResult support(const Polytope& P, const Vec& dir);

// Cone of outward supporting directions at a boundary point. For m = 2 the
// generators are the adjacent edge normals and [theta_lo, theta_hi] is the
// corresponding angular interval (theta_hi = theta_lo on an edge interior).
struct SupportCone {
    Vec base_point;
    std::vector<Vec> generators;  // unit norm, nonzero
    double theta_lo{0.0};
    double theta_hi{0.0};
};

SupportCone supporting_cone(const Polytope& P, const Vec& x, double tol = 1e-9);

Polytope convex_hull(int dim, const std::vector<Vec>& points);

Polytope intersect_halfspaces(const Polytope& P, const std::vector<Halfspace>& cuts);

// Argmax face of a direction: a vertex or an edge of the polytope.
struct Face {
    std::vector<Vec> vertices;  // 1 (point face) or 2 (edge endpoints)
    bool is_point() const { return vertices.size() == 1; }
};

// Opposing faces picked out by +/- B*. relint semantics follow the source
// convention: a point face has empty relative interior, an edge face's
// relative interior excludes its endpoints.
struct FacePair {
    Face plus;
    Face minus;
    double tol{1e-9};

    bool relint_contains(const Face& f, const Vec& x) const;
    bool relint_contains_either(const Vec& x) const {
        return relint_contains(plus, x) || relint_contains(minus, x);
    }
};

FacePair faces_F(const Polytope& P, const Vec& B_star, double tol = 1e-9);

// Two-sided Hausdorff distance between nonempty polytopes of equal dimension.
double hausdorff_distance(const Polytope& P, const Polytope& Q);

double distance_point_segment(const Vec& x, const Vec& a, const Vec& b);

}  // namespace svo
