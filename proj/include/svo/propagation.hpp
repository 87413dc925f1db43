#pragma once

#include <optional>
#include <vector>

#include "svo/geometry.hpp"
#include "svo/plant.hpp"

namespace svo {

struct PropagationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConePrecondition : PropagationError {
    using PropagationError::PropagationError;
};
struct EmptyFront : PropagationError {  // S_k empty: measurement inconsistent with the model
    using PropagationError::PropagationError;
};
struct DegenerateFront : PropagationError {  // int S_k empty: recursion cannot continue
    using PropagationError::PropagationError;
};

// Componentwise complementary-slackness relation between estimator and
// regulator signals at one time step: a strictly signed dual pins the primal
// to its bound, a strictly interior primal forces a zero dual. Equalities are
// tested to tol; "strict" means beyond tol.
bool aligned(double y, double v, double y_star, double v_star, double z_k, double tol = 1e-9);

// One element of M(s, t, z_k) together with its dual sign class.
struct Quadruple {
    double v{0.0};
    double y{0.0};
    double v_star{0.0};
    double y_star{0.0};
    int sign_v{0};  // sign class of v_star
    int sign_y{0};  // sign class of y_star
};

// Membership test for M(s, t, z_k): conditions 1-4 checked directly.
// Serves as the independent check on compute_M output.
bool in_M(const Quadruple& q, double s, double t, double z_k, const PlantSpec& p,
          double tol = 1e-8);

struct MResult {
    enum class Kind { Empty, Finite, Segment };
    Kind kind{Kind::Empty};
    std::vector<Quadruple> quadruples;  // one canonical element per primal point
    double v_min{0.0}, v_max{0.0};      // populated when kind == Segment
};

// Intersects the line y - n_1 v = s with the square |v| <= 1,
// |y - z_k| <= 1 and enumerates the dual sign patterns feasible on
// d_{m+1} v* + n_{m+1} y* = -t. Only the endpoint primal points can carry a
// nonzero dual when t != 0; when t = 0 and the intersection is a segment the
// whole segment propagates and kind == Segment.
MResult compute_M(double s, double t, double z_k, const PlantSpec& p, double tol = 1e-9);

enum class RTag { R1, R2, R3 };

struct RPartition {
    RTag tag;
    Vec representative;  // a direction in the selected subcone
};

// Splits a supporting cone by the sign of the first component and selects
// R_1 when it is nonempty, else whichever of R_2 / R_3 is.
RPartition partition_R(const SupportCone& cone, double tol = 1e-9);

// v-extent of the line-square intersection for x_prev; empty exactly when
// |C x_prev - z_k| > |n_1| + 1 (up to tol).
std::optional<std::pair<double, double>> successor_interval(const Vec& x_prev, double z_k,
                                                            const PlantModel& model,
                                                            double tol = 1e-9);

struct PropagatedPair {
    Vec x_next;
    Vec x_star_next;
    Quadruple q;
};

struct PropagationResult {
    std::vector<PropagatedPair> pairs;
    bool segment{false};  // marker: x_next values are endpoints of a segment
    double v_min{0.0}, v_max{0.0};
    RTag tag{RTag::R2};
};

PropagationResult propagate_point(const Vec& x_prev, const SupportCone& cone, double z_k,
                                  const PlantModel& model, double tol = 1e-9);

struct BoundaryPoint {
    Vec point;
    SupportCone cone;
};

/// The uncertainty set at time k as a vertex-ordered polytope carrying, per
/// stored boundary point, the cone of supporting directions used by the dual
/// recursion.
struct Front {
    Polytope polytope;
    std::vector<BoundaryPoint> boundary_points;
    int k{0};
    std::vector<double> z_history;
};

// Builds a front from a full-dimensional polytope: all vertices with their
// cones.
Front make_front(const Polytope& S, int k, std::vector<double> z_history);

struct StepOptions {
    int sample_density{64};   // extra points per edge (m = 2)
    bool targeted{true};      // add the exact edge crossings of C x = z +- 1 -+ D1
    double tol{1e-9};
    double defect_rel{1e-6};  // oracle-reconciliation threshold, relative to diameter
};

struct PropagationOutcome {
    RTag tag;
    int emitted;
    bool segment;
};

struct StepReport {
    std::vector<PropagatedPair> pairs;        // everything emitted by propagate_point
    std::vector<PropagationOutcome> outcomes; // one entry per propagated boundary point
    std::vector<Vec> face_candidates;         // F+- images from the one-step programs
    std::vector<Vec> defects;                 // oracle vertices missing from the hull
    int propagated_points{0};
    int segment_results{0};
};

// One full step (S_{k-1}, cones) -> (S_k, cones): propagates every stored and
// sampled boundary point, augments with the F+- faces reachable from the
// interior, hulls the candidates, and reconciles against the oracle polytope
// when one is supplied.
Front propagate_front(const Front& front, double z_k, const PlantModel& model,
                      const StepOptions& opts = {}, const Polytope* oracle_polytope = nullptr,
                      StepReport* report = nullptr);

}  // namespace svo
