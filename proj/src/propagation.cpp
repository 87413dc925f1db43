#include "svo/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "svo/simplex.hpp"

namespace svo {

namespace {

int sign_tol(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

struct DualCandidate {
    double vs, ys;
    double inf_y;  // infimum of |y*| over the pattern's feasible set
    int sv, sy;
};

// Solves d v* + n y* = -t for a representative with the requested strict sign
// pattern, or reports the pattern infeasible.
std::optional<DualCandidate> dual_solve(int sv, int sy, double t, double n, double d,
                                        double tol) {
    if (sy == 0) {
        const double vs = -t / d;
        if (sign_tol(vs, tol) != sv)
            return std::nullopt;
        return DualCandidate{vs, 0.0, 0.0, sv, sy};
    }
    if (sv == 0) {
        if (std::abs(n) <= tol) {
            if (std::abs(t) > tol)
                return std::nullopt;
            return DualCandidate{0.0, static_cast<double>(sy), 0.0, sv, sy};
        }
        const double ys = -t / n;
        if (sign_tol(ys, tol) != sy)
            return std::nullopt;
        return DualCandidate{0.0, ys, std::abs(ys), sv, sy};
    }

    // Both signs strict: f(ys) = sv (-t - n ys)/d must be positive on the
    // sy-halfline. f is affine in ys.
    const double f0 = sv * (-t) / d;
    const double slope = sv * (-n) / d;
    double lo, hi;  // open interval of admissible ys
    if (std::abs(slope) <= tol) {
        if (f0 <= tol)
            return std::nullopt;
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
    } else {
        const double crit = -f0 / slope;  // f crosses zero here
        if (slope > 0.0) {
            lo = crit;
            hi = std::numeric_limits<double>::infinity();
        } else {
            lo = -std::numeric_limits<double>::infinity();
            hi = crit;
        }
    }
    if (sy > 0)
        lo = std::max(lo, 0.0);
    else
        hi = std::min(hi, 0.0);
    if (!(lo < hi - tol))
        return std::nullopt;

    double ys;
    if (std::isfinite(lo) && std::isfinite(hi))
        ys = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
        ys = lo + std::max(1.0, std::abs(lo));
    else
        ys = hi - std::max(1.0, std::abs(hi));
    const double inf_y = std::isfinite(lo) && lo >= 0.0 ? lo
                         : (std::isfinite(hi) && hi <= 0.0 ? -hi : 0.0);
    return DualCandidate{(-t - n * ys) / d, ys, inf_y, sv, sy};
}

std::optional<std::pair<double, double>> line_square_v_extent(double s, double z, double n1,
                                                              double tol) {
    double vlo = -1.0, vhi = 1.0;
    if (std::abs(n1) > tol) {
        double a = (z - 1.0 - s) / n1;
        double b = (z + 1.0 - s) / n1;
        if (a > b)
            std::swap(a, b);
        vlo = std::max(vlo, a);
        vhi = std::min(vhi, b);
    } else if (std::abs(s - z) > 1.0 + tol) {
        return std::nullopt;
    }
    if (vlo > vhi + tol)
        return std::nullopt;
    if (vlo > vhi) {
        const double mid = 0.5 * (vlo + vhi);
        vlo = vhi = mid;
    }
    vlo = std::clamp(vlo, -1.0, 1.0);
    vhi = std::clamp(vhi, -1.0, 1.0);
    return std::make_pair(vlo, vhi);
}

}  // namespace

bool aligned(double y, double v, double y_star, double v_star, double z_k, double tol) {
    if (v_star > tol && std::abs(v - 1.0) > tol)
        return false;
    if (v_star < -tol && std::abs(v + 1.0) > tol)
        return false;
    if (std::abs(v) < 1.0 - tol && std::abs(v_star) > tol)
        return false;
    if (y_star > tol && std::abs(y - (1.0 + z_k)) > tol)
        return false;
    if (y_star < -tol && std::abs(y - (-1.0 + z_k)) > tol)
        return false;
    if (std::abs(y - z_k) < 1.0 - tol && std::abs(y_star) > tol)
        return false;
    return true;
}

bool in_M(const Quadruple& q, double s, double t, double z_k, const PlantSpec& p, double tol) {
    const double scale = 1.0 + std::abs(s) + std::abs(t) + std::abs(z_k);
    if (std::abs(q.v) > 1.0 + tol || std::abs(q.y - z_k) > 1.0 + tol)
        return false;
    if (std::abs(q.y - p.n1() * q.v - s) > tol * scale)
        return false;
    if (std::abs(p.dm1() * q.v_star + p.nm1() * q.y_star + t) >
        tol * scale * (1.0 + std::abs(q.y_star) + std::abs(q.v_star)))
        return false;
    return aligned(q.y, q.v, q.y_star, q.v_star, z_k, tol);
}

MResult compute_M(double s, double t, double z_k, const PlantSpec& p, double tol) {
    MResult res;
    const auto extent = line_square_v_extent(s, z_k, p.n1(), tol);
    if (!extent)
        return res;
    const auto [vlo, vhi] = *extent;

    const bool segment = std::abs(t) <= tol && vhi - vlo > tol;

    std::vector<double> endpoints{vlo};
    if (vhi - vlo > tol)
        endpoints.push_back(vhi);

    for (double vhat : endpoints) {
        const double y = s + p.n1() * vhat;
        const int av = vhat >= 1.0 - tol ? 1 : (vhat <= -1.0 + tol ? -1 : 0);
        const int ay = y >= z_k + 1.0 - tol ? 1 : (y <= z_k - 1.0 + tol ? -1 : 0);

        std::vector<int> svs{0}, sys{0};
        if (av != 0)
            svs.push_back(av);
        if (ay != 0)
            sys.push_back(ay);

        std::optional<DualCandidate> best;
        for (int sv : svs) {
            for (int sy : sys) {
                auto cand = dual_solve(sv, sy, t, p.nm1(), p.dm1(), tol);
                if (!cand)
                    continue;
                // Prefer the smallest attainable |y*|, with y* = 0 patterns
                // first and v* = 0 breaking remaining ties.
                auto rank = [](const DualCandidate& c) {
                    return std::make_tuple(c.inf_y, c.sy != 0, c.sv != 0, c.sv, c.sy);
                };
                if (!best || rank(*cand) < rank(*best))
                    best = cand;
            }
        }
        if (best)
            res.quadruples.push_back(
                Quadruple{vhat, y, best->vs, best->ys, best->sv, best->sy});
    }

    if (segment) {
        res.kind = MResult::Kind::Segment;
        res.v_min = vlo;
        res.v_max = vhi;
    } else {
        res.kind = res.quadruples.empty() ? MResult::Kind::Empty : MResult::Kind::Finite;
    }
    return res;
}

RPartition partition_R(const SupportCone& cone, double tol) {
    if (cone.generators.empty())
        throw ConePrecondition("partition_R: empty cone");
    const int m = static_cast<int>(cone.generators.front().size());

    if (m == 1) {
        const double g = cone.generators.front()(0);
        return RPartition{g > 0.0 ? RTag::R2 : RTag::R3, cone.generators.front()};
    }

    if (m == 2) {
        const double lo = cone.theta_lo, hi = cone.theta_hi;
        // First component vanishes at theta = pi/2 + j pi.
        const double first = std::ceil((lo - tol - M_PI_2) / M_PI);
        const double theta_z = M_PI_2 + first * M_PI;
        if (theta_z <= hi + tol) {
            Vec rep(2);
            rep << 0.0, (std::sin(theta_z) > 0.0 ? 1.0 : -1.0);
            return RPartition{RTag::R1, rep};
        }
        const double mid = 0.5 * (lo + hi);
        Vec rep(2);
        rep << std::cos(mid), std::sin(mid);
        return RPartition{std::cos(mid) > 0.0 ? RTag::R2 : RTag::R3, rep};
    }

    // Generic dimension: inspect generator first components.
    double pos = 0.0, neg = 0.0;
    const Vec* gp = nullptr;
    const Vec* gn = nullptr;
    for (const auto& g : cone.generators) {
        if (std::abs(g(0)) <= tol) {
            Vec rep = g;
            rep(0) = 0.0;
            return RPartition{RTag::R1, rep.normalized()};
        }
        if (g(0) > 0.0) {
            pos += 1.0;
            gp = &g;
        } else {
            neg += 1.0;
            gn = &g;
        }
    }
    if (pos > 0.0 && neg > 0.0) {
        Vec rep = (*gp) * std::abs((*gn)(0)) + (*gn) * (*gp)(0);
        rep(0) = 0.0;
        return RPartition{RTag::R1, rep.normalized()};
    }
    Vec sum = Vec::Zero(m);
    for (const auto& g : cone.generators)
        sum += g;
    return RPartition{pos > 0.0 ? RTag::R2 : RTag::R3, sum.normalized()};
}

std::optional<std::pair<double, double>> successor_interval(const Vec& x_prev, double z_k,
                                                            const PlantModel& model,
                                                            double tol) {
    return line_square_v_extent(model.est.C_row.dot(x_prev), z_k, model.est.D1, tol);
}

PropagationResult propagate_point(const Vec& x_prev, const SupportCone& cone, double z_k,
                                  const PlantModel& model, double tol) {
    if (cone.generators.empty())
        throw ConePrecondition("propagate_point: empty cone");

    const RPartition rp = partition_R(cone, tol);
    const double s = model.est.C_row.dot(x_prev);
    const double t = rp.tag == RTag::R1 ? 0.0 : rp.representative(0);

    const MResult M = compute_M(s, t, z_k, model.spec, tol);

    PropagationResult res;
    res.tag = rp.tag;
    res.segment = M.kind == MResult::Kind::Segment;
    res.v_min = M.v_min;
    res.v_max = M.v_max;

    for (const auto& q : M.quadruples) {
        Vec x_next = model.est.A * x_prev + model.est.B_col * q.v;
        Vec xs_next = model.reg.A_star * rp.representative + model.reg.B_star * q.y_star;
        if (xs_next.norm() <= 1e-12)
            continue;
        bool dup = false;
        for (const auto& p : res.pairs) {
            if ((p.x_next - x_next).norm() <= tol * (1.0 + x_next.norm())) {
                dup = true;
                break;
            }
        }
        if (!dup)
            res.pairs.push_back(PropagatedPair{std::move(x_next), std::move(xs_next), q});
    }
    return res;
}

Front make_front(const Polytope& S, int k, std::vector<double> z_history) {
    Front f;
    f.polytope = S;
    f.k = k;
    f.z_history = std::move(z_history);
    if (S.full_dimensional()) {
        for (const auto& v : S.vertices())
            f.boundary_points.push_back({v, supporting_cone(S, v)});
    }
    return f;
}

namespace {

// argmax of dir.(A x + B v) over {x in S_prev, |v| <= 1, |C x + D1 v - z| <= 1},
// solved as a small LP. Empty feasible set means S_k is empty.
std::optional<std::pair<Vec, double>> one_step_argmax(const Polytope& S_prev,
                                                      const PlantModel& model, double z,
                                                      const Vec& dir) {
    const int m = model.m();
    LpBuilder lp;

    Vec lb = S_prev.vertices().front(), ub = S_prev.vertices().front();
    for (const auto& v : S_prev.vertices()) {
        lb = lb.cwiseMin(v);
        ub = ub.cwiseMax(v);
    }
    const Vec cx = -(model.est.A.transpose() * dir);
    const double cv = -model.est.B_col.dot(dir);

    std::vector<int> xs(m);
    for (int i = 0; i < m; ++i)
        xs[i] = lp.add_variable(lb(i), ub(i), cx(i));
    const int vv = lp.add_variable(-1.0, 1.0, cv);

    for (const auto& h : S_prev.halfspaces()) {
        std::vector<std::pair<int, double>> row;
        for (int i = 0; i < m; ++i)
            row.push_back({xs[i], h.normal(i)});
        lp.add_le(row, h.offset);
    }
    std::vector<std::pair<int, double>> slab;
    for (int i = 0; i < m; ++i)
        slab.push_back({xs[i], model.est.C_row(i)});
    slab.push_back({vv, model.est.D1});
    lp.add_le(slab, z + 1.0);
    for (auto& [idx, a] : slab)
        a = -a;
    lp.add_le(slab, -(z - 1.0));

    LpResult r = lp.solve();
    if (r.status != LpStatus::Optimal)
        return std::nullopt;
    return std::make_pair(Vec(r.x.head(m)), r.x(m));
}

}  // namespace

Front propagate_front(const Front& front, double z_k, const PlantModel& model,
                      const StepOptions& opts, const Polytope* oracle_polytope,
                      StepReport* report) {
    if (!front.polytope.full_dimensional())
        throw DegenerateFront("propagate_front: int S_{k-1} is empty");
    const int m = model.m();
    const double scale = 1.0 + front.polytope.diameter();

    std::vector<BoundaryPoint> pts = front.boundary_points;
    auto push_unique = [&](BoundaryPoint bp) {
        for (const auto& q : pts)
            if ((q.point - bp.point).norm() <= opts.tol * scale)
                return;
        pts.push_back(std::move(bp));
    };

    if (m == 2) {
        const auto& verts = front.polytope.vertices();
        const auto& hs = front.polytope.halfspaces();
        const int n = static_cast<int>(verts.size());
        const Vec& C = model.est.C_row;
        const double D1 = model.est.D1;

        if (opts.targeted) {
            // Vertices of S_k can be successors of non-vertex boundary
            // points; those precursors sit where C x = z +- 1 - D1 v with
            // v = +-1 crosses an edge.
            for (double vhat : {1.0, -1.0}) {
                for (double side : {1.0, -1.0}) {
                    const double c = z_k + side - D1 * vhat;
                    for (int i = 0; i < n; ++i) {
                        const Vec& a = verts[i];
                        const Vec& b = verts[(i + 1) % n];
                        const double fa = C.dot(a) - c;
                        const double fb = C.dot(b) - c;
                        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
                            const double tt = fa / (fa - fb);
                            Vec p = a + tt * (b - a);
                            SupportCone cone;
                            cone.base_point = p;
                            cone.generators = {hs[i].normal};
                            cone.theta_lo = cone.theta_hi =
                                std::atan2(hs[i].normal(1), hs[i].normal(0));
                            push_unique({std::move(p), std::move(cone)});
                        }
                    }
                }
            }
        }
        for (int i = 0; i < n && opts.sample_density > 0; ++i) {
            const Vec& a = verts[i];
            const Vec& b = verts[(i + 1) % n];
            for (int sidx = 1; sidx <= opts.sample_density; ++sidx) {
                const double tt = static_cast<double>(sidx) / (opts.sample_density + 1);
                Vec p = a + tt * (b - a);
                SupportCone cone;
                cone.base_point = p;
                cone.generators = {hs[i].normal};
                cone.theta_lo = cone.theta_hi = std::atan2(hs[i].normal(1), hs[i].normal(0));
                push_unique({std::move(p), std::move(cone)});
            }
        }
    }

    std::vector<Vec> candidates;
    for (const auto& bp : pts) {
        PropagationResult pr = propagate_point(bp.point, bp.cone, z_k, model, opts.tol);
        for (auto& pair : pr.pairs) {
            candidates.push_back(pair.x_next);
            if (report)
                report->pairs.push_back(pair);
        }
        if (report) {
            ++report->propagated_points;
            if (pr.segment)
                ++report->segment_results;
            report->outcomes.push_back(
                {pr.tag, static_cast<int>(pr.pairs.size()), pr.segment});
        }
    }

    // Faces supported by +-B*: the only boundary pieces reachable from the
    // interior of S_{k-1}; their argmax points complete the candidate set.
    for (double sgn : {1.0, -1.0}) {
        auto arg = one_step_argmax(front.polytope, model, z_k, sgn * model.reg.B_star);
        if (!arg)
            throw EmptyFront("propagate_front: measurement inconsistent, S_k is empty");
        Vec img = model.est.A * arg->first + model.est.B_col * arg->second;
        candidates.push_back(img);
        if (report)
            report->face_candidates.push_back(std::move(img));
    }

    Polytope S_next = convex_hull(m, candidates);
    if (S_next.is_empty())
        throw EmptyFront("propagate_front: no candidates, S_k is empty");
    if (!S_next.full_dimensional())
        throw DegenerateFront("propagate_front: int S_k is empty");

    if (oracle_polytope && report) {
        const double dtol = opts.defect_rel * std::max(1.0, S_next.diameter());
        for (const auto& v : oracle_polytope->vertices())
            if (S_next.distance(v) > dtol)
                report->defects.push_back(v);
    }

    std::vector<double> zh = front.z_history;
    zh.push_back(z_k);
    return make_front(S_next, front.k + 1, std::move(zh));
}

}  // namespace svo
