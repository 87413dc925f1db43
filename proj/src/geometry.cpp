#include "svo/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace svo {

namespace {

constexpr double kDedupTol = 1e-10;
constexpr double kCollinearTol = 1e-10;

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

std::vector<Vec> dedup_points(const std::vector<Vec>& pts, double tol) {
    std::vector<Vec> out;
    for (const auto& p : pts) {
        bool seen = false;
        for (const auto& q : out) {
            if ((p - q).norm() <= tol * (1.0 + q.norm())) {
                seen = true;
                break;
            }
        }
        if (!seen)
            out.push_back(p);
    }
    return out;
}

// Andrew monotone chain; collinear points pruned.
std::vector<Vec> hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    const int n = static_cast<int>(pts.size());
    if (n <= 2)
        return pts;

    double scale = 0.0;
    for (const auto& p : pts)
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double ctol = kCollinearTol * std::max(1.0, scale * scale);

    std::vector<Vec> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= ctol)
            --k;
        h[k++] = pts[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross2(h[k - 2], h[k - 1], pts[i]) <= ctol)
            --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);  // last point repeats the first
    return h;
}

// Extreme-point filter for m = 3 hull queries: keep p when it is outside the
// hull of the remaining points, decided by a small feasibility LP solved by
// exhaustive facet search would be heavy; instead use support separation over
// sampled directions plus exactness along coordinate axes. Desk scale only.
std::vector<Vec> extreme_points_nd(const std::vector<Vec>& pts) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool extreme = false;
        // p is extreme iff some direction strictly separates it; probe the
        // directions spanned by differences, which suffices for finite sets.
        for (std::size_t a = 0; a < pts.size() && !extreme; ++a) {
            for (std::size_t b = 0; b < pts.size() && !extreme; ++b) {
                if (a == b)
                    continue;
                Vec dir = pts[i] * 2.0 - pts[a] - pts[b];
                if (dir.norm() < 1e-14)
                    continue;
                double best = -1e300;
                for (std::size_t j = 0; j < pts.size(); ++j)
                    if (j != i)
                        best = std::max(best, dir.dot(pts[j]));
                if (dir.dot(pts[i]) > best + 1e-12 * (1.0 + std::abs(best)))
                    extreme = true;
            }
        }
        if (extreme || pts.size() == 1)
            out.push_back(pts[i]);
    }
    return out.empty() ? pts : out;
}

double angle_of(const Vec& v) { return std::atan2(v(1), v(0)); }

}  // namespace

Polytope Polytope::empty(int dim) {
    Polytope P;
    P.dim_ = dim;
    return P;
}

Polytope Polytope::from_points(int dim, const std::vector<Vec>& points) {
    return convex_hull(dim, points);
}

void Polytope::rebuild_halfspaces() {
    halfspaces_.clear();
    if (degenerate_ || vertices_.empty())
        return;
    if (dim_ == 1) {
        halfspaces_.push_back({Vec::Constant(1, 1.0), vertices_.back()(0)});
        halfspaces_.push_back({Vec::Constant(1, -1.0), -vertices_.front()(0)});
        return;
    }
    if (dim_ != 2)
        return;  // H-rep synthesized for m <= 2 only
    const int n = static_cast<int>(vertices_.size());
    for (int i = 0; i < n; ++i) {
        const Vec& a = vertices_[i];
        const Vec& b = vertices_[(i + 1) % n];
        Vec normal(2);
        normal << (b(1) - a(1)), -(b(0) - a(0));  // outward for CCW loops
        const double len = normal.norm();
        normal /= len;
        halfspaces_.push_back({normal, normal.dot(a)});
    }
}

double Polytope::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
            d = std::max(d, (vertices_[i] - vertices_[j]).norm());
    return d;
}

bool Polytope::contains(const Vec& x, double tol) const {
    if (is_empty())
        return false;
    const double s = tol * (1.0 + x.norm());
    if (degenerate_) {
        if (vertices_.size() == 1)
            return (x - vertices_[0]).norm() <= s;
        return distance_point_segment(x, vertices_.front(), vertices_.back()) <= s;
    }
    if (dim_ == 1)
        return x(0) >= vertices_.front()(0) - s && x(0) <= vertices_.back()(0) + s;
    if (dim_ > 2)
        throw GeometryError("contains: membership queries are m <= 2");
    for (const auto& h : halfspaces_)
        if (h.normal.dot(x) > h.offset + s)
            return false;
    return true;
}

double Polytope::distance(const Vec& x) const {
    if (is_empty())
        return std::numeric_limits<double>::infinity();
    if (degenerate_) {
        if (vertices_.size() == 1)
            return (x - vertices_[0]).norm();
        return distance_point_segment(x, vertices_.front(), vertices_.back());
    }
    if (dim_ == 1) {
        const double a = vertices_.front()(0), b = vertices_.back()(0);
        return std::max({a - x(0), x(0) - b, 0.0});
    }
    if (contains(x, 0.0))
        return 0.0;
    return boundary_distance(x);
}

double Polytope::boundary_distance(const Vec& x) const {
    if (is_empty())
        return std::numeric_limits<double>::infinity();
    if (degenerate_) {
        if (vertices_.size() == 1)
            return (x - vertices_[0]).norm();
        return distance_point_segment(x, vertices_.front(), vertices_.back());
    }
    if (dim_ == 1)
        return std::min(std::abs(x(0) - vertices_.front()(0)),
                        std::abs(x(0) - vertices_.back()(0)));
    double best = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(vertices_.size());
    for (int i = 0; i < n; ++i)
        best = std::min(best, distance_point_segment(x, vertices_[i], vertices_[(i + 1) % n]));
    return best;
}

double distance_point_segment(const Vec& x, const Vec& a, const Vec& b) {
    const Vec ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0)
        return (x - a).norm();
    const double t = std::clamp(ab.dot(x - a) / len2, 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

Polytope convex_hull(int dim, const std::vector<Vec>& points) {
    Polytope P;
    P.dim_ = dim;
    std::vector<Vec> pts = dedup_points(points, kDedupTol);
    if (pts.empty())
        return P;

    if (dim == 1) {
        double lo = pts[0](0), hi = pts[0](0);
        for (const auto& p : pts) {
            lo = std::min(lo, p(0));
            hi = std::max(hi, p(0));
        }
        if (hi - lo <= kDedupTol * (1.0 + std::abs(lo))) {
            P.vertices_ = {Vec::Constant(1, lo)};
            P.degenerate_ = true;
            return P;
        }
        P.vertices_ = {Vec::Constant(1, lo), Vec::Constant(1, hi)};
        P.rebuild_halfspaces();
        return P;
    }

    if (dim == 2) {
        std::vector<Vec> h = hull_2d(pts);
        if (h.size() <= 2) {
            // Collinear input: reduce to the extreme segment endpoints.
            if (h.size() == 2 && pts.size() >= 2) {
                P.vertices_ = {h[0], h[1]};
            } else if (pts.size() >= 2) {
                Vec dir = Vec::Zero(2);
                for (std::size_t i = 1; i < pts.size() && dir.norm() < 1e-13; ++i)
                    dir = pts[i] - pts[0];
                if (dir.norm() < 1e-13) {
                    P.vertices_ = {pts[0]};
                } else {
                    double tlo = 0.0, thi = 0.0;
                    std::size_t ilo = 0, ihi = 0;
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        const double t = dir.dot(pts[i] - pts[0]);
                        if (t < tlo) { tlo = t; ilo = i; }
                        if (t > thi) { thi = t; ihi = i; }
                    }
                    P.vertices_ = {pts[ilo], pts[ihi]};
                }
            } else {
                P.vertices_ = {pts[0]};
            }
            if (P.vertices_.size() == 2 &&
                (P.vertices_[0] - P.vertices_[1]).norm() <= kDedupTol)
                P.vertices_.pop_back();
            P.degenerate_ = true;
            return P;
        }
        P.vertices_ = std::move(h);
        P.rebuild_halfspaces();
        return P;
    }

    P.vertices_ = extreme_points_nd(pts);
    P.degenerate_ = static_cast<int>(P.vertices_.size()) <= dim;
    return P;
}

SupportResult support(const Polytope& P, const Vec& dir) {
    if (dir.norm() == 0.0)
        throw ZeroDirection("support: zero direction");
    if (P.is_empty())
        throw GeometryError("support: empty polytope");

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : P.vertices())
        best = std::max(best, dir.dot(v));

    const double tol = 1e-9 * dir.norm() * std::max(1.0, P.diameter());
    SupportResult r{best, {}};
    for (const auto& v : P.vertices())
        if (dir.dot(v) >= best - tol)
            r.argmax.push_back(v);
    return r;
}

SupportCone supporting_cone(const Polytope& P, const Vec& x, double tol) {
    if (P.is_empty() || P.degenerate())
        throw DegeneratePolytope("supporting_cone: needs a full-dimensional polytope");
    if (P.dim() > 2)
        throw GeometryError("supporting_cone: implemented for m <= 2");
    const double s = tol * (1.0 + x.norm());

    if (P.dim() == 1) {
        const double a = P.vertices().front()(0), b = P.vertices().back()(0);
        SupportCone c;
        c.base_point = x;
        if (std::abs(x(0) - b) <= s)
            c.generators.push_back(Vec::Constant(1, 1.0));
        else if (std::abs(x(0) - a) <= s)
            c.generators.push_back(Vec::Constant(1, -1.0));
        else
            throw NotOnBoundary("supporting_cone: point not on interval boundary");
        return c;
    }

    const auto& verts = P.vertices();
    const auto& hs = P.halfspaces();
    const int n = static_cast<int>(verts.size());

    for (int i = 0; i < n; ++i) {
        if ((x - verts[i]).norm() <= s) {
            // Vertex cone spans the incoming and outgoing edge normals.
            const Vec& n_in = hs[(i + n - 1) % n].normal;
            const Vec& n_out = hs[i].normal;
            SupportCone c;
            c.base_point = verts[i];
            c.generators = {n_in, n_out};
            c.theta_lo = angle_of(n_in);
            c.theta_hi = angle_of(n_out);
            while (c.theta_hi < c.theta_lo)
                c.theta_hi += 2.0 * M_PI;
            return c;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (distance_point_segment(x, verts[i], verts[(i + 1) % n]) <= s) {
            SupportCone c;
            c.base_point = x;
            c.generators = {hs[i].normal};
            c.theta_lo = c.theta_hi = angle_of(hs[i].normal);
            return c;
        }
    }
    throw NotOnBoundary("supporting_cone: point not on polygon boundary");
}

Polytope intersect_halfspaces(const Polytope& P, const std::vector<Halfspace>& cuts) {
    if (P.is_empty())
        return P;

    if (P.dim() == 1) {
        double lo = P.vertices().front()(0);
        double hi = P.vertices().back()(0);
        for (const auto& c : cuts) {
            const double a = c.normal(0);
            if (a > 0.0)
                hi = std::min(hi, c.offset / a);
            else if (a < 0.0)
                lo = std::max(lo, c.offset / a);
            else if (c.offset < 0.0)
                return Polytope::empty(1);
        }
        if (lo > hi)
            return Polytope::empty(1);
        return convex_hull(1, {Vec::Constant(1, lo), Vec::Constant(1, hi)});
    }

    if (P.dim() != 2 || !P.full_dimensional())
        throw DegeneratePolytope("intersect_halfspaces: needs a full-dimensional polygon");

    // Sutherland-Hodgman sequential clipping of the CCW vertex loop.
    std::vector<Vec> poly = P.vertices();
    for (const auto& cut : cuts) {
        if (poly.empty())
            break;
        std::vector<Vec> next;
        const int n = static_cast<int>(poly.size());
        for (int i = 0; i < n; ++i) {
            const Vec& cur = poly[i];
            const Vec& nxt = poly[(i + 1) % n];
            const double fc = cut.normal.dot(cur) - cut.offset;
            const double fn = cut.normal.dot(nxt) - cut.offset;
            if (fc <= 0.0)
                next.push_back(cur);
            if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
                const double t = fc / (fc - fn);
                next.push_back(cur + t * (nxt - cur));
            }
        }
        poly = std::move(next);
    }
    return convex_hull(2, poly);
}

FacePair faces_F(const Polytope& P, const Vec& B_star, double tol) {
    if (!P.full_dimensional())
        throw DegeneratePolytope("faces_F: needs nonempty interior");
    if (P.dim() > 2)
        throw GeometryError("faces_F: implemented for m <= 2");
    if (B_star.norm() == 0.0)
        throw ZeroDirection("faces_F: zero direction");

    auto face_of = [&](const Vec& dir) {
        SupportResult s = support(P, dir);
        Face f;
        if (s.argmax.size() == 1) {
            f.vertices = {s.argmax[0]};
        } else {
            // Extreme two along the face line.
            Vec t(2);
            if (P.dim() == 2) {
                t << -dir(1), dir(0);
            } else {
                t = Vec::Constant(1, 1.0);
            }
            auto lo = s.argmax[0], hi = s.argmax[0];
            for (const auto& v : s.argmax) {
                if (t.dot(v) < t.dot(lo))
                    lo = v;
                if (t.dot(v) > t.dot(hi))
                    hi = v;
            }
            f.vertices = {lo, hi};
            if ((lo - hi).norm() <= tol)
                f.vertices = {lo};
        }
        return f;
    };

    FacePair fp;
    fp.plus = face_of(B_star);
    fp.minus = face_of(-B_star);
    fp.tol = tol;
    return fp;
}

bool FacePair::relint_contains(const Face& f, const Vec& x) const {
    const double s = tol * (1.0 + x.norm());
    if (f.is_point())
        return false;  // point faces have empty relative interior
    if (distance_point_segment(x, f.vertices[0], f.vertices[1]) > s)
        return false;
    return (x - f.vertices[0]).norm() > s && (x - f.vertices[1]).norm() > s;
}

double hausdorff_distance(const Polytope& P, const Polytope& Q) {
    double d = 0.0;
    for (const auto& v : P.vertices())
        d = std::max(d, Q.distance(v));
    for (const auto& v : Q.vertices())
        d = std::max(d, P.distance(v));
    return d;
}

}  // namespace svo
