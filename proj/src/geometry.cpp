#include "cutfem/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutfem {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double tangent_tolerance = 1e-12;

Vec2 perp(const Vec2& d) { return {d.y(), -d.x()}; }

/// Clip the parameter interval of origin + t * dir to the closed cell (slab test).
bool clip_to_cell(const Vec2& origin, const Vec2& dir, const Cell& cell, double& t0, double& t1)
{
    const Vec2 lo = cell.lo, hi = cell.hi();
    for (int ax = 0; ax < 2; ++ax)
    {
        if (std::abs(dir[ax]) < 1e-300)
        {
            if (origin[ax] < lo[ax] || origin[ax] > hi[ax])
                return false;
            continue;
        }
        double a = (lo[ax] - origin[ax]) / dir[ax];
        double b = (hi[ax] - origin[ax]) / dir[ax];
        if (a > b)
            std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    return t1 > t0;
}

struct LinearConstraint
{
    // c0 + c . x <= 0
    Vec2 c;
    double c0;
    double eval(const Vec2& x) const { return c.dot(x) + c0; }
};

std::vector<Vec2> clip_polygon(const std::vector<Vec2>& poly, const LinearConstraint& lc)
{
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double fp = lc.eval(p), fq = lc.eval(q);
        if (fp <= 0.0)
            out.push_back(p);
        if ((fp <= 0.0) != (fq <= 0.0))
        {
            const double s = fp / (fp - fq);
            out.push_back(p + s * (q - p));
        }
    }
    return out;
}

void append_fan(QuadratureRule& rule, const std::vector<Vec2>& poly, int n)
{
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        append_triangle_rule(rule, poly[0], poly[i], poly[i + 1], n);
}

int triangle_points(int gauss_order) { return std::min(gauss_order + 1, max_gauss_points); }

/// Clip a triangle by the sign of phi at its vertices, with exact edge roots.
void append_clipped_triangle(QuadratureRule& rule, const LevelSetDomain& domain, const std::array<Vec2, 3>& tri,
                             int gauss_order)
{
    std::array<double, 3> phi;
    for (int k = 0; k < 3; ++k)
        phi[k] = domain.value(tri[k]);
    std::vector<Vec2> poly;
    for (int k = 0; k < 3; ++k)
    {
        const int l = (k + 1) % 3;
        const bool in_k = phi[k] < 0.0, in_l = phi[l] < 0.0;
        if (in_k)
            poly.push_back(tri[k]);
        if (in_k != in_l)
            poly.push_back(domain.segment_root(tri[k], tri[l]));
    }
    if (poly.size() >= 3)
        append_fan(rule, poly, triangle_points(gauss_order));
}

void subdivide(QuadratureRule& rule, const Cell& cell, const LevelSetDomain& domain, int gauss_order, int level)
{
    switch (classify_cell(cell, domain))
    {
    case CellClass::Outside:
        return;
    case CellClass::Inside:
        append_square_rule(rule, cell.lo, cell.size, gauss_order);
        return;
    case CellClass::Cut:
        break;
    }
    if (level > 0)
    {
        const double half = 0.5 * cell.size;
        for (int k = 0; k < 4; ++k)
            subdivide(rule, Cell{cell.lo + half * Vec2(k & 1, k >> 1), half}, domain, gauss_order, level - 1);
        return;
    }
    const Vec2 c = cell.center();
    const std::array<Vec2, 4> corners{cell.corner(0), cell.corner(1), cell.corner(3), cell.corner(2)};
    for (int k = 0; k < 4; ++k)
        append_clipped_triangle(rule, domain, {corners[k], corners[(k + 1) % 4], c}, gauss_order);
}

// Height-function rule for a circle: one coordinate is integrated between
// the exact roots of the circle equation, so no geometric error is made.
void append_circle_cell(QuadratureRule& rule, const Cell& cell, const LevelSetDomain& domain, int n, int level)
{
    switch (classify_cell(cell, domain))
    {
    case CellClass::Outside:
        return;
    case CellClass::Inside:
        append_square_rule(rule, cell.lo, cell.size, n);
        return;
    case CellClass::Cut:
        break;
    }
    const auto& circ = std::get<Circle>(domain.shape());
    const Vec2 hi = cell.hi();
    auto gap = [](double c, double lo, double up) { return std::max({lo - c, c - up, 0.0}); };
    const double dx = gap(circ.center.x(), cell.lo.x(), hi.x());
    const double dy = gap(circ.center.y(), cell.lo.y(), hi.y());
    if (std::max(dx, dy) < 0.5 * cell.size && level > 0)
    {
        const double half = 0.5 * cell.size;
        for (int k = 0; k < 4; ++k)
            append_circle_cell(rule, Cell{cell.lo + half * Vec2(k & 1, k >> 1), half}, domain, n, level - 1);
        return;
    }
    // v is the height coordinate, u the outer one
    const int iv = dy >= dx ? 1 : 0, iu = 1 - iv;
    const double ulo = cell.lo[iu], uhi = hi[iu], vlo = cell.lo[iv], vhi = hi[iv];
    const double cu = circ.center[iu], cv = circ.center[iv], r = circ.radius;
    const bool inside = !domain.complemented();

    std::vector<double> breaks{ulo, uhi};
    auto add_break = [&](double u) {
        if (u > ulo && u < uhi)
            breaks.push_back(u);
    };
    add_break(cu - r);
    add_break(cu + r);
    for (double vb : {vlo, vhi})
    {
        const double q2 = r * r - (vb - cv) * (vb - cv);
        if (q2 > 0.0)
        {
            add_break(cu - std::sqrt(q2));
            add_break(cu + std::sqrt(q2));
        }
    }
    std::sort(breaks.begin(), breaks.end());

    // v-intervals of the domain on the line u = const
    auto intervals = [&](double u) {
        std::vector<std::pair<double, double>> out;
        const double q2 = r * r - (u - cu) * (u - cu);
        const double a = q2 > 0.0 ? std::clamp(cv - std::sqrt(q2), vlo, vhi) : vhi;
        const double b = q2 > 0.0 ? std::clamp(cv + std::sqrt(q2), vlo, vhi) : vhi;
        if (inside)
            out.emplace_back(a, b);
        else
        {
            out.emplace_back(vlo, a);
            out.emplace_back(b, vhi);
        }
        return out;
    };

    const auto& g = gauss_legendre(n);
    // the outer integrand is not polynomial; it gets the full table
    const auto& go = gauss_legendre(max_gauss_points);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    {
        const double u0 = breaks[k], du = breaks[k + 1] - u0;
        if (du <= 0.0)
            continue;
        for (std::size_t i = 0; i < go.nodes.size(); ++i)
        {
            const double u = u0 + du * go.nodes[i];
            for (const auto& [a, b] : intervals(u))
            {
                if (b <= a)
                    continue;
                for (std::size_t j = 0; j < g.nodes.size(); ++j)
                {
                    Vec2 x;
                    x[iu] = u;
                    x[iv] = a + (b - a) * g.nodes[j];
                    rule.points.push_back(x);
                    rule.weights.push_back(du * go.weights[i] * (b - a) * g.weights[j]);
                }
            }
        }
    }
}

} // namespace

Vec2 BoundaryPiece::point(double t) const
{
    if (kind == Kind::Arc)
        return origin + radius * Vec2(std::cos(t), std::sin(t));
    return origin + t * direction;
}

Vec2 BoundaryPiece::normal(double t) const
{
    if (kind == Kind::Arc)
        return orientation * Vec2(std::cos(t), std::sin(t));
    return orientation * perp(direction);
}

LevelSetDomain LevelSetDomain::circle(const Vec2& center, double radius)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("circle radius must be positive");
    return LevelSetDomain(Circle{center, radius}, false);
}

LevelSetDomain LevelSetDomain::axis_box(const Vec2& lo, const Vec2& hi)
{
    if (!(hi.x() > lo.x() && hi.y() > lo.y()))
        throw std::invalid_argument("axis box must have positive extent");
    return LevelSetDomain(AxisBox{lo, hi}, false);
}

LevelSetDomain LevelSetDomain::half_plane(const Vec2& normal, double offset)
{
    const double len = normal.norm();
    if (!(len > 0.0))
        throw std::invalid_argument("half-plane normal must be nonzero");
    return LevelSetDomain(HalfPlane{normal / len, offset / len}, false);
}

LevelSetDomain LevelSetDomain::complement() const
{
    if (const auto* hp = std::get_if<HalfPlane>(&shape_))
        return LevelSetDomain(HalfPlane{-hp->normal, -hp->offset}, false);
    return LevelSetDomain(shape_, !complemented_);
}

double LevelSetDomain::value(const Vec2& x) const
{
    const double sign = complemented_ ? -1.0 : 1.0;
    return sign * std::visit(
                      [&](const auto& s) -> double {
                          using S = std::decay_t<decltype(s)>;
                          if constexpr (std::is_same_v<S, Circle>)
                              return (x - s.center).norm() - s.radius;
                          else if constexpr (std::is_same_v<S, AxisBox>)
                              return std::max({s.lo.x() - x.x(), x.x() - s.hi.x(), s.lo.y() - x.y(), x.y() - s.hi.y()});
                          else
                              return s.normal.dot(x) - s.offset;
                      },
                      shape_);
}

Vec2 LevelSetDomain::gradient(const Vec2& x) const
{
    const double sign = complemented_ ? -1.0 : 1.0;
    return sign * std::visit(
                      [&](const auto& s) -> Vec2 {
                          using S = std::decay_t<decltype(s)>;
                          if constexpr (std::is_same_v<S, Circle>)
                          {
                              const Vec2 d = x - s.center;
                              const double r = d.norm();
                              return r > 0.0 ? Vec2(d / r) : Vec2(1.0, 0.0);
                          }
                          else if constexpr (std::is_same_v<S, AxisBox>)
                          {
                              const std::array<double, 4> v{s.lo.x() - x.x(), x.x() - s.hi.x(), s.lo.y() - x.y(),
                                                            x.y() - s.hi.y()};
                              const std::array<Vec2, 4> g{Vec2(-1, 0), Vec2(1, 0), Vec2(0, -1), Vec2(0, 1)};
                              return g[std::max_element(v.begin(), v.end()) - v.begin()];
                          }
                          else
                              return s.normal;
                      },
                      shape_);
}

std::optional<Eigen::AlignedBox2d> LevelSetDomain::bounding_box() const
{
    if (complemented_)
        return std::nullopt;
    if (const auto* c = std::get_if<Circle>(&shape_))
        return Eigen::AlignedBox2d(c->center - Vec2::Constant(c->radius), c->center + Vec2::Constant(c->radius));
    if (const auto* b = std::get_if<AxisBox>(&shape_))
        return Eigen::AlignedBox2d(b->lo, b->hi);
    return std::nullopt;
}

bool LevelSetDomain::is_convex_polygon() const
{
    return std::holds_alternative<HalfPlane>(shape_) || (std::holds_alternative<AxisBox>(shape_) && !complemented_);
}

Vec2 LevelSetDomain::segment_root(const Vec2& a, const Vec2& b) const
{
    double s0 = 0.0, s1 = 1.0;
    double f0 = value(a), f1 = value(b);
    if (f0 == 0.0)
        return a;
    if (f1 == 0.0)
        return b;
    // Illinois variant of regula falsi, finished by bisection when it stalls
    int side = 0;
    for (int it = 0; it < 200 && (s1 - s0) > 1e-17; ++it)
    {
        double s = (s0 * f1 - s1 * f0) / (f1 - f0);
        if (!(s > s0 && s < s1))
            s = 0.5 * (s0 + s1);
        const double f = value(a + s * (b - a));
        if (f == 0.0)
            return a + s * (b - a);
        if ((f < 0.0) == (f0 < 0.0))
        {
            s0 = s;
            f0 = f;
            if (side == -1)
                f1 *= 0.5;
            side = -1;
        }
        else
        {
            s1 = s;
            f1 = f;
            if (side == 1)
                f0 *= 0.5;
            side = 1;
        }
        if (std::abs(f) < 1e-16)
            break;
    }
    const double s = (std::abs(f0) < std::abs(f1)) ? s0 : s1;
    return a + s * (b - a);
}

std::vector<BoundaryPiece> LevelSetDomain::boundary_pieces(const Cell& cell) const
{
    std::vector<BoundaryPiece> pieces;
    const double orientation = complemented_ ? -1.0 : 1.0;
    const double min_length = 1e-14 * cell.size;
    const Vec2 lo = cell.lo, hi = cell.hi();

    auto add_segment = [&](const Vec2& origin, const Vec2& dir, double t0, double t1, double orient) {
        // a segment on a grid line belongs to the cell on the domain side only,
        // whatever the rounding of the two cells' shared edge
        const double tol = tangent_tolerance * cell.size;
        Vec2 o = origin;
        for (int ax = 0; ax < 2; ++ax)
        {
            if (std::abs(dir[ax]) > 1e-300)
                continue;
            for (double edge : {lo[ax], hi[ax]})
            {
                if (std::abs(o[ax] - edge) > tol)
                    continue;
                const Vec2 n = orient * perp(dir);
                if ((cell.center() - o).dot(n) >= 0.0)
                    return;
                o[ax] = edge;
            }
        }
        if (clip_to_cell(o, dir, cell, t0, t1) && t1 - t0 > min_length)
            pieces.push_back({BoundaryPiece::Kind::Segment, o, dir, 0.0, t0, t1, orient});
    };

    if (const auto* hp = std::get_if<HalfPlane>(&shape_))
    {
        const Vec2 dir(-hp->normal.y(), hp->normal.x());
        add_segment(hp->offset * hp->normal, dir, -1e300, 1e300, 1.0);
    }
    else if (const auto* box = std::get_if<AxisBox>(&shape_))
    {
        const Vec2 w = box->hi - box->lo;
        add_segment(box->lo, Vec2(1, 0), 0.0, w.x(), orientation);
        add_segment(Vec2(box->hi.x(), box->lo.y()), Vec2(0, 1), 0.0, w.y(), orientation);
        add_segment(box->hi, Vec2(-1, 0), 0.0, w.x(), orientation);
        add_segment(Vec2(box->lo.x(), box->hi.y()), Vec2(0, -1), 0.0, w.y(), orientation);
    }
    else if (const auto* c = std::get_if<Circle>(&shape_))
    {
        const double r = c->radius;
        const Vec2 ctr = c->center;
        std::vector<double> angles;
        auto push_angle = [&](const Vec2& p) {
            double t = std::atan2(p.y() - ctr.y(), p.x() - ctr.x());
            if (t < 0.0)
                t += two_pi;
            angles.push_back(t);
        };
        for (int ax = 0; ax < 2; ++ax)
        {
            const int other = 1 - ax;
            for (double line : {lo[ax], hi[ax]})
            {
                const double d = line - ctr[ax];
                if (std::abs(d) >= r * (1.0 - tangent_tolerance))
                    continue;
                const double e = std::sqrt(std::max(0.0, r * r - d * d));
                for (double sgn : {-1.0, 1.0})
                {
                    Vec2 p;
                    p[ax] = line;
                    p[other] = ctr[other] + sgn * e;
                    if (p[other] >= lo[other] && p[other] <= hi[other])
                        push_angle(p);
                }
            }
        }
        std::sort(angles.begin(), angles.end());
        angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b) { return b - a < 1e-15; }),
                     angles.end());
        const double slack = 2.0 * tangent_tolerance * r;
        auto inside_cell = [&](const Vec2& p) {
            return p.x() >= lo.x() - slack && p.x() <= hi.x() + slack && p.y() >= lo.y() - slack &&
                   p.y() <= hi.y() + slack;
        };
        if (angles.empty())
        {
            // no crossings: the circle is either enclosed by the cell or only touches it
            if (inside_cell(ctr + Vec2(r, 0)) && inside_cell(ctr - Vec2(r, 0)) && inside_cell(ctr + Vec2(0, r)) &&
                inside_cell(ctr - Vec2(0, r)))
                pieces.push_back({BoundaryPiece::Kind::Arc, ctr, Vec2::Zero(), r, 0.0, two_pi, orientation});
        }
        else
        {
            const std::size_t n = angles.size();
            for (std::size_t i = 0; i < n; ++i)
            {
                const double t0 = angles[i];
                const double t1 = (i + 1 < n) ? angles[i + 1] : angles[0] + two_pi;
                if (r * (t1 - t0) <= min_length)
                    continue;
                const double tm = 0.5 * (t0 + t1);
                if (inside_cell(ctr + r * Vec2(std::cos(tm), std::sin(tm))))
                    pieces.push_back({BoundaryPiece::Kind::Arc, ctr, Vec2::Zero(), r, t0, t1, orientation});
            }
        }
    }
    return pieces;
}

CellClass classify_cell(const Cell& cell, const LevelSetDomain& domain)
{
    if (!(cell.size > 0.0))
        throw std::invalid_argument("cell side length must be positive");
    const bool comp = domain.complemented();
    const auto& shape = domain.shape();
    if (const auto* c = std::get_if<Circle>(&shape))
    {
        double dmax = 0.0;
        for (int k = 0; k < 4; ++k)
            dmax = std::max(dmax, (cell.corner(k) - c->center).norm());
        const Vec2 nearest = c->center.cwiseMax(cell.lo).cwiseMin(cell.hi());
        const double dmin = (nearest - c->center).norm();
        const bool ball_covers = dmax <= c->radius;
        // grid lines carry rounding; contact closer than this counts as tangent
        const bool disjoint = dmin >= c->radius * (1.0 - tangent_tolerance);
        if (comp)
            return disjoint ? CellClass::Inside : (ball_covers ? CellClass::Outside : CellClass::Cut);
        return ball_covers ? CellClass::Inside : (disjoint ? CellClass::Outside : CellClass::Cut);
    }
    if (const auto* b = std::get_if<AxisBox>(&shape))
    {
        const Vec2 olo = cell.lo.cwiseMax(b->lo), ohi = cell.hi().cwiseMin(b->hi);
        const bool no_overlap = (ohi.x() <= olo.x()) || (ohi.y() <= olo.y());
        const bool contained = (cell.lo.array() >= b->lo.array()).all() && (cell.hi().array() <= b->hi.array()).all();
        if (comp)
            return no_overlap ? CellClass::Inside : (contained ? CellClass::Outside : CellClass::Cut);
        return contained ? CellClass::Inside : (no_overlap ? CellClass::Outside : CellClass::Cut);
    }
    double vmin = 1e300, vmax = -1e300;
    for (int k = 0; k < 4; ++k)
    {
        const double v = domain.value(cell.corner(k));
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax <= 0.0)
        return CellClass::Inside;
    if (vmin >= 0.0)
        return CellClass::Outside;
    return CellClass::Cut;
}

QuadratureRule volume_quadrature(const Cell& cell, const LevelSetDomain& domain, int gauss_order,
                                 int subdivision_depth)
{
    if (gauss_order < 1 || gauss_order > max_gauss_points)
        throw std::invalid_argument("unsupported gauss order (must be 1..10)");
    if (subdivision_depth < 0)
        throw std::invalid_argument("subdivision depth must be nonnegative");
    QuadratureRule rule;
    const CellClass cls = classify_cell(cell, domain);
    if (cls == CellClass::Outside)
        return rule;
    if (cls == CellClass::Inside)
    {
        append_square_rule(rule, cell.lo, cell.size, gauss_order);
        return rule;
    }
    if (domain.is_convex_polygon())
    {
        std::vector<Vec2> poly{cell.corner(0), cell.corner(1), cell.corner(3), cell.corner(2)};
        if (const auto* hp = std::get_if<HalfPlane>(&domain.shape()))
            poly = clip_polygon(poly, {hp->normal, -hp->offset});
        else
        {
            const auto& b = std::get<AxisBox>(domain.shape());
            poly = clip_polygon(poly, {Vec2(-1, 0), b.lo.x()});
            poly = clip_polygon(poly, {Vec2(1, 0), -b.hi.x()});
            poly = clip_polygon(poly, {Vec2(0, -1), b.lo.y()});
            poly = clip_polygon(poly, {Vec2(0, 1), -b.hi.y()});
        }
        if (poly.size() >= 3)
            append_fan(rule, poly, triangle_points(gauss_order));
        return rule;
    }
    if (std::holds_alternative<Circle>(domain.shape()))
    {
        append_circle_cell(rule, cell, domain, gauss_order, subdivision_depth);
        return rule;
    }
    subdivide(rule, cell, domain, gauss_order, subdivision_depth);
    return rule;
}

QuadratureRule surface_quadrature(const Cell& cell, const LevelSetDomain& domain, int gauss_order)
{
    const auto& g = gauss_legendre(gauss_order);
    QuadratureRule rule;
    for (const auto& piece : domain.boundary_pieces(cell))
    {
        const double dt = piece.t1 - piece.t0;
        const double jac = piece.kind == BoundaryPiece::Kind::Arc ? piece.radius : 1.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
        {
            const double t = piece.t0 + dt * g.nodes[i];
            rule.points.push_back(piece.point(t));
            rule.weights.push_back(jac * dt * g.weights[i]);
            rule.normals.push_back(piece.normal(t));
        }
    }
    return rule;
}

double cut_area(const Cell& cell, const LevelSetDomain& domain, int subdivision_depth)
{
    return volume_quadrature(cell, domain, 2, subdivision_depth).total_weight();
}

} // namespace cutfem
