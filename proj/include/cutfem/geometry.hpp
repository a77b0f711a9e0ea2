#pragma once

#include "cutfem/quadrature.hpp"

#include <Eigen/Geometry>

#include <optional>
#include <variant>
#include <vector>

namespace cutfem {

struct Circle
{
    Vec2 center;
    double radius;
};

struct AxisBox
{
    Vec2 lo;
    Vec2 hi;
};

/// {x : normal . x < offset}
struct HalfPlane
{
    Vec2 normal;
    double offset;
};

/// Closed axis-aligned square [lo, lo + size]^2.
struct Cell
{
    Vec2 lo;
    double size;

    Vec2 hi() const { return lo + Vec2::Constant(size); }
    Vec2 center() const { return lo + Vec2::Constant(0.5 * size); }
    Vec2 corner(int k) const { return lo + size * Vec2(k & 1, (k >> 1) & 1); }
};

enum class CellClass { Inside, Outside, Cut };

/// A straight or circular piece of {phi = 0}, parametrized by t in [t0, t1].
struct BoundaryPiece
{
    enum class Kind { Segment, Arc } kind;
    // Segment: origin + t * direction (unit direction, t is arc length)
    // Arc: center + radius * (cos t, sin t)
    Vec2 origin;
    Vec2 direction;
    double radius = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    // outward normal sign relative to the geometric normal of the piece
    double orientation = 1.0;

    double length() const { return kind == Kind::Arc ? radius * (t1 - t0) : (t1 - t0); }
    Vec2 point(double t) const;
    Vec2 normal(double t) const;
};

/// Implicit domain {phi < 0} for a circle, an axis-aligned box or a half-plane,
/// optionally complemented. Every shape carries an exact boundary parametrization.
class LevelSetDomain
{
public:
    using Shape = std::variant<Circle, AxisBox, HalfPlane>;

    static LevelSetDomain circle(const Vec2& center, double radius);
    static LevelSetDomain axis_box(const Vec2& lo, const Vec2& hi);
    static LevelSetDomain half_plane(const Vec2& normal, double offset);

    /// Interior of the complement; the boundary is shared, normals flip.
    LevelSetDomain complement() const;

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    Vec2 normal(const Vec2& x) const { return gradient(x).normalized(); }
    bool contains(const Vec2& x) const { return value(x) < 0.0; }

    const Shape& shape() const { return shape_; }
    bool complemented() const { return complemented_; }

    /// Bounding box of the domain; empty optional for unbounded domains.
    std::optional<Eigen::AlignedBox2d> bounding_box() const;

    /// Convex polygonal domains are clipped exactly and never need subdivision.
    bool is_convex_polygon() const;

    /// Pieces of the zero set inside the closed cell, with positive length.
    std::vector<BoundaryPiece> boundary_pieces(const Cell& cell) const;

    /// Point on the segment [a, b] where phi changes sign (phi(a) < 0 <= phi(b) or vice versa).
    Vec2 segment_root(const Vec2& a, const Vec2& b) const;

private:
    LevelSetDomain(Shape shape, bool complemented) : shape_(std::move(shape)), complemented_(complemented) {}

    Shape shape_;
    bool complemented_ = false;
};

CellClass classify_cell(const Cell& cell, const LevelSetDomain& domain);

/// Quadrature on cell ∩ domain. Curved boundaries are resolved by a quadtree of
/// the given depth, then linearly clipped and sub-triangulated.
QuadratureRule volume_quadrature(const Cell& cell, const LevelSetDomain& domain, int gauss_order,
                                 int subdivision_depth);

/// Quadrature on cell ∩ {phi = 0} with outward unit normals; empty when the
/// intersection has zero length.
QuadratureRule surface_quadrature(const Cell& cell, const LevelSetDomain& domain, int gauss_order);

/// |cell ∩ domain| using volume_quadrature.
double cut_area(const Cell& cell, const LevelSetDomain& domain, int subdivision_depth);

} // namespace cutfem
