#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowplan::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const;
};

using Polygon = std::vector<Vec2>;  // simple polygon, implicitly closed

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

// Synthetic scene in ego frame: x forward, y left, origin at the ego rear
// axle. Stands in for perceived road geometry.
struct Scenario {
    std::vector<Polygon> drivable_region;
    std::vector<Vec2> centerline;
    std::vector<Disc> obstacles;
    std::string id;
};

enum class RoadKind { Straight, CurveLeft, CurveRight, Intersection };

// Route branch through an intersection; ignored by the other generators.
enum class Branch { Left, Straight, Right };

struct ScenarioRecipe {
    RoadKind kind = RoadKind::Straight;
    double width = 6.0;    // meters
    double length = 60.0;  // meters, along the route
    double radius = 20.0;  // curve generators only
    Branch branch = Branch::Straight;
    std::uint64_t seed = 0;
};

struct BinaryRoadMask {
    int width = 0;   // cells along x
    int height = 0;  // cells along y
    Vec2 origin;     // metric position of cell (0,0) center
    double resolution = 0.0;
    std::vector<std::uint8_t> cells;  // row-major, index = iy * width + ix

    bool at(int ix, int iy) const { return cells[static_cast<size_t>(iy) * width + ix] != 0; }
};

// Positive inside the drivable area, negative outside; meters.
struct SignedDistanceField {
    int width = 0;
    int height = 0;
    Vec2 origin;
    double resolution = 0.0;
    std::vector<double> cells;

    double at(int ix, int iy) const { return cells[static_cast<size_t>(iy) * width + ix]; }
};

struct EsdfSample {
    double value = 0.0;
    bool clamped = false;  // query fell outside the grid extent
};

bool point_in_polygon(const Vec2& p, const Polygon& poly);
bool point_in_region(const Vec2& p, const std::vector<Polygon>& region);

Scenario build_scenario(const ScenarioRecipe& recipe);

BinaryRoadMask rasterize_road(const Scenario& scenario, double resolution);

// Same grid with explicit extent; cell (0,0) center sits at min + res/2.
BinaryRoadMask rasterize_road(const Scenario& scenario, double resolution,
                              const Vec2& min_corner, const Vec2& max_corner);

SignedDistanceField compute_esdf(const BinaryRoadMask& mask);

EsdfSample esdf_at(const SignedDistanceField& field, const Vec2& p);

bool dac_compliant(const std::vector<Vec2>& waypoints, const SignedDistanceField& field);

double centerline_length(const std::vector<Vec2>& centerline);

// Arc-length position of the closest centerline point to p.
double project_onto_centerline(const std::vector<Vec2>& centerline, const Vec2& p);

// Interpolate the centerline at arc length s (clamped to its extent).
Vec2 centerline_point_at(const std::vector<Vec2>& centerline, double s);

// Endpoint progress along the route, normalized by min(route length, cap).
double ep_score(const std::vector<Vec2>& waypoints, const Scenario& scenario,
                double max_progress_cap = 60.0);

}  // namespace flowplan::geom
