#include "flowplan/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace flowplan::geom {

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    // Even-odd ray casting; boundary points count as inside within fp noise.
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool point_in_region(const Vec2& p, const std::vector<Polygon>& region) {
    for (const auto& poly : region)
        if (point_in_polygon(p, poly)) return true;
    return false;
}

namespace {

// Offset a polyline by +/- half width to build a road polygon.
Polygon ribbon_polygon(const std::vector<Vec2>& path, double half_width) {
    std::vector<Vec2> left, right;
    const size_t n = path.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 dir;
        if (i == 0)
            dir = path[1] - path[0];
        else if (i == n - 1)
            dir = path[n - 1] - path[n - 2];
        else
            dir = path[i + 1] - path[i - 1];
        double len = dir.norm();
        if (len < 1e-12) continue;
        Vec2 normal{-dir.y / len, dir.x / len};
        left.push_back(path[i] + normal * half_width);
        right.push_back(path[i] - normal * half_width);
    }
    Polygon poly = left;
    poly.insert(poly.end(), right.rbegin(), right.rend());
    return poly;
}

std::vector<Vec2> arc_points(Vec2 center, double radius, double a0, double a1, int steps) {
    std::vector<Vec2> pts;
    for (int i = 0; i <= steps; ++i) {
        double a = a0 + (a1 - a0) * i / steps;
        pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return pts;
}

void place_obstacles(Scenario& s, std::mt19937_64& rng, double width) {
    std::uniform_int_distribution<int> count_dist(0, 2);
    std::uniform_real_distribution<double> r_dist(0.4, 0.9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int count = count_dist(rng);
    double len = centerline_length(s.centerline);
    for (int i = 0; i < count; ++i) {
        double arc = (0.3 + 0.6 * u01(rng)) * len;
        Vec2 at = centerline_point_at(s.centerline, arc);
        Vec2 ahead = centerline_point_at(s.centerline, std::min(arc + 0.5, len));
        Vec2 dir = ahead - at;
        double dlen = dir.norm();
        if (dlen < 1e-9) dir = {1, 0}; else dir = dir * (1.0 / dlen);
        Vec2 normal{-dir.y, dir.x};
        double side = u01(rng) < 0.5 ? -1.0 : 1.0;
        // Park discs at the road edge so the centerline stays clear.
        double off = width / 2 + 0.2;
        s.obstacles.push_back({at + normal * (side * off), r_dist(rng)});
    }
}

}  // namespace

Scenario build_scenario(const ScenarioRecipe& recipe) {
    if (recipe.width <= 0.0) throw std::invalid_argument("scenario width must be positive");
    if (recipe.length <= 0.0) throw std::invalid_argument("scenario length must be positive");

    std::mt19937_64 rng(recipe.seed);
    Scenario s;
    const double hw = recipe.width / 2;

    switch (recipe.kind) {
        case RoadKind::Straight: {
            s.id = "straight_w" + std::to_string(recipe.width) + "_l" +
                   std::to_string(recipe.length) + "_s" + std::to_string(recipe.seed);
            s.drivable_region.push_back(
                {{0.0, -hw}, {recipe.length, -hw}, {recipe.length, hw}, {0.0, hw}});
            s.centerline = {{1.0, 0.0}, {recipe.length - 1.0, 0.0}};
            break;
        }
        case RoadKind::CurveLeft:
        case RoadKind::CurveRight: {
            const double sgn = recipe.kind == RoadKind::CurveLeft ? 1.0 : -1.0;
            s.id = (sgn > 0 ? "curve_left_w" : "curve_right_w") + std::to_string(recipe.width) +
                   "_r" + std::to_string(recipe.radius) + "_s" + std::to_string(recipe.seed);
            if (recipe.radius <= hw)
                throw std::invalid_argument("curve radius must exceed half the road width");
            const double lead = 10.0;
            std::vector<Vec2> path = {{-2.0, 0.0}, {lead, 0.0}};
            Vec2 center{lead, sgn * recipe.radius};
            auto arc = arc_points(center, recipe.radius, -sgn * M_PI / 2,
                                  -sgn * M_PI / 2 + sgn * M_PI / 2, 24);
            path.insert(path.end(), arc.begin() + 1, arc.end());
            // Short exit tangent after the quarter turn.
            Vec2 exit_dir{0.0, sgn};
            path.push_back(path.back() + exit_dir * 8.0);
            s.drivable_region.push_back(ribbon_polygon(path, hw));
            s.centerline.assign(path.begin() + 1, path.end());
            s.centerline.front() = {0.0, 0.0};
            // keep the endpoint strictly inside the ribbon
            s.centerline.back() = s.centerline.back() - exit_dir * 1.0;
            break;
        }
        case RoadKind::Intersection: {
            s.id = "intersection_w" + std::to_string(recipe.width) + "_l" +
                   std::to_string(recipe.length) + "_b" +
                   std::to_string(static_cast<int>(recipe.branch)) + "_s" +
                   std::to_string(recipe.seed);
            const double cx = recipe.length / 2;  // crossing center
            const double arm = recipe.length / 2;
            s.drivable_region.push_back(
                {{0.0, -hw}, {recipe.length, -hw}, {recipe.length, hw}, {0.0, hw}});
            s.drivable_region.push_back(
                {{cx - hw, -arm}, {cx + hw, -arm}, {cx + hw, arm}, {cx - hw, arm}});
            if (recipe.branch == Branch::Straight) {
                s.centerline = {{1.0, 0.0}, {recipe.length - 1.0, 0.0}};
            } else {
                const double sgn = recipe.branch == Branch::Left ? 1.0 : -1.0;
                const double r = hw;  // corner radius fits inside the junction
                std::vector<Vec2> path = {{1.0, 0.0}, {cx - r, 0.0}};
                Vec2 center{cx - r, sgn * r};
                auto arc = arc_points(center, r, -sgn * M_PI / 2, 0.0, 12);
                path.insert(path.end(), arc.begin() + 1, arc.end());
                path.push_back({cx, sgn * (arm - 1.0)});
                s.centerline = path;
            }
            break;
        }
    }

    place_obstacles(s, rng, recipe.width);
    return s;
}

BinaryRoadMask rasterize_road(const Scenario& scenario, double resolution,
                              const Vec2& min_corner, const Vec2& max_corner) {
    if (resolution <= 0.0) throw std::invalid_argument("resolution must be positive");
    int w = static_cast<int>(std::floor((max_corner.x - min_corner.x) / resolution));
    int h = static_cast<int>(std::floor((max_corner.y - min_corner.y) / resolution));
    if (w * h < 4) throw std::invalid_argument("resolution too coarse: fewer than 4 cells");

    BinaryRoadMask mask;
    mask.width = w;
    mask.height = h;
    mask.resolution = resolution;
    mask.origin = {min_corner.x + resolution / 2, min_corner.y + resolution / 2};
    mask.cells.assign(static_cast<size_t>(w) * h, 0);
    bool any = false;
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            Vec2 c{mask.origin.x + ix * resolution, mask.origin.y + iy * resolution};
            if (point_in_region(c, scenario.drivable_region)) {
                mask.cells[static_cast<size_t>(iy) * w + ix] = 1;
                any = true;
            }
        }
    }
    if (!any) throw std::invalid_argument("road mask has no drivable cells");
    return mask;
}

BinaryRoadMask rasterize_road(const Scenario& scenario, double resolution) {
    return rasterize_road(scenario, resolution, {-8.0, -32.0}, {72.0, 32.0});
}

namespace {

// Felzenszwalb-Huttenlocher exact 1D squared distance transform.
void dt_1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (double)(q - v[k]) + f[v[k]];
    }
}

// Squared distance (in cells) from every cell to the nearest seed cell.
std::vector<double> edt_squared(const BinaryRoadMask& mask, bool seed_value) {
    const int w = mask.width, h = mask.height;
    const double INF = 1e18;
    std::vector<double> g(static_cast<size_t>(w) * h);
    // columns
    std::vector<double> f(h), d(h);
    for (int ix = 0; ix < w; ++ix) {
        for (int iy = 0; iy < h; ++iy)
            f[iy] = mask.at(ix, iy) == seed_value ? 0.0 : INF;
        dt_1d(f, d);
        for (int iy = 0; iy < h; ++iy) g[static_cast<size_t>(iy) * w + ix] = d[iy];
    }
    // rows
    std::vector<double> fr(w), dr(w);
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) fr[ix] = g[static_cast<size_t>(iy) * w + ix];
        dt_1d(fr, dr);
        for (int ix = 0; ix < w; ++ix) g[static_cast<size_t>(iy) * w + ix] = dr[ix];
    }
    return g;
}

}  // namespace

SignedDistanceField compute_esdf(const BinaryRoadMask& mask) {
    bool any_true = false, any_false = false;
    for (auto c : mask.cells) (c ? any_true : any_false) = true;
    if (!any_true || !any_false)
        throw std::invalid_argument("degenerate mask: all cells share one class");

    auto d_to_true = edt_squared(mask, true);
    auto d_to_false = edt_squared(mask, false);

    SignedDistanceField field;
    field.width = mask.width;
    field.height = mask.height;
    field.origin = mask.origin;
    field.resolution = mask.resolution;
    field.cells.resize(mask.cells.size());
    for (size_t i = 0; i < mask.cells.size(); ++i) {
        double d2 = mask.cells[i] ? d_to_false[i] : d_to_true[i];
        double d = std::sqrt(d2) * mask.resolution;
        field.cells[i] = mask.cells[i] ? d : -d;
    }
    return field;
}

EsdfSample esdf_at(const SignedDistanceField& field, const Vec2& p) {
    double u = (p.x - field.origin.x) / field.resolution;
    double v = (p.y - field.origin.y) / field.resolution;
    EsdfSample out;
    double uc = std::clamp(u, 0.0, double(field.width - 1));
    double vc = std::clamp(v, 0.0, double(field.height - 1));
    out.clamped = (uc != u) || (vc != v);
    int i0 = std::min(static_cast<int>(std::floor(uc)), field.width - 2);
    int j0 = std::min(static_cast<int>(std::floor(vc)), field.height - 2);
    i0 = std::max(i0, 0);
    j0 = std::max(j0, 0);
    double fu = uc - i0;
    double fv = vc - j0;
    double v00 = field.at(i0, j0), v10 = field.at(i0 + 1, j0);
    double v01 = field.at(i0, j0 + 1), v11 = field.at(i0 + 1, j0 + 1);
    out.value = (1 - fu) * (1 - fv) * v00 + fu * (1 - fv) * v10 + (1 - fu) * fv * v01 +
                fu * fv * v11;
    return out;
}

bool dac_compliant(const std::vector<Vec2>& waypoints, const SignedDistanceField& field) {
    for (const auto& w : waypoints) {
        EsdfSample s = esdf_at(field, w);
        if (s.clamped || s.value < 0.0) return false;
    }
    return true;
}

double centerline_length(const std::vector<Vec2>& centerline) {
    double len = 0.0;
    for (size_t i = 1; i < centerline.size(); ++i)
        len += (centerline[i] - centerline[i - 1]).norm();
    return len;
}

double project_onto_centerline(const std::vector<Vec2>& centerline, const Vec2& p) {
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    double s_base = 0.0;
    for (size_t i = 1; i < centerline.size(); ++i) {
        Vec2 a = centerline[i - 1], b = centerline[i];
        Vec2 ab = b - a;
        double len2 = ab.dot(ab);
        double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        Vec2 q = a + ab * t;
        double d2 = (p - q).dot(p - q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_s = s_base + t * std::sqrt(len2);
        }
        s_base += std::sqrt(len2);
    }
    return best_s;
}

Vec2 centerline_point_at(const std::vector<Vec2>& centerline, double s) {
    if (s <= 0.0) return centerline.front();
    double s_base = 0.0;
    for (size_t i = 1; i < centerline.size(); ++i) {
        double seg = (centerline[i] - centerline[i - 1]).norm();
        if (s_base + seg >= s && seg > 0) {
            double t = (s - s_base) / seg;
            return centerline[i - 1] + (centerline[i] - centerline[i - 1]) * t;
        }
        s_base += seg;
    }
    return centerline.back();
}

double ep_score(const std::vector<Vec2>& waypoints, const Scenario& scenario,
                double max_progress_cap) {
    double len = centerline_length(scenario.centerline);
    if (len <= 0.0) throw std::invalid_argument("centerline has zero arc length");
    double ref = std::min(len, max_progress_cap);
    double s = project_onto_centerline(scenario.centerline, waypoints.back());
    return std::clamp(s / ref, 0.0, 1.0);
}

}  // namespace flowplan::geom
