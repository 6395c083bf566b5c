#pragma once

#include <array>
#include <string>
#include <vector>

#include "hypermesh/array.hpp"

namespace hypermesh {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    Vec3 normalized() const;
};

struct Aabb {
    Vec3 lo, hi;
    bool overlaps(const Aabb& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y && lo.z <= o.hi.z &&
               o.lo.z <= hi.z;
    }
};

/// Triangle mesh in meters with designated keypoint ("joint") vertices.
struct Mesh {
    Array vertices;  // n x 3
    std::vector<std::array<int, 3>> faces;
    std::vector<int> keypoints;

    int vertex_count() const { return vertices.rows; }
    Vec3 vertex(int i) const { return {vertices.at(i, 0), vertices.at(i, 1), vertices.at(i, 2)}; }
    Array keypoint_rows() const;
    Aabb bounds() const;
    Vec3 centroid() const;
    void translate(const Vec3& d);

    /// Rejects out-of-range face indices, degenerate triangles, and duplicate keypoints.
    void validate() const;
};

/// Geodesic icosphere: subdiv s has 10*4^s + 2 vertices. Watertight by construction.
Mesh make_icosphere(int subdivisions, double radius);

/// Unit direction of template vertex i of the icosphere (useful for axis-aligned fixtures).
Vec3 icosphere_vertex_direction(int i);

void scale_axes(Mesh& m, double ax, double ay, double az);

/// ASCII OBJ ("v x y z" / "f i j k", 1-based).
void write_obj(const Mesh& m, const std::string& path);

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Parity test along +x from a slightly jittered origin; expects a watertight mesh.
bool point_inside_mesh(const Vec3& p, const Mesh& m);

/// Distance from p to the nearest triangle of m.
double distance_to_surface(const Vec3& p, const Mesh& m);

}  // namespace hypermesh
