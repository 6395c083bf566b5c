#include "hypermesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace hypermesh {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
}

Array Mesh::keypoint_rows() const {
    Array out(static_cast<int>(keypoints.size()), 3);
    for (size_t i = 0; i < keypoints.size(); ++i) {
        for (int j = 0; j < 3; ++j) out.at(static_cast<int>(i), j) = vertices.at(keypoints[i], j);
    }
    return out;
}

Aabb Mesh::bounds() const {
    Aabb b;
    b.lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    b.hi = {-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
            -std::numeric_limits<double>::max()};
    for (int i = 0; i < vertices.rows; ++i) {
        const Vec3 v = vertex(i);
        b.lo.x = std::min(b.lo.x, v.x);
        b.lo.y = std::min(b.lo.y, v.y);
        b.lo.z = std::min(b.lo.z, v.z);
        b.hi.x = std::max(b.hi.x, v.x);
        b.hi.y = std::max(b.hi.y, v.y);
        b.hi.z = std::max(b.hi.z, v.z);
    }
    return b;
}

Vec3 Mesh::centroid() const {
    Vec3 c;
    for (int i = 0; i < vertices.rows; ++i) c = c + vertex(i);
    return c * (1.0 / vertices.rows);
}

void Mesh::translate(const Vec3& d) {
    for (int i = 0; i < vertices.rows; ++i) {
        vertices.at(i, 0) += d.x;
        vertices.at(i, 1) += d.y;
        vertices.at(i, 2) += d.z;
    }
}

void Mesh::validate() const {
    if (vertices.cols != 3) throw std::invalid_argument("Mesh: vertices must be n x 3");
    for (size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        for (int idx : face) {
            if (idx < 0 || idx >= vertices.rows) {
                throw std::invalid_argument("Mesh: face " + std::to_string(f) + " references vertex " +
                                            std::to_string(idx));
            }
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw std::invalid_argument("Mesh: face " + std::to_string(f) + " is degenerate (repeated vertex)");
        }
        const Vec3 a = vertex(face[0]), b = vertex(face[1]), c = vertex(face[2]);
        if ((b - a).cross(c - a).norm() < 1e-18) {
            throw std::invalid_argument("Mesh: face " + std::to_string(f) + " has near-zero area");
        }
    }
    std::set<int> seen;
    for (int kp : keypoints) {
        if (kp < 0 || kp >= vertices.rows) throw std::invalid_argument("Mesh: keypoint index out of range");
        if (!seen.insert(kp).second) throw std::invalid_argument("Mesh: duplicate keypoint index");
    }
}

namespace {

// Icosahedron with vertices on the unit sphere.
const double PHI = (1.0 + std::sqrt(5.0)) / 2.0;

const double ICO_RAW[12][3] = {{-1, PHI, 0}, {1, PHI, 0},   {-1, -PHI, 0}, {1, -PHI, 0},
                               {0, -1, PHI}, {0, 1, PHI},   {0, -1, -PHI}, {0, 1, -PHI},
                               {PHI, 0, -1}, {PHI, 0, 1},   {-PHI, 0, -1}, {-PHI, 0, 1}};

const int ICO_FACES[20][3] = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

}  // namespace

Vec3 icosphere_vertex_direction(int i) {
    if (i < 0 || i >= 12) throw std::invalid_argument("icosphere_vertex_direction: index must be in [0,12)");
    return Vec3{ICO_RAW[i][0], ICO_RAW[i][1], ICO_RAW[i][2]}.normalized();
}

Mesh make_icosphere(int subdivisions, double radius) {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    for (const auto& r : ICO_RAW) verts.push_back(Vec3{r[0], r[1], r[2]}.normalized());
    for (const auto& f : ICO_FACES) faces.push_back({f[0], f[1], f[2]});

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    Mesh m;
    m.vertices = Array(static_cast<int>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) {
        m.vertices.at(static_cast<int>(i), 0) = verts[i].x * radius;
        m.vertices.at(static_cast<int>(i), 1) = verts[i].y * radius;
        m.vertices.at(static_cast<int>(i), 2) = verts[i].z * radius;
    }
    m.faces = std::move(faces);
    return m;
}

void scale_axes(Mesh& m, double ax, double ay, double az) {
    for (int i = 0; i < m.vertices.rows; ++i) {
        m.vertices.at(i, 0) *= ax;
        m.vertices.at(i, 1) *= ay;
        m.vertices.at(i, 2) *= az;
    }
}

void write_obj(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_obj: cannot open " + path);
    char buf[128];
    for (int i = 0; i < m.vertices.rows; ++i) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", m.vertices.at(i, 0), m.vertices.at(i, 1),
                      m.vertices.at(i, 2));
        out << buf;
    }
    for (const auto& f : m.faces) {
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    }
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, closest point on triangle
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + ab * v + ac * w)).norm();
}

namespace {

// crossings of the ray p + t*(1,0,0), t > 0, against one triangle
bool ray_x_hits_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Moller-Trumbore specialized to direction (1,0,0)
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 h{0.0, -e2.z, e2.y};  // dir x e2
    const double det = e1.dot(h);
    if (std::fabs(det) < 1e-18) return false;
    const double inv = 1.0 / det;
    const Vec3 s = p - a;
    const double u = s.dot(h) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = s.cross(e1);
    const double v = q.x;  // dir . q with dir = (1,0,0)
    const double vv = v * inv;
    if (vv < 0.0 || u + vv > 1.0) return false;
    const double tt = e2.dot(q) * inv;
    return tt > 1e-15;
}

}  // namespace

bool point_inside_mesh(const Vec3& p, const Mesh& m) {
    // fixed jitter dodges rays that graze edges or vertices exactly
    const Vec3 o{p.x + 1e-9, p.y + 1.3e-9, p.z + 1.7e-9};
    int crossings = 0;
    for (const auto& f : m.faces) {
        if (ray_x_hits_triangle(o, m.vertex(f[0]), m.vertex(f[1]), m.vertex(f[2]))) ++crossings;
    }
    return (crossings % 2) == 1;
}

double distance_to_surface(const Vec3& p, const Mesh& m) {
    double best = std::numeric_limits<double>::max();
    for (const auto& f : m.faces) {
        best = std::min(best, point_triangle_distance(p, m.vertex(f[0]), m.vertex(f[1]), m.vertex(f[2])));
    }
    return best;
}

}  // namespace hypermesh
