#include "slicesort/voxelops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <vector>

namespace slicesort {

namespace {

inline bool is_set(float x) { return x != 0.f; }

Volume blank_like(const Volume& v) {
    Volume out = v;
    std::fill(out.data.begin(), out.data.end(), 0.f);
    out.bit_depth = "uint8";
    return out;
}

struct Vec3 {
    double x, y, z;
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
};
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }

struct Facet {
    int a, b, c;
    Vec3 n;   // outward normal
    double d; // dot(n, vertex)
    std::vector<int> outside;
    bool alive = true;
    [[nodiscard]] double dist(const Vec3& p) const { return dot(n, p) - d; }
};

// Tiny deterministic offset per point index. Breaks lattice degeneracies
// (collinear/coplanar triples) without flipping any predicate that is
// nonzero in exact arithmetic: unperturbed distances are integers, and the
// perturbation shifts them by far less than 0.5.
constexpr double kJiggle = 1e-9;
inline Vec3 jiggled(const Vec3& p, std::size_t idx) {
    std::uint64_t s = 0x9e3779b97f4a7c15ULL * (idx + 1);
    auto next = [&s]() {
        s ^= s >> 12;
        s *= 0x2545f4914f6cdd1dULL;
        s ^= s << 25;
        s ^= s >> 27;
        return static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
    };
    return {p.x + kJiggle * next(), p.y + kJiggle * next(), p.z + kJiggle * next()};
}

// Quickhull over a full-rank, general-position point set.
std::vector<Facet> quickhull(const std::vector<Vec3>& pts, int i0, int i1, int i2, int i3) {
    std::vector<Facet> facets;
    const Vec3 centroid{(pts[i0].x + pts[i1].x + pts[i2].x + pts[i3].x) / 4.0,
                        (pts[i0].y + pts[i1].y + pts[i2].y + pts[i3].y) / 4.0,
                        (pts[i0].z + pts[i1].z + pts[i2].z + pts[i3].z) / 4.0};

    auto add_facet = [&](int a, int b, int c) {
        Facet f;
        f.a = a;
        f.b = b;
        f.c = c;
        f.n = cross(pts[b] - pts[a], pts[c] - pts[a]);
        f.d = dot(f.n, pts[a]);
        if (f.dist(centroid) > 0) { // orient outward
            std::swap(f.b, f.c);
            f.n = cross(pts[f.b] - pts[f.a], pts[f.c] - pts[f.a]);
            f.d = dot(f.n, pts[f.a]);
        }
        facets.push_back(std::move(f));
        return static_cast<int>(facets.size()) - 1;
    };

    add_facet(i0, i1, i2);
    add_facet(i0, i1, i3);
    add_facet(i0, i2, i3);
    add_facet(i1, i2, i3);

    // Initial outside sets: strictly-positive distance only.
    for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
        for (auto& f : facets) {
            if (f.dist(pts[p]) > 0) {
                f.outside.push_back(p);
                break;
            }
        }
    }

    while (true) {
        int fi = -1;
        for (int i = 0; i < static_cast<int>(facets.size()); ++i)
            if (facets[static_cast<std::size_t>(i)].alive && !facets[static_cast<std::size_t>(i)].outside.empty()) {
                fi = i;
                break;
            }
        if (fi < 0) break;

        Facet& f = facets[static_cast<std::size_t>(fi)];
        int far = f.outside[0];
        double best = f.dist(pts[static_cast<std::size_t>(far)]);
        for (int p : f.outside) {
            const double d = f.dist(pts[static_cast<std::size_t>(p)]);
            if (d > best) {
                best = d;
                far = p;
            }
        }
        const Vec3& fp = pts[static_cast<std::size_t>(far)];

        std::vector<int> visible;
        for (int i = 0; i < static_cast<int>(facets.size()); ++i)
            if (facets[static_cast<std::size_t>(i)].alive && facets[static_cast<std::size_t>(i)].dist(fp) > 0)
                visible.push_back(i);

        std::set<std::pair<int, int>> edges; // directed edges of visible facets
        std::vector<int> orphans;
        for (int i : visible) {
            Facet& vf = facets[static_cast<std::size_t>(i)];
            edges.insert({vf.a, vf.b});
            edges.insert({vf.b, vf.c});
            edges.insert({vf.c, vf.a});
            for (int p : vf.outside)
                if (p != far) orphans.push_back(p);
            vf.alive = false;
            vf.outside.clear();
        }

        std::vector<int> fresh;
        for (const auto& [u, v] : edges) {
            if (edges.count({v, u})) continue; // interior edge of the visible region
            fresh.push_back(add_facet(u, v, far));
        }
        for (int p : orphans) {
            for (int i : fresh) {
                Facet& nf = facets[static_cast<std::size_t>(i)];
                if (nf.dist(pts[static_cast<std::size_t>(p)]) > 0) {
                    nf.outside.push_back(p);
                    break;
                }
            }
        }
    }

    std::vector<Facet> live;
    for (auto& f : facets)
        if (f.alive) live.push_back(std::move(f));
    return live;
}

// 2D hull (monotone chain) in exact integer arithmetic, CCW, no collinear
// interior vertices dropped incorrectly for membership (<= keeps boundary).
std::vector<std::array<double, 2>> hull2d(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    auto crossz = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                     const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && crossz(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && crossz(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

bool inside_poly(const std::vector<std::array<double, 2>>& poly, double x, double y) {
    if (poly.empty()) return false;
    if (poly.size() == 1) return poly[0][0] == x && poly[0][1] == y;
    if (poly.size() == 2) {
        const double ux = poly[1][0] - poly[0][0], uy = poly[1][1] - poly[0][1];
        const double wx = x - poly[0][0], wy = y - poly[0][1];
        if (ux * wy - uy * wx != 0.0) return false;
        const double t = wx * ux + wy * uy;
        return t >= 0.0 && t <= ux * ux + uy * uy;
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        const double cz = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
        if (cz < 0.0) return false; // CCW polygon: inside is left of every edge
    }
    return true;
}

} // namespace

Volume largest_component(const Volume& binary) {
    binary.validate();
    const auto [d0, d1, d2] = std::tuple(binary.dims[0], binary.dims[1], binary.dims[2]);
    const std::int64_t n = binary.size();
    std::vector<char> visited(static_cast<std::size_t>(n), 0);

    std::int64_t best_start = -1, best_count = 0;
    std::vector<std::int64_t> best_voxels, voxels;

    for (std::int64_t start = 0; start < n; ++start) {
        if (visited[static_cast<std::size_t>(start)] || !is_set(binary.data[static_cast<std::size_t>(start)]))
            continue;
        voxels.clear();
        std::deque<std::int64_t> queue{start};
        visited[static_cast<std::size_t>(start)] = 1;
        while (!queue.empty()) {
            const std::int64_t cur = queue.front();
            queue.pop_front();
            voxels.push_back(cur);
            const std::int64_t i = cur / (d1 * d2);
            const std::int64_t j = (cur / d2) % d1;
            const std::int64_t k = cur % d2;
            const std::array<std::array<std::int64_t, 3>, 6> nbrs{{{i - 1, j, k},
                                                                   {i + 1, j, k},
                                                                   {i, j - 1, k},
                                                                   {i, j + 1, k},
                                                                   {i, j, k - 1},
                                                                   {i, j, k + 1}}};
            for (const auto& [ni, nj, nk] : nbrs) {
                if (ni < 0 || ni >= d0 || nj < 0 || nj >= d1 || nk < 0 || nk >= d2) continue;
                const std::int64_t lin = (ni * d1 + nj) * d2 + nk;
                if (visited[static_cast<std::size_t>(lin)] || !is_set(binary.data[static_cast<std::size_t>(lin)]))
                    continue;
                visited[static_cast<std::size_t>(lin)] = 1;
                queue.push_back(lin);
            }
        }
        // Components are discovered in increasing min-linear-index order, so
        // strictly-greater keeps the tie rule.
        if (static_cast<std::int64_t>(voxels.size()) > best_count) {
            best_count = static_cast<std::int64_t>(voxels.size());
            best_start = start;
            best_voxels = voxels;
        }
    }
    if (best_start < 0) throw data_error("largest_component: input mask is empty");

    Volume out = blank_like(binary);
    for (std::int64_t lin : best_voxels) out.data[static_cast<std::size_t>(lin)] = 1.f;
    return out;
}

CropBox tight_crop(const Volume& mask) {
    mask.validate();
    CropBox box;
    box.lo = {mask.dims[0], mask.dims[1], mask.dims[2]};
    box.hi = {0, 0, 0};
    bool any = false;
    for (std::int64_t i = 0; i < mask.dims[0]; ++i)
        for (std::int64_t j = 0; j < mask.dims[1]; ++j)
            for (std::int64_t k = 0; k < mask.dims[2]; ++k) {
                if (!is_set(mask.at(i, j, k))) continue;
                any = true;
                box.lo = {std::min(box.lo[0], i), std::min(box.lo[1], j), std::min(box.lo[2], k)};
                box.hi = {std::max(box.hi[0], i + 1), std::max(box.hi[1], j + 1),
                          std::max(box.hi[2], k + 1)};
            }
    if (!any) throw data_error("tight_crop: input mask is empty");
    return box;
}

Volume convex_hull_mask(const Volume& mask) {
    mask.validate();
    std::vector<Vec3> pts;
    for (std::int64_t i = 0; i < mask.dims[0]; ++i)
        for (std::int64_t j = 0; j < mask.dims[1]; ++j)
            for (std::int64_t k = 0; k < mask.dims[2]; ++k)
                if (is_set(mask.at(i, j, k)))
                    pts.push_back({static_cast<double>(i), static_cast<double>(j),
                                   static_cast<double>(k)});
    if (pts.empty()) throw data_error("convex_hull_mask: input mask is empty");

    Volume out = blank_like(mask);
    const CropBox box = tight_crop(mask);

    // Affine rank of the point set decides the hull dimensionality.
    int i1 = -1, i2 = -1, i3 = -1;
    for (std::size_t p = 1; p < pts.size(); ++p)
        if (norm2(pts[p] - pts[0]) > 0) {
            i1 = static_cast<int>(p);
            break;
        }
    if (i1 < 0) { // single point
        out.at(static_cast<std::int64_t>(pts[0].x), static_cast<std::int64_t>(pts[0].y),
               static_cast<std::int64_t>(pts[0].z)) = 1.f;
        return out;
    }
    const Vec3 dir = pts[static_cast<std::size_t>(i1)] - pts[0];
    for (std::size_t p = 0; p < pts.size(); ++p)
        if (norm2(cross(dir, pts[p] - pts[0])) > 0) {
            i2 = static_cast<int>(p);
            break;
        }

    if (i2 < 0) {
        // Collinear: rasterize the segment between extreme projections.
        double tmin = 0, tmax = 0;
        for (const auto& p : pts) {
            const double t = dot(p - pts[0], dir);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
        for (std::int64_t i = box.lo[0]; i < box.hi[0]; ++i)
            for (std::int64_t j = box.lo[1]; j < box.hi[1]; ++j)
                for (std::int64_t k = box.lo[2]; k < box.hi[2]; ++k) {
                    const Vec3 q{static_cast<double>(i), static_cast<double>(j),
                                 static_cast<double>(k)};
                    if (norm2(cross(dir, q - pts[0])) != 0.0) continue;
                    const double t = dot(q - pts[0], dir);
                    if (t >= tmin && t <= tmax) out.at(i, j, k) = 1.f;
                }
        return out;
    }

    const Vec3 pn = cross(dir, pts[static_cast<std::size_t>(i2)] - pts[0]);
    for (std::size_t p = 0; p < pts.size(); ++p)
        if (dot(pn, pts[p] - pts[0]) != 0.0) {
            i3 = static_cast<int>(p);
            break;
        }

    if (i3 < 0) {
        // Coplanar: 2D hull in the plane, projected onto the two axes least
        // aligned with the plane normal.
        int drop = 0;
        double amax = std::abs(pn.x);
        if (std::abs(pn.y) > amax) {
            drop = 1;
            amax = std::abs(pn.y);
        }
        if (std::abs(pn.z) > amax) drop = 2;
        auto project = [&](const Vec3& p) -> std::array<double, 2> {
            if (drop == 0) return {p.y, p.z};
            if (drop == 1) return {p.x, p.z};
            return {p.x, p.y};
        };
        std::vector<std::array<double, 2>> flat;
        flat.reserve(pts.size());
        for (const auto& p : pts) flat.push_back(project(p));
        const auto poly = hull2d(std::move(flat));
        for (std::int64_t i = box.lo[0]; i < box.hi[0]; ++i)
            for (std::int64_t j = box.lo[1]; j < box.hi[1]; ++j)
                for (std::int64_t k = box.lo[2]; k < box.hi[2]; ++k) {
                    const Vec3 q{static_cast<double>(i), static_cast<double>(j),
                                 static_cast<double>(k)};
                    if (dot(pn, q - pts[0]) != 0.0) continue;
                    const auto f = project(q);
                    if (inside_poly(poly, f[0], f[1])) out.at(i, j, k) = 1.f;
                }
        return out;
    }

    std::vector<Vec3> jpts(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) jpts[p] = jiggled(pts[p], p);
    const auto facets = quickhull(jpts, 0, i1, i2, i3);
    // Exact-distance classification: true outside points sit at integer
    // plane distance >= 1, boundary points at 0; the jiggle moves either by
    // far less than 0.5.
    for (std::int64_t i = box.lo[0]; i < box.hi[0]; ++i)
        for (std::int64_t j = box.lo[1]; j < box.hi[1]; ++j)
            for (std::int64_t k = box.lo[2]; k < box.hi[2]; ++k) {
                const Vec3 q{static_cast<double>(i), static_cast<double>(j),
                             static_cast<double>(k)};
                bool inside = true;
                for (const auto& f : facets)
                    if (f.dist(q) > 0.5) {
                        inside = false;
                        break;
                    }
                if (inside) out.at(i, j, k) = 1.f;
            }
    return out;
}

} // namespace slicesort
