#include "casimir/paa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

void PaaQuadSpec::validate() const {
    if (surface_refine < 0 || z_nodes < 2 || xi_nodes < 2)
        throw input_error("PaaQuadSpec: node counts must be >= 2");
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw input_error("PaaQuadSpec: rel_tol must lie in (0, 1)");
}

double pair_kernel(const DielectricModel& model, double r, int xi_nodes) {
    if (!(r > 0.0)) throw input_error("pair_kernel: r must be > 0");
    if (xi_nodes < 2) throw input_error("pair_kernel: xi_nodes must be >= 2");
    model.validate();
    const double c = constants.c;
    const auto rule = gauss_rule(xi_nodes);
    const double scale = c / (2.0 * r);
    const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2, r5 = r4 * r, r6 = r4 * r2;
    double sum = 0.0;
    for (int i = 0; i < xi_nodes; ++i) {
        const auto [xi, jac] = map_to_halfline(XiTransform::Rational, scale, rule->x[i]);
        const double f = cm_factor(model, xi);
        const double q = xi / c;
        const double bracket =
            3.0 / r6 + q * 6.0 / r5 + q * q * 5.0 / r4 + q * q * q * 2.0 / r3 + q * q * q * q / r2;
        sum += rule->w[i] * jac * f * f * bracket * std::exp(-2.0 * q * r);
    }
    const double pref = constants.hbar / pi * (3.0 / (4.0 * pi)) * (3.0 / (4.0 * pi));
    return pref * sum;
}

// ---------------------------------------------------------------------------
// cached kernels

namespace {

struct LogTable {
    // Hermite interpolation of y(x) on a uniform grid, linear extrapolation.
    static void slopes(const std::vector<double>& x, const std::vector<double>& y,
                       std::vector<double>& m) {
        const std::size_t n = x.size();
        const double h = x[1] - x[0];
        m.resize(n);
        m[0] = (y[1] - y[0]) / h;
        m[n - 1] = (y[n - 1] - y[n - 2]) / h;
        for (std::size_t i = 1; i + 1 < n; ++i) m[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
    }
    static double eval(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& m, double xq) {
        const std::size_t n = x.size();
        const double h = x[1] - x[0];
        if (xq <= x.front()) return y.front() + m.front() * (xq - x.front());
        if (xq >= x.back()) return y.back() + m.back() * (xq - x.back());
        const std::size_t i =
            std::min(static_cast<std::size_t>((xq - x.front()) / h), n - 2);
        const double t = (xq - x[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * m[i] +
               (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * m[i + 1];
    }
};

constexpr int kKernelTablePoints = 1024;
constexpr double kKernelRMin = 5e-11;
constexpr double kKernelRMax = 6e-5;

} // namespace

PaaContext::PaaContext(const DielectricModel& model, double thickness, const PaaQuadSpec& quad)
    : thickness_(thickness) {
    quad.validate();
    model.validate();
    if (!(thickness > 0.0)) throw input_error("PaaContext: thickness must be > 0");

    // vacuum-like models have no dispersion interaction at all
    bool all_zero = true;
    for (double xi : {1e12, 1e14, 1e16}) {
        if (cm_factor(model, xi) > 0.0) all_zero = false;
    }
    if (all_zero) {
        zero_ = true;
        return;
    }

    kx_.resize(kKernelTablePoints);
    ky_.resize(kKernelTablePoints);
    const double lx0 = std::log(kKernelRMin);
    const double lh = (std::log(kKernelRMax) - lx0) / (kKernelTablePoints - 1);
    for (int i = 0; i < kKernelTablePoints; ++i) {
        kx_[i] = lx0 + i * lh;
        ky_[i] = std::log(pair_kernel(model, std::exp(kx_[i]), quad.xi_nodes));
    }
    LogTable::slopes(kx_, ky_, km_);

    // column kernel on the same log range, z integral on a sinh-stretched axis
    const auto rule = gauss_rule(quad.z_nodes);
    wx_.resize(kKernelTablePoints);
    wy_.resize(kKernelTablePoints);
    for (int i = 0; i < kKernelTablePoints; ++i) {
        wx_[i] = lx0 + i * lh;
        const double rho = std::exp(wx_[i]);
        const double umax = std::asinh(thickness_ / rho);
        double sum = 0.0;
        for (int j = 0; j < quad.z_nodes; ++j) {
            const double u = umax * rule->x[j];
            const double z = rho * std::sinh(u);
            const double rr = rho * std::cosh(u);
            sum += rule->w[j] * umax * (thickness_ - z) * kernel(rr) * rho * std::cosh(u);
        }
        wy_[i] = std::log(2.0 * sum);
    }
    LogTable::slopes(wx_, wy_, wm_);
}

double PaaContext::kernel(double r) const {
    if (zero_) return 0.0;
    return std::exp(LogTable::eval(kx_, ky_, km_, std::log(r)));
}

double PaaContext::column_kernel(double rho) const {
    if (zero_) return 0.0;
    return std::exp(LogTable::eval(wx_, wy_, wm_, std::log(rho)));
}

// ---------------------------------------------------------------------------
// spatial integration

namespace {

struct Tri {
    Vec2 a, b, c;
    Vec2 centroid() const { return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0}; }
    double area() const {
        return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    }
    double radius() const {
        const Vec2 g = centroid();
        const double ra = std::hypot(a.x - g.x, a.y - g.y);
        const double rb = std::hypot(b.x - g.x, b.y - g.y);
        const double rc = std::hypot(c.x - g.x, c.y - g.y);
        return std::max(ra, std::max(rb, rc));
    }
};

double tri_cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool point_in_tri(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d1 = tri_cross(a, b, p);
    const double d2 = tri_cross(b, c, p);
    const double d3 = tri_cross(c, a, p);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

// Ear clipping on a CCW simple polygon.
std::vector<Tri> triangulate(const std::vector<Vec2>& poly) {
    std::vector<int> idx(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<Tri> tris;
    int guard = 0;
    while (idx.size() > 3) {
        const int n = static_cast<int>(idx.size());
        bool clipped = false;
        for (int i = 0; i < n; ++i) {
            const Vec2& prev = poly[idx[(i + n - 1) % n]];
            const Vec2& cur = poly[idx[i]];
            const Vec2& next = poly[idx[(i + 1) % n]];
            const double turn = tri_cross(prev, cur, next);
            if (turn < 0.0) continue; // reflex
            bool blocked = false;
            if (turn > 0.0) {
                for (int j = 0; j < n && !blocked; ++j) {
                    if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                    if (point_in_tri(poly[idx[j]], prev, cur, next)) blocked = true;
                }
            }
            if (blocked) continue;
            if (turn > 0.0) tris.push_back({prev, cur, next});
            idx.erase(idx.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped) {
            if (++guard > 2) throw input_error("triangulate: no ear found (degenerate polygon)");
            // numeric stalemate fallback: drop the flattest corner
            int best = 0;
            double best_turn = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                const double t = std::abs(tri_cross(poly[idx[(i + n - 1) % n]], poly[idx[i]],
                                                    poly[idx[(i + 1) % n]]));
                if (t < best_turn) {
                    best_turn = t;
                    best = i;
                }
            }
            idx.erase(idx.begin() + best);
        }
    }
    Tri last{poly[idx[0]], poly[idx[1]], poly[idx[2]]};
    if (last.area() > 0.0) tris.push_back(last);
    return tris;
}

void refine_to_size(const Tri& t, double target_radius, std::vector<Tri>& out) {
    if (t.radius() <= target_radius) {
        out.push_back(t);
        return;
    }
    const Vec2 ab{0.5 * (t.a.x + t.b.x), 0.5 * (t.a.y + t.b.y)};
    const Vec2 bc{0.5 * (t.b.x + t.c.x), 0.5 * (t.b.y + t.c.y)};
    const Vec2 ca{0.5 * (t.c.x + t.a.x), 0.5 * (t.c.y + t.a.y)};
    refine_to_size({t.a, ab, ca}, target_radius, out);
    refine_to_size({ab, t.b, bc}, target_radius, out);
    refine_to_size({ca, bc, t.c}, target_radius, out);
    refine_to_size({ab, bc, ca}, target_radius, out);
}

// Drops vertices whose removal moves the boundary by at most tol. Digitized
// cells carry hundreds of sub-nanometre-collinear vertices that would blow
// up the pair count without changing the facing-gap physics.
std::vector<Vec2> simplify_ring(std::vector<Vec2> v, double tol) {
    auto chord_dist = [](const Vec2& p, const Vec2& a, const Vec2& b) {
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(a.x + t * dx - p.x, a.y + t * dy - p.y);
    };
    bool changed = true;
    while (changed && v.size() > 16) {
        changed = false;
        std::vector<Vec2> kept;
        kept.reserve(v.size());
        const std::size_t n = v.size();
        std::size_t i = 0;
        while (i < n) {
            kept.push_back(v[i]);
            if (i + 2 < n && chord_dist(v[i + 1], v[i], v[i + 2]) <= tol) {
                i += 2;
                changed = true;
            } else {
                ++i;
            }
        }
        v = std::move(kept);
    }
    return v;
}

// Base meshes are refined towards period / 2^(refine+1); digitized cells
// whose ear triangles are already below the target stay as they are.
std::vector<Tri> mesh_polygon(const PolygonUnitCell& cell, int refine) {
    std::vector<Tri> base = triangulate(simplify_ring(cell.vertices(), 1e-9));
    const double target = cell.period() / std::pow(2.0, refine + 1);
    std::vector<Tri> out;
    out.reserve(base.size() * 4);
    for (const Tri& t : base) refine_to_size(t, target, out);
    return out;
}

// degree-5 rule, 7 points, barycentric
struct TriRule {
    double l1, l2, l3, w;
};
constexpr TriRule kTriRule[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
};

double gauss_pair(const Tri& A, const Tri& B, const PaaContext& ctx) {
    const double wa = A.area(), wb = B.area();
    double sum = 0.0;
    for (const TriRule& ra : kTriRule) {
        const double ax = ra.l1 * A.a.x + ra.l2 * A.b.x + ra.l3 * A.c.x;
        const double ay = ra.l1 * A.a.y + ra.l2 * A.b.y + ra.l3 * A.c.y;
        for (const TriRule& rb : kTriRule) {
            const double bx = rb.l1 * B.a.x + rb.l2 * B.b.x + rb.l3 * B.c.x;
            const double by = rb.l1 * B.a.y + rb.l2 * B.b.y + rb.l3 * B.c.y;
            sum += ra.w * rb.w * ctx.column_kernel(std::hypot(ax - bx, ay - by));
        }
    }
    return wa * wb * sum;
}

void split4(const Tri& t, Tri out[4]) {
    const Vec2 ab{0.5 * (t.a.x + t.b.x), 0.5 * (t.a.y + t.b.y)};
    const Vec2 bc{0.5 * (t.b.x + t.c.x), 0.5 * (t.b.y + t.c.y)};
    const Vec2 ca{0.5 * (t.c.x + t.a.x), 0.5 * (t.c.y + t.a.y)};
    out[0] = {t.a, ab, ca};
    out[1] = {ab, t.b, bc};
    out[2] = {ca, bc, t.c};
    out[3] = {ab, bc, ca};
}

double adaptive_pair(const Tri& A, const Tri& B, const PaaContext& ctx, double theta,
                     int depth) {
    const double ra = A.radius(), rb = B.radius();
    const Vec2 ga = A.centroid(), gb = B.centroid();
    const double gap = std::hypot(ga.x - gb.x, ga.y - gb.y) - ra - rb;
    if (depth <= 0 || (gap > 0.0 && ra + rb <= theta * gap)) return gauss_pair(A, B, ctx);
    Tri kids[4];
    double sum = 0.0;
    if (ra >= rb) {
        split4(A, kids);
        for (const Tri& k : kids) sum += adaptive_pair(k, B, ctx, theta, depth - 1);
    } else {
        split4(B, kids);
        for (const Tri& k : kids) sum += adaptive_pair(A, k, ctx, theta, depth - 1);
    }
    return sum;
}

double energy_impl(const Scene& scene, const PaaContext& ctx, const PaaQuadSpec& quad,
                   bool parallel) {
    quad.validate();
    min_separation(scene); // contact guard
    if (ctx.zero()) return 0.0;

    const double p = scene.fixed.period();
    const std::vector<Tri> fixed_tris = mesh_polygon(scene.fixed, quad.surface_refine);
    const PolygonUnitCell mov = scene.movable_displaced();
    std::vector<Tri> mov_tris;
    {
        const std::vector<Tri> base = mesh_polygon(mov, quad.surface_refine);
        for (int m = -2; m <= 2; ++m)
            for (const Tri& t : base)
                mov_tris.push_back({{t.a.x + m * p, t.a.y},
                                    {t.b.x + m * p, t.b.y},
                                    {t.c.x + m * p, t.c.y}});
    }

    // spatial-error target -> admissibility opening angle
    const double theta =
        std::clamp(2.2 * std::pow(quad.rel_tol, 0.2), 0.25, 0.8);
    constexpr int kMaxDepth = 24;

    const std::size_t na = fixed_tris.size(), nb = mov_tris.size();
    auto slot = [&](std::size_t idx) {
        const Tri& A = fixed_tris[idx / nb];
        const Tri& B = mov_tris[idx % nb];
        if (quad.mode == PaaQuadSpec::Mode::Fixed) return gauss_pair(A, B, ctx);
        return adaptive_pair(A, B, ctx, theta, kMaxDepth);
    };
    const double total = parallel ? indexed_sum(na * nb, slot) : indexed_sum_serial(na * nb, slot);
    return -total;
}

} // namespace

double paa_energy(const Scene& scene, const PaaContext& ctx, const PaaQuadSpec& quad) {
    return energy_impl(scene, ctx, quad, true);
}

double paa_energy(const Scene& scene, const DielectricModel& model, const PaaQuadSpec& quad) {
    return energy_impl(scene, PaaContext(model, scene.thickness, quad), quad, true);
}

namespace reference {
double paa_energy(const Scene& scene, const PaaContext& ctx, const PaaQuadSpec& quad) {
    return energy_impl(scene, ctx, quad, false);
}
} // namespace reference

ForceCurve paa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const DielectricModel& model, const PaaQuadSpec& quad,
                           double delta_d) {
    if (d_grid.empty()) throw input_error("paa_force_curve: empty d grid");
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        if (!(d_grid[i] >= 0.0)) throw input_error("paa_force_curve: d must be >= 0");
        if (i > 0 && !(d_grid[i] > d_grid[i - 1]))
            throw input_error("paa_force_curve: d grid must be strictly increasing");
    }
    const PaaContext ctx(model, scene_at_zero.thickness, quad);
    const std::size_t n = d_grid.size();
    std::vector<double> force(n, 0.0);
    struct Err {
        int kind = 0;
        double d = 0.0;
        std::string msg;
    };
    std::vector<Err> errs(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            const double d = d_grid[i];
            const double lo = d >= delta_d ? d - delta_d : d;
            const double hi = d + delta_d;
            const double e_lo =
                energy_impl(scene_at_zero.with_displacement(lo), ctx, quad, false);
            const double e_hi =
                energy_impl(scene_at_zero.with_displacement(hi), ctx, quad, false);
            force[i] = -(e_hi - e_lo) / (hi - lo);
        } catch (const contact_error& e) {
            errs[i] = {3, e.displacement, e.what()};
        } catch (const std::exception& e) {
            errs[i] = {1, d_grid[i], e.what()};
        }
    });
    for (const auto& e : errs) {
        if (e.kind == 3) throw contact_error(e.msg, e.d);
        if (e.kind == 1) throw input_error(e.msg);
    }
    ForceCurve curve;
    curve.per_unit = PerUnit::Cell;
    curve.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) curve.samples[i] = {d_grid[i], force[i], 0.0, 0.0, 0.0};
    if (n >= 3) curve = pfa_gradient(std::move(curve)); // plain differences; no jump records
    return curve;
}

// ---------------------------------------------------------------------------
// brute-force oracle

namespace {

struct Raster {
    std::vector<Vec2> centers;
    double cell; // edge length of the square cells
};

Raster rasterize(const PolygonUnitCell& poly, int n_grid) {
    const auto& v = poly.vertices();
    double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
    for (const Vec2& p : v) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max(xmax - xmin, ymax - ymin);
    Raster r;
    r.cell = span / n_grid;
    const int nx = static_cast<int>(std::ceil((xmax - xmin) / r.cell - 1e-12));
    const int ny = static_cast<int>(std::ceil((ymax - ymin) / r.cell - 1e-12));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 c{xmin + (ix + 0.5) * r.cell, ymin + (iy + 0.5) * r.cell};
            // midpoint-in-polygon rasterization
            bool inside = false;
            const std::size_t n = v.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                if ((v[i].y > c.y) != (v[j].y > c.y)) {
                    const double xc =
                        v[j].x + (v[i].x - v[j].x) * (c.y - v[j].y) / (v[i].y - v[j].y);
                    if (c.x < xc) inside = !inside;
                }
            }
            if (inside) r.centers.push_back(c);
        }
    }
    return r;
}

} // namespace

double paa_bruteforce_energy(const Scene& scene, const DielectricModel& model, int n_grid,
                             int xi_nodes) {
    if (n_grid < 1) throw input_error("paa_bruteforce_energy: n_grid must be >= 1");
    min_separation(scene);
    const double p = scene.fixed.period();
    const double t = scene.thickness;

    const Raster ra = rasterize(scene.fixed, n_grid);
    const Raster rb = rasterize(scene.movable_displaced(), n_grid);
    const int nz = n_grid;
    const double dza = t / nz, dzb = t / nz;

    const std::size_t pairs =
        ra.centers.size() * nz * rb.centers.size() * nz * 5; // +/-2 periodic images
    if (pairs > 100000000ull)
        throw input_error("paa_bruteforce_energy: voxel-pair count " + std::to_string(pairs) +
                          " exceeds 1e8; use a coarser n_grid");

    const double wa = ra.cell * ra.cell * dza;
    const double wb = rb.cell * rb.cell * dzb;

    const std::size_t na = ra.centers.size();
    const double sum = indexed_sum(na, [&](std::size_t ia) {
        const Vec2 A = ra.centers[ia];
        double acc = 0.0;
        for (int iza = 0; iza < nz; ++iza) {
            const double za = (iza + 0.5) * dza;
            for (int m = -2; m <= 2; ++m) {
                const double shift = m * p;
                for (const Vec2& B : rb.centers) {
                    const double dx = A.x - B.x - shift;
                    const double dy = A.y - B.y;
                    const double rho2 = dx * dx + dy * dy;
                    for (int izb = 0; izb < nz; ++izb) {
                        const double dz = za - (izb + 0.5) * dzb;
                        acc += pair_kernel(model, std::sqrt(rho2 + dz * dz), xi_nodes);
                    }
                }
            }
        }
        return acc;
    });
    return -sum * wa * wb;
}

} // namespace casimir
