#include "casimir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
           std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(a, b, c);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

// Any contact between closed segments counts as an intersection.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& p3, const Vec2& p4) {
    const int d1 = orient_sign(p3, p4, p1);
    const int d2 = orient_sign(p3, p4, p2);
    const int d3 = orient_sign(p1, p2, p3);
    const int d4 = orient_sign(p1, p2, p4);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(p3, p1, p4)) return true;
    if (d2 == 0 && on_segment(p3, p2, p4)) return true;
    if (d3 == 0 && on_segment(p1, p3, p2)) return true;
    if (d4 == 0 && on_segment(p1, p4, p2)) return true;
    return false;
}

bool polygon_is_simple(const std::vector<Vec2>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
    return std::hypot(ex, ey);
}

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_dist(a, c, d), point_segment_dist(b, c, d)),
                    std::min(point_segment_dist(c, a, b), point_segment_dist(d, a, b)));
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& v) {
    bool inside = false;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xc = v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

} // namespace

void GratingSpec::validate() const {
    if (!(period > 0.0)) throw input_error("GratingSpec: period must be > 0");
    if (!(finger_width > 0.0) || !(finger_width < 0.5 * period))
        throw input_error("GratingSpec: finger width must satisfy 0 < w < p/2");
    if (!(finger_length > 0.0)) throw input_error("GratingSpec: finger length must be > 0");
    if (!(thickness > 0.0)) throw input_error("GratingSpec: thickness must be > 0");
    if (!(tip_gap > 0.0)) throw input_error("GratingSpec: tip gap must be > 0");
}

GratingSpec GratingSpec::paper() {
    return {2.0e-6, 908e-9, 1.5e-6, 2.58e-6, 430e-9};
}

PolygonUnitCell::PolygonUnitCell(std::vector<Vec2> vertices, double period, CellLabel label)
    : verts_(std::move(vertices)), period_(period), label_(label) {
    if (!(period_ > 0.0)) throw input_error("polygon: period must be > 0");
    // collapse exactly repeated consecutive vertices
    std::vector<Vec2> v;
    v.reserve(verts_.size());
    for (const Vec2& p : verts_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw input_error("polygon: non-finite vertex");
        if (!v.empty() && v.back().x == p.x && v.back().y == p.y) continue;
        v.push_back(p);
    }
    if (v.size() > 1 && v.front().x == v.back().x && v.front().y == v.back().y) v.pop_back();
    verts_ = std::move(v);
    if (verts_.size() < 3) throw input_error("polygon: needs at least 3 distinct vertices");

    double xmin = verts_[0].x, xmax = verts_[0].x;
    for (const Vec2& p : verts_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    if (xmax - xmin > period_ * (1.0 + 1e-9))
        throw input_error("polygon: x extent exceeds one period");

    const double a = signed_area(verts_);
    if (a == 0.0) throw input_error("polygon: degenerate (zero area)");
    if (a < 0.0) std::reverse(verts_.begin(), verts_.end());

    if (!polygon_is_simple(verts_))
        throw input_error("polygon: self-intersecting boundary");
}

double PolygonUnitCell::area() const { return signed_area(verts_); }

PolygonUnitCell PolygonUnitCell::translated(double dx, double dy) const {
    std::vector<Vec2> v = verts_;
    for (Vec2& p : v) {
        p.x += dx;
        p.y += dy;
    }
    PolygonUnitCell out = *this;
    out.verts_ = std::move(v);
    return out;
}

PolygonUnitCell Scene::movable_displaced() const { return movable.translated(0.0, displacement); }

Scene Scene::with_displacement(double d) const {
    if (!(d >= 0.0)) throw input_error("scene displacement must be >= 0");
    Scene s = *this;
    s.displacement = d;
    return s;
}

void Scene::validate() const {
    if (std::abs(fixed.period() - movable.period()) >
        1e-12 * std::max(fixed.period(), movable.period()))
        throw input_error("scene: fixed and movable cells have mismatched periods");
    if (!(displacement >= 0.0)) throw input_error("scene: displacement must be >= 0");
    if (!(thickness > 0.0)) throw input_error("scene: thickness must be > 0");
}

Scene rect_unit_cell(const GratingSpec& spec) {
    spec.validate();
    const double p = spec.period, w = spec.finger_width, h = spec.finger_length;
    const double s = spec.tip_gap, body = spec.finger_length;
    const double xf = 0.75 * p; // fixed finger center
    const double xm = 0.25 * p; // movable finger center, lateral offset p/2

    std::vector<Vec2> fixed = {
        {0.0, s + h},
        {xf - 0.5 * w, s + h},
        {xf - 0.5 * w, s},
        {xf + 0.5 * w, s},
        {xf + 0.5 * w, s + h},
        {p, s + h},
        {p, s + h + body},
        {0.0, s + h + body},
    };
    std::vector<Vec2> movable = {
        {0.0, -h - body},
        {p, -h - body},
        {p, -h},
        {xm + 0.5 * w, -h},
        {xm + 0.5 * w, 0.0},
        {xm - 0.5 * w, 0.0},
        {xm - 0.5 * w, -h},
        {0.0, -h},
    };

    Scene scene{PolygonUnitCell(std::move(fixed), p, CellLabel::Fixed),
                PolygonUnitCell(std::move(movable), p, CellLabel::Movable),
                0.0, 0.5 * p, spec.thickness, spec};
    scene.validate();
    return scene;
}

// ---------------------------------------------------------------------------
// geometry file I/O

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string serialize_geometry(const Scene& scene) {
    std::ostringstream out;
    out << "period " << fmt_double(scene.fixed.period()) << "\n";
    const auto emit = [&](const PolygonUnitCell& cell, const char* name) {
        out << "poly " << name << "\n";
        for (const Vec2& v : cell.vertices())
            out << "v " << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
        out << "end\n";
    };
    emit(scene.fixed, "fixed");
    emit(scene.movable, "movable");
    return out.str();
}

Scene parse_geometry(std::istream& in) {
    double period = 0.0;
    bool have_period = false;
    std::optional<std::vector<Vec2>> fixed_verts, movable_verts;
    std::vector<Vec2>* open_poly = nullptr;
    std::string open_label;
    int open_line = 0;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (tok == "period") {
            if (have_period) throw parse_error("duplicate period line", line_no);
            if (!(ls >> period) || !(period > 0.0))
                throw parse_error("malformed period line", line_no);
            have_period = true;
        } else if (tok == "poly") {
            if (!have_period) throw parse_error("poly block before period line", line_no);
            if (open_poly) throw parse_error("poly block opened inside another poly block", line_no);
            std::string label;
            if (!(ls >> label) || (label != "fixed" && label != "movable"))
                throw parse_error("poly label must be 'fixed' or 'movable'", line_no);
            auto& slot = label == "fixed" ? fixed_verts : movable_verts;
            if (slot) throw parse_error("duplicate poly " + label + " block", line_no);
            slot.emplace();
            open_poly = &*slot;
            open_label = label;
            open_line = line_no;
        } else if (tok == "v") {
            if (!open_poly) throw parse_error("vertex line outside a poly block", line_no);
            double x = 0.0, y = 0.0;
            if (!(ls >> x >> y)) throw parse_error("malformed vertex line", line_no);
            open_poly->push_back({x, y});
        } else if (tok == "end") {
            if (!open_poly) throw parse_error("end without an open poly block", line_no);
            open_poly = nullptr;
        } else {
            throw parse_error("unknown directive '" + tok + "'", line_no);
        }
        std::string extra;
        if (ls >> extra) throw parse_error("trailing tokens on line", line_no);
    }
    if (open_poly) throw parse_error("unterminated poly " + open_label + " block", open_line);
    if (!have_period) throw parse_error("missing period line", line_no ? line_no : 1);
    if (!fixed_verts) throw parse_error("missing poly fixed block", line_no);
    if (!movable_verts) throw parse_error("missing poly movable block", line_no);

    Scene scene{PolygonUnitCell(std::move(*fixed_verts), period, CellLabel::Fixed),
                PolygonUnitCell(std::move(*movable_verts), period, CellLabel::Movable),
                0.0, 0.5 * period, 2.58e-6, std::nullopt};
    scene.validate();
    min_separation(scene); // rejects cells in contact at d = 0
    return scene;
}

Scene load_geometry(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw input_error("cannot open geometry file: " + path);
    return parse_geometry(f);
}

// ---------------------------------------------------------------------------
// boundary offsetting

PolygonUnitCell offset_boundary(const PolygonUnitCell& cell, double delta) {
    if (delta == 0.0) return cell;
    const auto& v = cell.vertices();
    const std::size_t n = v.size();
    constexpr double miter_limit = 4.0;

    // Cells spanning the full period have seam walls at the span limits;
    // those are periodic-continuation cuts, not physical surface, and stay
    // put so the offset cell remains one period wide.
    double xmin = v[0].x, xmax = v[0].x;
    for (const Vec2& p : v) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    const bool full_span = xmax - xmin >= cell.period() * (1.0 - 1e-9);
    const double seam_tol = 1e-15 + 1e-12 * cell.period();
    auto on_seam = [&](const Vec2& p) {
        return full_span && (std::abs(p.x - xmin) <= seam_tol || std::abs(p.x - xmax) <= seam_tol);
    };

    std::vector<Vec2> dirs(n), normals(n);
    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        dirs[i] = {(b.x - a.x) / len, (b.y - a.y) / len};
        normals[i] = {dirs[i].y, -dirs[i].x}; // outward for CCW
        shift[i] = on_seam(a) && on_seam(b) ? 0.0 : delta;
    }

    std::vector<Vec2> out;
    out.reserve(n + 8);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const Vec2 a0{v[i].x + normals[prev].x * shift[prev], v[i].y + normals[prev].y * shift[prev]};
        const Vec2 b0{v[i].x + normals[i].x * shift[i], v[i].y + normals[i].y * shift[i]};
        const double denom = dirs[prev].x * dirs[i].y - dirs[prev].y * dirs[i].x;
        if (std::abs(denom) < 1e-12) {
            out.push_back(b0);
            continue;
        }
        const double t = ((b0.x - a0.x) * dirs[i].y - (b0.y - a0.y) * dirs[i].x) / denom;
        const Vec2 m{a0.x + t * dirs[prev].x, a0.y + t * dirs[prev].y};
        const double miter_len = std::hypot(m.x - v[i].x, m.y - v[i].y);
        if (miter_len > miter_limit * std::abs(delta)) {
            out.push_back(a0);
            out.push_back(b0);
        } else {
            out.push_back(m);
        }
    }

    // a shrink past the local feature size inverts the boundary
    if (!(signed_area(out) > 0.0))
        throw input_error("offset_boundary: polygon collapsed (offset too large)");
    try {
        return PolygonUnitCell(std::move(out), cell.period(), cell.label());
    } catch (const input_error&) {
        throw input_error("offset_boundary: offset induces an invalid (self-intersecting) polygon");
    }
}

// ---------------------------------------------------------------------------
// stage classification

Stage classify_stage(const GratingSpec& spec, double d, const StageWindows& win) {
    spec.validate();
    if (!(d >= 0.0)) throw input_error("classify_stage: d must be >= 0");
    if (!(win.w_ii > 0.0) || !(win.c_iv > 0.0))
        throw input_error("classify_stage: window constants must be > 0");
    const double s = spec.tip_gap;
    if (d < s - 0.5 * win.w_ii) return Stage::I;
    if (d <= s + 0.5 * win.w_ii) return Stage::II;
    const double iii_hi = std::max(s + 0.5 * win.w_ii, s + spec.finger_length - win.c_iv);
    if (d <= iii_hi) return Stage::III;
    return Stage::IV;
}

const char* stage_name(Stage s) {
    switch (s) {
    case Stage::I: return "I";
    case Stage::II: return "II";
    case Stage::III: return "III";
    case Stage::IV: return "IV";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// minimum separation / contact detection

double min_separation(const Scene& scene) {
    scene.validate();
    const PolygonUnitCell mov = scene.movable_displaced();
    const double p = scene.fixed.period();
    const auto& fv = scene.fixed.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (int m = -1; m <= 1; ++m) {
        const PolygonUnitCell mm = mov.translated(m * p, 0.0);
        const auto& mvv = mm.vertices();
        if (point_in_polygon(fv[0], mvv) || point_in_polygon(mvv[0], fv))
            throw contact_error("cells overlap at displacement d", scene.displacement);
        for (std::size_t i = 0; i < fv.size(); ++i)
            for (std::size_t j = 0; j < mvv.size(); ++j)
                best = std::min(best, segment_segment_dist(fv[i], fv[(i + 1) % fv.size()],
                                                           mvv[j], mvv[(j + 1) % mvv.size()]));
    }
    if (!(best > 0.0))
        throw contact_error("cells touch at displacement d", scene.displacement);
    return best;
}

// ---------------------------------------------------------------------------
// gap profiles

namespace {

struct Edge {
    Vec2 a, b;
    int body;     // 0 fixed, 1 movable
    bool y_facing;
    double ny;    // outward normal components
    double nx;
};

std::vector<Edge> collect_edges(const PolygonUnitCell& cell, int body) {
    std::vector<Edge> edges;
    const auto& v = cell.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        Edge e;
        e.a = a;
        e.b = b;
        e.body = body;
        e.nx = dy / len;
        e.ny = -dx / len;
        e.y_facing = std::abs(dx) > std::abs(dy); // |n_y| > sqrt(2)/2
        edges.push_back(e);
    }
    return edges;
}

// y of edge at column x, using a half-open x interval so vertex columns are
// counted exactly once.
bool column_crossing(const Edge& e, double x, double& y) {
    const double lo = std::min(e.a.x, e.b.x), hi = std::max(e.a.x, e.b.x);
    if (!(lo <= x && x < hi)) return false;
    y = e.a.y + (e.b.y - e.a.y) * (x - e.a.x) / (e.b.x - e.a.x);
    return true;
}

bool scan_crossing(const Edge& e, double y, double& x) {
    const double lo = std::min(e.a.y, e.b.y), hi = std::max(e.a.y, e.b.y);
    if (!(lo <= y && y < hi)) return false;
    x = e.a.x + (e.b.x - e.a.x) * (y - e.a.y) / (e.b.y - e.a.y);
    return true;
}

} // namespace

GapProfiles gap_profiles(const Scene& scene, int n_samples) {
    if (n_samples < 2) throw input_error("gap_profiles: n_samples must be >= 2");
    min_separation(scene); // contact guard

    const double p = scene.fixed.period();
    const PolygonUnitCell mov = scene.movable_displaced();
    const auto fixed_edges = collect_edges(scene.fixed, 0);
    const auto movable_edges = collect_edges(mov, 1);

    double anchor = mov.vertices()[0].x;
    for (const Vec2& v : mov.vertices()) anchor = std::min(anchor, v.x);

    GapProfiles out;
    out.dx = p / n_samples;

    // vertical profile: outermost upward-facing movable boundary vs
    // outermost downward-facing fixed boundary, per column
    for (int i = 0; i < n_samples; ++i) {
        const double x = anchor + (i + 0.5) * out.dx;
        double upper = -std::numeric_limits<double>::infinity();
        double lower = std::numeric_limits<double>::infinity();
        bool have_upper = false, have_lower = false;
        for (int m = -1; m <= 1; ++m) {
            const double xx = x + m * p;
            double y = 0.0;
            for (const Edge& e : movable_edges) {
                if (e.y_facing && e.ny > 0.0 && column_crossing(e, xx, y)) {
                    upper = std::max(upper, y);
                    have_upper = true;
                }
            }
            for (const Edge& e : fixed_edges) {
                if (e.y_facing && e.ny < 0.0 && column_crossing(e, xx, y)) {
                    lower = std::min(lower, y);
                    have_lower = true;
                }
            }
        }
        if (!have_upper || !have_lower) continue;
        const double gap = lower - upper;
        if (!(gap > 0.0))
            throw contact_error("vertical gap closed at displacement d", scene.displacement);
        out.vertical.push_back({x, gap});
    }

    // lateral profile: facing x-facing sidewall pairs inside the overlap band
    double m_lo = std::numeric_limits<double>::infinity(), m_hi = -m_lo;
    double f_lo = m_lo, f_hi = -m_lo;
    for (const Edge& e : movable_edges)
        if (!e.y_facing) {
            m_lo = std::min(m_lo, std::min(e.a.y, e.b.y));
            m_hi = std::max(m_hi, std::max(e.a.y, e.b.y));
        }
    for (const Edge& e : fixed_edges)
        if (!e.y_facing) {
            f_lo = std::min(f_lo, std::min(e.a.y, e.b.y));
            f_hi = std::max(f_hi, std::max(e.a.y, e.b.y));
        }
    const double band_lo = std::max(m_lo, f_lo);
    const double band_hi = std::min(m_hi, f_hi);
    if (!(band_hi > band_lo)) return out; // no sidewall overlap

    out.dy = (band_hi - band_lo) / n_samples;
    struct Crossing {
        double x;
        int body;
        bool x_facing;
        double nx;
    };
    std::vector<Crossing> crossings;
    for (int j = 0; j < n_samples; ++j) {
        const double y = band_lo + (j + 0.5) * out.dy;
        crossings.clear();
        for (int m = -1; m <= 1; ++m) {
            const double shift = m * p;
            double x = 0.0;
            for (const Edge& e : fixed_edges)
                if (scan_crossing(e, y, x))
                    crossings.push_back({x + shift, 0, !e.y_facing, e.nx});
            for (const Edge& e : movable_edges)
                if (scan_crossing(e, y, x))
                    crossings.push_back({x + shift, 1, !e.y_facing, e.nx});
        }
        std::sort(crossings.begin(), crossings.end(),
                  [](const Crossing& a, const Crossing& b) {
                      if (a.x != b.x) return a.x < b.x;
                      return a.body < b.body;
                  });
        for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
            const Crossing& l = crossings[c];
            const Crossing& r = crossings[c + 1];
            if (l.body == r.body) continue;
            if (!l.x_facing || !r.x_facing) continue;
            if (!(l.nx > 0.0) || !(r.nx < 0.0)) continue;
            const double mid = 0.5 * (l.x + r.x);
            if (mid < anchor || mid >= anchor + p) continue;
            const double gap = r.x - l.x;
            if (!(gap > 0.0))
                throw contact_error("lateral gap closed at displacement d", scene.displacement);
            out.lateral.push_back({y, gap});
        }
    }
    return out;
}

} // namespace casimir
