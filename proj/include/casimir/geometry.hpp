// Periodic polygon unit cells, the ideal rectangular grating pair, boundary
// offsetting, interpenetration-stage classification, and the facing-gap
// profiles consumed by the proximity-force approximation.
#ifndef CASIMIR_GEOMETRY_HPP
#define CASIMIR_GEOMETRY_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace casimir {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Ideal rectangular grating parameters (Fig.-1a-style cross-section).
struct GratingSpec {
    double period;        // p, m
    double finger_width;  // w, m
    double finger_length; // h, m
    double thickness;     // t, m (z extent)
    double tip_gap;       // s, m (initial tip-to-tip separation)

    double lateral_gap() const { return 0.5 * period - finger_width; } // g
    void validate() const;

    // p = 2 um, w = 908 nm, h = 1.5 um, t = 2.58 um, s = 430 nm (g = 92 nm)
    static GratingSpec paper();
};

enum class CellLabel { Fixed, Movable };

// Closed simple polygon, one period of a grating cross-section. Vertices are
// stored counterclockwise; construction normalizes orientation and rejects
// self-intersecting or degenerate input.
class PolygonUnitCell {
public:
    PolygonUnitCell(std::vector<Vec2> vertices, double period, CellLabel label);

    const std::vector<Vec2>& vertices() const { return verts_; }
    double period() const { return period_; }
    CellLabel label() const { return label_; }

    double area() const;
    PolygonUnitCell translated(double dx, double dy) const;

private:
    std::vector<Vec2> verts_;
    double period_;
    CellLabel label_;
};

// A fixed/movable cell pair. The movable cell is stored at zero displacement
// and rigidly translated by +y displacement when evaluated.
struct Scene {
    PolygonUnitCell fixed;
    PolygonUnitCell movable;
    double displacement = 0.0;   // d >= 0, m
    double lateral_offset = 0.0; // m, informational (p/2 for the ideal cell)
    double thickness = 2.58e-6;  // z extent used by the energy integrals, m
    std::optional<GratingSpec> ideal; // set when built from a GratingSpec

    PolygonUnitCell movable_displaced() const;
    Scene with_displacement(double d) const;
    void validate() const;
};

// One rectangular finger per grating per period, lateral offset p/2,
// tip-to-tip distance s at d = 0.
Scene rect_unit_cell(const GratingSpec& spec);

// Geometry file format (UTF-8 text, '#' comments, SI meters):
//   period <p>
//   poly fixed
//   v <x> <y>
//   ...
//   end
//   poly movable
//   ...
//   end
Scene parse_geometry(std::istream& in);
Scene load_geometry(const std::string& path);
std::string serialize_geometry(const Scene& scene);

// Displaces every edge by delta along its outward normal; vertices rejoined
// by miter with a bevel fallback past the miter limit. Throws if the offset
// polygon self-intersects.
PolygonUnitCell offset_boundary(const PolygonUnitCell& cell, double delta);

enum class Stage { I = 1, II = 2, III = 3, IV = 4 };

struct StageWindows {
    double w_ii = 100e-9;  // stage-II window width centered on d = s
    double c_iv = 0.48e-6; // stage IV begins at d = s + h - c_iv
};

Stage classify_stage(const GratingSpec& spec, double d, const StageWindows& win = {});
const char* stage_name(Stage s);

// Facing-gap profiles. Vertical: per sampled column x, the y-distance
// between the movable cell's outermost upward-facing boundary and the fixed
// cell's outermost downward-facing boundary (periodically wrapped); columns
// with no facing pair are skipped. Lateral: per sampled scanline y in the
// sidewall-overlap band, one entry per facing sidewall pair. Segments are
// y-facing when |n_y| > sqrt(2)/2, else x-facing.
struct GapProfiles {
    struct VerticalSample { double x; double gap; };
    struct LateralSample { double y; double gap; };
    std::vector<VerticalSample> vertical;
    std::vector<LateralSample> lateral;
    double dx = 0.0; // measure carried by each vertical sample
    double dy = 0.0; // measure carried by each lateral scanline
};

GapProfiles gap_profiles(const Scene& scene, int n_samples);

// Minimum distance between the fixed cell and the displaced movable cell
// (periodic images included). Throws contact_error when they touch or
// overlap.
double min_separation(const Scene& scene);

} // namespace casimir

#endif
