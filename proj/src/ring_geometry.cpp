#include "ringcast/ring_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

namespace {

// Offsets closer than this are considered equal for the tie-break.
constexpr double kTieEpsM = 1e-9;

struct EdgeProjection {
    double t = 0.0;
    PlanePoint point;
    double dist2 = 0.0;
};

EdgeProjection project(PlanePoint a, PlanePoint b, PlanePoint p) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (t < 1e-12) t = 0.0;
    if (t > 1.0 - 1e-12) t = 1.0;
    const PlanePoint q{a.x + t * dx, a.y + t * dy};
    const double ex = p.x - q.x;
    const double ey = p.y - q.y;
    return {t, q, ex * ex + ey * ey};
}

} // namespace

const char* to_string(Direction d) {
    return d == Direction::Clockwise ? "cw" : "ccw";
}

Direction opposite(Direction d) {
    return d == Direction::Clockwise ? Direction::Counterclockwise : Direction::Clockwise;
}

RingGeometry RingGeometry::build(std::vector<GeoPoint> vertices, const std::vector<NamedPoint>& exits,
                                 double max_offset_m) {
    if (vertices.size() < 3) {
        throw InputError("TooFewVertices", "ring needs at least 3 vertices, got " + std::to_string(vertices.size()));
    }
    if (exits.size() < 2) {
        throw InputError("TooFewExits", "ring needs at least 2 exits, got " + std::to_string(exits.size()));
    }
    for (const auto& v : vertices) {
        if (!v.valid()) throw InputError("InvalidCoordinate", "vertex outside WGS-84 bounds");
    }

    RingGeometry g;
    g.vertices_ = std::move(vertices);
    g.frame_ = LocalFrame::centroid_of(g.vertices_);
    const std::size_t n = g.vertices_.size();
    g.plane_.reserve(n);
    for (const auto& v : g.vertices_) g.plane_.push_back(g.frame_.to_plane(v));

    g.cumulative_arc_.resize(n);
    g.edge_length_.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        g.cumulative_arc_[k] = acc;
        const double len = haversine_m(g.vertices_[k], g.vertices_[(k + 1) % n]);
        if (!(len > 0.0)) {
            throw InputError("DegenerateEdge", "zero-length edge at vertex " + std::to_string(k));
        }
        g.edge_length_[k] = len;
        acc += len;
    }
    g.circumference_ = acc;

    std::vector<std::pair<double, std::string>> snapped;
    snapped.reserve(exits.size());
    for (const auto& e : exits) {
        if (!e.point.valid()) throw InputError("InvalidCoordinate", "exit '" + e.label + "' outside WGS-84 bounds");
        const auto m = g.arc_position(e.point);
        if (m.offset > max_offset_m) {
            std::ostringstream msg;
            msg << "exit '" << e.label << "' is " << m.offset << " m from the ring (max " << max_offset_m << ")";
            throw InputError("ExitOffRing", msg.str());
        }
        snapped.emplace_back(m.arc, e.label);
    }
    std::stable_sort(snapped.begin(), snapped.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < snapped.size(); ++i) {
        if (snapped[i].first == snapped[i - 1].first) {
            throw InputError("DuplicateExitArc",
                             "exits '" + snapped[i - 1].second + "' and '" + snapped[i].second + "' share an arc");
        }
    }

    const int e_count = static_cast<int>(snapped.size());
    for (int i = 0; i < e_count; ++i) {
        g.exits_.push_back(Exit{i + 1, snapped[i].first, snapped[i].second});
    }
    for (int i = 0; i < e_count; ++i) {
        const auto& a = g.exits_[i];
        const auto& b = g.exits_[(i + 1) % e_count];
        double len = b.arc - a.arc;
        if (i + 1 == e_count) len = (g.circumference_ - a.arc) + b.arc;
        g.segments_.push_back(Segment{i + 1, a.id, b.id, a.arc, len});
    }
    return g;
}

const Exit& RingGeometry::exit(int id) const {
    if (id < 1 || id > exit_count()) throw InputError("UnknownExit", "no exit with id " + std::to_string(id));
    return exits_[static_cast<std::size_t>(id - 1)];
}

const Segment& RingGeometry::segment(int j) const {
    if (j < 1 || j > segment_count()) throw InputError("UnknownSegment", "no segment " + std::to_string(j));
    return segments_[static_cast<std::size_t>(j - 1)];
}

ArcMatch RingGeometry::arc_position(GeoPoint p) const {
    const PlanePoint pp = frame_.to_plane(p);
    const std::size_t n = plane_.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    PlanePoint best_point{};
    for (std::size_t k = 0; k < n; ++k) {
        const auto proj = project(plane_[k], plane_[(k + 1) % n], pp);
        const double arc = wrap(cumulative_arc_[k] + proj.t * edge_length_[k]);
        const double d = std::sqrt(proj.dist2);
        const double best = std::sqrt(best_d2);
        if (d < best - kTieEpsM || (std::abs(d - best) <= kTieEpsM && arc < best_arc)) {
            best_d2 = proj.dist2;
            best_arc = arc;
            best_point = proj.point;
        }
    }
    return ArcMatch{best_arc, haversine_m(p, frame_.to_geo(best_point))};
}

GeoPoint RingGeometry::point_at(double arc) const {
    arc = wrap(arc);
    const auto it = std::upper_bound(cumulative_arc_.begin(), cumulative_arc_.end(), arc);
    const std::size_t k = static_cast<std::size_t>(std::distance(cumulative_arc_.begin(), it)) - 1;
    const std::size_t n = plane_.size();
    const double t = (arc - cumulative_arc_[k]) / edge_length_[k];
    const PlanePoint a = plane_[k];
    const PlanePoint b = plane_[(k + 1) % n];
    if (t == 0.0) return vertices_[k];
    return frame_.to_geo(PlanePoint{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
}

double RingGeometry::wrap(double arc) const {
    double r = std::fmod(arc, circumference_);
    if (r < 0.0) r += circumference_;
    if (r >= circumference_) r = 0.0;
    return r;
}

double RingGeometry::directed_arc_distance(double from, double to, Direction dir) const {
    return dir == Direction::Clockwise ? wrap(to - from) : wrap(from - to);
}

double RingGeometry::ring_distance(double a, double b) const {
    return std::min(directed_arc_distance(a, b, Direction::Clockwise),
                    directed_arc_distance(a, b, Direction::Counterclockwise));
}

double RingGeometry::chord_distance(double a, double b) const {
    const double radius = circumference_ / (2.0 * std::numbers::pi);
    return 2.0 * radius * std::sin(std::numbers::pi * ring_distance(a, b) / circumference_);
}

int RingGeometry::segment_of(double arc) const {
    arc = wrap(arc);
    const auto it = std::upper_bound(exits_.begin(), exits_.end(), arc,
                                     [](double s, const Exit& e) { return s < e.arc; });
    if (it == exits_.begin()) return segment_count();  // before the first exit: wrapping segment
    return std::prev(it)->id;
}

int RingGeometry::exit_ahead(int exit_id, int steps, Direction dir) const {
    const int e = exit_count();
    const int delta = dir == Direction::Clockwise ? steps : -steps;
    return ((exit_id - 1 + delta) % e + e) % e + 1;
}

int RingGeometry::next_exit(double arc, Direction dir) const {
    arc = wrap(arc);
    if (dir == Direction::Clockwise) {
        const auto it = std::upper_bound(exits_.begin(), exits_.end(), arc,
                                         [](double s, const Exit& e) { return s < e.arc; });
        return it == exits_.end() ? exits_.front().id : it->id;
    }
    const auto it = std::lower_bound(exits_.begin(), exits_.end(), arc,
                                     [](const Exit& e, double s) { return e.arc < s; });
    return it == exits_.begin() ? exits_.back().id : std::prev(it)->id;
}

RingGeometry make_circular_ring(double circumference_m, int exit_count, int vertices_per_segment,
                                GeoPoint center) {
    if (exit_count < 2 || vertices_per_segment < 1 || !(circumference_m > 0.0)) {
        throw InputError("InvalidConfig", "circular ring needs C > 0, >= 2 exits, >= 1 vertex per segment");
    }
    const int n = exit_count * vertices_per_segment;
    const double radius = circumference_m / (2.0 * n * std::sin(std::numbers::pi / n));
    const LocalFrame frame(center);
    std::vector<GeoPoint> vertices;
    vertices.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        // Clockwise on the map: heading starts north and turns east.
        const double theta = 2.0 * std::numbers::pi * k / n;
        vertices.push_back(frame.to_geo(PlanePoint{radius * std::sin(theta), radius * std::cos(theta)}));
    }
    std::vector<NamedPoint> exits;
    for (int i = 0; i < exit_count; ++i) {
        exits.push_back(NamedPoint{"exit" + std::to_string(i + 1),
                                   vertices[static_cast<std::size_t>(i * vertices_per_segment)]});
    }
    return RingGeometry::build(std::move(vertices), exits);
}

namespace {

template <typename RowFn>
void for_each_row(const std::string& path, std::size_t fields, RowFn&& fn) {
    const std::string body = text::read_file(path);
    std::istringstream in(body);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::is_skippable(line)) continue;
        const auto cols = text::split(line);
        if (cols.size() != fields) {
            throw InputError("MalformedLine", path + ":" + std::to_string(lineno) + ": expected " +
                                                  std::to_string(fields) + " fields");
        }
        fn(cols, lineno);
    }
}

GeoPoint parse_point(std::string_view lat, std::string_view lon, const std::string& path, int lineno) {
    const auto a = text::parse_double(lat);
    const auto b = text::parse_double(lon);
    if (!a || !b) throw InputError("MalformedLine", path + ":" + std::to_string(lineno) + ": bad coordinate");
    GeoPoint p{*a, *b};
    if (!p.valid()) throw InputError("InvalidCoordinate", path + ":" + std::to_string(lineno));
    return p;
}

} // namespace

std::vector<GeoPoint> load_vertices(const std::string& path) {
    std::vector<GeoPoint> out;
    for_each_row(path, 2, [&](const auto& cols, int lineno) {
        out.push_back(parse_point(cols[0], cols[1], path, lineno));
    });
    return out;
}

std::vector<NamedPoint> load_exits(const std::string& path) {
    std::vector<NamedPoint> out;
    for_each_row(path, 3, [&](const auto& cols, int lineno) {
        out.push_back(NamedPoint{std::string(cols[0]), parse_point(cols[1], cols[2], path, lineno)});
    });
    return out;
}

void write_vertices(const std::string& path, const std::vector<GeoPoint>& vertices) {
    std::string body = "# lat,lon\n";
    for (const auto& v : vertices) body += text::fixed(v.lat, 9) + "," + text::fixed(v.lon, 9) + "\n";
    text::write_file(path, body);
}

void write_exits(const std::string& path, const RingGeometry& ring) {
    std::string body = "# label,lat,lon\n";
    for (const auto& e : ring.exits()) {
        const auto p = ring.point_at(e.arc);
        body += e.label + "," + text::fixed(p.lat, 9) + "," + text::fixed(p.lon, 9) + "\n";
    }
    text::write_file(path, body);
}

RingGeometry load_ring(const std::string& vertices_path, const std::string& exits_path, double max_offset_m) {
    return RingGeometry::build(load_vertices(vertices_path), load_exits(exits_path), max_offset_m);
}

} // namespace ringcast
