// Closed-polyline ring highway with exits and exit-delimited segments.
//
// Arc positions are meters along the ring from vertex 0, increasing in the
// vertex order of the input polyline. That direction is Clockwise by
// convention.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ringcast/geo.hpp"

namespace ringcast {

enum class Direction { Clockwise, Counterclockwise };

const char* to_string(Direction d);
Direction opposite(Direction d);

struct Exit {
    int id = 0;          // 1..E, assigned in arc order
    double arc = 0.0;
    std::string label;
};

// Half-open arc interval [start_arc, start_arc + length) modulo C.
struct Segment {
    int index = 0;       // 1..S
    int start_exit = 0;
    int end_exit = 0;
    double start_arc = 0.0;
    double length = 0.0;
};

struct ArcMatch {
    double arc = 0.0;
    double offset = 0.0;  // meters from the polyline
};

struct NamedPoint {
    std::string label;
    GeoPoint point;
};

inline constexpr double kDefaultMaxOffsetM = 100.0;

class RingGeometry {
public:
    // Errors: TooFewVertices, TooFewExits, InvalidCoordinate, DegenerateEdge,
    // ExitOffRing, DuplicateExitArc.
    static RingGeometry build(std::vector<GeoPoint> vertices, const std::vector<NamedPoint>& exits,
                              double max_offset_m = kDefaultMaxOffsetM);

    double circumference() const { return circumference_; }
    const std::vector<GeoPoint>& vertices() const { return vertices_; }
    const std::vector<double>& cumulative_arc() const { return cumulative_arc_; }
    const std::vector<Exit>& exits() const { return exits_; }
    const std::vector<Segment>& segments() const { return segments_; }
    const Exit& exit(int id) const;
    const Segment& segment(int j) const;
    int exit_count() const { return static_cast<int>(exits_.size()); }
    int segment_count() const { return static_cast<int>(segments_.size()); }

    // Nearest point on the polyline; ties go to the smallest arc.
    ArcMatch arc_position(GeoPoint p) const;
    // Inverse of arc_position for points on the polyline.
    GeoPoint point_at(double arc) const;

    double wrap(double arc) const;
    double directed_arc_distance(double from, double to, Direction dir) const;
    // Shorter of the two directed distances.
    double ring_distance(double a, double b) const;
    // Straight-line distance between two ring positions, with the ring
    // embedded as a circle of circumference C.
    double chord_distance(double a, double b) const;

    // 1-based segment index whose half-open interval contains `arc`.
    int segment_of(double arc) const;
    // Exit id `steps` exits ahead of `exit_id` when travelling `dir`.
    int exit_ahead(int exit_id, int steps, Direction dir) const;
    // First exit strictly ahead of `arc` in `dir`.
    int next_exit(double arc, Direction dir) const;

private:
    std::vector<GeoPoint> vertices_;
    std::vector<PlanePoint> plane_;
    std::vector<double> cumulative_arc_;
    std::vector<double> edge_length_;
    std::vector<Exit> exits_;
    std::vector<Segment> segments_;
    LocalFrame frame_;
    double circumference_ = 0.0;
};

// Regular polygon approximating a circle whose perimeter is `circumference_m`,
// with `exit_count` equally spaced exits on vertices.
RingGeometry make_circular_ring(double circumference_m, int exit_count, int vertices_per_segment = 10,
                                GeoPoint center = GeoPoint{41.9028, 12.4964});

// Delimited-text geometry files. `#` lines and blank lines are ignored.
std::vector<GeoPoint> load_vertices(const std::string& path);
std::vector<NamedPoint> load_exits(const std::string& path);
void write_vertices(const std::string& path, const std::vector<GeoPoint>& vertices);
void write_exits(const std::string& path, const RingGeometry& ring);

RingGeometry load_ring(const std::string& vertices_path, const std::string& exits_path,
                       double max_offset_m = kDefaultMaxOffsetM);

} // namespace ringcast
