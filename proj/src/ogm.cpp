#include "pascrowd/ogm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pascrowd {

OccupancyGrid::OccupancyGrid(const GridSpec& spec, CellClass fill)
    : spec_(spec), cells_(CellMatrix::Constant(spec.height_cells, spec.width_cells, static_cast<std::uint8_t>(fill))) {}

Eigen::MatrixXd OccupancyGrid::numeric() const {
  return cells_.cast<double>().unaryExpr([](double code) { return code == 0.0 ? 0.0 : (code == 1.0 ? 1.0 : 0.5); });
}

std::size_t OccupancyGrid::count(CellClass c) const {
  return static_cast<std::size_t>((cells_.array() == static_cast<std::uint8_t>(c)).count());
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return rows() == other.rows() && cols() == other.cols() && cells_ == other.cells_;
}

GridSpec grid_around(const GridSpec& base, const Vector2& robot_position) {
  GridSpec spec = base;
  spec.center = robot_position;
  return spec;
}

namespace {

bool inside_disc(const Vector2& p, const HumanAgent& h) { return (p - h.position).squaredNorm() < h.radius * h.radius; }

// Cell index window that can hold centers of a disc of `radius` around `c`.
struct CellWindow {
  int row_lo, row_hi, col_lo, col_hi;
};

CellWindow window_for(const GridSpec& spec, const Vector2& c, double radius) {
  const int r0 = static_cast<int>(std::floor(spec.row_of(c.y() + radius))) - 1;
  const int r1 = static_cast<int>(std::ceil(spec.row_of(c.y() - radius))) + 1;
  const int c0 = static_cast<int>(std::floor(spec.col_of(c.x() - radius))) - 1;
  const int c1 = static_cast<int>(std::ceil(spec.col_of(c.x() + radius))) + 1;
  return {std::max(r0, 0), std::min(r1, spec.height_cells - 1), std::max(c0, 0), std::min(c1, spec.width_cells - 1)};
}

template <typename Fn>
void for_each_disc_cell(const GridSpec& spec, const HumanAgent& h, Fn&& fn) {
  const CellWindow w = window_for(spec, h.position, h.radius);
  for (int r = w.row_lo; r <= w.row_hi; ++r) {
    for (int c = w.col_lo; c <= w.col_hi; ++c) {
      if (inside_disc(spec.cell_center(r, c), h)) fn(r, c);
    }
  }
}

// Casts a ray from the robot toward `target` and reports whether any disc
// not containing the target is entered before reaching it.
class RayCaster {
 public:
  RayCaster(const WorldState& world) : origin_(world.robot.position) {
    for (const auto& h : world.humans) discs_.push_back({h.position - origin_, h.radius * h.radius});
  }

  bool blocked(const Vector2& target) const {
    const Vector2 ray = target - origin_;
    const double length = ray.norm();
    for (const auto& d : discs_) {
      if ((ray - d.offset).squaredNorm() < d.radius_sq) continue;  // target lies in this disc
      if (length == 0.0) {
        if (d.offset.squaredNorm() < d.radius_sq) return true;
        continue;
      }
      const double along = d.offset.dot(ray) / length;
      const double perp_sq = d.offset.squaredNorm() - along * along;
      if (perp_sq >= d.radius_sq) continue;
      const double half_chord = std::sqrt(d.radius_sq - perp_sq);
      if (along - half_chord < length && along + half_chord > 0.0) return true;
    }
    return false;
  }

 private:
  struct Disc {
    Vector2 offset;
    double radius_sq;
  };
  Vector2 origin_;
  std::vector<Disc> discs_;
};

}  // namespace

OccupancyGrid rasterize_ground_truth(const WorldState& world, const GridSpec& spec) {
  OccupancyGrid grid(spec, CellClass::Free);
  for (const auto& h : world.humans) {
    for_each_disc_cell(spec, h, [&](int r, int c) { grid.set(r, c, CellClass::Occupied); });
  }
  return grid;
}

Visibility classify_visibility(const WorldState& world, const GridSpec& spec, int row, int col, double fov_radius) {
  if (!spec.in_bounds(row, col)) throw Error(fmt::format("classify_visibility: cell ({}, {}) out of bounds", row, col));
  const Vector2 p = world.robot.position;
  const Vector2 q = spec.cell_center(row, col);
  if ((q - p).norm() > fov_radius) return Visibility::OutOfFov;

  const Vector2 seg = q - p;
  const double seg_sq = seg.squaredNorm();
  for (const auto& h : world.humans) {
    if (inside_disc(q, h)) continue;
    const double t = seg_sq > 0.0 ? std::clamp((h.position - p).dot(seg) / seg_sq, 0.0, 1.0) : 0.0;
    const Vector2 closest = p + t * seg;
    if ((closest - h.position).squaredNorm() < h.radius * h.radius) return Visibility::Occluded;
  }
  return Visibility::Visible;
}

std::vector<int> detected_agents(const WorldState& world, const GridSpec& spec, double fov_radius) {
  std::vector<int> detected;
  for (std::size_t i = 0; i < world.humans.size(); ++i) {
    bool seen = false;
    const HumanAgent& h = world.humans[i];
    if ((h.position - world.robot.position).norm() > fov_radius + h.radius + spec.resolution) continue;
    for_each_disc_cell(spec, h, [&](int r, int c) {
      if (!seen && classify_visibility(world, spec, r, c, fov_radius) == Visibility::Visible) seen = true;
    });
    if (seen) detected.push_back(static_cast<int>(i));
  }
  return detected;
}

OccupancyGrid build_observation(const WorldState& world, const GridSpec& spec, double fov_radius) {
  OccupancyGrid grid(spec, CellClass::Unknown);
  const RayCaster caster(world);
  const Vector2 origin = world.robot.position;

  // Only rows and columns that can reach the FOV disc need rays.
  const CellWindow w = window_for(spec, origin, fov_radius);
  for (int r = w.row_lo; r <= w.row_hi; ++r) {
    for (int c = w.col_lo; c <= w.col_hi; ++c) {
      const Vector2 q = spec.cell_center(r, c);
      if ((q - origin).norm() > fov_radius) continue;
      if (!caster.blocked(q)) grid.set(r, c, CellClass::Free);
    }
  }

  // A human is detected when any of its disc cells got a clear ray; the
  // whole in-FOV part of its disc is then marked occupied.
  std::vector<bool> seen(world.humans.size(), false);
  for (std::size_t i = 0; i < world.humans.size(); ++i) {
    for_each_disc_cell(spec, world.humans[i], [&](int r, int c) {
      if (grid.at(r, c) == CellClass::Free) seen[i] = true;
    });
  }
  for (std::size_t i = 0; i < world.humans.size(); ++i) {
    if (!seen[i]) continue;
    for_each_disc_cell(spec, world.humans[i], [&](int r, int c) {
      if ((spec.cell_center(r, c) - origin).norm() <= fov_radius) grid.set(r, c, CellClass::Occupied);
    });
  }
  return grid;
}

ObservationSequence::ObservationSequence(const OccupancyGrid& first) : frames_(kLength, first) {}

void ObservationSequence::push(const OccupancyGrid& frame) {
  const OccupancyGrid& head = frames_.back();
  if (frame.rows() != head.rows() || frame.cols() != head.cols()) {
    throw Error(fmt::format("push_history: frame is {}x{}, history is {}x{}", frame.rows(), frame.cols(),
                            head.rows(), head.cols()));
  }
  frames_.pop_front();
  frames_.push_back(frame);
}

ObservationSequence push_history(ObservationSequence seq, const OccupancyGrid& frame) {
  seq.push(frame);
  return seq;
}

namespace {

// Exact L1 distance (in cells) to the nearest cell of `cls`, two-pass chamfer.
Eigen::MatrixXi manhattan_transform(const OccupancyGrid& grid, CellClass cls) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  const int far = rows + cols + 1;
  Eigen::MatrixXi d(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int v = grid.at(r, c) == cls ? 0 : far;
      if (r > 0) v = std::min(v, d(r - 1, c) + 1);
      if (c > 0) v = std::min(v, d(r, c - 1) + 1);
      d(r, c) = v;
    }
  }
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = cols - 1; c >= 0; --c) {
      int v = d(r, c);
      if (r + 1 < rows) v = std::min(v, d(r + 1, c) + 1);
      if (c + 1 < cols) v = std::min(v, d(r, c + 1) + 1);
      d(r, c) = v;
    }
  }
  return d;
}

double directed_score(const OccupancyGrid& from, const Eigen::MatrixXi& to_distance, CellClass cls) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < from.rows(); ++r) {
    for (int c = 0; c < from.cols(); ++c) {
      if (from.at(r, c) != cls) continue;
      sum += to_distance(r, c);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

double class_score(const OccupancyGrid& a, const OccupancyGrid& b, CellClass cls) {
  const std::size_t na = a.count(cls);
  const std::size_t nb = b.count(cls);
  if (na == 0 && nb == 0) return 0.0;
  if (na == 0 || nb == 0) return static_cast<double>(a.rows() + a.cols());
  return 0.5 * (directed_score(a, manhattan_transform(b, cls), cls) +
                directed_score(b, manhattan_transform(a, cls), cls));
}

}  // namespace

SimilarityScores image_similarity(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(fmt::format("image_similarity: {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  SimilarityScores s;
  s.occupied = class_score(a, b, CellClass::Occupied);
  s.free = class_score(a, b, CellClass::Free);
  s.occluded = class_score(a, b, CellClass::Unknown);
  s.total = s.occupied + s.free + s.occluded;
  return s;
}

std::string to_text(const OccupancyGrid& grid) {
  std::string out = fmt::format("OGM {} {}\n", grid.rows(), grid.cols());
  out.reserve(out.size() + static_cast<std::size_t>(grid.rows()) * (grid.cols() + 1));
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      switch (grid.at(r, c)) {
        case CellClass::Free: out += '.'; break;
        case CellClass::Occupied: out += '#'; break;
        case CellClass::Unknown: out += '?'; break;
      }
    }
    out += '\n';
  }
  return out;
}

OccupancyGrid from_text(const std::string& text, const GridSpec& base) {
  std::istringstream in(text);
  std::string magic;
  int h = 0;
  int w = 0;
  if (!(in >> magic >> h >> w) || magic != "OGM" || h <= 0 || w <= 0) throw Error("from_text: bad OGM header");
  GridSpec spec = base;
  spec.height_cells = h;
  spec.width_cells = w;
  OccupancyGrid grid(spec, CellClass::Free);
  std::string line;
  std::getline(in, line);
  for (int r = 0; r < h; ++r) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != w) throw Error(fmt::format("from_text: bad row {}", r));
    for (int c = 0; c < w; ++c) {
      switch (line[c]) {
        case '.': grid.set(r, c, CellClass::Free); break;
        case '#': grid.set(r, c, CellClass::Occupied); break;
        case '?': grid.set(r, c, CellClass::Unknown); break;
        default: throw Error(fmt::format("from_text: bad cell '{}'", line[c]));
      }
    }
  }
  return grid;
}

}  // namespace pascrowd
