#pragma once

#include "pascrowd/config.hpp"
#include "pascrowd/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace pascrowd {

/// Cell codes double as the wire byte codes.
enum class CellClass : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

enum class Visibility { Visible, Occluded, OutOfFov };

using CellMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Ternary local map around the robot.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const GridSpec& spec, CellClass fill);

  const GridSpec& spec() const { return spec_; }
  int rows() const { return spec_.height_cells; }
  int cols() const { return spec_.width_cells; }

  CellClass at(int row, int col) const { return static_cast<CellClass>(cells_(row, col)); }
  void set(int row, int col, CellClass c) { cells_(row, col) = static_cast<std::uint8_t>(c); }

  const CellMatrix& codes() const { return cells_; }
  CellMatrix& codes() { return cells_; }

  /// FREE -> 0.0, OCCUPIED -> 1.0, UNKNOWN -> 0.5.
  Eigen::MatrixXd numeric() const;

  std::size_t count(CellClass c) const;

  /// Same dimensions and identical cells; centers are not compared.
  bool operator==(const OccupancyGrid& other) const;

 private:
  GridSpec spec_;
  CellMatrix cells_;
};

/// Grid spec from `base` recentred on the robot.
GridSpec grid_around(const GridSpec& base, const Vector2& robot_position);

OccupancyGrid rasterize_ground_truth(const WorldState& world, const GridSpec& spec);

/// Exact per-cell rule: out of FOV by center distance, otherwise occluded
/// when the segment from the robot to the cell center passes strictly inside
/// a human disc that does not itself contain the cell center.
Visibility classify_visibility(const WorldState& world, const GridSpec& spec, int row, int col,
                               double fov_radius);

/// Indices of humans with at least one visible in-bounds disc cell.
std::vector<int> detected_agents(const WorldState& world, const GridSpec& spec, double fov_radius);

/// Observation map: visible cells FREE, the rest UNKNOWN, and the in-FOV disc
/// cells of every detected human OCCUPIED.
OccupancyGrid build_observation(const WorldState& world, const GridSpec& spec, double fov_radius);

/// Fixed-length T_O = 4 observation history, oldest first.
class ObservationSequence {
 public:
  static constexpr std::size_t kLength = 4;

  /// Fills the history with `first`.
  explicit ObservationSequence(const OccupancyGrid& first);

  void push(const OccupancyGrid& frame);
  const OccupancyGrid& operator[](std::size_t i) const { return frames_[i]; }
  std::size_t size() const { return frames_.size(); }
  const std::deque<OccupancyGrid>& frames() const { return frames_; }

 private:
  std::deque<OccupancyGrid> frames_;
};

ObservationSequence push_history(ObservationSequence seq, const OccupancyGrid& frame);

struct SimilarityScores {
  double occupied = 0.0;
  double free = 0.0;
  double occluded = 0.0;
  double total = 0.0;
};

/// Symmetric Manhattan-distance image similarity per cell class; lower is
/// better. A class present in only one map scores H + W.
SimilarityScores image_similarity(const OccupancyGrid& a, const OccupancyGrid& b);

/// Text dump: "OGM <H> <W>" then H rows of '.', '#', '?'.
std::string to_text(const OccupancyGrid& grid);
OccupancyGrid from_text(const std::string& text, const GridSpec& base);

}  // namespace pascrowd
