#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kftrack {

/// Axis-aligned box in continuous center format.
///
/// Integer pixel boxes map to center format with cx = x + (w - 1) / 2, so a
/// box covering columns 2..3 has cx = 2.5 and w = 2. The box occupies the
/// continuous extent [cx - w/2, cx + w/2], which is exactly the union of its
/// pixel cells when pixels are unit squares centred on integer coordinates.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool empty = true;

  static BBox from_center(double cx, double cy, double w, double h);
  /// Integer top-left pixel box (dataset convention).
  static BBox from_top_left(double x, double y, double w, double h);
  static BBox none() { return BBox{}; }

  double left() const { return cx - w / 2.0; }
  double right() const { return cx + w / 2.0; }
  double top() const { return cy - h / 2.0; }
  double bottom() const { return cy + h / 2.0; }
  double area() const { return empty ? 0.0 : w * h; }

  /// Top-left pixel coordinate, inverse of from_top_left.
  double x() const { return cx - (w - 1.0) / 2.0; }
  double y() const { return cy - (h - 1.0) / 2.0; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection over union; 0 when either box is empty.
double iou(const BBox& a, const BBox& b);

/// Euclidean distance between box centres. Throws DomainError on empty boxes.
double center_distance(const BBox& a, const BBox& b);

/// Centre offset normalised by the ground-truth size, as an L2 magnitude.
double normalized_center_distance(const BBox& pred, const BBox& gt);

/// Binary mask stored as alternating 0/1 run lengths in row-major order.
///
/// The first run always counts zeros and may be empty; every other run is
/// non-empty in canonical form.
class RleMask {
 public:
  RleMask() = default;
  /// Takes runs as given and canonicalizes; throws FormatError when the run
  /// sum does not match grid_w * grid_h.
  RleMask(std::uint32_t grid_w, std::uint32_t grid_h, std::vector<std::uint32_t> runs);

  static RleMask encode(std::span<const std::uint8_t> bitmap, std::uint32_t grid_w,
                        std::uint32_t grid_h);
  /// Filled rectangle of pixels [x0, x1] x [y0, y1] (inclusive), clipped to the grid.
  static RleMask rectangle(std::uint32_t grid_w, std::uint32_t grid_h, std::int64_t x0,
                           std::int64_t y0, std::int64_t x1, std::int64_t y1);
  static RleMask zeros(std::uint32_t grid_w, std::uint32_t grid_h);

  /// Text form "grid_w grid_h: r0 r1 r2 ...".
  static RleMask parse(std::string_view text);
  std::string to_string() const;

  std::vector<std::uint8_t> decode() const;

  std::uint32_t grid_w() const { return grid_w_; }
  std::uint32_t grid_h() const { return grid_h_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }
  std::uint64_t area() const;

  friend bool operator==(const RleMask&, const RleMask&) = default;

 private:
  std::uint32_t grid_w_ = 0;
  std::uint32_t grid_h_ = 0;
  std::vector<std::uint32_t> runs_{0};
};

/// Tight bounding box of all 1-pixels; empty box for an all-zero mask.
BBox mask_to_bbox(const RleMask& m);

}  // namespace kftrack
