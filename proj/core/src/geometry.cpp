#include "kftrack/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kftrack/error.hpp"

namespace kftrack {

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "validation failed";
        for (const auto& v : violations) msg += "; " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

BBox BBox::from_center(double cx, double cy, double w, double h) {
  if (!(w > 0.0) || !(h > 0.0)) return BBox::none();
  return BBox{cx, cy, w, h, false};
}

BBox BBox::from_top_left(double x, double y, double w, double h) {
  return from_center(x + (w - 1.0) / 2.0, y + (h - 1.0) / 2.0, w, h);
}

double iou(const BBox& a, const BBox& b) {
  if (a.empty || b.empty) return 0.0;
  // Overlap of two intervals from their centres and widths; unlike edge
  // differences this gives iou(a, a) == 1 exactly.
  const double iw = std::min({a.w, b.w, (a.w + b.w) / 2.0 - std::abs(a.cx - b.cx)});
  const double ih = std::min({a.h, b.h, (a.h + b.h) / 2.0 - std::abs(a.cy - b.cy)});
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double center_distance(const BBox& a, const BBox& b) {
  if (a.empty || b.empty) throw DomainError("center distance undefined for an empty box");
  return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

double normalized_center_distance(const BBox& pred, const BBox& gt) {
  if (gt.empty || !(gt.w > 0.0) || !(gt.h > 0.0))
    throw DomainError("normalized distance needs a non-degenerate ground-truth box");
  if (pred.empty) throw DomainError("normalized distance undefined for an empty prediction");
  return std::hypot((pred.cx - gt.cx) / gt.w, (pred.cy - gt.cy) / gt.h);
}

// ---------------------------------------------------------------------------
// RleMask

namespace {

std::vector<std::uint32_t> canonicalize(const std::vector<std::uint32_t>& runs) {
  std::vector<std::uint32_t> out{0};
  out.reserve(runs.size() + 1);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i] == 0) continue;
    const std::size_t bit = i % 2;
    if ((out.size() - 1) % 2 == bit)
      out.back() += runs[i];
    else
      out.push_back(runs[i]);
  }
  return out;
}

}  // namespace

RleMask::RleMask(std::uint32_t grid_w, std::uint32_t grid_h, std::vector<std::uint32_t> runs)
    : grid_w_(grid_w), grid_h_(grid_h) {
  const std::uint64_t total =
      std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
  const std::uint64_t expected = std::uint64_t{grid_w} * grid_h;
  if (total != expected) {
    throw FormatError("RLE run sum " + std::to_string(total) + " does not match grid " +
                      std::to_string(grid_w) + "x" + std::to_string(grid_h));
  }
  runs_ = canonicalize(runs);
}

RleMask RleMask::zeros(std::uint32_t grid_w, std::uint32_t grid_h) {
  return RleMask(grid_w, grid_h, {grid_w * grid_h});
}

RleMask RleMask::encode(std::span<const std::uint8_t> bitmap, std::uint32_t grid_w,
                        std::uint32_t grid_h) {
  if (bitmap.size() != std::size_t{grid_w} * grid_h)
    throw FormatError("bitmap size does not match grid");
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t len = 0;
  for (const std::uint8_t px : bitmap) {
    const std::uint8_t bit = px ? 1 : 0;
    if (bit != current) {
      runs.push_back(len);
      current = bit;
      len = 0;
    }
    ++len;
  }
  runs.push_back(len);
  return RleMask(grid_w, grid_h, std::move(runs));
}

RleMask RleMask::rectangle(std::uint32_t grid_w, std::uint32_t grid_h, std::int64_t x0,
                           std::int64_t y0, std::int64_t x1, std::int64_t y1) {
  x0 = std::max<std::int64_t>(x0, 0);
  y0 = std::max<std::int64_t>(y0, 0);
  x1 = std::min<std::int64_t>(x1, std::int64_t{grid_w} - 1);
  y1 = std::min<std::int64_t>(y1, std::int64_t{grid_h} - 1);
  if (x0 > x1 || y0 > y1) return zeros(grid_w, grid_h);

  const auto W = static_cast<std::uint32_t>(grid_w);
  const auto bw = static_cast<std::uint32_t>(x1 - x0 + 1);
  const auto rows = static_cast<std::uint32_t>(y1 - y0 + 1);
  RleMask m;
  m.grid_w_ = grid_w;
  m.grid_h_ = grid_h;
  m.runs_.clear();
  if (bw == W) {
    m.runs_ = {static_cast<std::uint32_t>(y0) * W, rows * W};
  } else {
    m.runs_.reserve(2 * rows + 1);
    m.runs_.push_back(static_cast<std::uint32_t>(y0) * W + static_cast<std::uint32_t>(x0));
    for (std::uint32_t r = 0; r < rows; ++r) {
      if (r > 0) m.runs_.push_back(W - bw);
      m.runs_.push_back(bw);
    }
  }
  const std::uint64_t used = std::accumulate(m.runs_.begin(), m.runs_.end(), std::uint64_t{0});
  const std::uint64_t rest = std::uint64_t{grid_w} * grid_h - used;
  if (rest > 0) m.runs_.push_back(static_cast<std::uint32_t>(rest));
  return m;
}

RleMask RleMask::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw FormatError("RLE text missing ':'");

  auto read_numbers = [](std::string_view s) {
    std::vector<std::uint64_t> values;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) break;
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc{} || (ptr != s.data() + s.size() &&
                                !std::isspace(static_cast<unsigned char>(*ptr)))) {
        throw FormatError("RLE text has non-numeric token near offset " + std::to_string(i));
      }
      values.push_back(v);
      i = static_cast<std::size_t>(ptr - s.data());
    }
    return values;
  };

  const auto header = read_numbers(text.substr(0, colon));
  if (header.size() != 2) throw FormatError("RLE header must be 'grid_w grid_h'");
  const auto body = read_numbers(text.substr(colon + 1));
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (header[0] > kMax || header[1] > kMax) throw FormatError("RLE grid too large");
  std::vector<std::uint32_t> runs;
  runs.reserve(body.size());
  for (auto v : body) {
    if (v > kMax) throw FormatError("RLE run too long");
    runs.push_back(static_cast<std::uint32_t>(v));
  }
  return RleMask(static_cast<std::uint32_t>(header[0]), static_cast<std::uint32_t>(header[1]),
                 std::move(runs));
}

std::string RleMask::to_string() const {
  std::string out = std::to_string(grid_w_) + " " + std::to_string(grid_h_) + ":";
  for (auto r : runs_) {
    out += ' ';
    out += std::to_string(r);
  }
  return out;
}

std::vector<std::uint8_t> RleMask::decode() const {
  std::vector<std::uint8_t> bitmap(std::size_t{grid_w_} * grid_h_, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (i % 2 == 1) std::fill_n(bitmap.begin() + static_cast<std::ptrdiff_t>(pos), runs_[i], 1);
    pos += runs_[i];
  }
  return bitmap;
}

std::uint64_t RleMask::area() const {
  std::uint64_t a = 0;
  for (std::size_t i = 1; i < runs_.size(); i += 2) a += runs_[i];
  return a;
}

BBox mask_to_bbox(const RleMask& m) {
  const std::uint64_t W = m.grid_w();
  if (W == 0) return BBox::none();
  const auto& runs = m.runs();
  std::uint64_t pos = 0;
  std::uint64_t xmin = W, xmax = 0, ymin = std::numeric_limits<std::uint64_t>::max(), ymax = 0;
  bool any = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::uint64_t len = runs[i];
    if (i % 2 == 1 && len > 0) {
      const std::uint64_t first = pos, last = pos + len - 1;
      const std::uint64_t r0 = first / W, r1 = last / W;
      if (!any) ymin = r0;
      ymax = r1;
      any = true;
      if (r0 == r1) {
        xmin = std::min(xmin, first % W);
        xmax = std::max(xmax, last % W);
      } else {
        xmin = 0;
        xmax = W - 1;
      }
    }
    pos += len;
  }
  if (!any) return BBox::none();
  return BBox::from_top_left(static_cast<double>(xmin), static_cast<double>(ymin),
                             static_cast<double>(xmax - xmin + 1),
                             static_cast<double>(ymax - ymin + 1));
}

}  // namespace kftrack
