#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seisal {

// Axis convention used throughout: t is the vertical (time or depth) axis and
// varies fastest in memory, x walks crosslines, y walks inlines.
enum class Axis { T = 0, X = 1, Y = 2 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::T: return "t";
    case Axis::X: return "x";
    case Axis::Y: return "y";
  }
  return "?";
}

inline Axis axis_from_name(const std::string& s) {
  if (s == "t") return Axis::T;
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  throw std::invalid_argument("unknown axis '" + s + "', expected t, x or y");
}

// Error taxonomy, mirrored by the CLI exit codes: configuration problems exit
// with 2, unreadable input files with 3, and failures inside a processing
// stage with 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct stage_error : std::runtime_error {
  stage_error(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage(stage) {}
  std::string stage;
};

struct Dims {
  int t = 0;
  int x = 0;
  int y = 0;

  bool operator==(const Dims&) const = default;

  std::size_t count() const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(x) *
           static_cast<std::size_t>(y);
  }

  int along(Axis a) const {
    switch (a) {
      case Axis::T: return t;
      case Axis::X: return x;
      case Axis::Y: return y;
    }
    return 0;
  }

  std::string str() const {
    return std::to_string(t) + "x" + std::to_string(x) + "x" +
           std::to_string(y);
  }
};

}  // namespace seisal
