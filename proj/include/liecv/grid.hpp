#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "liecv/types.hpp"

namespace liecv {

struct Axis {
  int count;
  double lo;
  double hi;
};

/// Uniform rectangular grid over R^d, endpoints included, row-major flattening.
class Grid {
 public:
  Grid() = default;

  explicit Grid(std::vector<Axis> axes, std::size_t max_points = 4096)
      : axes_(std::move(axes)) {
    std::size_t n = 1;
    for (const auto& a : axes_) {
      if (a.count < 2) throw std::invalid_argument("Grid: axis count must be >= 2");
      if (!(a.lo < a.hi)) throw std::invalid_argument("Grid: need lo < hi");
      n *= static_cast<std::size_t>(a.count);
    }
    if (n > max_points)
      throw std::invalid_argument("Grid: " + std::to_string(n) +
                                  " points exceeds cap " + std::to_string(max_points));
    size_ = n;
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t size() const { return size_; }

  double spacing(int a) const {
    return (axes_[a].hi - axes_[a].lo) / (axes_[a].count - 1);
  }
  double point(int a, int i) const { return axes_[a].lo + i * spacing(a); }

  /// trapezoid weight along one axis
  double trap_weight(int a, int i) const {
    double h = spacing(a);
    return (i == 0 || i == axes_[a].count - 1) ? h / 2 : h;
  }

  std::size_t flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) f = f * axes_[a].count + idx[a];
    return f;
  }
  std::vector<int> unflatten(std::size_t f) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % axes_[a].count);
      f /= axes_[a].count;
    }
    return idx;
  }
  RVec coords(std::size_t f) const {
    auto idx = unflatten(f);
    RVec p(dim());
    for (int a = 0; a < dim(); ++a) p(a) = point(a, idx[a]);
    return p;
  }
  /// product of per-axis trapezoid weights
  double trap_weight(std::size_t f) const {
    auto idx = unflatten(f);
    double w = 1;
    for (int a = 0; a < dim(); ++a) w *= trap_weight(a, idx[a]);
    return w;
  }
  /// product of per-axis spacings (uniform quadrature weight)
  double cell_volume() const {
    double w = 1;
    for (int a = 0; a < dim(); ++a) w *= spacing(a);
    return w;
  }

  bool contains(const RVec& p, double slack = 0.0) const {
    for (int a = 0; a < dim(); ++a)
      if (p(a) < axes_[a].lo - slack || p(a) > axes_[a].hi + slack) return false;
    return true;
  }

  /// Frequency grid conjugate to this one: count points per axis with spacing
  /// 2*pi/(count*h), centered so index count/2 maps to frequency zero.
  Grid conjugate(std::size_t max_points = SIZE_MAX) const {
    std::vector<Axis> out;
    out.reserve(axes_.size());
    for (int a = 0; a < dim(); ++a) {
      int m = axes_[a].count;
      double dq = 2 * M_PI / (m * spacing(a));
      double lo = -(m / 2) * dq;
      out.push_back({m, lo, lo + (m - 1) * dq});
    }
    return Grid(std::move(out), max_points);
  }

  bool operator==(const Grid& o) const {
    if (axes_.size() != o.axes_.size()) return false;
    for (std::size_t a = 0; a < axes_.size(); ++a)
      if (axes_[a].count != o.axes_[a].count ||
          std::abs(axes_[a].lo - o.axes_[a].lo) > 1e-12 ||
          std::abs(axes_[a].hi - o.axes_[a].hi) > 1e-12)
        return false;
    return true;
  }

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

/// Complex samples on a Grid, row-major.
struct GridFunction {
  Grid grid;
  CVec values;

  GridFunction() = default;
  GridFunction(Grid g, CVec v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size())
      throw std::invalid_argument("GridFunction: value count mismatch");
    if (!values.allFinite())
      throw std::invalid_argument("GridFunction: non-finite sample");
  }
};

inline GridFunction sample(const Grid& g, const std::function<Complex(const RVec&)>& f) {
  CVec v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v(i) = f(g.coords(i));
  return GridFunction(g, std::move(v));
}

/// trapezoid-weighted L2 norm
inline double l2_norm(const GridFunction& f) {
  double s = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    s += f.grid.trap_weight(i) * std::norm(f.values(i));
  return std::sqrt(s);
}

inline Complex inner(const GridFunction& f, const GridFunction& g) {
  Complex s = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    s += f.grid.trap_weight(i) * f.values(i) * std::conj(g.values(i));
  return s;
}

inline Complex integral(const GridFunction& f) {
  Complex s = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    s += f.grid.trap_weight(i) * f.values(i);
  return s;
}

/// largest |f| over points lying on any boundary face
inline double boundary_max(const GridFunction& f) {
  double m = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    auto idx = f.grid.unflatten(i);
    bool bd = false;
    for (int a = 0; a < f.grid.dim(); ++a)
      if (idx[a] == 0 || idx[a] == f.grid.axis(a).count - 1) bd = true;
    if (bd) m = std::max(m, std::abs(f.values(i)));
  }
  return m;
}

// ---- CSV serialization: header row of grid metadata, then index,re,im ----

inline void write_csv(const GridFunction& f, std::ostream& os) {
  os << "dims," << f.grid.dim();
  char buf[64];
  for (int a = 0; a < f.grid.dim(); ++a) {
    const Axis& ax = f.grid.axis(a);
    std::snprintf(buf, sizeof buf, ",axis,%d,%.17g,%.17g", ax.count, ax.lo, ax.hi);
    os << buf;
  }
  os << "\nindex,re,im\n";
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, f.values(i).real(),
                  f.values(i).imag());
    os << buf;
  }
}

inline void write_csv(const GridFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(f, os);
}

inline GridFunction read_csv(std::istream& is, std::size_t max_points = 4096) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("GridFunction csv: empty");
  std::vector<std::string> tok;
  {
    std::stringstream ss(line);
    std::string t;
    while (std::getline(ss, t, ',')) tok.push_back(t);
  }
  if (tok.size() < 2 || tok[0] != "dims")
    throw std::runtime_error("GridFunction csv: bad header");
  int d = std::stoi(tok[1]);
  std::vector<Axis> axes;
  std::size_t pos = 2;
  for (int a = 0; a < d; ++a) {
    if (pos + 3 >= tok.size() || tok[pos] != "axis")
      throw std::runtime_error("GridFunction csv: bad axis header");
    axes.push_back({std::stoi(tok[pos + 1]), std::stod(tok[pos + 2]),
                    std::stod(tok[pos + 3])});
    pos += 4;
  }
  Grid g(axes, max_points);
  if (!std::getline(is, line) || line.rfind("index", 0) != 0)
    throw std::runtime_error("GridFunction csv: missing column header");
  CVec v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("GridFunction csv: truncated");
    std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
    v(std::stoul(line.substr(0, c1))) =
        Complex(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1)));
  }
  return GridFunction(g, std::move(v));
}

inline GridFunction read_csv_file(const std::string& path, std::size_t max_points = 4096) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is, max_points);
}

}  // namespace liecv
