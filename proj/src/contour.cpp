#include "gravitom/contour.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "text_io.hpp"

namespace gravitom {

namespace {

// Vertices are identified by the grid edge they sit on, so the two cells
// sharing an edge produce bit-identical vertices and chains stitch by key
// equality. Key layout: edge between node (i, j) and its +x neighbor is
// 2*(j*nx + i), between (i, j) and its +y neighbor 2*(j*nx + i) + 1.
using EdgeKey = std::int64_t;

struct Segment {
  EdgeKey a, b;
};

class LevelTracer {
 public:
  LevelTracer(const FieldGrid& g, double level) : g_(g), level_(level) {}

  std::vector<ContourLine> run() {
    collect_segments();
    return stitch();
  }

 private:
  bool inside(std::size_t i, std::size_t j) const {
    return g_.at(i, j) > level_;
  }

  EdgeKey hkey(std::size_t i, std::size_t j) const {
    return 2 * static_cast<EdgeKey>(j * g_.spec.nx + i);
  }
  EdgeKey vkey(std::size_t i, std::size_t j) const {
    return 2 * static_cast<EdgeKey>(j * g_.spec.nx + i) + 1;
  }

  Station vertex(EdgeKey key) {
    auto it = verts_.find(key);
    if (it != verts_.end()) return it->second;
    const std::size_t node = static_cast<std::size_t>(key / 2);
    const std::size_t i = node % g_.spec.nx;
    const std::size_t j = node / g_.spec.nx;
    const double va = g_.at(i, j);
    Station st;
    if (key % 2 == 0) {
      const double vb = g_.at(i + 1, j);
      const double t = (level_ - va) / (vb - va);
      st = {g_.node_x(i) + t * g_.spec.dx(), g_.node_y(j)};
    } else {
      const double vb = g_.at(i, j + 1);
      const double t = (level_ - va) / (vb - va);
      st = {g_.node_x(i), g_.node_y(j) + t * g_.spec.dy()};
    }
    verts_.emplace(key, st);
    return st;
  }

  void add(EdgeKey a, EdgeKey b) { segs_.push_back({a, b}); }

  void collect_segments() {
    for (std::size_t j = 0; j + 1 < g_.spec.ny; ++j) {
      for (std::size_t i = 0; i + 1 < g_.spec.nx; ++i) {
        const unsigned code = (inside(i, j) ? 1u : 0u) |
                              (inside(i + 1, j) ? 2u : 0u) |
                              (inside(i + 1, j + 1) ? 4u : 0u) |
                              (inside(i, j + 1) ? 8u : 0u);
        if (code == 0 || code == 15) continue;
        const EdgeKey B = hkey(i, j), T = hkey(i, j + 1);
        const EdgeKey L = vkey(i, j), R = vkey(i + 1, j);
        switch (code) {
          case 1: case 14: add(L, B); break;
          case 2: case 13: add(B, R); break;
          case 3: case 12: add(L, R); break;
          case 4: case 11: add(R, T); break;
          case 6: case 9:  add(B, T); break;
          case 7: case 8:  add(L, T); break;
          case 5: case 10: {
            const double center = 0.25 * (g_.at(i, j) + g_.at(i + 1, j) +
                                          g_.at(i + 1, j + 1) +
                                          g_.at(i, j + 1));
            const bool center_in = center > level_;
            // The two arcs hug either the outside corners or the inside
            // corners, depending on whether the cell center joins the
            // inside region.
            if ((code == 5) == center_in) {
              add(B, R);
              add(L, T);
            } else {
              add(B, L);
              add(R, T);
            }
            break;
          }
          default: break;
        }
      }
    }
  }

  std::vector<ContourLine> stitch() {
    // Vertex -> the (at most two) segments meeting there.
    std::unordered_map<EdgeKey, std::pair<int, int>> touch;
    auto note = [&](EdgeKey k, int seg) {
      auto [it, fresh] = touch.emplace(k, std::pair<int, int>{seg, -1});
      if (!fresh) it->second.second = seg;
    };
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      note(segs_[s].a, static_cast<int>(s));
      note(segs_[s].b, static_cast<int>(s));
    }

    std::vector<ContourLine> out;
    std::vector<char> used(segs_.size(), 0);
    auto next_seg = [&](EdgeKey at, int coming_from) -> int {
      const auto it = touch.find(at);
      if (it == touch.end()) return -1;
      const auto [s1, s2] = it->second;
      if (s1 != coming_from && s1 >= 0 && !used[s1]) return s1;
      if (s2 != coming_from && s2 >= 0 && !used[s2]) return s2;
      return -1;
    };

    for (std::size_t s0 = 0; s0 < segs_.size(); ++s0) {
      if (used[s0]) continue;
      // Walk backward to the chain's start (or all the way around).
      EdgeKey start = segs_[s0].a;
      int seg = static_cast<int>(s0);
      while (true) {
        const int prev = next_seg(start, seg);
        if (prev < 0) break;
        seg = prev;
        start = segs_[seg].a == start ? segs_[seg].b : segs_[seg].a;
        if (seg == static_cast<int>(s0)) break;  // closed loop
      }
      // Walk forward collecting vertices.
      ContourLine line;
      line.level = level_;
      EdgeKey at = start;
      line.points.push_back(vertex(at));
      seg = -1;
      while (true) {
        const int nxt = next_seg(at, seg);
        if (nxt < 0) break;
        used[nxt] = 1;
        at = segs_[nxt].a == at ? segs_[nxt].b : segs_[nxt].a;
        seg = nxt;
        line.points.push_back(vertex(at));
      }
      line.closed = line.points.size() > 2 && at == start;
      if (line.closed) line.points.back() = line.points.front();
      out.push_back(std::move(line));
    }
    return out;
  }

  const FieldGrid& g_;
  double level_;
  std::vector<Segment> segs_;
  std::unordered_map<EdgeKey, Station> verts_;
};

}  // namespace

std::vector<ContourLine> extract_contours(const FieldGrid& grid,
                                          const std::vector<double>& levels) {
  grid.validate();
  for (double level : levels)
    if (!std::isfinite(level))
      throw std::domain_error("extract_contours: levels must be finite");

  std::vector<ContourLine> out;
  for (double level : levels) {
    LevelTracer tracer(grid, level);
    auto lines = tracer.run();
    out.insert(out.end(), std::make_move_iterator(lines.begin()),
               std::make_move_iterator(lines.end()));
  }
  return out;
}

void write_contours(std::ostream& out, const std::vector<ContourLine>& lines) {
  using detail::format_double;
  out << "# gravitom contours v1\n";
  out << "# polyline level <mGal> points <count> closed <0|1>, then x_km y_km"
         " per line\n";
  for (const ContourLine& line : lines) {
    out << "polyline level " << format_double(line.level) << " points "
        << line.points.size() << " closed " << (line.closed ? 1 : 0) << '\n';
    for (const Station& p : line.points)
      out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
}

void write_contours(const std::string& path,
                    const std::vector<ContourLine>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_contours(out, lines);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

}  // namespace gravitom
