#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "lipemb/io.hpp"

namespace lipemb {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Path of the union of unit cells, one subpath per horizontal run. SVG y grows
// downwards, so rows are flipped against `top`.
std::string runs_path(const std::vector<Point>& cells, double s, std::int64_t x0, std::int64_t top) {
  std::map<std::int64_t, std::vector<std::int64_t>> rows;
  for (Point c : cells) rows[c.y].push_back(c.x);
  std::ostringstream d;
  for (auto& [y, xs] : rows) {
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i < xs.size();) {
      std::size_t k = i;
      while (k + 1 < xs.size() && xs[k + 1] == xs[k] + 1) ++k;
      d << 'M' << fmt(static_cast<double>(xs[i] - x0) * s) << ',' << fmt(static_cast<double>(top - 1 - y) * s) << 'h'
        << fmt(static_cast<double>(xs[k] - xs[i] + 1) * s) << 'v' << fmt(s) << 'h'
        << fmt(-static_cast<double>(xs[k] - xs[i] + 1) * s) << 'z';
      i = k + 1;
    }
  }
  return d.str();
}

const char* fill_for(bool good, std::int32_t component) {
  if (!good) return "#d9534f";
  if (component >= 0) return "#f0ad4e";
  return "#dff0d8";
}

}  // namespace

std::string render_svg(const Hierarchy& h, int level, const RenderOptions& opt) {
  if (level < 0 || level > h.depth) throw PreconditionError("level not built");
  const Level& lvl = h.level(level);
  const double s = opt.scale;
  // Drawing units: level-(j-1) cells for j >= 1, level-0 cells for j = 0.
  const Rect area = level == 0 ? lvl.window : h.level(level - 1).window;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(static_cast<double>(area.width()) * s)
    << "\" height=\"" << fmt(static_cast<double>(area.height()) * s) << "\" data-level=\"" << level
    << "\" data-family=\"" << family_name(h.family) << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  if (level == 0) {
    for (std::size_t i = 0; i < lvl.block.size(); ++i) {
      const Point u = lvl.cell(i);
      o << "<g class=\"block\" data-id=\"" << i << "\"><path d=\"" << runs_path({u}, s, area.x0, area.y1)
        << "\" fill=\"" << fill_for(!lvl.bad[i], lvl.component[i]) << "\" stroke=\"#888\" stroke-width=\"0.2\"/></g>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

  for (const BlockRec& b : lvl.blocks) {
    std::vector<Point> cells;
    for (Point c : b.members)
      if (area.contains(c)) cells.push_back(c);
    o << "<g class=\"block\" data-id=\"" << b.id << "\" data-cells=\"" << b.cells.size() << "\"><path d=\""
      << runs_path(cells, s, area.x0, area.y1) << "\" fill=\"" << fill_for(b.good, b.component)
      << "\" fill-opacity=\"0.8\"/></g>\n";
  }

  // Bad lower components, shaded on top.
  const Level& lower = h.level(level - 1);
  for (const ComponentRec& c : lower.components)
    o << "<path class=\"bad\" d=\"" << runs_path(c.cells, s, area.x0, area.y1) << "\" fill=\"#5b2c6f\"/>\n";

  const LevelGeometry& g = lvl.geom;
  const Rect W = lvl.window;
  if (opt.buffers)
    for (std::int64_t y = W.y0; y < W.y1; ++y)
      for (std::int64_t x = W.x0; x < W.x1; ++x)
        for (Side side : {Side::R, Side::T}) {
          const Point u{x, y};
          if (!W.contains(u + side_offset(side))) continue;
          const Rect r = shared_buffer_rect(u, side, g.n, g.buffer).intersect(area);
          if (r.empty()) continue;
          const bool conj = side == Side::R ? lvl.conj_right[lvl.index(u)] : lvl.conj_up[lvl.index(u)];
          o << "<rect class=\"buffer\" x=\"" << fmt(static_cast<double>(r.x0 - area.x0) * s) << "\" y=\""
            << fmt(static_cast<double>(area.y1 - r.y1) * s) << "\" width=\"" << fmt(static_cast<double>(r.width()) * s)
            << "\" height=\"" << fmt(static_cast<double>(r.height()) * s) << "\" fill=\""
            << (conj ? "#337ab7" : "#999999") << "\" fill-opacity=\"0.15\"/>\n";
        }

  if (opt.curves) {
    const CurveField& cf = lvl.curves;
    auto sx = [&](std::int64_t x) { return fmt(static_cast<double>(x - area.x0) * s); };
    auto sy = [&](std::int64_t y) { return fmt(static_cast<double>(area.y1 - y) * s); };
    for (std::int64_t a = W.x0; a <= W.x1; ++a) {
      o << "<polyline class=\"curve\" fill=\"none\" stroke=\"#000\" stroke-width=\"0.6\" points=\"";
      for (std::int64_t y = W.y0 * g.n; y < W.y1 * g.n; ++y) {
        const std::int64_t X = a * g.n + cf.offset_v(a, y + 1);
        o << sx(X) << ',' << sy(y) << ' ' << sx(X) << ',' << sy(y + 1) << ' ';
      }
      o << "\"/>\n";
    }
    for (std::int64_t b = W.y0; b <= W.y1; ++b) {
      o << "<polyline class=\"curve\" fill=\"none\" stroke=\"#000\" stroke-width=\"0.6\" points=\"";
      for (std::int64_t x = W.x0 * g.n; x < W.x1 * g.n; ++x) {
        const std::int64_t Y = b * g.n + cf.offset_h(b, x + 1);
        o << sx(x) << ',' << sy(Y) << ' ' << sx(x + 1) << ',' << sy(Y) << ' ';
      }
      o << "\"/>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lipemb
