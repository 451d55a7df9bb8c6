#include "arcroll/plots.hpp"

#include "arcroll/svg.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

namespace arcroll {

namespace {

// Projects world points onto a plot axis pair: (x, y) overhead or (x, z)
// from the side.
struct Projection {
  bool side = false;
  double u(const Vec3& p) const { return p.x(); }
  double v(const Vec3& p) const { return side ? p.z() : p.y(); }
};

void write_view(std::ostream& out, const Trajectory& traj, bool side) {
  const Projection proj{side};
  const double w = 800.0, h = 560.0, margin = 50.0;

  double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
  auto grow = [&](const Vec3& p) {
    ulo = std::min(ulo, proj.u(p));
    uhi = std::max(uhi, proj.u(p));
    vlo = std::min(vlo, proj.v(p));
    vhi = std::max(vhi, proj.v(p));
  };
  for (const TrajectorySample& s : traj.samples) {
    grow(s.com_world);
    grow(s.q1_world);
    grow(s.q2_world);
  }
  if (traj.samples.empty()) {
    ulo = vlo = 0.0;
    uhi = vhi = 1.0;
  }
  const double pad = 0.05 * std::max({uhi - ulo, vhi - vlo, 1.0});
  ulo -= pad;
  uhi += pad;
  vlo -= pad;
  vhi += pad;
  const double scale =
      std::min((w - 2 * margin) / (uhi - ulo), (h - 2 * margin) / (vhi - vlo));
  auto x_of = [&](const Vec3& p) { return margin + (proj.u(p) - ulo) * scale; };
  auto y_of = [&](const Vec3& p) { return h - margin - (proj.v(p) - vlo) * scale; };

  SvgWriter svg(out, w, h);
  svg.rect(0, 0, w, h, "#ffffff");

  std::vector<std::pair<double, double>> com;
  for (const TrajectorySample& s : traj.samples) {
    com.push_back({x_of(s.com_world), y_of(s.com_world)});
  }
  if (com.size() > 1) svg.polyline(com, "#303030", 1.2);

  for (const TrajectorySample& s : traj.samples) {
    svg.circle(x_of(s.q1_world), y_of(s.q1_world), 2.2, "#1f77b4");
    svg.circle(x_of(s.q2_world), y_of(s.q2_world), 2.2, "#ff7f0e");
  }
  for (const TrajectorySample& s : traj.samples) {
    const double cx = x_of(s.com_world), cy = y_of(s.com_world);
    svg.line(cx - 3, cy, cx + 3, cy, "#d62728", 1.0);
    svg.line(cx, cy - 3, cx, cy + 3, "#d62728", 1.0);
    if (s.event) {
      svg.line(cx - 5, cy - 5, cx + 5, cy + 5, "#2ca02c", 1.2);
      svg.line(cx - 5, cy + 5, cx + 5, cy - 5, "#2ca02c", 1.2);
    }
  }
  svg.text(margin, margin - 12, 14, side ? "side view (x-z, mm)" : "overhead view (x-y, mm)");
}

}  // namespace

void write_trajectory_top_svg(std::ostream& out, const Trajectory& traj) {
  write_view(out, traj, false);
}

void write_trajectory_side_svg(std::ostream& out, const Trajectory& traj) {
  write_view(out, traj, true);
}

}  // namespace arcroll
