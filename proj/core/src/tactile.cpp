#include "tgrasp/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

namespace tgrasp {

namespace {

constexpr double kWorkspaceBound = 1000.0;  // mm

Circle circle_from(const Vec2& a, const Vec2& b) {
  return {(a + b) * 0.5, 0.5 * (a - b).norm()};
}

Circle circle_from(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ax = a.x, ay = a.y, bx = b.x, by = b.y, cx = c.x, cy = c.y;
  const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  if (std::abs(d) < 1e-12) {
    // Collinear: widest pair.
    Circle best = circle_from(a, b);
    for (const Circle& cand : {circle_from(a, c), circle_from(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const Vec2 center((a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d,
                    (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d);
  return {center, (center - a).norm()};
}

bool in_circle(const Circle& c, const Vec2& p, double eps = 1e-7) {
  return (p - c.center).norm() <= c.radius + eps;
}

Circle welzl(std::vector<Vec2>& pts) {
  // Iterative move-to-front Welzl, expected linear time.
  Circle c{pts[0], 0.0};
  for (size_t i = 1; i < pts.size(); ++i) {
    if (in_circle(c, pts[i])) continue;
    c = {pts[i], 0.0};
    for (size_t j = 0; j < i; ++j) {
      if (in_circle(c, pts[j])) continue;
      c = circle_from(pts[i], pts[j]);
      for (size_t k = 0; k < j; ++k) {
        if (in_circle(c, pts[k])) continue;
        c = circle_from(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

}  // namespace

Circle min_enclosing_circle(const std::vector<Vec2>& points) {
  if (points.empty())
    throw std::invalid_argument("min_enclosing_circle: empty point set");
  if (points.size() == 1) return {points[0], 0.0};
  std::vector<Vec2> pts = points.size() > 64 ? convex_hull(points) : points;
  if (pts.size() == 1) return {pts[0], 0.0};
  std::mt19937_64 rng(0x5eed5eedULL);
  std::shuffle(pts.begin(), pts.end(), rng);
  return welzl(pts);
}

TactileFrame sense(const Scene& scene, const GripperSpec& gripper,
                   const Vec2& p, double h, uint64_t noise_seed,
                   const TactileNoise& noise) {
  if (std::abs(p.x) > kWorkspaceBound || std::abs(p.y) > kWorkspaceBound)
    throw std::invalid_argument("sense: pose outside workspace");
  const int T = gripper.tactile_resolution;
  const double ppm = gripper.px_per_mm;
  const double rho = gripper.radius_mm;

  TactileFrame frame;
  frame.contact = BinaryFrame(T, T);
  frame.pose_p = p;
  frame.pose_h = h;

  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      const Vec2 d((j + 0.5 - T / 2.0) / ppm, (i + 0.5 - T / 2.0) / ppm);
      const double l = d.norm();
      if (l > rho) continue;
      const double sag = rho - std::sqrt(rho * rho - l * l);
      const Vec2 w = p + d;
      for (const auto& obj : scene.objects) {
        if (obj.top_height_mm < h - sag) continue;
        if (point_in_polygon(obj.footprint, w)) {
          frame.contact.at(i, j) = 1;
          break;
        }
      }
    }
  }

  // Morphological perturbation first, pixel flips last: dilating after the
  // salt flips would weld isolated noise into components that beat the
  // no-contact area threshold on object-free frames.
  std::mt19937_64 rng(noise_seed);
  if (noise.morphological_step) {
    const bool dilate = (rng() & 1) != 0;
    BinaryFrame out(T, T);
    for (int i = 0; i < T; ++i) {
      for (int j = 0; j < T; ++j) {
        uint8_t acc = dilate ? 0 : 1;
        for (int di = -1; di <= 1; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const int r = i + di, c = j + dj;
            const uint8_t v =
                (r >= 0 && r < T && c >= 0 && c < T) ? frame.contact.at(r, c) : 0;
            if (dilate)
              acc |= v;
            else
              acc &= v;
          }
        }
        out.at(i, j) = acc;
      }
    }
    frame.contact = std::move(out);
  }
  if (noise.salt_pepper_rate > 0.0) {
    std::bernoulli_distribution flip(noise.salt_pepper_rate);
    for (auto& px : frame.contact.v)
      if (flip(rng)) px ^= 1;
  }
  return frame;
}

ContactRegion segment(const TactileFrame& frame, const GripperSpec& gripper,
                      int min_area_px) {
  const int T = frame.contact.rows;
  BinaryFrame filtered(T, T);
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      int count = 0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int r = i + di, c = j + dj;
          if (r >= 0 && r < T && c >= 0 && c < T && frame.contact.at(r, c))
            ++count;
        }
      filtered.at(i, j) = count >= 5 ? 1 : 0;
    }
  }

  // Largest 4-connected component.
  std::vector<int> label(static_cast<size_t>(T) * T, -1);
  std::vector<std::pair<int, int>> best;
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      if (!filtered.at(i, j) || label[i * T + j] >= 0) continue;
      std::vector<std::pair<int, int>> comp;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      label[i * T + j] = 1;
      while (!q.empty()) {
        auto [r, c] = q.front();
        q.pop();
        comp.push_back({r, c});
        constexpr int dr[4] = {1, -1, 0, 0};
        constexpr int dc[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nr = r + dr[k], nc = c + dc[k];
          if (nr >= 0 && nr < T && nc >= 0 && nc < T && filtered.at(nr, nc) &&
              label[nr * T + nc] < 0) {
            label[nr * T + nc] = 1;
            q.push({nr, nc});
          }
        }
      }
      if (comp.size() > best.size()) best = std::move(comp);
    }
  }

  ContactRegion region;
  if (static_cast<int>(best.size()) < min_area_px) return region;

  region.pixels = std::move(best);
  region.has_contact = true;
  const double ppm = gripper.px_per_mm;
  std::vector<Vec2> pts_mm;
  pts_mm.reserve(region.pixels.size());
  for (auto [r, c] : region.pixels)
    pts_mm.push_back({(c + 0.5 - T / 2.0) / ppm, (r + 0.5 - T / 2.0) / ppm});
  region.mec_mm = min_enclosing_circle(pts_mm);
  return region;
}

Vec2 calibration_offset(const ContactRegion& region) {
  if (!region.has_contact) throw std::runtime_error("no contact");
  // z is the frame origin, so d = z - t = -t.
  return Vec2{0.0, 0.0} - region.mec_mm.center;
}

Vec2 apply_calibration_move(const Vec2& p, const Vec2& d) { return p - d; }

double adaptive_drop_height(double r_hat_mm, double contact_h_mm,
                            const AhdParams& params) {
  const double r = std::clamp(r_hat_mm, params.r_min_mm, params.r_max_mm);
  return contact_h_mm - params.press_gain * r;
}

}  // namespace tgrasp
