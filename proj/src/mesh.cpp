#include "sgfe/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace sgfe {

double Mesh::triangle_area(int t) const {
  const auto& tr = tri_p1[t];
  const auto& a = p1_coords[tr[0]];
  const auto& b = p1_coords[tr[1]];
  const auto& c = p1_coords[tr[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

Mesh build_structured_mesh(int level) {
  if (level < 1 || level > 12)
    throw std::invalid_argument("mesh level out of range [1,12]");

  Mesh m;
  m.level = level;
  m.n = 1 << level;
  m.h = 1.0 / m.n;
  const int n = m.n;

  m.p1_coords.resize((n + 1) * (n + 1));
  m.p1_boundary.assign((n + 1) * (n + 1), false);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const int id = j * (n + 1) + i;
      m.p1_coords[id] = {-0.5 + i * m.h, -0.5 + j * m.h};
      m.p1_boundary[id] = (i == 0 || i == n || j == 0 || j == n);
    }

  const int np2 = 2 * n + 1;
  m.p2_coords.resize(np2 * np2);
  m.p2_boundary.assign(np2 * np2, false);
  for (int j = 0; j < np2; ++j)
    for (int i = 0; i < np2; ++i) {
      const int id = j * np2 + i;
      m.p2_coords[id] = {-0.5 + i * 0.5 * m.h, -0.5 + j * 0.5 * m.h};
      m.p2_boundary[id] = (i == 0 || i == np2 - 1 || j == 0 || j == np2 - 1);
    }

  auto v1 = [n](int i, int j) { return j * (n + 1) + i; };
  auto v2 = [np2](int i, int j) { return j * np2 + i; };  // half-step grid

  m.tri_p1.reserve(2 * n * n);
  m.tri_p2.reserve(2 * n * n);
  auto push = [&](std::array<int, 2> a, std::array<int, 2> b,
                  std::array<int, 2> c) {
    m.tri_p1.push_back({v1(a[0], a[1]), v1(b[0], b[1]), v1(c[0], c[1])});
    auto mid = [&](std::array<int, 2> p, std::array<int, 2> q) {
      return v2(p[0] + q[0], p[1] + q[1]);
    };
    m.tri_p2.push_back({v2(2 * a[0], 2 * a[1]), v2(2 * b[0], 2 * b[1]),
                        v2(2 * c[0], 2 * c[1]), mid(a, b), mid(b, c),
                        mid(a, c)});
  };
  for (int cy = 0; cy < n; ++cy)
    for (int cx = 0; cx < n; ++cx) {
      std::array<int, 2> p00{cx, cy}, p10{cx + 1, cy}, p01{cx, cy + 1},
          p11{cx + 1, cy + 1};
      if ((cx + cy) % 2 == 0) {
        push(p00, p10, p11);
        push(p00, p11, p01);
      } else {
        push(p00, p10, p01);
        push(p10, p11, p01);
      }
    }

  m.p2_interior_index.assign(np2 * np2, -1);
  for (int id = 0; id < np2 * np2; ++id)
    if (!m.p2_boundary[id]) {
      m.p2_interior_index[id] = static_cast<int>(m.interior_p2.size());
      m.interior_p2.push_back(id);
    }
  return m;
}

}  // namespace sgfe
