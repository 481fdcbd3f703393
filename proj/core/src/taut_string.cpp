#include "taut_string.hpp"

#include <algorithm>
#include <limits>

#include "advrisk/errors.hpp"

namespace advrisk::detail {

namespace {

using ld = long double;
constexpr ld kInf = std::numeric_limits<ld>::infinity();

// A vertical window at abscissa s = G0 + G1 bounding G1 from below and/or above.
// Each bound remembers the corridor corner (G0, G1) it came from and its cell index.
struct Window {
  ld s = 0;
  ld lo = -kInf, lo_g0 = 0;
  ld hi = kInf, hi_g0 = 0;
  std::size_t lo_j = 0, hi_j = 0;
};

struct Vertex {
  ld g0, g1;
  std::size_t j;  // cell whose box corner this vertex is; npos for the end points
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct Polyline {
  std::vector<ld> g0, g1, s;

  // Smallest s on the path with coord(s) >= v.
  ld first_ge(const std::vector<ld>& c, ld v) const {
    const auto it = std::lower_bound(c.begin(), c.end(), v);
    if (it == c.end()) return s.back();
    const std::size_t p = static_cast<std::size_t>(it - c.begin());
    if (p == 0) return s.front();
    const ld t = (v - c[p - 1]) / (c[p] - c[p - 1]);
    return s[p - 1] + t * (s[p] - s[p - 1]);
  }

  // Largest s on the path with coord(s) <= v.
  ld last_le(const std::vector<ld>& c, ld v) const {
    const auto it = std::upper_bound(c.begin(), c.end(), v);
    if (it == c.begin()) return s.front();
    const std::size_t q = static_cast<std::size_t>(it - c.begin()) - 1;
    if (q + 1 == c.size()) return s.back();
    const ld t = (v - c[q]) / (c[q + 1] - c[q]);
    return s[q] + t * (s[q + 1] - s[q]);
  }

  std::size_t segment(ld at) const {
    const auto it = std::upper_bound(s.begin(), s.end(), at);
    std::size_t p = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    return std::min(p, s.size() - 2);
  }
};

}  // namespace

BandPath taut_band_path(const std::vector<double>& m0, const std::vector<double>& m1, std::size_t k) {
  const std::size_t n = m0.size();
  if (n == 0 || m1.size() != n) throw DomainError("taut string: mass vectors must be nonempty and equal length");

  std::vector<ld> c0(n), c1(n);
  ld a0 = 0, a1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a0 += m0[i];
    a1 += m1[i];
    c0[i] = a0;
    c1[i] = a1;
  }
  const ld t0 = c0.back(), t1 = c1.back();
  // Cumulative mass through cell i, with F(i) = 0 for i < 0 and F(i) = total past the end.
  auto F = [n](const std::vector<ld>& c, long long i) -> ld {
    if (i < 0) return 0;
    if (static_cast<std::size_t>(i) >= n - 1) return c.back();
    return c[static_cast<std::size_t>(i)];
  };
  const long long kk = static_cast<long long>(k);

  std::vector<Window> raw;
  raw.reserve(2 * n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const long long jj = static_cast<long long>(j);
    // Upper corner of box j: the path must pass below-right of it.
    Window u;
    u.hi_g0 = F(c0, jj - kk);
    u.hi = F(c1, jj + kk);
    u.s = u.hi_g0 + u.hi;
    u.hi_j = j;
    raw.push_back(u);
    // Lower corner: above-left.
    Window d;
    d.lo_g0 = F(c0, jj + kk);
    d.lo = F(c1, jj - kk);
    d.s = d.lo_g0 + d.lo;
    d.lo_j = j;
    raw.push_back(d);
  }
  Window end;
  end.s = t0 + t1;
  end.lo = end.hi = t1;
  end.lo_g0 = end.hi_g0 = t0;
  end.lo_j = end.hi_j = n - 1;
  raw.push_back(end);

  std::stable_sort(raw.begin(), raw.end(), [](const Window& a, const Window& b) { return a.s < b.s; });
  std::vector<Window> w;
  for (const Window& g : raw) {
    if (!(g.s > 0)) continue;  // the origin is the start point
    if (w.empty() || w.back().s != g.s) {
      w.push_back(g);
      continue;
    }
    Window& m = w.back();
    if (g.lo > m.lo) {
      m.lo = g.lo;
      m.lo_g0 = g.lo_g0;
      m.lo_j = g.lo_j;
    }
    if (g.hi < m.hi) {
      m.hi = g.hi;
      m.hi_g0 = g.hi_g0;
      m.hi_j = g.hi_j;
    }
  }
  for (Window& g : w)
    if (g.lo > g.hi) g.lo = g.hi;  // rounding at coincident corners

  // String pulling: keep the cone of feasible slopes from the current anchor;
  // when it closes, the string bends at the window that defined the violated side.
  std::vector<Vertex> verts{{0, 0, npos}};
  ld s0 = 0, y0 = 0;
  std::size_t t = 0;
  while (true) {
    ld low = -kInf, high = kInf;
    std::size_t li = npos, hi = npos;
    bool bent = false;
    for (std::size_t q = t; q < w.size(); ++q) {
      const Window& g = w[q];
      const ld ds = g.s - s0;
      const ld a = g.lo == -kInf ? -kInf : (g.lo - y0) / ds;
      const ld b = g.hi == kInf ? kInf : (g.hi - y0) / ds;
      if (a > high) {
        const Window& v = w[hi];
        verts.push_back({v.hi_g0, v.hi, v.hi_j});
        s0 = v.s;
        y0 = v.hi;
        t = hi + 1;
        bent = true;
        break;
      }
      if (b < low) {
        const Window& v = w[li];
        verts.push_back({v.lo_g0, v.lo, v.lo_j});
        s0 = v.s;
        y0 = v.lo;
        t = li + 1;
        bent = true;
        break;
      }
      if (a > low) {
        low = a;
        li = q;
      }
      if (b < high) {
        high = b;
        hi = q;
      }
    }
    if (!bent) break;
  }
  if (verts.back().j != n - 1) verts.push_back({t0, t1, npos});
  verts.back().j = npos;

  Polyline path;
  for (const Vertex& v : verts) {
    const ld g0 = path.g0.empty() ? v.g0 : std::max(v.g0, path.g0.back());
    const ld g1 = path.g1.empty() ? v.g1 : std::max(v.g1, path.g1.back());
    path.g0.push_back(g0);
    path.g1.push_back(g1);
    path.s.push_back(g0 + g1);
  }

  // Place each cell's cumulative point on the string: at its own corner when the
  // string bends there, otherwise as early as its box allows.
  std::vector<std::size_t> forced(n, npos);
  for (std::size_t p = 1; p + 1 < verts.size(); ++p)
    if (verts[p].j != npos && forced[verts[p].j] == npos) forced[verts[p].j] = p;
  std::vector<ld> next_forced(n + 1, path.s.back());
  for (std::size_t j = n; j-- > 0;) next_forced[j] = forced[j] != npos ? path.s[forced[j]] : next_forced[j + 1];

  BandPath out;
  out.vertices = verts.size();
  out.g0.assign(n, 0);
  out.g1.assign(n, 0);
  out.eta.assign(n, 0.5);
  out.zero.assign(n, 0);
  std::vector<ld> sj(n);
  const ld slack = 1e-15L * (t0 + t1);
  ld prev_s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const long long jj = static_cast<long long>(j);
    ld s;
    if (j + 1 == n) {
      s = path.s.back();
      out.g0[j] = path.g0.back();
      out.g1[j] = path.g1.back();
    } else if (forced[j] != npos) {
      s = path.s[forced[j]];
      out.g0[j] = path.g0[forced[j]];
      out.g1[j] = path.g1[forced[j]];
    } else {
      // Box bounds are relaxed by slack so that a coordinate that is flat up to
      // rounding cannot pin s far from where the other coordinate needs it.
      const ld lo = std::max(path.first_ge(path.g0, F(c0, jj - kk) - slack), path.first_ge(path.g1, F(c1, jj - kk) - slack));
      const ld hi = std::min(path.last_le(path.g0, F(c0, jj + kk) + slack), path.last_le(path.g1, F(c1, jj + kk) + slack));
      s = std::max(prev_s, std::min({lo, hi, next_forced[j + 1]}));
      const std::size_t p = path.segment(s);
      const ld span = path.s[p + 1] - path.s[p];
      const ld tt = span > 0 ? (s - path.s[p]) / span : 0;
      out.g0[j] = path.g0[p] + tt * (path.g0[p + 1] - path.g0[p]);
      out.g1[j] = path.g1[p] + tt * (path.g1[p + 1] - path.g1[p]);
    }
    if (j > 0) {
      out.g0[j] = std::max(out.g0[j], out.g0[j - 1]);
      out.g1[j] = std::max(out.g1[j], out.g1[j - 1]);
    }
    sj[j] = s;
    prev_s = std::max(prev_s, s);
  }
  out.g0[n - 1] = t0;
  out.g1[n - 1] = t1;

  for (std::size_t j = 0; j < n; ++j) {
    const ld d0 = out.g0[j] - (j ? out.g0[j - 1] : 0);
    const ld d1 = out.g1[j] - (j ? out.g1[j - 1] : 0);
    if (!(d0 + d1 > 0)) {
      out.zero[j] = 1;
      continue;
    }
    const ld mid = 0.5L * ((j ? sj[j - 1] : 0) + sj[j]);
    const std::size_t p = path.segment(mid);
    const ld sd0 = path.g0[p + 1] - path.g0[p];
    const ld sd1 = path.g1[p + 1] - path.g1[p];
    const ld e = sd0 + sd1 > 0 ? sd1 / (sd0 + sd1) : d1 / (d0 + d1);
    out.eta[j] = static_cast<double>(std::clamp<ld>(e, 0, 1));
  }
  return out;
}

}  // namespace advrisk::detail
