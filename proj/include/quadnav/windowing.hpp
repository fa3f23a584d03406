#pragma once

#include <stdexcept>
#include <vector>

#include "quadnav/types.hpp"

namespace quadnav {

struct WindowingResult {
  std::vector<Window> windows;
  int dropped = 0;  // windows discarded for missing GT coverage
};

// Cuts a sequence into `size`-sample windows advancing by `stride` samples
// (defaults: 120/120 = non-overlapping 1-second epochs). Labels come from the
// GT track interpolated linearly to the window boundary times: distance is
// the planar (N,E) l2 norm of the displacement, altitude is -delta(D).
// Windows without full GT coverage are dropped and counted.
inline WindowingResult make_windows(const ImuSequence& seq, const GroundTruthTrack& gt,
                                    int size = 120, int stride = 120) {
  if (size < 1 || stride < 1)
    throw std::invalid_argument("make_windows: size and stride must be >= 1");
  WindowingResult out;
  const int n = static_cast<int>(seq.size());
  if (n < size) return out;  // shorter than one window -> empty

  const double span = size / seq.rate_hz;
  for (int i = 0; i + size <= n; i += stride) {
    const double t0 = seq.samples[i].t;
    const double t1 = t0 + span;
    if (!gt.covers(t0) || !gt.covers(t1)) {
      ++out.dropped;
      continue;
    }
    Window w;
    w.t_start = t0;
    w.t_end = t1;
    w.x.resize(size, 6);
    for (int r = 0; r < size; ++r) {
      const ImuSample& s = seq.samples[i + r];
      w.x(r, 0) = s.f.x();
      w.x(r, 1) = s.f.y();
      w.x(r, 2) = s.f.z();
      w.x(r, 3) = s.w.x();
      w.x(r, 4) = s.w.y();
      w.x(r, 5) = s.w.z();
    }
    const Vec3 p0 = gt.interpolate(t0);
    const Vec3 p1 = gt.interpolate(t1);
    const Vec3 d = p1 - p0;
    w.label_distance = std::hypot(d.x(), d.y());
    w.label_altitude = -d.z();  // altitude = -Down
    out.windows.push_back(std::move(w));
  }
  return out;
}

}  // namespace quadnav
