#include "greenwalk/extrapolate.hpp"

#include <cmath>

namespace greenwalk {

const char* to_string(SequenceLimit::Verdict v) {
  switch (v) {
    case SequenceLimit::Verdict::converged: return "converged";
    case SequenceLimit::Verdict::extrapolated: return "extrapolated";
    case SequenceLimit::Verdict::diverging: return "diverging";
    case SequenceLimit::Verdict::stalled: return "stalled";
    case SequenceLimit::Verdict::empty: return "empty";
  }
  return "?";
}

SequenceLimit limit_from_schedule(const std::vector<double>& partials,
                                  double abs_floor) {
  SequenceLimit out;
  if (partials.empty()) {
    out.verdict = SequenceLimit::Verdict::empty;
    return out;
  }
  out.last_partial = partials.back();
  if (partials.size() == 1) {
    out.value = partials[0];
    out.error = std::numeric_limits<double>::infinity();
    out.verdict = SequenceLimit::Verdict::stalled;
    return out;
  }
  size_t n = partials.size();
  double d1 = partials[n - 1] - partials[n - 2];
  out.last_increment = d1;
  if (std::abs(d1) <= abs_floor) {
    out.value = partials[n - 1];
    out.error = std::abs(d1) + abs_floor;
    out.verdict = SequenceLimit::Verdict::converged;
    return out;
  }
  if (n == 2) {
    out.value = partials[1];
    out.error = std::abs(d1);
    out.verdict = SequenceLimit::Verdict::stalled;
    return out;
  }
  double d0 = partials[n - 2] - partials[n - 3];
  if (std::abs(d0) <= abs_floor) {
    // the tail went quiet one step earlier; treat as converged
    out.value = partials[n - 1];
    out.error = std::abs(d1) + abs_floor;
    out.verdict = SequenceLimit::Verdict::converged;
    return out;
  }
  double r = d1 / d0;
  out.ratio = r;
  if (r >= 1.0) {
    out.value = partials[n - 1];
    out.error = std::numeric_limits<double>::infinity();
    out.verdict = SequenceLimit::Verdict::diverging;
    return out;
  }
  if (r <= 0.0 || r > 0.999) {
    // sign-alternating or flat tails: report the raw partial with a
    // spread-of-candidates error bar rather than trusting the geometric model
    out.value = partials[n - 1];
    out.error = std::abs(d1) / std::max(1e-3, 1.0 - std::abs(r));
    out.verdict = (r <= 0.0 && std::abs(r) < 1.0)
                      ? SequenceLimit::Verdict::extrapolated
                      : SequenceLimit::Verdict::stalled;
    if (out.verdict == SequenceLimit::Verdict::extrapolated)
      out.value = partials[n - 1] + d1 * r / (1.0 - r);
    return out;
  }
  // geometric tail model: remaining sum = d1 * r / (1 - r)
  double tail = d1 * r / (1.0 - r);
  out.value = partials[n - 1] + tail;
  double err = std::abs(tail) * 0.5 + abs_floor;
  if (n >= 4) {
    double dm = partials[n - 3] - partials[n - 4];
    if (std::abs(dm) > abs_floor) {
      double r0 = d0 / dm;
      if (r0 > 0.0 && r0 < 1.0) {
        double alt = partials[n - 1] + d1 * r0 / (1.0 - r0);
        err = std::abs(alt - out.value) + std::abs(d1) * 1e-3 + abs_floor;
      }
    }
  }
  out.error = err;
  out.verdict = SequenceLimit::Verdict::extrapolated;
  return out;
}

}  // namespace greenwalk
