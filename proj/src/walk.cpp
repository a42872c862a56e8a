#include "greenwalk/walk.hpp"

#include <sstream>

namespace greenwalk {

const LatticeMeasure& law_at(const HomogeneousWalk& w, long long) {
  return w.step;
}

const LatticeMeasure& law_at(const OscillatingWalk& w, long long pos) {
  return pos <= 0 ? w.neg_side : w.pos_side;
}

const LatticeMeasure& law_at(const ConcentratedWalk& w, long long pos) {
  return pos <= 0 ? w.mu_plus : w.nu_minus;
}

const LatticeMeasure& law_at(const WalkSpec& w, long long pos) {
  return std::visit(
      [pos](const auto& v) -> const LatticeMeasure& { return law_at(v, pos); },
      w);
}

void validate(const HomogeneousWalk& w) {
  require_probability(w.step, "homogeneous step law");
}

void validate(const OscillatingWalk& w) {
  require_probability(w.neg_side, "law on the nonpositive half line");
  require_probability(w.pos_side, "law on the positive half line");
}

void validate(const ConcentratedWalk& w) {
  // sub-probabilities are legal: missing mass is a one-shot escape event
  auto check = [](const LatticeMeasure& m, bool positive, const char* name) {
    double total = m.total_mass();
    if (total > 1.0 + 1e-9) {
      std::ostringstream os;
      os << name << " has total mass " << total << " > 1";
      throw std::invalid_argument(os.str());
    }
    if (m.empty()) return;
    if (positive && m.support_min < 1) {
      std::ostringstream os;
      os << name << " must charge positive sites only (found "
         << m.support_min << ")";
      throw std::invalid_argument(os.str());
    }
    if (!positive && m.support_max() > -1) {
      std::ostringstream os;
      os << name << " must charge negative sites only (found "
         << m.support_max() << ")";
      throw std::invalid_argument(os.str());
    }
  };
  check(w.mu_plus, true, "upward factor");
  check(w.nu_minus, false, "downward factor");
}

void validate(const WalkSpec& w) {
  std::visit([](const auto& v) { validate(v); }, w);
}

}  // namespace greenwalk
