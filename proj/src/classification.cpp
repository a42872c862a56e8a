#include "greenwalk/classification.hpp"

namespace greenwalk {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::transient: return "transient";
    case Regime::null_recurrent: return "null-recurrent";
    case Regime::positive_recurrent: return "positive-recurrent";
    case Regime::undetermined: return "undetermined";
  }
  return "?";
}

}  // namespace greenwalk
