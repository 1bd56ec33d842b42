#pragma once

#include "cdpanel/types.hpp"

namespace cdpanel {

enum class WeightKind { Rademacher, Ones, Custom };

struct WeightVector {
  Vector w;
  WeightKind kind = WeightKind::Custom;

  Eigen::Index size() const { return w.size(); }
};

inline WeightVector ones_weights(Eigen::Index n) {
  return WeightVector{Vector::Ones(n), WeightKind::Ones};
}

}  // namespace cdpanel
