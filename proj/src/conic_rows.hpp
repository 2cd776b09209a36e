#pragma once

#include <vector>

#include "secbeam/conic.hpp"

namespace secbeam::detail {

// Scalar rows of a cone in a fixed order (shared by dump and the solver).
inline std::vector<const AffineExpr*> cone_rows(const Cone& cone) {
  std::vector<const AffineExpr*> rows;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NonnegativeCone>) {
          rows.push_back(&k.expr);
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          rows.push_back(&k.head);
          for (const auto& e : k.tail) rows.push_back(&e);
        } else if constexpr (std::is_same_v<T, ExponentialCone>) {
          rows = {&k.a, &k.b, &k.c};
        } else {
          for (const auto& e : k.lower) rows.push_back(&e);
        }
      },
      cone);
  return rows;
}

}  // namespace secbeam::detail
