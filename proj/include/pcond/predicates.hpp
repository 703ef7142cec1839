#pragma once

#include "pcond/vec2.hpp"

namespace pcond::predicates {

/// Sign of twice the signed area of (a, b, c): > 0 counterclockwise.
/// Exact: a floating-point filter with an expansion-arithmetic fallback.
double orient2d(Vec2 a, Vec2 b, Vec2 c);

/// > 0 when d lies strictly inside the circle through the counterclockwise
/// triangle (a, b, c). Exact in the same sense as orient2d.
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

} // namespace pcond::predicates
