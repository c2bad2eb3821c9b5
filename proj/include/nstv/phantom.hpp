#pragma once

#include "nstv/projection.hpp"

namespace nstv {

enum class PhantomKind { square, rect, l_shape, diamond, two_sources, heaviside_1d };

inline const char* to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::square: return "square";
    case PhantomKind::rect: return "rect";
    case PhantomKind::l_shape: return "l_shape";
    case PhantomKind::diamond: return "diamond";
    case PhantomKind::two_sources: return "two_sources";
    case PhantomKind::heaviside_1d: return "heaviside_1d";
  }
  return "?";
}

/// Indicator-valued phantom geometry; amplitude scales the indicator.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::square;
  double amplitude = 1.0;

  // square / diamond / two_sources
  double center1 = 0.5, center2 = 0.5;
  double size = 0.5;  // edge length (square), l1 diameter (diamond)
  double center1_b = 0.0, center2_b = 0.0, size_b = 0.0;

  // rect / l_shape bounding box
  double lo1 = 0.0, lo2 = 0.0, hi1 = 0.0, hi2 = 0.0;

  // heaviside_1d
  double x_star = 0.5, rho = 1.0, tau = 0.0;
};

namespace detail {

inline void require_box_inside(double lo1, double lo2, double hi1, double hi2) {
  if (lo1 < 0 || lo2 < 0 || hi1 > 1 || hi2 > 1 || lo1 >= hi1 || lo2 >= hi2)
    throw std::invalid_argument("make_phantom: geometry outside the domain");
}

inline bool in_box(double x1, double x2, double lo1, double lo2, double hi1, double hi2) {
  return x1 >= lo1 && x1 <= hi1 && x2 >= lo2 && x2 <= hi2;
}

}  // namespace detail

template <class Scalar>
SourceField<Scalar> make_phantom(const PhantomSpec& spec, const Grid& grid) {
  SourceField<Scalar> f = SourceField<Scalar>::zero(grid);
  const Scalar amp = Scalar(spec.amplitude);

  if (spec.kind == PhantomKind::heaviside_1d) {
    if (grid.dim != 1) throw std::invalid_argument("make_phantom: heaviside_1d needs a 1D grid");
    if (spec.x_star <= 0 || spec.x_star >= 1)
      throw std::invalid_argument("make_phantom: jump location outside (0,1)");
    const int face = nearest_face_1d(grid, spec.x_star);
    f.values = Scalar(spec.rho) * heaviside_1d<Scalar>(grid, face) +
               Vector<Scalar>::Constant(grid.n, Scalar(spec.tau));
    return f;
  }
  if (grid.dim != 2) throw std::invalid_argument("make_phantom: 2D phantom on a 1D grid");

  auto box_of = [&](double c1, double c2, double s) {
    return std::array<double, 4>{c1 - s / 2, c2 - s / 2, c1 + s / 2, c2 + s / 2};
  };

  switch (spec.kind) {
    case PhantomKind::square: {
      auto b = box_of(spec.center1, spec.center2, spec.size);
      detail::require_box_inside(b[0], b[1], b[2], b[3]);
      for (int i = 0; i < grid.cell_count(); ++i)
        if (detail::in_box(grid.center(grid.cell_ix(i)), grid.center(grid.cell_iy(i)), b[0], b[1],
                           b[2], b[3]))
          f.values[i] = amp;
      break;
    }
    case PhantomKind::rect: {
      detail::require_box_inside(spec.lo1, spec.lo2, spec.hi1, spec.hi2);
      for (int i = 0; i < grid.cell_count(); ++i)
        if (detail::in_box(grid.center(grid.cell_ix(i)), grid.center(grid.cell_iy(i)), spec.lo1,
                           spec.lo2, spec.hi1, spec.hi2))
          f.values[i] = amp;
      break;
    }
    case PhantomKind::l_shape: {
      // bounding box minus its upper-right quadrant
      detail::require_box_inside(spec.lo1, spec.lo2, spec.hi1, spec.hi2);
      const double m1 = (spec.lo1 + spec.hi1) / 2, m2 = (spec.lo2 + spec.hi2) / 2;
      for (int i = 0; i < grid.cell_count(); ++i) {
        const double x1 = grid.center(grid.cell_ix(i)), x2 = grid.center(grid.cell_iy(i));
        if (detail::in_box(x1, x2, spec.lo1, spec.lo2, spec.hi1, spec.hi2) &&
            !(x1 > m1 && x2 > m2))
          f.values[i] = amp;
      }
      break;
    }
    case PhantomKind::diamond: {
      const double r = spec.size / 2;
      detail::require_box_inside(spec.center1 - r, spec.center2 - r, spec.center1 + r,
                                 spec.center2 + r);
      for (int i = 0; i < grid.cell_count(); ++i) {
        const double x1 = grid.center(grid.cell_ix(i)), x2 = grid.center(grid.cell_iy(i));
        if (std::abs(x1 - spec.center1) + std::abs(x2 - spec.center2) <= r) f.values[i] = amp;
      }
      break;
    }
    case PhantomKind::two_sources: {
      auto a = box_of(spec.center1, spec.center2, spec.size);
      auto b = box_of(spec.center1_b, spec.center2_b, spec.size_b);
      detail::require_box_inside(a[0], a[1], a[2], a[3]);
      detail::require_box_inside(b[0], b[1], b[2], b[3]);
      const bool overlap = a[0] <= b[2] && b[0] <= a[2] && a[1] <= b[3] && b[1] <= a[3];
      if (overlap) throw std::invalid_argument("make_phantom: two_sources squares overlap");
      for (int i = 0; i < grid.cell_count(); ++i) {
        const double x1 = grid.center(grid.cell_ix(i)), x2 = grid.center(grid.cell_iy(i));
        if (detail::in_box(x1, x2, a[0], a[1], a[2], a[3]) ||
            detail::in_box(x1, x2, b[0], b[1], b[2], b[3]))
          f.values[i] = amp;
      }
      break;
    }
    case PhantomKind::heaviside_1d:
      break;  // handled above
  }
  return f;
}

}  // namespace nstv
