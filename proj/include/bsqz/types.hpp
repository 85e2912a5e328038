#pragma once

#include <Eigen/Dense>

namespace bsqz {

inline constexpr int kDim = 6;

using Mat6 = Eigen::Matrix<double, kDim, kDim>;
using Vec6 = Eigen::Matrix<double, kDim, 1>;

/// Fixed ordering of the fluctuation quadratures:
/// optical mode a1, Brillouin acoustic mode b, squeezed mechanical mode c_s.
enum class Quadrature : int { XA1 = 0, PA1 = 1, XB = 2, PB = 3, XCS = 4, PCS = 5 };

constexpr int index(Quadrature q) noexcept { return static_cast<int>(q); }

}  // namespace bsqz
