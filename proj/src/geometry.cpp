#include "csiloc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csiloc {

void ArrayGeometry::validate() const {
  const Eigen::Index n = size();
  if (n < 1) throw std::invalid_argument("geometry: need at least one element");
  if (static_cast<Eigen::Index>(element_polarization.size()) != n)
    throw std::invalid_argument("geometry: polarization tag count mismatch");
  if (!element_positions.allFinite())
    throw std::invalid_argument("geometry: non-finite element position");
  if (!(carrier_wavelength > 0.0))
    throw std::invalid_argument("geometry: wavelength must be positive");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (element_positions.col(i) == element_positions.col(j) &&
          element_polarization[i] == element_polarization[j])
        throw std::invalid_argument(
            "geometry: duplicate element (same position and polarization)");
}

ArrayGeometry make_upa(int columns, int rows, double spacing_wavelengths,
                       double carrier_wavelength, bool dual_polarized) {
  if (columns < 1 || rows < 1)
    throw std::invalid_argument("make_upa: grid must be at least 1x1");
  const int per_point = dual_polarized ? 2 : 1;
  const Eigen::Index n =
      static_cast<Eigen::Index>(columns) * rows * per_point;
  const double d = spacing_wavelengths * carrier_wavelength;

  ArrayGeometry g;
  g.carrier_wavelength = carrier_wavelength;
  g.element_positions.resize(3, n);
  g.element_polarization.resize(static_cast<std::size_t>(n));
  Eigen::Index k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < columns; ++c) {
      for (int p = 0; p < per_point; ++p) {
        g.element_positions.col(k) =
            Vec3(c * d - 0.5 * (columns - 1) * d, 0.0,
                 r * d - 0.5 * (rows - 1) * d);
        g.element_polarization[static_cast<std::size_t>(k)] =
            p == 0 ? Polarization::A : Polarization::B;
        ++k;
      }
    }
  }
  g.validate();
  return g;
}

ArrayGeometry subset_geometry(const ArrayGeometry& g,
                              const std::vector<int>& indices) {
  ArrayGeometry out;
  out.carrier_wavelength = g.carrier_wavelength;
  out.cross_pol_gain = g.cross_pol_gain;
  out.element_positions.resize(3, static_cast<Eigen::Index>(indices.size()));
  out.element_polarization.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int k = indices[i];
    if (k < 0 || k >= g.size())
      throw std::out_of_range("subset_geometry: index out of range");
    out.element_positions.col(static_cast<Eigen::Index>(i)) =
        g.element_positions.col(k);
    out.element_polarization[i] =
        g.element_polarization[static_cast<std::size_t>(k)];
  }
  out.validate();
  return out;
}

CVec steering_vector(const ArrayGeometry& g, const Vec3& source_point,
                     Polarization source_pol) {
  const Eigen::Index n = g.size();
  CVec a(n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dist = (source_point - g.element_positions.col(k)).norm();
    if (dist == 0.0)
      throw std::invalid_argument(
          "degenerate geometry: source coincides with an element");
    const double phase = -two_pi * dist / g.carrier_wavelength;
    const double gain =
        g.element_polarization[static_cast<std::size_t>(k)] == source_pol
            ? 1.0
            : g.cross_pol_gain;
    a(k) = std::polar(gain, phase);
  }
  return a;
}

}  // namespace csiloc
