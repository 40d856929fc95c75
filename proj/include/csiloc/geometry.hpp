#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace csiloc {

using Vec3 = Eigen::Vector3d;
using CVec = Eigen::VectorXcd;

enum class Polarization { A, B };

/// Antenna array: element positions in meters (array-local frame), a
/// polarization tag per element, and the carrier wavelength.
struct ArrayGeometry {
  Eigen::Matrix3Xd element_positions;        // one column per element
  std::vector<Polarization> element_polarization;
  double carrier_wavelength = 0.0857;        // meters (~3.5 GHz)
  double cross_pol_gain = 0.3;               // linear attenuation across tags

  Eigen::Index size() const { return element_positions.cols(); }
  void validate() const;  // throws std::invalid_argument on violation
};

/// Uniform planar array in the x-z plane, optionally dual polarized
/// (two colocated elements per grid point, tags A and B).
ArrayGeometry make_upa(int columns, int rows, double spacing_wavelengths,
                       double carrier_wavelength, bool dual_polarized);

/// Keeps only the listed elements (sorted unique indices required).
ArrayGeometry subset_geometry(const ArrayGeometry& g,
                              const std::vector<int>& indices);

/// Narrowband array response to a point source, with a scalar cross-pol
/// attenuation for elements whose tag differs from the source polarization.
/// Entry k = exp(-j*2*pi*d_k/lambda) * g_pol(k).
CVec steering_vector(const ArrayGeometry& g, const Vec3& source_point,
                     Polarization source_pol = Polarization::A);

}  // namespace csiloc
