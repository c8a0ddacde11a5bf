#pragma once

#include <complex>
#include <vector>

#include "critlab/lattice.hpp"

namespace critlab {

using cplx = std::complex<double>;

/// In-place multidimensional DFT over a box stored with axis 0 fastest.
/// Forward uses exp(-i k.x); the inverse includes the 1/N factor.
void fft_nd(std::vector<cplx>& data, const Coords& extents, int dimension, bool inverse);

/// Circular autocorrelation A(d) = sum_x f(x) f(x+d) on the torus.
std::vector<double> periodic_autocorrelation(const std::vector<double>& field, const Coords& extents, int dimension);

/// Linear autocorrelation on an open box, indexed on the doubled box
/// (negative displacements wrap to the upper half of each axis).
std::vector<double> open_autocorrelation(const std::vector<double>& field, const Coords& extents, int dimension,
                                         Coords& padded_extents);

/// Real part of the forward DFT of a real field.
std::vector<double> real_spectrum(const std::vector<double>& field, const Coords& extents, int dimension);

}  // namespace critlab
