#pragma once

#include "rfio/core.hpp"

namespace rfio {

// Unnormalized forward transform c_k = sum_x u(x) e^{-i k.x}; inverse divides by n^d.
void fft_forward(const TorusGrid& g, CVec& u);
void fft_inverse(const TorusGrid& g, CVec& u);

// Same transforms along a single axis of a d-dimensional array.
void fft_axis_forward(const TorusGrid& g, int axis, CVec& u);
void fft_axis_inverse(const TorusGrid& g, int axis, CVec& u);

struct SpectralField {
  TorusGrid grid;
  CVec comp1;
  CVec comp2;
};

SpectralField fourier_forward(const Field& f);
Field fourier_inverse(const SpectralField& s);

// Physical wavevector of the flat spectral index.
Eigen::Vector3d wavevector(const TorusGrid& g, std::size_t idx);

// Applies a scalar multiplier m(k) to both components.
Field apply_scalar_multiplier(const Field& f, const std::function<cplx(const Eigen::Vector3d&)>& m);

}  // namespace rfio
