#pragma once

#include <complex>
#include <vector>

namespace fovqa::fft {

// Unnormalized forward 2-D DFT of a row-major real raster; the returned
// spectrum is row-major with width*height bins. Plan creation is serialized
// internally, so calls are thread-safe.
std::vector<std::complex<double>> dft2(const std::vector<double>& real, int width, int height);

// Inverse of dft2 including the 1/(width*height) normalization; returns the
// real part.
std::vector<double> idft2(const std::vector<std::complex<double>>& spec, int width, int height);

}  // namespace fovqa::fft
