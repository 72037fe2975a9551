#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace fovqa::fft {

namespace {

// FFTW planning mutates global state; execution does not.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> transform(const std::vector<std::complex<double>>& in, int width,
                                            int height, int sign) {
  if (width <= 0 || height <= 0 || in.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("dft2: buffer does not match dimensions");
  std::vector<std::complex<double>> out(in.size());
  // FFTW_ESTIMATE keeps planning deterministic and leaves the input intact.
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_2d(
        height, width,
        reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
        reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  if (plan == nullptr) throw std::runtime_error("dft2: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> dft2(const std::vector<double>& real, int width, int height) {
  std::vector<std::complex<double>> in(real.size());
  for (std::size_t i = 0; i < real.size(); ++i) in[i] = real[i];
  return transform(in, width, height, FFTW_FORWARD);
}

std::vector<double> idft2(const std::vector<std::complex<double>>& spec, int width, int height) {
  auto full = transform(spec, width, height, FFTW_BACKWARD);
  std::vector<double> out(full.size());
  const double norm = 1.0 / (static_cast<double>(width) * height);
  for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real() * norm;
  return out;
}

}  // namespace fovqa::fft
