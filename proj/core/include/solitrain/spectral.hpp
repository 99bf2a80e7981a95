#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "solitrain/field.hpp"

namespace solitrain {

// Complex FFT pair between two owned, FFTW-aligned buffers: forward maps
// buffer() to spectrum(), backward maps spectrum() back to buffer().
// Plans use FFTW_ESTIMATE so the transform is bit-reproducible run to run.
// Plan creation is serialized internally; execution is thread-safe per object.
class SpectralTransform {
 public:
  explicit SpectralTransform(std::size_t n);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;

  std::size_t size() const noexcept;
  std::span<Complex> buffer() noexcept;
  std::span<Complex> spectrum() noexcept;

  void forward();
  // Unnormalized inverse; callers scale by 1/n.
  void backward();

 private:
  friend void apply_fourier_multiplier(SpectralTransform&, std::span<Complex>, std::span<const Complex>);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Multiplies psi by `multiplier` in Fourier space, in place:
// psi <- IFFT(multiplier .* FFT(psi)). The multiplier must already include 1/n.
void apply_fourier_multiplier(SpectralTransform& fft, std::span<Complex> psi,
                              std::span<const Complex> multiplier);

}  // namespace solitrain
