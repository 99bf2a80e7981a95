#include "solitrain/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "solitrain/error.hpp"

namespace solitrain {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpectralTransform::Impl {
  std::size_t n = 0;
  fftw_complex* data = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    data = fftw_alloc_complex(n);
    spectrum = fftw_alloc_complex(n);
    if (data == nullptr || spectrum == nullptr) throw Error("fftw_alloc_complex failed");
    const int ni = static_cast<int>(n);
    fwd = fftw_plan_dft_1d(ni, data, spectrum, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(ni, spectrum, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (fwd == nullptr || bwd == nullptr) throw Error("FFTW plan creation failed");
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (data) fftw_free(data);
    if (spectrum) fftw_free(spectrum);
  }
};

SpectralTransform::SpectralTransform(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

std::size_t SpectralTransform::size() const noexcept { return impl_->n; }

std::span<Complex> SpectralTransform::buffer() noexcept {
  // fftw_complex is layout-compatible with std::complex<double>.
  return {reinterpret_cast<Complex*>(impl_->data), impl_->n};
}

std::span<Complex> SpectralTransform::spectrum() noexcept {
  return {reinterpret_cast<Complex*>(impl_->spectrum), impl_->n};
}

void SpectralTransform::forward() { fftw_execute(impl_->fwd); }
void SpectralTransform::backward() { fftw_execute(impl_->bwd); }

void apply_fourier_multiplier(SpectralTransform& fft, std::span<Complex> psi,
                              std::span<const Complex> multiplier) {
  auto buf = fft.buffer();
  auto* raw = reinterpret_cast<fftw_complex*>(psi.data());
  // Plans were made on the owned buffer; they may run on psi directly only if
  // psi has the same SIMD alignment. The algorithm is identical either way.
  const bool direct = fftw_alignment_of(reinterpret_cast<double*>(raw)) ==
                      fftw_alignment_of(reinterpret_cast<double*>(buf.data()));
  auto* spec_c = reinterpret_cast<fftw_complex*>(fft.spectrum().data());
  if (direct) {
    fftw_execute_dft(fft.impl_->fwd, raw, spec_c);
  } else {
    std::copy(psi.begin(), psi.end(), buf.begin());
    fft.forward();
  }
  // Plain real arithmetic so the loop vectorizes (no complex NaN recovery).
  auto* spec = reinterpret_cast<double*>(spec_c);
  const auto* mul = reinterpret_cast<const double*>(multiplier.data());
  const std::size_t n = buf.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double re = spec[2 * k], im = spec[2 * k + 1];
    const double mr = mul[2 * k], mi = mul[2 * k + 1];
    spec[2 * k] = re * mr - im * mi;
    spec[2 * k + 1] = re * mi + im * mr;
  }
  if (direct) {
    fftw_execute_dft(fft.impl_->bwd, spec_c, raw);
  } else {
    fft.backward();
    std::copy(buf.begin(), buf.end(), psi.begin());
  }
}

}  // namespace solitrain
