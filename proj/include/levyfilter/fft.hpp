#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace levyfilter {

/// Real-to-complex transform of fixed length n (FFTW r2c/c2r).
///
/// forward:  X_k = sum_j x_j exp(-2 pi i j k / n),  k = 0..n/2
/// inverse:  x_j = (1/n) sum_k X_k exp(+2 pi i j k / n)  (Hermitian extension)
///
/// Plans are created once per object. Objects are not shareable between
/// threads, but distinct objects may be used concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t n_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace levyfilter
