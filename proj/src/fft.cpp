#include "chaoslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace chaoslab {

namespace {

std::mutex plan_mutex;

fftw_plan plan_for(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> tmp(n);
  fftw_plan p = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(tmp.data()),
      reinterpret_cast<fftw_complex*>(tmp.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fftw plan creation failed");
  cache.emplace(key, p);
  return p;
}

void run(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  fftw_plan p = plan_for(data.size(), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) { run(data, FFTW_FORWARD); }
void fft_inverse(std::vector<std::complex<double>>& data) { run(data, FFTW_BACKWARD); }

namespace {

void fft2(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1, int sign) {
  if (data.size() != n0 * n1) throw std::invalid_argument("fft2: size mismatch");
  fftw_plan row = plan_for(n1, sign);
  std::vector<std::complex<double>> col(n0);
  for (std::size_t i = 0; i < n0; ++i)
    fftw_execute_dft(row, reinterpret_cast<fftw_complex*>(data.data() + i * n1),
                     reinterpret_cast<fftw_complex*>(data.data() + i * n1));
  fftw_plan colp = plan_for(n0, sign);
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < n0; ++i) col[i] = data[i * n1 + j];
    fftw_execute_dft(colp, reinterpret_cast<fftw_complex*>(col.data()),
                     reinterpret_cast<fftw_complex*>(col.data()));
    for (std::size_t i = 0; i < n0; ++i) data[i * n1 + j] = col[i];
  }
}

}  // namespace

void fft2_forward(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1) {
  fft2(data, n0, n1, FFTW_FORWARD);
}
void fft2_inverse(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1) {
  fft2(data, n0, n1, FFTW_BACKWARD);
}

}  // namespace chaoslab
