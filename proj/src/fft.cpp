#include "oam/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

namespace oam {
namespace {

ComplexArray transform(const ComplexArray& a, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  ComplexArray out(a.rows(), a.cols());

  std::vector<std::complex<double>> in_buf(a.rows()), out_buf(a.rows());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) in_buf[r] = a(r, c);
    inverse ? fft.inv(out_buf, in_buf) : fft.fwd(out_buf, in_buf);
    for (Eigen::Index r = 0; r < a.rows(); ++r) out(r, c) = out_buf[r];
  }
  in_buf.resize(a.cols());
  out_buf.resize(a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) in_buf[c] = out(r, c);
    inverse ? fft.inv(out_buf, in_buf) : fft.fwd(out_buf, in_buf);
    for (Eigen::Index c = 0; c < a.cols(); ++c) out(r, c) = out_buf[c];
  }
  if (inverse) out /= static_cast<double>(a.rows() * a.cols());
  return out;
}

}  // namespace

ComplexArray fft2(const ComplexArray& a) { return transform(a, false); }
ComplexArray ifft2(const ComplexArray& a) { return transform(a, true); }

double fft_angular_frequency(int k, int n, double d) {
  const int signed_k = k < (n + 1) / 2 ? k : k - n;
  return 2.0 * M_PI * signed_k / (n * d);
}

}  // namespace oam
