#include "critlab/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace critlab {

void fft_nd(std::vector<cplx>& data, const Coords& extents, int dimension, bool inverse) {
  Eigen::FFT<double> fft;
  std::size_t stride = 1;
  for (int a = 0; a < dimension; ++a) {
    const auto n = static_cast<std::size_t>(extents[static_cast<std::size_t>(a)]);
    if (n > 1) {
      std::vector<cplx> in(n), out(n);
      const std::size_t block = stride * n;
      for (std::size_t base = 0; base < data.size(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
          for (std::size_t i = 0; i < n; ++i) in[i] = data[base + off + i * stride];
          if (inverse)
            fft.inv(out, in);
          else
            fft.fwd(out, in);
          for (std::size_t i = 0; i < n; ++i) data[base + off + i * stride] = out[i];
        }
      }
    }
    stride *= n;
  }
}

std::vector<double> periodic_autocorrelation(const std::vector<double>& field, const Coords& extents, int dimension) {
  std::vector<cplx> f(field.begin(), field.end());
  fft_nd(f, extents, dimension, false);
  for (auto& v : f) v = std::norm(v);
  fft_nd(f, extents, dimension, true);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

std::vector<double> open_autocorrelation(const std::vector<double>& field, const Coords& extents, int dimension,
                                         Coords& padded) {
  padded = {1, 1, 1};
  std::size_t total = 1;
  for (int a = 0; a < dimension; ++a) {
    padded[static_cast<std::size_t>(a)] = 2 * extents[static_cast<std::size_t>(a)];
    total *= static_cast<std::size_t>(padded[static_cast<std::size_t>(a)]);
  }
  std::vector<double> big(total, 0.0);
  const int nx = extents[0], ny = dimension > 1 ? extents[1] : 1, nz = dimension > 2 ? extents[2] : 1;
  const int px = padded[0], py = padded[1];
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        big[static_cast<std::size_t>(x + px * (y + py * z))] = field[static_cast<std::size_t>(x + nx * (y + ny * z))];
  return periodic_autocorrelation(big, padded, dimension);
}

std::vector<double> real_spectrum(const std::vector<double>& field, const Coords& extents, int dimension) {
  std::vector<cplx> f(field.begin(), field.end());
  fft_nd(f, extents, dimension, false);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

}  // namespace critlab
