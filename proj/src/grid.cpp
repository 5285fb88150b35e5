#include "hehom/grid.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace hehom {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SamplingGrid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SamplingGrid::SamplingGrid(const Lattice& lattice, const MultiIndex& shape) : lattice_(lattice), shape_(shape) {
  const int d = lattice.dim();
  size_ = 1;
  int n[3];
  for (int a = 0; a < 3; ++a) {
    if (a >= d) shape_[a] = 1;
    if (shape_[a] < 1) throw InvalidInput("grid shape must be positive");
    n[a] = shape_[a];
    size_ *= static_cast<std::size_t>(shape_[a]);
  }
  plans_ = std::make_shared<Plans>();
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto* buf = fftw_alloc_complex(size_);
  plans_->fwd = fftw_plan_dft(d, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->bwd = fftw_plan_dft(d, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!plans_->fwd || !plans_->bwd) throw NumericalError("FFT planning failed");
}

std::size_t SamplingGrid::slot(const MultiIndex& m) const {
  std::size_t s = 0;
  for (int a = 0; a < 3; ++a) {
    int n = shape_[a];
    int r = ((m[a] % n) + n) % n;
    s = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(r);
  }
  return s;
}

MultiIndex SamplingGrid::frequency(std::size_t slot) const {
  MultiIndex m{0, 0, 0};
  for (int a = 2; a >= 0; --a) {
    int n = shape_[a];
    int r = static_cast<int>(slot % static_cast<std::size_t>(n));
    slot /= static_cast<std::size_t>(n);
    m[a] = r <= n / 2 ? r : r - n;
  }
  return m;
}

bool SamplingGrid::resolves(const MultiIndex& m) const {
  for (int a = 0; a < dim(); ++a)
    if (2 * std::abs(m[a]) >= shape_[a]) return false;
  return true;
}

VecR SamplingGrid::point(std::size_t slot) const {
  VecR f(dim());
  MultiIndex j{0, 0, 0};
  for (int a = 2; a >= 0; --a) {
    j[a] = static_cast<int>(slot % static_cast<std::size_t>(shape_[a]));
    slot /= static_cast<std::size_t>(shape_[a]);
  }
  for (int a = 0; a < dim(); ++a) f(a) = static_cast<double>(j[a]) / shape_[a];
  return lattice_.point(f);
}

VecC SamplingGrid::forward(const VecC& samples) const {
  if (static_cast<std::size_t>(samples.size()) != size_) throw InvalidInput("sample array does not match grid");
  VecC out = samples;
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->fwd, p, p);
  out /= static_cast<double>(size_);
  return out;
}

VecC SamplingGrid::backward(const VecC& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != size_) throw InvalidInput("coefficient array does not match grid");
  VecC out = coeffs;
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->bwd, p, p);
  return out;
}

VecC SamplingGrid::derivative(const VecC& samples, int s) const {
  VecC c = forward(samples);
  const MatR& B = lattice_.dual();
  for (std::size_t i = 0; i < size_; ++i) {
    MultiIndex m = frequency(i);
    bool nyquist = false;
    double bs = 0.0;
    for (int a = 0; a < dim(); ++a) {
      if (shape_[a] % 2 == 0 && 2 * m[a] == shape_[a]) nyquist = true;
      bs += B(s, a) * m[a];
    }
    c(static_cast<Eigen::Index>(i)) *= nyquist ? cplx(0.0) : kI * bs;
  }
  return backward(c);
}

cplx SamplingGrid::integrate(const VecC& samples) const {
  return samples.sum() * (lattice_.cell_volume() / static_cast<double>(size_));
}

double SamplingGrid::integrate(const VecR& samples) const {
  return samples.sum() * (lattice_.cell_volume() / static_cast<double>(size_));
}

VecC SamplingGrid::cell_to_grid(const PlaneWaveBasis& basis, const VecC& c) const {
  if (static_cast<std::size_t>(c.size()) != basis.size()) throw InvalidInput("cell vector does not match basis");
  VecC coeffs = VecC::Zero(static_cast<Eigen::Index>(size_));
  const double s = 1.0 / std::sqrt(lattice_.cell_volume());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!resolves(basis.index(i))) throw ResolutionFailure("sampling grid too coarse for basis");
    coeffs(static_cast<Eigen::Index>(slot(basis.index(i)))) += s * c(static_cast<Eigen::Index>(i));
  }
  return backward(coeffs);
}

VecC SamplingGrid::grid_to_cell(const PlaneWaveBasis& basis, const VecC& samples) const {
  VecC coeffs = forward(samples);
  VecC c(static_cast<Eigen::Index>(basis.size()));
  const double s = std::sqrt(lattice_.cell_volume());
  for (std::size_t i = 0; i < basis.size(); ++i)
    c(static_cast<Eigen::Index>(i)) = s * coeffs(static_cast<Eigen::Index>(slot(basis.index(i))));
  return c;
}

}  // namespace hehom
