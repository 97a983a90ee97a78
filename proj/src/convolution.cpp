#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "probevol/distribution_engine.hpp"
#include "probevol/errors.hpp"

namespace probevol {

namespace {

// Cell masses of a pdf; the atom is handled separately by callers.
std::vector<double> masses_of(const VolumePdf& pdf) {
  std::vector<double> out(pdf.size());
  for (std::size_t i = 0; i < pdf.size(); ++i) out[i] = pdf.cell_mass(i);
  return out;
}

VolumePdf from_masses(const std::vector<double>& masses, double atom, double step) {
  VolumePdf pdf;
  pdf.grid_start = 0.0;
  pdf.grid_step = step;
  pdf.atom_at_zero = atom;
  pdf.densities.resize(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) pdf.densities[i] = masses[i] / step;
  return pdf;
}

void require_convolvable(const VolumePdf& pdf) {
  detail::require(pdf.grid_start == 0.0, "convolution needs grid_start = 0");
  detail::require(pdf.grid_step > 0.0, "convolution needs grid_step > 0");
  detail::require(!pdf.densities.empty(), "convolution needs a non-empty grid");
}

struct FoldState {
  std::vector<double> masses;
  double atom;
};

// (qa*delta + a) * (qb*delta + b) = qa*qb*delta + qa*b + qb*a + a*b.
FoldState fold(const FoldState& a, const FoldState& b) {
  FoldState out;
  out.atom = a.atom * b.atom;
  out.masses.assign(a.masses.size() + b.masses.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    const double ai = a.masses[i];
    if (ai == 0.0) continue;
    double* dst = out.masses.data() + i;
    for (std::size_t j = 0; j < b.masses.size(); ++j) dst[j] += ai * b.masses[j];
  }
  if (b.atom != 0.0)
    for (std::size_t i = 0; i < a.masses.size(); ++i) out.masses[i] += b.atom * a.masses[i];
  if (a.atom != 0.0)
    for (std::size_t j = 0; j < b.masses.size(); ++j) out.masses[j] += a.atom * b.masses[j];
  return out;
}

double total_of(const FoldState& s) {
  double sum = s.atom;
  for (double v : s.masses) sum += v;
  return sum;
}

void scale(FoldState& s, double factor) {
  s.atom *= factor;
  for (double& v : s.masses) v *= factor;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDestroy>;

std::complex<double> ipow(std::complex<double> base, std::int64_t e) {
  std::complex<double> result(1.0, 0.0);
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

// Whole m-fold sum in one pass: F[result] = (q + F[c])^m, where the atom q
// transforms to a constant. The q^m term is split back out as the atom.
FoldState spectral_power(const FoldState& single, std::int64_t m) {
  const std::size_t n = single.masses.size();
  const std::size_t out_len = static_cast<std::size_t>(m) * (n - 1) + 1;
  const std::size_t bins = out_len / 2 + 1;

  std::unique_ptr<double, FftwFree> real(
      static_cast<double*>(fftw_malloc(sizeof(double) * out_len)));
  std::unique_ptr<fftw_complex, FftwFree> freq(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  if (!real || !freq) throw NumericalError("FFTW allocation failed");

  PlanPtr forward, backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int len = static_cast<int>(out_len);
    forward.reset(fftw_plan_dft_r2c_1d(len, real.get(), freq.get(), FFTW_ESTIMATE));
    backward.reset(fftw_plan_dft_c2r_1d(len, freq.get(), real.get(), FFTW_ESTIMATE));
  }
  if (!forward || !backward) throw NumericalError("FFTW planning failed");

  std::fill(real.get(), real.get() + out_len, 0.0);
  std::copy(single.masses.begin(), single.masses.end(), real.get());
  fftw_execute(forward.get());

  const double atom_m = std::pow(single.atom, static_cast<double>(m));
  for (std::size_t k = 0; k < bins; ++k) {
    const std::complex<double> c(freq.get()[k][0], freq.get()[k][1]);
    const auto r = ipow(c + single.atom, m) - atom_m;
    freq.get()[k][0] = r.real();
    freq.get()[k][1] = r.imag();
  }
  fftw_execute(backward.get());

  FoldState out;
  out.atom = atom_m;
  out.masses.resize(out_len);
  const double inv = 1.0 / static_cast<double>(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out.masses[i] = std::max(0.0, real.get()[i] * inv);
  return out;
}

}  // namespace

VolumePdf convolve(const VolumePdf& a, const VolumePdf& b) {
  require_convolvable(a);
  require_convolvable(b);
  detail::require(a.grid_step == b.grid_step, "convolution needs matching grid steps");
  const auto out = fold({masses_of(a), a.atom_at_zero}, {masses_of(b), b.atom_at_zero});
  return from_masses(out.masses, out.atom, a.grid_step);
}

MFoldResult m_fold_pdf(const VolumePdf& single, std::int64_t m, ConvolutionMethod method) {
  detail::require(m >= 1, "m_fold_pdf needs m >= 1");
  require_convolvable(single);
  MFoldResult result;
  if (m == 1) {
    result.pdf = single;
    return result;
  }
  if (method == ConvolutionMethod::Automatic)
    method = m <= kDirectConvolutionMaxFolds ? ConvolutionMethod::Direct
                                             : ConvolutionMethod::Spectral;

  const FoldState base{masses_of(single), single.atom_at_zero};
  const auto note_drift = [&](double total, std::int64_t fold_index) {
    const double factor = 1.0 / total;
    result.renormalization.push_back(factor);
    if (std::abs(total - 1.0) > kFoldDriftWarning) {
      std::ostringstream msg;
      msg << "fold " << fold_index << " mass drifted to " << total
          << "; grid_step may be too coarse";
      result.warnings.push_back(msg.str());
    }
    return factor;
  };

  FoldState acc;
  if (method == ConvolutionMethod::Direct) {
    acc = base;
    for (std::int64_t f = 2; f <= m; ++f) {
      acc = fold(acc, base);
      const double total = total_of(acc);
      detail::require(total > 0.0, "convolution produced zero mass");
      scale(acc, note_drift(total, f));
    }
  } else {
    acc = spectral_power(base, m);
    const double total = total_of(acc);
    detail::require(total > 0.0, "convolution produced zero mass");
    scale(acc, note_drift(total, m));
  }
  result.pdf = from_masses(acc.masses, acc.atom, single.grid_step);
  return result;
}

}  // namespace probevol
