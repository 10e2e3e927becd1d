#include "mlnl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>

#include "mlnl/quadrature.hpp"

namespace mlnl {

double SymbolSpec::value(double k_squared) const {
  return local_coeff * k_squared + nonlocal_coeff * std::pow(k_squared, s) + mass;
}

void SymbolSpec::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw SingularSymbolError("SymbolSpec: s must lie in (0,1)");
  // nonlocal_coeff may go negative only through the fault-injection debug
  // flag; the physical model keeps it nonnegative
  if (local_coeff < 0.0 || mass < 0.0)
    throw SingularSymbolError("SymbolSpec: local and mass coefficients must be nonnegative");
}

namespace {

// Per-grid FFT workspace: FFTW plans, wavenumber tables and |k|^2 over the
// half-complex spectrum (last axis of length N/2+1). Single-threaded; all
// callers copy in and out of the internal buffers.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const GridSpec& g) : grid_(g) {
    const int N = g.points_per_axis;
    int n[3] = {N, N, N};
    real_count_ = g.cell_count();
    complex_count_ = 1;
    for (int d = 0; d < g.dim - 1; ++d) complex_count_ *= N;
    complex_count_ *= (N / 2 + 1);

    real_ = fftw_alloc_real(real_count_);
    cplx_ = fftw_alloc_complex(complex_count_);
    fwd_ = fftw_plan_dft_r2c(g.dim, n, real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(g.dim, n, cplx_, real_, FFTW_ESTIMATE);

    // Signed wavenumbers k = (pi/L) m~ per axis; m~ = m for m <= N/2 else m-N.
    const double k0 = M_PI / g.half_width;
    k_axis_.resize(N);
    for (int m = 0; m < N; ++m) k_axis_[m] = k0 * (m <= N / 2 ? m : m - N);

    k_squared_.resize(complex_count_);
    for (Eigen::Index c = 0; c < complex_count_; ++c) {
      double k2 = 0.0;
      auto idx = complex_index(c);
      for (int d = 0; d < g.dim; ++d) {
        const double k = k_axis_[idx[d]];
        k2 += k * k;
      }
      k_squared_[c] = k2;
    }
  }

  ~SpectralWorkspace() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const GridSpec& grid() const { return grid_; }
  Eigen::Index complex_count() const { return complex_count_; }
  const Eigen::ArrayXd& k_squared() const { return k_squared_; }
  double k_axis(int m) const { return k_axis_[m]; }
  int nyquist_index() const { return grid_.points_per_axis / 2; }

  // Multi-index of a flat half-complex position (last axis halved).
  std::array<int, 3> complex_index(Eigen::Index c) const {
    const int N = grid_.points_per_axis;
    const int last = N / 2 + 1;
    std::array<int, 3> idx{0, 0, 0};
    idx[grid_.dim - 1] = static_cast<int>(c % last);
    c /= last;
    for (int d = grid_.dim - 2; d >= 0; --d) {
      idx[d] = static_cast<int>(c % N);
      c /= N;
    }
    return idx;
  }

  // |k|^{2s} over the half spectrum, cached per exponent.
  const Eigen::ArrayXd& k_pow(double s) {
    auto it = k_pow_cache_.find(s);
    if (it != k_pow_cache_.end()) return it->second;
    Eigen::ArrayXd a = k_squared_.pow(s);
    return k_pow_cache_.emplace(s, std::move(a)).first->second;
  }

  Eigen::ArrayXd symbol_values(const SymbolSpec& sym) {
    return sym.local_coeff * k_squared_ + sym.nonlocal_coeff * k_pow(sym.s) + sym.mass;
  }

  void forward(const Eigen::ArrayXd& in) {
    std::copy(in.data(), in.data() + real_count_, real_);
    fftw_execute(fwd_);
  }

  // c2r destroys the spectrum buffer; output normalized by 1/N^dim.
  Eigen::ArrayXd backward() {
    fftw_execute(bwd_);
    Eigen::ArrayXd out(real_count_);
    const double scale = 1.0 / static_cast<double>(real_count_);
    for (Eigen::Index i = 0; i < real_count_; ++i) out[i] = real_[i] * scale;
    return out;
  }

  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(cplx_); }

  void scale_spectrum(const Eigen::ArrayXd& factor) {
    auto* c = spectrum();
    for (Eigen::Index i = 0; i < complex_count_; ++i) c[i] *= factor[i];
  }

 private:
  GridSpec grid_;
  Eigen::Index real_count_ = 0;
  Eigen::Index complex_count_ = 0;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
  std::vector<double> k_axis_;
  Eigen::ArrayXd k_squared_;
  std::map<double, Eigen::ArrayXd> k_pow_cache_;
};

SpectralWorkspace& workspace_for(const GridSpec& g) {
  struct Key {
    int dim;
    int n;
    double L;
    bool operator<(const Key& o) const {
      if (dim != o.dim) return dim < o.dim;
      if (n != o.n) return n < o.n;
      return L < o.L;
    }
  };
  static std::map<Key, std::unique_ptr<SpectralWorkspace>> registry;
  const Key key{g.dim, g.points_per_axis, g.half_width};
  auto it = registry.find(key);
  if (it == registry.end())
    it = registry.emplace(key, std::make_unique<SpectralWorkspace>(g)).first;
  return *it->second;
}

// Per-axis complex phase tables for a real shift; the Nyquist entry is the
// real symmetric projection cos(k t) so c2r output stays real.
std::vector<std::complex<double>> phase_table(SpectralWorkspace& ws, int axis_len, double t) {
  std::vector<std::complex<double>> ph(axis_len);
  const int nyq = ws.nyquist_index();
  for (int m = 0; m < axis_len; ++m) {
    const double kt = ws.k_axis(m) * t;
    ph[m] = (m == nyq) ? std::complex<double>(std::cos(kt), 0.0)
                       : std::complex<double>(std::cos(kt), -std::sin(kt));
  }
  return ph;
}

void apply_phases(SpectralWorkspace& ws, const Point& shift) {
  const GridSpec& g = ws.grid();
  const int N = g.points_per_axis;
  std::vector<std::vector<std::complex<double>>> tables(g.dim);
  for (int d = 0; d < g.dim; ++d) {
    const int len = (d == g.dim - 1) ? N / 2 + 1 : N;
    tables[d] = phase_table(ws, len, shift[d]);
  }
  auto* c = ws.spectrum();
  for (Eigen::Index i = 0; i < ws.complex_count(); ++i) {
    auto idx = ws.complex_index(i);
    std::complex<double> ph(1.0, 0.0);
    for (int d = 0; d < g.dim; ++d) ph *= tables[d][idx[d]];
    c[i] *= ph;
  }
}

}  // namespace

ScalarField apply_multiplier(const ScalarField& field, const SymbolSpec& sym) {
  require_finite(field, "apply_multiplier");
  sym.validate();
  auto& ws = workspace_for(field.grid);
  ws.forward(field.values);
  ws.scale_spectrum(ws.symbol_values(sym));
  return ScalarField(field.grid, ws.backward());
}

ScalarField solve_multiplier(const ScalarField& rhs, const SymbolSpec& sym) {
  require_finite(rhs, "solve_multiplier");
  sym.validate();
  if (!(sym.mass > 0.0))
    throw SingularSymbolError("solve_multiplier: symbol is singular at k = 0 (mass = 0)");
  auto& ws = workspace_for(rhs.grid);
  ws.forward(rhs.values);
  ws.scale_spectrum(ws.symbol_values(sym).inverse());
  return ScalarField(rhs.grid, ws.backward());
}

ScalarField translate(const ScalarField& field, const Point& shift) {
  require_finite(field, "translate");
  if (shift.size() != field.grid.dim) throw GeometryError("translate: shift dimension mismatch");
  for (int d = 0; d < field.grid.dim; ++d)
    if (std::abs(shift[d]) > field.grid.half_width - 1.0)
      throw GeometryError("translate: target leaves the box margin of 1 unit");
  auto& ws = workspace_for(field.grid);
  ws.forward(field.values);
  apply_phases(ws, shift);
  return ScalarField(field.grid, ws.backward());
}

ScalarField derivative(const ScalarField& field, int axis) {
  require_finite(field, "derivative");
  if (axis < 0 || axis >= field.grid.dim) throw GeometryError("derivative: axis out of range");
  auto& ws = workspace_for(field.grid);
  ws.forward(field.values);
  auto* c = ws.spectrum();
  const int nyq = ws.nyquist_index();
  for (Eigen::Index i = 0; i < ws.complex_count(); ++i) {
    auto idx = ws.complex_index(i);
    const int m = idx[axis];
    const double k = (m == nyq) ? 0.0 : ws.k_axis(m);
    c[i] *= std::complex<double>(0.0, k);
  }
  return ScalarField(field.grid, ws.backward());
}

std::vector<ScalarField> gradient(const ScalarField& field) {
  std::vector<ScalarField> g;
  g.reserve(field.grid.dim);
  for (int d = 0; d < field.grid.dim; ++d) g.push_back(derivative(field, d));
  return g;
}

ScalarField gradient_magnitude(const ScalarField& field) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(field.grid.cell_count());
  for (int d = 0; d < field.grid.dim; ++d) acc += derivative(field, d).values.square();
  return ScalarField(field.grid, acc.sqrt());
}

ScalarField hessian_magnitude(const ScalarField& field) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(field.grid.cell_count());
  for (int a = 0; a < field.grid.dim; ++a) {
    const ScalarField da = derivative(field, a);
    for (int b = 0; b < field.grid.dim; ++b) acc += derivative(da, b).values.square();
  }
  return ScalarField(field.grid, acc.sqrt());
}

ScalarField fundamental_field(const GridSpec& grid, const SymbolSpec& sym, const Point& center) {
  sym.validate();
  if (!(sym.mass > 0.0))
    throw SingularSymbolError("fundamental_field: symbol is singular at k = 0 (mass = 0)");
  if (center.size() != grid.dim) throw GeometryError("fundamental_field: center dimension mismatch");
  auto& ws = workspace_for(grid);
  // Spectrum of the unit-strength delta at `center`, divided by m(k). The
  // h^{-n} factor matches a discrete delta of height 1/h^n at a cell center.
  const Eigen::ArrayXd m = ws.symbol_values(sym);
  auto* c = ws.spectrum();
  const double amp = 1.0 / grid.cell_volume();
  for (Eigen::Index i = 0; i < ws.complex_count(); ++i) c[i] = amp / m[i];
  Point shift(grid.dim);
  const double x0 = -grid.half_width + 0.5 * grid.spacing();
  for (int d = 0; d < grid.dim; ++d) shift[d] = center[d] - x0;
  apply_phases(ws, shift);
  return ScalarField(grid, ws.backward());
}

double quadratic_form(const ScalarField& u, const SymbolSpec& sym) {
  return inner(u, apply_multiplier(u, sym));
}

}  // namespace mlnl
