#include "fraclab/spectral.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <type_traits>

#include <unsupported/Eigen/FFT>

#include "fraclab/errors.hpp"
#include "fraclab/io.hpp"

namespace fraclab {

namespace {

double theta(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

// In-place unnormalized transform along every axis of a row-major n^d block.
void transform_axes(const PeriodicGrid& grid, Eigen::ArrayXcd& data, bool forward) {
  const int n = grid.points_per_axis();
  const int d = grid.dim();
  auto& fft = fft_engine();
  std::vector<Complex> in(n), out(n);
  const Eigen::Index total = data.size();
  Eigen::Index stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const Eigen::Index block = stride * n;
    for (Eigen::Index base = 0; base < total; base += block) {
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Eigen::Index start = base + off;
        for (int j = 0; j < n; ++j) in[j] = data[start + j * stride];
        if (forward)
          fft.fwd(out.data(), in.data(), n);
        else
          fft.inv(out.data(), in.data(), n);
        for (int j = 0; j < n; ++j) data[start + j * stride] = out[j];
      }
    }
    stride = block;
  }
}

// Symbols singular at the origin, with the policy that governs them.
bool singular_at_zero(const MultiplierSymbol& m, ZeroModePolicy& policy) {
  if (const auto* f = std::get_if<symbol::FracLaplacian>(&m); f && f->s < 0.0) {
    policy = f->policy;
    return true;
  }
  if (const auto* f = std::get_if<symbol::FracIntegral>(&m)) {
    policy = f->policy;
    return true;
  }
  return false;
}

void check_finite(const Eigen::ArrayXcd& a, const char* what) {
  if (!a.allFinite()) throw NonFiniteError(std::string(what) + " produced non-finite values");
}

// --- little-endian byte codec ---

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& s, double v) { put_u64(s, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_le(const std::string& s, std::size_t& pos, int bytes) {
  if (pos + bytes > s.size()) throw DomainError("snapshot truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  pos += bytes;
  return v;
}

constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

double cutoff_low(double r, CutoffKind kind) {
  const double hi = kind == CutoffKind::Standard ? 2.0 : 1.6;
  if (r <= 1.0) return 1.0;
  if (r >= hi) return 0.0;
  // Stretch [1, hi] onto the standard transition interval [1, 2].
  const double s = 1.0 + (r - 1.0) / (hi - 1.0);
  const double a = theta(2.0 - s);
  const double b = theta(s - 1.0);
  return a / (a + b);
}

double cutoff_band(double r, CutoffKind kind) { return cutoff_low(r, kind) - cutoff_low(2.0 * r, kind); }

std::string symbol_name(const MultiplierSymbol& m) {
  return std::visit(overloaded{
                        [](const symbol::FracLaplacian&) { return std::string("frac-laplacian"); },
                        [](const symbol::JapaneseBracket&) { return std::string("japanese-bracket"); },
                        [](const symbol::FracIntegral&) { return std::string("frac-integral"); },
                        [](const symbol::SchrodingerPhase&) { return std::string("schrodinger-phase"); },
                        [](const symbol::WaveCos&) { return std::string("wave-cos"); },
                        [](const symbol::WaveSinc&) { return std::string("wave-sinc"); },
                        [](const symbol::LPBand&) { return std::string("lp-band"); },
                        [](const symbol::LPLow&) { return std::string("lp-low"); },
                        [](const symbol::Derivative&) { return std::string("derivative"); },
                    },
                    m);
}

bool symbol_is_odd(const MultiplierSymbol& m) { return std::holds_alternative<symbol::Derivative>(m); }

Eigen::ArrayXcd symbol_values(const PeriodicGrid& grid, const MultiplierSymbol& m) {
  const Eigen::ArrayXd& k = grid.wavenumber_magnitude();
  const Eigen::Index size = grid.size();
  Eigen::ArrayXcd out(size);

  auto radial = [&](auto&& f) {
    for (Eigen::Index i = 0; i < size; ++i) out[i] = f(k[i]);
  };
  auto power = [](double r, double s) { return r == 0.0 ? 0.0 : std::pow(r, s); };

  std::visit(overloaded{
                 [&](const symbol::FracLaplacian& s) {
                   if (s.s == 0.0)
                     out.setOnes();
                   else
                     radial([&](double r) { return Complex(power(r, s.s)); });
                 },
                 [&](const symbol::JapaneseBracket& s) {
                   radial([&](double r) { return Complex(std::pow(1.0 + r * r, 0.5 * s.gamma)); });
                 },
                 [&](const symbol::FracIntegral& s) {
                   if (!(s.sigma > 0.0)) throw DomainError("fractional integral order must be positive");
                   radial([&](double r) { return Complex(power(r, -s.sigma)); });
                 },
                 [&](const symbol::SchrodingerPhase& s) {
                   radial([&](double r) { return std::polar(1.0, -s.t * power(r, s.sigma)); });
                 },
                 [&](const symbol::WaveCos& s) {
                   radial([&](double r) { return Complex(std::cos(s.t * power(r, s.sigma))); });
                 },
                 [&](const symbol::WaveSinc& s) {
                   radial([&](double r) {
                     if (r == 0.0) return Complex(s.t);
                     const double w = std::pow(r, s.sigma);
                     return Complex(std::sin(s.t * w) / w);
                   });
                 },
                 [&](const symbol::LPBand& s) {
                   if (!(s.scale > 0.0)) throw DomainError("band scale must be positive");
                   radial([&](double r) { return Complex(cutoff_band(r / s.scale, s.cutoff)); });
                 },
                 [&](const symbol::LPLow& s) { radial([&](double r) { return Complex(cutoff_low(r, s.cutoff)); }); },
                 [&](const symbol::Derivative& s) {
                   if (s.axis < 0 || s.axis >= grid.dim()) throw DomainError("derivative axis out of range");
                   out = Complex(0.0, 1.0) * grid.wavevector(s.axis).cast<Complex>();
                 },
             },
             m);

  if (symbol_is_odd(m)) out *= (1.0 - grid.nyquist_mask()).cast<Complex>();
  return out;
}

Eigen::ArrayXcd forward_transform(const PeriodicGrid& grid, const Eigen::ArrayXcd& samples) {
  if (samples.size() != grid.size()) throw DomainError("sample count does not match grid");
  Eigen::ArrayXcd c = samples;
  transform_axes(grid, c, true);
  c /= static_cast<double>(grid.size());
  return c;
}

Eigen::ArrayXcd forward_transform(const Field& u) { return forward_transform(u.grid(), u.values()); }

Eigen::ArrayXcd inverse_transform_raw(const PeriodicGrid& grid, const Eigen::ArrayXcd& coefficients) {
  if (coefficients.size() != grid.size()) throw DomainError("coefficient count does not match grid");
  Eigen::ArrayXcd v = coefficients;
  transform_axes(grid, v, false);
  return v;
}

Field inverse_transform(const PeriodicGrid& grid, const Eigen::ArrayXcd& coefficients) {
  return Field(grid, inverse_transform_raw(grid, coefficients));
}

bool has_nonzero_mean(const Eigen::ArrayXcd& c) {
  const double scale = c.abs().maxCoeff();
  return scale > 0.0 && std::abs(c[0]) > 1e-13 * scale;
}

Field apply_multiplier(const Field& u, const MultiplierSymbol& m) {
  Eigen::ArrayXcd c = forward_transform(u);
  ZeroModePolicy policy{};
  if (singular_at_zero(m, policy) && policy == ZeroModePolicy::Strict && has_nonzero_mean(c))
    throw ZeroModeError(symbol_name(m) + " applied to a field with nonzero mean; select project-out-mean to drop it");
  c *= symbol_values(u.grid(), m);
  check_finite(c, "multiplier");
  return inverse_transform(u.grid(), c);
}

Field apply_symbol(const Field& u, const Eigen::ArrayXcd& values) {
  if (values.size() != u.size()) throw DomainError("symbol table does not match grid");
  Eigen::ArrayXcd c = forward_transform(u) * values;
  check_finite(c, "multiplier");
  return inverse_transform(u.grid(), c);
}

Field schrodinger_propagate(const Field& u, double t, double sigma) {
  if (t == 0.0) return u;
  return apply_multiplier(u, symbol::SchrodingerPhase{t, sigma});
}

WaveState wave_propagate(const WaveState& state, double t, double sigma) {
  if (t == 0.0) return state;
  const PeriodicGrid& g = state.grid();
  const Eigen::ArrayXcd a = forward_transform(state.position());
  const Eigen::ArrayXcd b = forward_transform(state.velocity());
  const Eigen::ArrayXd& k = g.wavenumber_magnitude();
  Eigen::ArrayXcd pa(g.size()), pb(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (k[i] == 0.0) {
      pa[i] = a[i] + t * b[i];
      pb[i] = b[i];
      continue;
    }
    const double w = std::pow(k[i], sigma);
    const double c = std::cos(t * w);
    const double s = std::sin(t * w);
    pa[i] = c * a[i] + (s / w) * b[i];
    pb[i] = -w * s * a[i] + c * b[i];
  }
  return WaveState(inverse_transform(g, pa), inverse_transform(g, pb));
}

double refined_max_abs(const Field& u, int factor) {
  if (factor < 1 || (factor & (factor - 1)) != 0) throw DomainError("refinement factor must be a power of two");
  const PeriodicGrid& g = u.grid();
  if (factor == 1) return u.values().abs().maxCoeff();
  const PeriodicGrid fine = PeriodicGrid::make(g.dim(), g.points_per_axis() * factor, g.box_length());
  const Eigen::ArrayXcd c = forward_transform(u);
  Eigen::ArrayXcd cf = Eigen::ArrayXcd::Zero(fine.size());
  int k[3] = {0, 0, 0};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) k[a] = g.mode(a)[i];
    cf[fine.coefficient_index(k)] = c[i];
  }
  return inverse_transform_raw(fine, cf).abs().maxCoeff();
}

// --- snapshots -------------------------------------------------------------

std::string encode_snapshot(const PeriodicGrid& grid, const std::vector<const Eigen::ArrayXcd*>& components) {
  std::string s;
  s.reserve(32 + components.size() * grid.size() * 16);
  s.append("FDSP", 4);
  put_u32(s, kSnapshotVersion);
  put_u32(s, static_cast<std::uint32_t>(grid.dim()));
  put_u32(s, static_cast<std::uint32_t>(grid.points_per_axis()));
  put_f64(s, grid.box_length());
  put_u64(s, static_cast<std::uint64_t>(components.size() * grid.size()));
  for (const auto* c : components) {
    if (c->size() != grid.size()) throw DomainError("snapshot component size mismatch");
    for (Eigen::Index i = 0; i < c->size(); ++i) {
      put_f64(s, (*c)[i].real());
      put_f64(s, (*c)[i].imag());
    }
  }
  return s;
}

std::string encode_snapshot(const Field& u) { return encode_snapshot(u.grid(), {&u.values()}); }

std::string encode_snapshot(const WaveState& st) {
  return encode_snapshot(st.grid(), {&st.position().values(), &st.velocity().values()});
}

SnapshotData decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "FDSP") != 0) throw DomainError("not an FDSP snapshot");
  std::size_t pos = 4;
  const auto version = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  if (version != kSnapshotVersion) throw DomainError("unsupported snapshot version " + std::to_string(version));
  const int d = static_cast<int>(get_le(bytes, pos, 4));
  const int n = static_cast<int>(get_le(bytes, pos, 4));
  const double L = std::bit_cast<double>(get_le(bytes, pos, 8));
  const std::uint64_t count = get_le(bytes, pos, 8);
  PeriodicGrid grid = PeriodicGrid::make(d, n, L);
  const auto size = static_cast<std::uint64_t>(grid.size());
  if (count == 0 || count % size != 0) throw DomainError("snapshot sample count is not a multiple of n^d");
  if (bytes.size() != pos + count * 16) throw DomainError("snapshot payload length does not match header count");
  SnapshotData out{grid, {}};
  for (std::uint64_t c = 0; c < count / size; ++c) {
    Eigen::ArrayXcd v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double re = std::bit_cast<double>(get_le(bytes, pos, 8));
      const double im = std::bit_cast<double>(get_le(bytes, pos, 8));
      v[i] = Complex(re, im);
    }
    out.components.push_back(std::move(v));
  }
  return out;
}

void write_snapshot(const std::string& path, const Field& u) { atomic_write(path, encode_snapshot(u)); }

void write_snapshot(const std::string& path, const WaveState& s) { atomic_write(path, encode_snapshot(s)); }

SnapshotData read_snapshot(const std::string& path) { return decode_snapshot(read_file(path)); }

}  // namespace fraclab
