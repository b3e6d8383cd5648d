#include "orlicz/systems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace orlicz {

namespace {

constexpr std::size_t kMaxDenseValues = 100'000'000;  // materialization guard

bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

// In-place forward DFT, X[j] = sum_k x[k] e^{-2 pi i jk/M}, radix-2
// Cooley-Tukey. `table` holds e^{-2 pi i t/M} for t = 0..M-1; twiddles are
// read from it directly so per-stage error stays at a few ulps.
void fft_pow2(std::vector<cplx>& a, const std::vector<cplx>& table) {
  const std::size_t m = a.size();
  for (std::size_t i = 1, j = 0; i < m; ++i) {
    std::size_t bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= m; len <<= 1) {
    const std::size_t stride = m / len;
    for (std::size_t i = 0; i < m; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = table[k * stride];
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<cplx> make_phase_table(std::size_t m) {
  std::vector<cplx> table(m);
  for (std::size_t t = 0; t < m; ++t) {
    table[t] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(t) /
                                   static_cast<double>(m));
  }
  return table;
}

double abs_sq(const cplx& z) {
  return z.real() * z.real() + z.imag() * z.imag();
}

}  // namespace

System::System(ProbSpace space, double p1) : space_(std::move(space)), p1_(p1) {
  if (!(p1 > 2.0)) {
    throw std::invalid_argument("System: p1 must be > 2");
  }
}

System System::fourier_impl(std::size_t n, std::size_t grid_m, double p1,
                            bool check_orthogonality) {
  if (n == 0) {
    throw std::invalid_argument("fourier: n must be positive");
  }
  if (check_orthogonality && grid_m < 2 * n) {
    throw std::invalid_argument("fourier: grid must satisfy M >= 2n");
  }
  if (grid_m < 2) {
    throw std::invalid_argument("fourier: grid must have at least 2 atoms");
  }
  System sys(ProbSpace::uniform_grid(grid_m), p1);
  sys.n_ = n;
  sys.freqs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.freqs_[i] = i + 1;
  sys.phase_table_ = make_phase_table(grid_m);
  sys.compute_stats(check_orthogonality);
  return sys;
}

System System::fourier(std::size_t n, std::size_t grid_m, double p1) {
  return fourier_impl(n, grid_m, p1, true);
}

System System::fourier_aliased(std::size_t n, std::size_t grid_m, double p1) {
  return fourier_impl(n, grid_m, p1, false);
}

System System::walsh(unsigned d, double p1) {
  if (d == 0 || d > 20) {
    throw std::invalid_argument("walsh: d must be in [1, 20]");
  }
  const std::size_t atoms = std::size_t{1} << d;
  const std::size_t n = atoms - 1;
  if (n * atoms > kMaxDenseValues) {
    throw std::invalid_argument("walsh: system too large to materialize");
  }
  System sys(ProbSpace::uniform_grid(atoms), p1);
  sys.n_ = n;
  sys.funcs_.reserve(n);
  for (std::size_t mask = 1; mask <= n; ++mask) {
    Func f;
    f.values.resize(atoms);
    for (std::size_t j = 0; j < atoms; ++j) {
      f.values[j] = (std::popcount(mask & j) & 1u) ? -1.0 : 1.0;
    }
    sys.funcs_.push_back(std::move(f));
  }

  // Character identity: <phi_A, phi_B> = E[phi_{A xor B}], so the defect is
  // the largest |E[phi_C]| over nonzero C.
  sys.compute_stats(false);
  double defect = 0.0;
  const auto& w = sys.space_.weights();
  for (std::size_t c = 1; c <= n; ++c) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < atoms; ++j) {
      acc.add((std::popcount(c & j) & 1u) ? -w[j] : w[j]);
    }
    defect = std::max(defect, std::abs(acc.value()));
  }
  sys.stats_.max_ortho_defect = defect;
  sys.ortho_measured_ = true;
  return sys;
}

System System::from_functions(ProbSpace space, std::vector<Func> functions,
                              double p1) {
  if (functions.empty()) {
    throw std::invalid_argument("from_functions: empty system");
  }
  for (const Func& f : functions) {
    if (f.values.size() != space.atom_count()) {
      throw std::invalid_argument("from_functions: function/space length mismatch");
    }
    for (const cplx& v : f.values) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw std::invalid_argument("from_functions: non-finite value");
      }
    }
  }
  System sys(std::move(space), p1);
  sys.n_ = functions.size();
  sys.funcs_ = std::move(functions);
  sys.compute_stats(true);
  return sys;
}

System System::load_csv(const std::string& path, double p1) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("System::load_csv: cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (row.empty() || row.size() % 2 != 0) {
      throw std::invalid_argument("System::load_csv: rows need interleaved re,im pairs");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("System::load_csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::invalid_argument("System::load_csv: empty file " + path);
  }
  const std::size_t atoms = rows.size();
  const std::size_t n = rows.front().size() / 2;
  std::vector<Func> funcs(n);
  for (std::size_t i = 0; i < n; ++i) {
    funcs[i].values.resize(atoms);
    for (std::size_t j = 0; j < atoms; ++j) {
      funcs[i].values[j] = cplx(rows[j][2 * i], rows[j][2 * i + 1]);
    }
  }
  return from_functions(ProbSpace::uniform_grid(atoms), std::move(funcs), p1);
}

void System::fill_row(std::size_t i, std::vector<cplx>& out) const {
  const std::size_t atoms = space_.atom_count();
  out.resize(atoms);
  if (!freqs_.empty()) {
    const std::size_t m = atoms;
    const std::uint64_t f = freqs_[i];
    for (std::size_t j = 0; j < atoms; ++j) {
      out[j] = phase_table_[(f * j) % m];
    }
  } else {
    out = funcs_[i].values;
  }
}

Func System::function(std::size_t i) const {
  if (i >= n_) {
    throw std::invalid_argument("System::function: index out of range");
  }
  Func f;
  fill_row(i, f.values);
  return f;
}

std::vector<cplx> System::synthesize(std::span<const cplx> coeffs,
                                     std::span<const std::size_t> subset) const {
  if (coeffs.size() != subset.size()) {
    throw std::invalid_argument("synthesize: coefficient/subset size mismatch");
  }
  const std::size_t atoms = space_.atom_count();
  for (std::size_t idx : subset) {
    if (idx >= n_) {
      throw std::invalid_argument("synthesize: subset index out of range");
    }
  }
  if (!freqs_.empty() && is_pow2(atoms) &&
      subset.size() >= static_cast<std::size_t>(std::bit_width(atoms))) {
    std::vector<cplx> buf(atoms, cplx{0.0, 0.0});
    for (std::size_t t = 0; t < subset.size(); ++t) {
      buf[freqs_[subset[t]] % atoms] += coeffs[t];
    }
    fft_pow2(buf, phase_table_);
    return buf;
  }
  std::vector<cplx> out(atoms, cplx{0.0, 0.0});
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const cplx a = coeffs[t];
    if (!freqs_.empty()) {
      const std::uint64_t f = freqs_[subset[t]];
      for (std::size_t j = 0; j < atoms; ++j) {
        out[j] += a * phase_table_[(f * j) % atoms];
      }
    } else {
      const auto& row_vals = funcs_[subset[t]].values;
      for (std::size_t j = 0; j < atoms; ++j) {
        out[j] += a * row_vals[j];
      }
    }
  }
  return out;
}

std::vector<cplx> System::analyze(std::span<const cplx> g,
                                  std::span<const std::size_t> subset) const {
  const std::size_t atoms = space_.atom_count();
  if (g.size() != atoms) {
    throw std::invalid_argument("analyze: function/space length mismatch");
  }
  for (std::size_t idx : subset) {
    if (idx >= n_) {
      throw std::invalid_argument("analyze: subset index out of range");
    }
  }
  const auto& w = space_.weights();
  if (!freqs_.empty() && is_pow2(atoms) &&
      subset.size() >= static_cast<std::size_t>(std::bit_width(atoms))) {
    // sum_j w_j g_j e^{+2 pi i f j / M} = DFT(w g)[(M - f) mod M]
    std::vector<cplx> buf(atoms);
    for (std::size_t j = 0; j < atoms; ++j) buf[j] = w[j] * g[j];
    fft_pow2(buf, phase_table_);
    std::vector<cplx> out(subset.size());
    for (std::size_t t = 0; t < subset.size(); ++t) {
      const std::size_t f = freqs_[subset[t]] % atoms;
      out[t] = buf[(atoms - f) % atoms];
    }
    return out;
  }
  std::vector<cplx> out(subset.size());
  for (std::size_t t = 0; t < subset.size(); ++t) {
    CompensatedSum re, im;
    if (!freqs_.empty()) {
      const std::uint64_t f = freqs_[subset[t]];
      for (std::size_t j = 0; j < atoms; ++j) {
        const cplx v = g[j] * std::conj(phase_table_[(f * j) % atoms]);
        re.add(w[j] * v.real());
        im.add(w[j] * v.imag());
      }
    } else {
      const auto& row_vals = funcs_[subset[t]].values;
      for (std::size_t j = 0; j < atoms; ++j) {
        const cplx v = g[j] * std::conj(row_vals[j]);
        re.add(w[j] * v.real());
        im.add(w[j] * v.imag());
      }
    }
    out[t] = cplx(re.value(), im.value());
  }
  return out;
}

void System::compute_stats(bool measure_orthogonality) {
  const std::size_t atoms = space_.atom_count();
  const auto& w = space_.weights();
  stats_ = SystemStats{};
  std::vector<cplx> row;
  for (std::size_t i = 0; i < n_; ++i) {
    fill_row(i, row);
    double sup = 0.0;
    CompensatedSum acc;
    for (std::size_t j = 0; j < atoms; ++j) {
      const double a = std::abs(row[j]);
      if (w[j] > 0.0) sup = std::max(sup, a);
      if (w[j] != 0.0 && a != 0.0) acc.add(w[j] * std::pow(a, p1_));
    }
    stats_.max_sup = std::max(stats_.max_sup, sup);
    stats_.S = std::max(stats_.S, std::pow(acc.value(), 1.0 / p1_));
  }

  if (!measure_orthogonality) {
    stats_.max_ortho_defect = std::numeric_limits<double>::quiet_NaN();
    ortho_measured_ = false;
    return;
  }

  double defect = 0.0;
  if (!freqs_.empty()) {
    // <phi_k, phi_l> depends only on d = k - l, so scan the n-1 distinct
    // positive differences instead of all pairs.
    for (std::size_t d = 1; d < n_; ++d) {
      CompensatedSum re, im;
      for (std::size_t j = 0; j < atoms; ++j) {
        const cplx v = phase_table_[(static_cast<std::uint64_t>(d) * j) % atoms];
        re.add(w[j] * v.real());
        im.add(w[j] * v.imag());
      }
      defect = std::max(defect, std::hypot(re.value(), im.value()));
    }
  } else {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        CompensatedSum re, im;
        for (std::size_t t = 0; t < atoms; ++t) {
          const cplx v = funcs_[i].values[t] * std::conj(funcs_[j].values[t]);
          re.add(w[t] * v.real());
          im.add(w[t] * v.imag());
        }
        defect = std::max(defect, std::hypot(re.value(), im.value()));
      }
    }
  }
  stats_.max_ortho_defect = defect;
  ortho_measured_ = true;
}

SystemStats validate_system(const System& sys, double p1) {
  if (sys.size() == 0) {
    throw std::invalid_argument("validate_system: empty system");
  }
  if (!(p1 > 2.0)) {
    throw std::invalid_argument("validate_system: p1 must be > 2");
  }
  SystemStats st;
  const auto& space = sys.space();
  std::vector<Func> rows;
  rows.reserve(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) rows.push_back(sys.function(i));
  for (const Func& f : rows) {
    st.S = std::max(st.S, lp_norm(space, f, p1));
    st.max_sup = std::max(st.max_sup, lp_norm(space, f, kInfinity));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      st.max_ortho_defect =
          std::max(st.max_ortho_defect, std::abs(inner_product(space, rows[i], rows[j])));
    }
  }
  return st;
}

}  // namespace orlicz
