#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpi/solitons.hpp"

namespace kpi {

/// Orthonormal real trigonometric basis on the x-axis of a grid: the constant
/// (optional), then cos(ξ_p x), sin(ξ_p x) for p = 1 .. nx/2 - 1. The Nyquist
/// mode is left out so that ∂ₓ is antisymmetric. Columns of `samples` are the
/// basis functions times √dx, hence samplesᵀ·samples = I exactly.
struct FourierBasis {
  Grid grid;
  bool with_constant = true;
  std::vector<double> xi;  // wavenumber of each basis function (0 for the constant)
  std::vector<int> parity;  // 0 constant, +1 cosine, -1 sine
  Eigen::MatrixXd samples;

  int size() const { return static_cast<int>(xi.size()); }

  static FourierBasis make(const Grid& g, bool with_constant) {
    FourierBasis b;
    b.grid = g;
    b.with_constant = with_constant;
    const int pmax = g.nx / 2 - 1;
    if (with_constant) {
      b.xi.push_back(0.0);
      b.parity.push_back(0);
    }
    for (int p = 1; p <= pmax; ++p) {
      b.xi.push_back(g.xi(p));
      b.parity.push_back(1);
      b.xi.push_back(g.xi(p));
      b.parity.push_back(-1);
    }
    b.samples.resize(g.nx, b.size());
    const double sdx = std::sqrt(g.dx());
    const double c0 = 1.0 / std::sqrt(g.lx);
    const double c1 = std::sqrt(2.0 / g.lx);
    for (int m = 0; m < b.size(); ++m) {
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        double v = c0;
        if (b.parity[m] == 1) v = c1 * std::cos(b.xi[m] * x);
        if (b.parity[m] == -1) v = c1 * std::sin(b.xi[m] * x);
        b.samples(i, m) = v * sdx;
      }
    }
    return b;
  }

  Eigen::VectorXd coefficients(const Profile1D& f) const {
    Eigen::Map<const Eigen::VectorXd> v(f.values.data(), grid.nx);
    return samples.transpose() * v * std::sqrt(grid.dx());
  }

  Profile1D profile(const Eigen::VectorXd& coef) const {
    Profile1D out(grid);
    Eigen::Map<Eigen::VectorXd> v(out.values.data(), grid.nx);
    v = samples * coef / std::sqrt(grid.dx());
    return out;
  }

  /// Matrix of ∂ₓ in this basis (antisymmetric, block 2x2 per wavenumber).
  Eigen::MatrixXd derivative() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size(), size());
    for (int m = 0; m < size(); ++m) {
      if (parity[m] != 1) continue;
      // ∂ₓ cos = -ξ sin, ∂ₓ sin = ξ cos; column m is the image of basis m.
      d(m + 1, m) = -xi[m];
      d(m, m + 1) = xi[m];
    }
    return d;
  }
};

enum class OperatorKind { second_order, fourth_order };

/// Dense symmetric matrix of a 1-D linearized operator in a FourierBasis.
struct OperatorMatrix {
  OperatorKind kind = OperatorKind::second_order;
  int n = 0;
  double c = 0.0;
  std::shared_ptr<const FourierBasis> basis;
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(entries.rows()); }
  std::string describe() const {
    return kind == OperatorKind::second_order ? "L_" + std::to_string(n) : "-d_x L_1 d_x";
  }
  /// Bottom of the essential spectrum of the continuum operator.
  double essential_edge() const { return kind == OperatorKind::second_order ? c + 2.0 * n : 1.0; }
  double symmetry_defect() const { return (entries - entries.transpose()).cwiseAbs().maxCoeff(); }
};

namespace detail {

inline Eigen::MatrixXd potential_block(const FourierBasis& b, const Profile1D& potential) {
  Eigen::Map<const Eigen::VectorXd> v(potential.values.data(), b.grid.nx);
  return b.samples.transpose() * v.asDiagonal() * b.samples;
}

inline void check_speed(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("linop: speed must be positive");
}

inline void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()); }

}  // namespace detail

/// L_n = -∂ₓ² - n²∂ₓ⁻² + c - Q_c. For n ≥ 1 the operator acts on mean-zero profiles.
inline OperatorMatrix build_L(int n, double c, const Grid& g) {
  if (n < 0) throw std::domain_error("build_L: n must be >= 0 (the operator depends on n²)");
  detail::check_speed(c);
  auto basis = std::make_shared<const FourierBasis>(FourierBasis::make(g, n == 0));
  const Profile1D q = line_soliton_profile(c, g);
  Profile1D pot(g);
  for (int i = 0; i < g.nx; ++i) pot[i] = c - q[i];
  OperatorMatrix m;
  m.kind = OperatorKind::second_order;
  m.n = n;
  m.c = c;
  m.entries = detail::potential_block(*basis, pot);
  for (int k = 0; k < basis->size(); ++k) {
    const double xi = basis->xi[k];
    m.entries(k, k) += xi * xi + (xi > 0.0 ? n * n / (xi * xi) : 0.0);
  }
  detail::symmetrize(m.entries);
  m.basis = std::move(basis);
  return m;
}

/// -∂ₓ L₁ ∂ₓ on mean-zero profiles, assembled as Dᵀ L₁ D.
inline OperatorMatrix build_fourth_order(double c, const Grid& g) {
  OperatorMatrix l1 = build_L(1, c, g);
  const Eigen::MatrixXd d = l1.basis->derivative();
  OperatorMatrix m;
  m.kind = OperatorKind::fourth_order;
  m.n = 1;
  m.c = c;
  m.entries = d.transpose() * l1.entries * d;
  detail::symmetrize(m.entries);
  m.basis = l1.basis;
  return m;
}

/// u'''' + u - ∂ₓ((c - Q_c) u'), the local form of -∂ₓL₁∂ₓ u (spectral derivatives).
inline Profile1D apply_fourth_order_local(const Profile1D& u, double c) {
  const Grid& g = u.grid;
  const Profile1D q = line_soliton_profile(c, g);
  Profile1D flux = deriv_x(u, 1);
  for (int i = 0; i < g.nx; ++i) flux[i] *= c - q[i];
  Profile1D out = deriv_x(u, 4);
  out += u;
  out -= deriv_x(flux, 1);
  return out;
}

/// Matrix action on a profile (the profile is first projected onto the basis).
inline Profile1D apply(const OperatorMatrix& m, const Profile1D& u) {
  return m.basis->profile(m.entries * m.basis->coefficients(u));
}

// ---------------------------------------------------------------------------
// Spectra

struct NearZero {
  double eigenvalue = 0.0;
  double overlap = 0.0;  // |⟨v, k⟩| / (‖v‖ ‖k‖) with the supplied kernel profile
};

struct SpectrumReport {
  std::string op;
  int n = 0;
  double c = 0.0;
  int size = 0;
  std::vector<double> eigenvalues;     // the `count` smallest, ascending
  std::vector<Profile1D> eigenvectors;  // L²-normalized
  int negative_count = 0;               // over the whole spectrum
  double negative_threshold = 0.0;
  double norm = 0.0;
  double essential_edge = 0.0;
  int continuum_from = 0;  // index of the first reported eigenvalue at or above the edge
  std::vector<NearZero> near_zero;
};

/// Overlap |⟨a, b⟩| / (‖a‖‖b‖) in L².
inline double overlap(const Profile1D& a, const Profile1D& b) {
  return std::abs(inner(a, b)) / (l2_norm(a) * l2_norm(b));
}

inline constexpr double near_zero_band = 1e-4;

inline SpectrumReport spectrum(const OperatorMatrix& m, int count, const std::optional<Profile1D>& kernel = {}) {
  if (count < 1) throw std::domain_error("spectrum: count must be >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.entries);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed for " + m.describe());
  const Eigen::VectorXd& ev = es.eigenvalues();
  SpectrumReport r;
  r.op = m.describe();
  r.n = m.n;
  r.c = m.c;
  r.size = m.size();
  r.norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  r.negative_threshold = -1e-8 * r.norm;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) < r.negative_threshold) ++r.negative_count;
  r.essential_edge = m.essential_edge();
  const int take = std::min<int>(count, static_cast<int>(ev.size()));
  r.continuum_from = take;
  for (int k = 0; k < take; ++k) {
    r.eigenvalues.push_back(ev(k));
    Profile1D v = m.basis->profile(es.eigenvectors().col(k));
    v *= 1.0 / l2_norm(v);
    if (ev(k) >= r.essential_edge - 1e-9 && r.continuum_from == take) r.continuum_from = k;
    if (kernel && std::abs(ev(k)) < near_zero_band) r.near_zero.push_back({ev(k), overlap(v, *kernel)});
    r.eigenvectors.push_back(std::move(v));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Constrained coercivity

/// Per-basis-function Z¹ weight (1 + |ξ| + |n/ξ|)², with 1 on the constant.
inline Eigen::VectorXd z1_mode_weights(const OperatorMatrix& m) {
  const auto& b = *m.basis;
  Eigen::VectorXd w(b.size());
  for (int k = 0; k < b.size(); ++k) {
    const double xi = b.xi[k];
    const double s = xi > 0.0 ? 1.0 + xi + m.n / xi : 1.0;
    w(k) = s * s;
  }
  return w;
}

/// min ⟨Lw, w⟩ / ‖w‖²_{Z¹} over w orthogonal (in L²) to every constraint.
inline double coercivity_constant(const OperatorMatrix& m, const std::vector<Profile1D>& constraints) {
  const int dim = m.size();
  Eigen::MatrixXd P;
  if (constraints.empty()) {
    P = Eigen::MatrixXd::Identity(dim, dim);
  } else {
    Eigen::MatrixXd C(dim, static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t j = 0; j < constraints.size(); ++j) C.col(j) = m.basis->coefficients(constraints[j]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(constraints.size())) {
      throw std::domain_error("coercivity_constant: constraints are linearly dependent on this grid");
    }
    const Eigen::MatrixXd Q = qr.householderQ();
    P = Q.rightCols(dim - static_cast<Eigen::Index>(constraints.size()));
  }
  const Eigen::MatrixXd A = P.transpose() * m.entries * P;
  const Eigen::MatrixXd B = P.transpose() * z1_mode_weights(m).asDiagonal() * P;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (A + A.transpose()), 0.5 * (B + B.transpose()),
                                                                Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw std::runtime_error("coercivity_constant: generalized eigensolve failed");
  return ges.eigenvalues()(0);
}

struct SpeedScanRow {
  double c = 0.0;
  double smallest = 0.0;
};

/// Smallest eigenvalue of the unconstrained L₁(c) for each speed.
inline std::vector<SpeedScanRow> coercivity_vs_speed(const std::vector<double>& c_values, const Grid& g) {
  std::vector<SpeedScanRow> rows;
  for (double c : c_values) {
    if (!(c > 0.0) || !(c < 4.0)) throw std::domain_error("coercivity_vs_speed: speeds must lie in (0, 4)");
    const auto r = spectrum(build_L(1, c, g), 1);
    rows.push_back({c, r.eigenvalues.front()});
  }
  return rows;
}

/// Erf window, ≈1 on |x| ≤ half_width and decaying over `edge`; used to apply
/// the local operator to exponentially growing kernel profiles.
inline Profile1D erf_window(const Grid& g, double half_width, double edge) {
  return Profile1D::sample(g, [=](double x) {
    return 0.25 * (1.0 + std::erf((x + half_width) / edge)) * (1.0 - std::erf((x - half_width) / edge));
  });
}

/// Residual of -∂ₓL₁∂ₓ on a kernel candidate restricted to |x| ≤ window,
/// relative to max |u''''| there.
struct KernelResidual {
  double max_abs = 0.0;
  double relative = 0.0;
};

inline KernelResidual local_kernel_residual(const Profile1D& u, double c, double window) {
  const Grid& g = u.grid;
  const Profile1D r = apply_fourth_order_local(u, c);
  const Profile1D u4 = deriv_x(u, 4);
  KernelResidual out;
  double scale = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(g.x(i)) > window) continue;
    out.max_abs = std::max(out.max_abs, std::abs(r[i]));
    scale = std::max(scale, std::abs(u4[i]));
  }
  out.relative = out.max_abs / std::max(scale, 1e-300);
  return out;
}

/// ∂ₓg_μ multiplied by an erf window so spectral derivatives apply; the window
/// is flat to roundoff on |x| ≤ half_width - 5·edge.
inline Profile1D windowed_g_mu_dx(double mu, const Grid& g, double half_width = 9.0, double edge = 0.7) {
  Profile1D u = g_mu_dx(mu, g);
  const Profile1D w = erf_window(g, half_width, edge);
  for (int i = 0; i < g.nx; ++i) u[i] *= w[i];
  return u;
}

}  // namespace kpi
