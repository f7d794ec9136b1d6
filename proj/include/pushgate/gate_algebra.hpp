#pragma once

// Two-qubit algebra of diagonal phase gates, spin-echo sequences and the
// minimum-over-states fidelity under perfect and imperfect pi pulses.
//
// Basis order is |00>, |01>, |10>, |11>; qubit 1 is the left tensor factor.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pushgate/constants.hpp"
#include "pushgate/rng.hpp"

namespace pushgate {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

/// Maps an angle to (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// diag{e^{i Theta00}, e^{i Theta01}, e^{i Theta10}, e^{i Theta11}}.
class DiagonalGate {
 public:
  DiagonalGate() : theta_{0.0, 0.0, 0.0, 0.0} {}
  DiagonalGate(double t00, double t01, double t10, double t11) : theta_{t00, t01, t10, t11} {
    for (double t : theta_)
      if (!std::isfinite(t)) throw std::invalid_argument("DiagonalGate: non-finite phase");
  }
  explicit DiagonalGate(const std::array<double, 4>& t) : DiagonalGate(t[0], t[1], t[2], t[3]) {}

  /// P_theta = diag{1, 1, 1, e^{i theta}}.
  static DiagonalGate conditional(double vartheta) { return {0.0, 0.0, 0.0, vartheta}; }

  /// Z_1(phi1) Z_2(phi2) with Z(t) = diag{e^{it/2}, e^{-it/2}}.
  static DiagonalGate local_z(double phi1, double phi2) {
    return {0.5 * (phi1 + phi2), 0.5 * (phi1 - phi2), 0.5 * (-phi1 + phi2), -0.5 * (phi1 + phi2)};
  }

  double operator[](int i) const { return theta_[static_cast<std::size_t>(i)]; }
  const std::array<double, 4>& phases() const { return theta_; }

  /// theta = Theta11 - Theta10 - Theta01 + Theta00.
  double conditional_phase() const { return theta_[3] - theta_[2] - theta_[1] + theta_[0]; }

  DiagonalGate operator*(const DiagonalGate& o) const {
    return {theta_[0] + o.theta_[0], theta_[1] + o.theta_[1], theta_[2] + o.theta_[2],
            theta_[3] + o.theta_[3]};
  }
  DiagonalGate adjoint() const { return {-theta_[0], -theta_[1], -theta_[2], -theta_[3]}; }

  /// Divides out the phase of the (0,0) entry and wraps to (-pi, pi].
  DiagonalGate normalized() const {
    return {0.0, wrap_phase(theta_[1] - theta_[0]), wrap_phase(theta_[2] - theta_[0]),
            wrap_phase(theta_[3] - theta_[0])};
  }

  Mat4 matrix() const {
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 4; ++i) m(i, i) = std::polar(1.0, theta_[static_cast<std::size_t>(i)]);
    return m;
  }

 private:
  std::array<double, 4> theta_;
};

class SingleQubitOp {
 public:
  explicit SingleQubitOp(const Mat2& m) : m_(m) {}

  static SingleQubitOp identity() { return SingleQubitOp(Mat2::Identity()); }

  /// Z(t) = diag{e^{it/2}, e^{-it/2}}.
  static SingleQubitOp z(double t) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, 0.5 * t);
    m(1, 1) = std::polar(1.0, -0.5 * t);
    return SingleQubitOp(m);
  }

  /// R = |0><1| - |1><0|, the ideal pi pulse.
  static SingleQubitOp flip() {
    Mat2 m;
    m << 0.0, 1.0, -1.0, 0.0;
    return SingleQubitOp(m);
  }

  /// M(eps), rotation by an extra angle eps about the pulse axis.
  static SingleQubitOp over_rotation(double eps) {
    const double c = std::cos(0.5 * eps);
    const double s = std::sin(0.5 * eps);
    Mat2 m;
    m << c, -s, s, c;
    return SingleQubitOp(m);
  }

  const Mat2& matrix() const { return m_; }

  bool is_unitary(double tol = 1e-12) const {
    return (m_.adjoint() * m_ - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Mat2 m_;
};

class TwoQubitState {
 public:
  explicit TwoQubitState(const Vec4& amplitudes) : c_(amplitudes) {
    if (std::abs(c_.squaredNorm() - 1.0) > 1e-12)
      throw std::invalid_argument("TwoQubitState: amplitudes not normalized");
  }
  static TwoQubitState normalize(const Vec4& v) { return TwoQubitState(v / v.norm()); }
  const Vec4& amplitudes() const { return c_; }

 private:
  Vec4 c_;
};

class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(const Mat4& rho) : rho_(rho) {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("TwoQubitDensity: not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > 1e-12)
      throw std::invalid_argument("TwoQubitDensity: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10)
      throw std::invalid_argument("TwoQubitDensity: not positive semidefinite");
  }
  static TwoQubitDensity pure(const TwoQubitState& psi) {
    return TwoQubitDensity(psi.amplitudes() * psi.amplitudes().adjoint());
  }
  const Mat4& matrix() const { return rho_; }

 private:
  Mat4 rho_;
};

/// Pi-pulse imperfections. Only one sub-model is meant to be active per
/// evaluation: phase errors (phase_error*, repeat*), over-rotation
/// (over_rotation, repeat), or bit flips (zeta*).
struct PiPulseErrorModel {
  double phase_error1 = 0.0;
  double phase_error2 = 0.0;
  double phase_repeat1 = 0.0;
  double phase_repeat2 = 0.0;
  double over_rotation = 0.0;
  double over_rotation_repeat = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
};

/// Above this bit-flip probability the first-order fidelity estimate is not
/// trustworthy.
inline constexpr double kBitflipPerturbativeLimit = 0.1;

/// S1 = Z1(Theta10 - Theta00), S2 = Z2(Theta01 - Theta00). Applied after the
/// gate they leave diag{1, 1, 1, e^{i theta}} up to a global phase.
inline std::pair<SingleQubitOp, SingleQubitOp> local_correction(const DiagonalGate& g) {
  return {SingleQubitOp::z(g[2] - g[0]), SingleQubitOp::z(g[1] - g[0])};
}

struct DiagFidelity {
  double fidelity = 1.0;
  double infidelity = 0.0;
  /// |c_ab|^2 of a minimizing state.
  std::array<double, 4> weights{1.0, 0.0, 0.0, 0.0};
};

/// min over |Psi> of |<Psi| diag{e^{i theta_k}} |Psi>|^2 = 1 - 4 max f, with
/// f(p) = sum_{j<k} p_j p_k sin^2((theta_j - theta_k)/2) on the simplex.
///
/// Every face of the simplex is searched for its interior stationary point.
/// A face whose KKT system is singular has a line of equal values through
/// its stationary point reaching a lower-dimensional face, so skipping it
/// loses nothing; the enumeration is therefore exact.
inline DiagFidelity min_state_fidelity_diag(const std::array<double, 4>& theta) {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  double smax = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      if (j == k) continue;
      const double h = std::sin(0.5 * (theta[static_cast<std::size_t>(j)] -
                                        theta[static_cast<std::size_t>(k)]));
      s(j, k) = h * h;
      smax = std::max(smax, s(j, k));
    }
  DiagFidelity best;
  if (smax == 0.0) return best;
  const Eigen::Matrix4d scaled = s / smax;

  double best_f = 0.0;
  for (unsigned mask = 1; mask < 16; ++mask) {
    int idx[4];
    int m = 0;
    for (int i = 0; i < 4; ++i)
      if (mask & (1u << i)) idx[m++] = i;
    if (m < 2) continue;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) kkt(a, b) = scaled(idx[a], idx[b]);
      kkt(a, m) = -1.0;
      kkt(m, a) = 1.0;
    }
    rhs(m) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::Vector4d p = Eigen::Vector4d::Zero();
    bool feasible = true;
    for (int a = 0; a < m; ++a) {
      if (sol(a) < -1e-12) feasible = false;
      p(idx[a]) = std::max(0.0, sol(a));
    }
    if (!feasible) continue;
    p /= p.sum();
    const double f = 0.5 * p.dot(s * p);
    if (f > best_f) {
      best_f = f;
      for (int i = 0; i < 4; ++i) best.weights[static_cast<std::size_t>(i)] = p(i);
    }
  }
  best.infidelity = std::min(1.0, 4.0 * best_f);
  best.fidelity = 1.0 - best.infidelity;
  return best;
}

inline double fidelity_min_diag(const DiagonalGate& residual) {
  return min_state_fidelity_diag(residual.phases()).fidelity;
}

/// Fidelity without echo for phase deviations (dTheta00, dTheta01, dTheta10, dTheta11).
inline double fidelity_no_echo(const std::array<double, 4>& deltas) {
  return min_state_fidelity_diag(deltas).fidelity;
}

/// Phase of the corrected echo sequence S'(R G2)(R G1) relative to the ideal
/// echoed gate diag{1, 1, 1, e^{2i target}}, which is P_pi at 2 target = pi.
/// S' = Z1(-target) Z2(-target). The result is normalized on (0,0).
inline DiagonalGate echo_sequence_residual(const DiagonalGate& g1, const DiagonalGate& g2,
                                           double target) {
  const std::array<double, 4> sprime{-target, 0.0, 0.0, target};
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    // R G2 R maps |ab> through |(1-a)(1-b)>, i.e. index 3 - i; the signs cancel.
    out[static_cast<std::size_t>(i)] = g1[i] + g2[3 - i] + sprime[static_cast<std::size_t>(i)];
  }
  out[3] -= 2.0 * target;
  return DiagonalGate(out).normalized();
}

/// Echo fidelity with the phase-error pulse model: the pulses add
/// Z1(phase_error1) Z2(phase_error2) on the first flip and the repeat factors
/// times those on the second.
inline double echo_fidelity_phase_errors(double delta_vartheta, const PiPulseErrorModel& e) {
  const DiagonalGate residual{delta_vartheta, 0.0, 0.0, delta_vartheta};
  const DiagonalGate z = DiagonalGate::local_z((1.0 - e.phase_repeat1) * e.phase_error1,
                                               (1.0 - e.phase_repeat2) * e.phase_error2);
  return fidelity_min_diag(z * residual);
}

/// min over |Psi> of |<Psi|Q|Psi>|^2 for any 4x4 Q.
///
/// The numerical range W(Q) is convex, so its distance from the origin is
/// max over phi of lambda_min(Herm(e^{-i phi} Q)). On the arc where that is
/// positive the function is unimodal, so a sampled maximum refined by golden
/// section is exact to rounding.
inline double min_state_overlap_sq(const Mat4& q) {
  auto lower = [&q](double phi) {
    const Mat4 rotated = std::polar(1.0, -phi) * q;
    const Mat4 h = 0.5 * (rotated + rotated.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat4> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  constexpr int kSamples = 256;
  const double step = 2.0 * kPi / kSamples;
  double best_phi = 0.0;
  double best = -1.0;
  for (int i = 0; i < kSamples; ++i) {
    const double phi = step * i;
    const double v = lower(phi);
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_phi - step;
  double hi = best_phi + step;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = lower(x1);
  double f2 = lower(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = lower(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = lower(x1);
    }
  }
  const double d = std::max({best, f1, f2, 0.0});
  return std::min(1.0, d * d);
}

namespace detail {

inline Mat4 flip_both() {
  const Mat2 r = SingleQubitOp::flip().matrix();
  return kron(r, r);
}

inline Mat4 echo_correction(double target) {
  return kron(SingleQubitOp::z(-target).matrix(), SingleQubitOp::z(-target).matrix());
}

}  // namespace detail

/// Echo fidelity when both pulses over-rotate: the first by eps on each
/// qubit, the second by repeat * eps. `estimate` is the calibrated gate whose
/// conditional phase sets the correction S'.
inline double echo_fidelity_overrotation(const DiagonalGate& actual, const DiagonalGate& estimate,
                                         double eps, double repeat) {
  const Mat4 g = actual.matrix();
  const Mat4 gp = estimate.matrix();
  const Mat4 r = detail::flip_both();
  const Mat2 ma1 = SingleQubitOp::over_rotation(eps).matrix();
  const Mat2 mb1 = SingleQubitOp::over_rotation(repeat * eps).matrix();
  const Mat4 ma = kron(ma1, ma1);
  const Mat4 mb = kron(mb1, mb1);
  const Mat4 s = detail::echo_correction(estimate.conditional_phase());
  const Mat4 act = s * r * mb * g * r * ma * g;
  const Mat4 ideal = s * r * gp * r * gp;
  return min_state_overlap_sq(ideal.adjoint() * act);
}

inline double echo_fidelity_overrotation(const DiagonalGate& g, double eps, double repeat) {
  return echo_fidelity_overrotation(g, g, eps, repeat);
}

/// Kraus operators of one imperfect pi-pulse pair: each qubit flips with
/// probability 1 - zeta_j and is left alone with probability zeta_j.
inline std::array<Mat4, 4> bitflip_kraus(double zeta1, double zeta2) {
  if (!(zeta1 >= 0.0 && zeta1 <= 1.0 && zeta2 >= 0.0 && zeta2 <= 1.0))
    throw std::invalid_argument("bitflip_kraus: zeta outside [0, 1]");
  const Mat2 r = SingleQubitOp::flip().matrix();
  const Mat2 one = Mat2::Identity();
  return {std::sqrt((1.0 - zeta1) * (1.0 - zeta2)) * kron(r, r),
          std::sqrt((1.0 - zeta1) * zeta2) * kron(r, one),
          std::sqrt(zeta1 * (1.0 - zeta2)) * kron(one, r),
          std::sqrt(zeta1 * zeta2) * kron(one, one)};
}

struct PureStateMinimum {
  double value = 1.0;
  Vec4 state = Vec4::Unit(0);
};

/// min over |Psi> of sum_k |<Psi|K_k|Psi>|^2 by multi-start Riemannian
/// gradient descent on the unit sphere of C^4. Start set is deterministic.
inline PureStateMinimum minimize_sum_of_overlaps(const std::vector<Mat4>& ks) {
  std::vector<Mat4> kd;
  kd.reserve(ks.size());
  for (const auto& k : ks) kd.push_back(k.adjoint());

  auto eval = [&](const Vec4& psi, Vec4* grad) {
    double h = 0.0;
    Vec4 g = Vec4::Zero();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const Vec4 kp = ks[i] * psi;
      const cplx z = psi.dot(kp);
      h += std::norm(z);
      if (grad) g += 2.0 * (std::conj(z) * kp + z * (kd[i] * psi));
    }
    if (grad) {
      g -= psi.dot(g).real() * psi;
      *grad = g;
    }
    return h;
  };

  std::vector<Vec4> starts;
  for (int i = 0; i < 4; ++i) starts.push_back(Vec4::Unit(i));
  const cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (const cplx& ph : quarter) {
        Vec4 v = Vec4::Zero();
        v(i) = 1.0;
        v(j) = ph;
        starts.push_back(v.normalized());
      }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        Vec4 v(1.0, quarter[a], quarter[b], quarter[c]);
        starts.push_back(v.normalized());
      }
  for (std::uint64_t n = 0; n < 16; ++n) {
    SampleStream rng(0x5eedULL, n);
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(rng.normal(), rng.normal());
    starts.push_back(v.normalized());
  }

  PureStateMinimum best;
  best.value = eval(starts.front(), nullptr);
  best.state = starts.front();
  for (const Vec4& start : starts) {
    Vec4 psi = start;
    Vec4 g;
    double h = eval(psi, &g);
    double t = 0.5;
    double h_mark = h;
    for (int it = 0; it < 4000; ++it) {
      const double gn2 = g.squaredNorm();
      if (gn2 < 1e-26) break;
      // Flat valleys converge sublinearly; stop once 50 steps gain < 1e-15.
      if (it % 50 == 49) {
        if (h_mark - h < 1e-15) break;
        h_mark = h;
      }
      Vec4 trial;
      Vec4 gt;
      double ht = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = (psi - t * g).normalized();
        ht = eval(trial, &gt);
        if (ht <= h - 1e-4 * t * gn2) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      // Barzilai-Borwein step for the next iteration.
      const Vec4 ds = trial - psi;
      const Vec4 dy = gt - g;
      const double sy = ds.dot(dy).real();
      t = sy > 0.0 ? std::clamp(ds.squaredNorm() / sy, 1e-6, 10.0) : 0.5;
      psi = trial;
      g = gt;
      h = ht;
    }
    if (h < best.value) {
      best.value = h;
      best.state = psi;
    }
  }
  return best;
}

/// Kraus products of the full bit-flip echo sequence G, S, pulses, G, S~,
/// pulses, each pre-multiplied by the adjoint of the ideal outcome
/// diag{1, 1, 1, e^{2i target}}.
inline std::vector<Mat4> bitflip_sequence_operators(const DiagonalGate& actual,
                                                    const DiagonalGate& estimate, double zeta1,
                                                    double zeta2) {
  const double vt = estimate.conditional_phase();
  const Mat4 g = actual.matrix();
  const Mat4 s = DiagonalGate(-estimate[0], -estimate[1], -estimate[2], -estimate[3] + vt).matrix();
  const Mat4 st = DiagonalGate(-estimate[0] + vt, -estimate[1], -estimate[2], -estimate[3]).matrix();
  const Mat4 ideal_adj = DiagonalGate::conditional(2.0 * vt).adjoint().matrix();
  const auto m = bitflip_kraus(zeta1, zeta2);
  std::vector<Mat4> ks;
  ks.reserve(16);
  for (const auto& ma : m)
    for (const auto& mb : m) ks.push_back(ideal_adj * mb * st * g * ma * s * g);
  return ks;
}

/// Minimum echo fidelity with relaxing pi pulses. Equals (1 - 4 zeta) F' to
/// first order in zeta; above kBitflipPerturbativeLimit that estimate fails.
inline PureStateMinimum echo_bitflip_minimum(const DiagonalGate& actual,
                                             const DiagonalGate& estimate, double zeta1,
                                             double zeta2) {
  return minimize_sum_of_overlaps(bitflip_sequence_operators(actual, estimate, zeta1, zeta2));
}

inline double echo_fidelity_bitflip(const DiagonalGate& actual, const DiagonalGate& estimate,
                                    double zeta1, double zeta2) {
  return echo_bitflip_minimum(actual, estimate, zeta1, zeta2).value;
}

inline double echo_fidelity_bitflip(const DiagonalGate& g, double zeta) {
  return echo_fidelity_bitflip(g, g, zeta, zeta);
}

}  // namespace pushgate
