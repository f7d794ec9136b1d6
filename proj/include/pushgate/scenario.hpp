#pragma once

// Scenario assembly: configuration parsing, the total infidelity budget,
// parameter sweeps, sweet-spot and oracle reports, figure presets and CSV.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pushgate/constants.hpp"
#include "pushgate/dipole_force.hpp"
#include "pushgate/parallel.hpp"
#include "pushgate/phase_engine.hpp"
#include "pushgate/stability.hpp"
#include "pushgate/thermal_nonuniform.hpp"
#include "pushgate/trap_dynamics.hpp"

namespace pushgate {

/// Malformed or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ThermalPreset { kDoppler, kGroundQuantum, kExplicit };

struct ThermalEnsemble {
  ThermalPreset preset = ThermalPreset::kDoppler;
  double temperature = 0.0;  // K, used by kExplicit

  /// kDoppler: kT = hbar Gamma / 2. kGroundQuantum: kT = hbar omega.
  double kelvin(const IonSpecies& ion, double omega) const {
    switch (preset) {
      case ThermalPreset::kDoppler:
        return codata::kHbar * ion.linewidth / (2.0 * codata::kBoltzmann);
      case ThermalPreset::kGroundQuantum:
        return codata::kHbar * omega / codata::kBoltzmann;
      case ThermalPreset::kExplicit:
        return temperature;
    }
    return temperature;
  }
};

/// Pulse length used when the detuning is left to the scenario.
inline constexpr double kDefaultOmegaTau = 5.0;

struct Scenario {
  IonSpecies ion = IonSpecies::calcium40();
  TrapConfig trap{2.0 * kPi * 1e6, 10e-6};
  LaserConfig laser{LaserMode::kTravelling, 0.1, 2e-6, 397e-9, 0.0, 2.0 * kPi * 1e12, 1e-6,
                    kPi / 4.0 / (2.0 * kPi / 397e-9)};
  ThermalEnsemble thermal;
  double zeta = 0.0;
  double target = kPi;  // total conditional phase 2 theta0
  bool auto_detuning = true;
  double omega_tau = kDefaultOmegaTau;  // used when auto_detuning
  // Geometry kept as fractions so that sweeps over w, omega or lambda keep it.
  double x0_frac = 0.5;
  double kz0 = kPi / 4.0;

  /// Recomputes laser offsets from the stored fractions.
  void sync_geometry() {
    laser.wavelength = ion.wavelength;
    laser.x0 = x0_frac * laser.waist;
    laser.z0 = kz0 / laser.k();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last || !std::isfinite(out))
    throw ConfigError("config: " + key + ": not a number: '" + v + "'");
  return out;
}

inline double parse_angle(const std::string& key, const std::string& v) {
  if (v == "pi") return kPi;
  if (v == "pi/2") return kPi / 2.0;
  return parse_number(key, v);
}

}  // namespace detail

/// Parses flat `key = value` lines with `#` comments on top of the defaults.
/// Unknown or repeated keys and malformed values raise ConfigError.
inline Scenario parse_config(std::istream& in) {
  Scenario sc;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string val = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, val).second) throw ConfigError("config: repeated key " + key);
  }

  auto num = [&](const std::string& k) { return detail::parse_number(k, kv.at(k)); };
  auto positive = [&](const std::string& k) {
    const double v = num(k);
    if (!(v > 0.0)) throw ConfigError("config: " + k + " must be positive");
    return v;
  };
  for (const auto& [key, val] : kv) {
    if (key == "ion.mass_u") {
      sc.ion.mass = positive(key) * codata::kAtomicMassUnit;
    } else if (key == "ion.charge_e") {
      sc.ion.charge = positive(key) * codata::kElementaryCharge;
    } else if (key == "ion.lambda_nm") {
      sc.ion.wavelength = positive(key) * 1e-9;
    } else if (key == "ion.gamma_hz") {
      sc.ion.linewidth = 2.0 * kPi * positive(key);
    } else if (key == "trap.omega_hz") {
      sc.trap.omega = 2.0 * kPi * positive(key);
    } else if (key == "trap.d_um") {
      sc.trap.d = positive(key) / 1e6;
    } else if (key == "laser.mode") {
      if (val == "travelling" || val == "traveling" || val == "tw") {
        sc.laser.mode = LaserMode::kTravelling;
      } else if (val == "standing" || val == "sw") {
        sc.laser.mode = LaserMode::kStanding;
      } else {
        throw ConfigError("config: laser.mode must be travelling or standing");
      }
    } else if (key == "laser.power_mw") {
      sc.laser.power = positive(key) * 1e-3;
    } else if (key == "laser.waist_um") {
      sc.laser.waist = positive(key) / 1e6;
    } else if (key == "laser.kz0_rad") {
      sc.kz0 = num(key);
    } else if (key == "laser.x0_frac_of_w") {
      sc.x0_frac = num(key);
    } else if (key == "laser.detuning_hz") {
      if (val == "auto") {
        sc.auto_detuning = true;
      } else {
        const double v = num(key);
        if (v == 0.0) throw ConfigError("config: laser.detuning_hz must be nonzero");
        sc.laser.detuning = 2.0 * kPi * v;
        sc.auto_detuning = false;
      }
    } else if (key == "thermal.preset") {
      if (val == "doppler") {
        sc.thermal.preset = ThermalPreset::kDoppler;
      } else if (val == "n1") {
        sc.thermal.preset = ThermalPreset::kGroundQuantum;
      } else {
        throw ConfigError("config: thermal.preset must be doppler or n1");
      }
    } else if (key == "thermal.T_uK") {
      const double v = num(key);
      if (!(v >= 0.0)) throw ConfigError("config: thermal.T_uK must be >= 0");
      sc.thermal = {ThermalPreset::kExplicit, v / 1e6};
    } else if (key == "pulses.zeta") {
      const double v = num(key);
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("config: pulses.zeta must be in [0, 1]");
      sc.zeta = v;
    } else if (key == "sequence.target") {
      const double v = detail::parse_angle(key, val);
      if (!(v > 0.0)) throw ConfigError("config: sequence.target must be positive");
      sc.target = v;
    } else {
      throw ConfigError("config: unknown key " + key);
    }
  }
  if (kv.count("thermal.preset") && kv.count("thermal.T_uK"))
    throw ConfigError("config: thermal.preset and thermal.T_uK are exclusive");
  sc.sync_geometry();
  return sc;
}

inline Scenario load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  return parse_config(f);
}

/// Infidelity budget of one scenario and the quantities behind it.
struct ScenarioResult {
  double omega = 0.0;  // rad / s
  double d = 0.0;      // m
  double epsilon = 0.0;
  double a = 0.0;      // m
  double kappa = 0.0;  // kT / hbar omega
  double detuning = 0.0;  // rad / s
  double xi = 0.0;
  double tau = 0.0;    // s
  double omega_tau = 0.0;
  double gate_time = 0.0;  // 2 tau, s
  double photons = 0.0;
  double photons_quadrature = 0.0;
  double p_prime = 0.0;       // closed form for the configuration
  double p_prime_full = 0.0;  // full moment expression
  double p_zeta = 0.0;        // 4 zeta
  double p_total = 0.0;       // additive
  double p_product = 0.0;     // 1 - (1 - 4 zeta)(1 - P')exp(-N)
  std::vector<std::string> failures;  // validity flags that block a result
  std::vector<std::string> warnings;

  bool valid() const { return failures.empty(); }

  std::string flag_string() const {
    std::string s;
    for (const auto* list : {&failures, &warnings})
      for (const auto& f : *list) s += (s.empty() ? "" : ";") + f;
    return s.empty() ? "ok" : s;
  }
};

/// Evaluates the budget 4 zeta + P' + N. Validity problems are recorded in
/// `failures` rather than thrown; malformed inputs still throw.
inline ScenarioResult total_infidelity(Scenario sc) {
  sc.ion.validate();
  sc.trap.validate();
  sc.sync_geometry();
  ScenarioResult r;
  r.omega = sc.trap.omega;
  r.d = sc.trap.d;
  r.epsilon = coulomb_parameter(sc.ion, sc.trap);
  r.a = ground_state_length(sc.ion, sc.trap);
  r.kappa = thermal_quanta(sc.thermal.kelvin(sc.ion, sc.trap.omega), sc.trap.omega);
  const double theta0 = sc.target / 2.0;

  if (sc.auto_detuning)
    sc.laser.detuning = detuning_for_omega_tau(sc.laser, sc.ion, sc.trap, sc.omega_tau, theta0);
  r.detuning = sc.laser.detuning;
  r.xi = xi_amplitude(sc.laser, sc.ion, sc.trap, false);
  if (r.xi == 0.0) throw std::domain_error("total_infidelity: no force at the ion position");
  r.tau = gate_time_for_angle(r.epsilon, r.omega, r.xi, theta0);
  r.omega_tau = r.omega * r.tau;
  r.gate_time = 2.0 * r.tau;

  const ScatteringReport scat = photons_scattered(sc.laser, sc.ion, sc.trap, theta0, false);
  r.photons = scat.photons;
  r.photons_quadrature = scat.photons_quadrature;

  const double ad = r.a / r.d;
  const double sigma = r.a * std::sqrt(r.kappa);
  if (sc.laser.mode == LaserMode::kTravelling) {
    const double big_r = offset_ratio(sc.laser.x0, sc.laser.waist);
    r.p_prime = 1.0 - fidelity_tw_closed(theta0, r.kappa, ad, r.a / sc.laser.waist, big_r);
    const double x0 = sc.laser.x0;
    const double w = sc.laser.waist;
    const XiMoments mom = xi_moments_quadrature(
        [&](double x) { return xi_profile_travelling(x0, w, x); }, r.xi, sigma, w / 4.0);
    r.p_prime_full = 1.0 - fidelity_nonuniform_full(theta0, r.xi, mom, r.kappa, ad);
    if (PositionDistribution{sigma, r.kappa}.r(w) > 0.3) r.failures.push_back("tw_series_range");
  } else {
    const double k = sc.laser.k();
    const XiMoments mom = xi_moments_sw(r.xi, k * sigma, sc.kz0);
    r.p_prime_full = 1.0 - fidelity_nonuniform_full(theta0, r.xi, mom, r.kappa, ad);
    r.p_prime = std::abs(sc.kz0 - kPi / 4.0) < 1e-12
                    ? 1.0 - fidelity_sw_closed(theta0, k * r.a, r.kappa)
                    : r.p_prime_full;
  }
  r.p_zeta = 4.0 * sc.zeta;
  r.p_total = r.p_zeta + r.p_prime + r.photons;
  r.p_product = 1.0 - (1.0 - r.p_zeta) * (1.0 - r.p_prime) * std::exp(-r.photons);

  if (!weak_coupling(sc.laser, sc.ion)) r.failures.push_back("weak_coupling");
  if (!small_displacement(sc.laser, r.a, r.xi)) r.failures.push_back("displacement");
  if (sc.zeta > kBitflipPerturbativeLimit) r.failures.push_back("zeta_range");
  if (r.epsilon >= 2.0) r.failures.push_back("coulomb_instability");
  if (r.photons >= 0.1) r.warnings.push_back("photons_ge_0.1");
  if (r.p_prime >= 0.1) r.warnings.push_back("p_prime_ge_0.1");
  if (r.p_zeta >= 0.1) r.warnings.push_back("p_zeta_ge_0.1");
  return r;
}

/// "%.17g"; non-finite values print as nan / inf.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes rows with a header, comma separator and LF line endings.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

inline const std::vector<std::string>& sweep_params() {
  static const std::vector<std::string> names{"omega", "d", "P", "w", "T", "Delta", "x0", "z0"};
  return names;
}

/// Sets a sweep parameter in the units used on the command line: omega in
/// Hz, d and w in um, P in mW, T in uK, Delta in Hz, x0 as a fraction of w,
/// z0 as k z0 in rad.
inline void set_param(Scenario& sc, const std::string& name, double v) {
  if (name == "omega") {
    sc.trap.omega = 2.0 * kPi * v;
  } else if (name == "d") {
    sc.trap.d = v / 1e6;
  } else if (name == "P") {
    sc.laser.power = v * 1e-3;
  } else if (name == "w") {
    sc.laser.waist = v / 1e6;
  } else if (name == "T") {
    sc.thermal = {ThermalPreset::kExplicit, v / 1e6};
  } else if (name == "Delta") {
    sc.laser.detuning = 2.0 * kPi * v;
    sc.auto_detuning = false;
  } else if (name == "x0") {
    sc.x0_frac = v;
  } else if (name == "z0") {
    sc.kz0 = v;
  } else {
    throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
  }
  sc.sync_geometry();
}

/// Grid of `points` values from lo to hi, linear or logarithmic.
inline std::vector<double> make_grid(double lo, double hi, std::size_t points, bool log) {
  if (points == 0) throw std::invalid_argument("grid: points must be >= 1");
  if (log && !(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("grid: log scale needs positive bounds");
  if (points > 1 && !(hi > lo)) throw std::invalid_argument("grid: max must exceed min");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    g[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  g.front() = lo;
  if (points > 1) g.back() = hi;
  return g;
}

struct SweepPoint {
  double value = 0.0;
  ScenarioResult result;
  std::string error;  // non-empty when the point could not be evaluated
};

struct SweepResult {
  std::string param;
  std::vector<SweepPoint> points;
};

/// Evaluates every grid value independently; slot i holds value i whatever
/// the worker count.
inline SweepResult sweep(const Scenario& sc, const std::string& param,
                         const std::vector<double>& values, unsigned workers = 1) {
  if (std::find(sweep_params().begin(), sweep_params().end(), param) == sweep_params().end())
    throw std::invalid_argument("sweep: unknown parameter '" + param + "'");
  SweepResult out{param, std::vector<SweepPoint>(values.size())};
  parallel_for(values.size(), workers, [&](std::size_t i) {
    SweepPoint& p = out.points[i];
    p.value = values[i];
    try {
      Scenario s = sc;
      set_param(s, param, values[i]);
      p.result = total_infidelity(s);
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  return out;
}

inline std::vector<std::string> result_header() {
  return {"omega_hz", "d_um",   "epsilon", "kappa",      "detuning_hz", "xi",        "tau_s",
          "omega_tau", "gate_time_s", "photons", "photons_quad", "p_prime", "p_prime_full",
          "p_zeta",   "p_total", "p_product", "flags"};
}

inline std::vector<std::string> result_cells(const ScenarioResult& r) {
  const double two_pi = 2.0 * kPi;
  std::vector<std::string> c;
  for (double v : {r.omega / two_pi, r.d * 1e6, r.epsilon, r.kappa, r.detuning / two_pi, r.xi, r.tau,
                   r.omega_tau, r.gate_time, r.photons, r.photons_quadrature, r.p_prime,
                   r.p_prime_full, r.p_zeta, r.p_total, r.p_product})
    c.push_back(format_double(v));
  c.push_back(r.flag_string());
  return c;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& s) {
  std::vector<std::string> header{s.param};
  for (auto& h : result_header()) header.push_back(h);
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : s.points) {
    std::vector<std::string> row{format_double(p.value)};
    if (p.error.empty()) {
      for (auto& c : result_cells(p.result)) row.push_back(c);
    } else {
      for (std::size_t i = 0; i + 1 < result_header().size(); ++i) row.push_back("nan");
      row.push_back("error");
    }
    rows.push_back(std::move(row));
  }
  write_csv(out, header, rows);
}

struct SweetspotRow {
  double d = 0.0;            // m
  double omega_sweet = 0.0;  // rad / s
  ScenarioResult result;
  double a_xi_over_d = 0.0;  // at the operating point
  double a_xi_over_d_estimate = 0.0;  // sqrt(omega d / v)
  double omega_tau_min = 0.0;
  bool push_ok = true;
  double noise_on = 0.0;   // intensity-noise infidelity at the sweet spot
  double noise_off = 0.0;  // same with s = s' = 0
};

/// Relative intensity noise used in the sweet-spot report.
inline constexpr double kReportIntensityNoise = 1e-3;

/// For each d: trap frequency that satisfies the sweet-spot condition for the
/// laser geometry, and the budget there.
inline std::vector<SweetspotRow> sweetspot_report(const Scenario& sc,
                                                  const std::vector<double>& distances) {
  Scenario base = sc;
  base.sync_geometry();
  const double s = geometry_to_s(base.laser);
  std::vector<SweetspotRow> rows;
  for (double d : distances) {
    SweetspotRow row;
    row.d = d;
    row.omega_sweet = omega_sweet(base.ion, d, s);
    Scenario at = base;
    at.trap = {row.omega_sweet, d};
    row.result = total_infidelity(at);
    row.a_xi_over_d = row.result.a * std::abs(row.result.xi) / d;
    const SpeedReport speed = speed_constraints(at.ion, at.trap, at.laser, row.result.omega_tau);
    row.a_xi_over_d_estimate = speed.a_xi_over_d;
    row.omega_tau_min = speed.omega_tau_min;
    row.push_ok = speed.push_ok;
    const PhaseInputs in{std::abs(row.result.xi), row.result.omega_tau, row.result.epsilon,
                         row.result.a / d};
    const GateGeometry on = sweet_spot(in, ForceSense::kSame, row.result.kappa);
    const GateGeometry off{0.0, 0.0, ForceSense::kSame};
    row.noise_on = intensity_noise_infidelity(in, on, kReportIntensityNoise, row.result.kappa).noise_infidelity;
    row.noise_off = intensity_noise_infidelity(in, off, kReportIntensityNoise, row.result.kappa).noise_infidelity;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweetspot_csv(std::ostream& out, const std::vector<SweetspotRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({format_double(r.d * 1e6), format_double(r.omega_sweet / (2.0 * kPi)),
                     format_double(r.result.gate_time), format_double(r.result.p_total),
                     format_double(r.a_xi_over_d), format_double(r.a_xi_over_d_estimate),
                     format_double(r.result.omega_tau), format_double(r.omega_tau_min),
                     r.push_ok ? "ok" : "push_limit", format_double(r.noise_on),
                     format_double(r.noise_off), r.result.flag_string()});
  }
  write_csv(out,
            {"d_um", "omega_sweet_hz", "gate_time_s", "p_total", "a_xi_over_d", "a_xi_over_d_estimate",
             "omega_tau", "omega_tau_min", "speed", "noise_infidelity_on", "noise_infidelity_off",
             "flags"},
            cells);
}

struct OracleLine {
  std::string quantity;
  double closed = 0.0;
  double oracle = 0.0;
  double std_error = 0.0;  // 0 for deterministic oracles
  double z = 0.0;          // (oracle - closed) / std_error, or relative difference
};

struct OracleReport {
  std::vector<OracleLine> lines;
  bool insufficient_statistics = false;
};

/// Closed forms against Monte Carlo and quadrature oracles at the scenario's
/// operating point.
inline OracleReport oracle_run(const Scenario& sc, std::size_t samples, std::uint64_t seed,
                               unsigned workers = 1) {
  if (samples == 0) throw std::invalid_argument("oracle: samples must be >= 1");
  Scenario s = sc;
  s.sync_geometry();
  const ScenarioResult r = total_infidelity(s);
  const double theta0 = s.target / 2.0;
  const double xi0 = std::abs(r.xi);
  const PhaseInputs in{xi0, r.omega_tau, r.epsilon, r.a / r.d};
  const GateGeometry g{};

  OracleReport rep;
  rep.insufficient_statistics = samples < 2;
  auto stat = [&](std::string name, double closed, const McEstimate& e) {
    const double z = e.std_error > 0.0 ? (e.mean - closed) / e.std_error : 0.0;
    rep.lines.push_back({std::move(name), closed, e.mean, e.std_error, z});
  };
  auto det = [&](std::string name, double closed, double oracle) {
    const double rel = closed != 0.0 ? (oracle - closed) / std::abs(closed) : oracle;
    rep.lines.push_back({std::move(name), closed, oracle, 0.0, rel});
  };

  const ThermalMcResult mc = thermal_monte_carlo(in, g, r.kappa, samples, seed, workers);
  stat("vartheta_mean", mean_gate_angle(in, r.kappa), mc.vartheta);
  stat("echo_infidelity", 1.0 - fidelity_echo_closed(base_angle(in), r.kappa, in.a_over_d),
       mc.echo_infidelity);

  const double sigma = r.a * std::sqrt(r.kappa);
  std::function<double(double)> profile;
  XiMoments closed_mom;
  double scale = 0.0;
  if (s.laser.mode == LaserMode::kTravelling) {
    const double x0 = s.laser.x0, w = s.laser.waist;
    profile = [x0, w](double x) { return xi_profile_travelling(x0, w, x); };
    closed_mom = xi_moments_tw(xi0, 2.0 * sigma / w, offset_ratio(x0, w));
    scale = w / 4.0;
  } else {
    const double k = s.laser.k(), z0 = s.laser.z0;
    profile = [k, z0](double z) { return xi_profile_standing(k, z0, z); };
    closed_mom = xi_moments_sw(xi0, k * sigma, s.kz0);
    scale = kPi / (4.0 * k);
  }
  const XiMoments quad_mom = xi_moments_quadrature(profile, xi0, sigma, scale);
  for (int n = 2; n <= 8; n += 2)
    det("xi_moment_" + std::to_string(n), closed_mom(n), quad_mom(n));

  // theta0 equals base_angle(in) here since tau was chosen for it.
  const double vt_mean = mean_vartheta_nonuniform(theta0, xi0, quad_mom, r.kappa, in.a_over_d);
  const NonuniformMcResult nmc = nonuniform_monte_carlo(in, profile, sigma, r.kappa, vt_mean,
                                                        samples, seed ^ 0x5bd1e995ULL, workers);
  stat("nonuniform_vartheta_mean", vt_mean, nmc.vartheta);
  stat("nonuniform_echo_infidelity",
       1.0 - fidelity_nonuniform_full(theta0, xi0, quad_mom, r.kappa, in.a_over_d),
       nmc.echo_infidelity);
  return rep;
}

inline void write_oracle_csv(std::ostream& out, const OracleReport& rep) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& l : rep.lines)
    rows.push_back({l.quantity, format_double(l.closed), format_double(l.oracle),
                    format_double(l.std_error), format_double(l.z),
                    rep.insufficient_statistics && l.std_error == 0.0 && l.quantity.find("moment") == std::string::npos
                        ? "insufficient_statistics"
                        : "ok"});
  write_csv(out, {"quantity", "closed", "oracle", "std_error", "z_or_rel", "flags"}, rows);
}

/// Scenario behind one of the four figure presets: travelling (fig5, fig7)
/// or standing (fig6, fig8) waves at P = 10 mW, w = 4 um (fig5, fig6) or
/// P = 100 mW, w = 2 um (fig7, fig8).
inline Scenario figure_scenario(const std::string& preset) {
  Scenario sc;
  if (preset == "fig5" || preset == "fig6") {
    sc.laser.power = 10e-3;
    sc.laser.waist = 4e-6;
  } else if (preset == "fig7" || preset == "fig8") {
    sc.laser.power = 100e-3;
    sc.laser.waist = 2e-6;
  } else {
    throw std::invalid_argument("figure: unknown preset '" + preset + "'");
  }
  sc.laser.mode = (preset == "fig5" || preset == "fig7") ? LaserMode::kTravelling : LaserMode::kStanding;
  sc.auto_detuning = true;
  sc.sync_geometry();
  return sc;
}

struct FigureCurve {
  double d = 0.0;  // m
  ThermalPreset thermal = ThermalPreset::kDoppler;
  SweepResult sweep;
};

inline constexpr std::size_t kFigurePoints = 50;

/// Six curves: d in {1, 10, 100} um times the Doppler and kT = hbar omega
/// ensembles, each over omega / 2 pi from 1e4 to 1e8 Hz on a log grid.
inline std::vector<FigureCurve> figure(const std::string& preset, unsigned workers = 1,
                                       std::size_t points = kFigurePoints) {
  const Scenario base = figure_scenario(preset);
  const std::vector<double> grid = make_grid(1e4, 1e8, points, true);
  std::vector<FigureCurve> curves;
  for (double d : {1e-6, 10e-6, 100e-6})
    for (ThermalPreset t : {ThermalPreset::kDoppler, ThermalPreset::kGroundQuantum}) {
      Scenario s = base;
      s.trap.d = d;
      s.thermal = {t, 0.0};
      curves.push_back({d, t, sweep(s, "omega", grid, workers)});
    }
  return curves;
}

inline void write_figure_csv(std::ostream& out, const std::vector<FigureCurve>& curves) {
  std::vector<std::string> header{"curve_d_um", "curve_thermal", "omega_hz_grid"};
  for (auto& h : result_header()) header.push_back(h);
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : curves)
    for (const auto& p : c.sweep.points) {
      std::vector<std::string> row{format_double(c.d * 1e6),
                                   c.thermal == ThermalPreset::kDoppler ? "doppler" : "n1",
                                   format_double(p.value)};
      if (p.error.empty()) {
        for (auto& cell : result_cells(p.result)) row.push_back(cell);
      } else {
        for (std::size_t i = 0; i + 1 < result_header().size(); ++i) row.push_back("nan");
        row.push_back("error");
      }
      rows.push_back(std::move(row));
    }
  write_csv(out, header, rows);
}

}  // namespace pushgate
