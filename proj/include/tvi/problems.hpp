#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/systems.hpp"

namespace tvi {

using SystemVariant = std::variant<Pendulum, Kepler2D, HenonHeiles, FermiPastaUlam, OuterSolar,
                                   FreeParticle, HarmonicOscillator>;

struct ProblemOptions {
  double hh_energy = 1.0 / 8.0;    // Henon-Heiles energy level
  unsigned long long seed = 0;     // nonzero randomizes the HH momentum direction
  double fpu_omega = 50.0;
  std::string data_file;           // explicit path to the n-body table
};

/// A benchmark system bundled with its reference initial condition.
struct ProblemInstance {
  std::string key;
  SystemVariant system;
  std::vector<double> q0, p0;
  std::string note;

  int dim() const {
    return std::visit([](const auto& s) { return s.dim(); }, system);
  }
  double energy0() const {
    return std::visit(
        [&](const auto& s) {
          return energy(s, std::span<const double>(q0), std::span<const double>(p0));
        },
        system);
  }
};

inline double problem_energy(const ProblemInstance& pi, std::span<const double> q,
                             std::span<const double> p) {
  return std::visit([&](const auto& s) { return energy(s, q, p); }, pi.system);
}

// --- n-body data table ------------------------------------------------------

struct NBodyTable {
  std::vector<std::string> names;
  std::vector<double> masses;
  std::vector<double> q, v;  // packed xyz per body
};

/// Parse a whitespace-separated table with '#' comments and a mandatory
/// header line "body mass x y z vx vy vz".
inline NBodyTable load_nbody_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data table: " + path);
  NBodyTable t;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank or comment-only line
    if (!saw_header) {
      if (first != "body") throw IoError("data table " + path + ": expected 'body ...' header");
      saw_header = true;
      continue;
    }
    double m, x, y, z, vx, vy, vz;
    if (!(ls >> m >> x >> y >> z >> vx >> vy >> vz))
      throw IoError("data table " + path + ": malformed row for '" + first + "'");
    t.names.push_back(first);
    t.masses.push_back(m);
    t.q.insert(t.q.end(), {x, y, z});
    t.v.insert(t.v.end(), {vx, vy, vz});
  }
  if (t.names.size() < 2) throw IoError("data table " + path + ": need at least two bodies");
  return t;
}

/// Locate the bundled solar system table: explicit path, then $TVI_DATA_DIR,
/// then ./data, then the source tree this build was configured from.
inline std::string find_data_file(const std::string& explicit_path = {},
                                  const std::string& filename = "outer_solar.txt") {
  namespace fs = std::filesystem;
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("TVI_DATA_DIR")) {
    fs::path p = fs::path(env) / filename;
    if (fs::exists(p)) return p.string();
  }
  if (fs::exists(fs::path("data") / filename)) return (fs::path("data") / filename).string();
#ifdef TVI_SOURCE_DIR
  {
    fs::path p = fs::path(TVI_SOURCE_DIR) / "data" / filename;
    if (fs::exists(p)) return p.string();
  }
#endif
  throw IoError("could not locate data file '" + filename +
                "' (set TVI_DATA_DIR or pass an explicit path)");
}

// --- observables ------------------------------------------------------------

inline double kepler_angular_momentum(std::span<const double> q, std::span<const double> p) {
  return q[0] * p[1] - q[1] * p[0];
}

inline double kepler_radius(std::span<const double> q) { return std::hypot(q[0], q[1]); }

/// Per-pair oscillatory energies I_j = (y1^2 + omega^2 x1^2)/2 of the FPU
/// chain, where x1/y1 are the scaled spring elongations and their momenta.
struct FpuModeEnergies {
  std::array<double, 3> I{};
  double total = 0.0;
};

inline FpuModeEnergies fpu_oscillatory_energies(double omega, std::span<const double> q,
                                                std::span<const double> p) {
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  FpuModeEnergies e;
  for (std::size_t j = 0; j < 3; ++j) {
    double x1 = (q[2 * j + 1] - q[2 * j]) * inv_s2;
    double y1 = (p[2 * j + 1] - p[2 * j]) * inv_s2;
    e.I[j] = 0.5 * (y1 * y1 + omega * omega * x1 * x1);
    e.total += e.I[j];
  }
  return e;
}

// --- registry ----------------------------------------------------------------

/// Build a named benchmark problem with its reference initial condition.
/// Keys: pendulum, kepler, henon_heiles, fpu, outer_solar, plus the
/// free_particle / harmonic_oscillator sanity systems.
inline ProblemInstance make_problem(const std::string& name, const ProblemOptions& opts = {}) {
  ProblemInstance pi;
  pi.key = name;
  if (name == "pendulum") {
    pi.system = Pendulum{};
    pi.q0 = {std::numbers::pi / 2.0};
    pi.p0 = {0.0};
    pi.note = "released horizontally from rest";
    return pi;
  }
  if (name == "kepler" || name == "kepler2d") {
    pi.system = Kepler2D{};
    pi.q0 = {1.0, 0.0};
    pi.p0 = {0.0, 0.8};
    pi.note = "eccentric bound orbit, H = -0.68, L = 0.8";
    return pi;
  }
  if (name == "henon_heiles") {
    if (!(opts.hh_energy > 0.0)) throw ConfigError("henon_heiles: energy level must be positive");
    double pm = std::sqrt(2.0 * opts.hh_energy);
    double theta = 0.0;
    if (opts.seed != 0) {
      std::mt19937_64 rng(opts.seed);
      theta = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    }
    pi.system = HenonHeiles{};
    pi.q0 = {0.0, 0.0};
    pi.p0 = {pm * std::cos(theta), pm * std::sin(theta)};
    pi.note = "energy level " + std::to_string(opts.hh_energy);
    return pi;
  }
  if (name == "fpu") {
    FermiPastaUlam sys(opts.fpu_omega);
    const double s2 = std::sqrt(2.0);
    pi.system = sys;
    pi.q0.assign(6, 0.0);
    pi.p0.assign(6, 0.0);
    pi.q0[0] = (1.0 - 1.0 / opts.fpu_omega) / s2;
    pi.q0[1] = (1.0 + 1.0 / opts.fpu_omega) / s2;
    pi.p0[1] = s2;
    pi.note = "single excited stiff spring, I(0) = 1";
    return pi;
  }
  if (name == "outer_solar") {
    NBodyTable t = load_nbody_table(find_data_file(opts.data_file));
    // Remove the center-of-mass drift so the system stays put in the frame.
    double mt = 0.0;
    for (double m : t.masses) mt += m;
    for (int a = 0; a < 3; ++a) {
      double vc = 0.0;
      for (std::size_t i = 0; i < t.masses.size(); ++i) vc += t.masses[i] * t.v[3 * i + a];
      vc /= mt;
      for (std::size_t i = 0; i < t.masses.size(); ++i) t.v[3 * i + a] -= vc;
    }
    OuterSolar sys(t.names, t.masses);
    pi.q0 = t.q;
    pi.p0.resize(t.v.size());
    for (std::size_t i = 0; i < t.masses.size(); ++i)
      for (int a = 0; a < 3; ++a) pi.p0[3 * i + a] = t.masses[i] * t.v[3 * i + a];
    pi.system = std::move(sys);
    pi.note = "sun and outer planets, AU / days / solar masses";
    return pi;
  }
  if (name == "free_particle") {
    pi.system = FreeParticle{1};
    pi.q0 = {0.0};
    pi.p0 = {1.0};
    pi.note = "drifts at unit speed";
    return pi;
  }
  if (name == "harmonic_oscillator") {
    pi.system = HarmonicOscillator{};
    pi.q0 = {1.0};
    pi.p0 = {0.0};
    pi.note = "unit amplitude";
    return pi;
  }
  throw ConfigError("unknown problem: " + name);
}

}  // namespace tvi
