#pragma once
// Subcommands of the beltrami tool. Each writes to a stream and returns an
// exit code: 0 success, 1 invalid configuration, 2 numerical failure.

#include "beltrami/fieldeval.hpp"
#include "beltrami/sphere_oracle.hpp"
#include "beltrami/spectral.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kNumericalFailure = 2 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double torus_offset = 2.0;
  int mode = 0;
  int n = 50;
  double kmin = 3.5;
  double kmax = 4.1;
  double kstep = 0.005;
  double t = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::string sign_convention = "A";
  std::vector<double> t_values{0.0, 0.25, 0.5, 0.75, 1.0};
  // field
  std::string resonance_file;
  int record_index = 0;
  int grid = 20;
  bool zero_density = false;
  // sphere-check
  bool wrong_k = false;

  SignConvention convention() const { return parse_sign_convention(sign_convention); }
  SurfaceOfRevolution surface() const { return make_torus(torus_offset); }
};

/// Throws ConfigError naming the offending field.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
  if (!(c.torus_offset > 1.0)) fail("torus-offset", "must exceed 1");
  if (c.n < 16 || c.n % 2 != 0) fail("n", "must be even and at least 16");
  if (!(c.kmin > 0.0)) fail("kmin", "must be positive");
  if (!(c.kmax > 0.0)) fail("kmax", "must be positive");
  if (!(c.kstep > 0.0)) fail("kstep", "must be positive");
  if (!(c.t >= 0.0 && c.t <= 1.0)) fail("t", "must lie in [0, 1]");
  for (double tv : c.t_values) {
    if (!(tv >= 0.0 && tv <= 1.0)) fail("t-values", "samples must lie in [0, 1]");
  }
  try {
    (void)c.convention();
  } catch (const std::invalid_argument&) {
    fail("sign-convention", "expected A or B");
  }
  if (c.grid < 1) fail("grid", "must be positive");
  if (c.record_index < 0) fail("index", "must be non-negative");
}

/// FNV-1a over the canonical configuration string.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "offset=" << c.torus_offset << ";mode=" << c.mode << ";n=" << c.n
     << ";kmin=" << c.kmin << ";kmax=" << c.kmax << ";kstep=" << c.kstep << ";t=" << c.t << ";seed=" << c.seed
     << ";sign=" << c.sign_convention << ";grid=" << c.grid << ";tvalues=";
  for (double tv : c.t_values) os << tv << ',';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

inline std::string provenance_line(const std::string& command, const RunConfig& c) {
  std::ostringstream os;
  os << "# beltrami " << command << " version=" << kVersion << " config_hash=" << hex64(config_hash(c))
     << " seed=" << hex64(c.seed) << " n=" << c.n << " mode=" << c.mode << " t=" << c.t
     << " sign_convention=" << to_string(c.convention()) << " torus_offset=" << c.torus_offset;
  return os.str();
}

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline ResonanceProblem problem_for(const RunConfig& c, double t) {
  ResonanceProblem p{c.surface(), c.mode, c.n, t, c.convention(), c.seed};
  return p;
}

// ---------------------------------------------------------------------------
// scan / tau-sweep
// ---------------------------------------------------------------------------

inline void write_sweep_rows(std::ostream& out, const std::vector<SweepSample>& sweep, const std::string& prefix) {
  for (const SweepSample& s : sweep) {
    out << prefix << fmt("%.10g", s.k.real()) << ',' << fmt("%.12e", s.kappa) << ',' << fmt("%.12e", s.f_abs) << '\n';
  }
}

inline int cmd_scan(const RunConfig& c, std::ostream& out) {
  validate(c);
  const auto ks = k_grid(c.kmin, c.kmax, c.kstep);
  const auto sweep = condition_sweep(problem_for(c, c.t), ks);
  out << provenance_line("scan", c) << '\n' << "k,kappa,f_abs\n";
  write_sweep_rows(out, sweep, "");
  return kOk;
}

inline int cmd_tau_sweep(const RunConfig& c, std::ostream& out) {
  validate(c);
  const auto ks = k_grid(c.kmin, c.kmax, c.kstep);
  // One assembly per k serves every t; kappa[t][k].
  std::vector<std::vector<double>> kappa(c.t_values.size(), std::vector<double>(ks.size()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const ModalOperators mo = modal_operators(c.surface(), ks[i], c.mode, c.n, c.convention());
    for (std::size_t j = 0; j < c.t_values.size(); ++j) {
      kappa[j][i] = condition_number(system_from_operators(mo, c.t_values[j]).matrix);
    }
  }
  out << provenance_line("tau-sweep", c) << '\n' << "t,k,kappa\n";
  for (std::size_t j = 0; j < c.t_values.size(); ++j) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      out << fmt("%.10g", c.t_values[j]) << ',' << fmt("%.10g", ks[i]) << ',' << fmt("%.12e", kappa[j][i]) << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// find
// ---------------------------------------------------------------------------

inline nlohmann::json record_to_json(const ResonanceRecord& r, const RunConfig& c) {
  nlohmann::json j;
  j["k_re"] = r.k.real();
  j["k_im"] = r.k.imag();
  j["f_abs"] = r.f_abs;
  j["nullity"] = r.nullity;
  j["mode"] = r.mode;
  j["t"] = r.t;
  j["n"] = r.n;
  j["seed"] = hex64(r.seed);
  j["sign_convention"] = to_string(r.sign_convention);
  j["residual"] = r.residual;
  j["torus_offset"] = c.torus_offset;
  j["version"] = kVersion;
  j["config_hash"] = hex64(config_hash(c));
  nlohmann::json vec = nlohmann::json::array();
  if (!r.null_vectors.empty()) {
    for (Eigen::Index i = 0; i < r.null_vectors.front().size(); ++i) {
      const cplx v = r.null_vectors.front()(i);
      vec.push_back({v.real(), v.imag()});
    }
  }
  j["null_vector"] = vec;
  return j;
}

inline ResonanceRecord record_from_json(const nlohmann::json& j) {
  ResonanceRecord r;
  r.k = cplx(j.at("k_re").get<double>(), j.at("k_im").get<double>());
  r.f_abs = j.value("f_abs", 0.0);
  r.nullity = j.value("nullity", 1);
  r.mode = j.at("mode").get<int>();
  r.t = j.value("t", 1.0);
  r.n = j.at("n").get<int>();
  r.sign_convention = parse_sign_convention(j.value("sign_convention", std::string("A")));
  const auto& vec = j.at("null_vector");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(vec.size()));
  for (std::size_t i = 0; i < vec.size(); ++i) v(static_cast<Eigen::Index>(i)) = cplx(vec[i][0].get<double>(), vec[i][1].get<double>());
  r.null_vectors.push_back(v);
  return r;
}

inline int cmd_find(const RunConfig& c, std::ostream& out) {
  validate(c);
  FindOptions opt;
  opt.k_step = c.kstep;
  nlohmann::json arr = nlohmann::json::array();
  if (c.kmax > c.kmin) {
    for (const auto& r : find_resonances(problem_for(c, c.t), c.kmin, c.kmax, std::numeric_limits<std::size_t>::max(), opt)) {
      arr.push_back(record_to_json(r, c));
    }
  }
  out << arr.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// field
// ---------------------------------------------------------------------------

/// Polar grid of `count` x `count` points in the xz-plane, radius 0.8 about
/// (offset, 0, 0).
inline std::vector<Vec3> field_slice_points(double offset, int count) {
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) {
    const double r = 0.8 * (i + 0.5) / count;
    for (int j = 0; j < count; ++j) {
      const double a = kTwoPi * j / count;
      pts.emplace_back(offset + r * std::cos(a), 0.0, r * std::sin(a));
    }
  }
  return pts;
}

inline int cmd_field(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const SurfaceOfRevolution s = c.surface();
  ResonanceRecord rec;
  if (c.zero_density) {
    rec.k = 0.5 * (c.kmin + c.kmax);
    rec.mode = c.mode;
    rec.n = c.n;
    rec.sign_convention = c.convention();
    rec.null_vectors.push_back(Eigen::VectorXcd::Zero(c.mode == 0 ? c.n + 1 : c.n));
  } else {
    if (c.resonance_file.empty()) throw ConfigError("resonance: a record file from `find` is required (or --zero-density)");
    std::ifstream in(c.resonance_file);
    if (!in) throw ConfigError("resonance: cannot open " + c.resonance_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("resonance: ") + e.what());
    }
    if (j.is_object()) j = nlohmann::json::array({j});
    if (c.record_index >= static_cast<int>(j.size())) throw ConfigError("index: record file holds fewer records");
    try {
      rec = record_from_json(j[static_cast<std::size_t>(c.record_index)]);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("resonance: ") + e.what());
    }
  }
  const FieldEvaluator fe = make_field_evaluator(s, rec);
  const double curl_sign = sign_params(fe.sign_convention()).curl_sign;
  struct Row {
    Vec3 x;
    CVec3 E;
    double defect;
  };
  std::vector<Row> rows;
  int rejected = 0;
  double emax = 0.0;
  for (const Vec3& x : field_slice_points(c.torus_offset, c.grid)) {
    const double d = distance_to_boundary(s, x);
    if (!is_inside(s, x) || d < 0.2) {
      ++rejected;
      continue;
    }
    const CVec3 E = fe.evaluate_unchecked(x, d);
    const CVec3 curl = curl_from_jacobian(field_jacobian(fe, x, 1e-4, d));
    rows.push_back({x, E, (curl - curl_sign * rec.k * E).norm()});
    emax = std::max(emax, E.norm());
  }
  out << provenance_line("field", c) << " k=" << fmt("%.12g", rec.k.real()) << " rejected=" << rejected << '\n';
  out << "x,y,z,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,curl_residual\n";
  for (const Row& r : rows) {
    out << fmt("%.10g", r.x(0)) << ',' << fmt("%.10g", r.x(1)) << ',' << fmt("%.10g", r.x(2));
    for (int i = 0; i < 3; ++i) out << ',' << fmt("%.12e", r.E(i).real()) << ',' << fmt("%.12e", r.E(i).imag());
    out << ',' << fmt("%.6e", emax > 0.0 ? r.defect / emax : 0.0) << '\n';
  }
  if (rejected > 0) err << "field: " << rejected << " points outside the safe region were rejected\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// sphere-check
// ---------------------------------------------------------------------------

inline int cmd_sphere_check(const RunConfig& c, std::ostream& out) {
  bool ok = true;
  auto line = [&](bool pass, const std::string& text) {
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << text << '\n';
  };
  double j0err = 0.0;
  for (int i = 1; i <= 5; ++i) j0err = std::max(j0err, std::abs(bessel_zero(0, i) - i * kPi));
  line(j0err <= 1e-13, "j0 zeros match n*pi: max error " + fmt("%.2e", j0err));
  line(std::abs(bessel_zero(1, 1) - 4.4934094579) <= 1e-9, "j1 first zero " + fmt("%.10f", bessel_zero(1, 1)));
  for (auto [deg, zi] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{4, 2}}) {
    for (int m = -deg; m <= deg; ++m) {
      const double k = bessel_zero(deg, zi) + (c.wrong_k ? 0.1 : 0.0);
      const SphereCheck r = sphere_check(deg, m, zi, k);
      std::ostringstream os;
      os << "n=" << deg << " m=" << m << " zero=" << zi << " k=" << fmt("%.10f", r.k)
         << " |E| on sphere " << fmt("%.2e", r.boundary_E) << ", |n.H| " << fmt("%.2e", r.boundary_nH)
         << ", curl B " << fmt("%.2e", r.beltrami_curl) << ", div E " << fmt("%.2e", r.divergence);
      line(r.boundary_E <= 1e-12 && r.boundary_nH <= 1e-10 && r.beltrami_curl <= 1e-6 && r.divergence <= 1e-6, os.str());
    }
  }
  out << (ok ? "sphere-check: all checks passed\n" : "sphere-check: failures present\n");
  return ok ? kOk : kNumericalFailure;
}

}  // namespace beltrami::cli
