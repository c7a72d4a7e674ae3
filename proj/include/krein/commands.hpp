#pragma once

// Command implementations behind kreinctl. Each returns a JSON report and an
// exit code instead of printing, so the tests can drive them in-process.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krein/extension.hpp"
#include "krein/io.hpp"
#include "krein/models.hpp"
#include "krein/random.hpp"
#include "krein/verify.hpp"

namespace krein::commands {

using io::json;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int property_failure = 1;
inline constexpr int schema = 2;
inline constexpr int degenerate = 3;
inline constexpr int certification = 4;
inline constexpr int infeasible = 5;
inline constexpr int phase_minus_one = 6;
}  // namespace exit_code

struct CommonOptions {
  Tolerances tol;
  double loc_tol = 1e-8;
  std::uint64_t seed = 1;
};

struct CommandResult {
  int exit_code = exit_code::ok;
  json report = json::object();
  std::vector<io::PlotRow> plot;
  std::optional<json> instance;  // emitted instance file, if any
};

namespace detail {

inline json tolerances_json(const CommonOptions& opt) {
  json t = io::to_json(opt.tol);
  t["loc_tol"] = opt.loc_tol;
  return t;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline CommandResult begin(const std::string& command, const json& args, const CommonOptions& opt) {
  CommandResult r;
  r.report["command"] = command;
  r.report["args"] = args;
  r.report["tolerances"] = tolerances_json(opt);
  r.report["seed"] = opt.seed;
  return r;
}

inline CommandResult& fail(CommandResult& r, int code, const std::string& message) {
  r.exit_code = code;
  r.report["status"] = "error";
  r.report["error"] = message;
  return r;
}

inline CommandResult& finish(CommandResult& r, const Clock& clock) {
  if (!r.report.contains("status")) r.report["status"] = r.exit_code == 0 ? "ok" : "failed";
  r.report["exit_code"] = r.exit_code;
  r.report["wall_clock_s"] = clock.seconds();
  return r;
}

/// Spectrum report restricted to the non-real points.
inline SpectrumReport nonreal_part(const SpectrumReport& rep, double gap) {
  SpectrumReport out;
  for (const auto& e : rep.eigenvalues)
    if (!e.infinite && std::abs(e.location.imag()) > gap) out.eigenvalues.push_back(e);
  out.sort();
  return out;
}

inline SpectrumReport from_clusters(const std::vector<RootCluster>& zs) {
  SpectrumReport out;
  for (const auto& z : zs) out.eigenvalues.push_back({false, z.location, z.multiplicity, 1});
  out.sort();
  return out;
}

/// Analytic spectrum, pencil cross-check and residuals for one instance.
struct Analysis {
  SpectrumReport analytic;
  SpectrumReport pencil;
  SpectrumComparison comparison;
  json residuals;
};

inline Analysis analyse(const HerglotzSpace& s, const ExtensionParams& p, const CommonOptions& opt) {
  Analysis a;
  a.analytic = extension_spectrum(s, p, opt.tol);
  a.pencil = extension_pencil_spectrum(s, p, opt.tol);
  a.comparison = compare_spectra(a.analytic, a.pencil, opt.loc_tol);
  random::Engine rng(opt.seed);
  const Complex w = random::resolvent_point(rng, s, p), z = random::resolvent_point(rng, s, p);
  a.residuals = {{"pencil_location_error", a.comparison.max_location_error},
                 {"pencil_multiplicities_match", a.comparison.match},
                 {"resolvent_identity", verify::resolvent_identity(s, p, w, z, opt.tol)},
                 {"symmetric_containment", verify::sym_containment(s, p, w, opt.tol)},
                 {"sample_point_independence", verify::z_independence(s, p, w, z, opt.tol)}};
  return a;
}

}  // namespace detail

/// Spectrum of the extension described by an instance document.
inline CommandResult spectrum(const json& doc, const CommonOptions& opt = {}) {
  detail::Clock clock;
  CommandResult r = detail::begin("spectrum", json::object(), opt);
  std::optional<io::Instance> inst;
  try {
    inst = io::instance_from_json(doc);
  } catch (const io::SchemaError& e) {
    return detail::finish(detail::fail(r, exit_code::schema, e.what()), clock);
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::IdenticallyZero ? exit_code::degenerate : exit_code::schema;
    return detail::finish(detail::fail(r, code, e.what()), clock);
  } catch (const json::exception& e) {
    return detail::finish(detail::fail(r, exit_code::schema, e.what()), clock);
  }
  r.report["instance_digest"] = io::digest(doc);
  try {
    const auto an = detail::analyse(inst->space, inst->params, opt);
    const json spec = io::to_json(an.analytic);
    r.report["eigenvalues"] = spec["eigenvalues"];
    r.report["resolvent_set_certified"] = spec["resolvent_set_certified"];
    r.report["pencil"] = io::to_json(an.pencil)["eigenvalues"];
    r.report["defining_function"] = io::to_json(defining_function(inst->space, inst->params));
    r.report["residuals"] = an.residuals;
    io::append_spectrum_rows(r.plot, "analytic", an.analytic);
    io::append_spectrum_rows(r.plot, "pencil", an.pencil);
    if (!an.comparison.match)
      detail::fail(r, exit_code::certification, "analytic and pencil spectra disagree");
  } catch (const Error& e) {
    detail::fail(r, exit_code::certification, e.what());
  }
  return detail::finish(r, clock);
}

/// Invariant suites over an instance or random instances.
inline CommandResult verify_cmd(const verify::VerifyOptions& vopt, const CommonOptions& opt = {}) {
  detail::Clock clock;
  CommandResult r = detail::begin("verify",
                                  {{"dim", vopt.dim},
                                   {"trials", vopt.trials},
                                   {"instance", vopt.instance.has_value()},
                                   {"inject_fault", vopt.inject_fault}},
                                  opt);
  const auto table = verify::run(vopt);
  json props = json::array();
  for (const auto& p : table.results()) {
    props.push_back({{"name", p.name},
                     {"max_residual", p.max_residual},
                     {"tolerance", p.tolerance},
                     {"checks", p.checks},
                     {"failures", p.failures},
                     {"pass", p.pass()}});
    io::PlotRow row;
    row.series = p.name;
    row.has_point = false;
    row.value = p.max_residual;
    r.plot.push_back(row);
  }
  r.report["properties"] = props;
  r.report["all_pass"] = table.all_pass();
  if (!table.all_pass()) r.exit_code = exit_code::property_failure;
  return detail::finish(r, clock);
}

/// Parses an instance document for verify; schema problems map to exit 2.
inline std::optional<verify::Instance> verify_instance(const json& doc, std::string& error) {
  try {
    auto inst = io::instance_from_json(doc);
    return verify::Instance{std::move(inst.space), std::move(inst.params)};
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

/// Extension of a given space with prescribed non-real spectrum.
inline CommandResult interpolate(const json& space_doc, const std::string& zeros_text, const CommonOptions& opt = {}) {
  detail::Clock clock;
  CommandResult r = detail::begin("interpolate", {{"zeros", zeros_text}}, opt);
  std::optional<HerglotzSpace> s;
  std::vector<RootCluster> zeros;
  try {
    s = io::space_from_json(space_doc);
    zeros = io::parse_zero_list(zeros_text);
  } catch (const std::exception& e) {
    return detail::finish(detail::fail(r, exit_code::schema, e.what()), clock);
  }
  json req = json::array();
  for (const auto& z : zeros) req.push_back({{"re", z.location.real()}, {"im", z.location.imag()}, {"alg", z.multiplicity}});
  r.report["requested"] = req;
  ExtensionParams p;
  try {
    p = interpolate_spectrum(*s, zeros, opt.tol);
  } catch (const Error& e) {
    int code = exit_code::certification;
    if (e.kind() == ErrorKind::Infeasible) code = exit_code::infeasible;
    if (e.kind() == ErrorKind::InvalidArgument) code = exit_code::schema;
    return detail::finish(detail::fail(r, code, e.what()), clock);
  }
  const json inst = io::instance_to_json(*s, p);
  r.instance = inst;
  r.report["instance"] = inst;
  r.report["instance_digest"] = io::digest(inst);

  // certify through the serialized instance, as a consumer would read it
  CommandResult check = spectrum(json::parse(inst.dump()), opt);
  const auto back = io::instance_from_json(json::parse(inst.dump()));
  json cert = {{"spectrum_exit_code", check.exit_code}};
  bool ok = check.exit_code == exit_code::ok;
  try {
    const auto an = extension_spectrum(back.space, back.params, opt.tol);
    const auto got = detail::nonreal_part(an, opt.tol.sep_min);
    const auto cmp = compare_spectra(detail::from_clusters(zeros), got, opt.loc_tol);
    cert["nonreal_match"] = cmp.match;
    cert["max_location_error"] = cmp.max_location_error;
    ok = ok && cmp.match;
    r.report["eigenvalues"] = io::to_json(an)["eigenvalues"];
    io::append_spectrum_rows(r.plot, "spectrum", an);
  } catch (const Error& e) {
    cert["error"] = e.what();
    ok = false;
  }
  for (const auto& z : zeros) r.plot.push_back({"requested", z.location, false, z.multiplicity, 1, 0.0, true});
  cert["certified"] = ok;
  r.report["certification"] = cert;
  if (!ok) detail::fail(r, exit_code::certification, "produced instance does not reproduce the requested zeros");
  return detail::finish(r, clock);
}

/// Herglotz space and defining function of the model space of a finite Blaschke product.
inline CommandResult blaschke(const std::string& zeros_text, double phase_angle, const CommonOptions& opt = {}) {
  detail::Clock clock;
  CommandResult r = detail::begin("blaschke", {{"zeros", zeros_text}, {"phase", phase_angle}}, opt);
  std::optional<BlaschkeProduct> bp;
  try {
    bp = BlaschkeProduct::from_angle(io::parse_complex_list(zeros_text), phase_angle);
  } catch (const std::exception& e) {
    return detail::finish(detail::fail(r, exit_code::schema, e.what()), clock);
  }
  std::optional<ModelSpace> model;
  try {
    model = blaschke_cayley(*bp);
  } catch (const Error& e) {
    int code = exit_code::certification;
    if (e.kind() == ErrorKind::PhaseMinusOne) code = exit_code::phase_minus_one;
    if (e.kind() == ErrorKind::EmptyMeasure) code = exit_code::schema;
    return detail::finish(detail::fail(r, code, e.what()), clock);
  }
  const auto& s = model->space;
  const json inst = io::instance_to_json(s, model->g);
  r.instance = inst;
  r.report["blaschke"] = {{"zeros", json::array()}, {"phase", io::to_json(bp->phase)}};
  for (const auto& z : bp->zeros) r.report["blaschke"]["zeros"].push_back(io::to_json(z));
  r.report["instance"] = inst;
  r.report["instance_digest"] = io::digest(inst);

  bool ok = true;
  double weight_min = std::numeric_limits<double>::infinity();
  for (const auto& a : s.nu_measure()) weight_min = std::min(weight_min, a.w);
  ok = ok && weight_min > 0.0;

  random::Engine rng(opt.seed);
  double kres = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Complex z = random::nonreal_point(rng), w = random::nonreal_point(rng);
    kres = std::max(kres, blaschke_kernel_residual(*model, *bp, z, w));
  }
  ok = ok && kres <= 1e-10;

  json cert = {{"min_weight", weight_min}, {"kernel_identity_residual", kres}};
  try {
    const ExtensionParams p = to_extension(s, model->g);
    const auto an = detail::analyse(s, p, opt);
    std::vector<RootCluster> expected;
    for (const auto& z : bp->zeros) {
      bool merged = false;
      for (auto& e : expected)
        if (std::abs(e.location - std::conj(z)) <= opt.tol.sep_min) {
          ++e.multiplicity;
          merged = true;
        }
      if (!merged) expected.push_back({std::conj(z), 1});
    }
    const auto cmp = compare_spectra(detail::from_clusters(expected), an.analytic, opt.loc_tol);
    int atoms_certified = 0;
    for (Eigen::Index k = 0; k < s.dim(); ++k)
      for (const auto& c : an.analytic.resolvent_set_certified)
        if (c == Complex(s.atoms()(k), 0.0)) {
          ++atoms_certified;
          break;
        }
    cert["spectrum_match"] = cmp.match;
    cert["max_location_error"] = cmp.max_location_error;
    cert["pencil_match"] = an.comparison.match;
    cert["atoms_in_resolvent_set"] = atoms_certified == s.dim();
    ok = ok && cmp.match && an.comparison.match && atoms_certified == s.dim();
    r.report["eigenvalues"] = io::to_json(an.analytic)["eigenvalues"];
    r.report["residuals"] = an.residuals;
    io::append_spectrum_rows(r.plot, "spectrum", an.analytic);
  } catch (const Error& e) {
    cert["error"] = e.what();
    ok = false;
  }
  for (const auto& a : s.nu_measure()) r.plot.push_back({"atom", Complex(a.t, 0.0), false, 0, 0, a.w, true});
  cert["certified"] = ok;
  r.report["certification"] = cert;
  if (!ok) detail::fail(r, exit_code::certification, "model space certification failed");
  return detail::finish(r, clock);
}

/// Rank-one perturbation diag(t) + y <., x> against the extension route.
/// An empty `nu` means weights 1/(1 + t^2), so that every atom has mass 1 in the inner product.
inline CommandResult perturb(const std::vector<double>& diag, const std::vector<Complex>& y,
                             const std::vector<double>& nu, const CommonOptions& opt = {}) {
  detail::Clock clock;
  json yj = json::array();
  for (const auto& x : y) yj.push_back(io::to_json(x));
  CommandResult r = detail::begin("perturb", {{"diag", diag}, {"y", yj}, {"nu", nu}}, opt);
  if (diag.empty()) return detail::finish(detail::fail(r, exit_code::schema, "empty diagonal"), clock);
  if (y.size() != diag.size() || (!nu.empty() && nu.size() != diag.size()))
    return detail::finish(detail::fail(r, exit_code::schema, "list lengths differ"), clock);

  std::vector<std::size_t> order(diag.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
  std::vector<Atom<double>> atoms;
  Vector ys(static_cast<Eigen::Index>(diag.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double t = diag[order[k]];
    const double w = nu.empty() ? 1.0 / (1.0 + t * t) : nu[order[k]];
    if (!(w > 0.0)) return detail::finish(detail::fail(r, exit_code::schema, "weights must be positive"), clock);
    atoms.push_back({t, w});
    ys(static_cast<Eigen::Index>(k)) = y[order[k]];
  }
  std::optional<HerglotzSpace> s;
  try {
    NonnegAtomicMeasure m(std::move(atoms), opt.tol.sep_min);
    if (m.size() != diag.size()) throw io::SchemaError("diagonal entries must be distinct");
    s = HerglotzSpace(m, 0.0);
  } catch (const std::exception& e) {
    return detail::finish(detail::fail(r, exit_code::schema, e.what()), clock);
  }
  const SpaceElement yel(ys);
  r.report["space"] = io::to_json(*s);

  bool ok = true;
  json cert;
  try {
    const auto fwd = rank_one_forward(*s, yel, opt.tol);
    const auto p = rank_one_bridge(*s, yel);
    r.report["extension"] = io::to_json(p);
    r.report["matrix"] = io::to_json(fwd.matrix);
    r.report["matrix_eigenvalues"] = io::to_json(fwd.spectrum)["eigenvalues"];
    const auto g = defining_function(*s, p);
    json zs = json::array();
    for (const auto& z : zeros_with_multiplicity(g, opt.tol))
      zs.push_back({{"re", z.location.real()}, {"im", z.location.imag()}, {"alg", z.multiplicity}});
    r.report["defining_function_zeros"] = zs;
    const auto an = detail::analyse(*s, p, opt);
    r.report["extension_eigenvalues"] = io::to_json(an.analytic)["eigenvalues"];
    const auto cmp = compare_spectra(fwd.spectrum, an.analytic, opt.loc_tol);
    const double dist =
        reconstruct_relation(*s, p, opt.tol).distance(LinearRelationFD::graph(fwd.matrix));
    cert = {{"spectra_match", cmp.match},
            {"max_location_error", cmp.max_location_error},
            {"pencil_match", an.comparison.match},
            {"graph_distance", dist}};
    ok = cmp.match && an.comparison.match && dist <= 1e-10;
    r.report["residuals"] = an.residuals;
    io::append_spectrum_rows(r.plot, "matrix", fwd.spectrum);
    io::append_spectrum_rows(r.plot, "extension", an.analytic);
  } catch (const Error& e) {
    cert["error"] = e.what();
    ok = false;
  }
  cert["certified"] = ok;
  r.report["certification"] = cert;
  if (!ok) detail::fail(r, exit_code::certification, "matrix and extension spectra disagree");
  return detail::finish(r, clock);
}

}  // namespace krein::commands
