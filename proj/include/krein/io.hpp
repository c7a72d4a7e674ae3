#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "krein/extension.hpp"
#include "krein/hspace.hpp"
#include "krein/models.hpp"
#include "krein/polynomial.hpp"
#include "krein/qherglotz.hpp"
#include "krein/types.hpp"

namespace krein::io {

using json = nlohmann::json;

/// Malformed input: unparsable text, missing fields, wrong lengths.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
  return out;
}

inline double to_double(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw SchemaError("cannot parse number in '" + whole + "'");
  }
  if (used != s.size()) throw SchemaError("trailing characters in '" + whole + "'");
  return x;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// "a+bi", "a-bi", "bi", "a", "i", "-2.5e-1+3i" (j accepted for i).
inline Complex parse_complex(const std::string& text) {
  const std::string s = detail::strip(text);
  if (s.empty()) throw SchemaError("empty complex literal");
  if (s.back() != 'i' && s.back() != 'j') return {detail::to_double(s, text), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  if (cut == std::string::npos) return {0.0, detail::to_double(body, text)};
  return {detail::to_double(body.substr(0, cut), text), detail::to_double(body.substr(cut), text)};
}

inline std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  if (detail::strip(text).empty()) return out;
  for (const auto& item : detail::split(text, ',')) out.push_back(parse_complex(item));
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& z : parse_complex_list(text)) {
    if (z.imag() != 0.0) throw SchemaError("expected a real number, got a complex one");
    out.push_back(z.real());
  }
  return out;
}

/// "z1[:m1],z2[:m2],..." with multiplicity 1 by default.
inline std::vector<RootCluster> parse_zero_list(const std::string& text) {
  std::vector<RootCluster> out;
  if (detail::strip(text).empty()) return out;
  for (const auto& item : detail::split(text, ',')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() > 2) throw SchemaError("bad zero specification '" + item + "'");
    int mult = 1;
    if (parts.size() == 2) {
      const double m = detail::to_double(detail::strip(parts[1]), item);
      if (m < 1 || m != static_cast<int>(m)) throw SchemaError("multiplicity must be a positive integer");
      mult = static_cast<int>(m);
    }
    out.push_back({parse_complex(parts[0]), mult});
  }
  return out;
}

// ---- JSON fragments ----

/// Folds -0.0 into 0.0 so reports do not depend on the sign of a zero.
inline double clean(double x) { return x == 0.0 ? 0.0 : x; }

inline json to_json(Complex z) { return json::array({clean(z.real()), clean(z.imag())}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError("expected a complex number [re, im] or a real number");
}

inline double real_from_json(const json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string("expected a number for ") + what);
  return j.get<double>();
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json to_json(const SpaceElement& f) {
  json c = json::array();
  for (Eigen::Index k = 0; k < f.size(); ++k) c.push_back(to_json(f.coords(k)));
  return {{"coords", c}};
}

inline SpaceElement element_from_json(const json& j, Eigen::Index n) {
  // either {"coords": [...]} or the bare coordinate list
  const json& c = j.is_array() ? j : field(j, "coords");
  if (!c.is_array()) throw SchemaError("coords must be an array");
  if (static_cast<Eigen::Index>(c.size()) != n)
    throw SchemaError("coordinate vector length " + std::to_string(c.size()) + " does not match dimension " +
                      std::to_string(n));
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = complex_from_json(c[static_cast<std::size_t>(k)]);
  return SpaceElement(std::move(v));
}

template <class Weight>
json to_json(const AtomicMeasure<Weight>& m) {
  json atoms = json::array();
  for (const auto& a : m) {
    if constexpr (std::is_same_v<Weight, double>) {
      atoms.push_back({{"t", clean(a.t)}, {"w", a.w}});
    } else {
      atoms.push_back({{"t", clean(a.t)}, {"w", to_json(a.w)}});
    }
  }
  return {{"atoms", atoms}};
}

/// Nonnegative measure fragment; the input must not contain coincident atoms.
inline NonnegAtomicMeasure nonneg_measure_from_json(const json& j) {
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array()) throw SchemaError("atoms must be an array");
  std::vector<Atom<double>> at;
  for (const auto& a : atoms) {
    const Complex w = complex_from_json(field(a, "w"));
    if (w.imag() != 0.0) throw SchemaError("weights of a nonnegative measure must be real");
    if (!(w.real() > 0.0)) throw SchemaError("weights of a Herglotz space measure must be positive");
    at.push_back({real_from_json(field(a, "t"), "t"), w.real()});
  }
  const std::size_t given = at.size();
  NonnegAtomicMeasure m(std::move(at));
  if (m.size() != given) throw SchemaError("atoms closer than the separation threshold");
  return m;
}

inline ComplexAtomicMeasure complex_measure_from_json(const json& j) {
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array()) throw SchemaError("atoms must be an array");
  std::vector<Atom<Complex>> at;
  for (const auto& a : atoms) at.push_back({real_from_json(field(a, "t"), "t"), complex_from_json(field(a, "w"))});
  return ComplexAtomicMeasure(std::move(at));
}

inline json to_json(const QuasiHerglotz& q) { return {{"a", to_json(q.a)}, {"b", to_json(q.b)}, {"nu", to_json(q.nu)}}; }

inline QuasiHerglotz quasi_herglotz_from_json(const json& j) {
  return {complex_from_json(field(j, "a")), complex_from_json(field(j, "b")), complex_measure_from_json(field(j, "nu"))};
}

inline json to_json(const HerglotzSpace& s) { return {{"a", s.a()}, {"nu", to_json(s.nu_measure())}}; }

/// Accepts a space object or an instance object with a "space" member.
inline HerglotzSpace space_from_json(const json& j) {
  const json& sp = (j.is_object() && j.contains("space")) ? j.at("space") : j;
  const double a = sp.contains("a") ? real_from_json(sp.at("a"), "a") : 0.0;
  const auto nu = nonneg_measure_from_json(field(sp, "nu"));
  if (nu.empty()) throw SchemaError("space measure has no atoms");
  return HerglotzSpace(nu, a);
}

inline json to_json(const ExtensionParams& p) { return {{"v", to_json(p.v)}, {"c", to_json(p.c)}}; }

inline json to_json(const MFunction& g) { return {{"g", {{"a", to_json(g.a)}, {"f", to_json(g.f)}}}}; }

struct Instance {
  HerglotzSpace space;
  ExtensionParams params;
};

/// {"space": ..., "extension": {"v": ..., "c": ...} | {"g": {"a": ..., "f": ...}}}.
/// Schema violations raise SchemaError; a vanishing defining function raises
/// Error(IdenticallyZero).
inline Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("instance must be a JSON object");
  HerglotzSpace s = space_from_json(field(j, "space"));
  const json& ext = field(j, "extension");
  if (!ext.is_object()) throw SchemaError("extension must be an object");
  const bool has_v = ext.contains("v"), has_g = ext.contains("g");
  if (has_v == has_g) throw SchemaError("extension needs exactly one of 'v' or 'g'");
  if (has_v) {
    SpaceElement v = element_from_json(ext.at("v"), s.dim());
    const Complex c = complex_from_json(field(ext, "c"));
    ExtensionParams p = make_params(s, std::move(v), c);
    return {std::move(s), std::move(p)};
  }
  const json& g = ext.at("g");
  MFunction mf{complex_from_json(field(g, "a")), element_from_json(field(g, "f"), s.dim())};
  ExtensionParams p = to_extension(s, mf);
  return {std::move(s), std::move(p)};
}

inline json instance_to_json(const HerglotzSpace& s, const ExtensionParams& p) {
  return {{"space", to_json(s)}, {"extension", to_json(p)}};
}

inline json instance_to_json(const HerglotzSpace& s, const MFunction& g) {
  return {{"space", to_json(s)}, {"extension", to_json(g)}};
}

inline json to_json(const SpectrumReport& r) {
  json ev = json::array();
  for (const auto& e : r.eigenvalues) {
    json item = {{"inf", e.infinite}, {"alg", e.algebraic}, {"geo", e.geometric}};
    if (!e.infinite) {
      item["re"] = clean(e.location.real());
      item["im"] = clean(e.location.imag());
    }
    ev.push_back(item);
  }
  json cert = json::array();
  for (const auto& z : r.resolvent_set_certified) cert.push_back(to_json(z));
  return {{"eigenvalues", ev}, {"resolvent_set_certified", cert}};
}

inline json to_json(const Tolerances& t) {
  return {{"sep_min", t.sep_min},
          {"root_tol", t.root_tol},
          {"rank_tol", t.rank_tol},
          {"degenerate_tol", t.degenerate_tol},
          {"coeff_trim", t.coeff_trim}};
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

/// 64-bit FNV-1a of the canonical (sorted-key) serialization.
inline std::string digest(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

/// One row of plot data: series name, a point (or infinity), multiplicities, and a value.
struct PlotRow {
  std::string series;
  Complex point{};
  bool infinite = false;
  int alg = 0;
  int geo = 0;
  double value = 0.0;
  bool has_point = true;
};

inline std::string plot_csv(const std::vector<PlotRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "series,re,im,inf,alg,geo,value\n";
  for (const auto& r : rows) {
    os << r.series << ',';
    if (!r.has_point)
      os << ",,0,";
    else if (r.infinite)
      os << ",,1,";
    else
      os << r.point.real() << ',' << r.point.imag() << ",0,";
    os << r.alg << ',' << r.geo << ',' << r.value << '\n';
  }
  return os.str();
}

inline void append_spectrum_rows(std::vector<PlotRow>& rows, const std::string& series, const SpectrumReport& r) {
  for (const auto& e : r.eigenvalues) rows.push_back({series, e.location, e.infinite, e.algebraic, e.geometric, 0.0, true});
}

}  // namespace krein::io
