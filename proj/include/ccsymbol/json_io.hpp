#pragma once

// JSON encoding of inputs and reports.
//
// Rationals are integers or strings "p/q". An algebra element is a rational
// (a constant) or a list of terms {"c": rational, "e": [exponents]}; "e" is
// the multi-index over the generators and defaults to all zeros. Complex
// numbers are a number or [re, im].

#include "ccsymbol/algebra.hpp"
#include "ccsymbol/iterint.hpp"
#include "ccsymbol/laurent.hpp"
#include "ccsymbol/symbol1d.hpp"
#include "ccsymbol/symbol2d.hpp"
#include "ccsymbol/torusverify.hpp"
#include "ccsymbol/witt.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ccsymbol {

inline constexpr const char* kVersion = "ccsymbol 1.0.0";

using json = nlohmann::ordered_json;

// Malformed or out-of-range input.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace io {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw input_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_or(const json& j, const char* key, T def) {
  if (!j.is_object() || !j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw input_error(std::string("field '") + key + "' has the wrong type");
  }
}

inline long get_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw input_error(std::string(what) + ": expected an integer");
  return j.get<long>();
}

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    Rational q;
    if (q.set_str(j.get<std::string>(), 10) != 0 || q.get_den() == 0)
      throw input_error("not a rational: '" + j.get<std::string>() + "'");
    q.canonicalize();
    return q;
  }
  throw input_error("rational must be an integer or a \"p/q\" string, got " + j.dump());
}

inline json rational_to_json(const Rational& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  return q.get_str();
}

inline AlgebraDescriptor algebra_from_json(const json& j) {
  if (j.is_null()) return AlgebraDescriptor();
  const json& o = j.is_object() ? field(j, "orders") : j;
  if (!o.is_array()) throw input_error("algebra: expected a list of generator orders");
  std::vector<int> orders;
  for (const auto& x : o) {
    long k = get_int(x, "generator order");
    if (k < 2 || k > 64) throw input_error("generator order must lie in [2, 64]");
    orders.push_back(static_cast<int>(k));
  }
  return AlgebraDescriptor(orders);
}

inline json algebra_to_json(const AlgebraDescriptor& d) { return {{"orders", d.orders()}}; }

inline AlgebraElement element_from_json(const json& j, const AlgebraDescriptor& d) {
  if (j.is_number_integer() || j.is_string()) return AlgebraElement(d, rational_from_json(j));
  if (!j.is_array()) throw input_error("algebra element must be a rational or a list of terms, got " + j.dump());
  AlgebraElement x(d);
  for (const auto& t : j) {
    Rational c = rational_from_json(field(t, "c"));
    std::vector<int> a(d.num_generators(), 0);
    if (t.contains("e")) {
      const auto& e = t.at("e");
      if (!e.is_array() || e.size() != d.num_generators())
        throw input_error("term exponent must list one entry per generator");
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<int>(get_int(e[i], "exponent"));
    }
    std::size_t idx;
    try {
      idx = d.index(a);
    } catch (const std::invalid_argument& err) {
      throw input_error(std::string("term exponent: ") + err.what());
    }
    x.set_coeff(idx, x.coeff(idx) + c);
  }
  return x;
}

inline json element_to_json(const AlgebraElement& x) {
  const auto& d = x.descriptor();
  json out = json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x.coeff(i)) == 0) continue;
    json e = json::array();
    for (int v : d.alpha(i)) e.push_back(v);
    out.push_back({{"c", rational_to_json(x.coeff(i))}, {"e", e}});
  }
  return out;
}

// {"terms": [{"n": k, "c": element}], "prec": p}; "prec" absent means exact
inline LaurentSeries1D series1d_from_json(const json& j, const AlgebraDescriptor& d) {
  int prec = kExact;
  if (j.contains("prec")) prec = static_cast<int>(get_int(j.at("prec"), "prec"));
  LaurentSeries1D f(d, prec);
  for (const auto& t : field(j, "terms")) {
    long n = get_int(field(t, "n"), "term index");
    if (n > prec) throw input_error("term index above the stated precision");
    f.set(static_cast<int>(n), f.coeff(static_cast<int>(n)) + element_from_json(field(t, "c"), d));
  }
  return f;
}

// {"terms": [{"t1": j, "t2": i, "c": element}]}, exact
inline LaurentSeries2D series2d_from_json(const json& j, const AlgebraDescriptor& d) {
  LaurentSeries2D f(d);
  for (const auto& t : field(j, "terms")) {
    int e1 = static_cast<int>(get_int(field(t, "t1"), "t1 exponent"));
    int e2 = static_cast<int>(get_int(field(t, "t2"), "t2 exponent"));
    f = f + monomial_2d(element_from_json(field(t, "c"), d), e1, e2);
  }
  return f;
}

inline FactoredRational factored_from_json(const json& j, const AlgebraDescriptor& d) {
  FactoredRational f;
  f.leading = element_from_json(j.contains("leading") ? j.at("leading") : json(1), d);
  for (const auto& r : field(j, "roots"))
    f.roots.push_back({element_from_json(field(r, "root"), d),
                       static_cast<int>(r.contains("multiplicity") ? get_int(r.at("multiplicity"), "multiplicity") : 1)});
  return f;
}

inline void conventions_from_json(const json& j, Conventions& conv) {
  if (j.is_null()) return;
  if (!j.is_object()) throw input_error("conventions must be an object of name: value");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw input_error("convention " + k + ": value must be a string");
    try {
      conv.set(k, v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw input_error(e.what());
    }
  }
}

inline json conventions_to_json(const Conventions& conv) {
  json o = json::object();
  for (const auto& [k, v] : conv.entries()) o[k] = v;
  return o;
}

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw input_error("complex number must be a number or [re, im], got " + j.dump());
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline Exponent2 exponent_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw input_error("exponent must be [i, j]");
  return {get_int(j[0], "exponent"), get_int(j[1], "exponent")};
}

inline json exponent_to_json(const Exponent2& e) { return json::array({e.i, e.j}); }

inline TorusIntegrandSpec torus_spec_from_json(const json& j) {
  TorusIntegrandSpec s;
  if (j.contains("case")) {
    const auto& c = j.at("case");
    s.case_id = c.is_number_integer() ? std::to_string(c.get<long>()) : c.is_string() ? c.get<std::string>() : "";
  }
  try {
    s.monomial_slots();
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  for (auto [key, dst] : {std::pair{"a", &s.a}, {"b", &s.b}, {"c", &s.c}, {"a4", &s.a4}})
    if (j.contains(key)) *dst = complex_from_json(j.at(key));
  const auto& e = field(j, "e");
  if (!e.is_array() || e.size() != 3) throw input_error("e must list three exponents");
  for (int k = 0; k < 3; ++k) s.e.e[k] = exponent_from_json(e[k]);
  if (j.contains("e4")) s.e4 = exponent_from_json(j.at("e4"));
  s.eps1 = get_or(j, "eps1", s.eps1);
  s.eps2 = get_or(j, "eps2", s.eps2);
  return s;
}

inline json torus_spec_to_json(const TorusIntegrandSpec& s) {
  json j{{"case", s.case_id}};
  auto slots = s.monomial_slots();
  if (!slots[0]) j["a"] = complex_to_json(s.a);
  if (!slots[1]) j["b"] = complex_to_json(s.b);
  if (!slots[2]) j["c"] = complex_to_json(s.c);
  if (s.case_id == "semilocal") j["a4"] = complex_to_json(s.a4);
  j["e"] = json::array({exponent_to_json(s.e.e[0]), exponent_to_json(s.e.e[1]), exponent_to_json(s.e.e[2])});
  if (s.case_id == "semilocal") j["e4"] = exponent_to_json(s.e4);
  j["eps1"] = s.eps1;
  j["eps2"] = s.eps2;
  return j;
}

inline json case_report_to_json(const CaseReport& r) {
  json out{{"case", r.case_id}, {"grid", r.N}, {"tol", r.tol}};
  out["flag"] = r.flag.empty() ? json(nullptr) : json(r.flag);
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    json cs = json::array();
    for (const auto& c : o.comparisons)
      cs.push_back({{"quantity", c.quantity},
                    {"numeric", complex_to_json(c.numeric)},
                    {"closed_form", complex_to_json(c.closed)},
                    {"residual", c.residual},
                    {"tolerance", c.tolerance},
                    {"vanishing", c.vanishing}});
    outcomes.push_back({{"value", o.value}, {"max_residual", o.max_residual}, {"pass", o.pass}, {"comparisons", cs}});
  }
  out["outcomes"] = outcomes;
  out["best"] = r.best;
  out["best_residual"] = r.best_residual;
  out["pass"] = r.pass;
  out["notes"] = r.notes;
  return out;
}

inline std::vector<cplx> points_from_json(const json& j) {
  std::vector<cplx> v;
  if (j.is_null()) return v;
  if (!j.is_array()) throw input_error("expected a list of complex numbers");
  for (const auto& x : j) v.push_back(complex_from_json(x));
  return v;
}

// {"zeros": [...], "poles": [...]} or {"num": [...], "den": [...]}
inline FormSpec form_from_json(const json& j) {
  if (j.contains("num") || j.contains("den")) {
    try {
      return FormSpec::rational(points_from_json(field(j, "num")), points_from_json(field(j, "den")));
    } catch (const std::invalid_argument& e) {
      throw input_error(e.what());
    }
  }
  return FormSpec::dlog(points_from_json(j.value("zeros", json())), points_from_json(j.value("poles", json())));
}

}  // namespace io
}  // namespace ccsymbol
