#pragma once

// Subcommand runner behind the ccsymbol executable. Reports are JSON on
// stdout or --output. Exit status: 0 success, 1 verification failure,
// 2 input error.

#include "ccsymbol/json_io.hpp"
#include "ccsymbol/sampling.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace ccsymbol::cli {

enum Exit { kOk = 0, kVerifyFailed = 1, kInputError = 2 };

struct Options {
  std::string input, output, csv;
  std::vector<std::string> conventions;
  std::string orientation;
  int trunc = -1, trunc1 = -1, trunc2 = -1;
  // verify-cases
  std::vector<std::string> cases;
  std::string params;
  int grid = 128;
  double tol = -1;
  int draws = 0;
  double eps1 = 0.1, eps2 = 0.1;
  std::uint64_t seed = 1;
  // verify-iterint
  int count = 50;
  int quad_order = 32;
};

// Reads and parses a JSON file; syntax errors report line and column.
inline json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    // drop the library's own "[json.exception...] parse error at line l, column c: " prefix
    if (auto p = what.find("parse error"); p != std::string::npos) {
      auto colon = what.find(": ", p);
      what = colon == std::string::npos ? what.substr(p) : what.substr(colon + 2);
    }
    throw input_error(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON: " + what);
  }
}

inline Orientation orientation_from(const std::string& s) {
  if (s.empty() || s == "tame") return Orientation::tame;
  if (s == "displayed") return Orientation::displayed;
  throw input_error("orientation must be tame or displayed, got " + s);
}

inline Conventions conventions_from(const json& in, const std::vector<std::string>& flags) {
  Conventions c;
  if (in.is_object() && in.contains("conventions")) io::conventions_from_json(in.at("conventions"), c);
  for (const auto& f : flags) {
    auto eq = f.find('=');
    if (eq == std::string::npos) throw input_error("convention flag must be name=value, got " + f);
    try {
      c.set(f.substr(0, eq), f.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw input_error(e.what());
    }
  }
  return c;
}

inline json header(const std::string& command) { return {{"version", kVersion}, {"command", command}}; }

inline int pick(int flag, const json& in, const char* key, int def) {
  if (flag >= 0) return flag;
  return io::get_or<int>(in, key, def);
}

// ---------------------------------------------------------------------------

inline int decompose1d(const Options& o, json& rep) {
  json in = read_json(o.input);
  auto d = io::algebra_from_json(in.value("algebra", json()));
  auto f = io::series1d_from_json(io::field(in, "f"), d);
  int T = pick(o.trunc, in, "T", 8);
  auto w = witt_decompose_1d(f, T);
  rep["algebra"] = io::algebra_to_json(d);
  rep["omega"] = w.omega;
  rep["leading"] = io::element_to_json(w.leading);
  json plus = json::array(), minus = json::array();
  for (const auto& [i, a] : w.plus_params) plus.push_back({{"i", i}, {"a", io::element_to_json(a)}});
  for (const auto& [i, a] : w.minus_params) minus.push_back({{"i", -i}, {"a", io::element_to_json(a)}});
  rep["plus_params"] = plus;
  rep["minus_params"] = minus;
  rep["plus_trunc"] = w.plus_trunc;
  return kOk;
}

inline int decompose2d(const Options& o, json& rep) {
  json in = read_json(o.input);
  auto d = io::algebra_from_json(in.value("algebra", json()));
  auto f = io::series2d_from_json(io::field(in, "f"), d);
  int T1 = pick(o.trunc1, in, "T1", 6), T2 = pick(o.trunc2, in, "T2", 6);
  auto w = witt_decompose_2d(f, T1, T2);
  rep["algebra"] = io::algebra_to_json(d);
  rep["omega1"] = w.omega1;
  rep["omega2"] = w.omega2;
  rep["leading"] = io::element_to_json(w.leading);
  json params = json::array();
  for (const auto& [key, a] : w.params)
    if (!a.is_zero()) params.push_back({{"t2", key.first}, {"t1", key.second}, {"a", io::element_to_json(a)}});
  rep["params"] = params;
  rep["T1"] = T1;
  rep["T2"] = T2;
  return kOk;
}

inline json symbol1d_json(const SymbolValue1D& s) {
  json r{{"value", io::element_to_json(s.value)},
         {"value_text", s.value.to_string()},
         {"orientation", s.orientation == Orientation::tame ? "tame" : "displayed"},
         {"sign_exponent", s.sign_exponent},
         {"leading", io::element_to_json(s.leading)}};
  auto facs = [](const std::vector<SymbolFactor1D>& v) {
    json a = json::array();
    for (const auto& f : v) a.push_back({{"j", f.j}, {"k", f.k}, {"factor", io::element_to_json(f.factor)}});
    return a;
  };
  r["numerator_factors"] = facs(s.numerator_factors);
  r["denominator_factors"] = facs(s.denominator_factors);
  return r;
}

inline int symbol1d(const Options& o, json& rep) {
  json in = read_json(o.input);
  auto d = io::algebra_from_json(in.value("algebra", json()));
  auto f = io::series1d_from_json(io::field(in, "f"), d);
  auto g = io::series1d_from_json(io::field(in, "g"), d);
  auto orient = orientation_from(o.orientation.empty() ? in.value("orientation", std::string()) : o.orientation);
  rep["algebra"] = io::algebra_to_json(d);
  rep.update(symbol1d_json(cc_symbol_1d(f, g, orient)));
  return kOk;
}

inline int weil(const Options& o, json& rep) {
  json in = read_json(o.input);
  auto d = io::algebra_from_json(in.value("algebra", json()));
  auto f = io::factored_from_json(io::field(in, "f"), d);
  auto g = io::factored_from_json(io::field(in, "g"), d);
  auto orient = orientation_from(o.orientation.empty() ? in.value("orientation", std::string()) : o.orientation);
  rep["algebra"] = io::algebra_to_json(d);
  json pts = json::array();
  AlgebraElement prod = one(d);
  for (const auto& ls : weil_symbols(f, g, orient)) {
    pts.push_back({{"point", ls.point.infinity ? json("inf") : io::rational_to_json(ls.point.x)},
                   {"value", io::element_to_json(ls.symbol.value)}});
    prod = prod * ls.symbol.value;
  }
  rep["points"] = pts;
  rep["product"] = io::element_to_json(prod);
  rep["reciprocity_holds"] = prod.is_one();
  return prod.is_one() ? kOk : kVerifyFailed;
}

inline int symbol2d(const Options& o, json& rep) {
  json in = read_json(o.input);
  auto d = io::algebra_from_json(in.value("algebra", json()));
  auto f1 = io::series2d_from_json(io::field(in, "f1"), d);
  auto f2 = io::series2d_from_json(io::field(in, "f2"), d);
  auto f3 = io::series2d_from_json(io::field(in, "f3"), d);
  auto P1 = io::element_from_json(in.value("P1", json(1)), d);
  auto P2 = io::element_from_json(in.value("P2", json(1)), d);
  int T1 = pick(o.trunc1, in, "T1", 6), T2 = pick(o.trunc2, in, "T2", 6);
  Conventions conv = conventions_from(in, o.conventions);
  auto s = cc_symbol_2d(f1, f2, f3, P1, P2, T1, T2, conv);
  rep["algebra"] = io::algebra_to_json(d);
  rep["total"] = io::element_to_json(s.total);
  rep["total_text"] = s.total.to_string();
  json Q = json::array(), R = json::array();
  for (const auto& f : s.factors) {
    if (f.kind == "T") continue;
    json r{{"kind", f.kind},
           {"rotation", f.rotation},
           {"base", io::element_to_json(f.base)},
           {"exponent", f.exponent},
           {"value", io::element_to_json(f.value)}};
    (f.kind[0] == 'Q' ? Q : R).push_back(r);
  }
  rep["factors"] = {{"T", io::element_to_json(s.T)}, {"S", s.S}, {"A", s.A}, {"Q", Q}, {"R", R}};
  rep["conventions"] = io::conventions_to_json(s.conventions);
  rep["warnings"] = s.warnings;
  return kOk;
}

// Fixed instances for verify-cases without --params; each has a nonzero closed form.
inline TorusIntegrandSpec default_case(const std::string& id) {
  TorusIntegrandSpec s;
  s.case_id = id;
  s.eps1 = s.eps2 = 0.5;
  auto E = [](long i1, long j1, long i2, long j2, long i3, long j3) {
    return MonomialExponents{{Exponent2{i1, j1}, Exponent2{i2, j2}, Exponent2{i3, j3}}};
  };
  if (id == "1") {
    s.eps1 = s.eps2 = 0.1;
    s.e = E(1, -1, 0, 1, -1, 0);
    s.a = 0.3;
    s.b = cplx(0.2, 0.3);
    s.c = 0.03;
  } else if (id == "2") {
    s.e = E(1, 1, 1, 2, -2, -1);
    s.b = 0.2;
    s.c = cplx(0.03, 0.03);
  } else if (id == "3") {
    s.e = E(1, 1, 1, -1, -1, -1);
    s.a = 0.3;
    s.c = cplx(0.05, -0.05);
  } else if (id == "4") {
    s.e = E(1, 0, -2, 0, 1, 2);
    s.a = cplx(0.2, 0.2);
    s.b = 0.05;
  } else if (id == "5") {
    s.e = E(1, 2, -1, 1, 2, 0);
    s.c = cplx(0.3, 0.4);
  } else if (id == "6") {
    s.e = E(2, 1, 0, -1, 1, 1);
    s.b = 0.2;
  } else if (id == "7") {
    s.e = E(2, 0, 1, 1, -1, 2);
    s.a = cplx(0.3, -0.2);
  } else if (id == "8") {
    s.e = E(1, 2, -1, 3, 2, 1);
  } else if (id == "semilocal") {
    s.e = E(1, 0, 0, 1, -1, -1);
    s.e4 = {-1, 0};
    s.a = 0.4;
    s.b = cplx(0.3, 0.2);
    s.c = 0.08;
    s.a4 = cplx(0.1, 0.1);
  } else {
    throw input_error("unknown case '" + id + "'");
  }
  return s;
}

inline int verify_cases(const Options& o, json& rep) {
  double tol = o.tol > 0 ? o.tol : 1e-6;
  if (o.grid < 8 || o.grid > 4096) throw input_error("--grid must lie in [8, 4096]");
  std::vector<TorusIntegrandSpec> specs;
  if (!o.params.empty()) {
    json in = read_json(o.params);
    const json& list = in.is_array() ? in : in.value("cases", json::array({in}));
    for (const auto& j : list) specs.push_back(io::torus_spec_from_json(j));
    if (!o.cases.empty())
      std::erase_if(specs, [&](const auto& s) { return std::find(o.cases.begin(), o.cases.end(), s.case_id) == o.cases.end(); });
  } else {
    std::vector<std::string> ids = o.cases;
    if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) ids = TorusIntegrandSpec::case_ids();
    for (const auto& id : ids) {
      specs.push_back(default_case(id));
      auto pos = std::find(TorusIntegrandSpec::case_ids().begin(), TorusIntegrandSpec::case_ids().end(), id);
      sampling::TorusGen g(o.seed * 1000003 + static_cast<std::uint64_t>(pos - TorusIntegrandSpec::case_ids().begin()));
      for (int k = 0; k < o.draws; ++k) specs.push_back(g.spec(id, o.eps1, o.eps2));
    }
  }
  json reports = json::array();
  bool all = true;
  double worst = 0;
  std::ostringstream csv;
  csv << "index,case,flag_value,quantity,residual,tolerance,pass\n";
  for (std::size_t k = 0; k < specs.size(); ++k) {
    CaseReport r;
    try {
      r = verify_case(specs[k], o.grid, tol);
    } catch (const convergence_error& e) {
      throw input_error(std::string("case ") + specs[k].case_id + ": " + e.what());
    } catch (const degenerate_kernel& e) {
      throw input_error(std::string("case ") + specs[k].case_id + ": " + e.what());
    }
    json j = io::case_report_to_json(r);
    j["params"] = io::torus_spec_to_json(specs[k]);
    reports.push_back(j);
    all = all && r.pass;
    worst = std::max(worst, r.best_residual);
    for (const auto& out : r.outcomes)
      for (const auto& c : out.comparisons) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6e,%.3e", c.residual, c.tolerance);
        csv << k << ',' << r.case_id << ',' << out.value << ',' << c.quantity << ',' << buf << ','
            << (c.residual <= c.tolerance ? "true" : "false") << '\n';
      }
  }
  rep["grid"] = o.grid;
  rep["tol"] = tol;
  rep["seed"] = o.seed;
  rep["reports"] = reports;
  rep["max_best_residual"] = worst;
  rep["pass"] = all;
  if (!o.csv.empty()) {
    std::ofstream f(o.csv, std::ios::binary);
    if (!f) throw input_error("cannot write " + o.csv);
    f << csv.str();
  }
  return all ? kOk : kVerifyFailed;
}

inline int verify_iterint(const Options& o, json& rep) {
  IterIntOptions opt;
  opt.quad_order = o.quad_order;
  if (!o.input.empty()) {
    json in = read_json(o.input);
    PathSpec p{io::points_from_json(io::field(in, "path"))};
    std::vector<FormSpec> forms;
    for (const auto& f : io::field(in, "forms")) forms.push_back(io::form_from_json(f));
    if (p.vertices.size() < 2) throw input_error("path needs at least two vertices");
    rep["value"] = io::complex_to_json(iterated_integral(p, forms, opt));
    return kOk;
  }
  double tol = o.tol > 0 ? o.tol : 1e-8;
  if (o.count < 1) throw input_error("--count must be positive");
  struct Acc {
    const char* name;
    double max = 0;
  };
  std::array<Acc, 4> acc{{{"shuffle"}, {"reversal"}, {"composition"}, {"commutator"}}};
  sampling::PathGen g(o.seed);
  for (int k = 0; k < o.count; ++k) {
    int m = g.uniform(1, 2), n = g.uniform(1, 4 - m);
    auto p = g.path();
    auto a = g.forms(m), b = g.forms(n);
    acc[0].max = std::max(acc[0].max, check_shuffle(p, a, b, opt));
    auto q = g.path();
    acc[1].max = std::max(acc[1].max, check_reversal(q, g.forms(g.uniform(1, 3)), opt));
    auto p1 = g.path();
    auto p2 = g.path_from(p1.end());
    acc[2].max = std::max(acc[2].max, check_composition(p1, p2, g.forms(g.uniform(1, 3)), opt));
    auto c = sampling::commutator_instance(g);
    acc[3].max = std::max(acc[3].max, check_commutator(c.alpha, c.beta, c.w1, c.w2, opt));
  }
  json ids = json::object();
  bool pass = true;
  for (const auto& a : acc) {
    ids[a.name] = {{"instances", o.count}, {"max_residual", a.max}, {"tolerance", tol}, {"pass", a.max <= tol}};
    pass = pass && a.max <= tol;
  }
  double mom = 0;
  for (int k = -8; k <= 8; ++k)
    if (k != 0) mom = std::max(mom, std::abs(fourier_moment(k, o.quad_order) - 1.0 / cplx(0, 2 * std::numbers::pi * k)));
  constexpr double kMomentTol = 1e-10;
  rep["seed"] = o.seed;
  rep["quad_order"] = o.quad_order;
  rep["identities"] = ids;
  rep["fourier_moments"] = {{"k_max", 8}, {"max_residual", mom}, {"tolerance", kMomentTol}, {"pass", mom <= kMomentTol}};
  pass = pass && mom <= kMomentTol;
  rep["pass"] = pass;
  return pass ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contou-Carrere symbols: Witt decompositions, exact symbols and numerical verification", "ccsymbol"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s, bool needs_input) {
    auto* opt = s->add_option("-i,--input", o.input, "input JSON file ('-' for stdin)");
    if (needs_input) opt->required();
    s->add_option("-o,--output", o.output, "write the report here instead of stdout");
  };
  auto* c_d1 = app.add_subcommand("decompose1d", "Witt parameters of a one-variable series");
  common(c_d1, true);
  c_d1->add_option("-T,--trunc", o.trunc, "plus parameters up to this index")->check(CLI::Range(0, 4096));
  auto* c_d2 = app.add_subcommand("decompose2d", "Witt parameters of a two-variable series");
  common(c_d2, true);
  auto* c_s1 = app.add_subcommand("symbol1d", "one-variable Contou-Carrere symbol <f, g>");
  common(c_s1, true);
  c_s1->add_option("--orientation", o.orientation, "tame | displayed");
  auto* c_s2 = app.add_subcommand("symbol2d", "two-variable symbol {f1, f2, f3}");
  common(c_s2, true);
  auto* c_w = app.add_subcommand("weil", "local symbols of two rational functions on P^1 and their product");
  common(c_w, true);
  c_w->add_option("--orientation", o.orientation, "tame | displayed");
  for (auto* s : {c_d2, c_s2}) {
    s->add_option("--T1", o.trunc1, "row truncation (powers of t2)")->check(CLI::Range(0, 256));
    s->add_option("--T2", o.trunc2, "column truncation (powers of t1)")->check(CLI::Range(0, 256));
  }
  c_s2->add_option("-c,--convention", o.conventions, "name=value, repeatable");

  auto* c_vc = app.add_subcommand("verify-cases", "numerical torus integrals against the closed forms");
  common(c_vc, false);
  c_vc->add_option("--case", o.cases, "1..8, semilocal or all (repeatable)");
  c_vc->add_option("--params", o.params, "JSON file with one case spec, a list, or {\"cases\": [...]}");
  c_vc->add_option("--grid", o.grid, "trapezoid grid size N");
  c_vc->add_option("--tol", o.tol, "residual tolerance (default 1e-6)");
  c_vc->add_option("--draws", o.draws, "extra seeded random instances per case")->check(CLI::Range(0, 10000));
  c_vc->add_option("--eps1", o.eps1, "radius for random instances")->check(CLI::Range(1e-6, 0.999999));
  c_vc->add_option("--eps2", o.eps2, "radius for random instances")->check(CLI::Range(1e-6, 0.999999));
  c_vc->add_option("--seed", o.seed, "seed for random instances");
  c_vc->add_option("--csv", o.csv, "also write a residual table");

  auto* c_vi = app.add_subcommand("verify-iterint", "iterated-integral identities on seeded instances");
  common(c_vi, false);
  c_vi->add_option("--count", o.count, "instances per identity");
  c_vi->add_option("--seed", o.seed, "instance seed");
  c_vi->add_option("--tol", o.tol, "residual tolerance (default 1e-8)");
  c_vi->add_option("--order", o.quad_order, "Gauss-Legendre order per panel")->check(CLI::IsMember({8, 16, 24, 32, 48, 64}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string name = sub->get_name();
  json rep = header(name);
  int code;
  try {
    if (name == "decompose1d") code = decompose1d(o, rep);
    else if (name == "decompose2d") code = decompose2d(o, rep);
    else if (name == "symbol1d") code = symbol1d(o, rep);
    else if (name == "symbol2d") code = symbol2d(o, rep);
    else if (name == "weil") code = weil(o, rep);
    else if (name == "verify-cases") code = verify_cases(o, rep);
    else code = verify_iterint(o, rep);
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    // invalid inputs surface as invalid_argument / domain_error from the library
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  std::string text = rep.dump(2) + "\n";
  if (o.output.empty()) {
    out << text;
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << o.output << '\n';
      return kInputError;
    }
    f << text;
  }
  return code;
}

}  // namespace ccsymbol::cli
