#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "oligoscope/json_io.hpp"

namespace og = oligoscope;
using og::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct GlobalOptions {
  og::Limits limits;
  std::string config_path;
  bool pretty = false;
  bool timing = false;
};

void apply_config_line(og::Limits& limits, const std::string& key, const std::string& value) {
  auto as_ll = [&] { return std::stoll(value); };
  auto as_i = [&] { return std::stoi(value); };
  if (key == "enumeration_cap") limits.enumeration_cap = as_ll();
  else if (key == "closure_cap") limits.closure_cap = as_ll();
  else if (key == "search_budget") limits.search_budget = as_ll();
  else if (key == "config_cap") limits.config_cap = as_ll();
  else if (key == "witness_length") limits.witness_length = as_i();
  else if (key == "roelcke_cap") limits.roelcke_cap = as_i();
  else if (key == "amalgam_growth") limits.amalgam_growth = as_i();
  else if (key == "tol") limits.tol = std::stod(value);
  else if (key == "threads") limits.threads = as_i();
  else if (key == "seed") limits.seed = std::stoull(value);
  else throw og::DomainError("bad_config", "unknown config key: " + key);
}

void load_config(og::Limits& limits, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw og::DomainError("bad_config", "cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_line(limits, key, value);
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw og::DomainError("bad_input", "cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

std::vector<int> parse_perm(const std::string& text) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

og::ClassKind kind_from_flags(const std::string& name, int den) {
  return og::ClassKind::from_name(name, den);
}

og::TypeSpec type_from_flag(const std::string& flag, og::ClassKind kind, int arity) {
  if (flag == "distinct" || flag == "proper" || flag == "atom")
    return og::TypeSpec::distinct(kind, arity);
  return og::type_from_json(load_json(flag));
}

void render_pretty(const json& doc, std::ostream& os) {
  const json& result = doc.at("result");
  os << "== " << doc.at("command_echo").get<std::string>() << " ==\n";
  if (result.is_object()) {
    for (auto it = result.begin(); it != result.end(); ++it)
      os << "  " << it.key() << ": " << it.value().dump() << "\n";
  } else {
    os << "  result: " << result.dump() << "\n";
  }
}

int emit(const GlobalOptions& g, const std::string& echo, const json& result, long long ms) {
  json doc{{"tool_version", kToolVersion},
           {"command_echo", echo},
           {"result", result},
           {"timing_ms", g.timing ? ms : 0}};
  if (g.pretty)
    render_pretty(doc, std::cout);
  else
    std::cout << doc.dump(2) << "\n";
  return 0;
}

// deterministic random rational couplings: convex combinations of permutation
// matrices with small integer weights
og::CouplingMatrix random_coupling(int n, std::mt19937_64& rng) {
  int terms = 2 + static_cast<int>(rng() % 3);
  std::vector<long long> weights;
  long long total = 0;
  std::vector<std::vector<int>> perms;
  for (int t = 0; t < terms; ++t) {
    std::vector<int> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[static_cast<size_t>(i)], p[rng() % (i + 1)]);
    perms.push_back(p);
    long long w = 1 + static_cast<long long>(rng() % 9);
    weights.push_back(w);
    total += w;
  }
  std::vector<og::Rational> e(static_cast<size_t>(n) * n, og::Rational(0));
  for (int t = 0; t < terms; ++t)
    for (int i = 0; i < n; ++i)
      e[static_cast<size_t>(i * n + perms[static_cast<size_t>(t)][static_cast<size_t>(i)])] +=
          og::Rational(weights[static_cast<size_t>(t)], total * n);
  return og::CouplingMatrix(n, std::move(e));
}

og::ContractionMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<std::complex<double>>> cols(
      static_cast<size_t>(n), std::vector<std::complex<double>>(static_cast<size_t>(n)));
  for (auto& col : cols)
    for (auto& z : col) z = {gauss(rng), gauss(rng)};
  // Gram-Schmidt
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      std::complex<double> dot = 0;
      for (int i = 0; i < n; ++i)
        dot += std::conj(cols[static_cast<size_t>(k)][static_cast<size_t>(i)]) *
               cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
      for (int i = 0; i < n; ++i)
        cols[static_cast<size_t>(j)][static_cast<size_t>(i)] -=
            dot * cols[static_cast<size_t>(k)][static_cast<size_t>(i)];
    }
    double norm = 0;
    for (int i = 0; i < n; ++i) norm += std::norm(cols[static_cast<size_t>(j)][static_cast<size_t>(i)]);
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) cols[static_cast<size_t>(j)][static_cast<size_t>(i)] /= norm;
  }
  og::ContractionMatrix u = og::ContractionMatrix::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u.at(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
  return u;
}

og::ContractionMatrix random_projection(int n, int proj_rank, std::mt19937_64& rng) {
  og::ContractionMatrix u = random_unitary(n, rng);
  og::ContractionMatrix p = og::ContractionMatrix::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::complex<double> s = 0;
      for (int k = 0; k < proj_rank; ++k) s += u.at(i, k) * std::conj(u.at(j, k));
      p.at(i, j) = s;
    }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oligoscope: finite windows of automorphism-group compactification semigroups"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_flag("--pretty", g.pretty, "human-readable rendering instead of JSON");
  app.add_flag("--timing", g.timing, "fill timing_ms (off by default for byte-stable output)");
  app.add_option("--seed", g.limits.seed, "seed for randomized scans");
  app.add_option("--threads", g.limits.threads, "worker hint; results are identical at any value")
      ->check(CLI::PositiveNumber);
  app.add_option("--enumeration-cap", g.limits.enumeration_cap, "enumeration candidate cap");
  app.add_option("--closure-cap", g.limits.closure_cap, "star-closure size cap");
  app.add_option("--search-budget", g.limits.search_budget, "witness search node budget");
  app.add_option("--config-cap", g.limits.config_cap, "configuration space cap");
  app.add_option("--witness-length", g.limits.witness_length, "default half-graph length");
  app.add_option("--roelcke-cap", g.limits.roelcke_cap, "max n for the exact metric");
  app.add_option("--amalgam-growth", g.limits.amalgam_growth, "window growth bound");
  app.add_option("--tol", g.limits.tol, "float tolerance");

  std::string kind_name = "pure-set";
  int den = 1, n = 0, length = 0, arity_x = 1, arity_y = 1, trials = 1000;
  std::string p_path, q_path, x_path, y_path, e_path, gens_path, structure_path;
  std::string a_path, b_path, formula_text, restrict_text, type_x = "distinct",
              type_y = "distinct", g_perm, h_perm, op;
  bool list_items = false, csv_output = false;

  auto add_kind = [&](CLI::App* cmd) {
    cmd->add_option("--kind", kind_name, "pure-set|random-graph|dense-linear-order|atomless-boolean|urysohn-rational");
    cmd->add_option("--den", den, "grid denominator for urysohn-rational");
  };

  auto* orbits = app.add_subcommand("orbits", "count quantifier-free n-types over the empty set");
  add_kind(orbits);
  orbits->add_option("--n", n)->required();

  auto* pair_types = app.add_subcommand("pair-types", "enumerate pair types at a finite window");
  add_kind(pair_types);
  pair_types->add_option("--n", n)->required();
  pair_types->add_flag("--list", list_items, "include the configurations");

  auto* compose_cmd = app.add_subcommand("compose", "compose two partial isomorphisms");
  compose_cmd->add_option("--p", p_path)->required();
  compose_cmd->add_option("--q", q_path)->required();

  auto* closure_cmd = app.add_subcommand("star-closure", "closure under product and involution");
  closure_cmd->add_option("--gens", gens_path)->required();

  auto* green_cmd = app.add_subcommand("green", "Green left preorder comparisons");
  green_cmd->add_option("--p", p_path)->required();
  green_cmd->add_option("--q", q_path)->required();

  auto* idem_cmd = app.add_subcommand("idempotents", "idempotents and the least one in a closure");
  idem_cmd->add_option("--gens", gens_path)->required();

  auto* central_cmd = app.add_subcommand("central", "central idempotents of a window");
  add_kind(central_cmd);
  central_cmd->add_option("--window", n)->required();
  central_cmd->add_option("--structure", structure_path, "window structure document");

  auto* hgroup_cmd = app.add_subcommand("hgroup", "maximal group of an idempotent");
  hgroup_cmd->add_option("--e", e_path)->required();
  hgroup_cmd->add_option("--structure", structure_path, "window structure document");

  auto* amalgam_cmd = app.add_subcommand("amalgam-check", "two-sided factorization through an enlarged window");
  amalgam_cmd->add_option("--p", p_path)->required();
  amalgam_cmd->add_option("--x", x_path)->required();
  amalgam_cmd->add_option("--y", y_path)->required();
  amalgam_cmd->add_option("--structure", structure_path, "window structure document");

  auto* roelcke_cmd = app.add_subcommand("roelcke-dist", "exact lower-uniformity distance on permutations");
  roelcke_cmd->set_help_flag("--help", "print help");  // frees -h for the second permutation
  roelcke_cmd->add_option("--n", n)->required();
  roelcke_cmd->add_option("--g", g_perm)->required();
  roelcke_cmd->add_option("--h", h_perm)->required();

  auto add_stability_flags = [&](CLI::App* cmd) {
    add_kind(cmd);
    cmd->add_option("--formula", formula_text)->required();
    cmd->add_option("--type-x", type_x, "distinct | path to a type document");
    cmd->add_option("--type-y", type_y, "distinct | path to a type document");
    cmd->add_option("--arity-x", arity_x);
    cmd->add_option("--arity-y", arity_y);
    cmd->add_option("--restrict", restrict_text, "joint restriction formula");
  };
  auto* stability_cmd = app.add_subcommand("stability", "classify a formula modulo a pair of types");
  add_stability_flags(stability_cmd);
  auto* reduct_cmd = app.add_subcommand("reduct", "stable reduct of a formula");
  add_stability_flags(reduct_cmd);
  auto* witness_cmd = app.add_subcommand("witness", "search for a half-graph certificate");
  add_stability_flags(witness_cmd);
  witness_cmd->add_option("--length", length, "half-graph length (default from config)");

  auto* couplings_cmd = app.add_subcommand("couplings", "self-coupling semigroup operations");
  couplings_cmd
      ->add_option("--op", op, "compose|involution|idempotent-check|partitions|central|assoc-check")
      ->required();
  couplings_cmd->add_option("--a", a_path);
  couplings_cmd->add_option("--b", b_path);
  couplings_cmd->add_option("--n", n);
  couplings_cmd->add_option("--trials", trials);
  couplings_cmd->add_flag("--csv", csv_output, "emit matrices as rows of rationals");

  auto* contractions_cmd = app.add_subcommand("contractions", "contraction semigroup operations");
  contractions_cmd->add_option("--op", op, "compose|adjoint|norm|project-check|projection-scan")
      ->required();
  contractions_cmd->add_option("--a", a_path);
  contractions_cmd->add_option("--b", b_path);
  contractions_cmd->add_option("--n", n);
  contractions_cmd->add_option("--trials", trials);

  // global flags may follow the subcommand
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"code", "usage"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 2;
  }

  try {
    if (g.config_path.empty()) {
      const char* env = std::getenv("OLIGOSCOPE_CONFIG");
      if (env) g.config_path = env;
    }
    og::Limits cli_overrides = g.limits;  // flags already folded in by CLI11
    if (!g.config_path.empty()) {
      og::Limits from_file;
      load_config(from_file, g.config_path);
      // config provides the base; explicit flags take precedence
      og::Limits defaults;
      auto pick = [](auto flag_value, auto default_value, auto file_value) {
        return flag_value != default_value ? flag_value : file_value;
      };
      og::Limits merged = from_file;
      merged.enumeration_cap = pick(cli_overrides.enumeration_cap, defaults.enumeration_cap, from_file.enumeration_cap);
      merged.closure_cap = pick(cli_overrides.closure_cap, defaults.closure_cap, from_file.closure_cap);
      merged.search_budget = pick(cli_overrides.search_budget, defaults.search_budget, from_file.search_budget);
      merged.config_cap = pick(cli_overrides.config_cap, defaults.config_cap, from_file.config_cap);
      merged.witness_length = pick(cli_overrides.witness_length, defaults.witness_length, from_file.witness_length);
      merged.roelcke_cap = pick(cli_overrides.roelcke_cap, defaults.roelcke_cap, from_file.roelcke_cap);
      merged.amalgam_growth = pick(cli_overrides.amalgam_growth, defaults.amalgam_growth, from_file.amalgam_growth);
      merged.tol = pick(cli_overrides.tol, defaults.tol, from_file.tol);
      merged.threads = pick(cli_overrides.threads, defaults.threads, from_file.threads);
      merged.seed = pick(cli_overrides.seed, defaults.seed, from_file.seed);
      g.limits = merged;
    }

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
    };
    og::ClassKind kind = kind_from_flags(kind_name, den);

    if (orbits->parsed()) {
      long long count = og::count_orbits(kind, n, g.limits);
      std::ostringstream echo;
      echo << "orbits kind=" << kind.name() << (kind.denominator > 1 ? "/" + std::to_string(den) : "")
           << " n=" << n;
      return emit(g, echo.str(), json(count), elapsed());
    }
    if (pair_types->parsed()) {
      auto items = og::enumerate_pair_types(kind, n, g.limits);
      std::ostringstream echo;
      echo << "pair-types kind=" << kind.name() << " n=" << n;
      if (!list_items) return emit(g, echo.str(), json(items.size()), elapsed());
      json arr = json::array();
      for (const auto& c : items) arr.push_back(og::to_json(c));
      return emit(g, echo.str(), json{{"count", items.size()}, {"items", arr}}, elapsed());
    }
    if (compose_cmd->parsed()) {
      og::PartialIso p = og::partial_iso_from_json(load_json(p_path));
      og::PartialIso q = og::partial_iso_from_json(load_json(q_path));
      return emit(g, "compose", og::to_json(og::compose(p, q)), elapsed());
    }
    if (closure_cmd->parsed()) {
      std::vector<og::PartialIso> gens;
      for (const auto& j : load_json(gens_path)) gens.push_back(og::partial_iso_from_json(j));
      return emit(g, "star-closure", og::to_json(og::generate_star_semigroup(gens, g.limits)),
                  elapsed());
    }
    if (green_cmd->parsed()) {
      og::PartialIso p = og::partial_iso_from_json(load_json(p_path));
      og::PartialIso q = og::partial_iso_from_json(load_json(q_path));
      bool leq = og::green_leq(p, q), geq = og::green_leq(q, p);
      json result{{"leq", leq}, {"geq", geq}, {"equiv", leq && geq}};
      if (leq) result["witness"] = og::to_json(og::green_canonical_witness(p, q));
      return emit(g, "green", result, elapsed());
    }
    if (idem_cmd->parsed()) {
      std::vector<og::PartialIso> gens;
      for (const auto& j : load_json(gens_path)) gens.push_back(og::partial_iso_from_json(j));
      og::StarSemigroupTable table = og::generate_star_semigroup(gens, g.limits);
      json idems = json::array();
      for (size_t i = 0; i < table.elements.size(); ++i)
        if (table.product[i][i] == static_cast<int>(i)) idems.push_back(og::to_json(table.elements[i]));
      json result{{"idempotents", idems}, {"least", og::to_json(og::least_idempotent(table))}};
      return emit(g, "idempotents", result, elapsed());
    }
    if (central_cmd->parsed()) {
      og::FiniteStructure w = structure_path.empty()
                                  ? og::FiniteStructure::pure_set(n)
                                  : og::structure_from_json(load_json(structure_path));
      if (!structure_path.empty() && w.size != n)
        throw og::DomainError("window_mismatch", "structure size differs from --window");
      if (structure_path.empty() && kind.tag != og::ClassKind::Tag::PureSet)
        throw og::DomainError("context_required", "non pure-set windows need --structure");
      auto items = og::central_idempotents(w, g.limits);
      json arr = json::array();
      for (const auto& e : items) arr.push_back(og::to_json(e));
      std::ostringstream echo;
      echo << "central kind=" << w.kind.name() << " window=" << n;
      return emit(g, echo.str(), json{{"count", items.size()}, {"items", arr}}, elapsed());
    }
    if (hgroup_cmd->parsed()) {
      og::PartialIso e = og::partial_iso_from_json(load_json(e_path));
      og::FiniteStructure w = structure_path.empty()
                                  ? og::FiniteStructure::pure_set(e.window)
                                  : og::structure_from_json(load_json(structure_path));
      return emit(g, "hgroup", og::to_json(og::maximal_group(e, w)), elapsed());
    }
    if (amalgam_cmd->parsed()) {
      og::PartialIso p = og::partial_iso_from_json(load_json(p_path));
      og::PartialIso x = og::partial_iso_from_json(load_json(x_path));
      og::PartialIso y = og::partial_iso_from_json(load_json(y_path));
      og::FiniteStructure w = structure_path.empty()
                                  ? og::FiniteStructure::pure_set(p.window)
                                  : og::structure_from_json(load_json(structure_path));
      auto triple = og::amalgamation_triple(p, x, y, w, g.limits);
      if (!triple) return emit(g, "amalgam-check", json{{"found", false}}, elapsed());
      json result{{"found", true},
                  {"w", og::to_json(triple->w)},
                  {"u", og::to_json(triple->u)},
                  {"v", og::to_json(triple->v)},
                  {"enlarged", og::to_json(triple->enlarged)}};
      return emit(g, "amalgam-check", result, elapsed());
    }
    if (roelcke_cmd->parsed()) {
      std::vector<int> gp = parse_perm(g_perm), hp = parse_perm(h_perm);
      if (static_cast<int>(gp.size()) != n || static_cast<int>(hp.size()) != n)
        throw og::DomainError("size_mismatch", "permutations must have length n");
      og::Rational d = og::roelcke_distance(gp, hp, g.limits);
      std::ostringstream echo;
      echo << "roelcke-dist n=" << n << " g=" << g_perm << " h=" << h_perm;
      return emit(g, echo.str(), json(d.str()), elapsed());
    }
    if (stability_cmd->parsed() || reduct_cmd->parsed() || witness_cmd->parsed()) {
      og::Formula phi = og::parse_formula(formula_text, kind, arity_x, arity_y);
      og::TypeSpec p = type_from_flag(type_x, kind, arity_x);
      og::TypeSpec q = type_from_flag(type_y, kind, arity_y);
      std::optional<og::Formula> restriction;
      if (!restrict_text.empty())
        restriction = og::parse_formula(restrict_text, kind, arity_x, arity_y);
      if (witness_cmd->parsed()) {
        int L = length > 0 ? length : g.limits.witness_length;
        auto ws = og::find_order_witness(phi, p, q, L, g.limits);
        json result{{"status", ws.witness ? "Unstable" : "Unknown"},
                    {"found", ws.witness.has_value()},
                    {"budget_exhausted", ws.budget_exhausted},
                    {"nodes", ws.nodes},
                    {"budgets", {{"length", L}, {"search_budget", g.limits.search_budget}}}};
        if (ws.witness) result["witness"] = og::to_json(*ws.witness);
        std::ostringstream echo;
        echo << "witness kind=" << kind.name() << " formula=" << og::print_formula(phi)
             << " length=" << L;
        return emit(g, echo.str(), result, elapsed());
      }
      const og::Formula* restr = restriction ? &*restriction : nullptr;
      if (reduct_cmd->parsed()) {
        og::Formula r = og::stable_reduct(phi, p, q, g.limits, restr);
        std::ostringstream echo;
        echo << "reduct kind=" << kind.name() << " formula=" << og::print_formula(phi);
        return emit(g, echo.str(), og::to_json(r), elapsed());
      }
      og::StabilityVerdict v = og::classify_stability(phi, p, q, g.limits, restr);
      json result = og::to_json(v);
      result["budgets"] = {{"witness_length", g.limits.witness_length},
                           {"config_cap", g.limits.config_cap},
                           {"search_budget", g.limits.search_budget}};
      std::ostringstream echo;
      echo << "stability kind=" << kind.name() << " formula=" << og::print_formula(phi)
           << " type-x=" << type_x << " type-y=" << type_y;
      return emit(g, echo.str(), result, elapsed());
    }
    if (couplings_cmd->parsed()) {
      std::ostringstream echo;
      echo << "couplings op=" << op;
      // matrices load from JSON or, with a .csv suffix, from rows of rationals
      auto load_coupling = [&](const std::string& path) {
        if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
          std::ifstream in(path);
          if (!in) throw og::DomainError("bad_input", "cannot open file: " + path);
          std::stringstream buffer;
          buffer << in.rdbuf();
          return og::coupling_from_csv(buffer.str());
        }
        return og::coupling_from_json(load_json(path));
      };
      auto coupling_out = [&](const og::CouplingMatrix& m) {
        return csv_output ? json{{"csv", og::coupling_to_csv(m)}} : og::to_json(m);
      };
      if (op == "compose" || op == "involution" || op == "idempotent-check") {
        og::CouplingMatrix a = load_coupling(a_path);
        if (op == "involution")
          return emit(g, echo.str(), coupling_out(og::coupling_involution(a)), elapsed());
        if (op == "idempotent-check")
          return emit(g, echo.str(), json(og::coupling_is_idempotent(a)), elapsed());
        og::CouplingMatrix b = load_coupling(b_path);
        return emit(g, echo.str(), coupling_out(og::coupling_compose(a, b)), elapsed());
      }
      if (op == "partitions") {
        auto items = og::coupling_idempotent_scan(n, g.limits);
        json arr = json::array();
        for (const auto& m : items) arr.push_back(og::to_json(m));
        echo << " n=" << n;
        return emit(g, echo.str(), json{{"count", items.size()}, {"items", arr}}, elapsed());
      }
      if (op == "central") {
        auto items = og::coupling_central_idempotents(n, g.limits);
        json arr = json::array();
        for (const auto& m : items) arr.push_back(og::to_json(m));
        echo << " n=" << n;
        return emit(g, echo.str(), json{{"count", items.size()}, {"items", arr}}, elapsed());
      }
      if (op == "assoc-check") {
        std::mt19937_64 rng(g.limits.seed);
        int failures = 0;
        for (int t = 0; t < trials; ++t) {
          og::CouplingMatrix a = random_coupling(n, rng), b = random_coupling(n, rng),
                             c = random_coupling(n, rng);
          if (!(og::coupling_compose(og::coupling_compose(a, b), c) ==
                og::coupling_compose(a, og::coupling_compose(b, c))))
            ++failures;
        }
        echo << " n=" << n << " trials=" << trials << " seed=" << g.limits.seed;
        return emit(g, echo.str(), json{{"trials", trials}, {"failures", failures}}, elapsed());
      }
      throw og::DomainError("bad_op", "unknown couplings op: " + op);
    }
    if (contractions_cmd->parsed()) {
      std::ostringstream echo;
      echo << "contractions op=" << op;
      if (op == "norm") {
        og::ContractionMatrix a = og::contraction_from_json(load_json(a_path));
        return emit(g, echo.str(), json(og::operator_norm(a, g.limits.tol)), elapsed());
      }
      if (op == "adjoint") {
        og::ContractionMatrix a = og::contraction_from_json(load_json(a_path));
        return emit(g, echo.str(), og::to_json(og::contraction_adjoint(a)), elapsed());
      }
      if (op == "compose") {
        og::ContractionMatrix a = og::contraction_from_json(load_json(a_path));
        og::ContractionMatrix b = og::contraction_from_json(load_json(b_path));
        return emit(g, echo.str(), og::to_json(og::contraction_compose(a, b, g.limits.tol)),
                    elapsed());
      }
      if (op == "project-check") {
        og::ContractionMatrix a = og::contraction_from_json(load_json(a_path));
        bool ok = og::check_projection(a, g.limits.tol);
        json result{{"is_orthogonal_projection", ok},
                    {"norm", og::operator_norm(a, g.limits.tol)}};
        return emit(g, echo.str(), result, elapsed());
      }
      if (op == "projection-scan") {
        std::mt19937_64 rng(g.limits.seed);
        int failures = 0;
        for (int t = 0; t < trials; ++t) {
          int rank = 2 + static_cast<int>(rng() % 7);  // 2..8
          int proj_rank = 1 + static_cast<int>(rng() % rank);
          og::ContractionMatrix pr = random_projection(rank, proj_rank, rng);
          if (!og::check_projection(pr, g.limits.tol)) ++failures;
        }
        echo << " trials=" << trials << " seed=" << g.limits.seed;
        return emit(g, echo.str(), json{{"trials", trials}, {"failures", failures}}, elapsed());
      }
      throw og::DomainError("bad_op", "unknown contractions op: " + op);
    }
    throw og::DomainError("bad_command", "no subcommand executed");
  } catch (const og::DomainError& e) {
    std::cout << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 1;
  }
}
