#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nestlie/bimodule.hpp"
#include "nestlie/fixtures.hpp"
#include "nestlie/io.hpp"
#include "nestlie/lie.hpp"
#include "nestlie/nest.hpp"
#include "nestlie/subspace.hpp"
#include "nestlie/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nestlie;

constexpr int kExitOk = 0;
constexpr int kExitClauseFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPreconditionFailure = 3;

struct SourceOptions {
  std::string input_path;
  bool use_example = false;
  std::vector<std::int64_t> random_params;  // N M G SEED [TRIALS]
  double tol = 0.0;
  bool tol_set = false;
  bool emit_bases = false;
  std::string output_path;
};

struct SubOpts {
  CLI::App* cmd = nullptr;
  CLI::Option* tol_opt = nullptr;
  SourceOptions src;
};

void add_common(CLI::App* sc, SubOpts& s, int random_arity) {
  sc->add_option("--input", s.src.input_path, "Instance JSON file");
  sc->add_flag("--example", s.src.use_example, "Use the built-in 5x5 worked instance");
  if (random_arity == 4)
    sc->add_option("--random", s.src.random_params,
                   "Deterministic random instance: N M G SEED")
        ->expected(4);
  else if (random_arity == 5)
    sc->add_option("--random", s.src.random_params,
                   "Deterministic random trials: N M G SEED TRIALS")
        ->expected(5);
  s.tol_opt = sc->add_option("--tol", s.src.tol, "Numerical tolerance override")
                  ->check(CLI::NonNegativeNumber);
  sc->add_flag("--bases", s.src.emit_bases, "Include basis matrices in the report");
  sc->add_option("--output", s.src.output_path, "Write output to this file (default stdout)");
}

struct LoadedInstance {
  InstanceSpec spec;
  std::optional<double> doc_tol;
};

LoadedInstance load_single(const SourceOptions& o) {
  const int sources = int(!o.input_path.empty()) + int(o.use_example) +
                      int(!o.random_params.empty());
  if (sources != 1)
    throw ParseError("exactly one of --input, --example, --random is required");
  if (o.use_example) return {paper_example(), std::nullopt};
  if (!o.random_params.empty()) {
    const auto& p = o.random_params;
    if (p[0] < 1 || p[1] < 1 || p[2] < 1 || p[3] < 0)
      throw ParseError("--random expects N >= 1, M >= 1, G >= 1, SEED >= 0");
    return {random_instance(int(p[0]), int(p[1]), int(p[2]), std::uint64_t(p[3])),
            std::nullopt};
  }
  std::ifstream in(o.input_path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file: " + o.input_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const InstanceDocument doc = parse_instance(buffer.str());
  return {to_instance_spec(doc), doc.tol};
}

double effective_tol(const SourceOptions& o, const std::optional<double>& doc_tol) {
  if (o.tol_set) return o.tol;
  if (doc_tol) return *doc_tol;
  return 0.0;
}

ordered_json make_preamble(const std::string& command, const InstanceSpec& spec,
                           double tol) {
  ordered_json r;
  r["tool"] = kToolName;
  r["version"] = kVersion;
  r["command"] = command;
  r["label"] = spec.label;
  r["nest"] = spec.nest.boundaries();
  r["n"] = spec.nest.dimension();
  r["tol"] = tol;
  if (spec.rng_seed) r["rng_seed"] = *spec.rng_seed;
  return r;
}

ordered_json basis_json(const OperatorSubspace& s) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index c = 0; c < s.dim(); ++c) arr.push_back(matrix_json(s.basis_matrix(c)));
  return arr;
}

int emit(const ordered_json& report, const SourceOptions& o, int code) {
  const std::string text = canonical_dump(report) + "\n";
  if (o.output_path.empty()) {
    std::cout << text;
    return code;
  }
  std::ofstream out(o.output_path, std::ios::binary);
  if (!out) {
    std::cerr << kToolName << ": cannot open output file: " << o.output_path << "\n";
    return kExitInputError;
  }
  out << text;
  out.flush();
  if (!out) {
    std::cerr << kToolName << ": failed writing output file: " << o.output_path << "\n";
    return kExitInputError;
  }
  return code;
}

OperatorSubspace algebra_pattern(const Nest& nest) {
  std::vector<std::pair<int, int>> units;
  for (int i = 0; i < nest.dimension(); ++i)
    for (int j = 0; j < nest.dimension(); ++j)
      if (nest.atom_of(i) <= nest.atom_of(j)) units.emplace_back(i, j);
  return OperatorSubspace::from_units(nest.dimension(), std::move(units));
}

// First commutator with an algebra unit that escapes the span, if any.
std::optional<Matrix> bracket_escape(const OperatorSubspace& l, const Nest& nest) {
  const auto units = algebra_basis(nest);
  for (Eigen::Index c = 0; c < l.dim(); ++c) {
    const Matrix b = l.basis_matrix(c);
    for (const auto& g : units) {
      const Matrix w = b * g - g * b;
      if (!contains(l, w)) return w;
    }
  }
  return std::nullopt;
}

// First one-sided product with an algebra unit that escapes the span, if any.
std::optional<Matrix> product_escape(const OperatorSubspace& m, const Nest& nest) {
  const auto units = algebra_basis(nest);
  for (Eigen::Index c = 0; c < m.dim(); ++c) {
    const Matrix b = m.basis_matrix(c);
    for (const auto& g : units) {
      const Matrix left = g * b;
      if (!contains(m, left)) return left;
      const Matrix right = b * g;
      if (!contains(m, right)) return right;
    }
  }
  return std::nullopt;
}

int run_close(const std::string& command, bool lie, const SourceOptions& o) {
  const auto loaded = load_single(o);
  const double tol = effective_tol(o, loaded.doc_tol);
  const int n = loaded.spec.nest.dimension();
  const auto seed = span_of(loaded.spec.seed_matrices, n, tol);
  const auto closed =
      lie ? lie_closure(seed, loaded.spec.nest) : bimodule_closure(seed, loaded.spec.nest);
  ordered_json r = make_preamble(command, loaded.spec, tol);
  r["seed_dimension"] = std::int64_t(seed.dim());
  r["dimension"] = std::int64_t(closed.dim());
  if (o.emit_bases) r["basis"] = basis_json(closed);
  return emit(r, o, kExitOk);
}

int run_largest_bimodule(const SourceOptions& o) {
  const auto loaded = load_single(o);
  const double tol = effective_tol(o, loaded.doc_tol);
  const int n = loaded.spec.nest.dimension();
  const auto seed = span_of(loaded.spec.seed_matrices, n, tol);
  const auto j = largest_bimodule(seed, loaded.spec.nest);
  ordered_json r = make_preamble("largest-bimodule", loaded.spec, tol);
  r["input_dimension"] = std::int64_t(seed.dim());
  r["dimension"] = std::int64_t(j.dim());
  if (o.emit_bases) r["basis"] = basis_json(j);
  return emit(r, o, kExitOk);
}

int run_phi(const SourceOptions& o) {
  const auto loaded = load_single(o);
  const double tol = effective_tol(o, loaded.doc_tol);
  const int n = loaded.spec.nest.dimension();
  const auto seed = span_of(loaded.spec.seed_matrices, n, tol);
  const auto map = phi_of(seed, loaded.spec.nest);
  ordered_json r = make_preamble("phi", loaded.spec, tol);
  r["input_dimension"] = std::int64_t(seed.dim());
  r["phi"] = map.table();
  return emit(r, o, kExitOk);
}

int run_k_decompose(const SourceOptions& o) {
  const auto loaded = load_single(o);
  const double tol = effective_tol(o, loaded.doc_tol);
  const int n = loaded.spec.nest.dimension();
  const auto seed = span_of(loaded.spec.seed_matrices, n, tol);
  ordered_json r = make_preamble("k-decompose", loaded.spec, tol);
  r["input_dimension"] = std::int64_t(seed.dim());
  if (!is_lie_closed(seed, loaded.spec.nest)) {
    r["error"] = "input span is not commutator-closed";
    if (const auto w = bracket_escape(seed, loaded.spec.nest))
      r["witness"] = matrix_json(*w);
    return emit(r, o, kExitPreconditionFailure);
  }
  const auto kd = k_decompose(seed, loaded.spec.nest);
  ordered_json dims;
  dims["k_v"] = std::int64_t(kd.k_v.dim());
  dims["k_l"] = std::int64_t(kd.k_l.dim());
  dims["k_d"] = std::int64_t(kd.k_d.dim());
  dims["k_delta"] = std::int64_t(kd.k_delta.dim());
  dims["total"] = std::int64_t(kd.k_total.dim());
  r["dimensions"] = std::move(dims);
  if (o.emit_bases) {
    ordered_json bases;
    bases["k_v"] = basis_json(kd.k_v);
    bases["k_l"] = basis_json(kd.k_l);
    bases["k_d"] = basis_json(kd.k_d);
    bases["k_delta"] = basis_json(kd.k_delta);
    bases["total"] = basis_json(kd.k_total);
    r["bases"] = std::move(bases);
  }
  return emit(r, o, kExitOk);
}

int run_d_algebra(const SourceOptions& o) {
  const auto loaded = load_single(o);
  const double tol = effective_tol(o, loaded.doc_tol);
  const int n = loaded.spec.nest.dimension();
  const auto seed = span_of(loaded.spec.seed_matrices, n, tol);
  ordered_json r = make_preamble("d-algebra", loaded.spec, tol);
  r["input_dimension"] = std::int64_t(seed.dim());
  if (!is_bimodule(seed, loaded.spec.nest)) {
    r["error"] = "input span is not a bimodule over the nest algebra";
    if (const auto w = product_escape(seed, loaded.spec.nest))
      r["witness"] = matrix_json(*w);
    return emit(r, o, kExitPreconditionFailure);
  }
  const auto dk = diagonal_algebra(seed, loaded.spec.nest);
  r["dimension"] = std::int64_t(dk.space.dim());
  ordered_json bands = ordered_json::array();
  for (const auto& band : dk.bands) {
    ordered_json b;
    b["k"] = band.k;
    b["lo"] = band.lo;
    b["hi"] = band.hi;
    bands.push_back(std::move(b));
  }
  r["bands"] = std::move(bands);
  if (o.emit_bases) r["basis"] = basis_json(dk.space);
  return emit(r, o, kExitOk);
}

ordered_json verify_trial(const InstanceSpec& spec, double tol, bool* passed_out) {
  const int n = spec.nest.dimension();
  const VerificationReport rep = verify_structure_theorem(spec.seed_matrices, spec.nest, tol);

  const auto l = lie_closure(span_of(spec.seed_matrices, n, tol), spec.nest);
  const bool band_ok = band_annihilation_check(l, spec.nest);
  const bool inside_algebra = includes(algebra_pattern(spec.nest), l);
  bool refinement_ok = true;
  if (inside_algebra) refinement_ok = lie_ideal_refinement_check(l, spec.nest);

  ordered_json t;
  t["label"] = spec.label;
  if (spec.rng_seed) t["rng_seed"] = *spec.rng_seed;
  t["nest"] = spec.nest.boundaries();
  ordered_json dims;
  dims["L"] = std::int64_t(rep.dim_l);
  dims["J"] = std::int64_t(rep.dim_j);
  dims["K_V"] = std::int64_t(rep.dim_k_v);
  dims["K_L"] = std::int64_t(rep.dim_k_l);
  dims["K_D"] = std::int64_t(rep.dim_k_d);
  dims["K_Delta"] = std::int64_t(rep.dim_k_delta);
  dims["K"] = std::int64_t(rep.dim_k);
  dims["D_K"] = std::int64_t(rep.dim_dk);
  t["dimensions"] = std::move(dims);

  ordered_json clauses;
  for (const auto& clause : rep.clauses) clauses[clause.name] = clause.passed;
  clauses["band_annihilation"] = band_ok;
  if (inside_algebra) clauses["lie_ideal_refinement"] = refinement_ok;
  t["clauses"] = std::move(clauses);

  t["j_not_included_in_k"] = !rep.j_included_in_k;
  t["l_not_included_in_k"] = !rep.l_included_in_k;

  ordered_json witnesses = ordered_json::array();
  for (const auto& clause : rep.clauses) {
    if (clause.passed) continue;
    ordered_json w;
    w["clause"] = clause.name;
    w["residual"] = clause.residual;
    if (clause.witness) w["matrix"] = matrix_json(*clause.witness);
    witnesses.push_back(std::move(w));
  }
  t["witnesses"] = std::move(witnesses);

  const bool passed = rep.all_passed && band_ok && refinement_ok;
  t["passed"] = passed;
  *passed_out = passed;
  return t;
}

int run_verify(const SourceOptions& o) {
  const int sources = int(!o.input_path.empty()) + int(o.use_example) +
                      int(!o.random_params.empty());
  if (sources != 1)
    throw ParseError("exactly one of --input, --example, --random is required");

  ordered_json r;
  r["tool"] = kToolName;
  r["version"] = kVersion;
  r["command"] = "verify";

  std::vector<InstanceSpec> instances;
  double tol = 0.0;
  if (!o.random_params.empty()) {
    const auto& p = o.random_params;
    if (p[0] < 1 || p[1] < 1 || p[2] < 1 || p[3] < 0 || p[4] < 1)
      throw ParseError("--random expects N >= 1, M >= 1, G >= 1, SEED >= 0, TRIALS >= 1");
    ordered_json params;
    params["n"] = p[0];
    params["m"] = p[1];
    params["g"] = p[2];
    params["seed"] = p[3];
    params["trials"] = p[4];
    r["random"] = std::move(params);
    tol = o.tol_set ? o.tol : 0.0;
    for (std::int64_t i = 0; i < p[4]; ++i)
      instances.push_back(random_instance(int(p[0]), int(p[1]), int(p[2]),
                                          std::uint64_t(p[3] + i)));
  } else {
    const auto loaded = load_single(o);
    tol = effective_tol(o, loaded.doc_tol);
    r["label"] = loaded.spec.label;
    r["nest"] = loaded.spec.nest.boundaries();
    r["n"] = loaded.spec.nest.dimension();
    instances.push_back(loaded.spec);
  }
  r["tol"] = tol;

  bool all_passed = true;
  ordered_json trials = ordered_json::array();
  for (const auto& spec : instances) {
    bool passed = false;
    trials.push_back(verify_trial(spec, tol, &passed));
    all_passed = all_passed && passed;
  }
  r["trials"] = std::move(trials);
  r["passed"] = all_passed;
  return emit(r, o, all_passed ? kExitOk : kExitClauseFailure);
}

int run_gen(const SourceOptions& o) {
  const auto loaded = load_single(o);
  InstanceDocument doc = from_instance_spec(loaded.spec);
  doc.tol = loaded.doc_tol;
  if (o.tol_set) doc.tol = o.tol;
  const std::string text = write_instance(doc);
  if (o.output_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(o.output_path, std::ios::binary);
  if (!out) {
    std::cerr << kToolName << ": cannot open output file: " << o.output_path << "\n";
    return kExitInputError;
  }
  out << text;
  out.flush();
  if (!out) {
    std::cerr << kToolName << ": failed writing output file: " << o.output_path << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-algebra toolkit for Lie modules over block upper-triangular algebras"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SubOpts close_lie, close_bimodule, largest, phi, kdec, dalg, verify, gen;

  close_lie.cmd = app.add_subcommand(
      "close-lie", "Smallest commutator-closed subspace containing the generators");
  add_common(close_lie.cmd, close_lie, 4);
  close_bimodule.cmd = app.add_subcommand(
      "close-bimodule", "Smallest two-sided module containing the generators");
  add_common(close_bimodule.cmd, close_bimodule, 4);
  largest.cmd = app.add_subcommand(
      "largest-bimodule", "Largest two-sided module contained in the generator span");
  add_common(largest.cmd, largest, 4);
  phi.cmd = app.add_subcommand(
      "phi", "Order homomorphism table of the generator span");
  add_common(phi.cmd, phi, 4);
  kdec.cmd = app.add_subcommand(
      "k-decompose", "Four-part bimodule envelope of a commutator-closed span");
  add_common(kdec.cmd, kdec, 4);
  dalg.cmd = app.add_subcommand(
      "d-algebra", "Diagonal constraint algebra of a two-sided module");
  add_common(dalg.cmd, dalg, 4);
  verify.cmd = app.add_subcommand(
      "verify", "Check the inclusion chain and clause set on one or many instances");
  add_common(verify.cmd, verify, 5);
  gen.cmd = app.add_subcommand("gen", "Emit a deterministic instance document");
  add_common(gen.cmd, gen, 4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  for (SubOpts* s : {&close_lie, &close_bimodule, &largest, &phi, &kdec, &dalg,
                     &verify, &gen})
    s->src.tol_set = s->tol_opt != nullptr && s->tol_opt->count() > 0;

  try {
    if (close_lie.cmd->parsed()) return run_close("close-lie", true, close_lie.src);
    if (close_bimodule.cmd->parsed())
      return run_close("close-bimodule", false, close_bimodule.src);
    if (largest.cmd->parsed()) return run_largest_bimodule(largest.src);
    if (phi.cmd->parsed()) return run_phi(phi.src);
    if (kdec.cmd->parsed()) return run_k_decompose(kdec.src);
    if (dalg.cmd->parsed()) return run_d_algebra(dalg.src);
    if (verify.cmd->parsed()) return run_verify(verify.src);
    if (gen.cmd->parsed()) return run_gen(gen.src);
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return kExitInputError;
  }
  std::cerr << kToolName << ": no subcommand given\n";
  return kExitInputError;
}
