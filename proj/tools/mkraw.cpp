// Command-line front end over the C API in mk/mkraw.h.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mk/mkraw.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Config {
  std::string backend = "float";
  double tol = 1e-10;
  std::uint64_t capacity = 10'000'000;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
};

struct BasisArgs {
  std::string kind = "helmert";
  std::string p;
  int d = 0;
  std::string group = "s3";
};

struct ChainArgs {
  std::string kind;
  std::string p, q, alpha, theta, beta, basis, law, lift;
  int N = 1;
  int k = 1;
};

using Session = std::unique_ptr<mk_session, decltype(&mk_session_free)>;
using Basis = std::unique_ptr<mk_basis, decltype(&mk_basis_free)>;
using Chain = std::unique_ptr<mk_chain, decltype(&mk_chain_free)>;

struct Failure {
  mk_status status;
  std::string message;
};

void check(mk_session* s, mk_status st) {
  if (st != MK_OK) throw Failure{st, mk_session_error(s)};
}

const char* opt(const std::string& v) { return v.empty() ? nullptr : v.c_str(); }

Session open_session(const Config& cfg) {
  Session s(mk_session_new(), mk_session_free);
  if (!s) throw Failure{MK_E_INTERNAL, "cannot allocate a session"};
  check(s.get(), mk_session_set_backend(s.get(), cfg.backend == "exact" ? MK_BACKEND_EXACT
                                                                        : MK_BACKEND_FLOAT));
  check(s.get(), mk_session_set_tolerance(s.get(), cfg.tol));
  check(s.get(), mk_session_set_capacity(s.get(), cfg.capacity));
  return s;
}

/// "helmert" with p, or the uniform law on d points when only -d is given.
std::string resolve_p(const BasisArgs& a) {
  if (!a.p.empty() || a.d <= 0) return a.p;
  std::string p;
  for (int i = 0; i < a.d; ++i) p += (i ? ",1/" : "1/") + std::to_string(a.d);
  return p;
}

Basis open_basis(mk_session* s, const BasisArgs& a) {
  std::string kind = a.kind;
  if (kind == "character") kind += ":" + a.group;
  mk_basis* raw = nullptr;
  const std::string p = resolve_p(a);
  check(s, mk_basis_new(s, kind.c_str(), opt(p), &raw));
  Basis b(raw, mk_basis_free);
  if (a.d > 0 && mk_basis_dim(b.get()) != a.d)
    throw Failure{MK_E_DIMENSION, "-d " + std::to_string(a.d) + " does not match the basis dimension " +
                                      std::to_string(mk_basis_dim(b.get()))};
  return b;
}

Chain open_chain(mk_session* s, const ChainArgs& a) {
  mk_chain_params prm;
  mk_chain_params_init(&prm);
  prm.p = opt(a.p);
  prm.q = opt(a.q);
  prm.alpha = opt(a.alpha);
  prm.theta = opt(a.theta);
  prm.beta = opt(a.beta);
  prm.basis = opt(a.basis);
  prm.law = opt(a.law);
  prm.lift = opt(a.lift);
  prm.N = a.N;
  prm.k = a.k;
  mk_chain* raw = nullptr;
  check(s, mk_chain_new(s, a.kind.c_str(), &prm, &raw));
  return Chain(raw, mk_chain_free);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{MK_E_ARGUMENT, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_basis_options(CLI::App* app, BasisArgs& a, bool with_kind) {
  app->add_option("-p,--p", a.p, "probability vector, e.g. 1/2,1/3,1/6");
  app->add_option("-d,--dim", a.d, "number of categories (uniform p when -p is absent)");
  if (with_kind)
    app->add_option("--basis", a.kind, "helmert, xu, character or hadamard4")
        ->check(CLI::IsMember({"helmert", "xu", "character", "hadamard4"}));
  app->add_option("--group", a.group, "character table: s3 or c2^n");
}

void add_chain_options(CLI::App* app, ChainArgs& a) {
  app->add_option("kind", a.kind, "metropolis, ehrenfest, hoare-rahmann, circulant, lightbulb, lancaster")
      ->required()
      ->check(CLI::IsMember(
          {"metropolis", "ehrenfest", "hoare-rahmann", "circulant", "lightbulb", "lancaster"}));
  app->add_option("-p,--p", a.p, "stationary law (metropolis, lancaster, ehrenfest resampling)");
  app->add_option("--q", a.q, "circulant step law q_0..q_{d-1}");
  app->add_option("--alpha", a.alpha, "hoare-rahmann holding probabilities");
  app->add_option("--theta", a.theta, "hoare-rahmann refresh law");
  app->add_option("--beta", a.beta, "lancaster eigenvalues beta_1..beta_{d-1}");
  app->add_option("--basis", a.basis, "lancaster basis kind");
  app->add_option("--law", a.law, "subset-size law over 0..N for --lift law");
  app->add_option("--lift", a.lift, "single-site, all-sites, subset or law")
      ->check(CLI::IsMember({"single-site", "all-sites", "subset", "law"}));
  app->add_option("-N,--balls", a.N, "number of balls");
  app->add_option("-k,--subset", a.k, "subset size (subset lift, ehrenfest, lightbulb)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate Krawtchouk polynomials: construction, verification and chains", "mkraw"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  if (const char* env = std::getenv("MK_CAPACITY")) {
    try {
      cfg.capacity = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: MK_CAPACITY must be a positive integer\n";
      return kExitUsage;
    }
  }
  app.add_option("--backend", cfg.backend, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--tol", cfg.tol, "tolerance for float comparisons");
  app.add_option("--capacity", cfg.capacity, "maximum enumerated states or table cells (env MK_CAPACITY)");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", cfg.output, "write the document to a file instead of stdout");

  BasisArgs ba;
  ChainArgs ca;
  int N = 1;

  // basis
  auto* basis = app.add_subcommand("basis", "construct or check an orthogonal basis");
  basis->require_subcommand(1);
  std::string basis_kind;
  for (const char* k : {"helmert", "xu", "character", "hadamard4"}) {
    auto* sub = basis->add_subcommand(k, std::string("describe the ") + k + " basis");
    add_basis_options(sub, ba, false);
    sub->callback([&basis_kind, k] { basis_kind = k; });
  }
  auto* bcheck = basis->add_subcommand("check", "positivity checks on a basis");
  add_basis_options(bcheck, ba, true);
  bool c_validate = false, c_hyper = false, c_gks = false, c_mono = false;
  bcheck->add_flag("--validate", c_validate, "orthogonality and normalization of the rows");
  bcheck->add_flag("--hypergroup", c_hyper, "hypergroup property of the orthogonal matrix");
  bcheck->add_flag("--gks", c_gks, "Gasper-type positivity of the basis");
  bcheck->add_flag("--strong-monotone", c_mono, "p_k >= p_{k+1} + ... + p_d");

  // poly
  auto* poly = app.add_subcommand("poly", "polynomial tables and identities");
  poly->require_subcommand(1);
  auto* ptable = poly->add_subcommand("table", "values Q_n(x) for |n| <= N over all compositions");
  add_basis_options(ptable, ba, true);
  ptable->add_option("-N,--balls", N, "number of balls");
  auto* pverify = poly->add_subcommand("verify", "verify polynomial identities");
  add_basis_options(pverify, ba, true);
  pverify->add_option("-N,--balls", N, "number of balls");
  bool v_orth = false, v_dual = false, v_xu = false, v_rec = false, v_tr = false, v_ker = false,
       v_eval = false;
  pverify->add_flag("--orthogonality", v_orth, "Gram matrix under the multinomial law");
  pverify->add_flag("--duality", v_dual, "duality and dual orthogonality");
  pverify->add_flag("--xu-identity", v_xu, "Xu polynomials as scaled Q_n");
  pverify->add_flag("--recurrence", v_rec, "three-term recurrence in each x_i");
  pverify->add_flag("--transform", v_tr, "generating transform against a product test function");
  pverify->add_flag("--kernel-invariance", v_ker, "reproducing kernels agree with the Helmert basis");
  pverify->add_flag("--evaluators", v_eval, "generating-function, hypergeometric and symmetrized forms");

  // chain
  auto* chain = app.add_subcommand("chain", "composition Markov chains");
  chain->require_subcommand(1);
  auto* cbuild = chain->add_subcommand("build", "kernel, spectrum and stationary law");
  add_chain_options(cbuild, ca);
  auto* cverify = chain->add_subcommand("verify-eigen", "eigenfunction residuals and reconstruction");
  add_chain_options(cverify, ca);
  bool lump = false;
  cverify->add_flag("--lump", lump, "also compare with the lumped chain on sequences (d*N <= 12)");
  auto* csim = chain->add_subcommand("simulate", "seeded trajectory and empirical law");
  add_chain_options(csim, ca);
  std::uint64_t steps = 1'000'000;
  std::size_t start = 0;
  std::string trace;
  csim->add_option("--steps", steps, "number of steps");
  csim->add_option("--start", start, "0-based index of the initial composition");
  csim->add_option("--trace", trace, "write every visited state as JSON lines");

  // lancaster
  auto* lan = app.add_subcommand("lancaster", "bivariate Lancaster distributions");
  lan->require_subcommand(1);
  auto* lbuild = lan->add_subcommand("build", "joint law from correlations or from a chain");
  add_basis_options(lbuild, ba, true);
  lbuild->add_option("-N,--balls", N, "number of balls");
  std::string rho, from_chain;
  lbuild->add_option("--rho", rho, "correlations in graded multi-index order (rho_0 optional)");
  lbuild->add_option("--from-chain", from_chain, "single-site lift of this chain kind instead of --rho");
  lbuild->add_option("--q", ca.q, "circulant step law for --from-chain");
  lbuild->add_option("--alpha", ca.alpha, "hoare-rahmann holding probabilities");
  lbuild->add_option("--theta", ca.theta, "hoare-rahmann refresh law");
  lbuild->add_option("--beta", ca.beta, "lancaster eigenvalues");
  lbuild->add_option("--lift", ca.lift, "lift of the chain");
  lbuild->add_option("-k,--subset", ca.k, "subset size");
  auto* lextract = lan->add_subcommand("extract", "correlations of a contingency table (CSV)");
  add_basis_options(lextract, ba, true);
  lextract->add_option("-N,--balls", N, "number of balls");
  std::string table;
  lextract->add_option("--table", table, "CSV file with S rows of S entries")->required();
  auto* lcheck = lan->add_subcommand("check", "triple-sum positivity against the base check");
  add_basis_options(lcheck, ba, true);
  lcheck->add_option("-N,--balls", N, "number of balls");
  auto* llin = lan->add_subcommand("linearize", "linearization law of Q(x)Q(y)");
  add_basis_options(llin, ba, true);
  std::string lx, ly;
  llin->add_option("-x", lx, "composition, e.g. 2,1,0")->required();
  llin->add_option("-y", ly, "composition with the same total")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  const mk_format fmt = cfg.format == "csv" ? MK_FORMAT_CSV : MK_FORMAT_JSON;
  int verdict = 1;
  try {
    Session session = open_session(cfg);
    mk_session* s = session.get();
    std::string merged;

    if (basis->parsed()) {
      if (bcheck->parsed()) {
        unsigned checks = (c_validate ? MK_CHECK_VALIDATE : 0u) | (c_hyper ? MK_CHECK_HYPERGROUP : 0u) |
                          (c_gks ? MK_CHECK_GKS : 0u) | (c_mono ? MK_CHECK_STRONG_MONOTONE : 0u);
        if (checks == 0)
          checks = MK_CHECK_VALIDATE | MK_CHECK_HYPERGROUP | MK_CHECK_GKS | MK_CHECK_STRONG_MONOTONE;
        const auto b = open_basis(s, ba);
        check(s, mk_basis_check(s, b.get(), checks, &verdict));
      } else {
        ba.kind = basis_kind;
        const auto b = open_basis(s, ba);
        check(s, mk_basis_describe(s, b.get()));
      }
    } else if (ptable->parsed()) {
      const auto b = open_basis(s, ba);
      check(s, mk_poly_table(s, b.get(), N, fmt));
    } else if (pverify->parsed()) {
      unsigned checks = (v_orth ? MK_VERIFY_ORTHOGONALITY : 0u) | (v_dual ? MK_VERIFY_DUALITY : 0u) |
                        (v_xu ? MK_VERIFY_XU_IDENTITY : 0u) | (v_rec ? MK_VERIFY_RECURRENCE : 0u) |
                        (v_tr ? MK_VERIFY_TRANSFORM : 0u) | (v_ker ? MK_VERIFY_KERNEL_INVARIANCE : 0u) |
                        (v_eval ? MK_VERIFY_EVALUATORS : 0u);
      if (checks == 0) checks = 127u;
      const auto b = open_basis(s, ba);
      check(s, mk_poly_verify(s, b.get(), N, checks, &verdict));
    } else if (cbuild->parsed()) {
      const auto c = open_chain(s, ca);
      check(s, mk_chain_describe(s, c.get(), fmt));
    } else if (cverify->parsed()) {
      const auto c = open_chain(s, ca);
      check(s, mk_chain_verify_eigen(s, c.get(), &verdict));
      if (lump) {
        auto doc = nlohmann::ordered_json::parse(mk_session_output(s));
        int lumped = 0;
        check(s, mk_chain_lump_check(s, c.get(), &lumped));
        doc["lump_check"] = nlohmann::ordered_json::parse(mk_session_output(s));
        doc["passed"] = verdict && lumped;
        verdict = verdict && lumped;
        merged = doc.dump(2) + "\n";
      }
    } else if (csim->parsed()) {
      const auto c = open_chain(s, ca);
      double tv = 0;
      check(s, mk_chain_simulate(s, c.get(), steps, cfg.seed, start, opt(trace), &tv));
    } else if (lbuild->parsed()) {
      if (!from_chain.empty()) {
        ca.kind = from_chain;
        ca.p = resolve_p(ba);
        ca.basis = ba.kind;
        ca.N = N;
        const auto c = open_chain(s, ca);
        check(s, mk_lancaster_from_chain(s, c.get(), &verdict));
      } else {
        const auto b = open_basis(s, ba);
        check(s, mk_lancaster_build(s, b.get(), N, rho.c_str(), fmt, &verdict));
      }
    } else if (lextract->parsed()) {
      const auto b = open_basis(s, ba);
      check(s, mk_lancaster_extract(s, b.get(), N, read_file(table).c_str()));
    } else if (lcheck->parsed()) {
      const auto b = open_basis(s, ba);
      check(s, mk_lancaster_check(s, b.get(), N, &verdict));
    } else if (llin->parsed()) {
      const auto b = open_basis(s, ba);
      check(s, mk_lancaster_linearize(s, b.get(), lx.c_str(), ly.c_str(), &verdict));
    }

    const std::string doc = merged.empty() ? std::string(mk_session_output(s)) : merged;
    if (cfg.output.empty()) {
      std::fwrite(doc.data(), 1, doc.size(), stdout);
    } else {
      std::ofstream out(cfg.output, std::ios::binary);
      if (!out) throw Failure{MK_E_ARGUMENT, "cannot write " + cfg.output};
      out << doc;
    }
  } catch (const Failure& f) {
    std::cerr << "error [" << mk_status_name(f.status) << "]: " << f.message << "\n";
    if (mk_status_is_usage(f.status)) {
      std::cerr << "run with --help for usage\n";
      return kExitUsage;
    }
    return kExitFail;
  }
  return verdict ? kExitPass : kExitFail;
}
