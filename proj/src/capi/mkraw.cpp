#include "mk/mkraw.h"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "mk/lancaster.hpp"

using nlohmann::ordered_json;
using json = ordered_json;

using mk::Complex;
using mk::Composition;
using mk::CompositionChain;
using mk::Matrix;
using mk::MultiIndex;
using mk::OrthoBasis;
using mk::ProbabilityVector;
using mk::Rational;
using mk::SubsetLaw;
using mk::Surd;

struct mk_session {
  mk_backend backend = MK_BACKEND_FLOAT;
  double tol = 1e-10;
  mk::Limits limits;
  std::string output;
  std::string error;
};

struct mk_basis {
  std::string kind;
  ProbabilityVector p = ProbabilityVector::uniform(2);
  OrthoBasis<Surd> exact;
  OrthoBasis<double> fl;

  template <class T>
  const OrthoBasis<T>& get() const {
    if constexpr (std::is_same_v<T, Surd>)
      return exact;
    else
      return fl;
  }
};

struct mk_chain {
  std::string kind;
  std::string lift;
  int d = 0;
  int N = 0;
  SubsetLaw law;
  std::variant<std::monostate, CompositionChain<Surd>, CompositionChain<double>, CompositionChain<Complex>>
      chain;
  Matrix<Surd> single_exact;
  std::vector<Rational> corrected, printed;  // Metropolis only
};

namespace {

// --- encoding ---------------------------------------------------------------

json enc(const Rational& v) { return mk::to_string(v); }
json enc(const Surd& v) { return v.str(); }
json enc(double v) { return v; }
json enc(const Complex& v) { return json::array({v.real(), v.imag()}); }

template <class T>
json enc_vec(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(enc(x));
  return a;
}

template <class T>
json enc_mat(const Matrix<T>& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(enc(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

json enc_ints(const std::vector<int>& v) { return json(v); }

template <class K>
json enc_keys(const std::vector<K>& v) {
  json a = json::array();
  for (const auto& k : v) {
    if constexpr (std::is_same_v<K, Composition>)
      a.push_back(enc_ints(k.counts()));
    else
      a.push_back(enc_ints(k.degrees()));
  }
  return a;
}

std::string csv_cell(const Surd& v) { return v.str(); }
std::string csv_cell(double v) { return mk::scalar_str(v); }
std::string csv_cell(const Complex& v) { return mk::scalar_str(v); }

std::string label_of(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

/// Header row of column labels, then one labelled row per matrix row.
template <class T, class R, class C>
std::string csv_matrix(const Matrix<T>& m, const std::vector<R>& rows, const std::vector<C>& cols,
                       const std::string& corner) {
  auto key = [](const auto& k) {
    if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Composition>)
      return label_of(k.counts());
    else
      return label_of(k.degrees());
  };
  std::ostringstream out;
  out << corner;
  for (const auto& c : cols) out << ',' << key(c);
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << key(rows[i]);
    for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << csv_cell(m(i, j));
    out << '\n';
  }
  return out.str();
}

json report(const mk::DeviationReport& r) {
  return {{"passed", r.passed}, {"max_deviation", r.max_deviation}};
}

json header(const mk_session* s, const std::string& command) {
  return {{"schema", 1},
          {"command", command},
          {"backend", s->backend == MK_BACKEND_EXACT ? "exact" : "float"}};
}

void emit(mk_session* s, const json& j) { s->output = j.dump(2) + "\n"; }

// --- parsing ----------------------------------------------------------------

std::vector<Rational> parse_list(const char* text, const char* what) {
  if (text == nullptr || *text == '\0')
    mk::fail(mk::ErrorCode::invalid_argument, std::string(what) + " is required");
  return mk::parse_rational_list(text);
}

int to_int(const Rational& r) {
  if (denominator(r) != 1) mk::fail(mk::ErrorCode::parse, "expected an integer, got " + mk::to_string(r));
  return numerator(r).convert_to<int>();
}

Composition parse_composition(const char* text) {
  std::vector<int> v;
  for (const auto& r : parse_list(text, "composition")) {
    const int c = to_int(r);
    if (c < 0) mk::fail(mk::ErrorCode::parse, "composition entries must be nonnegative");
    v.push_back(c);
  }
  return Composition(v);
}

mk_status status_of(mk::ErrorCode code) { return static_cast<mk_status>(1 + static_cast<int>(code)); }

template <class F>
mk_status guard(mk_session* s, F&& f) {
  if (s == nullptr) return MK_E_NULL;
  s->error.clear();
  s->output.clear();
  try {
    f();
    return MK_OK;
  } catch (const mk::Error& e) {
    s->error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    s->error = "out of memory";
    return MK_E_CAPACITY;
  } catch (const std::exception& e) {
    s->error = e.what();
    return MK_E_INTERNAL;
  }
}

/// Calls f with a value of the session's scalar type.
template <class F>
void with_backend(const mk_session* s, F&& f) {
  if (s->backend == MK_BACKEND_EXACT)
    f(Surd{});
  else
    f(double{});
}

template <class T>
T of(const Rational& r) {
  return mk::from_rational<T>(r);
}

// --- bases ------------------------------------------------------------------

mk_basis make_basis(const std::string& kind, const char* p_text) {
  mk_basis b;
  b.kind = kind;
  if (kind == "helmert" || kind == "xu") {
    b.p = ProbabilityVector(parse_list(p_text, "p"));
    b.exact = kind == "helmert" ? mk::helmert_basis<Surd>(b.p)
                                : mk::xu_basis<Rational>(b.p).cast<Surd>();
  } else if (kind == "hadamard4") {
    b.p = ProbabilityVector::uniform(4);
    b.exact = mk::hadamard4_basis().cast<Surd>();
  } else if (kind.rfind("character:", 0) == 0) {
    const auto group = kind.substr(10);
    mk::CharacterTable table;
    if (group == "s3") {
      table = mk::s3_character_table();
    } else if (group.rfind("c2^", 0) == 0) {
      table = mk::c2n_character_table(to_int(mk::parse_rational(group.substr(3))));
    } else {
      mk::fail(mk::ErrorCode::invalid_argument, "unknown character table '" + group + "'");
    }
    const auto cb = mk::character_basis<Surd>(table);
    b.p = cb.p;
    b.exact = cb.u.cast<Surd>();
  } else {
    mk::fail(mk::ErrorCode::invalid_argument, "unknown basis kind '" + kind + "'");
  }
  b.fl = b.exact.cast<double>();
  return b;
}

template <class T>
json positivity(const mk::PositivityReport<T>& r) {
  return {{"holds", r.holds},
          {"min_value", enc(r.min_value)},
          {"witness", {r.witness[0] + 1, r.witness[1] + 1, r.witness[2] + 1}}};
}

// --- polynomial verification ------------------------------------------------

constexpr const char* kNeedsUnitWeights = "stated for a basis with unit weights";

template <class T>
json verify_polys(const mk_session* s, const mk_basis* b, int N, unsigned checks, bool& all) {
  const auto& u = b->get<T>();
  const auto& p = b->p;
  const double tol = s->tol;
  const auto t = mk::build_table(u, p, N, s->limits);
  const bool unit_weights = u.orthonormal(tol);
  json out = json::object();
  auto note = [&](const char* name, json j) {
    if (!j.value("passed", true)) all = false;
    out[name] = std::move(j);
  };

  if (checks & MK_VERIFY_ORTHOGONALITY) note("orthogonality", report(mk::orthogonality_check(t, tol)));

  if (checks & MK_VERIFY_EVALUATORS) {
    mk::DeviationReport gf, hyp, sym;
    bool hyp_ok = true;
    std::string hyp_note;
    for (const auto& n : t.indices)
      for (const auto& x : t.states) {
        const T ref = t.at(n, x);
        mk::detail::record(gf, T(mk::eval_Q_gf(n, x, u) - ref), tol);
        if (hyp_ok) {
          try {
            mk::detail::record(hyp, T(mk::eval_Q_hypergeometric(n, x, u) - ref), tol);
          } catch (const mk::Error& e) {
            if (e.code() != mk::ErrorCode::basis_convention) throw;
            hyp_ok = false;
            hyp_note = e.what();
          }
        }
        if (N <= mk::kSymmetrizedMaxN) {
          const auto z = mk::canonical_labels(x);
          mk::detail::record(sym, T(mk::eval_Q_symmetrized<T>(n, z, u) - ref), tol);
        }
      }
    json j = {{"passed", gf.passed && hyp.passed && sym.passed},
              {"generating_function", report(gf)}};
    j["hypergeometric"] = hyp_ok ? report(hyp) : json{{"skipped", hyp_note}};
    j["symmetrized"] = N <= mk::kSymmetrizedMaxN ? report(sym) : json{{"skipped", "N too large"}};
    note("evaluators", std::move(j));
  }

  if (checks & MK_VERIFY_DUALITY) {
    const auto H = mk::orthogonal_matrix(u, p);
    const mk::OrthogonalMatrixH<T> Ht{H.h.transpose()};
    const auto dh = mk::dual_table(H, N, s->limits);
    const auto dt = mk::dual_table(Ht, N, s->limits);
    const auto dual = mk::duality_check(dh, dt, tol);
    const auto [first, second] = mk::dual_orthogonality_check(dh, dt, tol);
    json j = {{"passed", dual.passed && first.passed && second.passed},
              {"duality", report(dual)},
              {"dual_orthogonality_x", report(first)},
              {"dual_orthogonality_n", report(second)}};
    if (unit_weights) {
      const auto link = mk::dual_link_check(dh, t, tol);
      j["passed"] = j["passed"].get<bool>() && link.passed;
      j["link_to_Q"] = report(link);
    } else {
      j["link_to_Q"] = {{"skipped", kNeedsUnitWeights}};
    }
    note("duality", std::move(j));
  }

  if (checks & MK_VERIFY_XU_IDENTITY) {
    const auto xu = mk::xu_basis<Rational>(p);
    mk::DeviationReport r;
    for (const auto& n : t.indices)
      for (const auto& x : t.states)
        mk::detail::record(
            r, Rational(mk::eval_xu_K(n, x, p) - mk::xu_constant(n, p, N) * mk::eval_Q_gf(n, x, xu)),
            0);
    json j = report(r);
    j["note"] = "evaluated exactly with the Xu basis of p";
    note("xu_identity", std::move(j));
  }

  if ((checks & MK_VERIFY_RECURRENCE) && !unit_weights) {
    note("recurrence", {{"skipped", kNeedsUnitWeights}});
  } else if (checks & MK_VERIFY_RECURRENCE) {
    bool corrected = true;
    int printed = 0, total = 0;
    for (int i = 1; i < u.dim(); ++i)
      for (const auto& n : t.indices) {
        if (n.order() >= N) continue;
        const auto r = mk::recurrence_check(i, n, t, tol);
        corrected = corrected && r.corrected_matches;
        printed += r.printed_matches ? 1 : 0;
        ++total;
      }
    note("recurrence", {{"passed", corrected},
                        {"cases", total},
                        {"printed_coefficients_match", printed}});
  }

  if (checks & MK_VERIFY_TRANSFORM) {
    std::vector<T> phi;
    for (int j = 0; j < u.dim(); ++j) phi.push_back(of<T>(Rational(j + 2, j + 1)));
    mk::DeviationReport r;
    for (const auto& n : t.indices) {
      const auto [lhs, rhs] = mk::transform_check<T>(phi, n, u, p, N);
      mk::detail::record(r, T(lhs - rhs), tol * std::max(1.0, mk::magnitude(rhs)));
    }
    note("transform", report(r));
  }

  if (checks & MK_VERIFY_KERNEL_INVARIANCE) {
    const auto other = mk::build_table(mk::helmert_basis<T>(p), p, N, s->limits);
    mk::DeviationReport r;
    for (int deg = 0; deg <= N; ++deg) {
      const auto a = mk::reproducing_kernel(t, deg), c = mk::reproducing_kernel(other, deg);
      for (std::size_t x = 0; x < a.rows(); ++x)
        for (std::size_t y = 0; y < a.cols(); ++y) mk::detail::record(r, T(a(x, y) - c(x, y)), tol);
    }
    json j = report(r);
    j["against"] = "helmert";
    note("kernel_invariance", std::move(j));
  }
  return out;
}

// --- chains -----------------------------------------------------------------

SubsetLaw law_for(const std::string& lift, int N, int k, const char* law_text) {
  if (lift == "single-site") return SubsetLaw::point_mass(N, N == 0 ? 0 : 1);
  if (lift == "all-sites") return SubsetLaw::point_mass(N, N);
  if (lift == "subset") return SubsetLaw::point_mass(N, k);
  if (lift == "law") {
    SubsetLaw law{parse_list(law_text, "law")};
    law.validate(N);
    return law;
  }
  mk::fail(mk::ErrorCode::invalid_argument, "unknown lift '" + lift + "'");
}

template <class T>
CompositionChain<T> lift_chain(const mk::SingleBallChain<T>& base, int N, const std::string& lift,
                               const SubsetLaw& law, const mk::Limits& limits) {
  if (lift == "single-site") return mk::single_site_chain(base, N, limits);
  if (lift == "all-sites") return mk::independent_all_chain(base, N, limits);
  return mk::subset_chain(base, N, law, limits);
}

template <class T>
Matrix<Surd> exact_of(const Matrix<T>& m) {
  return m.map([](const T& v) { return mk::scalar_cast<Surd>(v); });
}

template <class T>
mk::SingleBallChain<T> resample_chain(const ProbabilityVector& p) {
  const auto u = mk::helmert_basis<T>(p);
  return mk::lancaster_chain(std::vector<T>(p.size() - 1, T(0)), u, p);
}

template <class T>
mk::SingleBallChain<T> standard_base(mk_chain& c, const std::string& kind, const mk_chain_params& prm) {
  if (kind == "metropolis") {
    const ProbabilityVector p(parse_list(prm.p, "p"));
    c.corrected = mk::metropolis_eigenvalues(p);
    c.printed = mk::metropolis_printed_eigenvalues(p);
    c.single_exact = exact_of(mk::metropolis_kernel(p));
    return mk::metropolis_chain<T>(p);
  }
  if (kind == "lancaster") {
    const auto b = make_basis(prm.basis ? prm.basis : "helmert", prm.p);
    std::vector<T> beta;
    std::vector<Surd> sb;
    for (const auto& r : parse_list(prm.beta, "beta")) {
      beta.push_back(of<T>(r));
      sb.push_back(Surd(r));
    }
    c.single_exact = mk::lancaster_kernel(sb, b.exact, b.p).K;
    return mk::lancaster_chain(beta, b.get<T>(), b.p);
  }
  if (kind == "ehrenfest" && prm.p != nullptr && *prm.p != '\0') {
    const ProbabilityVector p(parse_list(prm.p, "p"));
    c.single_exact = exact_of(resample_chain<Surd>(p).K);
    return resample_chain<T>(p);
  }
  c.single_exact = exact_of(mk::flip_chain<Surd>().K);
  return mk::flip_chain<T>();
}

template <class T>
void build_standard(mk_chain& c, const mk_session* s, const std::string& kind,
                    const mk_chain_params& prm) {
  const auto base = standard_base<T>(c, kind, prm);
  c.d = base.dim();
  auto chain = lift_chain(base, c.N, c.lift, c.law, s->limits);
  chain.name = kind;
  c.chain = std::move(chain);
}

template <class T>
json kernel_checks(const CompositionChain<T>& ch, double tol) {
  const auto w = mk::composition_weights(ch.kernel, ch.base.p);
  const auto k = mk::check_kernel(ch.kernel.P, w, tol);
  return {{"stochastic", k.stochastic},
          {"stationary", k.stationary},
          {"reversible", k.reversible},
          {"max_deviation", k.max_deviation}};
}

template <class F>
void visit_chain(const mk_chain* c, F&& f) {
  std::visit(
      [&](const auto& ch) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(ch)>, std::monostate>) f(ch);
      },
      c->chain);
}

template <class M>
struct element;
template <class T>
struct element<Matrix<T>> {
  using type = T;
};
template <class Chain>
using scalar_of = typename element<std::decay_t<decltype(std::declval<Chain>().kernel.P)>>::type;

const char* chain_backend(const mk_chain* c) {
  switch (c->chain.index()) {
    case 1: return "exact";
    case 2: return "float";
    default: return "complex";
  }
}

template <class T>
Matrix<double> real_kernel(const Matrix<T>& m) {
  return m.map([](const T& v) { return mk::to_double(v); });
}

}  // namespace

extern "C" {

const char* mk_status_name(mk_status status) {
  if (status == MK_OK) return "ok";
  if (status == MK_E_NULL) return "null_handle";
  if (status == MK_E_INTERNAL) return "internal";
  if (status >= MK_E_CAPACITY && status <= MK_E_ARGUMENT)
    return mk::error_code_name(static_cast<mk::ErrorCode>(status - 1));
  return "unknown";
}

int mk_status_is_usage(mk_status status) {
  switch (status) {
    case MK_E_CAPACITY:
    case MK_E_DIMENSION:
    case MK_E_PROBABILITY:
    case MK_E_PARSE:
    case MK_E_UNSORTED:
    case MK_E_CHARACTER_DATA:
    case MK_E_INDEX:
    case MK_E_ARGUMENT:
    case MK_E_NULL:
      return 1;
    default:
      return 0;
  }
}

mk_session* mk_session_new(void) { return new (std::nothrow) mk_session(); }
void mk_session_free(mk_session* s) { delete s; }

mk_status mk_session_set_backend(mk_session* s, mk_backend backend) {
  if (s == nullptr) return MK_E_NULL;
  if (backend != MK_BACKEND_FLOAT && backend != MK_BACKEND_EXACT) return MK_E_ARGUMENT;
  s->backend = backend;
  return MK_OK;
}

mk_status mk_session_set_tolerance(mk_session* s, double tol) {
  if (s == nullptr) return MK_E_NULL;
  if (!(tol >= 0)) return MK_E_ARGUMENT;
  s->tol = tol;
  return MK_OK;
}

mk_status mk_session_set_capacity(mk_session* s, uint64_t cells) {
  if (s == nullptr) return MK_E_NULL;
  if (cells == 0) return MK_E_ARGUMENT;
  s->limits.max_cells = static_cast<std::size_t>(cells);
  return MK_OK;
}

const char* mk_session_output(const mk_session* s) { return s ? s->output.c_str() : ""; }
const char* mk_session_error(const mk_session* s) { return s ? s->error.c_str() : ""; }

// --- bases ------------------------------------------------------------------

mk_status mk_basis_new(mk_session* s, const char* kind, const char* p, mk_basis** out) {
  if (out == nullptr || kind == nullptr) return MK_E_NULL;
  *out = nullptr;
  return guard(s, [&] { *out = new mk_basis(make_basis(kind, p)); });
}

void mk_basis_free(mk_basis* b) { delete b; }
int mk_basis_dim(const mk_basis* b) { return b ? b->exact.dim() : 0; }

mk_status mk_basis_describe(mk_session* s, const mk_basis* b) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    json j = header(s, "basis");
    j["kind"] = b->kind;
    j["d"] = b->exact.dim();
    j["p"] = enc_vec(b->p.values());
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      const auto& u = b->get<T>();
      j["rows"] = enc_mat(u.rows());
      j["weights"] = enc_vec(u.weights());
      j["orthonormal"] = u.orthonormal(s->tol);
      const auto v = mk::validate_basis(u, b->p, s->tol);
      j["valid"] = v.passed;
    });
    emit(s, j);
  });
}

mk_status mk_basis_check(mk_session* s, const mk_basis* b, unsigned checks, int* passed) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    json j = header(s, "basis check");
    j["kind"] = b->kind;
    j["p"] = enc_vec(b->p.values());
    bool all = true;
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      const auto& u = b->get<T>();
      if (checks & MK_CHECK_VALIDATE) {
        const auto v = mk::validate_basis(u, b->p, s->tol);
        j["validate"] = {{"holds", v.passed}, {"max_deviation", v.max_deviation}};
        all = all && v.passed;
      }
      if (checks & MK_CHECK_HYPERGROUP) {
        const auto r = mk::hypergroup_check(mk::orthogonal_matrix(u, b->p), s->tol);
        j["hypergroup"] = positivity(r);
        all = all && r.holds;
      }
      if (checks & MK_CHECK_GKS) {
        const auto r = mk::gks_check(u, b->p, s->tol);
        j["gks"] = positivity(r);
        all = all && r.holds;
      }
    });
    if (checks & MK_CHECK_STRONG_MONOTONE) {
      const bool h = mk::is_strongly_monotone(b->p);
      j["strong_monotone"] = {{"holds", h}};
      all = all && h;
    }
    j["holds"] = all;
    if (passed) *passed = all ? 1 : 0;
    emit(s, j);
  });
}

// --- polynomials ------------------------------------------------------------

mk_status mk_poly_table(mk_session* s, const mk_basis* b, int N, mk_format format) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    if (N < 0) mk::fail(mk::ErrorCode::invalid_argument, "N must be >= 0");
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      const auto t = mk::build_table(b->get<T>(), b->p, N, s->limits);
      if (format == MK_FORMAT_CSV) {
        s->output = csv_matrix(t.values, t.indices, t.states, "n\\x");
        return;
      }
      json j = header(s, "poly table");
      j["basis"] = b->kind;
      j["d"] = b->exact.dim();
      j["N"] = N;
      j["p"] = enc_vec(b->p.values());
      j["indices"] = enc_keys(t.indices);
      j["states"] = enc_keys(t.states);
      j["values"] = enc_mat(t.values);
      emit(s, j);
    });
  });
}

mk_status mk_poly_verify(mk_session* s, const mk_basis* b, int N, unsigned checks, int* passed) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    if (N < 0) mk::fail(mk::ErrorCode::invalid_argument, "N must be >= 0");
    json j = header(s, "poly verify");
    j["basis"] = b->kind;
    j["d"] = b->exact.dim();
    j["N"] = N;
    j["p"] = enc_vec(b->p.values());
    j["tolerance"] = s->tol;
    bool all = true;
    with_backend(s, [&](auto tag) { j["checks"] = verify_polys<decltype(tag)>(s, b, N, checks, all); });
    j["passed"] = all;
    if (passed) *passed = all ? 1 : 0;
    emit(s, j);
  });
}

// --- chains -----------------------------------------------------------------

void mk_chain_params_init(mk_chain_params* params) {
  if (params == nullptr) return;
  *params = mk_chain_params{};
  params->N = 1;
  params->k = 1;
}

mk_status mk_chain_new(mk_session* s, const char* kind, const mk_chain_params* prm, mk_chain** out) {
  if (out == nullptr || kind == nullptr || prm == nullptr) return MK_E_NULL;
  *out = nullptr;
  return guard(s, [&] {
    auto c = std::make_unique<mk_chain>();
    const std::string k = kind;
    c->kind = k;
    c->N = prm->N;
    if (c->N < 0) mk::fail(mk::ErrorCode::invalid_argument, "N must be >= 0");
    c->lift = prm->lift ? prm->lift : "single-site";
    if (k == "ehrenfest" || k == "lightbulb") c->lift = "subset";
    c->law = law_for(c->lift, c->N, prm->k, prm->law);

    if (k == "metropolis" || k == "lancaster" || k == "ehrenfest" || k == "lightbulb") {
      with_backend(s, [&](auto tag) { build_standard<decltype(tag)>(*c, s, k, *prm); });
    } else if (k == "hoare-rahmann") {
      const auto hr = mk::hoare_rahmann_kernel(parse_list(prm->alpha, "alpha"),
                                               parse_list(prm->theta, "theta"));
      const auto base = mk::reversible_eigensystem(hr.K, hr.p, "hoare-rahmann");
      c->d = base.dim();
      c->single_exact = exact_of(hr.K);
      c->chain = lift_chain(base, c->N, c->lift, c->law, s->limits);
    } else if (k == "circulant") {
      const auto q = parse_list(prm->q, "q");
      const auto base = mk::circulant_chain_base(q);
      c->d = base.dim();
      c->single_exact = exact_of(mk::circulant_kernel(q));
      c->chain = lift_chain(base, c->N, c->lift, c->law, s->limits);
    } else {
      mk::fail(mk::ErrorCode::invalid_argument, "unknown chain kind '" + k + "'");
    }
    *out = c.release();
  });
}

void mk_chain_free(mk_chain* c) { delete c; }

size_t mk_chain_state_count(const mk_chain* c) {
  if (c == nullptr) return 0;
  size_t n = 0;
  visit_chain(c, [&](const auto& ch) { n = ch.kernel.states.size(); });
  return n;
}

mk_status mk_chain_describe(mk_session* s, const mk_chain* c, mk_format format) {
  if (c == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    visit_chain(c, [&](const auto& ch) {
      if (format == MK_FORMAT_CSV) {
        s->output = csv_matrix(ch.kernel.P, ch.kernel.states, ch.kernel.states, "x\\y");
        return;
      }
      json j = {{"schema", 1}, {"command", "chain build"}, {"backend", chain_backend(c)}};
      j["kind"] = c->kind;
      j["d"] = c->d;
      j["N"] = c->N;
      j["lift"] = c->lift;
      j["subset_law"] = enc_vec(c->law.size_probs);
      j["p"] = enc_vec(ch.base.p.values());
      j["single_ball"] = {{"kernel", enc_mat(ch.base.K)}, {"eigenvalues", enc_vec(ch.base.rho)}};
      if (!c->corrected.empty())
        j["single_ball"]["printed_closed_form"] = enc_vec(c->printed);
      j["states"] = enc_keys(ch.kernel.states);
      j["indices"] = enc_keys(ch.indices);
      j["eigenvalues"] = enc_vec(ch.lambda);
      j["stationary"] = enc_vec(mk::composition_weights(ch.kernel, ch.base.p));
      j["kernel"] = enc_mat(ch.kernel.P);
      j["checks"] = kernel_checks(ch, s->tol);
      emit(s, j);
    });
  });
}

mk_status mk_chain_verify_eigen(mk_session* s, const mk_chain* c, int* passed) {
  if (c == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    visit_chain(c, [&](const auto& ch) {
      const auto rep = mk::verify_eigen(ch, s->tol);
      const auto rec = mk::spectral_reconstruction_check(ch, s->tol);
      const auto kc = kernel_checks(ch, s->tol);
      json rows = json::array();
      for (const auto& r : rep.rows)
        rows.push_back({{"n", enc_ints(r.n.degrees())},
                        {"lambda", enc(r.lambda)},
                        {"right_residual", r.right},
                        {"left_residual", r.left}});
      json j = {{"schema", 1}, {"command", "chain verify-eigen"}, {"backend", chain_backend(c)}};
      j["kind"] = c->kind;
      j["d"] = c->d;
      j["N"] = c->N;
      j["lift"] = c->lift;
      j["tolerance"] = s->tol;
      j["eigenpairs"] = std::move(rows);
      j["max_residual"] = rep.max_residual;
      j["spectral_reconstruction"] = report(rec);
      j["kernel"] = kc;
      if (!c->corrected.empty()) {
        json cmp = json::array();
        for (std::size_t l = 0; l < c->corrected.size(); ++l)
          cmp.push_back({{"l", l},
                         {"exact", enc(c->corrected[l])},
                         {"printed_closed_form", enc(c->printed[l])},
                         {"agree", c->corrected[l] == c->printed[l]}});
        j["single_ball_spectrum"] = std::move(cmp);
      }
      const bool ok = rep.passed && rec.passed && kc["stationary"].template get<bool>();
      j["passed"] = ok;
      if (passed) *passed = ok ? 1 : 0;
      emit(s, j);
    });
  });
}

mk_status mk_chain_lump_check(mk_session* s, const mk_chain* c, int* passed) {
  if (c == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    const auto lifted = mk::lift_kernel(c->single_exact, c->N, c->law, s->limits);
    const auto lumped = mk::dynkin_lump(mk::sequence_subset_kernel(c->single_exact, c->N, c->law));
    const bool exact_equal = lifted.P == lumped.P && lifted.states == lumped.states;
    mk::DeviationReport own;
    visit_chain(c, [&](const auto& ch) {
      using T = scalar_of<decltype(ch)>;
      for (std::size_t x = 0; x < lifted.states.size(); ++x)
        for (std::size_t y = 0; y < lifted.states.size(); ++y) {
          if constexpr (std::is_same_v<T, Surd>)
            mk::detail::record(own, Surd(ch.kernel.P(x, y) - lumped.P(x, y)), 0);
          else
            mk::detail::record(own, T(ch.kernel.P(x, y) - T(mk::to_double(lumped.P(x, y)))), s->tol);
        }
    });
    json j = {{"schema", 1}, {"command", "chain lump-check"}, {"backend", chain_backend(c)}};
    j["kind"] = c->kind;
    j["d"] = c->d;
    j["N"] = c->N;
    j["lift"] = c->lift;
    j["states"] = lifted.states.size();
    j["composition_formula_equals_lumped"] = exact_equal;
    j["chain_kernel_vs_lumped"] = report(own);
    const bool ok = exact_equal && own.passed;
    j["passed"] = ok;
    if (passed) *passed = ok ? 1 : 0;
    emit(s, j);
  });
}

mk_status mk_chain_simulate(mk_session* s, const mk_chain* c, uint64_t steps, uint64_t seed,
                            size_t start, const char* trace_path, double* tv_distance) {
  if (c == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    visit_chain(c, [&](const auto& ch) {
      const auto P = real_kernel(ch.kernel.P);
      const auto target = mk::composition_weights(ch.kernel, ch.base.p.values().size() ? ch.base.p : ch.base.p);
      std::vector<double> tg;
      for (const auto& v : target) tg.push_back(mk::to_double(v));
      std::ofstream trace;
      if (trace_path != nullptr) {
        trace.open(trace_path, std::ios::binary | std::ios::trunc);
        if (!trace) mk::fail(mk::ErrorCode::invalid_argument, std::string("cannot open ") + trace_path);
      }
      std::function<void(std::uint64_t, std::size_t)> sink;
      if (trace_path != nullptr)
        sink = [&](std::uint64_t t, std::size_t x) {
          trace << "{\"step\":" << t << ",\"state\":[";
          const auto& counts = ch.kernel.states[x].counts();
          for (std::size_t i = 0; i < counts.size(); ++i) trace << (i ? "," : "") << counts[i];
          trace << "]}\n";
        };
      const auto r = mk::simulate(P, tg, start, steps, seed, sink);
      json j = {{"schema", 1}, {"command", "chain simulate"}, {"backend", chain_backend(c)}};
      j["kind"] = c->kind;
      j["d"] = c->d;
      j["N"] = c->N;
      j["lift"] = c->lift;
      j["steps"] = steps;
      j["seed"] = seed;
      j["start"] = enc_ints(ch.kernel.states[start].counts());
      j["final_state"] = enc_ints(ch.kernel.states[r.final_state].counts());
      j["states"] = enc_keys(ch.kernel.states);
      j["visits"] = r.visits;
      j["empirical"] = r.empirical;
      j["target"] = tg;
      j["tv_distance"] = r.tv_distance;
      if (trace_path != nullptr) j["trace"] = trace_path;
      if (tv_distance) *tv_distance = r.tv_distance;
      emit(s, j);
    });
  });
}

// --- Lancaster ----------------------------------------------------------------

mk_status mk_lancaster_build(mk_session* s, const mk_basis* b, int N, const char* rho,
                             mk_format format, int* positive) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    if (N < 0) mk::fail(mk::ErrorCode::invalid_argument, "N must be >= 0");
    const auto count = mk::enumerate_multi_indices(b->exact.dim() - 1, N, s->limits).size();
    auto r = parse_list(rho, "rho");
    if (r.size() + 1 == count) r.insert(r.begin(), Rational(1));
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      std::vector<T> rv;
      for (const auto& v : r) rv.push_back(of<T>(v));
      const auto bt = mk::bivariate_from_correlations(rv, b->get<T>(), b->p, N, s->tol, s->limits);
      if (positive) *positive = bt.positive ? 1 : 0;
      if (format == MK_FORMAT_CSV) {
        s->output = csv_matrix(bt.P, bt.states, bt.states, "x\\y");
        return;
      }
      json j = header(s, "lancaster build");
      j["basis"] = b->kind;
      j["d"] = bt.d;
      j["N"] = N;
      j["p"] = enc_vec(b->p.values());
      j["indices"] = enc_keys(bt.indices);
      j["rho"] = enc_vec(bt.rho);
      j["states"] = enc_keys(bt.states);
      j["table"] = enc_mat(bt.P);
      j["positive"] = bt.positive;
      j["min_entry"] = enc(bt.min_entry);
      j["witness"] = {bt.witness[0] + 1, bt.witness[1] + 1};
      emit(s, j);
    });
  });
}

mk_status mk_lancaster_from_chain(mk_session* s, const mk_chain* c, int* positive) {
  if (c == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    visit_chain(c, [&](const auto& ch) {
      using T = scalar_of<decltype(ch)>;
      if constexpr (std::is_same_v<T, Complex>) {
        mk::fail(mk::ErrorCode::reversibility_violation,
                 "complex eigen-data: the chain is not treated as reversible");
      } else {
        const auto bt = mk::bivariate_from_kernel(ch.kernel, ch.base.alpha, ch.base.p, s->tol);
        mk::DeviationReport match;
        for (std::size_t a = 0; a < bt.rho.size(); ++a)
          mk::detail::record(match, T(bt.rho[a] - ch.lambda[a]), s->tol);
        json j = {{"schema", 1}, {"command", "lancaster build"}, {"backend", chain_backend(c)}};
        j["from_chain"] = c->kind;
        j["d"] = bt.d;
        j["N"] = bt.N;
        j["lift"] = c->lift;
        j["indices"] = enc_keys(bt.indices);
        j["rho"] = enc_vec(bt.rho);
        j["eigenvalues"] = enc_vec(ch.lambda);
        j["rho_matches_eigenvalues"] = report(match);
        j["states"] = enc_keys(bt.states);
        j["table"] = enc_mat(bt.P);
        j["positive"] = bt.positive;
        j["min_entry"] = enc(bt.min_entry);
        j["passed"] = match.passed;
        if (positive) *positive = bt.positive && match.passed ? 1 : 0;
        emit(s, j);
      }
    });
  });
}

mk_status mk_lancaster_extract(mk_session* s, const mk_basis* b, int N, const char* table_csv) {
  if (b == nullptr || table_csv == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    std::vector<std::vector<std::string>> cells;
    std::istringstream in(table_csv);
    std::string line;
    while (std::getline(in, line)) {
      std::string cleaned;
      for (char ch : line)
        if (ch != ' ' && ch != '\t' && ch != '\r') cleaned += ch;
      if (cleaned.empty() || cleaned[0] == '#') continue;
      std::vector<std::string> row;
      std::istringstream fields(cleaned);
      std::string cell;
      while (std::getline(fields, cell, ',')) row.push_back(cell);
      cells.push_back(std::move(row));
    }
    // tables written by lancaster build carry a header row and a label column
    const bool labelled = !cells.empty() && !cells[0].empty() && cells[0][0].find('\\') != std::string::npos;
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = labelled ? 1 : 0; i < cells.size(); ++i) {
      std::vector<Rational> row;
      for (std::size_t j = labelled ? 1 : 0; j < cells[i].size(); ++j)
        row.push_back(mk::parse_rational(cells[i][j]));
      rows.push_back(std::move(row));
    }
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      Matrix<T> P(rows.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
          mk::fail(mk::ErrorCode::dimension_mismatch,
                   "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) P(i, j) = of<T>(rows[i][j]);
      }
      const double tol = std::max(s->tol, 1e-12);
      const auto r = mk::extract_correlations(P, b->get<T>(), b->p, N, tol, s->limits);
      json j = header(s, "lancaster extract");
      j["basis"] = b->kind;
      j["d"] = b->exact.dim();
      j["N"] = N;
      j["indices"] = enc_keys(r.indices);
      j["rho"] = enc_vec(r.rho);
      j["max_cross_correlation"] = r.max_cross;
      emit(s, j);
    });
  });
}

mk_status mk_lancaster_check(mk_session* s, const mk_basis* b, int N, int* holds) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    if (N < 1) mk::fail(mk::ErrorCode::invalid_argument, "N must be >= 1");
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      const auto& u = b->get<T>();
      const auto base = mk::hypergroup_check_basis(u, u.dim() - 1, s->tol);
      const auto survey = mk::triple_sum_survey(mk::diamond_table(u, b->p, N, s->limits), s->tol);
      json j = header(s, "lancaster check");
      j["basis"] = b->kind;
      j["d"] = u.dim();
      j["N"] = N;
      j["p"] = enc_vec(b->p.values());
      j["base_hypergroup"] = positivity(base);
      j["triple_sums"] = positivity(survey);
      j["agree"] = base.holds == survey.holds;
      j["holds"] = survey.holds;
      if (holds) *holds = survey.holds ? 1 : 0;
      emit(s, j);
    });
  });
}

mk_status mk_lancaster_linearize(mk_session* s, const mk_basis* b, const char* x, const char* y,
                                 int* passed) {
  if (b == nullptr) return MK_E_NULL;
  return guard(s, [&] {
    const auto cx = parse_composition(x), cy = parse_composition(y);
    if (cx.total() != cy.total()) mk::fail(mk::ErrorCode::dimension_mismatch, "x and y need the same N");
    with_backend(s, [&](auto tag) {
      using T = decltype(tag);
      const auto& u = b->get<T>();
      const auto base = mk::hypergroup_check_basis(u, u.dim() - 1, s->tol);
      if (!base.holds)
        mk::fail(mk::ErrorCode::hypergroup_precondition,
                 "the base fails the hypergroup check, so the linearization law can be negative");
      const auto dt = mk::diamond_table(u, b->p, cx.total(), s->limits);
      const auto ix = dt.table.col_of.at(cx), iy = dt.table.col_of.at(cy);
      const auto phi = mk::linearization_distribution(dt, ix, iy);
      const auto r = mk::linearization_check(dt, ix, iy, phi, s->tol);
      json j = header(s, "lancaster linearize");
      j["basis"] = b->kind;
      j["x"] = enc_ints(cx.counts());
      j["y"] = enc_ints(cy.counts());
      j["states"] = enc_keys(dt.table.states);
      j["phi"] = enc_vec(phi);
      j["probability"] = r.probability;
      j["product_formula"] = {{"passed", r.identity_holds},
                              {"max_deviation", r.max_identity_deviation}};
      const bool ok = r.probability && r.identity_holds;
      j["passed"] = ok;
      if (passed) *passed = ok ? 1 : 0;
      emit(s, j);
    });
  });
}

}  // extern "C"
