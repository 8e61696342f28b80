#include "arxtrail/arxtrail.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "arxtrail/config.hpp"
#include "arxtrail/oracle.hpp"
#include "arxtrail/search.hpp"

using namespace arxtrail;

struct arxt_context {
  Config cfg;
  std::string error;
  arxt_log_fn log = nullptr;
  void* log_user = nullptr;
};

struct arxt_trail {
  Trail t;
};

namespace {

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
arxt_status guard(arxt_context* ctx, F&& f) {
  try {
    f();
    if (ctx) ctx->error.clear();
    return ARXT_OK;
  } catch (const Error& e) {
    if (ctx) ctx->error = e.what();
    return static_cast<arxt_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    if (ctx) ctx->error = std::string("JSON error: ") + e.what();
    return ARXT_E_PARSE;
  } catch (const std::exception& e) {
    if (ctx) ctx->error = e.what();
    return ARXT_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

DiffTriple triple(unsigned n, const char* dx, const char* dy, const char* dz) {
  need(dx, "dx");
  need(dy, "dy");
  need(dz, "dz");
  check_width(n);
  return DiffTriple(n, parse_word(dx, n), parse_word(dy, n), parse_word(dz, n));
}

std::string relation_text(const std::optional<Relation>& r, unsigned i) { return r ? r->describe(i) : ""; }

nlohmann::json xdp_json(const DiffTriple& t) {
  nlohmann::json j;
  const unsigned n = t.n;
  j["n"] = n;
  j["dx"] = format_bin(t.dx, n);
  j["dy"] = format_bin(t.dy, n);
  j["dz"] = format_bin(t.dz, n);
  j["dc"] = format_bin(carry_diff(t), n);
  j["valid"] = xdp_valid(t);
  auto w = xdp_weight(t);
  j["weight"] = w ? nlohmann::json(*w) : nlohmann::json(nullptr);
  nlohmann::json bits = nlohmann::json::array();
  for (unsigned i = 0; i + 1 < n; ++i) {
    BitConstraint b = classify_bit(t, i);
    bits.push_back({{"bit", i},
                    {"row", row_name(b.row)},
                    {"input", relation_text(b.input_relation, i)},
                    {"output", relation_text(b.output_relation, i)},
                    {"carry", relation_text(b.carry_relation, i)},
                    {"weight", b.weight_bit}});
  }
  j["bits"] = bits;
  if (w) {
    nlohmann::json oc = nlohmann::json::array();
    for (const auto& d : output_constraints(t))
      if (d.kind != OutputKind::Uniform) {
        nlohmann::json e = {{"bit", d.bit}, {"constraint", d.describe()}, {"non_uniform", d.non_uniform}};
        if (auto f = forced_pattern_check(d)) e["forced"] = f->describe();
        oc.push_back(e);
      }
    j["output_constraints"] = oc;
  }
  return j;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double r5(double x) { return std::round(x * 1e5) / 1e5; }

}  // namespace

extern "C" {

const char* arxt_version(void) { return "1.0.0"; }

const char* arxt_status_name(arxt_status s) {
  switch (s) {
    case ARXT_OK: return "ok";
    case ARXT_E_INVALID_ARGUMENT: return "invalid argument";
    case ARXT_E_WIDTH_MISMATCH: return "width mismatch";
    case ARXT_E_INVALID_DIFFERENTIAL: return "invalid differential";
    case ARXT_E_PARSE: return "parse error";
    case ARXT_E_LIMIT_EXCEEDED: return "limit exceeded";
    case ARXT_E_SOLVER_MISSING: return "solver missing";
    case ARXT_E_SOLVER_TIMEOUT: return "solver timeout";
    case ARXT_E_SOLVER_FAILED: return "solver failed";
    case ARXT_E_IO: return "I/O error";
    case ARXT_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

arxt_status arxt_context_new(const char* config_path, arxt_context** out) {
  if (!out) return ARXT_E_INVALID_ARGUMENT;
  *out = nullptr;
  auto* ctx = new (std::nothrow) arxt_context;
  if (!ctx) return ARXT_E_INTERNAL;
  arxt_status st = guard(ctx, [&] { ctx->cfg = load_config(config_path ? config_path : ""); });
  *out = ctx;  // returned even on failure so the error message is readable
  return st;
}

void arxt_context_free(arxt_context* ctx) { delete ctx; }

const char* arxt_last_error(const arxt_context* ctx) { return ctx ? ctx->error.c_str() : "no context"; }

arxt_status arxt_context_set(arxt_context* ctx, const char* key, const char* value) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(key, "key");
    need(value, "value");
    const std::string k = key, v = value;
    auto& s = ctx->cfg.solver;
    if (k == "sat") s.sat_command = v;
    else if (k == "sat_flags") s.sat_flags = split_ws(v);
    else if (k == "counter") s.counter_command = v;
    else if (k == "counter_flags") s.counter_flags = split_ws(v);
    else if (k == "jobs") s.jobs = static_cast<unsigned>(std::stoul(v));
    else if (k == "enum_limit_bits") s.enum_limit_bits = static_cast<unsigned>(std::stoul(v));
    else if (k == "timeout_s") s.timeout_s = std::stod(v);
    else if (k == "probe_timeout_s") ctx->cfg.probe_timeout_s = std::stod(v);
    else throw Error(ErrorCode::InvalidArgument, "unknown setting '" + k + "'");
  });
}

arxt_status arxt_context_config_json(arxt_context* ctx, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(out_json, "out_json");
    *out_json = dup(config_to_json(ctx->cfg).dump(2));
  });
}

void arxt_context_set_log(arxt_context* ctx, arxt_log_fn fn, void* user) {
  if (!ctx) return;
  ctx->log = fn;
  ctx->log_user = user;
}

void arxt_string_free(char* s) { std::free(s); }

arxt_status arxt_xdp(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz, int* valid,
                     unsigned* weight) {
  return guard(ctx, [&] {
    DiffTriple t = triple(n, dx, dy, dz);
    auto w = xdp_weight(t);
    if (valid) *valid = w ? 1 : 0;
    if (weight) *weight = w ? *w : 0;
  });
}

arxt_status arxt_xdp_report(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz,
                            char** out_json) {
  return guard(ctx, [&] {
    need(out_json, "out_json");
    *out_json = dup(xdp_json(triple(n, dx, dy, dz)).dump(2));
  });
}

arxt_status arxt_hist_csv(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz, char** out_csv) {
  return guard(ctx, [&] {
    need(out_csv, "out_csv");
    DiffTriple t = triple(n, dx, dy, dz);
    auto h = output_histogram(t);
    std::ostringstream os;
    os << "z,frequency\n";
    for (std::size_t z = 0; z < h.size(); ++z) os << z << ',' << h[z] << '\n';
    *out_csv = dup(os.str());
  });
}

arxt_status arxt_cma(arxt_context* ctx, const char* spec_json, int with_probability, int method, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(spec_json, "spec_json");
    need(out_json, "out_json");
    if (method < 0 || method > 2) throw Error(ErrorCode::InvalidArgument, "counting method must be 0, 1 or 2");
    ChainSpec s = chain_from_json(nlohmann::json::parse(spec_json));
    CmaReport r = cma_validate(s, ctx->cfg.solver, with_probability != 0, static_cast<CountMethod>(method));
    *out_json = dup(to_json(r).dump(2));
  });
}

arxt_status arxt_conflict(arxt_context* ctx, const char* spec_json, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(spec_json, "spec_json");
    need(out_json, "out_json");
    ChainSpec s = chain_from_json(nlohmann::json::parse(spec_json));
    CmaReport r;
    r.spec = s;
    bool conflict = false, bad = false;
    for (const auto& t : s.adds) bad = bad || !xdp_valid(t);
    if (bad) {
      r.status = CmaStatus::InvalidDifferential;
    } else {
      for (std::size_t j = 0; j + 1 < s.adds.size(); ++j) {
        r.conflicts.push_back(detect_pair_conflict(s.adds[j], s.glues[j], s.adds[j + 1]));
        r.nonindep.push_back(detect_nonindep_positions(s.adds[j], s.glues[j], s.adds[j + 1]));
        conflict = conflict || r.conflicts.back().q != 0;
      }
      r.status = conflict ? CmaStatus::InvalidConflict : CmaStatus::ValidConfirmed;
      if (!conflict) r.note = "no adjacent-bit conflict; satisfiability not checked";
    }
    *out_json = dup(to_json(r).dump(2));
  });
}

arxt_status arxt_trail_load(arxt_context* ctx, const char* path, arxt_trail** out) {
  return guard(ctx, [&] {
    need(path, "path");
    need(out, "out");
    *out = new arxt_trail{load_trail(path)};
  });
}

arxt_status arxt_trail_parse(arxt_context* ctx, const char* json, arxt_trail** out) {
  return guard(ctx, [&] {
    need(json, "json");
    need(out, "out");
    *out = new arxt_trail{trail_from_json(nlohmann::json::parse(json))};
  });
}

void arxt_trail_free(arxt_trail* t) { delete t; }

unsigned arxt_trail_rounds(const arxt_trail* t) { return t ? t->t.rounds : 0; }

arxt_status arxt_trail_json(arxt_context* ctx, const arxt_trail* t, char** out_json) {
  return guard(ctx, [&] {
    need(t, "trail");
    need(out_json, "out_json");
    *out_json = dup(trail_to_json(t->t).dump(1));
  });
}

arxt_status arxt_trail_check(arxt_context* ctx, const arxt_trail* t, char** out_json) {
  return guard(ctx, [&] {
    need(t, "trail");
    need(out_json, "out_json");
    CipherSpec c = make_cipher(t->t.cipher);
    auto mm = check_trail_weights(c, t->t);
    nlohmann::json j;
    j["consistent"] = mm.empty();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : mm) arr.push_back({{"row", m.row}, {"column", m.column}, {"stored", m.stored}, {"recomputed", m.recomputed}});
    j["mismatches"] = arr;
    *out_json = dup(j.dump(2));
  });
}

arxt_status arxt_verify(arxt_context* ctx, const arxt_trail* t, int refine, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(t, "trail");
    need(out_json, "out_json");
    CipherSpec c = make_cipher(t->t.cipher);
    VerifyOptions vo;
    vo.refine = refine != 0;
    Verdict v = verify_and_refine(c, t->t, ctx->cfg.solver, vo);
    nlohmann::json j = to_json(v);
    if (v.valid) j["trail"] = trail_to_json(annotate_refined(c, v));
    *out_json = dup(j.dump(2));
  });
}

arxt_status arxt_search(arxt_context* ctx, const char* options_json, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(options_json, "options_json");
    need(out_json, "out_json");
    auto j = nlohmann::json::parse(options_json);
    CipherSpec c = make_cipher(j.at("cipher").get<std::string>());
    SearchOptions o;
    o.rounds = j.at("rounds").get<unsigned>();
    o.w_start = j.value("w_start", 0);
    o.w_max = j.value("w_max", 512);
    o.matsui = j.value("matsui", true);
    o.matsui_opt.prefix = j.value("prefix", true);
    o.matsui_opt.suffix = j.value("suffix", true);
    o.known_bounds = j.value("bounds", std::vector<int>{});
    for (const auto& p : j.value("pins", std::vector<std::string>{})) o.pins.push_back(parse_pin(p, c.n));
    o.verify = j.value("verify", true);
    o.refine = j.value("refine", false);
    o.probe_timeout_s = j.value("probe_timeout_s", ctx->cfg.probe_timeout_s);
    o.zero_window = j.value("zero_window", -1);
    if (j.contains("wd")) {
      auto w = j.at("wd").get<std::vector<int>>();
      if (w.size() != 2) throw Error(ErrorCode::InvalidArgument, "wd needs [upper, lower]");
      o.wd_hi = w[0], o.wd_lo = w[1];
    }
    if (j.contains("wdk")) {
      auto w = j.at("wdk").get<std::vector<int>>();
      if (w.size() != 2) throw Error(ErrorCode::InvalidArgument, "wdk needs [upper, lower]");
      o.wdk_hi = w[0], o.wdk_lo = w[1];
    }
    if (ctx->log) {
      arxt_log_fn fn = ctx->log;
      void* user = ctx->log_user;
      o.log = [fn, user](const nlohmann::json& line) { fn(line.dump().c_str(), user); };
    }
    const std::string mode = j.value("mode", "optimal");
    SearchResult r;
    if (mode == "optimal") r = search_optimal(c, ctx->cfg.solver, o);
    else if (mode == "good") r = search_good(c, ctx->cfg.solver, o);
    else throw Error(ErrorCode::InvalidArgument, "search mode must be optimal or good");
    nlohmann::json out = to_json(r);
    out["cipher"] = c.id;
    out["rounds"] = o.rounds;
    out["mode"] = mode;
    *out_json = dup(out.dump(2));
  });
}

arxt_status arxt_toy(arxt_context* ctx, const arxt_trail* t, uint64_t samples, uint64_t seed, char** out_json) {
  if (!ctx) return ARXT_E_INVALID_ARGUMENT;
  return guard(ctx, [&] {
    need(t, "trail");
    need(out_json, "out_json");
    CipherSpec c = make_cipher(t->t.cipher);
    Verdict v = verify_and_refine(c, t->t, ctx->cfg.solver, {});
    EmpiricalReport e = empirical_trail(c, t->t, samples ? EmpiricalMode::Sample : EmpiricalMode::FullTraversal, samples, seed,
                                        ctx->cfg.solver.jobs);
    const ArxCircuit circ = build_circuit(c, t->t.rounds);
    auto iw = row_weights(c, circ, t->t.rounds, v.site_weights);
    auto rw = v.valid ? row_weights(c, circ, t->t.rounds, v.refined_site_weights) : iw;
    nlohmann::json j;
    j["cipher"] = c.id;
    j["rounds"] = t->t.rounds;
    j["status"] = v.valid ? "valid" : "invalid";
    nlohmann::json rows = nlohmann::json::array();
    for (unsigned r = 0; r < t->t.rounds; ++r) {
      double ind = 0, ref = 0;
      for (const auto& [k, x] : iw[r]) ind += x;
      for (const auto& [k, x] : rw[r]) ref += x;
      double emp = e.round_weights[r];
      rows.push_back({{"round", r},
                      {"independent", ind},
                      {"refined", r5(ref)},
                      {"empirical", std::isfinite(emp) ? nlohmann::json(r5(emp)) : nlohmann::json(nullptr)}});
    }
    j["rows"] = rows;
    j["independence_weight"] = v.independence_weight;
    j["refined_weight"] = r5(v.refined_weight);
    j["empirical_weight"] = std::isfinite(e.total_weight) ? nlohmann::json(r5(e.total_weight)) : nlohmann::json(nullptr);
    j["empirical"] = to_json(e);
    j["verdict"] = to_json(v);
    *out_json = dup(j.dump(2));
  });
}

arxt_status arxt_export_cnf(arxt_context* ctx, const char* request_json, char** out_dimacs) {
  return guard(ctx, [&] {
    need(request_json, "request_json");
    need(out_dimacs, "out_dimacs");
    auto j = nlohmann::json::parse(request_json);
    const std::string model = j.at("model").get<std::string>();
    if (model == "cma") {
      ChainSpec s = chain_from_json(j.at("spec"));
      ChainModel cm = build_chain_model(s, j.value("pruned", true));
      *out_dimacs = dup(emit_dimacs(cm.f, &cm.projection, true) + "\n");
    } else if (model == "trail") {
      Trail t = trail_from_json(j.at("trail"));
      CipherSpec c = make_cipher(t.cipher);
      ArxCircuit circ = build_circuit(c, t.rounds);
      TrailDiffs d = trail_differences(c, circ, t);
      CircuitValueModel vm = build_value_model(circ, d.wires);
      *out_dimacs = dup(emit_dimacs(vm.f, nullptr, true) + "\n");
    } else if (model == "search") {
      CipherSpec c = make_cipher(j.at("cipher").get<std::string>());
      std::vector<Pin> pins;
      for (const auto& p : j.value("pins", std::vector<std::string>{})) pins.push_back(parse_pin(p, c.n));
      CnfFormula f = search_model(c, j.at("rounds").get<unsigned>(), j.at("W").get<int>(), pins);
      *out_dimacs = dup(emit_dimacs(f, nullptr, true) + "\n");
    } else if (model == "xdp") {
      const unsigned n = j.at("n").get<unsigned>();
      DiffTriple t = triple(n, j.at("dx").get<std::string>().c_str(), j.at("dy").get<std::string>().c_str(),
                            j.at("dz").get<std::string>().c_str());
      CnfFormula f;
      WordVars x = new_word(f, n, "x"), y = new_word(f, n, "y");
      add_state(f, x, y, t, "z");
      std::vector<int> proj;
      for (const auto* w : {&x, &y})
        for (Lit l : w->bits) proj.push_back(l);
      *out_dimacs = dup(emit_dimacs(f, &proj, true) + "\n");
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + model + "'");
    }
  });
}

}  // extern "C"
