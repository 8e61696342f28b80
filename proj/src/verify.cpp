#include "arxtrail/verify.hpp"

#include <chrono>
#include <cmath>

namespace arxtrail {

bool check_witness(const ArxCircuit& circ, const std::vector<u64>& inputs, const std::vector<u64>& wire_diffs) {
  std::vector<u64> other(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) other[i] = inputs[i] ^ wire_diffs[static_cast<std::size_t>(circ.inputs()[i])];
  const auto a = circ.evaluate(inputs), b = circ.evaluate(other);
  for (std::size_t w = 0; w < a.size(); ++w)
    if ((a[w] ^ b[w]) != wire_diffs[w]) return false;
  return true;
}

namespace {

double round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

Verdict verify_and_refine(const CipherSpec& c, const Trail& t, const SolverConfig& cfg, const VerifyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.cipher = c.id;
  v.trail = t;
  auto finish = [&]() -> Verdict& {
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
  };
  const ArxCircuit circ = build_circuit(c, t.rounds);
  const TrailDiffs d = trail_differences(c, circ, t);

  for (std::size_t s = 0; s < d.triples.size(); ++s) {
    auto w = xdp_weight(d.triples[s]);
    if (!w) {
      v.cause = InvalidCause::BadDifferential;
      v.detail = "addition " + circ.sites()[s].name + " is individually impossible";
      v.site_weights.push_back(NAN);
      continue;
    }
    v.site_weights.push_back(*w);
    v.independence_weight += *w;
  }
  if (v.cause == InvalidCause::BadDifferential) return finish();

  const auto refs = enumerate_cmas(c, circ, d.triples);
  // Conflict screening on every link, independent of grouping.
  for (const auto& r : refs) {
    for (std::size_t j = 0; j + 1 < r.spec.size(); ++j) {
      ChainSpec pair;
      pair.n = c.n;
      pair.adds = {r.spec.adds[j], r.spec.adds[j + 1]};
      pair.glues = {r.spec.glues[j]};
      pair.names = {r.spec.names[j], r.spec.names[j + 1]};
      CmaReport rep;
      rep.spec = pair;
      rep.conflicts.push_back(detect_pair_conflict(pair.adds[0], pair.glues[0], pair.adds[1]));
      rep.nonindep.push_back(detect_nonindep_positions(pair.adds[0], pair.glues[0], pair.adds[1]));
      if (rep.conflicts[0].q != 0) {
        rep.status = CmaStatus::InvalidConflict;
        v.conflicts.push_back(rep);
      }
    }
  }

  if (opt.find_witness) {
    CircuitValueModel vm = build_value_model(circ, d.wires);
    SatResult sr = solve_sat(vm.f, cfg);
    v.sat_backend = sr.backend;
    if (sr.status == SatStatus::Unknown) throw Error(ErrorCode::SolverFailed, "SAT backend returned no answer for the trail model");
    if (sr.status == SatStatus::Unsat) {
      v.cause = v.conflicts.empty() ? InvalidCause::WholeTrail : InvalidCause::Conflict;
      v.detail = v.conflicts.empty() ? "no right pair exists; the whole trail is recorded as invalid"
                                     : "adjacent-bit conflict between consecutive additions";
      return finish();
    }
    std::vector<u64> inputs;
    for (int w : circ.inputs()) {
      u64 val = decode_word(vm.wires[static_cast<std::size_t>(w)], sr.model);
      inputs.push_back(val);
      v.witness[circ.wire_names()[static_cast<std::size_t>(w)]] = val;
    }
    for (const auto& k : key_inputs(c)) v.weak_key.push_back(v.witness.at(k));
    v.witness_checked = check_witness(circ, inputs, d.wires);
    if (!v.witness_checked) throw Error(ErrorCode::Internal, "solver witness does not follow the trail");
  } else if (!v.conflicts.empty()) {
    v.cause = InvalidCause::Conflict;
    v.detail = "adjacent-bit conflict between consecutive additions";
    return finish();
  }

  v.valid = true;
  v.refined_site_weights = v.site_weights;
  v.refined_weight = v.independence_weight;
  for (const auto& r : refs) {
    CmaRefinement cr;
    cr.ref = r;
    for (std::size_t j = 1; j < r.sites.size(); ++j) cr.tail_weight += v.site_weights[static_cast<std::size_t>(r.sites[j])];
    for (std::size_t j = 0; j + 1 < r.spec.size(); ++j)
      if (!detect_nonindep_positions(r.spec.adds[j], r.spec.glues[j], r.spec.adds[j + 1]).empty()) cr.flagged = true;
    if (cr.flagged && opt.refine) {
      try {
        cr.report = cma_validate(r.spec, cfg, true, opt.count_method);
        if (cr.report.probability) {
          cr.refined = true;
          cr.refined_tail = -cr.report.probability->cond_log2;
          v.refined_weight += cr.refined_tail - cr.tail_weight;
          // Pairs: the second addition carries the conditional weight. Longer
          // groups: the last addition carries the whole tail.
          for (std::size_t j = 1; j < r.sites.size(); ++j) v.refined_site_weights[static_cast<std::size_t>(r.sites[j])] = 0;
          v.refined_site_weights[static_cast<std::size_t>(r.sites.back())] = cr.refined_tail;
        } else {
          cr.warning = "chain reported " + cma_status_name(cr.report.status) + "; independence weight kept";
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LimitExceeded && e.code() != ErrorCode::SolverTimeout && e.code() != ErrorCode::SolverMissing) throw;
        cr.warning = std::string("counting failed (") + e.what() + "); independence weight kept";
      }
    } else {
      cr.report.spec = r.spec;
    }
    v.cmas.push_back(std::move(cr));
  }
  return finish();
}

Trail annotate_refined(const CipherSpec& c, const Verdict& v) {
  Trail t = v.trail;
  if (!v.valid || v.refined_site_weights.empty()) return t;
  const ArxCircuit circ = build_circuit(c, t.rounds);
  auto rw = row_weights(c, circ, t.rounds, v.refined_site_weights);
  auto iw = row_weights(c, circ, t.rounds, v.site_weights);
  for (unsigned r = 0; r < t.rounds; ++r)
    for (const auto& [col, val] : rw[r])
      if (std::fabs(val - iw[r][col]) > 1e-12) t.rows[r].values[col + "_refined"] = round4(val);
  return t;
}

namespace {

std::string cause_name(InvalidCause c) {
  switch (c) {
    case InvalidCause::None: return "none";
    case InvalidCause::BadDifferential: return "impossible_addition";
    case InvalidCause::Conflict: return "conflict";
    case InvalidCause::WholeTrail: return "whole_trail";
  }
  return "?";
}

}  // namespace

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["cipher"] = v.cipher;
  j["rounds"] = v.trail.rounds;
  j["status"] = v.valid ? "valid" : "invalid";
  if (!v.valid) j["cause"] = cause_name(v.cause);
  if (!v.detail.empty()) j["detail"] = v.detail;
  j["independence_weight"] = v.independence_weight;
  if (v.valid) j["refined_weight"] = round4(v.refined_weight);
  nlohmann::json cmas = nlohmann::json::array();
  for (const auto& c : v.cmas) {
    if (!c.flagged) continue;
    nlohmann::json jc = to_json(c.report);
    jc["tail_independence_weight"] = c.tail_weight;
    if (c.refined) jc["tail_refined_weight"] = round4(c.refined_tail);
    if (!c.warning.empty()) jc["warning"] = c.warning;
    cmas.push_back(jc);
  }
  j["refined_cmas"] = cmas;
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& c : v.conflicts) conf.push_back(to_json(c));
  j["conflicts"] = conf;
  const unsigned n = v.trail.word_size;
  if (!v.witness.empty()) {
    nlohmann::json w;
    for (const auto& [k, val] : v.witness) w[k] = format_hex(val, n);
    j["witness"] = w;
    j["witness_checked"] = v.witness_checked;
  }
  if (!v.weak_key.empty()) {
    nlohmann::json wk = nlohmann::json::array();
    for (u64 k : v.weak_key) wk.push_back(format_hex(k, n));
    j["weak_key"] = wk;
  }
  if (!v.sat_backend.empty()) j["sat_backend"] = v.sat_backend;
  j["seconds"] = v.seconds;
  return j;
}

}  // namespace arxtrail
