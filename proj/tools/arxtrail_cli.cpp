#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arxtrail/arxtrail.h"

namespace {

constexpr int kExitInvalid = 2;  // verify: the trail has no right pair
constexpr int kExitErrorBase = 10;

struct Global {
  std::string config, sat, counter, out;
  unsigned jobs = 0;
  double timeout = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Session {
 public:
  explicit Session(const Global& g) : g_(g) {
    arxt_status st = arxt_context_new(g.config.empty() ? nullptr : g.config.c_str(), &ctx_);
    check(st);
    if (!g.sat.empty()) check(arxt_context_set(ctx_, "sat", g.sat.c_str()));
    if (!g.counter.empty()) check(arxt_context_set(ctx_, "counter", g.counter.c_str()));
    if (g.jobs) check(arxt_context_set(ctx_, "jobs", std::to_string(g.jobs).c_str()));
    if (g.timeout > 0) check(arxt_context_set(ctx_, "timeout_s", std::to_string(g.timeout).c_str()));
  }
  ~Session() { arxt_context_free(ctx_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  arxt_context* ctx() { return ctx_; }

  void check(arxt_status st) {
    if (st == ARXT_OK) return;
    std::fprintf(stderr, "error (%s): %s\n", arxt_status_name(st), ctx_ ? arxt_last_error(ctx_) : "");
    throw Exit{kExitErrorBase + static_cast<int>(st)};
  }

  // Takes ownership of s and writes it to --out (or stdout).
  void emit(char* s) {
    std::string text(s ? s : "");
    arxt_string_free(s);
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
    if (g_.out.empty() || g_.out == "-") {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      std::ofstream o(g_.out);
      if (!o) {
        std::fprintf(stderr, "error: cannot write '%s'\n", g_.out.c_str());
        throw Exit{kExitErrorBase + ARXT_E_IO};
      }
      o << text;
    }
  }

  struct Exit {
    int code;
  };

 private:
  const Global& g_;
  arxt_context* ctx_ = nullptr;
};

struct TrailHandle {
  arxt_trail* t = nullptr;
  ~TrailHandle() { arxt_trail_free(t); }
};

std::vector<int> parse_pair(const std::string& s, const char* what) {
  std::vector<int> v;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) v.push_back(std::stoi(part));
  if (v.size() != 2) throw CLI::ValidationError(what, "expects UPPER,LOWER");
  return v;
}

void log_line(const char* line, void* user) {
  auto* out = static_cast<std::ostream*>(user);
  *out << line << '\n';
  out->flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search, validate and re-weight differential trails of ARX ciphers"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--sat", g.sat, "SAT solver command (\"internal\" for the built-in engine)");
  app.add_option("--counter", g.counter, "model counter command");
  app.add_option("--jobs", g.jobs, "worker threads (0: all cores)");
  app.add_option("--timeout", g.timeout, "per-call solver time limit in seconds");
  app.add_option("-o,--out", g.out, "output file (default: stdout)");

  unsigned n = 0;
  std::string dx, dy, dz;
  auto add_triple = [&](CLI::App* sc) {
    sc->add_option("--n", n, "word size")->required();
    sc->add_option("--dx", dx, "first input difference (0x.. or 0b..)")->required();
    sc->add_option("--dy", dy, "second input difference")->required();
    sc->add_option("--dz", dz, "output difference")->required();
  };

  auto* xdp = app.add_subcommand("xdp", "validity, weight and per-bit constraints of one addition");
  add_triple(xdp);
  auto* hist = app.add_subcommand("hist", "output-value distribution of a differential as CSV (n <= 12)");
  add_triple(hist);

  std::string spec_file, method = "auto";
  bool no_prob = false;
  auto* cma = app.add_subcommand("cma", "validate a consecutive-addition spec and count its exact probability");
  cma->add_option("spec", spec_file, "CMA JSON file")->required()->check(CLI::ExistingFile);
  cma->add_flag("--no-probability", no_prob, "validity only");
  cma->add_option("--method", method, "counting method")->check(CLI::IsMember({"auto", "dp", "cnf"}));

  auto* conflict = app.add_subcommand("conflict", "adjacent-bit conflict report for a CMA spec");
  conflict->add_option("spec", spec_file, "CMA JSON file")->required()->check(CLI::ExistingFile);

  std::string trail_file;
  bool no_refine = false;
  auto* verify = app.add_subcommand("verify", "whole-trail validity, weak key and refined weight");
  verify->add_option("trail", trail_file, "trail JSON file")->required()->check(CLI::ExistingFile);
  verify->add_flag("--no-refine", no_refine, "skip probability refinement");

  auto* check = app.add_subcommand("check", "compare a trail's weight columns with recomputed weights");
  check->add_option("trail", trail_file, "trail JSON file")->required()->check(CLI::ExistingFile);

  std::string cipher, mode = "optimal", wd, wdk, bounds, log_file;
  unsigned rounds = 0;
  int w_start = 0, w_max = 512, zero_window = -1;
  bool no_matsui = false, no_prefix = false, no_suffix = false, refine = false, no_verify = false;
  double probe_timeout = 0;
  std::vector<std::string> pins;
  auto* search = app.add_subcommand("search", "search for optimal trails or good trails by bisection");
  search->add_option("--cipher", cipher, "cipher id")->required();
  search->add_option("--rounds", rounds, "number of rounds")->required();
  search->add_option("--mode", mode, "optimal or good")->check(CLI::IsMember({"optimal", "good"}));
  search->add_option("--w-start", w_start, "first total weight probed (optimal mode)");
  search->add_option("--w-max", w_max, "largest total weight probed (optimal mode)");
  search->add_option("--bounds", bounds, "known optimal weights by round count, comma separated, -1 unknown");
  search->add_option("--wd", wd, "data weight window UPPER,LOWER (good mode)");
  search->add_option("--wdk", wdk, "total weight window UPPER,LOWER (good mode)");
  search->add_option("--zero-window", zero_window, "round of the zero-difference window; -1 tries all, -2 disables");
  search->add_option("--pin", pins, "fix a word difference, e.g. k.8=0x00078000");
  search->add_flag("--no-matsui", no_matsui, "disable Matsui bounds");
  search->add_flag("--no-prefix", no_prefix, "disable the leading-window Matsui bounds");
  search->add_flag("--no-suffix", no_suffix, "disable the trailing-window Matsui bounds");
  search->add_flag("--no-verify", no_verify, "accept trails without checking for right pairs");
  search->add_flag("--refine", refine, "refine the final trail's probability");
  search->add_option("--probe-timeout", probe_timeout, "time budget per probe in seconds");
  search->add_option("--log", log_file, "JSON-lines progress log (\"-\" for stderr)");

  std::uint64_t samples = 0, seed = 1;
  std::string csv_file;
  auto* toy = app.add_subcommand("toy", "toy-cipher experiment: independence, refined and empirical weights");
  toy->add_option("trail", trail_file, "toy trail JSON file")->required()->check(CLI::ExistingFile);
  toy->add_option("--samples", samples, "sample count (0: full traversal)");
  toy->add_option("--seed", seed, "sampling seed");
  toy->add_option("--csv", csv_file, "also write round,independent,refined,empirical CSV");

  std::string model, W;
  bool unpruned = false;
  auto* exp = app.add_subcommand("export-cnf", "write the DIMACS of a model");
  exp->add_option("--model", model, "cma, trail, search or xdp")->required()->check(CLI::IsMember({"cma", "trail", "search", "xdp"}));
  exp->add_option("--spec", spec_file, "CMA JSON file (cma)");
  exp->add_option("--trail", trail_file, "trail JSON file (trail)");
  exp->add_flag("--unpruned", unpruned, "keep every bit of a CMA model");
  exp->add_option("--cipher", cipher, "cipher id (search)");
  exp->add_option("--rounds", rounds, "rounds (search)");
  exp->add_option("--W", W, "weight bound (search)");
  exp->add_option("--pin", pins, "pinned differences (search)");
  exp->add_option("--n", n, "word size (xdp)");
  exp->add_option("--dx", dx, "(xdp)");
  exp->add_option("--dy", dy, "(xdp)");
  exp->add_option("--dz", dz, "(xdp)");

  CLI11_PARSE(app, argc, argv);

  try {
    Session s(g);
    char* out = nullptr;
    if (*xdp) {
      s.check(arxt_xdp_report(s.ctx(), n, dx.c_str(), dy.c_str(), dz.c_str(), &out));
      s.emit(out);
    } else if (*hist) {
      s.check(arxt_hist_csv(s.ctx(), n, dx.c_str(), dy.c_str(), dz.c_str(), &out));
      s.emit(out);
    } else if (*cma) {
      const int m = method == "dp" ? 1 : method == "cnf" ? 2 : 0;
      s.check(arxt_cma(s.ctx(), read_file(spec_file).c_str(), no_prob ? 0 : 1, m, &out));
      s.emit(out);
    } else if (*conflict) {
      s.check(arxt_conflict(s.ctx(), read_file(spec_file).c_str(), &out));
      s.emit(out);
    } else if (*verify) {
      TrailHandle t;
      s.check(arxt_trail_load(s.ctx(), trail_file.c_str(), &t.t));
      s.check(arxt_verify(s.ctx(), t.t, no_refine ? 0 : 1, &out));
      const bool valid = nlohmann::json::parse(out).value("status", "") == "valid";
      s.emit(out);
      return valid ? 0 : kExitInvalid;
    } else if (*check) {
      TrailHandle t;
      s.check(arxt_trail_load(s.ctx(), trail_file.c_str(), &t.t));
      s.check(arxt_trail_check(s.ctx(), t.t, &out));
      const bool ok = nlohmann::json::parse(out).value("consistent", false);
      s.emit(out);
      return ok ? 0 : kExitInvalid;
    } else if (*search) {
      nlohmann::json o;
      o["cipher"] = cipher;
      o["rounds"] = rounds;
      o["mode"] = mode;
      o["w_start"] = w_start;
      o["w_max"] = w_max;
      o["matsui"] = !no_matsui;
      o["prefix"] = !no_prefix;
      o["suffix"] = !no_suffix;
      o["verify"] = !no_verify;
      o["refine"] = refine;
      o["zero_window"] = zero_window;
      o["pins"] = pins;
      if (probe_timeout > 0) o["probe_timeout_s"] = probe_timeout;
      if (!bounds.empty()) {
        std::vector<int> b;
        std::stringstream ss(bounds);
        for (std::string part; std::getline(ss, part, ',');) b.push_back(std::stoi(part));
        o["bounds"] = b;
      }
      if (mode == "good") {
        if (wd.empty() || wdk.empty()) throw CLI::ValidationError("--wd/--wdk", "good mode needs both windows");
        o["wd"] = parse_pair(wd, "--wd");
        o["wdk"] = parse_pair(wdk, "--wdk");
      }
      std::ofstream logf;
      std::ostream* logs = nullptr;
      if (log_file == "-") {
        logs = &std::cerr;
      } else if (!log_file.empty()) {
        logf.open(log_file);
        if (!logf) throw std::runtime_error("cannot write '" + log_file + "'");
        logs = &logf;
      }
      if (logs) arxt_context_set_log(s.ctx(), log_line, logs);
      s.check(arxt_search(s.ctx(), o.dump().c_str(), &out));
      s.emit(out);
    } else if (*toy) {
      TrailHandle t;
      s.check(arxt_trail_load(s.ctx(), trail_file.c_str(), &t.t));
      s.check(arxt_toy(s.ctx(), t.t, samples, seed, &out));
      if (!csv_file.empty()) {
        auto j = nlohmann::json::parse(out);
        std::ofstream c(csv_file);
        if (!c) throw std::runtime_error("cannot write '" + csv_file + "'");
        c << "round,independent,refined,empirical\n";
        for (const auto& r : j["rows"]) c << r["round"] << ',' << r["independent"] << ',' << r["refined"] << ',' << r["empirical"] << '\n';
      }
      s.emit(out);
    } else if (*exp) {
      nlohmann::json req;
      req["model"] = model;
      if (model == "cma") {
        if (spec_file.empty()) throw CLI::ValidationError("--spec", "required for cma models");
        req["spec"] = nlohmann::json::parse(read_file(spec_file));
        req["pruned"] = !unpruned;
      } else if (model == "trail") {
        if (trail_file.empty()) throw CLI::ValidationError("--trail", "required for trail models");
        req["trail"] = nlohmann::json::parse(read_file(trail_file));
      } else if (model == "search") {
        if (cipher.empty() || rounds == 0 || W.empty()) throw CLI::ValidationError("--cipher/--rounds/--W", "required for search models");
        req["cipher"] = cipher;
        req["rounds"] = rounds;
        req["W"] = std::stoi(W);
        req["pins"] = pins;
      } else {
        if (n == 0 || dx.empty() || dy.empty() || dz.empty()) throw CLI::ValidationError("--n/--dx/--dy/--dz", "required for xdp models");
        req["n"] = n;
        req["dx"] = dx;
        req["dy"] = dy;
        req["dz"] = dz;
      }
      s.check(arxt_export_cnf(s.ctx(), req.dump().c_str(), &out));
      s.emit(out);
    }
  } catch (const Session::Exit& e) {
    return e.code;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
