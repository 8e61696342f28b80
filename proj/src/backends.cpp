#include "arxtrail/backends.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "arxtrail/word.hpp"

namespace arxtrail {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

ParsedSat parse_competition(const std::string& out, int exit_code) {
  ParsedSat r;
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        r.status = SatStatus::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        r.status = SatStatus::Sat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      Lit l;
      while (ls >> l)
        if (l != 0) r.values.push_back(l);
    }
  }
  if (r.status == SatStatus::Unknown) {
    if (exit_code == 10) r.status = SatStatus::Sat;
    if (exit_code == 20) r.status = SatStatus::Unsat;
  }
  return r;
}

BigInt parse_mc(const std::string& out, int) {
  std::istringstream is(out);
  std::string line;
  std::optional<BigInt> found;
  while (std::getline(is, line)) {
    for (const char* key : {"s mc ", "s pmc ", "c s exact arb int "}) {
      if (line.rfind(key, 0) == 0) {
        std::string num = line.substr(std::char_traits<char>::length(key));
        while (!num.empty() && std::isspace(static_cast<unsigned char>(num.back()))) num.pop_back();
        try {
          found = BigInt(num);
        } catch (const std::exception&) {
          throw Error(ErrorCode::SolverFailed, "counter printed a malformed count: " + line);
        }
      }
    }
  }
  if (!found) {
    // Fall back to the last line that is a bare decimal number.
    std::istringstream again(out);
    while (std::getline(again, line)) {
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      if (!line.empty() && std::all_of(line.begin(), line.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        found = BigInt(line);
    }
  }
  if (!found) throw Error(ErrorCode::SolverFailed, "counter output has no count line");
  return *found;
}

struct Registry {
  std::mutex mu;
  std::map<std::string, SatOutputParser> sat{{"competition", parse_competition}};
  std::map<std::string, CountOutputParser> count{{"mc", parse_mc}};
};

Registry& registry() {
  static Registry r;
  return r;
}

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    auto dir = std::filesystem::temp_directory_path();
    std::string templ = (dir / "arxtrail-XXXXXX.cnf").string();
    int fd = mkstemps(templ.data(), 4);
    if (fd < 0) throw Error(ErrorCode::Io, "cannot create temporary DIMACS file");
    path_ = templ;
    std::size_t off = 0;
    while (off < content.size()) {
      ssize_t w = ::write(fd, content.data() + off, content.size() - off);
      if (w <= 0) {
        ::close(fd);
        throw Error(ErrorCode::Io, "cannot write temporary DIMACS file");
      }
      off += static_cast<std::size_t>(w);
    }
    ::close(fd);
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::vector<std::string> build_argv(const std::string& command, const std::vector<std::string>& flags,
                                    const std::string& file) {
  auto argv = split_ws(command);
  argv.insert(argv.end(), flags.begin(), flags.end());
  argv.push_back(file);
  return argv;
}

}  // namespace

double big_log2(const BigInt& v) {
  if (v <= 0) return -std::numeric_limits<double>::infinity();
  unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v));
  if (bits < 60) return std::log2(v.convert_to<double>());
  unsigned shift = bits - 60;
  BigInt top = v >> shift;
  return std::log2(top.convert_to<double>()) + shift;
}

double CountResult::log2() const { return big_log2(count); }

unsigned SolverConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void register_sat_parser(const std::string& name, SatOutputParser p) {
  std::lock_guard<std::mutex> lk(registry().mu);
  registry().sat[name] = std::move(p);
}

void register_count_parser(const std::string& name, CountOutputParser p) {
  std::lock_guard<std::mutex> lk(registry().mu);
  registry().count[name] = std::move(p);
}

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s) {
  if (argv.empty()) throw Error(ErrorCode::InvalidArgument, "empty command");
  int pipefd[2];
  if (pipe(pipefd) != 0) throw Error(ErrorCode::Io, "pipe() failed");
  int errfd[2];
  if (pipe(errfd) != 0) throw Error(ErrorCode::Io, "pipe() failed");
  fcntl(errfd[1], F_SETFD, FD_CLOEXEC);
  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::Io, "fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipefd[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(pipefd[0]);
    close(pipefd[1]);
    close(errfd[0]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    int e = errno;
    ssize_t ignored = ::write(errfd[1], &e, sizeof e);
    (void)ignored;
    _exit(127);
  }
  close(pipefd[1]);
  close(errfd[1]);
  int exec_errno = 0;
  bool exec_failed = ::read(errfd[0], &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno);
  close(errfd[0]);
  if (exec_failed) {
    close(pipefd[0]);
    waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::SolverMissing, "cannot execute '" + argv[0] + "'");
  }

  ProcessResult res;
  const auto t0 = std::chrono::steady_clock::now();
  char buf[65536];
  for (;;) {
    int wait_ms = -1;
    if (timeout_s > 0) {
      double left = timeout_s - elapsed_since(t0);
      if (left <= 0) {
        res.timed_out = true;
        break;
      }
      wait_ms = static_cast<int>(left * 1000) + 1;
    }
    pollfd pfd{pipefd[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) continue;
    ssize_t n = ::read(pipefd[0], buf, sizeof buf);
    if (n <= 0) break;
    res.out.append(buf, static_cast<std::size_t>(n));
  }
  close(pipefd[0]);
  if (res.timed_out) kill(-pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

SatResult solve_sat(const CnfFormula& f, const SolverConfig& cfg, const std::vector<Lit>& assumptions,
                    const std::atomic<bool>* stop) {
  const auto t0 = std::chrono::steady_clock::now();
  SatResult r;
  if (!cfg.external_sat()) {
    CdclSolver s(f);
    r.status = s.solve(assumptions, cfg.timeout_s, stop);
    if (r.status == SatStatus::Sat) r.model = s.model();
    r.backend = "internal";
    r.seconds = elapsed_since(t0);
    if (r.status == SatStatus::Unknown && !(stop && stop->load()))
      throw Error(ErrorCode::SolverTimeout, "internal SAT solver hit the time limit");
    return r;
  }
  CnfFormula g = f;
  for (Lit a : assumptions) g.add_unit(a);
  TempFile tmp(emit_dimacs(g));
  SatOutputParser parser;
  {
    std::lock_guard<std::mutex> lk(registry().mu);
    auto it = registry().sat.find(cfg.sat_parser);
    if (it == registry().sat.end()) throw Error(ErrorCode::InvalidArgument, "unknown SAT output parser '" + cfg.sat_parser + "'");
    parser = it->second;
  }
  auto pr = run_process(build_argv(cfg.sat_command, cfg.sat_flags, tmp.path()), cfg.timeout_s);
  if (pr.timed_out) throw Error(ErrorCode::SolverTimeout, "external SAT solver exceeded the time limit");
  ParsedSat ps = parser(pr.out, pr.exit_code);
  if (ps.status == SatStatus::Unknown)
    throw Error(ErrorCode::SolverFailed, "external SAT solver gave no verdict (exit code " + std::to_string(pr.exit_code) + ")");
  r.status = ps.status;
  if (r.status == SatStatus::Sat) {
    r.model.assign(static_cast<std::size_t>(f.var_count()) + 1, false);
    for (Lit l : ps.values)
      if (l > 0 && l <= f.var_count()) r.model[static_cast<std::size_t>(l)] = true;
  }
  r.backend = cfg.sat_command;
  r.seconds = elapsed_since(t0);
  return r;
}

CountResult count_models(const CnfFormula& f, const std::vector<int>& projection, const SolverConfig& cfg,
                         const SemanticEvaluator* evaluator) {
  const auto t0 = std::chrono::steady_clock::now();
  CountResult r;
  r.projected_vars = static_cast<unsigned>(projection.size());
  if (cfg.external_counter()) {
    TempFile tmp(emit_dimacs(f, &projection));
    CountOutputParser parser;
    {
      std::lock_guard<std::mutex> lk(registry().mu);
      auto it = registry().count.find(cfg.counter_parser);
      if (it == registry().count.end())
        throw Error(ErrorCode::InvalidArgument, "unknown counter output parser '" + cfg.counter_parser + "'");
      parser = it->second;
    }
    auto pr = run_process(build_argv(cfg.counter_command, cfg.counter_flags, tmp.path()), cfg.timeout_s);
    if (pr.timed_out) throw Error(ErrorCode::SolverTimeout, "external counter exceeded the time limit");
    r.count = parser(pr.out, pr.exit_code);
    r.backend = cfg.counter_command;
    r.seconds = elapsed_since(t0);
    return r;
  }

  if (projection.size() > cfg.enum_limit_bits)
    throw Error(ErrorCode::LimitExceeded, "projection has " + std::to_string(projection.size()) +
                                              " variables; internal enumeration is capped at " +
                                              std::to_string(cfg.enum_limit_bits));
  const unsigned jobs = cfg.effective_jobs();
  unsigned split = 0;
  while (split < projection.size() && (1u << split) < 4 * jobs && split < 8) ++split;
  const std::size_t tasks = std::size_t{1} << split;
  std::vector<unsigned long long> partial(tasks, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> timed_out{false};
  std::exception_ptr failure;
  std::mutex fail_mu;
  const std::vector<int> rest(projection.begin() + split, projection.end());

  auto worker = [&]() {
    try {
      for (;;) {
        std::size_t t = next.fetch_add(1);
        if (t >= tasks) return;
        if (cfg.timeout_s > 0 && elapsed_since(t0) > cfg.timeout_s) {
          timed_out = true;
          return;
        }
        if (evaluator) {
          std::vector<bool> assign(projection.size());
          for (unsigned b = 0; b < split; ++b) assign[b] = (t >> b) & 1;
          const std::size_t rest_count = std::size_t{1} << rest.size();
          unsigned long long c = 0;
          for (std::size_t m = 0; m < rest_count; ++m) {
            for (std::size_t b = 0; b < rest.size(); ++b) assign[split + b] = (m >> b) & 1;
            if ((*evaluator)(assign)) ++c;
          }
          partial[t] = c;
          continue;
        }
        CdclSolver s(f);
        bool ok = true;
        for (unsigned b = 0; b < split; ++b) {
          int v = projection[b];
          ok = s.add_clause({((t >> b) & 1) ? v : -v}) && ok;
        }
        partial[t] = ok ? s.count_projected(rest, &timed_out) : 0;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(fail_mu);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(jobs, tasks));
  for (unsigned i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  if (timed_out) throw Error(ErrorCode::SolverTimeout, "internal counter exceeded the time limit");
  for (auto c : partial) r.count += c;
  r.backend = evaluator ? "internal-eval" : "internal";
  r.seconds = elapsed_since(t0);
  return r;
}

}  // namespace arxtrail
