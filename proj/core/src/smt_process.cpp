// External SMT solver adapter: run a configured command, feed it SMT-LIB2 on
// stdin, and parse the `sat`/`unsat`/`unknown` verdict plus the (get-model)
// s-expression back into a model. The command line goes through /bin/sh so
// users can write "z3 -in" or "cvc5 --lang smt2". One subprocess per call;
// a watchdog deadline kills runaways.
#include "sill/solve.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <sstream>
#include <variant>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace sill {

namespace {

// --- subprocess ------------------------------------------------------------

struct RunOutput {
  std::string out;
  int exit_code = -1;
};

RunOutput run_command(const std::string& cmd, const std::string& input,
                      int timeout_ms) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    fail(Errc::BackendUnavailable, "cannot create pipes for the solver process");
  pid_t pid = fork();
  if (pid < 0)
    fail(Errc::BackendUnavailable, "cannot fork the solver process");
  if (pid == 0) {
    // Own process group so a timeout can kill the whole solver tree, not
    // just the shell that spawned it.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
    _exit(127);
  }
  setpgid(pid, pid); // either side may win the race; both pick the same group
  close(in_pipe[0]);
  close(out_pipe[1]);

  // Write the problem, then read everything until EOF or deadline.
  size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break; // solver closed its stdin early; it may still answer
    }
    written += static_cast<size_t>(n);
  }
  close(in_pipe[1]);

  std::string out;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(timeout_ms);
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    int remain = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    if (remain <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd = {out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, remain);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) {
      timed_out = true;
      break;
    }
    ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    out.append(buf, static_cast<size_t>(n));
  }
  close(out_pipe[0]);
  if (timed_out) {
    kill(-pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    fail(Errc::SolverError, "external solver timed out after " +
                                std::to_string(timeout_ms) + " ms");
  }
  int status = 0;
  waitpid(pid, &status, 0);
  RunOutput r;
  r.out = std::move(out);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// --- s-expressions -----------------------------------------------------------

struct SExpr {
  // Leaf when children is empty and atom set; otherwise a list.
  std::string atom;
  bool is_atom = false;
  std::vector<SExpr> children;
};

struct SParser {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      break;
    }
  }

  std::optional<SExpr> next() {
    skip_ws();
    if (i >= s.size()) return std::nullopt;
    if (s[i] == '(') {
      ++i;
      SExpr e;
      for (;;) {
        skip_ws();
        if (i >= s.size())
          fail(Errc::SolverError, "unterminated s-expression in solver output");
        if (s[i] == ')') {
          ++i;
          return e;
        }
        auto child = next();
        if (!child)
          fail(Errc::SolverError, "unterminated s-expression in solver output");
        e.children.push_back(std::move(*child));
      }
    }
    SExpr e;
    e.is_atom = true;
    if (s[i] == '|') {
      ++i;
      while (i < s.size() && s[i] != '|') e.atom += s[i++];
      if (i >= s.size())
        fail(Errc::SolverError, "unterminated quoted symbol in solver output");
      ++i;
      return e;
    }
    if (s[i] == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') e.atom += s[i++];
      if (i < s.size()) ++i;
      return e;
    }
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
           s[i] != '(' && s[i] != ')' && s[i] != ';')
      e.atom += s[i++];
    return e;
  }
};

std::optional<BigInt> sexpr_int(const SExpr& e) {
  if (e.is_atom) {
    const std::string& a = e.atom;
    if (a.empty()) return std::nullopt;
    size_t k = a[0] == '-' ? 1 : 0;
    if (k == a.size()) return std::nullopt;
    for (size_t j = k; j < a.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(a[j]))) return std::nullopt;
    return BigInt(a);
  }
  // (- 5)
  if (e.children.size() == 2 && e.children[0].is_atom &&
      e.children[0].atom == "-") {
    auto inner = sexpr_int(e.children[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

} // namespace

SolveResult solve_external(const ExternalSolver& ext, const VarDecls& decls,
                           const PathConstraint& phi) {
  if (ext.command.empty())
    fail(Errc::BackendUnavailable, "no external solver command configured");
  std::string problem = emit_smtlib2(decls, phi);
  RunOutput run = run_command(ext.command, problem, ext.timeout_ms);
  if (run.exit_code == 127)
    fail(Errc::BackendUnavailable,
         "external solver command not found: " + ext.command);

  SParser sp{run.out};
  // First atom is the verdict. Some solvers print diagnostics first; scan
  // atoms until a verdict appears.
  std::optional<SExpr> first;
  SolveStatus status;
  for (;;) {
    first = sp.next();
    if (!first)
      fail(Errc::SolverError,
           "external solver produced no sat/unsat/unknown verdict");
    if (!first->is_atom) continue;
    if (first->atom == "sat") {
      status = SolveStatus::Sat;
      break;
    }
    if (first->atom == "unsat") {
      status = SolveStatus::Unsat;
      break;
    }
    if (first->atom == "unknown") {
      status = SolveStatus::Unknown;
      break;
    }
  }
  SolveResult res;
  res.status = status;
  if (status != SolveStatus::Sat) {
    res.detail = "external solver answered";
    return res;
  }

  // Model: every (define-fun name () sort value) anywhere in the remaining
  // output, whether or not it is wrapped in (model ...).
  std::vector<SExpr> defs;
  std::function<void(const SExpr&)> collect = [&](const SExpr& e) {
    if (e.is_atom) return;
    if (e.children.size() == 5 && e.children[0].is_atom &&
        e.children[0].atom == "define-fun" && e.children[1].is_atom) {
      defs.push_back(e);
      return;
    }
    for (const auto& c : e.children) collect(c);
  };
  while (auto e = sp.next()) collect(*e);

  for (const auto& d : defs) {
    const std::string& name = d.children[1].atom;
    const SExpr& val = d.children[4];
    if (auto vt = decls.values.find(name); vt != decls.values.end()) {
      switch (vt->second) {
        case BaseType::Int: {
          auto n = sexpr_int(val);
          if (!n)
            fail(Errc::SolverError,
                 "cannot parse integer model value for '" + name + "'");
          res.model.values[name] = RValue::mk_int(*n);
          break;
        }
        case BaseType::Bool:
          if (!val.is_atom || (val.atom != "true" && val.atom != "false"))
            fail(Errc::SolverError,
                 "cannot parse boolean model value for '" + name + "'");
          res.model.values[name] = RValue::mk_bool(val.atom == "true");
          break;
        case BaseType::Unit:
          res.model.values[name] = RValue::mk_unit();
          break;
      }
      continue;
    }
    if (auto ct = decls.choices.find(name); ct != decls.choices.end()) {
      // Constructors are emitted as "<var>.<label>"; accept a bare label too.
      std::string a = val.is_atom ? val.atom : std::string();
      std::string prefix = name + ".";
      if (a.rfind(prefix, 0) == 0) a = a.substr(prefix.size());
      if (std::find(ct->second.begin(), ct->second.end(), a) == ct->second.end())
        fail(Errc::SolverError,
             "model label '" + a + "' is not in the universe of '" + name + "'");
      res.model.labels[name] = a;
    }
    // Names outside the declarations are solver internals; ignore them.
  }

  complete_model(decls, res.model);
  if (!model_satisfies(phi, res.model))
    fail(Errc::SolverError,
         "external solver returned a model that fails re-substitution");
  return res;
}

} // namespace sill
