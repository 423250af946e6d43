#include "pgakit/thread.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pgakit/errors.hpp"
#include "text_cursor.hpp"

namespace pgakit {

struct FiniteThread::Node {
  Kind kind;
  Action action;
  FiniteThread on_true;
  FiniteThread on_false;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FiniteThread FiniteThread::termination() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Termination, {}, FiniteThread{nullptr}, FiniteThread{nullptr}});
  return FiniteThread{node};
}

FiniteThread FiniteThread::deadlock() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Deadlock, {}, FiniteThread{nullptr}, FiniteThread{nullptr}});
  return FiniteThread{node};
}

FiniteThread FiniteThread::post_conditional(FiniteThread on_true, Action action, FiniteThread on_false) {
  return FiniteThread{std::make_shared<const Node>(
      Node{Kind::PostConditional, std::move(action), std::move(on_true), std::move(on_false)})};
}

FiniteThread FiniteThread::prefix(Action action, FiniteThread next) {
  FiniteThread copy = next;
  return post_conditional(std::move(next), std::move(action), std::move(copy));
}

FiniteThread::Kind FiniteThread::kind() const noexcept { return node_->kind; }

const Action& FiniteThread::action() const {
  if (kind() != Kind::PostConditional) throw std::logic_error("action() on a terminal thread");
  return node_->action;
}

const FiniteThread& FiniteThread::on_true() const {
  if (kind() != Kind::PostConditional) throw std::logic_error("on_true() on a terminal thread");
  return node_->on_true;
}

const FiniteThread& FiniteThread::on_false() const {
  if (kind() != Kind::PostConditional) throw std::logic_error("on_false() on a terminal thread");
  return node_->on_false;
}

namespace {

using NodeKey = const void*;

std::size_t depth_of(const FiniteThread& t, std::map<NodeKey, std::size_t>& memo) {
  if (t.kind() != FiniteThread::Kind::PostConditional) return 0;
  if (auto it = memo.find(t.identity()); it != memo.end()) return it->second;
  const std::size_t d = 1 + std::max(depth_of(t.on_true(), memo), depth_of(t.on_false(), memo));
  memo[t.identity()] = d;
  return d;
}

// Both relations below recurse over shared DAGs; memoizing on node identity
// keeps them linear in the number of distinct node pairs.
class PairMemo {
 public:
  std::optional<bool> find(const FiniteThread& a, const FiniteThread& b) const {
    auto it = memo_.find({a.identity(), b.identity()});
    if (it == memo_.end()) return std::nullopt;
    return it->second;
  }
  bool store(const FiniteThread& a, const FiniteThread& b, bool value) {
    memo_[{a.identity(), b.identity()}] = value;
    return value;
  }

 private:
  std::map<std::pair<NodeKey, NodeKey>, bool> memo_;
};

bool equal_rec(const FiniteThread& a, const FiniteThread& b, PairMemo& memo) {
  if (a.same_node(b)) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() != FiniteThread::Kind::PostConditional) return true;
  if (auto hit = memo.find(a, b)) return *hit;
  const bool result = a.action() == b.action() && equal_rec(a.on_true(), b.on_true(), memo) &&
                      equal_rec(a.on_false(), b.on_false(), memo);
  return memo.store(a, b, result);
}

bool below_rec(const FiniteThread& a, const FiniteThread& b, PairMemo& memo) {
  if (a.is_deadlock()) return true;
  if (a.is_termination()) return b.is_termination();
  if (b.kind() != FiniteThread::Kind::PostConditional) return false;
  if (auto hit = memo.find(a, b)) return *hit;
  const bool result = a.action() == b.action() && below_rec(a.on_true(), b.on_true(), memo) &&
                      below_rec(a.on_false(), b.on_false(), memo);
  return memo.store(a, b, result);
}

void print_rec(std::ostream& out, const FiniteThread& t, bool nested) {
  switch (t.kind()) {
    case FiniteThread::Kind::Termination:
      out << 'S';
      return;
    case FiniteThread::Kind::Deadlock:
      out << 'D';
      return;
    case FiniteThread::Kind::PostConditional:
      break;
  }
  if (t.on_true() == t.on_false()) {
    out << to_string(t.action()) << " o ";
    print_rec(out, t.on_true(), true);
    return;
  }
  if (nested) out << '(';
  print_rec(out, t.on_true(), true);
  out << " <" << to_string(t.action()) << "> ";
  print_rec(out, t.on_false(), true);
  if (nested) out << ')';
}

}  // namespace

std::size_t FiniteThread::depth() const {
  std::map<NodeKey, std::size_t> memo;
  return depth_of(*this, memo);
}

bool operator==(const FiniteThread& lhs, const FiniteThread& rhs) {
  PairMemo memo;
  return equal_rec(lhs, rhs, memo);
}

bool is_below(const FiniteThread& lhs, const FiniteThread& rhs) {
  PairMemo memo;
  return below_rec(lhs, rhs, memo);
}

std::string to_string(const FiniteThread& thread) {
  std::ostringstream out;
  print_rec(out, thread, false);
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<SpecIssue> validate_spec(const LinearSpec& spec) {
  std::vector<SpecIssue> issues;
  const std::size_t n = spec.size();
  if (n == 0) {
    issues.push_back({0, "specification has no equations"});
    return issues;
  }
  if (spec.root >= n) issues.push_back({0, "root index " + std::to_string(spec.root + 1) + " out of range"});
  for (std::size_t i = 0; i < n; ++i) {
    const auto* node = std::get_if<PostConditional>(&spec.equations[i]);
    if (!node) continue;
    const auto label = std::to_string(i + 1);
    if (node->on_true >= n) {
      issues.push_back({i + 1, "dangling index " + std::to_string(node->on_true + 1) + " in equation " + label});
    }
    if (node->on_false >= n && node->on_false != node->on_true) {
      issues.push_back({i + 1, "dangling index " + std::to_string(node->on_false + 1) + " in equation " + label});
    }
    if (!is_valid(node->action)) {
      issues.push_back({i + 1, "malformed action '" + to_string(node->action) + "' in equation " + label});
    }
  }
  return issues;
}

void require_valid(const LinearSpec& spec) {
  auto issues = validate_spec(spec);
  if (issues.empty()) return;
  std::vector<Diagnostic> diagnostics;
  for (auto& issue : issues) diagnostics.push_back({Severity::Error, issue.equation, std::move(issue.message)});
  throw ValidationError(std::move(diagnostics));
}

FiniteThread pi(std::size_t depth, const LinearSpec& spec, std::size_t state) {
  require_valid(spec);
  if (state >= spec.size()) {
    throw ValidationError({{Severity::Error, 0, "state index " + std::to_string(state + 1) + " out of range"}});
  }
  std::map<std::pair<std::size_t, std::size_t>, FiniteThread> memo;
  auto unfold = [&](auto&& self, std::size_t n, std::size_t i) -> FiniteThread {
    if (n == 0) return FiniteThread::deadlock();
    if (auto it = memo.find({n, i}); it != memo.end()) return it->second;
    FiniteThread result = std::visit(
        Overloaded{
            [](const Termination&) { return FiniteThread::termination(); },
            [](const Deadlock&) { return FiniteThread::deadlock(); },
            [&](const PostConditional& p) {
              FiniteThread left = self(self, n - 1, p.on_true);
              FiniteThread right = p.on_false == p.on_true ? left : self(self, n - 1, p.on_false);
              return FiniteThread::post_conditional(std::move(left), p.action, std::move(right));
            },
        },
        spec.equations[i]);
    memo.emplace(std::pair{n, i}, result);
    return result;
  };
  return unfold(unfold, depth, state);
}

LinearSpec disjoint_union(const LinearSpec& lhs, const LinearSpec& rhs) {
  LinearSpec out = lhs;
  const std::size_t offset = lhs.size();
  for (const auto& eq : rhs.equations) {
    if (const auto* p = std::get_if<PostConditional>(&eq)) {
      out.equations.push_back(PostConditional{p->on_true + offset, p->action, p->on_false + offset});
    } else {
      out.equations.push_back(eq);
    }
  }
  return out;
}

namespace {

using StatePair = std::pair<std::size_t, std::size_t>;

// Shortest mismatching pair reachable in lock step from the roots, if any.
// `strict` compares for equality; otherwise a Deadlock on the left side is
// below anything and ends the exploration along that path.
struct PairSearch {
  std::optional<StatePair> bad;
  std::map<StatePair, std::pair<StatePair, bool>> parent;
};

PairSearch search_pairs(const LinearSpec& lhs, const LinearSpec& rhs, bool strict) {
  PairSearch result;
  const StatePair start{lhs.root, rhs.root};
  std::set<StatePair> seen{start};
  std::deque<StatePair> queue{start};
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    const Equation& a = lhs.equations[i];
    const Equation& b = rhs.equations[j];
    if (!strict && std::holds_alternative<Deadlock>(a)) continue;
    const auto* pa = std::get_if<PostConditional>(&a);
    const auto* pb = std::get_if<PostConditional>(&b);
    bool ok;
    if (pa && pb) {
      ok = pa->action == pb->action;
    } else {
      ok = a.index() == b.index();
    }
    if (!ok) {
      result.bad = StatePair{i, j};
      return result;
    }
    if (!pa) continue;
    for (bool reply : {true, false}) {
      const StatePair next = reply ? StatePair{pa->on_true, pb->on_true} : StatePair{pa->on_false, pb->on_false};
      if (seen.insert(next).second) {
        result.parent.emplace(next, std::pair{StatePair{i, j}, reply});
        queue.push_back(next);
      }
    }
  }
  return result;
}

std::string describe(const Equation& eq) {
  return std::visit(Overloaded{
                        [](const Termination&) { return std::string("S"); },
                        [](const Deadlock&) { return std::string("D"); },
                        [](const PostConditional& p) { return to_string(p.action); },
                    },
                    eq);
}

}  // namespace

bool refines(const LinearSpec& lhs, const LinearSpec& rhs) {
  require_valid(lhs);
  require_valid(rhs);
  return !search_pairs(lhs, rhs, false).bad;
}

bool refines_at_depth(const LinearSpec& lhs, const LinearSpec& rhs, std::size_t depth) {
  require_valid(lhs);
  require_valid(rhs);
  const LinearSpec joint = disjoint_union(lhs, rhs);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, bool> memo;
  auto below = [&](auto&& self, std::size_t i, std::size_t j, std::size_t n) -> bool {
    if (n == 0) return true;
    const Equation& a = joint.equations[i];
    const Equation& b = joint.equations[j];
    if (std::holds_alternative<Deadlock>(a)) return true;
    if (std::holds_alternative<Termination>(a)) return std::holds_alternative<Termination>(b);
    const auto& pa = std::get<PostConditional>(a);
    const auto* pb = std::get_if<PostConditional>(&b);
    if (!pb || pa.action != pb->action) return false;
    const auto key = std::tuple{i, j, n};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const bool r = self(self, pa.on_true, pb->on_true, n - 1) && self(self, pa.on_false, pb->on_false, n - 1);
    memo[key] = r;
    return r;
  };
  return below(below, lhs.root, rhs.root + lhs.size(), depth);
}

EqualityResult thread_equal(const LinearSpec& lhs, const LinearSpec& rhs) {
  require_valid(lhs);
  require_valid(rhs);
  auto search = search_pairs(lhs, rhs, true);
  if (!search.bad) return {};

  Witness witness;
  witness.lhs = describe(lhs.equations[search.bad->first]);
  witness.rhs = describe(rhs.equations[search.bad->second]);
  StatePair at = *search.bad;
  for (auto it = search.parent.find(at); it != search.parent.end(); it = search.parent.find(at)) {
    const auto& [from, reply] = it->second;
    witness.path.push_back({std::get<PostConditional>(lhs.equations[from.first]).action, reply});
    at = from;
  }
  std::reverse(witness.path.begin(), witness.path.end());
  return {false, std::move(witness)};
}

std::string to_string(const Witness& witness) {
  std::string out = "trace:";
  if (witness.path.empty()) out += " (empty)";
  for (const auto& step : witness.path) out += " " + to_string(step.action) + (step.reply ? "/T" : "/F");
  return out + "; lhs: " + witness.lhs + "; rhs: " + witness.rhs;
}

LinearSpec trim_unreachable(const LinearSpec& spec) {
  require_valid(spec);
  std::vector<std::size_t> order;
  std::map<std::size_t, std::size_t> renumber;
  std::deque<std::size_t> queue{spec.root};
  renumber.emplace(spec.root, 0);
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    order.push_back(i);
    if (const auto* p = std::get_if<PostConditional>(&spec.equations[i])) {
      for (std::size_t next : {p->on_true, p->on_false}) {
        if (renumber.emplace(next, renumber.size()).second) queue.push_back(next);
      }
    }
  }
  LinearSpec out;
  out.root = 0;
  for (std::size_t i : order) {
    if (const auto* p = std::get_if<PostConditional>(&spec.equations[i])) {
      out.equations.push_back(PostConditional{renumber.at(p->on_true), p->action, renumber.at(p->on_false)});
    } else {
      out.equations.push_back(spec.equations[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ReplyScript ReplyScript::parse(std::string_view text) {
  std::vector<bool> replies;
  detail::TextCursor cursor(text);
  while (!cursor.at_end()) {
    const char c = cursor.peek();
    if (c == 'T' || c == 't' || c == '1') {
      replies.push_back(true);
    } else if (c == 'F' || c == 'f' || c == '0') {
      replies.push_back(false);
    } else if (c != ',') {
      cursor.fail(std::string("unexpected reply character '") + c + "'");
    }
    cursor.consume(std::string_view(&c, 1));
  }
  return ReplyScript(std::move(replies));
}

std::optional<bool> ReplyScript::next() {
  if (cursor_ >= replies_.size()) return std::nullopt;
  return replies_[cursor_++];
}

std::string_view to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::Termination:
      return "S";
    case TraceStatus::Deadlock:
      return "D";
    case TraceStatus::ScriptExhausted:
      return "cutoff (script exhausted)";
    case TraceStatus::StepLimit:
      return "cutoff (step limit)";
    case TraceStatus::BudgetExhausted:
      return "divergence suspected";
  }
  return "?";
}

std::string to_string(const Trace& trace) {
  std::string out;
  for (const auto& step : trace.steps) out += to_string(step.action) + (step.reply ? " T\n" : " F\n");
  out += "status: ";
  out += to_string(trace.status);
  out += "\n";
  return out;
}

Trace simulate_thread(const LinearSpec& spec, ReplyScript script, std::size_t max_steps) {
  require_valid(spec);
  Trace trace;
  std::size_t state = spec.root;
  while (true) {
    const Equation& eq = spec.equations[state];
    if (std::holds_alternative<Termination>(eq)) {
      trace.status = TraceStatus::Termination;
      return trace;
    }
    if (std::holds_alternative<Deadlock>(eq)) {
      trace.status = TraceStatus::Deadlock;
      return trace;
    }
    if (trace.steps.size() >= max_steps) {
      trace.status = TraceStatus::StepLimit;
      return trace;
    }
    const auto reply = script.next();
    if (!reply) {
      trace.status = TraceStatus::ScriptExhausted;
      return trace;
    }
    const auto& node = std::get<PostConditional>(eq);
    trace.steps.push_back({node.action, *reply});
    state = *reply ? node.on_true : node.on_false;
  }
}

Trace simulate_thread(const FiniteThread& thread, ReplyScript script, std::size_t max_steps) {
  Trace trace;
  const FiniteThread* at = &thread;
  while (true) {
    if (at->is_termination()) {
      trace.status = TraceStatus::Termination;
      return trace;
    }
    if (at->is_deadlock()) {
      trace.status = TraceStatus::Deadlock;
      return trace;
    }
    if (trace.steps.size() >= max_steps) {
      trace.status = TraceStatus::StepLimit;
      return trace;
    }
    const auto reply = script.next();
    if (!reply) {
      trace.status = TraceStatus::ScriptExhausted;
      return trace;
    }
    trace.steps.push_back({at->action(), *reply});
    at = *reply ? &at->on_true() : &at->on_false();
  }
}

// ---------------------------------------------------------------------------

std::string to_text(const LinearSpec& spec) {
  std::ostringstream out;
  out << "root " << spec.root + 1 << '\n';
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out << 'X' << i + 1 << " = ";
    std::visit(Overloaded{
                   [&](const Termination&) { out << 'S'; },
                   [&](const Deadlock&) { out << 'D'; },
                   [&](const PostConditional& p) {
                     out << 'X' << p.on_true + 1 << " <" << to_string(p.action) << "> X" << p.on_false + 1;
                   },
               },
               spec.equations[i]);
    out << '\n';
  }
  return out.str();
}

LinearSpec parse_spec(std::string_view text) {
  std::map<std::size_t, Equation> equations;
  std::optional<std::size_t> root;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const auto line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    detail::TextCursor cursor(line, line_no);
    if (cursor.at_end()) continue;
    if (!root) {
      if (!cursor.consume("root")) cursor.fail("expected 'root N' on the first line");
      const Nat r = cursor.expect_nat();
      if (r == 0) cursor.fail("root index must be positive");
      root = static_cast<std::size_t>(r - 1);
      if (!cursor.at_end()) cursor.fail("unexpected trailing input");
      continue;
    }
    auto variable = [&]() -> std::size_t {
      cursor.expect("X");
      const Nat index = cursor.expect_nat();
      if (index == 0) cursor.fail("equation indices start at 1");
      return static_cast<std::size_t>(index - 1);
    };
    const std::size_t lhs = variable();
    cursor.expect("=");
    Equation eq;
    if (cursor.consume("S")) {
      eq = Termination{};
    } else if (cursor.consume("D")) {
      eq = Deadlock{};
    } else {
      const std::size_t on_true = variable();
      cursor.expect("<");
      Action action = cursor.action();
      cursor.expect(">");
      eq = PostConditional{on_true, std::move(action), variable()};
    }
    if (!cursor.at_end()) cursor.fail("unexpected trailing input");
    if (!equations.emplace(lhs, std::move(eq)).second) {
      cursor.fail("duplicate equation X" + std::to_string(lhs + 1));
    }
  }
  if (!root) throw ParseError(1, 1, "empty specification");
  LinearSpec spec;
  spec.root = *root;
  std::size_t expected = 0;
  for (auto& [index, eq] : equations) {
    if (index != expected) throw ParseError(line_no, 1, "missing equation X" + std::to_string(expected + 1));
    spec.equations.push_back(std::move(eq));
    ++expected;
  }
  return spec;
}

}  // namespace pgakit
