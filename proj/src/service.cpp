#include "pgakit/service.hpp"

#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "pgakit/errors.hpp"
#include "pgakit/extraction.hpp"
#include "text_cursor.hpp"

namespace pgakit {

std::string to_string(const CoAction& co_action) {
  if (!co_action.argument) return co_action.method;
  return co_action.method + ":" + std::to_string(*co_action.argument);
}

Service Service::down_counter(Nat initial, Nat max) {
  if (initial > max) throw std::invalid_argument("down counter: initial value exceeds max");
  return Service(Kind::Down, initial, max);
}

Service Service::full_counter(Nat initial) { return Service(Kind::Full, initial, std::nullopt); }

Service Service::with_initial(ServiceState state) const {
  if (max_ && state > *max_) throw std::invalid_argument("service state outside the enumeration");
  Service copy = *this;
  copy.initial_ = state;
  return copy;
}

bool Service::accepts(const CoAction& co_action) const {
  if (co_action.method == "dec") return !co_action.argument;
  if (co_action.method == "inc") return kind_ == Kind::Full && !co_action.argument;
  if (co_action.method == "set") return co_action.argument && (!max_ || *co_action.argument <= *max_);
  return false;
}

std::optional<Reply> Service::step(ServiceState state, const CoAction& co_action) const {
  if (!accepts(co_action)) return std::nullopt;
  if (co_action.method == "dec") {
    if (state == 0) return Reply{false, 0};
    return Reply{true, state - 1};
  }
  if (co_action.method == "inc") return Reply{true, state + 1};
  return Reply{true, *co_action.argument};
}

std::vector<ServiceState> Service::enumeration() const {
  if (!max_) throw std::logic_error("service has no finite enumeration");
  std::vector<ServiceState> states;
  for (Nat s = 0; s <= *max_; ++s) states.push_back(s);
  return states;
}

std::string Service::describe() const {
  if (kind_ == Kind::Down) {
    return "dc(init=" + std::to_string(initial_) + ",max=" + std::to_string(*max_) + ")";
  }
  return "counter(init=" + std::to_string(initial_) + ")";
}

Binding parse_binding(std::string_view text) {
  detail::TextCursor cursor(text);
  auto focus = cursor.identifier();
  if (!focus) cursor.fail("expected a focus");
  if (cursor.consume(":")) *focus += ":" + std::to_string(cursor.expect_nat());
  cursor.expect("=");
  auto name = cursor.identifier();
  if (!name || (*name != "dc" && *name != "counter")) cursor.fail("expected 'dc' or 'counter'");
  cursor.expect("(");
  std::optional<Nat> init;
  std::optional<Nat> max;
  while (!cursor.consume(")")) {
    auto key = cursor.identifier();
    if (!key || (*key != "init" && !(*key == "max" && *name == "dc"))) cursor.fail("unknown service argument");
    cursor.expect("=");
    (*key == "init" ? init : max) = cursor.expect_nat();
    if (!cursor.consume(",") && cursor.peek() != ')') cursor.fail("expected ',' or ')'");
  }
  if (!cursor.at_end()) cursor.fail("unexpected text after binding");
  if (*name == "counter") return {*focus, Service::full_counter(init.value_or(0))};
  if (init.value_or(0) > max.value_or(init.value_or(0))) cursor.fail("init exceeds max");
  return {*focus, Service::down_counter(init.value_or(0), max.value_or(init.value_or(0)))};
}

std::string to_string(const Binding& binding) { return binding.focus + "=" + binding.service.describe(); }

void require_distinct_foci(const std::vector<Binding>& bindings) {
  std::set<std::string> seen;
  std::vector<Diagnostic> issues;
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (!seen.insert(bindings[i].focus).second) {
      issues.push_back({Severity::Error, i + 1, "focus " + bindings[i].focus + " is bound twice"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace {

bool on_focus(const Action& action, std::string_view focus) { return action.focus && *action.focus == focus; }

CoAction co_action_of(const Action& action) { return {action.method, action.argument}; }

class Product {
 public:
  Product(const LinearSpec& spec, std::string_view focus, const Service& service)
      : spec_(spec), focus_(focus), service_(service) {}

  LinearSpec run() {
    LinearSpec out;
    out.root = resolve(spec_.root, service_.initial());
    while (!pending_.empty()) {
      const auto [i, s] = pending_.front();
      pending_.pop_front();
      const auto& pc = std::get<PostConditional>(spec_.equations[i]);
      const std::size_t index = states_.at({i, s});
      const std::size_t on_true = resolve(pc.on_true, s);
      equations_[index] = PostConditional{on_true, pc.action, resolve(pc.on_false, s)};
    }
    out.equations = std::move(equations_);
    return out;
  }

 private:
  std::size_t resolve(std::size_t i, ServiceState s) {
    std::set<std::pair<std::size_t, ServiceState>> silent;
    while (true) {
      const Equation& eq = spec_.equations[i];
      if (std::holds_alternative<Termination>(eq)) return terminal(termination_, Termination{});
      if (std::holds_alternative<Deadlock>(eq)) return terminal(deadlock_, Deadlock{});
      const auto& pc = std::get<PostConditional>(eq);
      if (!on_focus(pc.action, focus_)) break;
      if (!silent.insert({i, s}).second) return terminal(deadlock_, Deadlock{});
      const auto reply = service_.step(s, co_action_of(pc.action));
      if (!reply) return terminal(deadlock_, Deadlock{});
      i = reply->value ? pc.on_true : pc.on_false;
      s = reply->next;
    }
    auto [it, inserted] = states_.try_emplace({i, s}, equations_.size());
    if (inserted) {
      equations_.emplace_back(Deadlock{});
      pending_.emplace_back(i, s);
    }
    return it->second;
  }

  std::size_t terminal(std::optional<std::size_t>& slot, Equation equation) {
    if (!slot) {
      slot = equations_.size();
      equations_.push_back(std::move(equation));
    }
    return *slot;
  }

  const LinearSpec& spec_;
  std::string_view focus_;
  const Service& service_;
  std::map<std::pair<std::size_t, ServiceState>, std::size_t> states_;
  std::deque<std::pair<std::size_t, ServiceState>> pending_;
  std::vector<Equation> equations_;
  std::optional<std::size_t> termination_;
  std::optional<std::size_t> deadlock_;
};

// Outcome of running silent steps from (equation, state): a terminal
// equation, or a visible equation with the service state it is reached in.
struct Resolved {
  enum class Kind { Termination, Deadlock, Visible } kind;
  std::size_t equation = 0;
  ServiceState state = 0;
};

class BoundedProduct {
 public:
  BoundedProduct(const LinearSpec& spec, std::string_view focus, const Service& service, std::size_t limit)
      : spec_(spec), focus_(focus), service_(service), limit_(limit) {}

  FiniteThread build(std::size_t i, ServiceState s, std::size_t depth) {
    if (depth == 0) return FiniteThread::deadlock();
    const Resolved r = resolve(i, s);
    if (r.kind == Resolved::Kind::Termination) return FiniteThread::termination();
    if (r.kind == Resolved::Kind::Deadlock) return FiniteThread::deadlock();
    const auto key = std::make_tuple(r.equation, r.state, depth);
    if (auto it = built_.find(key); it != built_.end()) return it->second;
    const auto& pc = std::get<PostConditional>(spec_.equations[r.equation]);
    FiniteThread on_true = build(pc.on_true, r.state, depth - 1);
    FiniteThread thread =
        FiniteThread::post_conditional(std::move(on_true), pc.action, build(pc.on_false, r.state, depth - 1));
    built_.emplace(key, thread);
    return thread;
  }

  bool exhausted() const noexcept { return exhausted_; }

 private:
  Resolved resolve(std::size_t i, ServiceState s) {
    const auto start = std::make_pair(i, s);
    if (auto it = resolved_.find(start); it != resolved_.end()) return it->second;
    std::set<std::pair<std::size_t, ServiceState>> silent;
    Resolved result{Resolved::Kind::Deadlock};
    while (true) {
      const Equation& eq = spec_.equations[i];
      if (std::holds_alternative<Termination>(eq)) {
        result = {Resolved::Kind::Termination};
        break;
      }
      if (std::holds_alternative<Deadlock>(eq)) break;
      const auto& pc = std::get<PostConditional>(eq);
      if (!on_focus(pc.action, focus_)) {
        result = {Resolved::Kind::Visible, i, s};
        break;
      }
      if (!silent.insert({i, s}).second) break;
      if (silent.size() > limit_) {
        exhausted_ = true;
        break;
      }
      const auto reply = service_.step(s, co_action_of(pc.action));
      if (!reply) break;
      i = reply->value ? pc.on_true : pc.on_false;
      s = reply->next;
    }
    resolved_.emplace(start, result);
    return result;
  }

  const LinearSpec& spec_;
  std::string_view focus_;
  const Service& service_;
  std::size_t limit_;
  bool exhausted_ = false;
  std::map<std::pair<std::size_t, ServiceState>, Resolved> resolved_;
  std::map<std::tuple<std::size_t, ServiceState, std::size_t>, FiniteThread> built_;
};

}  // namespace

LinearSpec apply_use_finite(const LinearSpec& spec, std::string_view focus, const Service& service) {
  require_valid(spec);
  if (!service.has_enumeration()) {
    throw ValidationError(
        {{Severity::Error, 0, "service bound to " + std::string(focus) + " has no finite enumeration"}});
  }
  return Product(spec, focus, service).run();
}

BoundedUse apply_use_bounded(const LinearSpec& spec, std::string_view focus, const Service& service,
                             std::size_t depth, std::size_t silent_limit) {
  require_valid(spec);
  BoundedProduct product(spec, focus, service, silent_limit);
  FiniteThread thread = product.build(spec.root, service.initial(), depth);
  return {std::move(thread), product.exhausted() ? UseStatus::BudgetExhausted : UseStatus::Complete};
}

Trace simulate_using(const LinearSpec& spec, const std::vector<Binding>& bindings, ReplyScript script,
                     std::size_t max_steps, std::size_t silent_limit) {
  require_valid(spec);
  require_distinct_foci(bindings);
  std::vector<ServiceState> states;
  for (const auto& b : bindings) states.push_back(b.service.initial());
  auto bound = [&](const Action& action) -> const Binding* {
    for (const auto& b : bindings) {
      if (on_focus(action, b.focus)) return &b;
    }
    return nullptr;
  };

  Trace trace;
  std::size_t i = spec.root;
  std::set<std::pair<std::size_t, std::vector<ServiceState>>> silent;
  while (true) {
    const Equation& eq = spec.equations[i];
    if (std::holds_alternative<Termination>(eq)) {
      trace.status = TraceStatus::Termination;
      return trace;
    }
    if (std::holds_alternative<Deadlock>(eq)) {
      trace.status = TraceStatus::Deadlock;
      return trace;
    }
    const auto& pc = std::get<PostConditional>(eq);
    if (const Binding* b = bound(pc.action)) {
      if (!silent.insert({i, states}).second) {
        trace.status = TraceStatus::Deadlock;
        return trace;
      }
      if (silent.size() > silent_limit) {
        trace.status = TraceStatus::BudgetExhausted;
        return trace;
      }
      auto& state = states[static_cast<std::size_t>(b - bindings.data())];
      const auto reply = b->service.step(state, co_action_of(pc.action));
      if (!reply) {
        trace.status = TraceStatus::Deadlock;
        return trace;
      }
      state = reply->next;
      i = reply->value ? pc.on_true : pc.on_false;
      continue;
    }
    silent.clear();
    if (trace.steps.size() >= max_steps) {
      trace.status = TraceStatus::StepLimit;
      return trace;
    }
    const auto reply = script.next();
    if (!reply) {
      trace.status = TraceStatus::ScriptExhausted;
      return trace;
    }
    trace.steps.push_back({pc.action, *reply});
    i = *reply ? pc.on_true : pc.on_false;
  }
}

LinearSpec apply_bindings(const ProjectedProgram& projected) {
  require_distinct_foci(projected.bindings);
  LinearSpec spec = extract_pgau(projected.program);
  for (const auto& binding : projected.bindings) spec = apply_use_finite(spec, binding.focus, binding.service);
  return spec;
}

}  // namespace pgakit
