#pragma once

// Reference implementations used only by tests. They follow the defining
// equations literally and share no code with the library beyond its data
// types.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pgakit/program.hpp"
#include "pgakit/thread.hpp"

namespace pgakit::testing {

// ---------------------------------------------------------------------------
// Threads

/// pi_k(P) below pi_k(Q) for the roots of two specs, by the order clauses.
class DepthOrder {
 public:
  DepthOrder(const LinearSpec& lhs, const LinearSpec& rhs) : lhs_(lhs), rhs_(rhs) {}

  bool below(std::size_t k) { return below(lhs_.root, rhs_.root, k); }

 private:
  bool below(std::size_t i, std::size_t j, std::size_t k) {
    if (k == 0) return true;
    const Equation& a = lhs_.equations[i];
    const Equation& b = rhs_.equations[j];
    if (std::holds_alternative<Deadlock>(a)) return true;
    if (std::holds_alternative<Termination>(a)) return std::holds_alternative<Termination>(b);
    if (!std::holds_alternative<PostConditional>(b)) return false;
    const auto& x = std::get<PostConditional>(a);
    const auto& y = std::get<PostConditional>(b);
    if (x.action != y.action) return false;
    const auto key = std::make_tuple(i, j, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool result = below(x.on_true, y.on_true, k - 1) && below(x.on_false, y.on_false, k - 1);
    memo_[key] = result;
    return result;
  }

  const LinearSpec& lhs_;
  const LinearSpec& rhs_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, bool> memo_;
};

/// Checks pi_k below pi_k for every k up to 3n, n the total equation count.
inline bool oracle_refines(const LinearSpec& lhs, const LinearSpec& rhs) {
  DepthOrder order(lhs, rhs);
  const std::size_t bound = 3 * (lhs.size() + rhs.size());
  for (std::size_t k = 0; k <= bound; ++k) {
    if (!order.below(k)) return false;
  }
  return true;
}

inline bool oracle_equal(const LinearSpec& lhs, const LinearSpec& rhs) {
  return oracle_refines(lhs, rhs) && oracle_refines(rhs, lhs);
}

/// pi_k unfolded as a tree string: `S`, `D` or `[a T F]`.
inline std::string oracle_pi(const LinearSpec& spec, std::size_t state, std::size_t k) {
  if (k == 0) return "D";
  const Equation& eq = spec.equations[state];
  if (std::holds_alternative<Termination>(eq)) return "S";
  if (std::holds_alternative<Deadlock>(eq)) return "D";
  const auto& pc = std::get<PostConditional>(eq);
  return "[" + to_string(pc.action) + " " + oracle_pi(spec, pc.on_true, k - 1) + " " +
         oracle_pi(spec, pc.on_false, k - 1) + "]";
}

inline std::string render(const FiniteThread& t) {
  if (t.is_termination()) return "S";
  if (t.is_deadlock()) return "D";
  return "[" + to_string(t.action()) + " " + render(t.on_true()) + " " + render(t.on_false()) + "]";
}

// ---------------------------------------------------------------------------
// Instruction streams

/// The instruction at 0-based position `pos` of the infinite stream a
/// program denotes, or nullopt past the end of a finite one.
inline std::optional<Instruction> stream_at(const RawProgram& program, std::size_t pos) {
  for (const auto& part : program.parts) {
    if (part.instructions.empty()) continue;
    if (part.repeated) return part.instructions[pos % part.instructions.size()];
    if (pos < part.instructions.size()) return part.instructions[pos];
    pos -= part.instructions.size();
  }
  return std::nullopt;
}

/// Equal instruction streams: compared far enough that both are periodic
/// and a full common period has been seen.
inline bool same_stream(const RawProgram& lhs, const RawProgram& rhs) {
  auto shape = [](const RawProgram& p) {
    std::size_t finite = 0;
    std::size_t period = 1;
    for (const auto& part : p.parts) {
      if (part.repeated) {
        period = part.instructions.size();
        break;
      }
      finite += part.instructions.size();
    }
    return std::pair{finite, period};
  };
  const auto [f1, p1] = shape(lhs);
  const auto [f2, p2] = shape(rhs);
  const std::size_t horizon = f1 + f2 + 2 * p1 * p2 + 2;
  for (std::size_t i = 0; i < horizon; ++i) {
    if (stream_at(lhs, i) != stream_at(rhs, i)) return false;
  }
  return true;
}

inline RawProgram raw(const CanonicalProgram& p) {
  RawProgram out;
  if (!p.prefix.empty()) out.parts.push_back({p.prefix, false});
  if (p.body) out.parts.push_back({*p.body, true});
  return out;
}

// ---------------------------------------------------------------------------
// Interpreters

namespace detail {

class Machine {
 public:
  explicit Machine(const CanonicalProgram& p) : prefix_(p.prefix.size()) {
    code_ = p.prefix;
    if (p.body) {
      code_.insert(code_.end(), p.body->begin(), p.body->end());
      body_ = p.body->size();
    }
  }

  std::size_t size() const { return code_.size(); }
  const Instruction& at(std::size_t pos) const { return code_[pos]; }

  /// Position reached `distance` steps after `pos`, wrapping in the body.
  std::optional<std::size_t> move(std::size_t pos, Nat distance) const {
    const Nat target = pos + distance;
    if (target < code_.size()) return static_cast<std::size_t>(target);
    if (body_ == 0) return std::nullopt;
    return prefix_ + static_cast<std::size_t>((target - prefix_) % body_);
  }

  bool wraps(std::size_t pos, Nat distance) const { return pos + distance >= code_.size(); }

 private:
  Sequence code_;
  std::size_t prefix_;
  std::size_t body_ = 0;
};

// Runs one visible step, returning the successor or a terminal status.
struct Step {
  std::optional<std::size_t> next;
  std::optional<TraceStatus> stop;
};

inline Step visible(const Machine& m, std::size_t pos, std::vector<bool>::const_iterator& reply,
                    std::vector<bool>::const_iterator end, Trace& trace, std::size_t max_steps) {
  const Instruction& ins = m.at(pos);
  if (trace.steps.size() >= max_steps) return {std::nullopt, TraceStatus::StepLimit};
  if (reply == end) return {std::nullopt, TraceStatus::ScriptExhausted};
  const bool r = *reply++;
  Action action;
  Nat skip = 1;
  if (const auto* b = ins.get_if<Basic>()) {
    action = b->action;
  } else if (const auto* t = ins.get_if<PosTest>()) {
    action = t->action;
    skip = r ? 1 : 2;
  } else {
    action = ins.as<NegTest>().action;
    skip = r ? 2 : 1;
  }
  trace.steps.push_back({action, r});
  return {m.move(pos, skip), std::nullopt};
}

}  // namespace detail

/// Executes a PGA program instruction by instruction.
inline Trace run_pga(const CanonicalProgram& program, const std::vector<bool>& replies, std::size_t max_steps) {
  detail::Machine m(program);
  Trace trace;
  auto reply = replies.begin();
  std::optional<std::size_t> pos = m.size() ? std::optional<std::size_t>(0) : std::nullopt;
  std::size_t idle = 0;
  while (true) {
    if (!pos) {
      trace.status = TraceStatus::Deadlock;
      return trace;
    }
    const Instruction& ins = m.at(*pos);
    if (ins.is<Halt>()) {
      trace.status = TraceStatus::Termination;
      return trace;
    }
    if (const auto* j = ins.get_if<Jump>()) {
      if (j->distance == 0 || ++idle > m.size()) {
        trace.status = TraceStatus::Deadlock;
        return trace;
      }
      pos = m.move(*pos, j->distance);
      continue;
    }
    idle = 0;
    const auto step = detail::visible(m, *pos, reply, replies.end(), trace, max_steps);
    if (step.stop) {
      trace.status = *step.stop;
      return trace;
    }
    pos = step.next;
  }
}

/// Rigid loops read operationally: a header pushes a frame with the
/// remaining repetitions, a closure repeats or pops it, and any transfer out
/// of a loop's range drops its frame.
class LoopMachine {
 public:
  explicit LoopMachine(const CanonicalProgram& p) : m_(p) {
    std::vector<std::size_t> open;
    partner_.resize(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (m_.at(i).is<LoopHeader>()) {
        open.push_back(i);
      } else if (m_.at(i).is<LoopClose>() && !open.empty()) {
        partner_[i] = open.back();
        partner_[open.back()] = i;
        loops_.push_back({open.back(), i});
        open.pop_back();
      }
    }
  }

  /// Whether every transfer stays within the loops it starts in (entering
  /// only through headers) and no transfer inside a loop wraps around.
  bool structured() const {
    for (std::size_t s = 0; s < m_.size(); ++s) {
      const Instruction& ins = m_.at(s);
      std::vector<Nat> moves;
      if (ins.is<Basic>() || ins.is<LoopHeader>()) moves = {1};
      if (is_test(ins)) moves = {1, 2};
      if (ins.is<LoopClose>()) moves = {1};
      if (const auto* j = ins.get_if<Jump>(); j && j->distance > 0) moves = {j->distance};
      for (Nat d : moves) {
        auto t = m_.move(s, d);
        if (!t) continue;
        if (m_.wraps(s, d) && !inside(s).empty()) return false;
        auto allowed = inside(s);
        if (ins.is<LoopHeader>() && partner_[s]) allowed.push_back(s);
        for (std::size_t h : inside(*t)) {
          if (std::find(allowed.begin(), allowed.end(), h) == allowed.end()) return false;
        }
      }
    }
    return true;
  }

  Trace run(const std::vector<bool>& replies, std::size_t max_steps) const {
    struct Frame {
      std::size_t header;
      std::size_t closure;
      Nat remaining;
    };
    std::vector<Frame> frames;
    Trace trace;
    auto reply = replies.begin();
    std::optional<std::size_t> pos = m_.size() ? std::optional<std::size_t>(0) : std::nullopt;
    std::size_t idle = 0;
    auto land = [&](std::optional<std::size_t> target) {
      if (target) {
        while (!frames.empty() && !(frames.back().header < *target && *target <= frames.back().closure)) {
          frames.pop_back();
        }
      }
      return target;
    };
    while (true) {
      if (!pos || ++idle > 100000) {
        trace.status = TraceStatus::Deadlock;
        return trace;
      }
      const Instruction& ins = m_.at(*pos);
      if (ins.is<Halt>()) {
        trace.status = TraceStatus::Termination;
        return trace;
      }
      if (const auto* j = ins.get_if<Jump>()) {
        if (j->distance == 0) {
          trace.status = TraceStatus::Deadlock;
          return trace;
        }
        pos = land(m_.move(*pos, j->distance));
        continue;
      }
      if (const auto* h = ins.get_if<LoopHeader>()) {
        if (partner_[*pos]) frames.push_back({*pos, *partner_[*pos], h->count - 1});
        pos = land(m_.move(*pos, 1));
        continue;
      }
      if (ins.is<LoopClose>()) {
        if (partner_[*pos]) {
          if (frames.empty() || frames.back().closure != *pos) throw std::logic_error("loop entered sideways");
          if (frames.back().remaining > 0) {
            --frames.back().remaining;
            pos = frames.back().header + 1;
            continue;
          }
          frames.pop_back();
        }
        pos = land(m_.move(*pos, 1));
        continue;
      }
      idle = 0;
      const auto step = detail::visible(m_, *pos, reply, replies.end(), trace, max_steps);
      if (step.stop) {
        trace.status = *step.stop;
        return trace;
      }
      pos = land(step.next);
    }
  }

 private:
  // Headers of the loops whose range (header, closure] contains `pos`.
  std::vector<std::size_t> inside(std::size_t pos) const {
    std::vector<std::size_t> out;
    for (const auto& [h, c] : loops_) {
      if (h < pos && pos <= c) out.push_back(h);
    }
    return out;
  }

  detail::Machine m_;
  std::vector<std::optional<std::size_t>> partner_;
  std::vector<std::pair<std::size_t, std::size_t>> loops_;
};

inline bool same_trace(const Trace& a, const Trace& b) { return a.steps == b.steps && a.status == b.status; }

}  // namespace pgakit::testing
