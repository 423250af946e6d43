#include "pgakit/extraction.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>

#include "pgakit/errors.hpp"

namespace pgakit {

namespace {

// A position in a program: the outer index into prefix+body followed by one
// inner index per enclosing unit. All indices are 0-based.
using Path = std::vector<std::size_t>;

class Layout {
 public:
  explicit Layout(const CanonicalProgram& program) : prefix_size_(program.prefix.size()) {
    all_ = program.prefix;
    if (program.body) {
      all_.insert(all_.end(), program.body->begin(), program.body->end());
      body_size_ = program.body->size();
    }
  }

  bool empty() const { return all_.empty(); }

  const Instruction& at(const Path& path) const {
    const Instruction* current = &all_[path[0]];
    for (std::size_t level = 1; level < path.size(); ++level) current = &current->as<Unit>().body[path[level]];
    return *current;
  }

  std::optional<Path> start() const {
    if (all_.empty()) return std::nullopt;
    return descend({0});
  }

  // Jump `distance` >= 1 instructions forward from `path`.
  std::optional<Path> advance(Path path, Nat distance) const {
    while (path.size() > 1) {
      const std::size_t inner = path.back();
      path.pop_back();
      const Sequence& body = at(path).as<Unit>().body;
      const Nat remaining = body.size() - 1 - inner;
      if (distance <= remaining) {
        path.push_back(inner + static_cast<std::size_t>(distance));
        return descend(std::move(path));
      }
      distance -= remaining;
    }
    const Nat left = all_.size() - path[0];
    if (distance < left) {
      path[0] += static_cast<std::size_t>(distance);
      return descend(std::move(path));
    }
    if (body_size_ == 0) return std::nullopt;
    const Nat beyond = distance - left;
    path[0] = prefix_size_ + static_cast<std::size_t>(beyond % body_size_);
    return descend(std::move(path));
  }

 private:
  Path descend(Path path) const {
    while (const auto* unit = at(path).get_if<Unit>()) {
      if (unit->body.empty()) throw ValidationError({{Severity::Error, path[0] + 1, "empty unit"}});
      path.push_back(0);
    }
    return path;
  }

  Sequence all_;
  std::size_t prefix_size_ = 0;
  std::size_t body_size_ = 0;
};

class Extractor {
 public:
  explicit Extractor(const CanonicalProgram& program) : layout_(program) {}

  LinearSpec run() {
    LinearSpec spec;
    spec.root = resolve(layout_.start());
    while (!pending_.empty()) {
      const Path path = pending_.front();
      pending_.pop_front();
      const std::size_t index = states_.at(path);
      const Instruction& instruction = layout_.at(path);
      auto one = [&] { return resolve(layout_.advance(path, 1)); };
      auto two = [&] { return resolve(layout_.advance(path, 2)); };
      if (const auto* basic = instruction.get_if<Basic>()) {
        const std::size_t next = one();
        equations_[index] = PostConditional{next, basic->action, next};
      } else if (const auto* pos = instruction.get_if<PosTest>()) {
        const std::size_t on_true = one();
        equations_[index] = PostConditional{on_true, pos->action, two()};
      } else {
        const auto& neg = instruction.as<NegTest>();
        const std::size_t on_true = two();
        equations_[index] = PostConditional{on_true, neg.action, one()};
      }
    }
    spec.equations = std::move(equations_);
    return spec;
  }

 private:
  // Follows jumps from `path` to the first halt or action-bearing position.
  std::size_t resolve(std::optional<Path> path) {
    std::set<Path> seen;
    while (path) {
      if (!seen.insert(*path).second) return terminal(deadlock_, Deadlock{});
      const Instruction& instruction = layout_.at(*path);
      if (instruction.is<Halt>()) return terminal(termination_, Termination{});
      if (const auto* jump = instruction.get_if<Jump>()) {
        if (jump->distance == 0) return terminal(deadlock_, Deadlock{});
        path = layout_.advance(std::move(*path), jump->distance);
        continue;
      }
      auto [it, inserted] = states_.try_emplace(*path, equations_.size());
      if (inserted) {
        equations_.emplace_back(Deadlock{});
        pending_.push_back(*path);
      }
      return it->second;
    }
    return terminal(deadlock_, Deadlock{});
  }

  std::size_t terminal(std::optional<std::size_t>& slot, Equation equation) {
    if (!slot) {
      slot = equations_.size();
      equations_.push_back(std::move(equation));
    }
    return *slot;
  }

  Layout layout_;
  std::map<Path, std::size_t> states_;
  std::deque<Path> pending_;
  std::vector<Equation> equations_;
  std::optional<std::size_t> termination_;
  std::optional<std::size_t> deadlock_;
};

void reject(const Sequence& sequence, std::size_t offset, bool allow_units, std::vector<Diagnostic>& out) {
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& instruction = sequence[i];
    if (is_rigid_loop_instruction(instruction)) {
      out.push_back({Severity::Error, offset + i + 1,
                     "rigid-loop instruction " + to_string(instruction) + " has no direct extraction"});
    } else if (const auto* unit = instruction.get_if<Unit>()) {
      if (!allow_units) {
        out.push_back({Severity::Error, offset + i + 1, "unit instruction in a PGA program"});
      } else if (unit->body.empty()) {
        out.push_back({Severity::Error, offset + i + 1, "empty unit"});
      } else {
        reject(unit->body, offset + i, true, out);
      }
    }
  }
}

void require_extractable(const CanonicalProgram& program, bool allow_units) {
  std::vector<Diagnostic> issues;
  reject(program.prefix, 0, allow_units, issues);
  if (program.body) {
    if (program.body->empty()) issues.push_back({Severity::Error, 0, "empty repeated body"});
    reject(*program.body, program.prefix.size(), allow_units, issues);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace

LinearSpec extract_pga(const CanonicalProgram& program) {
  require_extractable(program, false);
  return Extractor(program).run();
}

LinearSpec extract_pgau(const CanonicalProgram& program) {
  require_extractable(program, true);
  return Extractor(program).run();
}

CanonicalProgram synthesize(const LinearSpec& spec) {
  require_valid(spec);
  const Equation& root = spec.equations[spec.root];
  if (std::holds_alternative<Termination>(root)) return {{Halt{}}, std::nullopt};
  if (std::holds_alternative<Deadlock>(root)) return {{Jump{0}}, std::nullopt};

  std::vector<std::size_t> order{spec.root};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i != spec.root) order.push_back(i);
  }
  std::vector<Nat> start(spec.size());
  Nat length = 0;
  for (std::size_t i : order) {
    start[i] = length;
    length += std::holds_alternative<PostConditional>(spec.equations[i]) ? 3 : 1;
  }
  auto distance = [&](Nat from, std::size_t target) {
    const Nat d = (start[target] + length - from) % length;
    return Jump{d == 0 ? length : d};
  };

  Sequence body;
  for (std::size_t i : order) {
    const Equation& eq = spec.equations[i];
    if (std::holds_alternative<Termination>(eq)) {
      body.push_back(Halt{});
    } else if (std::holds_alternative<Deadlock>(eq)) {
      body.push_back(Jump{0});
    } else {
      const auto& pc = std::get<PostConditional>(eq);
      body.push_back(PosTest{pc.action});
      body.push_back(distance(start[i] + 1, pc.on_true));
      body.push_back(distance(start[i] + 2, pc.on_false));
    }
  }
  return {{}, std::move(body)};
}

EqualityResult behav_equiv(const CanonicalProgram& lhs, const CanonicalProgram& rhs) {
  return thread_equal(extract_pgau(lhs), extract_pgau(rhs));
}

CanonicalProgram pgau2pga(const CanonicalProgram& program) {
  auto is_unit = [](const Instruction& i) { return i.is<Unit>(); };
  if (!contains(program, +is_unit)) return program;
  return synthesize(extract_pgau(program));
}

}  // namespace pgakit
