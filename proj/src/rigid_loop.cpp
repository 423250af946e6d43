#include "pgakit/rigid_loop.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgakit/extraction.hpp"

namespace pgakit {

namespace {

Sequence concatenated(const CanonicalProgram& program) {
  Sequence all = program.prefix;
  if (program.body) all.insert(all.end(), program.body->begin(), program.body->end());
  return all;
}

// partner[i] is the matching closure of a header at i and vice versa,
// innermost-outermost from left to right.
std::vector<std::optional<std::size_t>> match_loops(const Sequence& sequence) {
  std::vector<std::optional<std::size_t>> partner(sequence.size());
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence[i].is<LoopHeader>()) {
      open.push_back(i);
    } else if (sequence[i].is<LoopClose>() && !open.empty()) {
      partner[i] = open.back();
      partner[open.back()] = i;
      open.pop_back();
    }
  }
  return partner;
}

bool has_loops(const CanonicalProgram& program) { return contains(program, &is_rigid_loop_instruction); }

void require_well_formed(const CanonicalProgram& program) {
  auto diagnostics = validate_pgarl(program);
  if (has_errors(diagnostics)) {
    std::erase_if(diagnostics, [](const Diagnostic& d) { return d.severity != Severity::Error; });
    throw ValidationError(std::move(diagnostics));
  }
}

Action rlc(std::size_t position, std::string method, std::optional<Nat> argument = std::nullopt) {
  return Action{"rlc:" + std::to_string(position), std::move(method), argument};
}

Jump raised(Nat distance, std::size_t k) { return Jump{distance + k + 2}; }

}  // namespace

std::vector<Diagnostic> validate_pgarl(const CanonicalProgram& program) {
  std::vector<Diagnostic> out;
  const Sequence all = concatenated(program);
  const std::size_t prefix_size = program.prefix.size();

  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].is<AnnClose>() || all[i].is<AnnJump>()) {
      out.push_back({Severity::Error, i + 1, "annotated instruction " + to_string(all[i]) + " in a source program"});
    } else if (all[i].is<Unit>()) {
      out.push_back({Severity::Error, i + 1, "unit instruction in a rigid-loop program"});
    }
  }

  const auto partner = match_loops(all);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (partner[i]) continue;
    if (all[i].is<LoopHeader>()) out.push_back({Severity::Warning, i + 1, "loop header without closure acts as #1"});
    if (all[i].is<LoopClose>()) out.push_back({Severity::Warning, i + 1, "loop closure without header acts as #1"});
  }

  if (program.body) {
    const Nat k = program.body->size();
    for (std::size_t i = 0; i < program.body->size(); ++i) {
      const auto* jump = (*program.body)[i].get_if<Jump>();
      if (jump && jump->distance > 0 && jump->distance % k == 0) {
        out.push_back({Severity::Error, prefix_size + i + 1,
                       "jump #" + std::to_string(jump->distance) + " in a repeated body of length " +
                           std::to_string(k) + " lands on itself"});
      }
    }
  }

  auto preceded_by_test = [&](std::size_t i) {
    if (i > 0 && is_test(all[i - 1])) return true;
    return program.body && !program.body->empty() && i == prefix_size && is_test(program.body->back());
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].is<LoopClose>() && preceded_by_test(i)) {
      out.push_back({Severity::Error, i + 1, "loop closure directly preceded by a test"});
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.position < b.position; });
  return out;
}

AnnotatedBody annotate(const Sequence& body, bool wrap) {
  AnnotatedBody out{body, {}};
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i].is<LoopHeader>()) {
      open.push_back(i);
    } else if (body[i].is<LoopClose>()) {
      if (open.empty()) {
        out.instructions[i] = AnnClose{0, 0};
        continue;
      }
      const std::size_t h = open.back();
      open.pop_back();
      out.instructions[i] = AnnClose{body[h].as<LoopHeader>().count - 1, i - h - 1};
      out.header_of[i + 1] = h + 1;
    }
  }

  std::vector<std::size_t> closures;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (out.instructions[i].is<AnnClose>()) closures.push_back(i);
  }
  const std::size_t n = body.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto* jump = body[i].get_if<Jump>();
    if (!jump || jump->distance == 0) continue;
    AnnJump annotated{jump->distance, {}};
    for (std::size_t j : closures) {
      const std::size_t d = wrap ? (j + n - i) % n : (j > i ? j - i : 0);
      if (d > 0 && d < jump->distance) {
        annotated.resets.push_back({j + 1, out.instructions[j].as<AnnClose>().repeats});
      }
    }
    if (!annotated.resets.empty()) out.instructions[i] = std::move(annotated);
  }
  return out;
}

Sequence erase_annotations(const Sequence& sequence) {
  Sequence out = sequence;
  for (auto& instruction : out) {
    if (instruction.is<AnnClose>()) {
      instruction = LoopClose{};
    } else if (const auto* jump = instruction.get_if<AnnJump>()) {
      instruction = Jump{jump->distance};
    }
  }
  return out;
}

Sequence phi(const Sequence& program) {
  const Nat k = program.size();
  Sequence out;
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (const auto* jump = program[i].get_if<Jump>()) {
      out.push_back(Jump{std::min(jump->distance, k + 1 - i)});
    } else {
      out.push_back(program[i]);
    }
  }
  out.push_back(Jump{0});
  out.push_back(Jump{0});
  return out;
}

Sequence xi(const Sequence& prefix, const Sequence& body, XiTail tail) {
  const Nat k = prefix.size();
  const Nat m = body.size();
  Sequence out;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const auto* jump = prefix[i].get_if<Jump>();
    const Nat position = i + 1;
    if (jump && position + jump->distance > k + m) {
      const Nat excess = position + jump->distance - (k + m);
      out.push_back(Jump{jump->distance - m * ((excess + m - 1) / m)});
    } else {
      out.push_back(prefix[i]);
    }
  }
  const Sequence normalized = normalize_jumps(body);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const auto* jump = normalized[i].get_if<Jump>();
    if (jump && jump->distance > 0 && i + 1 + jump->distance > m) {
      out.push_back(raised(jump->distance, k));
    } else {
      out.push_back(normalized[i]);
    }
  }
  const Nat back = tail == XiTail::Derived ? k + 2 : k;
  out.push_back(Jump{back});
  out.push_back(Jump{back});
  return out;
}

Sequence to_repetition(const CanonicalProgram& program, XiTail tail) {
  if (program.is_finite()) return phi(program.prefix);
  if (program.is_pure_repetition()) return normalize_jumps(*program.body);
  return xi(program.prefix, *program.body, tail);
}

ProjectedProgram project_counter(const CanonicalProgram& program, XiTail tail) {
  if (!has_loops(program)) return {program, {}};
  require_well_formed(program);

  const AnnotatedBody annotated = annotate(to_repetition(program, tail), true);
  const Sequence& body = annotated.instructions;
  const Nat k = body.size();

  ProjectedProgram out;
  out.program.body.emplace();
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::size_t position = i + 1;
    const Instruction& instruction = body[i];
    if (instruction.is<LoopHeader>()) {
      out.program.body->push_back(Jump{1});
    } else if (const auto* jump = instruction.get_if<AnnJump>()) {
      Sequence unit;
      for (const auto& reset : jump->resets) unit.push_back(Basic{rlc(reset.position, "set", reset.value)});
      unit.push_back(Jump{jump->distance});
      out.program.body->push_back(Unit{std::move(unit)});
    } else if (const auto* close = instruction.get_if<AnnClose>()) {
      out.program.prefix.push_back(Basic{rlc(position, "set", close->repeats)});
      out.program.body->push_back(Unit{{PosTest{rlc(position, "dec")}, Jump{3}, Basic{rlc(position, "set", close->repeats)},
                                        Jump{2}, Jump{k - close->body_size}}});
      out.bindings.push_back({"rlc:" + std::to_string(position), Service::down_counter(0, close->repeats)});
    } else {
      out.program.body->push_back(instruction);
    }
  }
  return out;
}

LinearSpec defining_thread(const CanonicalProgram& program, XiTail tail) {
  return trim_unreachable(apply_bindings(project_counter(program, tail)));
}

namespace {

// Length after full expansion: a loop of count n around s instructions
// becomes n copies of #1;...;#1. Saturates at `cap`.
std::size_t expanded_size(const Sequence& seq, std::size_t cap) {
  std::vector<std::pair<Nat, std::size_t>> open{{1, 0}};
  for (const auto& instruction : seq) {
    if (const auto* header = instruction.get_if<LoopHeader>()) {
      open.push_back({header->count, 0});
    } else if (instruction.is<LoopClose>()) {
      const auto [count, inner] = open.back();
      open.pop_back();
      const std::size_t room = cap / (inner + 2);
      open.back().second = std::min(cap, open.back().second + (count > room ? cap : count * (inner + 2)));
    } else {
      open.back().second = std::min(cap, open.back().second + 1);
    }
  }
  return open.back().second;
}

// Unrolls every loop of `sequence`, leftmost header first. In a cyclic
// sequence jump paths wrap around the end.
Sequence unroll(Sequence seq, bool cyclic, std::size_t size_limit) {
  {
    const auto partner = match_loops(seq);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if ((seq[i].is<LoopHeader>() || seq[i].is<LoopClose>()) && !partner[i]) seq[i] = Jump{1};
    }
  }
  if (expanded_size(seq, size_limit + 1) > size_limit) {
    throw BudgetExhausted("pure projection exceeds " + std::to_string(size_limit) + " instructions");
  }
  while (true) {
    auto header = std::find_if(seq.begin(), seq.end(), [](const Instruction& i) { return i.is<LoopHeader>(); });
    if (header == seq.end()) return seq;
    const std::size_t h = static_cast<std::size_t>(header - seq.begin());
    std::size_t c = h + 1;
    for (std::size_t depth = 0;; ++c) {
      if (seq[c].is<LoopHeader>()) ++depth;
      if (seq[c].is<LoopClose>()) {
        if (depth == 0) break;
        --depth;
      }
    }
    // All count iterations at once: the same result as applying the
    // one-iteration expansion count times.
    const Nat count = seq[h].as<LoopHeader>().count;
    const std::size_t k = c - h - 1;
    const std::size_t growth = (k + 2) * (count - 1);
    const std::size_t n = seq.size();
    if (n + growth > size_limit) {
      throw BudgetExhausted("pure projection exceeds " + std::to_string(size_limit) + " instructions");
    }

    auto passes_closure = [&](std::size_t s, Nat distance) {
      const std::size_t d = cyclic ? (c + n - s) % n : (c > s ? c - s : 0);
      return d > 0 && d < distance;
    };
    auto outside = [&](std::size_t s) -> Instruction {
      const auto* jump = seq[s].get_if<Jump>();
      if (jump && passes_closure(s, jump->distance)) return Jump{jump->distance + growth};
      return seq[s];
    };

    Sequence out;
    out.reserve(n + growth);
    for (std::size_t s = 0; s < h; ++s) out.push_back(outside(s));
    for (Nat round = 1; round <= count; ++round) {
      const std::size_t rest = (k + 2) * (count - round);
      out.push_back(Jump{1});
      for (std::size_t i = 1; i <= k; ++i) {
        const auto* jump = seq[h + i].get_if<Jump>();
        if (jump && jump->distance > 0 && i + jump->distance > k + 1) {
          out.push_back(Jump{jump->distance + rest});
        } else {
          out.push_back(seq[h + i]);
        }
      }
      out.push_back(Jump{1});
    }
    for (std::size_t s = c + 1; s < n; ++s) out.push_back(outside(s));
    seq = std::move(out);
  }
}

}  // namespace

CanonicalProgram project_pure(const CanonicalProgram& program, std::size_t size_limit) {
  if (!has_loops(program)) return program;
  require_well_formed(program);
  if (program.is_finite()) return {unroll(program.prefix, false, size_limit), std::nullopt};
  return {{}, unroll(to_repetition(program), true, size_limit)};
}

SizeReport size_report(const CanonicalProgram& program, std::size_t size_limit) {
  SizeReport report;
  const Sequence all = concatenated(program);
  report.source_len = all.size();

  const CanonicalProgram pure = project_pure(program, size_limit);
  report.pure_len = pure.prefix.size() + (pure.body ? pure.body->size() : 0);

  const ProjectedProgram counter = project_counter(program);
  report.counter_len = counter.program.prefix.size() + (counter.program.body ? counter.program.body->size() : 0);
  report.counter_len_inlined = inlined_length(counter.program.prefix) +
                               (counter.program.body ? inlined_length(*counter.program.body) : 0);

  const auto partner = match_loops(all);
  std::vector<Nat> products{1};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!partner[i]) continue;
    if (const auto* header = all[i].get_if<LoopHeader>()) {
      products.push_back(products.back() * header->count);
      report.loop_product = std::max(report.loop_product, products.back());
    } else {
      products.pop_back();
    }
  }
  return report;
}

}  // namespace pgakit
