#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pgakit/program.hpp"
#include "pgakit/rigid_loop.hpp"
#include "pgakit/thread.hpp"

namespace pgakit::testing {

inline constexpr std::uint64_t kDefaultSeed = 20260415;

/// PGAKIT_SEED from the environment, or the fixed default.
inline std::uint64_t test_seed() {
  if (const char* text = std::getenv("PGAKIT_SEED")) return std::strtoull(text, nullptr, 10);
  return kDefaultSeed;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::vector<bool> replies(std::size_t n) {
    std::vector<bool> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(chance(0.5));
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

inline Action small_action(Gen& g, std::size_t alphabet = 3) {
  static const char* names[] = {"a", "b", "c", "d", "e"};
  return make_action(names[g.below(alphabet)]);
}

/// A valid spec with n equations; S and D are rare so cycles dominate.
inline LinearSpec random_spec(Gen& g, std::size_t n, std::size_t alphabet = 2) {
  LinearSpec spec;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t roll = g.below(10);
    if (roll == 0) {
      spec.equations.emplace_back(Termination{});
    } else if (roll == 1) {
      spec.equations.emplace_back(Deadlock{});
    } else {
      spec.equations.emplace_back(PostConditional{g.below(n), small_action(g, alphabet), g.below(n)});
    }
  }
  spec.root = g.below(n);
  return spec;
}

/// A loop-free instruction with jump distances up to `max_jump`.
inline Instruction random_primitive(Gen& g, Nat max_jump) {
  switch (g.below(7)) {
    case 0:
    case 1:
      return Basic{small_action(g)};
    case 2:
      return PosTest{small_action(g)};
    case 3:
      return NegTest{small_action(g)};
    case 4:
      return Halt{};
    default:
      return Jump{g.between(0, max_jump)};
  }
}

inline Sequence random_sequence(Gen& g, std::size_t length, Nat max_jump) {
  Sequence out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(random_primitive(g, max_jump));
  return out;
}

/// A loop-free PGA program in one of the three canonical shapes.
inline CanonicalProgram random_pga_program(Gen& g, std::size_t max_length = 8) {
  CanonicalProgram p;
  const std::size_t shape = g.below(3);
  const Nat max_jump = max_length + 2;
  if (shape != 1) p.prefix = random_sequence(g, g.between(1, max_length), max_jump);
  if (shape != 0) p.body = random_sequence(g, g.between(1, max_length), max_jump);
  return p;
}

struct LoopBounds {
  std::size_t max_length = 12;
  Nat max_count = 4;
  std::size_t max_depth = 3;
};

namespace detail {

inline void fill_block(Gen& g, Sequence& out, std::size_t budget, std::size_t depth, const LoopBounds& bounds) {
  while (budget > 0) {
    if (depth < bounds.max_depth && budget >= 2 && g.chance(0.3)) {
      const std::size_t inner = g.between(0, std::min<std::size_t>(budget - 2, 5));
      out.push_back(LoopHeader{g.between(1, bounds.max_count)});
      fill_block(g, out, inner, depth + 1, bounds);
      out.push_back(LoopClose{});
      budget -= inner + 2;
    } else {
      out.push_back(random_primitive(g, 0));
      --budget;
    }
  }
}

}  // namespace detail

/// A well-formed PGArl program (validate_pgarl reports no errors) in the
/// given shape: 0 finite, 1 pure repetition, 2 mixed. Jumps may enter and
/// leave loops; lonely headers and closures occur occasionally.
inline CanonicalProgram random_pgarl_program(Gen& g, std::size_t shape, const LoopBounds& bounds = {}) {
  while (true) {
    Sequence all;
    detail::fill_block(g, all, g.between(2, bounds.max_length), 0, bounds);
    if (g.chance(0.1)) all.insert(all.begin() + static_cast<std::ptrdiff_t>(g.below(all.size() + 1)), LoopHeader{2});
    if (g.chance(0.1)) all.insert(all.begin() + static_cast<std::ptrdiff_t>(g.below(all.size() + 1)), LoopClose{});
    if (all.size() > bounds.max_length) all.resize(bounds.max_length, Halt{});

    CanonicalProgram p;
    if (shape == 0) {
      p.prefix = all;
    } else if (shape == 1) {
      p.body = all;
    } else {
      if (all.size() < 2) continue;
      const std::size_t cut = g.between(1, all.size() - 1);
      p.prefix.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut));
      p.body = Sequence(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end());
    }

    const Nat body_size = p.body ? p.body->size() : 0;
    auto assign_jumps = [&](Sequence& seq, bool in_body) {
      for (auto& instruction : seq) {
        if (!instruction.is<Jump>()) continue;
        Nat d = g.between(0, all.size() + 1);
        if (in_body && d > 0 && d % body_size == 0) d = body_size > 1 && g.chance(0.5) ? d + 1 : 0;
        instruction = Jump{d};
      }
    };
    assign_jumps(p.prefix, false);
    if (p.body) assign_jumps(*p.body, true);

    // No test directly before a closure, including across the wrap.
    Sequence linear = p.prefix;
    if (p.body) linear.insert(linear.end(), p.body->begin(), p.body->end());
    for (std::size_t i = 1; i < linear.size(); ++i) {
      if (linear[i].is<LoopClose>() && is_test(linear[i - 1])) linear[i - 1] = Basic{small_action(g)};
    }
    if (p.body && linear[p.prefix.size()].is<LoopClose>() && is_test(linear.back())) linear.back() = Basic{small_action(g)};
    p.prefix.assign(linear.begin(), linear.begin() + static_cast<std::ptrdiff_t>(p.prefix.size()));
    if (p.body) p.body = Sequence(linear.begin() + static_cast<std::ptrdiff_t>(p.prefix.size()), linear.end());

    if (!has_errors(validate_pgarl(p))) return p;
  }
}

/// A RawProgram congruent to `p` by a few random PGA1-4 rewrites applied in
/// the expanding direction (splitting, unfolding, period multiplication,
/// rotation, dead code).
inline RawProgram random_axiom_variant(Gen& g, const CanonicalProgram& p) {
  Sequence prefix = p.prefix;
  std::optional<Sequence> body = p.body;
  const std::size_t rewrites = g.between(1, 4);
  for (std::size_t r = 0; r < rewrites && body; ++r) {
    switch (g.below(3)) {
      case 0: {  // PGA2 backwards: X^w = (X;X)^w
        const Sequence copy = *body;
        body->insert(body->end(), copy.begin(), copy.end());
        break;
      }
      case 1: {  // unfolding: X^w = X;X^w
        prefix.insert(prefix.end(), body->begin(), body->end());
        break;
      }
      default: {  // PGA4 backwards: (u;Y)^w = u;(Y;u)^w
        prefix.push_back(body->front());
        std::rotate(body->begin(), body->begin() + 1, body->end());
        break;
      }
    }
  }
  RawProgram out;
  // PGA1 backwards: split the prefix into several finite parts.
  std::size_t at = 0;
  while (at < prefix.size()) {
    const std::size_t take = g.between(1, prefix.size() - at);
    out.parts.push_back({Sequence(prefix.begin() + static_cast<std::ptrdiff_t>(at),
                                  prefix.begin() + static_cast<std::ptrdiff_t>(at + take)),
                         false});
    at += take;
  }
  if (body) {
    out.parts.push_back({*body, true});
    if (g.chance(0.3)) out.parts.push_back({random_sequence(g, g.between(1, 3), 3), g.chance(0.5)});  // PGA3
  }
  return out;
}

}  // namespace pgakit::testing
