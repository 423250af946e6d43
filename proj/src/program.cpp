#include "pgakit/program.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "text_cursor.hpp"

namespace pgakit {

bool operator==(const Unit& lhs, const Unit& rhs) { return lhs.body == rhs.body; }

bool is_rigid_loop_instruction(const Instruction& instruction) {
  return instruction.is<LoopHeader>() || instruction.is<LoopClose>() || instruction.is<AnnClose>() ||
         instruction.is<AnnJump>();
}

bool is_test(const Instruction& instruction) { return instruction.is<PosTest>() || instruction.is<NegTest>(); }

std::size_t outer_length(const Sequence& sequence) { return sequence.size(); }

std::size_t inlined_length(const Sequence& sequence) {
  std::size_t n = 0;
  for (const auto& instruction : sequence) {
    if (const auto* unit = instruction.get_if<Unit>()) {
      n += inlined_length(unit->body);
    } else {
      ++n;
    }
  }
  return n;
}

bool contains(const CanonicalProgram& program, bool (*predicate)(const Instruction&)) {
  if (std::any_of(program.prefix.begin(), program.prefix.end(), predicate)) return true;
  return program.body && std::any_of(program.body->begin(), program.body->end(), predicate);
}

// ---------------------------------------------------------------------------

namespace {

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : cursor_(text) {}

  RawProgram program() {
    RawProgram out;
    do {
      if (cursor_.consume("(")) {
        Sequence body = sequence(false);
        close_repetition();
        out.parts.push_back({std::move(body), true});
      } else {
        Instruction instruction = this->instruction(false);
        if (out.parts.empty() || out.parts.back().repeated) out.parts.push_back({{}, false});
        out.parts.back().instructions.push_back(std::move(instruction));
      }
    } while (cursor_.consume(";"));
    if (!cursor_.at_end()) {
      if (cursor_.peek() == ')') cursor_.fail("unbalanced ')'");
      cursor_.fail("expected ';' or end of program");
    }
    return out;
  }

 private:
  void close_repetition() {
    if (!cursor_.consume(")")) cursor_.fail("unbalanced '(': expected ')^w'");
    cursor_.expect("^");
    cursor_.expect("w");
  }

  Sequence sequence(bool in_unit) {
    Sequence out;
    do {
      out.push_back(instruction(in_unit));
    } while (cursor_.consume(";"));
    return out;
  }

  Instruction instruction(bool in_unit) {
    const char c = cursor_.peek();
    if (c == '!') {
      cursor_.consume("!");
      return Halt{};
    }
    if (c == '#') {
      cursor_.consume("#");
      const Nat distance = cursor_.expect_nat();
      if (cursor_.peek() != '(') return Jump{distance};
      AnnJump jump{distance, {}};
      while (cursor_.consume("(")) {
        const Nat position = cursor_.expect_nat();
        cursor_.expect(",");
        const Nat value = cursor_.expect_nat();
        cursor_.expect(")");
        jump.resets.push_back({position, value});
      }
      return jump;
    }
    if (c == '+' || c == '-') {
      cursor_.consume(std::string_view(&c, 1));
      Action action = cursor_.action();
      if (c == '+') return PosTest{std::move(action)};
      return NegTest{std::move(action)};
    }
    if (c == '(') cursor_.fail("nested repetition is not supported");
    if (c == '}') {
      cursor_.expect("}x");
      if (in_unit) cursor_.fail("rigid loop closure inside a unit");
      return LoopClose{};
    }
    if (c >= '0' && c <= '9') {
      const auto start = cursor_;
      const Nat n = *cursor_.nat();
      if (cursor_.consume("x{")) {
        if (n == 0) start.fail("loop header count must be positive");
        if (in_unit) cursor_.fail("rigid loop header inside a unit");
        return LoopHeader{n};
      }
      if (cursor_.consume("}x")) {
        if (in_unit) cursor_.fail("rigid loop closure inside a unit");
        return AnnClose{n, cursor_.expect_nat()};
      }
      cursor_.fail("expected 'x{' or '}x' after a number");
    }
    if (c == 'u' && is_unit_ahead()) {
      cursor_.expect("u");
      cursor_.expect("(");
      Sequence body = sequence(true);
      if (!cursor_.consume(")")) cursor_.fail("unbalanced '(' in unit: expected ')'");
      return Unit{std::move(body)};
    }
    if (c >= 'a' && c <= 'z') return Basic{cursor_.action()};
    if (c == '\0') cursor_.fail("expected an instruction, found end of input");
    cursor_.fail(std::string("malformed instruction starting with '") + c + "'");
  }

  // `u` followed by `(` is a unit; `u` followed by anything else is an action.
  bool is_unit_ahead() {
    detail::TextCursor probe = cursor_;
    auto ident = probe.identifier();
    return ident && *ident == "u" && probe.peek() == '(';
  }

  detail::TextCursor cursor_;
};

std::string_view kind_name(const Instruction& instruction) {
  static constexpr std::string_view names[] = {"basic",       "pos-test",   "neg-test",  "halt",     "jump",
                                               "loop-header", "loop-close", "ann-close", "ann-jump", "unit"};
  return names[instruction.value.index()];
}

void dump_sequence(std::ostringstream& out, const Sequence& sequence, int indent) {
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& instruction = sequence[i];
    out << std::string(static_cast<std::size_t>(indent), ' ') << i + 1 << ' ' << kind_name(instruction);
    if (const auto* unit = instruction.get_if<Unit>()) {
      out << " (" << unit->body.size() << " instructions)\n";
      dump_sequence(out, unit->body, indent + 2);
      continue;
    }
    out << ' ' << to_string(instruction) << '\n';
  }
}

}  // namespace

RawProgram parse_program(std::string_view text) { return ProgramParser(text).program(); }

CanonicalProgram parse_canonical(std::string_view text) { return first_canonical(parse_program(text)); }

std::string to_string(const Instruction& instruction) {
  struct Printer {
    std::string operator()(const Basic& i) const { return to_string(i.action); }
    std::string operator()(const PosTest& i) const { return "+" + to_string(i.action); }
    std::string operator()(const NegTest& i) const { return "-" + to_string(i.action); }
    std::string operator()(const Halt&) const { return "!"; }
    std::string operator()(const Jump& i) const { return "#" + std::to_string(i.distance); }
    std::string operator()(const LoopHeader& i) const { return std::to_string(i.count) + "x{"; }
    std::string operator()(const LoopClose&) const { return "}x"; }
    std::string operator()(const AnnClose& i) const {
      return std::to_string(i.repeats) + "}x" + std::to_string(i.body_size);
    }
    std::string operator()(const AnnJump& i) const {
      std::string out = "#" + std::to_string(i.distance);
      for (const auto& r : i.resets) out += "(" + std::to_string(r.position) + "," + std::to_string(r.value) + ")";
      return out;
    }
    std::string operator()(const Unit& i) const { return "u(" + to_string(i.body) + ")"; }
  };
  return std::visit(Printer{}, instruction.value);
}

std::string to_string(const Sequence& sequence) {
  std::string out;
  for (const auto& instruction : sequence) {
    if (!out.empty()) out += ';';
    out += to_string(instruction);
  }
  return out;
}

std::string to_string(const RawProgram& program) {
  std::string out;
  for (const auto& part : program.parts) {
    if (!out.empty()) out += ';';
    out += part.repeated ? "(" + to_string(part.instructions) + ")^w" : to_string(part.instructions);
  }
  return out;
}

std::string to_string(const CanonicalProgram& program) { return to_string(to_raw(program)); }

std::string dump(const RawProgram& program) {
  std::ostringstream out;
  out << "program: " << program.parts.size() << (program.parts.size() == 1 ? " part\n" : " parts\n");
  for (std::size_t p = 0; p < program.parts.size(); ++p) {
    const auto& part = program.parts[p];
    out << "part " << p + 1 << (part.repeated ? " repeated" : " finite") << '\n';
    dump_sequence(out, part.instructions, 2);
  }
  return out.str();
}

// ---------------------------------------------------------------------------

CanonicalProgram first_canonical(const RawProgram& program) {
  CanonicalProgram out;
  for (const auto& part : program.parts) {
    if (part.repeated) {
      out.body = part.instructions;
      break;
    }
    out.prefix.insert(out.prefix.end(), part.instructions.begin(), part.instructions.end());
  }
  return out;
}

std::size_t dead_parts(const RawProgram& program) {
  auto first = std::find_if(program.parts.begin(), program.parts.end(),
                            [](const ProgramPart& part) { return part.repeated; });
  if (first == program.parts.end()) return 0;
  return static_cast<std::size_t>(std::distance(first, program.parts.end()) - 1);
}

CanonicalProgram canonicalize(const CanonicalProgram& program) {
  CanonicalProgram out = program;
  if (!out.body) return out;
  Sequence& body = *out.body;

  // PGA2: (X^n)^w = X^w
  const std::size_t k = body.size();
  for (std::size_t period = 1; period < k; ++period) {
    if (k % period != 0) continue;
    bool periodic = true;
    for (std::size_t i = period; i < k && periodic; ++i) periodic = body[i] == body[i - period];
    if (periodic) {
      body.erase(body.begin() + static_cast<std::ptrdiff_t>(period), body.end());
      break;
    }
  }

  // PGA4 read right to left: X;u;(Y;u)^w = X;(u;Y)^w
  while (!out.prefix.empty() && out.prefix.back() == body.back()) {
    out.prefix.pop_back();
    std::rotate(body.begin(), body.end() - 1, body.end());
  }
  return out;
}

CanonicalProgram canonicalize(const RawProgram& program) { return canonicalize(first_canonical(program)); }

RawProgram to_raw(const CanonicalProgram& program) {
  RawProgram out;
  if (!program.prefix.empty()) out.parts.push_back({program.prefix, false});
  if (program.body) out.parts.push_back({*program.body, true});
  return out;
}

bool congruent(const RawProgram& lhs, const RawProgram& rhs) { return canonicalize(lhs) == canonicalize(rhs); }

Sequence normalize_jumps(const Sequence& body) {
  if (body.empty()) throw std::invalid_argument("normalize_jumps: empty body");
  const Nat k = body.size();
  Sequence out = body;
  for (auto& instruction : out) {
    if (const auto* jump = instruction.get_if<Jump>(); jump && jump->distance > k) {
      instruction = Jump{(jump->distance - 1) % k + 1};
    }
  }
  return out;
}

}  // namespace pgakit
