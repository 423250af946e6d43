#include "pgakit/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "pgakit/errors.hpp"
#include "pgakit/extraction.hpp"
#include "pgakit/program.hpp"
#include "pgakit/rigid_loop.hpp"
#include "pgakit/service.hpp"
#include "pgakit/thread.hpp"

namespace pgakit {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::vector<std::string> expressions;
  std::vector<std::string> files;
  std::string format = "text";
  std::string mode = "counter";
  std::string xi_tail = "derived";
  std::vector<std::string> binds;
  std::string replies;
  std::size_t max_steps = 1000;
  std::optional<std::size_t> depth;
  bool spec_input = false;
};

struct Input {
  std::string label;
  std::string text;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Input> read_inputs(const Options& options) {
  std::vector<Input> inputs;
  for (std::size_t i = 0; i < options.expressions.size(); ++i) {
    inputs.push_back({"-e #" + std::to_string(i + 1), options.expressions[i]});
  }
  for (const auto& path : options.files) {
    std::ifstream file(path);
    if (!file) throw UsageError("cannot read " + path);
    std::ostringstream text;
    text << file.rdbuf();
    inputs.push_back({path, text.str()});
  }
  return inputs;
}

std::vector<Input> expect_inputs(const Options& options, std::size_t count) {
  auto inputs = read_inputs(options);
  if (inputs.size() != count) {
    throw UsageError("expected " + std::to_string(count) + (count == 1 ? " input" : " inputs") + ", got " +
                     std::to_string(inputs.size()));
  }
  return inputs;
}

XiTail xi_tail(const Options& options) { return options.xi_tail == "literal" ? XiTail::Literal : XiTail::Derived; }

std::vector<Binding> bindings(const Options& options) {
  std::vector<Binding> out;
  for (const auto& text : options.binds) out.push_back(parse_binding(text));
  require_distinct_foci(out);
  return out;
}

void report_warnings(const std::vector<Diagnostic>& diagnostics, std::ostream& err) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Warning) err << to_string(d) << '\n';
  }
}

// The thread of one input before any --bind is applied.
LinearSpec base_thread(const Input& input, const Options& options) {
  if (options.spec_input) {
    LinearSpec spec = parse_spec(input.text);
    require_valid(spec);
    return spec;
  }
  const CanonicalProgram program = parse_canonical(input.text);
  if (!contains(program, &is_rigid_loop_instruction)) return extract_pgau(program);
  if (options.mode == "pure") return extract_pga(project_pure(program));
  return defining_thread(program, xi_tail(options));
}

LinearSpec bound_thread(const Input& input, const Options& options) {
  LinearSpec spec = base_thread(input, options);
  for (const auto& b : bindings(options)) spec = apply_use_finite(spec, b.focus, b.service);
  return spec;
}

json spec_json(const LinearSpec& spec) {
  json equations = json::array();
  std::istringstream lines(to_text(spec));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) equations.push_back(line);
  return {{"root", spec.root + 1}, {"equations", equations}};
}

json steps_json(const std::vector<TraceStep>& steps) {
  json out = json::array();
  for (const auto& s : steps) out.push_back({{"action", to_string(s.action)}, {"reply", s.reply}});
  return out;
}

json sequence_json(const Sequence& sequence) {
  json out = json::array();
  for (const auto& i : sequence) out.push_back(to_string(i));
  return out;
}

json program_json(const CanonicalProgram& program) {
  return {{"program", to_string(program)},
          {"prefix", sequence_json(program.prefix)},
          {"body", program.body ? sequence_json(*program.body) : json(nullptr)}};
}

void emit(std::ostream& out, const Options& options, const json& value, const std::string& text) {
  if (options.format == "json") {
    out << value.dump(2) << '\n';
  } else {
    out << text;
  }
}

int cmd_parse(const Options& options, std::ostream& out, std::ostream& err) {
  const RawProgram program = parse_program(expect_inputs(options, 1)[0].text);
  if (const std::size_t dead = dead_parts(program)) {
    err << "warning: " << dead << " part(s) after the first repetition are dead code\n";
  }
  json parts = json::array();
  for (const auto& part : program.parts) {
    parts.push_back({{"repeated", part.repeated}, {"instructions", sequence_json(part.instructions)}});
  }
  emit(out, options, {{"parts", parts}, {"dead_parts", dead_parts(program)}}, dump(program));
  return kExitOk;
}

int cmd_normalize(const Options& options, std::ostream& out, std::ostream& err) {
  const RawProgram raw = parse_program(expect_inputs(options, 1)[0].text);
  if (const std::size_t dead = dead_parts(raw)) {
    err << "warning: dropped " << dead << " part(s) after the first repetition\n";
  }
  const CanonicalProgram program = canonicalize(raw);
  emit(out, options, program_json(program), to_string(program) + "\n");
  return kExitOk;
}

int cmd_annotate(const Options& options, std::ostream& out, std::ostream& err) {
  const CanonicalProgram program = parse_canonical(expect_inputs(options, 1)[0].text);
  const auto diagnostics = validate_pgarl(program);
  if (has_errors(diagnostics)) throw ValidationError(diagnostics);
  report_warnings(diagnostics, err);
  std::string text;
  if (program.is_finite()) {
    text = to_string(annotate(program.prefix, false).instructions);
  } else {
    text = "(" + to_string(annotate(to_repetition(program, xi_tail(options)), true).instructions) + ")^w";
  }
  emit(out, options, {{"program", text}}, text + "\n");
  return kExitOk;
}

int cmd_project(const Options& options, std::ostream& out, std::ostream& err) {
  const CanonicalProgram program = parse_canonical(expect_inputs(options, 1)[0].text);
  report_warnings(validate_pgarl(program), err);
  if (options.mode == "pure") {
    const CanonicalProgram pure = project_pure(program);
    emit(out, options, program_json(pure), to_string(pure) + "\n");
    return kExitOk;
  }
  const ProjectedProgram projected = project_counter(program, xi_tail(options));
  std::string text = to_string(projected.program) + "\n";
  json binds = json::array();
  for (const auto& b : projected.bindings) {
    text += "bind " + to_string(b) + "\n";
    binds.push_back({{"focus", b.focus}, {"service", b.service.describe()}});
  }
  json value = program_json(projected.program);
  value["bindings"] = binds;
  emit(out, options, value, text);
  return kExitOk;
}

int cmd_extract(const Options& options, std::ostream& out) {
  const Input input = expect_inputs(options, 1)[0];
  if (!options.depth) {
    const LinearSpec spec = bound_thread(input, options);
    emit(out, options, spec_json(spec), to_text(spec));
    return kExitOk;
  }
  // Bounded: finite services by product, at most one unbounded one on the fly.
  LinearSpec spec = base_thread(input, options);
  std::optional<Binding> unbounded;
  for (const auto& b : bindings(options)) {
    if (b.service.has_enumeration()) {
      spec = apply_use_finite(spec, b.focus, b.service);
    } else if (unbounded) {
      throw ValidationError({{Severity::Error, 0, "at most one service without enumeration is supported"}});
    } else {
      unbounded = b;
    }
  }
  FiniteThread thread = pi(*options.depth, spec, spec.root);
  bool exhausted = false;
  if (unbounded) {
    const BoundedUse use = apply_use_bounded(spec, unbounded->focus, unbounded->service, *options.depth);
    thread = use.thread;
    exhausted = use.status == UseStatus::BudgetExhausted;
  }
  const std::string text = to_string(thread);
  emit(out, options, {{"depth", *options.depth}, {"thread", text}, {"budget_exhausted", exhausted}}, text + "\n");
  return exhausted ? kExitBudgetExhausted : kExitOk;
}

int cmd_equiv(const Options& options, std::ostream& out) {
  const auto inputs = expect_inputs(options, 2);
  const EqualityResult result = thread_equal(bound_thread(inputs[0], options), bound_thread(inputs[1], options));
  json value = {{"equivalent", result.equal}};
  std::string text = result.equal ? "equivalent\n" : "not equivalent\n";
  if (result.witness) {
    value["witness"] = {{"trace", steps_json(result.witness->path)},
                        {"lhs", result.witness->lhs},
                        {"rhs", result.witness->rhs}};
    text += to_string(*result.witness) + "\n";
  }
  emit(out, options, value, text);
  return result.equal ? kExitOk : kExitNotEquivalent;
}

int cmd_simulate(const Options& options, std::ostream& out) {
  const Input input = expect_inputs(options, 1)[0];
  const Trace trace =
      simulate_using(base_thread(input, options), bindings(options), ReplyScript::parse(options.replies),
                     options.max_steps);
  emit(out, options, {{"steps", steps_json(trace.steps)}, {"status", std::string(to_string(trace.status))}},
       to_string(trace));
  return trace.status == TraceStatus::BudgetExhausted ? kExitBudgetExhausted : kExitOk;
}

int cmd_stats(const Options& options, std::ostream& out) {
  const SizeReport r = size_report(parse_canonical(expect_inputs(options, 1)[0].text));
  json value = {{"source_len", r.source_len},
                {"pure_len", r.pure_len},
                {"counter_len", r.counter_len},
                {"counter_len_inlined", r.counter_len_inlined},
                {"loop_product", r.loop_product}};
  std::string text;
  for (const auto& [key, v] : value.items()) text += key + ": " + v.dump() + "\n";
  emit(out, options, value, text);
  return kExitOk;
}

void add_inputs(CLI::App* command, Options& options) {
  command->add_option("-e,--expr", options.expressions, "Inline program text (repeatable)");
  command->add_option("files", options.files, "Input files");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options options;
  CLI::App app{"Program algebra workbench for PGA, PGAu and rigid loops", "pgakit"};
  app.require_subcommand(1, 1);
  app.add_option("--format", options.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* parse = app.add_subcommand("parse", "Print the structure of a program");
  auto* normalize = app.add_subcommand("normalize", "Print the canonical form under PGA1-4");
  auto* annotate_cmd = app.add_subcommand("annotate", "Print the annotated rigid-loop program");
  auto* project = app.add_subcommand("project", "Project rigid loops away");
  auto* extract = app.add_subcommand("extract", "Print the extracted thread as a linear specification");
  auto* equiv = app.add_subcommand("equiv", "Decide behavioral equivalence of two inputs");
  auto* simulate = app.add_subcommand("simulate", "Run a program against scripted replies");
  auto* stats = app.add_subcommand("stats", "Compare the sizes of both projections");

  for (auto* command : {parse, normalize, annotate_cmd, project, extract, equiv, simulate, stats}) {
    add_inputs(command, options);
    command->add_option("--format", options.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  }
  for (auto* command : {annotate_cmd, project, extract, equiv, simulate}) {
    command->add_option("--xi-tail", options.xi_tail, "Wrap-back jumps for mixed programs")
        ->check(CLI::IsMember({"derived", "literal"}));
  }
  for (auto* command : {project, extract, equiv, simulate}) {
    command->add_option("--mode", options.mode, "Rigid-loop semantics")->check(CLI::IsMember({"counter", "pure"}));
  }
  for (auto* command : {extract, equiv, simulate}) {
    command->add_option("--bind", options.binds, "focus=dc(init=N,max=N) or focus=counter(init=N)");
    command->add_flag("--spec", options.spec_input, "Inputs are linear specifications, not programs");
  }
  simulate->add_option("--replies", options.replies, "Replies such as TTF or 1,1,0");
  simulate->add_option("--max-steps", options.max_steps, "Maximum number of visible steps");
  extract->add_option("--depth", options.depth, "Print the approximation at this depth instead");

  std::vector<const char*> argv{"pgakit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParseError;
  }

  try {
    if (*parse) return cmd_parse(options, out, err);
    if (*normalize) return cmd_normalize(options, out, err);
    if (*annotate_cmd) return cmd_annotate(options, out, err);
    if (*project) return cmd_project(options, out, err);
    if (*extract) return cmd_extract(options, out);
    if (*equiv) return cmd_equiv(options, out);
    if (*simulate) return cmd_simulate(options, out);
    return cmd_stats(options, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) err << to_string(d) << '\n';
    return kExitValidationError;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << '\n';
    return kExitBudgetExhausted;
  }
}

}  // namespace pgakit
