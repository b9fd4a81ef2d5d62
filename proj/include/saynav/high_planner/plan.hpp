#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "saynav/scene_graph/scene_graph.hpp"

namespace saynav {

enum class StepKind { Navigate, Look };

struct PlanStep {
  StepKind kind = StepKind::Look;
  /// Node label as written in the plan, e.g. "desk_3". Empty for Look.
  std::string target;
  /// Resolved against a subgraph by bind_plan.
  std::optional<NodeId> node;
  std::string comment;

  /// Same call, ignoring the comment.
  bool same_call(const PlanStep& o) const { return kind == o.kind && target == o.target; }
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

enum class PlanSource { Llm, Heuristic };

std::string_view to_string(PlanSource s);

struct Plan {
  std::vector<PlanStep> steps;
  PlanSource source = PlanSource::Heuristic;
  std::string raw_text;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string text, const std::string& why)
      : std::runtime_error("plan line " + std::to_string(line) + ": " + why + ": '" + text + "'"),
        line_(line),
        text_(std::move(text)) {}

  int line() const { return line_; }
  const std::string& text() const { return text_; }

 private:
  int line_;
  std::string text_;
};

/// Parses one call per line: `navigate(<id>)` or `look()`, each with an
/// optional `# comment`. Blank lines, code fences, comment-only lines and
/// leading list markers are skipped. Consecutive repeats of the same call
/// are collapsed. Throws ParseError on anything else or when no step is found.
Plan parse_plan(std::string_view text);

/// Inverse of parse_plan for its own output.
std::string render_plan(const Plan& plan);

/// Resolves every navigate target to a large-object node of `sub`. Throws
/// ParseError naming the first unknown target.
void bind_plan(Plan& plan, const Subgraph& sub);

}  // namespace saynav
