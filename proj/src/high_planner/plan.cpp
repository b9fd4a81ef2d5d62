#include "saynav/high_planner/plan.hpp"

#include <algorithm>
#include <cctype>

#include "saynav/core/strings.hpp"

namespace saynav {
namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// "- ", "* ", "1. ", "2) " prefixes some chat models add.
std::string_view strip_list_marker(std::string_view s) {
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') return trim(s.substr(2));
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) != 0) ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
    return trim(s.substr(i + 2));
  }
  return s;
}

std::string_view strip_quotes(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return trim(s.substr(1, s.size() - 2));
  }
  return s;
}

PlanStep parse_call(std::string_view code, int line, std::string_view original) {
  const std::string orig(original);
  const auto open = code.find('(');
  if (open == std::string_view::npos) throw ParseError(line, orig, "expected a call");
  const std::string name = to_lower(trim(code.substr(0, open)));
  auto rest = code.substr(open + 1);
  const auto close = rest.find(')');
  if (close == std::string_view::npos) throw ParseError(line, orig, "missing ')'");
  auto args = trim(rest.substr(0, close));
  auto tail = trim(rest.substr(close + 1));
  if (!tail.empty() && tail != ";") throw ParseError(line, orig, "trailing text after call");

  PlanStep step;
  if (name == "look") {
    if (!args.empty()) throw ParseError(line, orig, "look takes no arguments");
    step.kind = StepKind::Look;
    return step;
  }
  if (name == "navigate") {
    args = strip_quotes(args);
    if (args.empty() || !std::all_of(args.begin(), args.end(), is_ident_char)) {
      throw ParseError(line, orig, "malformed navigate argument");
    }
    step.kind = StepKind::Navigate;
    step.target = std::string(args);
    return step;
  }
  throw ParseError(line, orig, "unknown function");
}

}  // namespace

std::string_view to_string(PlanSource s) { return s == PlanSource::Llm ? "llm" : "heuristic"; }

Plan parse_plan(std::string_view text) {
  Plan plan;
  plan.raw_text = std::string(text);
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || starts_with(line, "```") || line.front() == '#') continue;
    line = strip_list_marker(line);

    std::string_view code = line;
    std::string comment;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      code = trim(line.substr(0, hash));
      comment = std::string(trim(line.substr(hash + 1)));
    }
    // Models sometimes wrap a single call in backticks.
    if (code.size() >= 2 && code.front() == '`' && code.back() == '`') {
      code = trim(code.substr(1, code.size() - 2));
    }
    PlanStep step = parse_call(code, line_no, raw);
    step.comment = std::move(comment);
    if (!plan.steps.empty() && plan.steps.back().same_call(step)) continue;
    plan.steps.push_back(std::move(step));
  }
  if (plan.steps.empty()) throw ParseError(line_no, "", "no plan steps");
  return plan;
}

std::string render_plan(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) {
    out += s.kind == StepKind::Look ? "look()" : "navigate(" + s.target + ")";
    if (!s.comment.empty()) out += "  # " + s.comment;
    out += '\n';
  }
  return out;
}

void bind_plan(Plan& plan, const Subgraph& sub) {
  int i = 0;
  for (auto& s : plan.steps) {
    ++i;
    if (s.kind != StepKind::Navigate) continue;
    auto id = sub.resolve_target(s.target);
    const bool landmark = id && std::any_of(sub.large.begin(), sub.large.end(),
                                            [&](const auto& l) { return l.id == *id; });
    if (!landmark) throw ParseError(i, s.target, "navigate target is not a landmark in this room");
    s.node = *id;
  }
}

}  // namespace saynav
