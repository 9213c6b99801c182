#include "agentcheck/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "agentcheck/checker.hpp"
#include "agentcheck/rewrite.hpp"

namespace agentcheck {

namespace {

std::string where(std::string_view spec_name, const Requirement& r) {
  return std::string(spec_name) + ":" + std::to_string(r.pos.line) + ":" +
         std::to_string(r.pos.column) + ": requirement " + r.id + ": ";
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string describe(const Witness& w, const Model& m) {
  std::string out;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    if (i) out += " -> ";
    if (w.loop_start && *w.loop_start == i) out += "[loop] ";
    out += m.state_name(w.path[i]);
  }
  if (!w.note.empty()) out += (out.empty() ? "" : " ") + ("(" + w.note + ")");
  return out;
}

// Witness notes print compiled formulas; show ONCE instead of monitor atoms.
std::string restore_once(std::string text, const std::vector<Formula>& operands) {
  for (std::size_t i = operands.size(); i-- > 0;) {
    const std::string atom = monitor_atom(i), once = print(make_once(operands[i]));
    for (auto at = text.find(atom); at != std::string::npos; at = text.find(atom, at + once.size()))
      text.replace(at, atom.size(), once);
  }
  return text;
}

}  // namespace

Report run_check(const Model& m, const std::vector<Requirement>& requirements,
                 const CheckOptions& options, std::string_view spec_name) {
  Report report;
  report.states = m.num_states();
  report.transitions = m.num_transitions();
  report.initial = m.initial().size();
  report.options = options;

  std::vector<std::optional<Formula>> expanded(requirements.size());
  std::vector<Formula> all;
  for (std::size_t i = 0; i < requirements.size(); ++i) {
    const auto& r = requirements[i];
    if (r.status != RequirementStatus::Formalized || !r.formula) continue;
    try {
      expanded[i] = expand(*r.formula, m);
      if (auto missing = missing_names(*expanded[i], m, options.strategies); !missing.empty())
        throw BindingError(std::move(missing));
    } catch (const std::exception& e) {
      throw ReportError(where(spec_name, r) + e.what());
    }
    all.push_back(*expanded[i]);
  }

  PreparedSpec prepared;
  try {
    prepared = prepare(all, m);
  } catch (const std::exception& e) {
    throw ReportError(std::string(spec_name) + ": " + e.what());
  }

  for (std::size_t i = 0; i < requirements.size(); ++i) {
    const auto& r = requirements[i];
    ReportRow row{r.id, r.status, "informal", std::nullopt, "", ""};
    if (expanded[i]) {
      try {
        Verdict v =
            evaluate(compile_once(*expanded[i], prepared.operands), *prepared.model, options);
        row.verdict = std::string(to_string(v.truth));
        row.value = v.value;
        if (v.witness) row.witness = restore_once(describe(*v.witness, *prepared.model), prepared.operands);
        row.strategy = v.strategy;
      } catch (const std::exception& e) {
        throw ReportError(where(spec_name, r) + e.what());
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

int exit_code(const Report& r) {
  for (const auto& row : r.rows)
    if (row.status == RequirementStatus::Formalized && row.verdict != "true") return 1;
  return 0;
}

std::string format_text(const Report& r) {
  std::string out = "model: " + std::to_string(r.states) + " states, " +
                    std::to_string(r.transitions) + " transitions, " +
                    std::to_string(r.initial) + " initial\n";
  out += "config: mode=" + std::string(to_string(r.options.mode)) +
         " eps=" + number(r.options.eps) + " eps_compare=" + number(r.options.eps_compare) +
         " max_iter=" + std::to_string(r.options.max_iter) + "\n\n";
  std::size_t formalized = 0, holds = 0, fails = 0, unknown = 0;
  for (const auto& row : r.rows) {
    out += row.id + "  " + row.verdict;
    if (row.value) out += "  value=" + number(*row.value);
    out += "\n";
    if (!row.witness.empty()) out += "  witness: " + row.witness + "\n";
    if (!row.strategy.empty()) out += "  strategy: " + row.strategy + "\n";
    if (row.status != RequirementStatus::Formalized) continue;
    ++formalized;
    if (row.verdict == "true")
      ++holds;
    else if (row.verdict == "false")
      ++fails;
    else
      ++unknown;
  }
  out += "\nsummary: " + std::to_string(formalized) + " formalized (" + std::to_string(holds) +
         " true, " + std::to_string(fails) + " false, " + std::to_string(unknown) +
         " unknown), " + std::to_string(r.rows.size() - formalized) + " informal\n";
  return out;
}

std::string format_json(const Report& r) {
  nlohmann::ordered_json j;
  j["model"] = {{"states", r.states}, {"transitions", r.transitions}, {"initial", r.initial}};
  j["config"] = {{"mode", std::string(to_string(r.options.mode))},
                 {"eps", r.options.eps},
                 {"eps_compare", r.options.eps_compare},
                 {"max_iter", r.options.max_iter}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["id"] = row.id;
    o["status"] = row.status == RequirementStatus::Formalized ? "formalized" : "informal";
    o["verdict"] = row.verdict;
    o["value"] = row.value ? nlohmann::ordered_json(*row.value) : nlohmann::ordered_json();
    o["witness"] = row.witness.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(row.witness);
    if (!row.strategy.empty()) o["strategy"] = row.strategy;
    rows.push_back(std::move(o));
  }
  j["requirements"] = std::move(rows);
  j["exit"] = exit_code(r);
  return j.dump(2) + "\n";
}

ScoreTable load_score_table(std::string_view json_text) {
  ScoreTable t;
  try {
    auto j = nlohmann::json::parse(json_text);
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      t.ids.push_back(row.at("id").get<std::string>());
      t.scores.push_back(row.at("scores").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScoreTableError(std::string("malformed score table: ") + e.what());
  }
  return t;
}

std::vector<std::size_t> pareto_frontier(const ScoreTable& t) {
  const std::size_t width = t.columns.size();
  for (std::size_t i = 0; i < t.scores.size(); ++i) {
    const std::string name = i < t.ids.size() ? t.ids[i] : std::to_string(i);
    if (t.scores[i].size() != width)
      throw ScoreTableError("row " + name + " has " + std::to_string(t.scores[i].size()) +
                            " scores, expected " + std::to_string(width));
    for (double v : t.scores[i])
      if (!(v >= 0.0 && v <= 1.0))
        throw ScoreTableError("row " + name + " has a score outside [0, 1]");
  }
  auto dominates = [&](const std::vector<double>& a, const std::vector<double>& b) {
    bool strict = false;
    for (std::size_t k = 0; k < width; ++k) {
      if (a[k] < b[k]) return false;
      strict |= a[k] > b[k];
    }
    return strict;
  };
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.scores.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < t.scores.size() && !dominated; ++j)
      dominated = j != i && dominates(t.scores[j], t.scores[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

}  // namespace agentcheck
