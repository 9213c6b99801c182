// agentcheck command-line front end.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "agentcheck/checker.hpp"
#include "agentcheck/report.hpp"
#include "agentcheck/rewrite.hpp"
#include "agentcheck/scenario.hpp"

using namespace agentcheck;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << text;
}

std::vector<Requirement> load_spec(const std::string& path) {
  auto parsed = parse_spec(read_file(path));
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& d : parsed.errors)
      msg += path + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
             ": " + d.message + "\n";
    msg.pop_back();
    throw std::runtime_error(msg);
  }
  return std::move(parsed.requirements);
}

Model load_model_file(const std::string& path) {
  try {
    return load_model(read_file(path));
  } catch (const ModelError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<bool> parse_adoption(const std::string& text, int citizens) {
  if (text == "all") return std::vector<bool>(citizens, true);
  if (text == "none") return std::vector<bool>(citizens, false);
  // Comma-separated list of adopting citizens, e.g. "1,3".
  std::vector<bool> out(citizens, false);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int i = std::stoi(item);
    if (i < 1 || i > citizens) throw std::runtime_error("--adoption names unknown citizen " + item);
    out[i - 1] = true;
  }
  return out;
}

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw std::runtime_error("contact edge " + item + " is not i-j");
    out.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker for strategic, epistemic and probabilistic requirements"};
  app.require_subcommand(1);

  auto* parse_cmd = app.add_subcommand("parse", "Parse a spec file and print it back");
  std::string parse_spec_path;
  bool print_ast = false;
  parse_cmd->add_option("spec", parse_spec_path, "Spec file")->required();
  parse_cmd->add_flag("--print-ast", print_ast, "Print the syntax tree of each formula");

  auto* check_cmd = app.add_subcommand("check", "Check a spec against a model");
  std::string model_path, spec_path, strategies_path, mode = "IR";
  CheckOptions options;
  bool json = false;
  check_cmd->add_option("--model", model_path, "Model file (JSON)")->required();
  check_cmd->add_option("--spec", spec_path, "Spec file")->required();
  check_cmd->add_option("--strategies", strategies_path, "Strategy table for supp (JSON)");
  check_cmd->add_option("--mode", mode, "Strategy semantics")
      ->check(CLI::IsMember({"IR", "ir"}));
  check_cmd->add_option("--eps", options.eps, "Value iteration convergence threshold");
  check_cmd->add_option("--eps-compare", options.eps_compare, "Slack for probability bounds");
  check_cmd->add_option("--max-iter", options.max_iter, "Value iteration sweep limit");
  check_cmd->add_option("--max-strategies", options.max_uniform_strategies,
                        "Uniform strategies tried per coalition operator");
  check_cmd->add_option("--max-natural", options.max_natural_candidates,
                        "Natural strategies tried per bounded operator");
  check_cmd->add_option("--guard-literals", options.guard_literals,
                        "Literals per natural-strategy guard (0: from the bound)");
  check_cmd->add_option("--rules", options.rules, "Rules per natural strategy (0: from the bound)");
  check_cmd->add_flag("--json", json, "Emit the report as JSON");

  auto* gen_cmd = app.add_subcommand("gen", "Generate a model");
  gen_cmd->require_subcommand(1);
  auto* epi_cmd = gen_cmd->add_subcommand("epidemic", "Epidemic mitigation scenario");
  ScenarioParams params;
  std::string adoption = "all", testing = "on", contacts = "complete", exposed = "all";
  std::string out_path = "-", strategies_out;
  epi_cmd->add_option("--citizens", params.citizens, "Number of citizens (1-4)")
      ->check(CLI::Range(1, 4));
  epi_cmd->add_option("--adoption", adoption, "all, none, or a list of app users such as 1,3");
  epi_cmd->add_option("--testing", testing, "Testing on or off")
      ->check(CLI::IsMember({"on", "off"}));
  epi_cmd->add_option("--reliability", params.notify_reliability,
                      "Probability that a notification arrives")
      ->check(CLI::Range(0.0, 1.0));
  epi_cmd->add_option("--contacts", contacts, "complete, ring, or an edge list such as 1-2,2-3");
  epi_cmd->add_option("--initial-exposed", exposed, "all, none, or a list of index cases");
  epi_cmd->add_option("--max-states", params.max_states, "Abort beyond this many states");
  epi_cmd->add_option("--out", out_path, "Model output file (default stdout)");
  epi_cmd->add_option("--strategies-out", strategies_out, "Write the generated strategy table");

  auto* expand_cmd = app.add_subcommand("expand", "Expand macros and quantifiers");
  std::string expand_spec, expand_model;
  expand_cmd->add_option("--spec", expand_spec, "Spec file")->required();
  expand_cmd->add_option("--model", expand_model, "Model supplying feature domains");

  auto* pareto_cmd = app.add_subcommand("pareto", "Non-dominated rows of a score table");
  std::string scores_path;
  bool pareto_json = false;
  pareto_cmd->add_option("--scores", scores_path, "Score table (JSON)")->required();
  pareto_cmd->add_flag("--json", pareto_json, "Emit JSON");

  auto* catalog_cmd = app.add_subcommand("catalog", "Print the epidemic requirement catalog");
  std::string catalog_out = "-";
  catalog_cmd->add_option("--out", catalog_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse_cmd) {
      auto reqs = load_spec(parse_spec_path);
      if (!print_ast) {
        std::cout << print_spec(reqs);
        return 0;
      }
      for (const auto& r : reqs) {
        std::cout << r.id << "\n";
        std::cout << (r.formula ? dump_ast(*r.formula) : std::string("informal\n"));
      }
      return 0;
    }

    if (*check_cmd) {
      options.mode = *parse_check_mode(mode);
      Model m = load_model_file(model_path);
      if (!strategies_path.empty()) {
        try {
          options.strategies = load_strategies(read_file(strategies_path));
        } catch (const ModelError& e) {
          throw std::runtime_error(strategies_path + ": " + e.what());
        }
      }
      auto reqs = load_spec(spec_path);
      Report report = run_check(m, reqs, options, spec_path);
      std::cout << (json ? format_json(report) : format_text(report));
      return exit_code(report);
    }

    if (*epi_cmd) {
      params.adoption = parse_adoption(adoption, params.citizens);
      params.testing = testing == "on";
      if (contacts == "complete")
        params.contacts = ContactGraph::Complete;
      else if (contacts == "ring")
        params.contacts = ContactGraph::Ring;
      else {
        params.contacts = ContactGraph::Explicit;
        params.edges = parse_edges(contacts);
      }
      if (exposed == "none") {
        params.initial_exposed = std::vector<int>{};
      } else if (exposed != "all") {
        std::vector<int> list;
        auto mask = parse_adoption(exposed, params.citizens);
        for (int i = 0; i < params.citizens; ++i)
          if (mask[i]) list.push_back(i + 1);
        params.initial_exposed = list;
      }
      auto sm = generate(params);
      write_output(out_path, to_json(sm.model));
      if (!strategies_out.empty()) write_output(strategies_out, strategies_to_json(sm.strategies));
      return 0;
    }

    if (*expand_cmd) {
      auto reqs = load_spec(expand_spec);
      FeatureDomains domains;
      if (!expand_model.empty()) domains = load_model_file(expand_model).domains();
      for (auto& r : reqs)
        if (r.formula) r.formula = expand_quantifiers(expand_macros(*r.formula), domains);
      std::cout << print_spec(reqs);
      return 0;
    }

    if (*pareto_cmd) {
      auto table = load_score_table(read_file(scores_path));
      auto front = pareto_frontier(table);
      if (pareto_json) {
        nlohmann::ordered_json j;
        j["frontier"] = nlohmann::ordered_json::array();
        for (auto i : front) j["frontier"].push_back(table.ids[i]);
        std::cout << j.dump(2) << "\n";
      } else {
        for (auto i : front) std::cout << table.ids[i] << "\n";
      }
      return 0;
    }

    if (*catalog_cmd) {
      write_output(catalog_out, catalog_text());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
