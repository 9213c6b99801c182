#include "agentcheck/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace agentcheck {

namespace {

using Kind = ModelError::Kind;

template <class T>
std::optional<std::uint32_t> index_of(const std::vector<T>& v, std::string_view name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == name) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::string q(std::string_view s) { return "'" + std::string(s) + "'"; }

constexpr double kDistributionTolerance = 1e-9;

}  // namespace

// ---------------------------------------------------------------- Model

std::optional<AgentId> Model::find_agent(std::string_view name) const {
  return index_of(agents_, name);
}

std::optional<AtomId> Model::find_atom(std::string_view name) const {
  return index_of(atoms_, name);
}

std::optional<std::size_t> Model::find_feature(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

std::optional<StateId> Model::find_state(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> Model::find_token(AgentId a, std::string_view name) const {
  return index_of(tokens_[a], name);
}

std::optional<ActionId> Model::find_action(AgentId a, std::string_view name) const {
  auto i = index_of(actions_[a], name);
  if (!i) return std::nullopt;
  return static_cast<ActionId>(*i);
}

bool Model::probabilistic() const {
  for (std::size_t t = 0; t < num_transitions(); ++t)
    if (successors(t).size() > 1) return true;
  return false;
}

FeatureDomains Model::domains() const {
  FeatureDomains out;
  for (const auto& f : features_) out[f.name] = f.max;
  return out;
}

// --------------------------------------------------------- ModelBuilder

ModelBuilder::ModelBuilder(std::vector<std::string> agents) {
  std::set<std::string> seen;
  for (const auto& a : agents)
    if (!seen.insert(a).second)
      throw ModelError(Kind::Reference, "duplicate agent " + q(a));
  m_.agents_ = std::move(agents);
  const std::size_t n = m_.agents_.size();
  m_.tokens_.resize(n);
  m_.actions_.resize(n);
  m_.observable_.resize(n);
  token_index_.resize(n);
  action_index_.resize(n);
}

ModelBuilder ModelBuilder::like(const Model& m) {
  ModelBuilder b(m.agents_);
  for (const auto& atom : m.atoms_) b.add_atom(atom);
  for (const auto& f : m.features_) b.add_feature(f.name, f.max);
  b.m_.observable_ = m.observable_;
  for (AgentId a = 0; a < m.num_agents(); ++a) {
    for (const auto& t : m.tokens_[a]) b.declare_token(a, t);
    for (const auto& act : m.actions_[a]) b.declare_action(a, act);
  }
  return b;
}

AgentId ModelBuilder::agent_index(std::string_view name) const {
  auto i = index_of(m_.agents_, name);
  if (!i) throw ModelError(Kind::Reference, "unknown agent " + q(name));
  return *i;
}

std::optional<StateId> ModelBuilder::find_state(std::string_view name) const {
  return m_.find_state(name);
}

AtomId ModelBuilder::add_atom(const std::string& name) {
  auto [it, inserted] =
      atom_index_.emplace(name, static_cast<AtomId>(m_.atoms_.size()));
  if (inserted) m_.atoms_.push_back(name);
  return it->second;
}

void ModelBuilder::add_feature(const std::string& name, std::int64_t max) {
  if (m_.find_feature(name))
    throw ModelError(Kind::Reference, "duplicate feature " + q(name));
  if (max < 0)
    throw ModelError(Kind::Domain, "feature " + q(name) + " has negative maximum");
  m_.features_.push_back({name, max});
}

void ModelBuilder::set_observable(std::string_view agent,
                                  const std::vector<std::string>& atoms) {
  AgentId a = agent_index(agent);
  std::vector<AtomId> ids;
  for (const auto& name : atoms) {
    auto it = atom_index_.find(name);
    if (it == atom_index_.end())
      throw ModelError(Kind::Reference, "observable atom " + q(name) +
                                            " of agent " + q(agent) +
                                            " is not declared");
    if (std::find(ids.begin(), ids.end(), it->second) == ids.end())
      ids.push_back(it->second);
  }
  m_.observable_[a] = std::move(ids);
}

TokenId ModelBuilder::declare_token(AgentId a, const std::string& token) {
  auto [it, inserted] =
      token_index_[a].emplace(token, static_cast<TokenId>(m_.tokens_[a].size()));
  if (inserted) m_.tokens_[a].push_back(token);
  return it->second;
}

ActionId ModelBuilder::declare_action(AgentId a, const std::string& action) {
  auto [it, inserted] =
      action_index_[a].emplace(action, static_cast<ActionId>(m_.actions_[a].size()));
  if (inserted) {
    if (m_.actions_[a].size() >= std::numeric_limits<ActionId>::max())
      throw ModelError(Kind::Domain, "too many actions for agent " + q(m_.agents_[a]));
    m_.actions_[a].push_back(action);
  }
  return it->second;
}

StateId ModelBuilder::add_state(const std::string& name,
                                const std::vector<std::string>& local) {
  if (local.size() != m_.agents_.size())
    throw ModelError(Kind::Reference,
                     "state " + q(name) + " must give one local token per agent");
  std::vector<TokenId> ids;
  ids.reserve(local.size());
  for (AgentId a = 0; a < local.size(); ++a) ids.push_back(declare_token(a, local[a]));
  return add_state(name, std::move(ids));
}

StateId ModelBuilder::add_state(const std::string& name, std::vector<TokenId> local) {
  if (local.size() != m_.agents_.size())
    throw ModelError(Kind::Reference,
                     "state " + q(name) + " must give one local token per agent");
  for (AgentId a = 0; a < local.size(); ++a)
    if (local[a] >= m_.tokens_[a].size())
      throw ModelError(Kind::Reference, "undeclared token for agent " + q(m_.agents_[a]));
  auto id = static_cast<StateId>(state_names_.size());
  if (!m_.state_index_.emplace(name, id).second)
    throw ModelError(Kind::Reference, "duplicate state " + q(name));
  state_names_.push_back(name);
  local_.push_back(std::move(local));
  feature_values_.emplace_back();
  return id;
}

void ModelBuilder::label(StateId s, std::string_view atom) {
  auto it = atom_index_.find(std::string(atom));
  if (it == atom_index_.end())
    throw ModelError(Kind::Reference, "state " + q(state_names_.at(s)) +
                                          " is labelled with undeclared atom " +
                                          q(atom));
  label(s, it->second);
}

void ModelBuilder::label(StateId s, AtomId atom) { labels_.emplace_back(s, atom); }

void ModelBuilder::set_feature(StateId s, std::string_view feature, std::int64_t value) {
  auto f = m_.find_feature(feature);
  if (!f)
    throw ModelError(Kind::Reference, "state " + q(state_names_.at(s)) +
                                          " sets undeclared feature " + q(feature));
  auto& values = feature_values_.at(s);
  if (values.size() < m_.features_.size()) values.resize(m_.features_.size());
  values[*f] = value;
}

void ModelBuilder::add_initial(StateId s) { m_.initial_.push_back(s); }

void ModelBuilder::set_origin(StateId s, StateId origin) {
  if (origin_.size() <= s) origin_.resize(s + 1, 0);
  origin_[s] = origin;
}

void ModelBuilder::add_transition(StateId from, const std::vector<std::string>& joint,
                                  std::vector<Successor> to) {
  if (joint.size() != m_.agents_.size())
    throw ModelError(Kind::Reference, "transition from " + q(state_names_.at(from)) +
                                          " must give one action per agent");
  std::vector<ActionId> ids;
  ids.reserve(joint.size());
  for (AgentId a = 0; a < joint.size(); ++a) ids.push_back(declare_action(a, joint[a]));
  add_transition(from, std::move(ids), std::move(to));
}

void ModelBuilder::add_transition(StateId from, std::vector<ActionId> joint,
                                  std::vector<Successor> to) {
  pending_.push_back({from, std::move(joint), std::move(to)});
}

Model ModelBuilder::build() && {
  Model& m = m_;
  const std::size_t n = state_names_.size();
  const std::size_t nagents = m.agents_.size();
  const std::size_t nfeatures = m.features_.size();
  m.state_names_ = std::move(state_names_);

  if (m.initial_.empty()) throw ModelError(Kind::Reference, "model has no initial state");
  {
    std::vector<StateId> seen;
    for (StateId s : m.initial_) {
      if (s >= n) throw ModelError(Kind::Reference, "initial state out of range");
      if (std::find(seen.begin(), seen.end(), s) == seen.end()) seen.push_back(s);
    }
    m.initial_ = std::move(seen);
  }

  m.local_.resize(n * nagents);
  for (StateId s = 0; s < n; ++s)
    std::copy(local_[s].begin(), local_[s].end(), m.local_.begin() + s * nagents);

  m.feature_values_.resize(n * nfeatures);
  for (StateId s = 0; s < n; ++s) {
    auto& values = feature_values_[s];
    values.resize(nfeatures);
    for (std::size_t f = 0; f < nfeatures; ++f) {
      if (!values[f])
        throw ModelError(Kind::Domain, "state " + q(m.state_names_[s]) +
                                           " has no value for feature " +
                                           q(m.features_[f].name));
      if (*values[f] < 0 || *values[f] > m.features_[f].max)
        throw ModelError(Kind::Domain,
                         "state " + q(m.state_names_[s]) + ": feature " +
                             q(m.features_[f].name) + " = " +
                             std::to_string(*values[f]) + " outside [0.." +
                             std::to_string(m.features_[f].max) + "]");
      m.feature_values_[s * nfeatures + f] = *values[f];
    }
  }

  m.labels_.assign(m.atoms_.size(), StateSet(n));
  for (auto [s, atom] : labels_) {
    if (s >= n || atom >= m.atoms_.size())
      throw ModelError(Kind::Reference, "label out of range");
    m.labels_[atom].insert(s);
  }

  if (!origin_.empty()) {
    origin_.resize(n, 0);
    m.origin_ = std::move(origin_);
  }

  // Transitions grouped by source state, in insertion order within a state.
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const auto& x, const auto& y) { return x.from < y.from; });
  m.trans_begin_.assign(n + 1, 0);
  m.succ_begin_.assign(1, 0);
  std::vector<std::pair<StateId, StateId>> edges;
  for (auto& t : pending_) {
    if (t.from >= n) throw ModelError(Kind::Reference, "transition source out of range");
    auto describe = [&] {
      std::string j;
      for (AgentId a = 0; a < nagents; ++a)
        j += (a ? "," : "") + m.agents_[a] + "=" + m.actions_[a].at(t.joint[a]);
      return "transition from " + q(m.state_names_[t.from]) + " on (" + j + ")";
    };
    std::vector<Successor> kept;
    double sum = 0;
    for (const auto& succ : t.to) {
      if (succ.target >= n) throw ModelError(Kind::Reference, describe() + ": target out of range");
      if (!(succ.probability >= 0) || !std::isfinite(succ.probability))
        throw ModelError(Kind::Distribution, describe() + ": invalid probability");
      sum += succ.probability;
      if (succ.probability == 0) continue;
      auto it = std::find_if(kept.begin(), kept.end(),
                             [&](const Successor& k) { return k.target == succ.target; });
      if (it != kept.end())
        it->probability += succ.probability;
      else
        kept.push_back(succ);
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance)
      throw ModelError(Kind::Distribution,
                       describe() + ": probabilities sum to " + std::to_string(sum));
    // Rescaling an already normalised row would only perturb the last bits.
    const bool rescale = std::abs(sum - 1.0) > 1e-12;
    for (auto& k : kept) {
      if (rescale) k.probability /= sum;
      edges.emplace_back(t.from, k.target);
    }
    ++m.trans_begin_[t.from + 1];
    m.joint_.insert(m.joint_.end(), t.joint.begin(), t.joint.end());
    m.succ_.insert(m.succ_.end(), kept.begin(), kept.end());
    m.succ_begin_.push_back(static_cast<std::uint32_t>(m.succ_.size()));
  }
  for (std::size_t s = 0; s < n; ++s) m.trans_begin_[s + 1] += m.trans_begin_[s];

  for (StateId s = 0; s < n; ++s) {
    auto [lo, hi] = m.transitions(s);
    if (lo == hi)
      throw ModelError(Kind::Seriality,
                       "state " + q(m.state_names_[s]) + " has no enabled joint action");
    std::set<std::vector<ActionId>> joints;
    std::vector<std::set<ActionId>> per_agent(nagents);
    for (std::size_t t = lo; t < hi; ++t) {
      auto j = m.joint(t);
      if (!joints.emplace(j.begin(), j.end()).second)
        throw ModelError(Kind::ProductClosure,
                         "state " + q(m.state_names_[s]) + " repeats a joint action");
      for (AgentId a = 0; a < nagents; ++a) per_agent[a].insert(j[a]);
    }
    std::size_t product = 1;
    for (const auto& acts : per_agent) product *= acts.size();
    if (product != joints.size())
      throw ModelError(Kind::ProductClosure,
                       "state " + q(m.state_names_[s]) + " enables " +
                           std::to_string(joints.size()) +
                           " joint actions but the product of per-agent actions has " +
                           std::to_string(product));
  }

  for (AgentId a = 0; a < nagents; ++a) {
    std::vector<StateId> witness(m.tokens_[a].size(), std::numeric_limits<StateId>::max());
    for (StateId s = 0; s < n; ++s) {
      StateId& w = witness[m.local(s, a)];
      if (w == std::numeric_limits<StateId>::max()) {
        w = s;
        continue;
      }
      for (AtomId atom : m.observable_[a])
        if (m.holds(atom, s) != m.holds(atom, w))
          throw ModelError(Kind::Observability,
                           "atom " + q(m.atoms_[atom]) + " is observable to " +
                               q(m.agents_[a]) + " but differs between states " +
                               q(m.state_names_[w]) + " and " +
                               q(m.state_names_[s]) + " with local state " +
                               q(m.tokens_[a][m.local(s, a)]));
    }
  }

  m.graph_ = Graph(n, std::move(edges));
  return std::move(m);
}

// ------------------------------------------------------------------ JSON

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ModelError(Kind::Parse, where + ": missing key '" + key + "'");
  return *it;
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ModelError(Kind::Parse, where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

Model load_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError(Kind::Parse, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError(Kind::Parse, "model must be a JSON object");
  try {
    std::vector<std::string> agents;
    for (const auto& a : require(doc, "agents", "model")) agents.push_back(as_string(a, "agents"));
    ModelBuilder b(agents);
    if (auto it = doc.find("atoms"); it != doc.end())
      for (const auto& a : *it) b.add_atom(as_string(a, "atoms"));
    if (auto it = doc.find("features"); it != doc.end())
      for (const auto& [name, max] : it->items()) {
        if (!max.is_number_integer())
          throw ModelError(Kind::Parse, "feature " + q(name) + ": expected an integer");
        b.add_feature(name, max.get<std::int64_t>());
      }

    const auto& states = require(doc, "states", "model");
    if (!states.is_array()) throw ModelError(Kind::Parse, "'states' must be an array");
    for (const auto& st : states) {
      std::string id = as_string(require(st, "id", "state"), "state id");
      std::string where = "state " + q(id);
      const auto& local = require(st, "local", where);
      std::vector<std::string> tokens;
      for (const auto& a : agents) {
        auto it = local.find(a);
        if (it == local.end())
          throw ModelError(Kind::Reference, where + " has no local state for agent " + q(a));
        tokens.push_back(it->is_string() ? it->get<std::string>() : it->dump());
      }
      for (const auto& [a, _] : local.items())
        if (std::find(agents.begin(), agents.end(), a) == agents.end())
          throw ModelError(Kind::Reference, where + " names unknown agent " + q(a));
      StateId s = b.add_state(id, tokens);
      if (auto it = st.find("label"); it != st.end())
        for (const auto& atom : *it) b.label(s, as_string(atom, where + " label"));
      if (auto it = st.find("features"); it != st.end())
        for (const auto& [name, value] : it->items()) {
          if (!value.is_number_integer())
            throw ModelError(Kind::Parse, where + ": feature " + q(name) +
                                              " must be an integer");
          b.set_feature(s, name, value.get<std::int64_t>());
        }
    }
    std::unordered_map<std::string, StateId> index;
    {
      StateId s = 0;
      for (const auto& st : states) index[st["id"].get<std::string>()] = s++;
    }
    auto resolve = [&](const json& j, const std::string& where) {
      std::string name = as_string(j, where);
      auto it = index.find(name);
      if (it == index.end())
        throw ModelError(Kind::Reference, where + ": unknown state " + q(name));
      return it->second;
    };

    for (const auto& s : require(doc, "initial", "model")) b.add_initial(resolve(s, "initial"));

    for (const auto& t : require(doc, "transitions", "model")) {
      StateId from = resolve(require(t, "from", "transition"), "transition");
      std::string where = "transition from " + q(t["from"].get<std::string>());
      const auto& joint = require(t, "joint", where);
      std::vector<std::string> actions;
      for (const auto& a : agents) {
        auto it = joint.find(a);
        if (it == joint.end())
          throw ModelError(Kind::Reference, where + " has no action for agent " + q(a));
        actions.push_back(as_string(*it, where));
      }
      for (const auto& [a, _] : joint.items())
        if (std::find(agents.begin(), agents.end(), a) == agents.end())
          throw ModelError(Kind::Reference, where + " names unknown agent " + q(a));
      const auto& to = require(t, "to", where);
      std::vector<Successor> succ;
      if (to.is_string()) {
        succ.push_back({resolve(to, where), 1.0});
      } else if (to.is_array()) {
        for (const auto& o : to) {
          const auto& p = require(o, "prob", where);
          if (!p.is_number()) throw ModelError(Kind::Parse, where + ": 'prob' must be a number");
          succ.push_back({resolve(require(o, "state", where), where), p.get<double>()});
        }
      } else {
        throw ModelError(Kind::Parse, where + ": 'to' must be a state id or an array");
      }
      b.add_transition(from, actions, std::move(succ));
    }

    if (auto it = doc.find("observable"); it != doc.end())
      for (const auto& [a, atoms] : it->items()) {
        std::vector<std::string> names;
        for (const auto& atom : atoms) names.push_back(as_string(atom, "observable"));
        b.set_observable(a, names);
      }
    return std::move(b).build();
  } catch (const json::exception& e) {
    throw ModelError(Kind::Parse, std::string("malformed model: ") + e.what());
  }
}

std::string to_json(const Model& m) {
  ordered_json doc;
  doc["agents"] = m.agents();
  doc["atoms"] = m.atoms();
  doc["features"] = ordered_json::object();
  for (const auto& f : m.features()) doc["features"][f.name] = f.max;
  ordered_json states = ordered_json::array();
  for (StateId s = 0; s < m.num_states(); ++s) {
    ordered_json st;
    st["id"] = m.state_name(s);
    ordered_json label = ordered_json::array();
    for (AtomId a = 0; a < m.num_atoms(); ++a)
      if (m.holds(a, s)) label.push_back(m.atoms()[a]);
    st["label"] = std::move(label);
    st["features"] = ordered_json::object();
    for (std::size_t f = 0; f < m.features().size(); ++f)
      st["features"][m.features()[f].name] = m.feature_value(s, f);
    st["local"] = ordered_json::object();
    for (AgentId a = 0; a < m.num_agents(); ++a)
      st["local"][m.agents()[a]] = m.token_name(a, m.local(s, a));
    states.push_back(std::move(st));
  }
  doc["states"] = std::move(states);
  doc["initial"] = ordered_json::array();
  for (StateId s : m.initial()) doc["initial"].push_back(m.state_name(s));
  ordered_json transitions = ordered_json::array();
  for (StateId s = 0; s < m.num_states(); ++s) {
    auto [lo, hi] = m.transitions(s);
    for (std::size_t t = lo; t < hi; ++t) {
      ordered_json tr;
      tr["from"] = m.state_name(s);
      tr["joint"] = ordered_json::object();
      auto j = m.joint(t);
      for (AgentId a = 0; a < m.num_agents(); ++a) tr["joint"][m.agents()[a]] = m.actions(a)[j[a]];
      auto succ = m.successors(t);
      if (succ.size() == 1) {
        tr["to"] = m.state_name(succ[0].target);
      } else {
        tr["to"] = ordered_json::array();
        for (const auto& o : succ)
          tr["to"].push_back({{"state", m.state_name(o.target)}, {"prob", o.probability}});
      }
      transitions.push_back(std::move(tr));
    }
  }
  doc["transitions"] = std::move(transitions);
  doc["observable"] = ordered_json::object();
  for (AgentId a = 0; a < m.num_agents(); ++a) {
    ordered_json atoms = ordered_json::array();
    for (AtomId atom : m.observable(a)) atoms.push_back(m.atoms()[atom]);
    doc["observable"][m.agents()[a]] = std::move(atoms);
  }
  return doc.dump(2) + "\n";
}

// ------------------------------------------------------------ utilities

StateSet reachable(const Model& m) { return reachable_from(m.graph(), m.initial()); }

std::vector<Component> scc_decomposition(const Model& m) {
  return strongly_connected_components(m.graph());
}

StateSet predicate_states(const Model& m, const Formula& f) {
  const auto& v = f.node().value;
  const std::size_t n = m.num_states();
  if (const auto* c = std::get_if<node::Constant>(&v)) return StateSet(n, c->value);
  if (const auto* a = std::get_if<node::Atom>(&v)) {
    std::string name = atom_symbol(*a);
    auto id = m.find_atom(name);
    if (!id) throw ModelError(Kind::Reference, "unknown atom " + q(name));
    return m.atom_states(*id);
  }
  if (const auto* c = std::get_if<node::Compare>(&v)) {
    auto feature = m.find_feature(c->feature);
    if (!feature) throw ModelError(Kind::Reference, "unknown feature " + q(c->feature));
    const auto* rhs = std::get_if<std::int64_t>(&c->rhs);
    if (!rhs) throw FormulaError("comparison against an unbound variable", f.id());
    StateSet out(n);
    for (StateId s = 0; s < n; ++s)
      if (compare(m.feature_value(s, *feature), c->op, *rhs)) out.insert(s);
    return out;
  }
  if (const auto* x = std::get_if<node::Not>(&v)) return ~predicate_states(m, x->arg);
  if (const auto* b = std::get_if<node::Binary>(&v)) {
    StateSet l = predicate_states(m, b->lhs), r = predicate_states(m, b->rhs);
    switch (b->op) {
      case BinaryOp::And:
        return l & r;
      case BinaryOp::Or:
        return l | r;
      case BinaryOp::Implies:
        return ~l | r;
    }
  }
  throw FormulaError("not a state predicate: " + print(f), f.id());
}

Model augment_monitors(const Model& m, std::span<const Formula> operands) {
  if (operands.empty()) return m;
  if (operands.size() > 64)
    throw ModelError(Kind::Domain, "at most 64 ONCE operands are supported");
  std::vector<StateSet> sat;
  for (const auto& op : operands) sat.push_back(predicate_states(m, op));
  auto bits_at = [&](StateId s) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < sat.size(); ++b)
      if (sat[b].contains(s)) bits |= 1ULL << b;
    return bits;
  };

  ModelBuilder out = ModelBuilder::like(m);
  std::vector<AtomId> monitor;
  for (std::size_t b = 0; b < operands.size(); ++b) monitor.push_back(out.add_atom(monitor_atom(b)));

  struct Key {
    StateId s;
    std::uint64_t bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.bits * 0x9E3779B97F4A7C15ULL ^ k.s);
    }
  };
  std::unordered_map<Key, StateId, KeyHash> ids;
  std::deque<Key> work;
  const std::size_t nagents = m.num_agents();

  auto intern = [&](Key k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    std::string name = m.state_name(k.s) + "#";
    for (std::size_t b = 0; b < operands.size(); ++b) name += (k.bits >> b) & 1 ? '1' : '0';
    std::vector<TokenId> local(nagents);
    for (AgentId a = 0; a < nagents; ++a) local[a] = m.local(k.s, a);
    StateId id = out.add_state(name, std::move(local));
    out.set_origin(id, k.s);
    for (AtomId atom = 0; atom < m.num_atoms(); ++atom)
      if (m.holds(atom, k.s)) out.label(id, atom);
    for (std::size_t b = 0; b < operands.size(); ++b)
      if ((k.bits >> b) & 1) out.label(id, monitor[b]);
    for (std::size_t f = 0; f < m.features().size(); ++f)
      out.set_feature(id, m.features()[f].name, m.feature_value(k.s, f));
    ids.emplace(k, id);
    work.push_back(k);
    return id;
  };

  for (StateId s : m.initial()) out.add_initial(intern({s, bits_at(s)}));
  while (!work.empty()) {
    Key k = work.front();
    work.pop_front();
    StateId from = ids.at(k);
    auto [lo, hi] = m.transitions(k.s);
    for (std::size_t t = lo; t < hi; ++t) {
      std::vector<Successor> to;
      for (const auto& succ : m.successors(t))
        to.push_back({intern({succ.target, k.bits | bits_at(succ.target)}), succ.probability});
      auto j = m.joint(t);
      out.add_transition(from, std::vector<ActionId>(j.begin(), j.end()), std::move(to));
    }
  }
  return std::move(out).build();
}

// ------------------------------------------------------------ strategies

std::vector<Strategy> load_strategies(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError(Kind::Parse, std::string("malformed strategy table: ") + e.what());
  }
  try {
    std::vector<Strategy> out;
    std::set<std::string> ids;
    for (const auto& s : require(doc, "strategies", "strategy table")) {
      Strategy st;
      st.id = as_string(require(s, "id", "strategy"), "strategy id");
      st.agent = as_string(require(s, "agent", "strategy " + q(st.id)), "strategy agent");
      for (const auto& [token, action] : require(s, "choice", "strategy " + q(st.id)).items())
        st.choice[token] = as_string(action, "strategy " + q(st.id));
      if (!ids.insert(st.id).second)
        throw ModelError(Kind::Strategy, "duplicate strategy id " + q(st.id));
      out.push_back(std::move(st));
    }
    return out;
  } catch (const json::exception& e) {
    throw ModelError(Kind::Parse, std::string("malformed strategy table: ") + e.what());
  }
}

std::string strategies_to_json(const std::vector<Strategy>& table) {
  ordered_json doc;
  doc["strategies"] = ordered_json::array();
  for (const auto& s : table) {
    ordered_json st;
    st["id"] = s.id;
    st["agent"] = s.agent;
    st["choice"] = ordered_json::object();
    for (const auto& [token, action] : s.choice) st["choice"][token] = action;
    doc["strategies"].push_back(std::move(st));
  }
  return doc.dump(2) + "\n";
}

Model apply_strategy(const Model& m, const Strategy& s) {
  auto agent = m.find_agent(s.agent);
  if (!agent)
    throw ModelError(Kind::Reference,
                     "strategy " + q(s.id) + " is for unknown agent " + q(s.agent));
  const AgentId a = *agent;
  constexpr ActionId kFree = std::numeric_limits<ActionId>::max();
  std::vector<ActionId> chosen(m.num_tokens(a), kFree);
  for (const auto& [token, action] : s.choice) {
    auto t = m.find_token(a, token);
    if (!t) continue;  // token absent from this model
    auto act = m.find_action(a, action);
    if (!act)
      throw ModelError(Kind::Strategy, "strategy " + q(s.id) + " chooses unknown action " +
                                           q(action) + " for agent " + q(s.agent));
    chosen[*t] = *act;
  }
  StateSet live = reachable(m);

  ModelBuilder out = ModelBuilder::like(m);
  const std::size_t nagents = m.num_agents();
  for (StateId st = 0; st < m.num_states(); ++st) {
    std::vector<TokenId> local(nagents);
    for (AgentId b = 0; b < nagents; ++b) local[b] = m.local(st, b);
    StateId id = out.add_state(m.state_name(st), std::move(local));
    if (m.origin(st) != st) out.set_origin(id, m.origin(st));
    for (AtomId atom = 0; atom < m.num_atoms(); ++atom)
      if (m.holds(atom, st)) out.label(id, atom);
    for (std::size_t f = 0; f < m.features().size(); ++f)
      out.set_feature(id, m.features()[f].name, m.feature_value(st, f));
  }
  for (StateId st : m.initial()) out.add_initial(st);
  for (StateId st = 0; st < m.num_states(); ++st) {
    ActionId want = chosen[m.local(st, a)];
    if (want == kFree && live.contains(st))
      throw ModelError(Kind::Strategy, "strategy " + q(s.id) +
                                           " has no choice for local state " +
                                           q(m.token_name(a, m.local(st, a))) +
                                           " (reachable state " + q(m.state_name(st)) + ")");
    auto [lo, hi] = m.transitions(st);
    bool any = false;
    for (std::size_t t = lo; t < hi; ++t) {
      auto j = m.joint(t);
      if (want != kFree && j[a] != want) continue;
      auto succ = m.successors(t);
      out.add_transition(st, std::vector<ActionId>(j.begin(), j.end()),
                         std::vector<Successor>(succ.begin(), succ.end()));
      any = true;
    }
    if (!any)
      throw ModelError(Kind::Deadlock, "strategy " + q(s.id) + " leaves state " +
                                           q(m.state_name(st)) +
                                           " without an enabled transition (action " +
                                           q(m.actions(a)[want]) + " not enabled)");
  }
  return std::move(out).build();
}

}  // namespace agentcheck
