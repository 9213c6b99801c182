#include "agentcheck/scenario.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_map>

namespace agentcheck {

namespace {

enum Health : std::uint8_t { S, E, I1, I2, I3, R };

constexpr const char* kHealthName[] = {"S", "E", "I1", "I2", "I3", "R"};

bool infectious(std::uint8_t h) { return h >= I1 && h <= I3; }

struct Config {
  std::array<std::uint8_t, 4> health{};
  std::uint8_t known = 0, notified = 0, quarantined = 0;

  std::uint64_t key() const {
    std::uint64_t k = 0;
    for (auto h : health) k = k << 3 | h;
    return k << 12 | std::uint64_t(known) << 8 | std::uint64_t(notified) << 4 | quarantined;
  }
};

bool bit(std::uint8_t mask, int i) { return mask >> i & 1; }

std::string bits(std::uint8_t mask, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += bit(mask, i) ? '1' : '0';
  return s;
}

struct Contact {
  int i, j;  // 0-based, i < j
};

class Generator {
 public:
  explicit Generator(const ScenarioParams& p) : p_(p), n_(p.citizens) {
    if (n_ < 1 || n_ > 4) throw ScenarioError("citizens must be between 1 and 4");
    adopt_ = p.adoption.empty() ? std::vector<bool>(n_, true) : p.adoption;
    if (static_cast<int>(adopt_.size()) != n_)
      throw ScenarioError("adoption lists " + std::to_string(adopt_.size()) +
                          " citizens, expected " + std::to_string(n_));
    if (!(p.notify_reliability >= 0.0 && p.notify_reliability <= 1.0))
      throw ScenarioError("notification reliability must lie in [0, 1]");
    build_contacts();
  }

  ScenarioModel run();

 private:
  void build_contacts();
  std::uint8_t infected_count(const Config& c) const;
  std::string state_name(const Config& c) const;
  std::string authority_token(const Config& c) const;
  StateId intern(const Config& c);
  void expand(StateId s, const Config& c);

  const ScenarioParams& p_;
  int n_;
  std::vector<bool> adopt_;
  std::vector<Contact> contacts_;

  std::vector<std::string> agents_;
  std::optional<ModelBuilder> b_;
  AgentId env_ = 0;
  std::vector<ActionId> notify_, meet_;
  ActionId wait_a_ = 0, none_ = 0;
  std::vector<ActionId> wait_c_, quarantine_;
  std::vector<AtomId> exposed_, infected_, notified_, quarantined_, access_;
  AtomId outbreak_ = 0, control_ = 0;

  std::unordered_map<std::uint64_t, StateId> index_;
  std::deque<std::pair<StateId, Config>> queue_;
  std::map<std::string, std::string> notify_all_;  // authority token -> action
};

void Generator::build_contacts() {
  auto add = [&](int i, int j) {
    if (i == j) return;
    if (i > j) std::swap(i, j);
    for (const auto& c : contacts_)
      if (c.i == i && c.j == j) return;
    contacts_.push_back({i, j});
  };
  switch (p_.contacts) {
    case ContactGraph::Complete:
      for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) add(i, j);
      break;
    case ContactGraph::Ring:
      for (int i = 0; i < n_; ++i) add(i, (i + 1) % n_);
      break;
    case ContactGraph::Explicit:
      for (auto [i, j] : p_.edges) {
        if (i < 1 || i > n_ || j < 1 || j > n_)
          throw ScenarioError("contact edge " + std::to_string(i) + "-" + std::to_string(j) +
                              " names an unknown citizen");
        add(i - 1, j - 1);
      }
      break;
  }
  std::sort(contacts_.begin(), contacts_.end(),
            [](const Contact& x, const Contact& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
}

std::uint8_t Generator::infected_count(const Config& c) const {
  std::uint8_t k = 0;
  for (int i = 0; i < n_; ++i) k += infectious(c.health[i]);
  return k;
}

std::string Generator::state_name(const Config& c) const {
  std::string s;
  for (int i = 0; i < n_; ++i) {
    if (i) s += '.';
    s += kHealthName[c.health[i]];
  }
  s += "/k" + bits(c.known, n_) + "/n" + bits(c.notified, n_) + "/q" + bits(c.quarantined, n_);
  return s;
}

std::string Generator::authority_token(const Config& c) const {
  std::string t = "k" + bits(c.known, n_) + "/n" + bits(c.notified, n_);
  if (p_.testing) t += "/c" + std::to_string(infected_count(c));
  return t;
}

StateId Generator::intern(const Config& c) {
  auto [it, inserted] = index_.emplace(c.key(), 0);
  if (!inserted) return it->second;
  if (b_->num_states() >= p_.max_states)
    throw ScenarioError("state space exceeds " + std::to_string(p_.max_states) + " states");

  std::vector<TokenId> local(agents_.size());
  const std::string atoken = authority_token(c);
  local[0] = b_->declare_token(0, atoken);
  for (int i = 0; i < n_; ++i)
    local[1 + i] = b_->declare_token(1 + i, std::string("n") + (bit(c.notified, i) ? '1' : '0') +
                                                "/q" + (bit(c.quarantined, i) ? '1' : '0'));
  const std::string name = state_name(c);
  local[env_] = b_->declare_token(env_, name);
  StateId s = b_->add_state(name, std::move(local));
  it->second = s;

  for (int i = 0; i < n_; ++i) {
    if (c.health[i] == E) b_->label(s, exposed_[i]);
    if (infectious(c.health[i])) b_->label(s, infected_[i]);
    if (bit(c.notified, i)) b_->label(s, notified_[i]);
    if (bit(c.quarantined, i)) b_->label(s, quarantined_[i]);
    if (bit(c.known, i)) b_->label(s, access_[i]);
  }
  const auto count = infected_count(c);
  if (count >= 2) b_->label(s, outbreak_);
  if (count == 0) b_->label(s, control_);
  b_->set_feature(s, "num_infected", count);

  if (!notify_all_.count(atoken)) {
    std::string action = "wait";
    for (int i = 0; i < n_; ++i)
      if (bit(c.known, i) && !bit(c.notified, i)) {
        action = "notify_" + std::to_string(i + 1);
        break;
      }
    notify_all_.emplace(atoken, action);
  }
  queue_.emplace_back(s, c);
  return s;
}

void Generator::expand(StateId s, const Config& c) {
  // Enabled actions per agent.
  std::vector<std::pair<ActionId, int>> auth{{wait_a_, -1}};
  for (int i = 0; i < n_; ++i)
    if (bit(c.known, i) && !bit(c.notified, i)) auth.emplace_back(notify_[i], i);
  std::vector<std::pair<ActionId, int>> env{{none_, -1}};
  for (std::size_t e = 0; e < contacts_.size(); ++e) {
    auto [i, j] = contacts_[e];
    if (bit(c.quarantined, i) || bit(c.quarantined, j)) continue;
    if ((infectious(c.health[i]) && c.health[j] == S) ||
        (infectious(c.health[j]) && c.health[i] == S))
      env.emplace_back(meet_[e], static_cast<int>(e));
  }
  std::vector<int> can_quarantine;
  for (int i = 0; i < n_; ++i)
    if (bit(c.notified, i) && !bit(c.quarantined, i)) can_quarantine.push_back(i);

  // Citizen choices as a mask over can_quarantine.
  const std::uint32_t choices = 1u << can_quarantine.size();
  std::vector<ActionId> joint(agents_.size());
  for (const auto& [aact, target] : auth)
    for (std::uint32_t qm = 0; qm < choices; ++qm)
      for (const auto& [eact, edge] : env) {
        Config next = c;
        for (int i = 0; i < n_; ++i) {
          auto h = c.health[i];
          if (h != S && h != R) next.health[i] = h + 1;
          if (h == E && p_.testing && adopt_[i]) next.known |= 1u << i;
        }
        if (edge >= 0) {
          auto [i, j] = contacts_[edge];
          int victim = c.health[i] == S ? i : j;
          int source = victim == i ? j : i;
          next.health[victim] = E;
          if (p_.testing && adopt_[victim] && adopt_[source]) next.known |= 1u << victim;
        }
        for (int i = 0; i < n_; ++i) joint[1 + i] = wait_c_[i];
        for (std::size_t k = 0; k < can_quarantine.size(); ++k)
          if (qm >> k & 1) {
            int i = can_quarantine[k];
            joint[1 + i] = quarantine_[i];
            next.quarantined |= 1u << i;
          }
        joint[0] = aact;
        joint[env_] = eact;

        std::vector<Successor> to;
        if (target < 0) {
          to.push_back({intern(next), 1.0});
        } else {
          Config ok = next;
          ok.notified |= 1u << target;
          const double r = p_.notify_reliability;
          if (r > 0) to.push_back({intern(ok), r});
          if (r < 1) to.push_back({intern(next), 1.0 - r});
        }
        b_->add_transition(s, joint, std::move(to));
      }
}

ScenarioModel Generator::run() {
  agents_.push_back("a");
  for (int i = 1; i <= n_; ++i) agents_.push_back(std::to_string(i));
  agents_.push_back("env");
  env_ = static_cast<AgentId>(agents_.size() - 1);
  b_.emplace(agents_);

  ScenarioModel out;
  std::vector<std::string> observed_by_a;
  for (int i = 1; i <= n_; ++i) {
    const auto n = std::to_string(i);
    exposed_.push_back(b_->add_atom("exposed_" + n));
    infected_.push_back(b_->add_atom("infected_" + n));
    notified_.push_back(b_->add_atom("notified_" + n));
    quarantined_.push_back(b_->add_atom("quarantined_" + n));
    access_.push_back(b_->add_atom("access_a_" + n));
    out.atoms["exposed_" + n] = "citizen " + n + " is exposed (incubating)";
    out.atoms["infected_" + n] = "citizen " + n + " is infectious";
    out.atoms["notified_" + n] = "citizen " + n + " has been notified";
    out.atoms["quarantined_" + n] = "citizen " + n + " is in quarantine";
    out.atoms["access_a_" + n] = "the authority knows that citizen " + n + " was exposed";
    observed_by_a.push_back("access_a_" + n);
  }
  outbreak_ = b_->add_atom("outbreak");
  control_ = b_->add_atom("control_pandemic");
  out.atoms["outbreak"] = "at least two citizens are infectious";
  out.atoms["control_pandemic"] = "no citizen is infectious";
  b_->add_feature("num_infected", n_);

  for (int i = 1; i <= n_; ++i) {
    const auto n = std::to_string(i);
    b_->set_observable(n, {"notified_" + n, "quarantined_" + n});
  }
  if (p_.testing) {
    observed_by_a.push_back("outbreak");
    observed_by_a.push_back("control_pandemic");
  }
  b_->set_observable("a", observed_by_a);

  wait_a_ = b_->declare_action(0, "wait");
  for (int i = 1; i <= n_; ++i) notify_.push_back(b_->declare_action(0, "notify_" + std::to_string(i)));
  for (int i = 0; i < n_; ++i) {
    wait_c_.push_back(b_->declare_action(1 + i, "wait"));
    quarantine_.push_back(b_->declare_action(1 + i, "quarantine"));
  }
  none_ = b_->declare_action(env_, "none");
  for (const auto& c : contacts_)
    meet_.push_back(b_->declare_action(
        env_, "meet_" + std::to_string(c.i + 1) + "_" + std::to_string(c.j + 1)));

  std::vector<int> index_cases;
  if (p_.initial_exposed) {
    for (int i : *p_.initial_exposed) {
      if (i < 1 || i > n_)
        throw ScenarioError("initial exposure names unknown citizen " + std::to_string(i));
      if (std::find(index_cases.begin(), index_cases.end(), i - 1) == index_cases.end())
        index_cases.push_back(i - 1);
    }
    std::sort(index_cases.begin(), index_cases.end());
  } else {
    for (int i = 0; i < n_; ++i) index_cases.push_back(i);
  }
  if (index_cases.empty()) {
    b_->add_initial(intern(Config{}));
  } else {
    for (int i : index_cases) {
      Config c;
      c.health[i] = E;
      b_->add_initial(intern(c));
    }
  }

  while (!queue_.empty()) {
    auto [s, c] = queue_.front();
    queue_.pop_front();
    expand(s, c);
  }

  out.model = std::move(*b_).build();
  Strategy notify_all{"notify_all", "a", {}}, idle{"idle", "a", {}};
  for (const auto& [token, action] : notify_all_) {
    notify_all.choice[token] = action;
    idle.choice[token] = "wait";
  }
  out.strategies.push_back(std::move(notify_all));
  out.strategies.push_back(std::move(idle));
  return out;
}

const char* const kCatalog =
#include "catalog.inc"
    ;

}  // namespace

ScenarioModel generate(const ScenarioParams& params) { return Generator(params).run(); }

std::vector<Requirement> catalog() {
  auto parsed = parse_spec(kCatalog);
  if (!parsed.ok()) throw std::logic_error("built-in catalog: " + parsed.errors.front().message);
  return std::move(parsed.requirements);
}

std::string catalog_text() { return print_spec(catalog()); }

}  // namespace agentcheck
