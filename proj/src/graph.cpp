#include "agentcheck/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace agentcheck {

namespace {

void build_csr(std::size_t n, const std::vector<std::pair<StateId, StateId>>& edges,
               bool reverse, std::vector<std::uint32_t>& begin,
               std::vector<StateId>& adj) {
  begin.assign(n + 1, 0);
  for (const auto& [u, v] : edges) ++begin[(reverse ? v : u) + 1];
  for (std::size_t i = 0; i < n; ++i) begin[i + 1] += begin[i];
  adj.resize(edges.size());
  std::vector<std::uint32_t> fill(begin.begin(), begin.end() - 1);
  for (const auto& [u, v] : edges) {
    StateId from = reverse ? v : u;
    adj[fill[from]++] = reverse ? u : v;
  }
}

}  // namespace

Graph::Graph(std::size_t vertices, std::vector<std::pair<StateId, StateId>> edges) {
  for (const auto& [u, v] : edges)
    if (u >= vertices || v >= vertices)
      throw std::out_of_range("graph edge endpoint out of range");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  build_csr(vertices, edges, false, succ_begin_, succ_);
  build_csr(vertices, edges, true, pred_begin_, pred_);
}

std::vector<Component> strongly_connected_components(const Graph& g) {
  const std::size_t n = g.size();
  constexpr std::uint32_t unvisited = ~0u;
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  std::vector<std::pair<StateId, std::size_t>> call;  // vertex, next successor
  std::vector<Component> out;
  std::uint32_t counter = 0;

  for (StateId root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      auto succ = g.successors(v);
      if (next < succ.size()) {
        StateId w = succ[next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      StateId done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] != index[done]) continue;
      Component c;
      StateId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        c.states.push_back(w);
      } while (w != done);
      std::sort(c.states.begin(), c.states.end());
      if (c.states.size() > 1) {
        c.cyclic = true;
      } else {
        auto s = g.successors(done);
        c.cyclic = std::find(s.begin(), s.end(), done) != s.end();
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

StateSet cyclic_states(const Graph& g) {
  StateSet out(g.size());
  for (const auto& c : strongly_connected_components(g))
    if (c.cyclic)
      for (StateId s : c.states) out.insert(s);
  return out;
}

StateSet reachable_from(const Graph& g, std::span<const StateId> sources) {
  StateSet seen(g.size());
  std::vector<StateId> work;
  for (StateId s : sources)
    if (!seen.contains(s)) {
      seen.insert(s);
      work.push_back(s);
    }
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    for (StateId t : g.successors(s))
      if (!seen.contains(t)) {
        seen.insert(t);
        work.push_back(t);
      }
  }
  return seen;
}

StateSet pre_exists(const Graph& g, const StateSet& target) {
  StateSet out(g.size());
  for (StateId t : target.members())
    for (StateId s : g.predecessors(t)) out.insert(s);
  return out;
}

StateSet pre_forall(const Graph& g, const StateSet& target) {
  StateSet out(g.size());
  for (StateId s = 0; s < g.size(); ++s) {
    bool all = true;
    for (StateId t : g.successors(s))
      if (!target.contains(t)) {
        all = false;
        break;
      }
    out.set(s, all);
  }
  return out;
}

StateSet exists_until(const Graph& g, const StateSet& hold, const StateSet& goal) {
  StateSet out = goal;
  std::vector<StateId> work = goal.members();
  while (!work.empty()) {
    StateId t = work.back();
    work.pop_back();
    for (StateId s : g.predecessors(t))
      if (!out.contains(s) && hold.contains(s)) {
        out.insert(s);
        work.push_back(s);
      }
  }
  return out;
}

StateSet forall_until(const Graph& g, const StateSet& hold, const StateSet& goal) {
  StateSet out = goal;
  std::vector<std::uint32_t> remaining(g.size());
  for (StateId s = 0; s < g.size(); ++s)
    remaining[s] = static_cast<std::uint32_t>(g.successors(s).size());
  std::vector<StateId> work = goal.members();
  while (!work.empty()) {
    StateId t = work.back();
    work.pop_back();
    for (StateId s : g.predecessors(t)) {
      if (out.contains(s) || !hold.contains(s)) continue;
      if (--remaining[s] == 0) {
        out.insert(s);
        work.push_back(s);
      }
    }
  }
  return out;
}

StateSet exists_globally(const Graph& g, const StateSet& z) {
  return ~forall_until(g, StateSet(g.size(), true), ~z);
}

StateSet all_paths(const Graph& g, PathBody::Kind kind, std::uint32_t steps,
                   const StateSet& hold, const StateSet& arg) {
  using K = PathBody::Kind;
  const StateSet all(g.size(), true);
  switch (kind) {
    case K::Next:
      return pre_forall(g, arg);
    case K::Finally:
      return forall_until(g, all, arg);
    case K::Globally:
      return ~exists_until(g, all, ~arg);
    case K::Until:
      return forall_until(g, hold, arg);
    case K::BoundedFinally: {
      StateSet z = arg;
      for (std::uint32_t i = 0; i < steps; ++i) z = arg | pre_forall(g, z);
      return z;
    }
    case K::FinallyGlobally:
      // Some path avoids settling in arg iff it can reach a cycle through !arg.
      return ~exists_until(g, all, ~arg & cyclic_states(g));
    case K::GloballyFinally:
      return ~exists_until(g, all, exists_globally(g, ~arg));
  }
  throw std::logic_error("unknown path body");
}

StateSet some_path(const Graph& g, PathBody::Kind kind, std::uint32_t steps,
                   const StateSet& hold, const StateSet& arg) {
  using K = PathBody::Kind;
  const StateSet all(g.size(), true);
  switch (kind) {
    case K::Next:
      return pre_exists(g, arg);
    case K::Finally:
      return exists_until(g, all, arg);
    case K::Globally:
      return exists_globally(g, arg);
    case K::Until:
      return exists_until(g, hold, arg);
    case K::BoundedFinally: {
      StateSet z = arg;
      for (std::uint32_t i = 0; i < steps; ++i) z = arg | pre_exists(g, z);
      return z;
    }
    case K::FinallyGlobally:
      return exists_until(g, all, exists_globally(g, arg));
    case K::GloballyFinally:
      return exists_until(g, all, arg & cyclic_states(g));
  }
  throw std::logic_error("unknown path body");
}

}  // namespace agentcheck
