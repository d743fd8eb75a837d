#include "dqma/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <set>

#include "dqma/linalg.hpp"
#include "dqma/path.hpp"
#include "dqma/random.hpp"

namespace dqma {

namespace {

constexpr int kMaxExactTreeCoins = 20;  // 2^K coin assignments are enumerated
constexpr double kWilsonZ99 = 2.5758293035489004;

double wilson_radius(long accepted, long trials) {
  const double z = kWilsonZ99;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(accepted) / n;
  const double denom = 1.0 + z * z / n;
  return (z / denom) * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
}

double wilson_center(long accepted, long trials) {
  const double z = kWilsonZ99;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(accepted) / n;
  return (phat + z * z / (2.0 * n)) / (1.0 + z * z / n);
}

}  // namespace

void Network::validate() const {
  if (nodes.empty()) throw std::invalid_argument("Network: no nodes");
  std::set<int> ids;
  for (int id : nodes) {
    if (id < 0) throw std::invalid_argument("Network: node ids must be non-negative");
    if (!ids.insert(id).second)
      throw std::invalid_argument("Network: duplicate node id " + std::to_string(id));
  }
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (!ids.count(a) || !ids.count(b))
      throw std::invalid_argument("Network: edge endpoint not a node");
    if (a == b) throw std::invalid_argument("Network: self-loop at " + std::to_string(a));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
      throw std::invalid_argument("Network: duplicate edge");
  }
  if (terminals.size() < 2) throw std::invalid_argument("Network: need at least 2 terminals");
  std::set<int> term_set;
  for (int u : terminals) {
    if (!ids.count(u)) throw std::invalid_argument("Network: terminal is not a node");
    if (!term_set.insert(u).second) throw std::invalid_argument("Network: duplicate terminal");
  }
  if (inputs.size() != terminals.size())
    throw std::invalid_argument("Network: one input per terminal required");
  const int n = static_cast<int>(inputs.front().size());
  for (const auto& x : inputs) require_bitstring(x, n, "Network");
  bfs_distances(*this, nodes.front());  // throws when disconnected
}

std::map<int, std::vector<int>> Network::adjacency() const {
  std::map<int, std::vector<int>> adj;
  for (int id : nodes) adj[id];
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& [id, nb] : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

int Network::terminal_index(int id) const {
  for (std::size_t i = 0; i < terminals.size(); ++i)
    if (terminals[i] == id) return static_cast<int>(i);
  return -1;
}

int Network::input_bits() const {
  if (inputs.empty()) throw std::invalid_argument("Network: no inputs");
  return static_cast<int>(inputs.front().size());
}

std::map<int, int> bfs_distances(const Network& net, int source) {
  const auto adj = net.adjacency();
  if (!adj.count(source))
    throw std::invalid_argument("bfs_distances: source " + std::to_string(source) +
                                " is not a node");
  std::map<int, int> dist;
  dist[source] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj.at(v))
      if (!dist.count(w)) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  if (dist.size() != net.nodes.size())
    throw std::invalid_argument("bfs_distances: the network is disconnected");
  return dist;
}

RadiusCenter terminal_radius_and_center(const Network& net) {
  net.validate();
  std::vector<int> terms = net.terminals;
  std::sort(terms.begin(), terms.end());
  RadiusCenter best{-1, -1};
  for (int u : terms) {
    const auto dist = bfs_distances(net, u);
    int ecc = 0;
    for (int w : terms) ecc = std::max(ecc, dist.at(w));
    if (best.center < 0 || ecc < best.radius) best = {ecc, u};
  }
  return best;
}

std::vector<int> CertTree::node_ids() const {
  std::vector<int> ids;
  for (const auto& [id, p] : parent) ids.push_back(id);
  return ids;  // std::map keys are already sorted
}

int CertTree::max_degree() const {
  int deg = 0;
  for (const auto& [id, ch] : children)
    deg = std::max(deg, static_cast<int>(ch.size()) + (id == root ? 0 : 1));
  return deg;
}

int CertTree::max_depth() const {
  int d = 0;
  for (const auto& [id, dep] : depth) d = std::max(d, dep);
  return d;
}

void CertTree::validate(const Network& net) const {
  const int t = static_cast<int>(net.terminals.size());
  if (net.terminal_index(root) < 0) throw std::logic_error("CertTree: root is not a terminal");
  if (!children.count(root) || children.at(root).size() != 1)
    throw std::logic_error("CertTree: root must have exactly one child");
  if (depth.at(root) != 0 || parent.at(root) != root)
    throw std::logic_error("CertTree: root depth/parent malformed");
  for (int u : net.terminals)
    if (!parent.count(u)) throw std::logic_error("CertTree: terminal missing from tree");
  for (const auto& [id, ch] : children) {
    if (id != root && net.terminal_index(id) >= 0 && !ch.empty())
      throw std::logic_error("CertTree: non-root terminal is not a leaf");
    for (int c : ch) {
      if (parent.at(c) != id) throw std::logic_error("CertTree: parent/children mismatch");
      if (depth.at(c) != depth.at(id) + 1) throw std::logic_error("CertTree: depth mismatch");
    }
  }
  for (const auto& [p, host] : emulation)
    if (p != primed_id(host)) throw std::logic_error("CertTree: emulation map malformed");
  if (max_degree() > t) throw std::logic_error("CertTree: degree exceeds terminal count");
  if (max_depth() > radius + 1) throw std::logic_error("CertTree: depth exceeds radius + 1");
}

CertTree build_cert_tree(const Network& net) {
  const RadiusCenter rc = terminal_radius_and_center(net);
  const auto adj = net.adjacency();
  const auto dist = bfs_distances(net, rc.center);

  // BFS tree with smallest-id parents.
  std::map<int, int> bfs_parent;
  for (int v : net.nodes) {
    if (v == rc.center) continue;
    int best = -1;
    for (int w : adj.at(v))
      if (dist.at(w) == dist.at(v) - 1 && (best < 0 || w < best)) best = w;
    bfs_parent[v] = best;
  }

  // Keep only nodes whose subtree contains a terminal.
  std::vector<int> by_depth = net.nodes;
  std::sort(by_depth.begin(), by_depth.end(),
            [&](int a, int b) { return dist.at(a) > dist.at(b); });
  std::set<int> kept;
  for (int u : net.terminals) kept.insert(u);
  for (int v : by_depth)
    if (kept.count(v) && v != rc.center) kept.insert(bfs_parent.at(v));

  CertTree tree;
  tree.root = rc.center;
  tree.radius = rc.radius;
  tree.host_nodes.assign(kept.begin(), kept.end());
  tree.host_parent[rc.center] = rc.center;
  tree.host_depth[rc.center] = 0;
  for (int v : tree.host_nodes) {
    if (v == rc.center) continue;
    tree.host_parent[v] = bfs_parent.at(v);
    tree.host_depth[v] = dist.at(v);
  }

  // Start the protocol tree as the host tree.
  for (int v : tree.host_nodes) {
    tree.parent[v] = tree.host_parent.at(v);
    tree.children[v];
  }
  for (int v : tree.host_nodes)
    if (v != rc.center) tree.children[tree.parent.at(v)].push_back(v);

  // Prime internal non-root terminals: u'_i takes u_i's place, u_i becomes a
  // pendant leaf of u'_i.
  for (int u : net.terminals) {
    if (u == rc.center || tree.children.at(u).empty()) continue;
    const int p = CertTree::primed_id(u);
    tree.emulation[p] = u;
    tree.parent[p] = tree.parent.at(u);
    auto& siblings = tree.children.at(tree.parent.at(u));
    std::replace(siblings.begin(), siblings.end(), u, p);
    tree.children[p] = tree.children.at(u);
    for (int c : tree.children.at(p)) tree.parent[c] = p;
    tree.children[p].push_back(u);
    tree.parent[u] = p;
    tree.children[u].clear();
  }

  // Prime the root: u'_1 takes over the root's children and u_1 becomes the
  // degree-1 root above it.
  {
    const int p = CertTree::primed_id(rc.center);
    tree.emulation[p] = rc.center;
    tree.children[p] = tree.children.at(rc.center);
    for (int c : tree.children.at(p)) tree.parent[c] = p;
    tree.parent[p] = rc.center;
    tree.children[rc.center] = {p};
    tree.parent[rc.center] = rc.center;
  }

  for (auto& [id, ch] : tree.children) std::sort(ch.begin(), ch.end());

  // Depths from the new root.
  tree.depth[tree.root] = 0;
  std::deque<int> queue{tree.root};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int c : tree.children.at(v)) {
      tree.depth[c] = tree.depth.at(v) + 1;
      queue.push_back(c);
    }
  }

  tree.validate(net);
  return tree;
}

LabelAssignment label_tree(const Network& net, const CertTree& tree) {
  LabelAssignment labels;
  const auto adj = net.adjacency();
  // Multi-source BFS for distance-to-tree of off-tree nodes.
  std::map<int, int> dist;
  std::deque<int> queue;
  for (int v : tree.host_nodes) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj.at(v))
      if (!dist.count(w)) {
        dist[w] = dist.at(v) + 1;
        queue.push_back(w);
      }
  }
  for (int v : net.nodes) {
    TreeLabel label;
    if (dist.at(v) == 0) {
      label.on_tree = true;
      label.root_id = tree.root;
      label.parent_id = tree.host_parent.at(v);
      label.depth = tree.host_depth.at(v);
    } else {
      label.distance_to_tree = dist.at(v);
    }
    labels[v] = label;
  }
  return labels;
}

LabelVerdict verify_labels(const Network& net, const LabelAssignment& labels) {
  net.validate();
  const auto adj = net.adjacency();
  for (int v : net.nodes)
    if (!labels.count(v))
      throw std::invalid_argument("verify_labels: node " + std::to_string(v) + " has no label");

  LabelVerdict verdict;
  verdict.all_accept = true;
  for (int v : net.nodes) {
    const TreeLabel& label = labels.at(v);
    bool ok;
    if (label.on_tree) {
      if (label.depth == 0) {
        ok = v == label.root_id && label.parent_id == v;
      } else if (label.depth > 0) {
        ok = false;
        for (int w : adj.at(v)) {
          if (w != label.parent_id) continue;
          const TreeLabel& pl = labels.at(w);
          ok = pl.on_tree && pl.root_id == label.root_id && pl.depth == label.depth - 1;
          break;
        }
      } else {
        ok = false;
      }
    } else if (net.terminal_index(v) >= 0) {
      ok = false;  // terminals must sit on the tree
    } else {
      int best = -1;
      for (int w : adj.at(v)) {
        const TreeLabel& wl = labels.at(w);
        const int d = wl.on_tree ? 0 : wl.distance_to_tree;
        if (best < 0 || d < best) best = d;
      }
      ok = best >= 0 && label.distance_to_tree == best + 1;
    }
    verdict.per_node[v] = ok;
    verdict.all_accept = verdict.all_accept && ok;
  }
  return verdict;
}

int label_bit_budget(const Network& net) {
  int max_id = 0;
  for (int v : net.nodes) max_id = std::max(max_id, v);
  const int id_bits = std::max(1, ceil_log2(static_cast<long>(max_id) + 1));
  return 1 + 3 * id_bits;  // on-tree flag + (rootId, parentId, depth) / distance
}

std::vector<TreeTest> tree_active_tests(const CertTree& tree, const std::map<int, int>& coins,
                                        const std::map<int, int>& chosen_child) {
  std::vector<TreeTest> tests;
  for (int v : tree.node_ids()) {
    if (v != tree.root && !coins.count(v))
      throw std::invalid_argument("tree_active_tests: missing coin for node " +
                                  std::to_string(v));
  }
  for (int v : tree.node_ids()) {
    const bool is_terminal = !tree.is_primed(v) && tree.children.at(v).empty();
    std::vector<int> received;
    for (int c : tree.children.at(v))
      if (coins.at(c) == 0) received.push_back(c);
    if (v == tree.root) {
      if (!received.empty()) tests.push_back({v, received.front(), true});
      continue;
    }
    if (is_terminal || coins.at(v) != 1 || received.empty()) continue;
    int chosen = received.front();
    if (auto it = chosen_child.find(v); it != chosen_child.end()) {
      if (std::find(received.begin(), received.end(), it->second) == received.end())
        throw std::invalid_argument("tree_active_tests: chosen child did not send");
      chosen = it->second;
    }
    tests.push_back({v, chosen, false});
  }
  return tests;
}

namespace {

// Strategy and pairwise data materialized for one analysis run.
struct TreePrep {
  CertTree tree;
  Index m = 0;
  BinaryPOVM povm;                    // root measurement for the root input
  std::vector<int> coin_nodes;        // sorted non-root tree nodes
  std::vector<int> cert_nodes;        // sorted non-terminal tree nodes (joint slots)
  std::map<int, int> slot_of;
  std::map<int, PureState> terminal_states;  // non-root terminals
  bool product = true;
  bool pure = true;
  std::map<int, PureState> pure_certs;
  std::map<int, DensityMatrix> mixed_certs;
  std::optional<DensityMatrix> joint;
  // Accept probability of the SWAP test at v against child c's register,
  // from certificates (product) or reduced states (global); and of the root
  // measurement on the root child's register.
  std::map<std::pair<int, int>, double> pair_accept;
  double root_accept = 1.0;

};

DensityMatrix reduced_cert(const TreePrep& prep, const std::vector<int>& slots) {
  RegisterLayout layout;
  for (std::size_t i = 0; i < prep.cert_nodes.size(); ++i)
    layout.registers.push_back({static_cast<RegisterId>(i), prep.m});
  if (slots.size() == prep.cert_nodes.size()) return *prep.joint;
  std::vector<RegisterId> keep;
  for (int s : slots) keep.push_back(static_cast<RegisterId>(s));
  return partial_trace(*prep.joint, layout, keep);
}

DensityMatrix cert_density(const TreePrep& prep, int node) {
  if (prep.pure) return prep.pure_certs.at(node).to_density();
  return prep.mixed_certs.at(node);
}

TreePrep prepare_tree(const Network& net, const OneWayProtocol& protocol,
                      const TreeStrategy& strategy, Index dim_cap) {
  net.validate();
  if (net.input_bits() != protocol.input_bits)
    throw std::invalid_argument("run_tree_protocol: input length does not match the protocol");

  CertTree built = build_cert_tree(net);
  const std::string root_input = net.inputs[net.terminal_index(built.root)];
  TreePrep prep{std::move(built), protocol.message_dim, protocol.receiver_povm(root_input)};
  const CertTree& tree = prep.tree;

  for (int v : tree.node_ids()) {
    if (v != tree.root) prep.coin_nodes.push_back(v);
    const int term = tree.is_primed(v) ? -1 : net.terminal_index(v);
    if (term < 0) {
      prep.slot_of[v] = static_cast<int>(prep.cert_nodes.size());
      prep.cert_nodes.push_back(v);
    } else if (v != tree.root) {
      prep.terminal_states.emplace(v, protocol.message_state(net.inputs[term]));
    }
  }

  if (std::holds_alternative<TreeHonest>(strategy)) {
    for (int v : prep.cert_nodes) prep.pure_certs.emplace(v, protocol.message_state(root_input));
  } else if (const auto* rot = std::get_if<TreeRotation>(&strategy)) {
    const int target = rot->target_terminal;
    if (net.terminal_index(target) < 0 || target == tree.root)
      throw std::invalid_argument("run_tree_protocol: rotation target must be a non-root terminal");
    const PureState a = protocol.message_state(net.inputs[net.terminal_index(target)]);
    const PureState b = protocol.message_state(root_input);
    const int path_len = tree.depth.at(target);
    std::map<int, int> dist_from_target;  // nodes on the target-to-root path
    for (int v = tree.parent.at(target), j = 1; v != tree.root;
         v = tree.parent.at(v), ++j)
      dist_from_target[v] = j;
    for (int v : prep.cert_nodes) {
      if (auto it = dist_from_target.find(v); it != dist_from_target.end())
        prep.pure_certs.emplace(
            v, rotation_state(a, b, std::numbers::pi * it->second / (2.0 * path_len)));
      else
        prep.pure_certs.emplace(v, protocol.message_state(root_input));
    }
  } else if (const auto* product = std::get_if<TreeProduct>(&strategy)) {
    prep.pure = false;
    for (int v : prep.cert_nodes) {
      auto it = product->certificates.find(v);
      if (it == product->certificates.end())
        throw std::invalid_argument("run_tree_protocol: missing certificate for node " +
                                    std::to_string(v));
      if (it->second.dim() != prep.m)
        throw std::invalid_argument("run_tree_protocol: certificate dimension mismatch");
      prep.mixed_certs.emplace(v, it->second);
    }
    if (product->certificates.size() != prep.cert_nodes.size())
      throw std::invalid_argument("run_tree_protocol: certificate for a node not in the tree");
  } else {
    const auto& global = std::get<TreeGlobal>(strategy);
    prep.product = false;
    prep.pure = false;
    Index want = 1;
    for (std::size_t i = 0; i < prep.cert_nodes.size(); ++i) {
      if (want > dim_cap / prep.m)
        throw cap_exceeded_error("run_tree_protocol: certificate space exceeds the cap of " +
                                 std::to_string(dim_cap));
      want *= prep.m;
    }
    if (global.joint.dim() != want)
      throw std::invalid_argument("run_tree_protocol: joint certificate dimension mismatch");
    prep.joint = global.joint;
  }

  // Pairwise accept probabilities for every potential test.
  for (int v : prep.cert_nodes) {
    for (int c : tree.children.at(v)) {
      double acc;
      if (prep.terminal_states.count(c)) {
        const PureState& h = prep.terminal_states.at(c);
        if (prep.product)
          acc = prep.pure ? swap_test_accept_product(prep.pure_certs.at(v), h)
                          : swap_test_accept_product(prep.mixed_certs.at(v), h.to_density());
        else
          acc = 0.5 + 0.5 * measure_accept(h.amplitudes() * h.amplitudes().adjoint(),
                                           reduced_cert(prep, {prep.slot_of.at(v)}));
      } else if (prep.product) {
        acc = prep.pure ? swap_test_accept_product(prep.pure_certs.at(v), prep.pure_certs.at(c))
                        : swap_test_accept_product(prep.mixed_certs.at(v), prep.mixed_certs.at(c));
      } else {
        const int sv = prep.slot_of.at(v), sc = prep.slot_of.at(c);
        DensityMatrix pair = reduced_cert(prep, {std::min(sv, sc), std::max(sv, sc)});
        RegisterLayout pair_layout{{0, prep.m}, {1, prep.m}};
        acc = swap_test_accept_probability(pair, pair_layout);
      }
      prep.pair_accept[{v, c}] = acc;
    }
  }
  const int root_child = tree.children.at(tree.root).front();
  if (prep.product)
    prep.root_accept = prep.pure ? measure_accept(prep.povm.accept, prep.pure_certs.at(root_child))
                                 : measure_accept(prep.povm.accept, prep.mixed_certs.at(root_child));
  else
    prep.root_accept =
        measure_accept(prep.povm.accept, reduced_cert(prep, {prep.slot_of.at(root_child)}));
  return prep;
}

// Expectation tr((⊗ units)·rho) where each unit acts on one or two slots of
// the certificate space and all other slots carry the identity.
struct Unit {
  std::vector<int> slots;  // digit order of `op` follows this order
  const Matrix* op;
};

double expect_units(const Matrix& rho, const std::vector<Unit>& units,
                    const std::vector<Index>& dims) {
  const std::size_t n = dims.size();
  std::vector<Index> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * dims[i];
  const Index total = n == 0 ? 1 : stride[0] * dims[0];

  std::vector<int> used;
  for (const auto& u : units)
    for (int s : u.slots) used.push_back(s);
  Index combos = 1;
  for (int s : used) combos *= dims[s];

  Complex acc = 0.0;
  std::vector<Index> row_digit(n), col_digit(n);
  for (Index row = 0; row < total; ++row) {
    Index rest = row;
    for (std::size_t i = 0; i < n; ++i) {
      row_digit[i] = rest / stride[i];
      rest %= stride[i];
    }
    col_digit = row_digit;
    for (Index combo = 0; combo < combos; ++combo) {
      Index c = combo;
      for (std::size_t k = used.size(); k-- > 0;) {
        col_digit[used[k]] = c % dims[used[k]];
        c /= dims[used[k]];
      }
      Complex val = 1.0;
      for (const auto& u : units) {
        Index r_sub = 0, c_sub = 0;
        for (int s : u.slots) {
          r_sub = r_sub * dims[s] + row_digit[s];
          c_sub = c_sub * dims[s] + col_digit[s];
        }
        val *= (*u.op)(r_sub, c_sub);
      }
      Index col = 0;
      for (std::size_t i = 0; i < n; ++i) col = col * dims[i] + col_digit[i];
      acc += val * rho(col, row);
    }
  }
  return acc.real();
}

struct CoinView {
  std::vector<int> received;  // senders among children, per node queried
};

// Acceptance for one coin assignment.  The product lane averages the uniform
// child choice inside each independent per-node factor; the global lane
// enumerates choice profiles explicitly.
double coin_acceptance(const TreePrep& prep, std::uint32_t bits,
                       const std::map<int, Matrix>& fused_terminal, const Matrix& sym_pair,
                       const std::vector<Index>& dims) {
  const CertTree& tree = prep.tree;
  const auto coin = [&](int v) {
    const auto it = std::lower_bound(prep.coin_nodes.begin(), prep.coin_nodes.end(), v);
    return (bits >> (it - prep.coin_nodes.begin())) & 1U;
  };

  std::vector<int> testers;
  std::vector<std::vector<int>> received;
  for (int v : prep.cert_nodes) {
    if (coin(v) != 1) continue;
    std::vector<int> recv;
    for (int c : tree.children.at(v))
      if (coin(c) == 0) recv.push_back(c);
    if (recv.empty()) continue;
    testers.push_back(v);
    received.push_back(std::move(recv));
  }
  const int root_child = tree.children.at(tree.root).front();
  const bool root_tests = coin(root_child) == 0;

  if (prep.product) {
    double acc = 1.0;
    for (std::size_t i = 0; i < testers.size(); ++i) {
      double avg = 0.0;
      for (int c : received[i]) avg += prep.pair_accept.at({testers[i], c});
      acc *= avg / static_cast<double>(received[i].size());
    }
    if (root_tests) acc *= prep.root_accept;
    return acc;
  }

  // Global lane: enumerate the uniform child choices with an odometer.
  double weight_all = 1.0;
  for (const auto& recv : received) weight_all /= static_cast<double>(recv.size());
  std::vector<std::size_t> pick(testers.size(), 0);
  double acc = 0.0;
  while (true) {
    std::vector<Unit> units;
    for (std::size_t i = 0; i < testers.size(); ++i) {
      const int v = testers[i];
      const int c = received[i][pick[i]];
      if (prep.terminal_states.count(c))
        units.push_back({{prep.slot_of.at(v)}, &fused_terminal.at(c)});
      else
        units.push_back({{prep.slot_of.at(v), prep.slot_of.at(c)}, &sym_pair});
    }
    if (root_tests) units.push_back({{prep.slot_of.at(root_child)}, &prep.povm.accept});
    acc += weight_all * expect_units(prep.joint->matrix(), units, dims);

    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == received[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return acc;
}

TreeReport finalize_report(const TreePrep& prep, const Network& net, double accept,
                           int repetitions, const OneWayProtocol& protocol) {
  if (repetitions < 1)
    throw std::invalid_argument("run_tree_protocol: repetition count must be positive");
  TreeReport report;
  report.labels_accepted = verify_labels(net, label_tree(net, prep.tree)).all_accept;
  if (!report.labels_accepted) accept = 0.0;  // classical short-circuit
  report.accept_probability = accept;
  report.single_round_rejection = 1.0 - accept;
  report.repetition_count = repetitions;
  report.repeated_acceptance = std::pow(accept, repetitions);

  const int q = protocol.message_qubits();
  report.register_qubits = q;
  report.index_bits = ceil_log2(repetitions);
  report.label_bits = label_bit_budget(net);
  report.certificate_qubits = static_cast<long>(repetitions) * q;
  report.message_qubits = static_cast<long>(repetitions) * q;
  report.message_classical_bits =
      static_cast<long>(repetitions) * report.index_bits + report.label_bits;
  return report;
}

// Occurrence and conditional rejection per testing node, from the pairwise
// marginals; cheap scalar enumeration, always serial.
void fill_node_stats(const TreePrep& prep, TreeReport& report) {
  const CertTree& tree = prep.tree;
  const std::size_t K = prep.coin_nodes.size();
  std::map<int, double> occur, reject;
  const double w = 1.0 / static_cast<double>(std::uint64_t{1} << K);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << K); ++bits) {
    const auto coin = [&](int v) {
      const auto it = std::lower_bound(prep.coin_nodes.begin(), prep.coin_nodes.end(), v);
      return (bits >> (it - prep.coin_nodes.begin())) & 1ULL;
    };
    for (int v : prep.cert_nodes) {
      if (coin(v) != 1) continue;
      std::vector<int> recv;
      for (int c : tree.children.at(v))
        if (coin(c) == 0) recv.push_back(c);
      if (recv.empty()) continue;
      occur[v] += w;
      double rej = 0.0;
      for (int c : recv) rej += 1.0 - prep.pair_accept.at({v, c});
      reject[v] += w * rej / static_cast<double>(recv.size());
    }
    const int root_child = tree.children.at(tree.root).front();
    if (coin(root_child) == 0) {
      occur[tree.root] += w;
      reject[tree.root] += w * (1.0 - prep.root_accept);
    }
  }
  for (const auto& [v, p] : occur) {
    report.node_occurrence[v] = p;
    report.node_conditional_rejection[v] = reject.at(v) / p;
  }
}

}  // namespace

TreeReport run_tree_protocol(const Network& net, const OneWayProtocol& protocol,
                             const TreeStrategy& strategy, int repetitions, exec::Mode mode,
                             Index dim_cap) {
  TreePrep prep = prepare_tree(net, protocol, strategy, dim_cap);
  const std::size_t K = prep.coin_nodes.size();
  if (K > kMaxExactTreeCoins)
    throw std::invalid_argument("run_tree_protocol: more than " +
                                std::to_string(kMaxExactTreeCoins) +
                                " coins; use sampled_tree_protocol");

  // The global lane needs the fused operators of terminal registers and the
  // symmetric projector.
  std::map<int, Matrix> fused_terminal;
  Matrix sym_pair;
  std::vector<Index> dims(prep.cert_nodes.size(), prep.m);
  if (!prep.product) {
    for (const auto& [id, h] : prep.terminal_states)
      fused_terminal.emplace(id, (Matrix::Identity(prep.m, prep.m) +
                                  h.amplitudes() * h.amplitudes().adjoint()) /
                                     2.0);
    bool has_cert_pair = false;
    for (const auto& [pair, acc] : prep.pair_accept)
      if (!prep.terminal_states.count(pair.second)) has_cert_pair = true;
    if (has_cert_pair) sym_pair = symmetric_projector(prep.m, dim_cap);
  }

  const std::size_t coin_count = std::size_t{1} << K;
  const double total = exec::indexed_sum(coin_count, mode, [&](std::size_t bits) {
    return coin_acceptance(prep, static_cast<std::uint32_t>(bits), fused_terminal, sym_pair,
                           dims);
  });

  TreeReport report = finalize_report(prep, net, total / static_cast<double>(coin_count),
                                      repetitions, protocol);
  fill_node_stats(prep, report);
  return report;
}

TreeReport sampled_tree_protocol(const Network& net, const OneWayProtocol& protocol,
                                 const TreeStrategy& strategy, long trials, std::uint64_t seed,
                                 exec::Mode mode, Index dim_cap) {
  if (trials < 1) throw std::invalid_argument("sampled_tree_protocol: trials must be positive");
  if (std::holds_alternative<TreeGlobal>(strategy))
    throw std::invalid_argument(
        "sampled_tree_protocol: joint certificates are analyzed exactly; use run_tree_protocol");
  TreePrep prep = prepare_tree(net, protocol, strategy, dim_cap);
  const CertTree& tree = prep.tree;
  if (prep.coin_nodes.size() > 63)
    throw std::invalid_argument("sampled_tree_protocol: too many nodes");

  const auto outcomes = exec::indexed_map<char>(
      static_cast<std::size_t>(trials), mode, [&](std::size_t t) -> char {
        rnd::Rng rng = rnd::Rng::stream(seed, t);
        const std::uint64_t bits = rng.bits();
        const auto coin = [&](int v) {
          const auto it = std::lower_bound(prep.coin_nodes.begin(), prep.coin_nodes.end(), v);
          return (bits >> (it - prep.coin_nodes.begin())) & 1ULL;
        };
        for (int v : prep.cert_nodes) {
          if (coin(v) != 1) continue;
          std::vector<int> recv;
          for (int c : tree.children.at(v))
            if (coin(c) == 0) recv.push_back(c);
          if (recv.empty()) continue;
          const int c = recv[rng.below(recv.size())];
          if (rng.uniform() >= prep.pair_accept.at({v, c})) return 0;
        }
        const int root_child = tree.children.at(tree.root).front();
        if (coin(root_child) == 0 && rng.uniform() >= prep.root_accept) return 0;
        return 1;
      });

  long accepted = 0;
  for (char c : outcomes) accepted += c;
  TreeReport report = finalize_report(prep, net, wilson_center(accepted, trials), 1, protocol);
  report.single_round_rejection = 1.0 - report.accept_probability;
  report.sampled = true;
  report.trials = trials;
  report.seed = seed;
  report.confidence_radius = wilson_radius(accepted, trials);
  return report;
}

int tree_repetitions_for_soundness(double single_round_rejection) {
  if (single_round_rejection <= 0.0 || single_round_rejection > 1.0)
    throw std::invalid_argument(
        "tree_repetitions_for_soundness: rejection must be in (0, 1]");
  return static_cast<int>(std::ceil(2.0 / single_round_rejection));
}

}  // namespace dqma
