#pragma once

// Certification of equality between t terminals in a connected network.
//
// The analysis pipeline mirrors the construction used for paths:
//   1. terminal_radius_and_center picks the most central terminal u_1 and the
//      terminal radius r = min_i max_j dist(u_i, u_j).
//   2. build_cert_tree grows a BFS tree from u_1 (smallest-id parents),
//      prunes every terminal-free subtree, and "primes" each internal
//      terminal u_i: a fresh node u'_i takes u_i's place and u_i reattaches
//      as a pendant leaf.  The root is always primed, which makes u_1 a
//      degree-1 root; the tree then has depth ≤ r+1, degree ≤ t, and every
//      terminal on a leaf (with its input).  Primed nodes are simulated by
//      their host in the real network; the emulation map records that.
//   3. label_tree / verify_labels implement the classical one-round
//      certification of the tree structure: tree nodes carry
//      (rootId, parentId, depth), all other nodes carry their distance to
//      the tree, and every check is local to a node and its neighbors.
//   4. run_tree_protocol analyzes the quantum protocol: each terminal
//      prepares its message state, the prover fills every non-terminal node
//      with a certificate, every non-root node flips a fair coin b_v and
//      forwards its register to its parent when b_v = 0; a non-terminal
//      node that kept its register and received at least one register
//      SWAP-tests its own against one received register chosen uniformly;
//      the root applies the protocol measurement for its own input to a
//      received register.  A run accepts when every performed test accepts.
//
// Exact analysis enumerates coin assignments and child choices; sampling
// covers strategies whose certificates are in product form.  Entangled
// (joint) certificates are analyzed exactly, subject to the dimension cap.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dqma/comm.hpp"
#include "dqma/exec.hpp"

namespace dqma {

struct Network {
  std::vector<int> nodes;                      // unique ids ≥ 0
  std::vector<std::pair<int, int>> edges;      // undirected, simple
  std::vector<int> terminals;                  // t ≥ 2 distinct node ids
  std::vector<std::string> inputs;             // bitstring per terminal

  void validate() const;                       // throws std::invalid_argument
  std::map<int, std::vector<int>> adjacency() const;  // sorted neighbor lists
  int terminal_index(int id) const;            // -1 if not a terminal
  int input_bits() const;                      // common input length
};

// Breadth-first distances from `source` (every node reachable or throws).
std::map<int, int> bfs_distances(const Network& net, int source);

struct RadiusCenter {
  int radius = 0;
  int center = 0;  // terminal id; ties broken by smallest id
};
RadiusCenter terminal_radius_and_center(const Network& net);

// Rooted certification tree over original and primed nodes.  Primed nodes
// use negative ids (primed_id) so they never collide with network ids.
struct CertTree {
  int root = 0;    // the center terminal
  int radius = 0;  // terminal radius r of the underlying network
  std::map<int, int> parent;               // every tree node; root maps to itself
  std::map<int, std::vector<int>> children;  // sorted ascending
  std::map<int, int> depth;                // root at depth 0
  std::map<int, int> emulation;            // primed id -> hosting network node

  // Host tree (the pruned BFS tree inside the network, before priming),
  // used by the classical labeling.
  std::vector<int> host_nodes;             // sorted
  std::map<int, int> host_parent;          // root maps to itself
  std::map<int, int> host_depth;

  static int primed_id(int host) { return -host - 1; }
  static int host_of(int id) { return id < 0 ? -id - 1 : id; }
  bool is_primed(int id) const { return id < 0; }

  std::vector<int> node_ids() const;       // sorted
  int max_degree() const;                  // undirected tree degree
  int max_depth() const;
  // Structural invariants: non-root terminals are leaves, the root is the
  // center terminal with exactly one child, degree ≤ t, depth ≤ r+1.
  void validate(const Network& net) const;
};
CertTree build_cert_tree(const Network& net);

// Classical structure labels.  Tree nodes claim (rootId, parentId, depth);
// all other nodes claim their distance to the tree.
struct TreeLabel {
  bool on_tree = false;
  int root_id = -1;
  int parent_id = -1;
  int depth = -1;
  int distance_to_tree = -1;
};
using LabelAssignment = std::map<int, TreeLabel>;

LabelAssignment label_tree(const Network& net, const CertTree& tree);

// One-round deterministic verification: every node sees its own label and
// its neighbors' labels.  A tree node accepts iff its parent is a neighbor
// whose label shares the rootId with depth one less (depth 0: own id equals
// the rootId); a non-tree node accepts iff its distance field is 1 + the
// minimum over neighbors (tree nodes counting as 0); terminals additionally
// reject any label placing them off the tree.
struct LabelVerdict {
  std::map<int, bool> per_node;
  bool all_accept = false;
};
LabelVerdict verify_labels(const Network& net, const LabelAssignment& labels);

// Bits needed per label: a tree/non-tree flag plus three id-sized fields.
int label_bit_budget(const Network& net);

// Prover strategies.  Honest: every non-terminal certificate is the root
// terminal's message state.  Rotation: along the path from `target_terminal`
// to the root, certificate j (distance j from the target) interpolates at
// angle j·π/(2L) toward the root's message state, L being the target's
// depth; all off-path certificates are honest.  Product: explicit per-node
// certificates.  Global: a joint state over all non-terminal nodes in
// ascending id order.
struct TreeHonest {};
struct TreeRotation {
  int target_terminal = -1;
};
struct TreeProduct {
  std::map<int, DensityMatrix> certificates;  // one per non-terminal tree node
};
struct TreeGlobal {
  DensityMatrix joint;
};
using TreeStrategy = std::variant<TreeHonest, TreeRotation, TreeProduct, TreeGlobal>;

// Tests triggered by one coin assignment and one child-choice profile;
// exposed so properties (one test per node, pairwise disjoint registers)
// can be checked directly.
struct TreeTest {
  int node = 0;         // the testing node (or the root for the measurement)
  int child = 0;        // owner of the tested received register
  bool is_root_measure = false;
};
std::vector<TreeTest> tree_active_tests(const CertTree& tree, const std::map<int, int>& coins,
                                        const std::map<int, int>& chosen_child);

struct TreeReport {
  double accept_probability = 0.0;
  double single_round_rejection = 0.0;
  // Per testing node: Pr[test occurs] and Pr[test rejects | occurs], the
  // latter averaged over the uniform child choice.
  std::map<int, double> node_occurrence;
  std::map<int, double> node_conditional_rejection;
  int repetition_count = 1;
  double repeated_acceptance = 0.0;  // accept_probability^repetition_count
  bool labels_accepted = true;       // honest structure labels ride along
  // Size accounting per node / per message for the repeated protocol.
  int register_qubits = 0;
  long certificate_qubits = 0;
  long message_qubits = 0;
  int index_bits = 0;
  int label_bits = 0;
  long message_classical_bits = 0;
  // Sampling metadata (zero/false for exact runs).
  bool sampled = false;
  long trials = 0;
  std::uint64_t seed = 0;
  double confidence_radius = 0.0;
};

TreeReport run_tree_protocol(const Network& net, const OneWayProtocol& protocol,
                             const TreeStrategy& strategy, int repetitions = 1,
                             exec::Mode mode = exec::Mode::parallel,
                             Index dim_cap = kDefaultDimCap);

TreeReport sampled_tree_protocol(const Network& net, const OneWayProtocol& protocol,
                                 const TreeStrategy& strategy, long trials, std::uint64_t seed,
                                 exec::Mode mode = exec::Mode::parallel,
                                 Index dim_cap = kDefaultDimCap);

// Repetitions pushing the k-fold acceptance of a cheating prover below e^-2
// (< 1/3): the smallest k with k·rejection ≥ 2.
int tree_repetitions_for_soundness(double single_round_rejection);

}  // namespace dqma
