#include "dqma/serialize.hpp"

#include <cstdio>
#include <cstdlib>

namespace dqma {

double round12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

ordered_json rounded(const std::vector<double>& values) {
  ordered_json arr = ordered_json::array();
  for (double v : values) arr.push_back(round12(v));
  return arr;
}

ordered_json rounded(const std::map<int, double>& values) {
  ordered_json obj = ordered_json::object();
  for (const auto& [k, v] : values) obj[std::to_string(k)] = round12(v);
  return obj;
}

}  // namespace

ordered_json path_report_json(const AcceptanceReport& report) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["acceptProbability"] = round12(report.accept_probability);
  doc["rejectProbability"] = round12(1.0 - report.accept_probability);
  doc["perTestConditionals"] = rounded(report.per_test_conditionals);
  doc["testOccurrenceProbabilities"] = rounded(report.test_occurrence_probabilities);
  doc["soundnessSum"] = round12(report.soundness_sum());
  doc["soundnessSumMet"] = report.soundness_sum_met;
  doc["repetitionCount"] = report.repetition_count;
  doc["repeatedAcceptance"] = round12(report.repeated_acceptance);
  doc["registerQubits"] = report.register_qubits;
  doc["certificateQubits"] = report.certificate_qubits;
  doc["messageQubits"] = report.message_qubits;
  doc["indexBits"] = report.index_bits;
  doc["messageClassicalBits"] = report.message_classical_bits;
  doc["sampled"] = report.sampled;
  if (report.sampled) {
    doc["trials"] = report.trials;
    doc["seed"] = report.seed;
    doc["confidenceRadius"] = round12(report.confidence_radius);
  }
  ordered_json relocations = ordered_json::array();
  for (const auto& rel : report.relocations)
    relocations.push_back(ordered_json{{"register", rel.reg},
                                       {"stayProbability", round12(rel.stay_probability)}});
  doc["registerRelocations"] = relocations;
  return doc;
}

ordered_json tree_report_json(const TreeReport& report) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["acceptProbability"] = round12(report.accept_probability);
  doc["singleRoundRejection"] = round12(report.single_round_rejection);
  doc["nodeOccurrence"] = rounded(report.node_occurrence);
  doc["nodeConditionalRejection"] = rounded(report.node_conditional_rejection);
  doc["repetitionCount"] = report.repetition_count;
  doc["repeatedAcceptance"] = round12(report.repeated_acceptance);
  doc["labelsAccepted"] = report.labels_accepted;
  doc["registerQubits"] = report.register_qubits;
  doc["certificateQubits"] = report.certificate_qubits;
  doc["messageQubits"] = report.message_qubits;
  doc["indexBits"] = report.index_bits;
  doc["labelBits"] = report.label_bits;
  doc["messageClassicalBits"] = report.message_classical_bits;
  doc["sampled"] = report.sampled;
  if (report.sampled) {
    doc["trials"] = report.trials;
    doc["seed"] = report.seed;
    doc["confidenceRadius"] = round12(report.confidence_radius);
  }
  return doc;
}

ordered_json cert_tree_json(const CertTree& tree) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["root"] = tree.root;
  doc["radius"] = tree.radius;
  ordered_json nodes = ordered_json::array();
  for (int id : tree.node_ids()) {
    ordered_json node;
    node["id"] = id;
    node["parent"] = tree.parent.at(id);
    node["depth"] = tree.depth.at(id);
    if (tree.is_primed(id)) node["hosts"] = tree.emulation.at(id);
    nodes.push_back(node);
  }
  doc["nodes"] = nodes;
  doc["maxDegree"] = tree.max_degree();
  doc["maxDepth"] = tree.max_depth();
  return doc;
}

ordered_json labels_json(const LabelAssignment& labels, const LabelVerdict& verdict) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  ordered_json per_node = ordered_json::array();
  for (const auto& [id, label] : labels) {
    ordered_json entry;
    entry["node"] = id;
    entry["onTree"] = label.on_tree;
    if (label.on_tree) {
      entry["rootId"] = label.root_id;
      entry["parentId"] = label.parent_id;
      entry["depth"] = label.depth;
    } else {
      entry["distanceToTree"] = label.distance_to_tree;
    }
    entry["accepts"] = verdict.per_node.at(id);
    per_node.push_back(entry);
  }
  doc["labels"] = per_node;
  doc["allAccept"] = verdict.all_accept;
  return doc;
}

ordered_json attack_json(const AttackResult& attack) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["pairA"] = {attack.pair_a.first, attack.pair_a.second};
  doc["pairB"] = {attack.pair_b.first, attack.pair_b.second};
  doc["crossedInput"] = {attack.crossed.first, attack.crossed.second};
  doc["splicedCertificates"] = attack.spliced_certificates;
  doc["acceptance"] = round12(attack.acceptance);
  doc["witnessLowerBound"] = round12(attack.witness_lower_bound);
  return doc;
}

ordered_json network_json(const Network& net) {
  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["nodes"] = net.nodes;
  ordered_json edges = ordered_json::array();
  for (const auto& [a, b] : net.edges) edges.push_back(ordered_json::array({a, b}));
  doc["edges"] = edges;
  doc["terminals"] = net.terminals;
  doc["inputs"] = net.inputs;
  return doc;
}

namespace {

const ordered_json& require_field(const ordered_json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end())
    throw std::invalid_argument(std::string("network JSON: missing field \"") + field + "\"");
  return *it;
}

}  // namespace

Network network_from_json(const ordered_json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("network JSON: expected an object");
  Network net;
  try {
    net.nodes = require_field(doc, "nodes").get<std::vector<int>>();
    for (const auto& edge : require_field(doc, "edges")) {
      if (!edge.is_array() || edge.size() != 2)
        throw std::invalid_argument("network JSON: field \"edges\" must hold [a, b] pairs");
      net.edges.emplace_back(edge[0].get<int>(), edge[1].get<int>());
    }
    net.terminals = require_field(doc, "terminals").get<std::vector<int>>();
    net.inputs = require_field(doc, "inputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network JSON: ") + e.what());
  }
  net.validate();
  return net;
}

std::string dump_json(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace dqma
