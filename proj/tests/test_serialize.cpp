#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "dqma/serialize.hpp"

using namespace dqma;

TEST_CASE("rounding to 12 significant digits is idempotent and stable") {
  CHECK(round12(1.0) == 1.0);
  CHECK(round12(0.0) == 0.0);
  CHECK(round12(29.0 / 32.0) == 29.0 / 32.0);  // exactly representable in 12 digits
  const double noisy = 0.12345678901234567;
  CHECK(round12(noisy) == round12(round12(noisy)));
  CHECK(round12(noisy) != noisy);
  CHECK(round12(-noisy) == -round12(noisy));
  CHECK(round12(1e-300) > 0.0);
}

TEST_CASE("path reports serialize with stable field order") {
  const PathInstance inst{2, qubit_eq_protocol(), "0", "1"};
  const auto report = exact_acceptance(inst, RotationStrategy{});
  const ordered_json doc = path_report_json(report);
  CHECK(doc.at("schemaVersion") == kSchemaVersion);
  CHECK(doc.begin().key() == "schemaVersion");
  CHECK(doc.at("acceptProbability").get<double>() ==
        round12(report.accept_probability));
  CHECK(doc.at("perTestConditionals").size() == 2);
  CHECK(doc.at("soundnessSumMet") == report.soundness_sum_met);
  CHECK((!doc.contains("sampled") || doc.at("sampled") == false));
  // Dumping twice gives byte-identical output with a trailing newline.
  const std::string a = dump_json(doc);
  const std::string b = dump_json(path_report_json(report));
  CHECK(a == b);
  CHECK(!a.empty());
  CHECK(a.back() == '\n');
}

TEST_CASE("sampled reports carry their sampling metadata") {
  const PathInstance inst{2, qubit_eq_protocol(), "0", "1"};
  const auto report = sampled_acceptance(inst, RotationStrategy{}, 1000, 42);
  const ordered_json doc = path_report_json(report);
  CHECK(doc.at("sampled") == true);
  CHECK(doc.at("trials") == 1000);
  CHECK(doc.at("seed") == 42);
  CHECK(doc.at("confidenceRadius").get<double>() > 0.0);
}

TEST_CASE("tree documents serialize completely") {
  Network net;
  net.nodes = {0, 1, 2, 3};
  net.edges = {{0, 1}, {0, 2}, {0, 3}};
  net.terminals = {1, 2, 3};
  net.inputs = {"0", "0", "1"};
  const CertTree tree = build_cert_tree(net);
  const ordered_json tj = cert_tree_json(tree);
  CHECK(tj.at("root") == 1);
  CHECK(tj.at("radius") == 2);
  CHECK(tj.at("maxDepth") == 3);
  CHECK(tj.at("nodes").is_array());
  CHECK(tj.at("nodes").size() == tree.node_ids().size());

  const auto labels = label_tree(net, tree);
  const auto verdict = verify_labels(net, labels);
  const ordered_json lj = labels_json(labels, verdict);
  CHECK(lj.at("allAccept") == true);
  CHECK(lj.at("labels").size() == net.nodes.size());

  const TreeReport report = run_tree_protocol(net, qubit_eq_protocol(), TreeHonest{});
  const ordered_json rj = tree_report_json(report);
  CHECK(rj.at("schemaVersion") == kSchemaVersion);
  CHECK(rj.at("acceptProbability").get<double>() == round12(29.0 / 32.0));
  CHECK(rj.at("singleRoundRejection").get<double>() == round12(3.0 / 32.0));
  CHECK(rj.at("labelsAccepted") == true);
}

TEST_CASE("attack results serialize with the splice") {
  const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
  const AttackResult attack = fooling_attack(pi, eq_fooling_set(5));
  const ordered_json doc = attack_json(attack);
  CHECK(doc.at("pairA").at(0) == "00001");
  CHECK(doc.at("pairB").at(0) == "00010");
  CHECK(doc.at("splicedCertificates").size() == 4);
  CHECK(doc.at("acceptance").get<double>() == round12(0.75));
  CHECK(doc.at("witnessLowerBound").get<double>() >= 0.5);
}

TEST_CASE("networks round-trip through JSON") {
  Network net;
  net.nodes = {0, 1, 2, 3, 4};
  net.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
  net.terminals = {0, 2};
  net.inputs = {"01", "01"};
  const ordered_json doc = network_json(net);
  const Network back = network_from_json(doc);
  CHECK(back.nodes == net.nodes);
  CHECK(back.edges == net.edges);
  CHECK(back.terminals == net.terminals);
  CHECK(back.inputs == net.inputs);
}

TEST_CASE("malformed network documents name the offending field") {
  ordered_json doc;
  doc["nodes"] = {0, 1};
  doc["edges"] = {{0, 1}};
  doc["terminals"] = {0, 1};
  // no inputs
  bool threw = false;
  try {
    network_from_json(doc);
  } catch (const std::invalid_argument& e) {
    threw = true;
    CHECK(std::string(e.what()).find("inputs") != std::string::npos);
  }
  CHECK(threw);
  doc["inputs"] = {"0", "0"};
  CHECK_NOTHROW(network_from_json(doc));
  doc["edges"] = {{0, 1, 2}};  // not a pair
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);
  doc["edges"] = "zigzag";
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);
  // Validation failures surface too (unknown terminal id).
  doc["edges"] = {{0, 1}};
  doc["terminals"] = {0, 7};
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);
}
