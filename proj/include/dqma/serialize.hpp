#pragma once

// JSON emission and parsing for the CLI: stable-ordered documents with an
// explicit schemaVersion, floats rounded to 12 significant digits so byte
// output is reproducible across runs and platforms.

#include <string>

#include "json.hpp"

#include "dqma/classical.hpp"
#include "dqma/path.hpp"
#include "dqma/tree.hpp"

namespace dqma {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Value of `v` after a round trip through "%.12g" text.
double round12(double v);

ordered_json path_report_json(const AcceptanceReport& report);
ordered_json tree_report_json(const TreeReport& report);
ordered_json cert_tree_json(const CertTree& tree);
ordered_json labels_json(const LabelAssignment& labels, const LabelVerdict& verdict);
ordered_json attack_json(const AttackResult& attack);
ordered_json network_json(const Network& net);

// Expects {"nodes": [...], "edges": [[a, b], ...], "terminals": [...],
// "inputs": [...]}; validates the result.  Throws std::invalid_argument
// naming the offending field.
Network network_from_json(const ordered_json& doc);

// 2-space indentation plus a trailing newline.
std::string dump_json(const ordered_json& doc);

}  // namespace dqma
