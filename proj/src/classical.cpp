#include "dqma/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dqma/random.hpp"

namespace dqma {

namespace {

constexpr std::size_t kMaxRandomnessOutcomes = std::size_t{1} << 20;

int parity_of(const std::string& x) {
  int p = 0;
  for (char c : x) p ^= (c == '1');
  return p;
}

void require_certs(const ClassicalDMA& protocol, const std::vector<std::string>& certs) {
  if (static_cast<int>(certs.size()) != protocol.path_length + 1)
    throw std::invalid_argument("run_classical: expected one certificate per node");
  for (const auto& w : certs)
    if (static_cast<int>(w.size()) != protocol.certificate_bits)
      throw std::invalid_argument("run_classical: certificate width mismatch");
}

}  // namespace

void ClassicalDMA::validate() const {
  if (path_length < 1) throw std::invalid_argument("ClassicalDMA: path_length must be >= 1");
  if (rounds < 0) throw std::invalid_argument("ClassicalDMA: rounds must be >= 0");
  if (certificate_bits < 0) throw std::invalid_argument("ClassicalDMA: negative certificate width");
  if (input_bits < 1) throw std::invalid_argument("ClassicalDMA: input_bits must be >= 1");
  if (randomness.empty() || randomness.size() > kMaxRandomnessOutcomes)
    throw std::invalid_argument("ClassicalDMA: randomness table empty or too large");
  double total = 0.0;
  for (double p : randomness) {
    if (p < 0.0) throw std::invalid_argument("ClassicalDMA: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("ClassicalDMA: randomness does not sum to 1");
  if (!honest_certificates || !output || (rounds > 0 && !message))
    throw std::invalid_argument("ClassicalDMA: missing behavior functions");
}

ClassicalRunResult run_classical(const ClassicalDMA& protocol, const std::string& x,
                                 const std::string& y,
                                 const std::vector<std::string>& certificates,
                                 std::size_t outcome) {
  protocol.validate();
  require_bitstring(x, protocol.input_bits, "run_classical");
  require_bitstring(y, protocol.input_bits, "run_classical");
  require_certs(protocol, certificates);
  if (outcome >= protocol.randomness.size())
    throw std::invalid_argument("run_classical: randomness outcome out of range");

  const int r = protocol.path_length;
  std::vector<ClassicalView> views(r + 1);
  for (int i = 0; i <= r; ++i) {
    views[i].node = i;
    views[i].path_length = r;
    views[i].certificate = certificates[i];
    if (i == 0) views[i].input = x;
    if (i == r) views[i].input = y;
    views[i].random_outcome = outcome;
  }

  for (int round = 0; round < protocol.rounds; ++round) {
    std::vector<std::array<std::string, 2>> outgoing(r + 1);  // [to left, to right]
    for (int i = 0; i <= r; ++i) {
      if (i > 0) outgoing[i][0] = protocol.message(views[i], round, false);
      if (i < r) outgoing[i][1] = protocol.message(views[i], round, true);
    }
    for (int i = 0; i <= r; ++i) {
      std::array<std::string, 2> inbox;  // [from left, from right]
      if (i > 0) inbox[0] = outgoing[i - 1][1];
      if (i < r) inbox[1] = outgoing[i + 1][0];
      views[i].received.push_back(std::move(inbox));
    }
  }

  ClassicalRunResult result;
  result.all_accept = true;
  for (int i = 0; i <= r; ++i) {
    result.outputs.push_back(protocol.output(views[i]));
    result.all_accept = result.all_accept && result.outputs.back();
  }
  return result;
}

namespace {

double expected_over_randomness(const ClassicalDMA& protocol, exec::Mode mode,
                                const std::function<double(std::size_t)>& value) {
  return exec::indexed_sum(protocol.randomness.size(), mode, [&](std::size_t k) {
    const double p = protocol.randomness[k];
    return p == 0.0 ? 0.0 : p * value(k);
  });
}

}  // namespace

double classical_acceptance(const ClassicalDMA& protocol, const std::string& x,
                            const std::string& y,
                            const std::vector<std::string>& certificates, exec::Mode mode) {
  return expected_over_randomness(protocol, mode, [&](std::size_t k) {
    return run_classical(protocol, x, y, certificates, k).all_accept ? 1.0 : 0.0;
  });
}

double classical_event(const ClassicalDMA& protocol, const std::string& x, const std::string& y,
                       const std::vector<std::string>& certificates, int lo, int hi,
                       exec::Mode mode) {
  if (lo < 0 || hi > protocol.path_length || lo > hi)
    throw std::invalid_argument("classical_event: bad node range");
  return expected_over_randomness(protocol, mode, [&](std::size_t k) {
    const auto run = run_classical(protocol, x, y, certificates, k);
    for (int i = lo; i <= hi; ++i)
      if (!run.outputs[i]) return 0.0;
    return 1.0;
  });
}

double sampled_classical_acceptance(const ClassicalDMA& protocol, const std::string& x,
                                    const std::string& y,
                                    const std::vector<std::string>& certificates, long trials,
                                    std::uint64_t seed, exec::Mode mode) {
  if (trials < 1)
    throw std::invalid_argument("sampled_classical_acceptance: trials must be positive");
  protocol.validate();
  // Inverse-CDF sampling of the shared outcome, one stream per trial.
  std::vector<double> cdf(protocol.randomness.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += protocol.randomness[i]);
  const auto outcomes = exec::indexed_map<char>(
      static_cast<std::size_t>(trials), mode, [&](std::size_t t) -> char {
        rnd::Rng rng = rnd::Rng::stream(seed, t);
        const double u = rng.uniform();
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        return run_classical(protocol, x, y, certificates,
                             std::min(k, cdf.size() - 1))
                       .all_accept
                   ? 1
                   : 0;
      });
  long accepted = 0;
  for (char c : outcomes) accepted += c;
  return static_cast<double>(accepted) / static_cast<double>(trials);
}

FoolingSet eq_fooling_set(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("eq_fooling_set: n out of range [1, 20]");
  FoolingSet set;
  for (long v = 0; v < (1L << n); ++v) {
    std::string x(n, '0');
    for (int b = 0; b < n; ++b)
      if ((v >> (n - 1 - b)) & 1L) x[b] = '1';
    set.pairs.emplace_back(x, x);
  }
  set.f = [](const std::string& a, const std::string& b) { return a == b; };
  return set;
}

bool fooling_property_holds(const FoolingSet& set) {
  if (!set.f) throw std::invalid_argument("fooling_property_holds: missing predicate");
  for (const auto& [x, y] : set.pairs)
    if (!set.f(x, y)) return false;
  for (std::size_t i = 0; i < set.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < set.pairs.size(); ++j) {
      const auto& [x1, y1] = set.pairs[i];
      const auto& [x2, y2] = set.pairs[j];
      if (set.f(x1, y2) && set.f(x2, y1)) return false;
    }
  return true;
}

AttackResult fooling_attack(const ClassicalDMA& protocol, const FoolingSet& set,
                            exec::Mode mode) {
  protocol.validate();
  if (!set.f) throw std::invalid_argument("fooling_attack: missing predicate");
  const int r = protocol.path_length;
  const int mu = protocol.rounds;
  if (r < 2 * mu + 1)
    throw std::invalid_argument("fooling_attack: needs path_length >= 2*rounds + 1");

  // Pigeonhole applicability: |S| must exceed the number of certificate
  // patterns on v_1..v_{2mu}.
  const long pattern_bits = 2L * mu * protocol.certificate_bits;
  if (pattern_bits >= 62 ||
      static_cast<long>(set.pairs.size()) < (1L << pattern_bits) + 1)
    throw std::invalid_argument(
        "fooling_attack: certificates too large for the fooling set; the pigeonhole needs "
        "|S| >= 2^(2*rounds*certificate_bits) + 1");

  // First collision of honest certificates restricted to v_1..v_{2mu}.
  std::map<std::string, std::size_t> seen;
  std::size_t first = 0, second = 0;
  std::vector<std::string> w_first, w_second;
  bool found = false;
  for (std::size_t idx = 0; idx < set.pairs.size() && !found; ++idx) {
    const auto& [x, y] = set.pairs[idx];
    auto certs = protocol.honest_certificates(x, y);
    require_certs(protocol, certs);
    std::string key;
    for (int i = 1; i <= 2 * mu; ++i) key += certs[i] + "|";
    if (auto it = seen.find(key); it != seen.end()) {
      first = it->second;
      second = idx;
      w_first = protocol.honest_certificates(set.pairs[first].first, set.pairs[first].second);
      w_second = std::move(certs);
      found = true;
    } else {
      seen.emplace(std::move(key), idx);
    }
  }
  if (!found)
    throw std::logic_error("fooling_attack: no collision despite applicable pigeonhole");

  AttackResult result;
  result.pair_a = set.pairs[first];
  result.pair_b = set.pairs[second];

  // Crossed 0-input.  With (x,y,w) feeding the left half and (x',y',w') the
  // right half, the spliced w'' keeps w on v_0..v_{2mu} and w' beyond.
  const auto& [x, y] = result.pair_a;
  const auto& [xp, yp] = result.pair_b;
  std::vector<std::string> left_certs, right_certs;
  if (!set.f(x, yp)) {
    result.crossed = {x, yp};
    left_certs = w_first;
    right_certs = w_second;
  } else if (!set.f(xp, y)) {
    result.crossed = {xp, y};
    left_certs = w_second;
    right_certs = w_first;
  } else {
    throw std::invalid_argument("fooling_attack: colliding pairs have no crossed 0-input; "
                                "the set is not 1-fooling");
  }
  result.spliced_certificates = left_certs;
  for (int i = 2 * mu + 1; i <= r; ++i) result.spliced_certificates[i] = right_certs[i];

  result.acceptance = classical_acceptance(protocol, result.crossed.first,
                                           result.crossed.second, result.spliced_certificates,
                                           mode);
  // Union-bound witness from the two honest half-path events.
  const auto& [lx, ly] = result.crossed == std::pair{x, yp} ? result.pair_a : result.pair_b;
  const auto& [rx, ry] = result.crossed == std::pair{x, yp} ? result.pair_b : result.pair_a;
  const double left = classical_event(protocol, lx, ly, left_certs, 0, mu, mode);
  const double right = classical_event(protocol, rx, ry, right_certs, mu + 1, r, mode);
  result.witness_lower_bound = left + right - 1.0;
  return result;
}

ClassicalDMA eq1_optimal_protocol(double p, int path_length) {
  if (!(p > 0.0 && p <= 0.5))
    throw std::invalid_argument("eq1_optimal_protocol: p must be in (0, 1/2]");
  ClassicalDMA protocol;
  protocol.name = "eq1-optimal";
  protocol.path_length = path_length;
  protocol.rounds = 0;
  protocol.certificate_bits = 0;
  protocol.input_bits = 1;
  // Outcomes: 0 -> X=-1, 1 -> X=0, 2 -> X=1.
  protocol.randomness = {1.0 - 2.0 * p, p, p};
  protocol.honest_certificates = [path_length](const std::string&, const std::string&) {
    return std::vector<std::string>(path_length + 1, "");
  };
  protocol.output = [](const ClassicalView& view) {
    if (view.random_outcome == 0) return true;  // X = -1
    if (!view.input) return true;
    const int x_bit = view.input->front() == '1';
    return static_cast<int>(view.random_outcome) - 1 == x_bit;  // X = own input
  };
  protocol.validate();
  return protocol;
}

ClassicalDMA parity_hash_protocol(int n, int path_length, double p) {
  if (n < 1) throw std::invalid_argument("parity_hash_protocol: n must be >= 1");
  if (path_length < 1) throw std::invalid_argument("parity_hash_protocol: path too short");
  if (!(p > 0.0 && p <= 0.5))
    throw std::invalid_argument("parity_hash_protocol: p must be in (0, 1/2]");
  ClassicalDMA protocol;
  protocol.name = "parity-hash";
  protocol.path_length = path_length;
  protocol.rounds = 1;
  protocol.certificate_bits = 1;
  protocol.input_bits = n;
  // Outcomes: 0 -> X=-1 (gate open), 1 -> X=0, 2 -> X=1.
  protocol.randomness = {1.0 - 2.0 * p, p, p};
  protocol.honest_certificates = [path_length](const std::string& x, const std::string&) {
    return std::vector<std::string>(path_length + 1,
                                    parity_of(x) ? std::string("1") : std::string("0"));
  };
  protocol.message = [](const ClassicalView& view, int, bool) { return view.certificate; };
  protocol.output = [](const ClassicalView& view) {
    // Neighbor certificates must agree with mine.
    for (int side = 0; side < 2; ++side) {
      const std::string& msg = view.received[0][side];
      if (!msg.empty() && msg != view.certificate) return false;
    }
    // Terminals tie the chain to their own input's parity.
    if (view.input) {
      const int claimed = view.certificate == "1";
      if (claimed != parity_of(*view.input)) return false;
    }
    // v_0 passes a random gate that opens with probability exactly 1-p.
    if (view.node == 0) {
      if (view.random_outcome != 0) {
        const int claimed = view.certificate == "1";
        if (static_cast<int>(view.random_outcome) - 1 != claimed) return false;
      }
    }
    return true;
  };
  protocol.validate();
  return protocol;
}

ClassicalDMA always_accept_protocol(int n, int path_length, int certificate_bits) {
  ClassicalDMA protocol;
  protocol.name = "always-accept";
  protocol.path_length = path_length;
  protocol.rounds = 0;
  protocol.certificate_bits = certificate_bits;
  protocol.input_bits = n;
  protocol.randomness = {1.0};
  protocol.honest_certificates = [path_length, certificate_bits](const std::string&,
                                                                 const std::string&) {
    return std::vector<std::string>(path_length + 1, std::string(certificate_bits, '0'));
  };
  protocol.output = [](const ClassicalView&) { return true; };
  protocol.validate();
  return protocol;
}

}  // namespace dqma
