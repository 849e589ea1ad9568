#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "whitesync/bitvec.hpp"

namespace whitesync {

/// Bernoulli openness probabilities of the three environments: Alice's
/// local one (p1), Bob's local one (p2) and the shared global one (q).
/// All three must be strictly positive; a zero density leaves nothing to
/// rendezvous on.
struct Densities {
  double p1;
  double p2;
  double q;

  Densities(double p1, double p2, double q);
};

enum class Party { Alice, Bob };

const char* party_name(Party side);

/// One sampled world: indicator vectors over n channels for Alice (a),
/// Bob (b) and the global environment (e). Immutable after construction
/// and safe to share across threads.
struct Environment {
  BitVector a;
  BitVector b;
  BitVector e;

  Environment(BitVector a, BitVector b, BitVector e);

  std::size_t channel_count() const { return a.size(); }
};

/// Ascending ids of the channels one party sees as open.
struct OpenIndex {
  Party side;
  std::vector<std::uint32_t> indices;
};

/// Samples the three environments independently: a[j] ~ Bern(p1),
/// b[j] ~ Bern(p2), e[j] ~ Bern(q), all 3n bits independent. A pure
/// function of (d, n, seed).
Environment sample_environment(const Densities& d, std::size_t n,
                               std::uint64_t seed);

OpenIndex open_index(const Environment& env, Party side);

/// Smallest channel open in all three environments, or nullopt when every
/// channel is blocked somewhere. Absence is a value, not an error.
std::optional<std::uint32_t> first_triple_open(const Environment& env);

/// Per-party counts of locally open channels strictly before the first
/// triple-open channel.
struct PrecedingOpenCounts {
  std::uint64_t alice;
  std::uint64_t bob;
};

std::optional<PrecedingOpenCounts> open_counts_before(const Environment& env);

/// Text fixture format: three lines of '0'/'1' characters, one per vector,
/// in the order a, b, e. Lines starting with '#' and blank lines are
/// skipped on input.
std::string to_text(const Environment& env);
Environment environment_from_text(std::istream& in);
Environment environment_from_text(const std::string& text);

}  // namespace whitesync
