#include "whitesync/env.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace whitesync {

namespace {

void check_probability(double value, const char* name) {
  if (!(value > 0.0) || value > 1.0) {
    std::ostringstream msg;
    msg << "Densities: " << name << " must lie in (0, 1], got " << value;
    throw std::invalid_argument(msg.str());
  }
}

// Fills n Bernoulli(p) bits from eng. One 64-bit draw per bit, compared
// against p scaled to the full 64-bit range. p == 1 always sets the bit;
// the draw is still consumed to keep the stream layout uniform.
void sample_bits(BitVector& v, double p, std::size_t n, std::mt19937_64& eng) {
  std::uint64_t threshold = 0;
  bool always = false;
  if (p >= 1.0) {
    always = true;
  } else {
    const double scaled = std::ldexp(p, 64);
    if (scaled >= 18446744073709551616.0) {
      always = true;
    } else {
      threshold = static_cast<std::uint64_t>(scaled);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t u = eng();
    if (always || u < threshold) v.set(i);
  }
}

}  // namespace

Densities::Densities(double p1_in, double p2_in, double q_in)
    : p1(p1_in), p2(p2_in), q(q_in) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  check_probability(q, "q");
}

const char* party_name(Party side) {
  return side == Party::Alice ? "alice" : "bob";
}

Environment::Environment(BitVector a_in, BitVector b_in, BitVector e_in)
    : a(std::move(a_in)), b(std::move(b_in)), e(std::move(e_in)) {
  if (a.size() != b.size() || a.size() != e.size()) {
    throw std::invalid_argument("Environment: indicator vectors differ in length");
  }
  if (a.size() == 0) {
    throw std::invalid_argument("Environment: need at least one channel");
  }
}

Environment sample_environment(const Densities& d, std::size_t n,
                               std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("sample_environment: channel count must be >= 1");
  }
  std::mt19937_64 eng(seed);
  BitVector a(n), b(n), e(n);
  sample_bits(a, d.p1, n, eng);
  sample_bits(b, d.p2, n, eng);
  sample_bits(e, d.q, n, eng);
  return Environment(std::move(a), std::move(b), std::move(e));
}

OpenIndex open_index(const Environment& env, Party side) {
  const BitVector& v = side == Party::Alice ? env.a : env.b;
  OpenIndex out{side, {}};
  out.indices.reserve(v.count());
  for (std::size_t w = 0; w < v.word_count(); ++w) {
    std::uint64_t bits = v.word(w);
    while (bits != 0) {
      const int lane = std::countr_zero(bits);
      out.indices.push_back(static_cast<std::uint32_t>(w * 64 + lane));
      bits &= bits - 1;
    }
  }
  return out;
}

std::optional<std::uint32_t> first_triple_open(const Environment& env) {
  for (std::size_t w = 0; w < env.a.word_count(); ++w) {
    const std::uint64_t open = env.a.word(w) & env.b.word(w) & env.e.word(w);
    if (open != 0) {
      return static_cast<std::uint32_t>(w * 64 + std::countr_zero(open));
    }
  }
  return std::nullopt;
}

std::optional<PrecedingOpenCounts> open_counts_before(const Environment& env) {
  const auto first = first_triple_open(env);
  if (!first) return std::nullopt;
  return PrecedingOpenCounts{env.a.count_prefix(*first),
                             env.b.count_prefix(*first)};
}

std::string to_text(const Environment& env) {
  std::string out;
  out.reserve(3 * (env.channel_count() + 1));
  out += env.a.to_string();
  out += '\n';
  out += env.b.to_string();
  out += '\n';
  out += env.e.to_string();
  out += '\n';
  return out;
}

Environment environment_from_text(std::istream& in) {
  std::vector<BitVector> rows;
  std::string line;
  while (rows.size() < 3 && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(BitVector::from_string(line));
  }
  if (rows.size() != 3) {
    throw std::invalid_argument(
        "environment_from_text: expected three indicator lines (a, b, e)");
  }
  return Environment(std::move(rows[0]), std::move(rows[1]), std::move(rows[2]));
}

Environment environment_from_text(const std::string& text) {
  std::istringstream in(text);
  return environment_from_text(in);
}

}  // namespace whitesync
