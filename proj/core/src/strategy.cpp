#include "whitesync/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace whitesync {

namespace {

double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void require_open(const OpenIndex& open, const char* op) {
  if (open.indices.empty()) {
    std::ostringstream msg;
    msg << op << ": " << party_name(open.side) << " has no open channels";
    throw NoOpenChannelsError(msg.str());
  }
}

double parse_positive(std::string_view value, const char* key) {
  std::size_t pos = 0;
  const std::string text(value);
  double parsed = 0.0;
  try {
    parsed = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || !(parsed > 0.0)) {
    throw std::invalid_argument(std::string("StrategySpec: bad value for ") +
                                key + ": '" + text + "'");
  }
  return parsed;
}

}  // namespace

ChannelDistribution ChannelDistribution::from_weights(
    std::vector<std::uint32_t> support, const std::vector<double>& raw) {
  if (support.empty() || support.size() != raw.size()) {
    throw std::invalid_argument(
        "ChannelDistribution: support and weights must be nonempty and match");
  }
  for (std::size_t i = 0; i + 1 < support.size(); ++i) {
    if (support[i] >= support[i + 1]) {
      throw std::invalid_argument(
          "ChannelDistribution: support must be strictly increasing");
    }
  }
  for (double w : raw) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(
          "ChannelDistribution: weights must be strictly positive and finite");
    }
  }

  ChannelDistribution dist;
  dist.support = std::move(support);
  dist.weights.resize(raw.size());
  const double total = kahan_sum(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    dist.weights[i] = raw[i] / total;
  }

  dist.cumulative.resize(raw.size());
  double acc = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    const double y = dist.weights[i] - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
    dist.cumulative[i] = acc;
  }
  // The prefix sums land within one ulp of 1; pin the tail so inverse-CDF
  // lookups always terminate inside the table.
  dist.cumulative.back() = 1.0;
  return dist;
}

const char* kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::GeometricAware:
      return "geometric";
    case StrategyKind::HeavyTailOblivious:
      return "heavy-tail";
    case StrategyKind::UniformNaive:
      return "uniform";
    case StrategyKind::ClockedPartition:
      return "clocked";
  }
  return "unknown";
}

bool requires_open_channels(StrategyKind kind) {
  return kind == StrategyKind::GeometricAware ||
         kind == StrategyKind::HeavyTailOblivious;
}

std::vector<std::string> StrategySpec::validate() const {
  std::vector<std::string> warnings;
  switch (kind) {
    case StrategyKind::GeometricAware:
      if (!(alpha > 0.0) || alpha >= 1.0) {
        throw std::invalid_argument(
            "StrategySpec: geometric alpha must lie in (0, 1)");
      }
      if (alpha >= 0.25) {
        std::ostringstream msg;
        msg << "geometric alpha=" << alpha
            << " is outside (0, 1/4); the O(1) sync-time guarantee no longer "
               "applies (accepted for exploration)";
        warnings.push_back(msg.str());
      }
      break;
    case StrategyKind::HeavyTailOblivious:
      if (!(epsilon > 0.0)) {
        throw std::invalid_argument(
            "StrategySpec: heavy-tail epsilon must be > 0");
      }
      break;
    case StrategyKind::UniformNaive:
      break;
    case StrategyKind::ClockedPartition:
      break;
  }
  return warnings;
}

StrategySpec StrategySpec::parse(std::string_view text) {
  StrategySpec spec;
  std::string_view kind_part = text;
  std::string_view params;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    kind_part = text.substr(0, colon);
    params = text.substr(colon + 1);
  }

  if (kind_part == "geometric") {
    spec.kind = StrategyKind::GeometricAware;
  } else if (kind_part == "heavy-tail") {
    spec.kind = StrategyKind::HeavyTailOblivious;
  } else if (kind_part == "uniform") {
    spec.kind = StrategyKind::UniformNaive;
  } else if (kind_part == "clocked") {
    spec.kind = StrategyKind::ClockedPartition;
  } else {
    throw std::invalid_argument(
        "StrategySpec: unknown kind '" + std::string(kind_part) +
        "' (expected geometric|heavy-tail|uniform|clocked)");
  }

  while (!params.empty()) {
    std::string_view item = params;
    if (const auto comma = params.find(','); comma != std::string_view::npos) {
      item = params.substr(0, comma);
      params = params.substr(comma + 1);
    } else {
      params = {};
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("StrategySpec: expected key=value, got '" +
                                  std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "alpha" && spec.kind == StrategyKind::GeometricAware) {
      spec.alpha = parse_positive(value, "alpha");
    } else if (key == "epsilon" && spec.kind == StrategyKind::HeavyTailOblivious) {
      spec.epsilon = parse_positive(value, "epsilon");
    } else if (key == "width" && spec.kind == StrategyKind::ClockedPartition) {
      spec.partition_width =
          static_cast<std::uint32_t>(parse_positive(value, "width"));
    } else {
      throw std::invalid_argument("StrategySpec: parameter '" +
                                  std::string(key) + "' does not apply to " +
                                  kind_name(spec.kind));
    }
  }
  spec.validate();
  return spec;
}

std::string StrategySpec::to_string() const {
  std::ostringstream out;
  out << kind_name(kind);
  switch (kind) {
    case StrategyKind::GeometricAware:
      out << ":alpha=" << alpha;
      break;
    case StrategyKind::HeavyTailOblivious:
      out << ":epsilon=" << epsilon;
      break;
    case StrategyKind::UniformNaive:
      break;
    case StrategyKind::ClockedPartition:
      if (partition_width != 0) out << ":width=" << partition_width;
      break;
  }
  return out.str();
}

ChannelDistribution geometric_strategy(const OpenIndex& open, double rate) {
  require_open(open, "geometric_strategy");
  if (!(rate > 0.0) || rate >= 1.0) {
    throw std::invalid_argument("geometric_strategy: rate must lie in (0, 1)");
  }
  std::vector<double> raw;
  raw.reserve(open.indices.size());
  double term = rate;
  for (std::size_t j = 0; j < open.indices.size(); ++j) {
    if (term < std::numeric_limits<double>::min()) break;
    raw.push_back(term);
    term *= (1.0 - rate);
  }
  std::vector<std::uint32_t> support(open.indices.begin(),
                                     open.indices.begin() + raw.size());
  return ChannelDistribution::from_weights(std::move(support), raw);
}

ChannelDistribution heavy_tail_strategy(const OpenIndex& open, double epsilon) {
  require_open(open, "heavy_tail_strategy");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("heavy_tail_strategy: epsilon must be > 0");
  }
  const double exponent = 1.0 + epsilon / 2.0;
  std::vector<double> raw;
  raw.reserve(open.indices.size());
  for (std::size_t j = 1; j <= open.indices.size(); ++j) {
    const double x = static_cast<double>(j) + 1.0;
    raw.push_back(1.0 / (x * std::pow(std::log(x), exponent)));
  }
  return ChannelDistribution::from_weights(open.indices, raw);
}

ChannelDistribution uniform_strategy(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_strategy: channel count must be >= 1");
  }
  std::vector<std::uint32_t> support(n);
  for (std::size_t j = 0; j < n; ++j) support[j] = static_cast<std::uint32_t>(j);
  return ChannelDistribution::from_weights(std::move(support),
                                           std::vector<double>(n, 1.0));
}

std::optional<std::uint32_t> clocked_choice(const OpenIndex& open,
                                            std::uint64_t round,
                                            std::uint32_t width) {
  if (width == 0) {
    throw std::invalid_argument("clocked_choice: width must be >= 1");
  }
  if (round == 0) {
    throw std::invalid_argument("clocked_choice: rounds are 1-based");
  }
  const std::uint32_t residue = static_cast<std::uint32_t>((round - 1) % width);
  for (std::uint32_t id : open.indices) {
    if (id % width == residue) return id;
  }
  return std::nullopt;
}

std::uint32_t sample_channel(const ChannelDistribution& dist,
                             std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto it =
      std::upper_bound(dist.cumulative.begin(), dist.cumulative.end(), u);
  const std::size_t k = it == dist.cumulative.end()
                            ? dist.cumulative.size() - 1
                            : static_cast<std::size_t>(
                                  it - dist.cumulative.begin());
  return dist.support[k];
}

double geometric_rate(const StrategySpec& spec, const Densities& d, Party side) {
  const double other = side == Party::Alice ? d.p2 : d.p1;
  return spec.alpha * other * d.q;
}

ChannelDistribution build_distribution(const StrategySpec& spec,
                                       const OpenIndex& open, std::size_t n,
                                       const Densities& d, Party side) {
  switch (spec.kind) {
    case StrategyKind::GeometricAware:
      return geometric_strategy(open, geometric_rate(spec, d, side));
    case StrategyKind::HeavyTailOblivious:
      return heavy_tail_strategy(open, spec.epsilon);
    case StrategyKind::UniformNaive:
      return uniform_strategy(n);
    case StrategyKind::ClockedPartition:
      break;
  }
  throw std::invalid_argument(
      "build_distribution: clocked strategies have no fixed per-round "
      "distribution; use simulate_clocked");
}

}  // namespace whitesync
