#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace wsnids {

using FeatureVector = std::vector<double>;
using NodeId = std::uint32_t;
/// Identity of a record within its source corpus (its row index).
using SampleId = std::uint64_t;

/// One labelled traffic record. `y` is +1 (normal) or -1 (anomalous).
struct Sample {
  FeatureVector x;
  int y = 1;
  SampleId id = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// A directed radio hop.
struct Link {
  NodeId from = 0;
  NodeId to = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Carries messages between nodes. Implementations decide the hop sequence
/// (direct or relayed) and account for the cost of each hop.
class Medium {
 public:
  virtual ~Medium() = default;

  /// Hops taken by a message from `from` to `to`, in transmission order.
  virtual std::vector<Link> route(NodeId from, NodeId to) const = 0;

  /// Called once per hop actually taken.
  virtual void transmit(const Link& hop, std::size_t bytes) = 0;
};

/// Single-hop medium with no cost model; every pair of nodes is adjacent.
class DirectMedium final : public Medium {
 public:
  std::vector<Link> route(NodeId from, NodeId to) const override { return {{from, to}}; }
  void transmit(const Link&, std::size_t) override {}
};

}  // namespace wsnids
