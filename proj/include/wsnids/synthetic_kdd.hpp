#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>

namespace wsnids::data {

/// Mix of traffic classes in a generated corpus. Shares need not sum to 1;
/// they are normalized.
struct SyntheticKddOptions {
  std::size_t records = 20000;
  std::uint64_t seed = 1;
  double normal_share = 0.55;
  double dos_share = 0.25;
  double probe_share = 0.17;
  double u2r_share = 0.005;
  double r2l_share = 0.025;
};

/// Writes a corpus in KDD'99 text format (41 features plus a dotted label per
/// line). Each attack name and normal service type draws its fields from its
/// own seeded distribution, loosely following the value ranges of the 10%
/// KDD'99 file, so the output exercises the same parser and label table.
void write_synthetic_kdd(std::ostream& out, const SyntheticKddOptions& options);

}  // namespace wsnids::data
