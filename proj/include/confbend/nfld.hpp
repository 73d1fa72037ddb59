#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/grid.hpp"

namespace confbend {

// NFLD1: one ASCII header line
//   NFLD1 n=<n> sizes=<s1,...,sn> comps=<c> dtype=f64le
// followed by raw little-endian doubles, points row-major, components fastest.

class NfldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NfldData {
  std::vector<int> sizes;
  int comps = 0;
  std::vector<double> values;
};

void write_nfld(const std::string& path, const Grid& grid, int comps, std::span<const double> values);
NfldData read_nfld(const std::string& path);

template <FieldKind Kind>
void write_field(const std::string& path, const Field<double, Kind>& f) {
  write_nfld(path, f.grid(), f.components(), f.values());
}

/// Reads a field onto `grid`, checking sizes and component count.
template <FieldKind Kind>
Field<double, Kind> read_field(const std::string& path, const Grid& grid) {
  NfldData d = read_nfld(path);
  Field<double, Kind> f(grid);
  if (d.sizes != grid.sizes()) throw NfldError(path + ": grid sizes differ from the expected grid");
  if (d.comps != f.components()) throw NfldError(path + ": unexpected component count");
  std::copy(d.values.begin(), d.values.end(), f.values().begin());
  return f;
}

}  // namespace confbend
