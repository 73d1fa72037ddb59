#include "confbend/nfld.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace confbend {

static_assert(std::endian::native == std::endian::little, "NFLD1 I/O assumes a little-endian host");

void write_nfld(const std::string& path, const Grid& grid, int comps, std::span<const double> values) {
  if (static_cast<Index>(values.size()) != grid.points() * comps)
    throw NfldError(path + ": value count does not match grid and component count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NfldError(path + ": cannot open for writing");
  out << "NFLD1 n=" << grid.dim() << " sizes=";
  for (int a = 0; a < grid.dim(); ++a) out << (a ? "," : "") << grid.size(a);
  out << " comps=" << comps << " dtype=f64le\n";
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw NfldError(path + ": write failed");
}

NfldData read_nfld(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NfldError(path + ": cannot open for reading");
  std::string header;
  if (!std::getline(in, header)) throw NfldError(path + ": missing header");
  std::istringstream hs(header);
  std::string magic, tn, tsizes, tcomps, tdtype, extra;
  hs >> magic >> tn >> tsizes >> tcomps >> tdtype;
  if (magic != "NFLD1") throw NfldError(path + ": not an NFLD1 file");
  if (hs >> extra) throw NfldError(path + ": unexpected header field '" + extra + "'");
  auto value_of = [&](const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) throw NfldError(path + ": expected '" + key + "=' in header");
    return tok.substr(key.size() + 1);
  };
  NfldData d;
  int n = 0;
  try {
    n = std::stoi(value_of(tn, "n"));
    std::string s = value_of(tsizes, "sizes");
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) d.sizes.push_back(std::stoi(item));
    d.comps = std::stoi(value_of(tcomps, "comps"));
  } catch (const std::logic_error&) {
    throw NfldError(path + ": malformed header");
  }
  if (value_of(tdtype, "dtype") != "f64le") throw NfldError(path + ": unsupported dtype");
  if (n < 1 || static_cast<int>(d.sizes.size()) != n) throw NfldError(path + ": n does not match sizes");
  if (d.comps < 1) throw NfldError(path + ": comps must be positive");
  std::size_t count = static_cast<std::size_t>(d.comps);
  for (int s : d.sizes) {
    if (s < 1) throw NfldError(path + ": sizes must be positive");
    count *= static_cast<std::size_t>(s);
  }
  d.values.resize(count);
  in.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) throw NfldError(path + ": truncated data");
  if (in.peek() != std::char_traits<char>::eof()) throw NfldError(path + ": trailing bytes after data");
  for (double v : d.values)
    if (!std::isfinite(v)) throw NfldError(path + ": non-finite value");
  return d;
}

}  // namespace confbend
