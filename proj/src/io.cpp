#include <charconv>
#include <cstring>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ppk/errors.hpp"
#include "ppk/mra.hpp"

namespace ppk {

using nlohmann::json;

void write_jsonl(std::ostream& os, const CoeffField& c) {
  const int n = c.dim();
  auto corner = [n](const DyadicCube& q) {
    json k = json::array();
    for (int d = 0; d < n; ++d) k.push_back(q.k[d]);
    return k;
  };
  for (const auto& [cube, v] : c.scaling())
    os << json{{"j", cube.j}, {"k", corner(cube)}, {"lambda", "scaling"}, {"value", v}}.dump() << '\n';
  for (const auto& [idx, v] : c.wavelet()) {
    json lam = json::array();
    for (int d = 0; d < n; ++d) lam.push_back((idx.lambda >> d) & 1u);
    os << json{{"j", idx.cube.j}, {"k", corner(idx.cube)}, {"lambda", lam}, {"value", v}}.dump() << '\n';
  }
}

CoeffField read_jsonl(std::istream& is) {
  struct Rec {
    DyadicCube cube;
    unsigned lambda;
    double value;
  };
  std::vector<Rec> recs;
  int n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json r;
    try {
      r = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("coefficient file line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!r.contains("j") || !r.contains("k") || !r.contains("lambda") || !r.contains("value"))
      throw FormatError("coefficient file line " + std::to_string(lineno) + ": missing field");
    Rec rec;
    const auto& k = r["k"];
    const int dn = static_cast<int>(k.size());
    if (dn < 1 || dn > kMaxDim || (n != 0 && dn != n))
      throw FormatError("coefficient file line " + std::to_string(lineno) + ": inconsistent dimension");
    n = dn;
    rec.cube.n = n;
    rec.cube.j = r["j"].get<int>();
    for (int d = 0; d < n; ++d) rec.cube.k[d] = k[static_cast<std::size_t>(d)].get<std::int64_t>();
    if (r["lambda"].is_string()) {
      if (r["lambda"].get<std::string>() != "scaling") throw FormatError("lambda must be a 0/1 list or \"scaling\"");
      rec.lambda = 0;
    } else {
      rec.lambda = 0;
      if (static_cast<int>(r["lambda"].size()) != n) throw FormatError("lambda length differs from k");
      for (int d = 0; d < n; ++d)
        if (r["lambda"][static_cast<std::size_t>(d)].get<int>() != 0) rec.lambda |= 1u << d;
      if (rec.lambda == 0) throw FormatError("wavelet lambda must not be all zeros");
    }
    rec.value = r["value"].get<double>();
    recs.push_back(rec);
  }
  if (recs.empty()) return CoeffField(1, 0, 0);
  int jmin = std::numeric_limits<int>::max(), jmax = std::numeric_limits<int>::min();
  int scaling_level = std::numeric_limits<int>::min();
  for (const auto& r : recs) {
    if (r.lambda == 0) {
      if (scaling_level != std::numeric_limits<int>::min() && scaling_level != r.cube.j)
        throw FormatError("scaling entries at more than one level");
      scaling_level = r.cube.j;
    }
    jmin = std::min(jmin, r.cube.j);
    jmax = std::max(jmax, r.lambda == 0 ? r.cube.j : r.cube.j + 1);
  }
  if (scaling_level != std::numeric_limits<int>::min()) {
    if (scaling_level != jmin) throw FormatError("scaling level must be the coarsest level");
  }
  CoeffField c(n, jmin, jmax);
  for (const auto& r : recs) {
    if (r.lambda == 0)
      c.add_scaling(r.cube, r.value);
    else
      c.add_wavelet(TensorIndex{r.cube, r.lambda}, r.value);
  }
  return c;
}

namespace {

void write_header(std::ostream& os, const GridFunction& f) {
  os << "# n=" << f.dim() << " K=" << f.level() << " lo=";
  for (int d = 0; d < f.dim(); ++d) os << (d ? "," : "") << f.lo()[d];
  os << " hi=";
  for (int d = 0; d < f.dim(); ++d) os << (d ? "," : "") << f.hi()[d];
  os << '\n';
}

Index parse_index(const std::string& s) {
  Index out{0, 0, 0};
  std::istringstream ss(s);
  std::string tok;
  int d = 0;
  while (std::getline(ss, tok, ',')) {
    if (d >= kMaxDim) throw FormatError("grid header: too many coordinates");
    out[d++] = std::stoll(tok);
  }
  return out;
}

} // namespace

void write_csv(std::ostream& os, const GridFunction& f) {
  write_header(os, f);
  for (int d = 0; d < f.dim(); ++d) os << 'x' << d + 1 << ',';
  os << "value\n";
  char buf[40];
  for (std::size_t i = 0; i < f.size(); ++i) {
    Point x = f.point(i);
    for (int d = 0; d < f.dim(); ++d) {
      auto r = std::to_chars(buf, buf + sizeof buf, x[d]);
      os.write(buf, r.ptr - buf);
      os << ',';
    }
    auto r = std::to_chars(buf, buf + sizeof buf, f.values()[i]);
    os.write(buf, r.ptr - buf);
    os << '\n';
  }
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw FormatError("grid CSV: missing header");
  int n = 0, K = 0;
  Index lo{0, 0, 0}, hi{1, 1, 1};
  std::istringstream hs(line.substr(2));
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("grid CSV: bad header token " + tok);
    auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "n")
      n = std::stoi(val);
    else if (key == "K")
      K = std::stoi(val);
    else if (key == "lo")
      lo = parse_index(val);
    else if (key == "hi")
      hi = parse_index(val);
  }
  if (n < 1 || n > kMaxDim) throw FormatError("grid CSV: bad dimension");
  GridFunction f(n, K, lo, hi);
  std::getline(is, line); // column names
  std::size_t i = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (i >= f.size()) throw FormatError("grid CSV: more rows than the header box");
    auto comma = line.rfind(',');
    f.values()[i++] = std::stod(line.substr(comma + 1));
  }
  if (i != f.size()) throw FormatError("grid CSV: fewer rows than the header box");
  return f;
}

namespace {
constexpr char kMagic[8] = {'P', 'P', 'K', 'G', 'R', 'I', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("grid binary: truncated");
  return v;
}
} // namespace

// Layout (little-endian): magic, int32 n, int32 K, int64 lo[3], int64 hi[3], doubles row-major.
void write_binary(std::ostream& os, const GridFunction& f) {
  os.write(kMagic, sizeof kMagic);
  put<std::int32_t>(os, f.dim());
  put<std::int32_t>(os, f.level());
  for (int d = 0; d < kMaxDim; ++d) put<std::int64_t>(os, f.lo()[d]);
  for (int d = 0; d < kMaxDim; ++d) put<std::int64_t>(os, f.hi()[d]);
  os.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
}

GridFunction read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw FormatError("grid binary: bad magic");
  int n = get<std::int32_t>(is), K = get<std::int32_t>(is);
  if (n < 1 || n > kMaxDim) throw FormatError("grid binary: bad dimension");
  Index lo, hi;
  for (int d = 0; d < kMaxDim; ++d) lo[d] = get<std::int64_t>(is);
  for (int d = 0; d < kMaxDim; ++d) hi[d] = get<std::int64_t>(is);
  GridFunction f(n, K, lo, hi);
  if (!is.read(reinterpret_cast<char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double))))
    throw FormatError("grid binary: truncated values");
  return f;
}

} // namespace ppk
