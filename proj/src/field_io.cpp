#include "rfio/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rfio {

namespace {

static_assert(std::endian::native == std::endian::little, "field I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw FormatError("field file truncated (length error)");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string field_io_encode(const Field& f) {
  std::string out = "RWF1";
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.n));
  put<double>(out, f.grid.length);
  out.reserve(out.size() + 32 * f.size());
  for (const CVec* c : {&f.comp1, &f.comp2})
    for (Eigen::Index i = 0; i < c->size(); ++i) {
      put<double>(out, (*c)[i].real());
      put<double>(out, (*c)[i].imag());
    }
  return out;
}

Field field_io_decode(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "RWF1") != 0) throw FormatError("field file: bad magic");
  std::size_t pos = 4;
  const auto d = get<std::uint32_t>(bytes, pos);
  const auto n = get<std::uint32_t>(bytes, pos);
  const auto len = get<double>(bytes, pos);
  TorusGrid g;
  try {
    g = TorusGrid(static_cast<int>(d), static_cast<int>(n), len);
  } catch (const Error& e) {
    throw FormatError(std::string("field file: malformed header: ") + e.what());
  }
  const std::size_t expect = pos + 32 * g.cells();
  if (bytes.size() < expect) throw FormatError("field file truncated (length error)");
  if (bytes.size() > expect) throw FormatError("field file: trailing bytes after payload");
  Field f(g);
  for (CVec* c : {&f.comp1, &f.comp2})
    for (Eigen::Index i = 0; i < c->size(); ++i) {
      const double re = get<double>(bytes, pos);
      const double im = get<double>(bytes, pos);
      (*c)[i] = cplx(re, im);
    }
  return f;
}

void field_io_write(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const std::string bytes = field_io_encode(f);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write failed: " + path);
}

Field field_io_read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return field_io_decode(ss.str());
}

}  // namespace rfio
