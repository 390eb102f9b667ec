#pragma once

#include <string>

#include "rfio/core.hpp"

namespace rfio {

class FormatError : public Error {
 public:
  using Error::Error;
};

// "RWF1", u32 d, u32 n, f64 box_length, then comp1 and comp2 as interleaved (re, im) f64, little endian.
void field_io_write(const Field& f, const std::string& path);
Field field_io_read(const std::string& path);

std::string field_io_encode(const Field& f);
Field field_io_decode(const std::string& bytes);

}  // namespace rfio
