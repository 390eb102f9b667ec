#pragma once

#include <string>
#include <vector>

namespace rfio {

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

// Fixed formatting so that reruns produce identical bytes.
std::string fmt(double v);
std::string fmt(int v);
std::string fmt(unsigned long long v);
std::string hex(unsigned long long v);

// '#'-prefixed comment lines, then the header row and the body.
std::string csv_render(const Table& t, const std::vector<std::string>& comments = {});
void csv_write(const std::string& path, const Table& t, const std::vector<std::string>& comments = {});

}  // namespace rfio
