#include "ntc/tns_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ntc {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line_no,
                       const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

long long parse_index(const std::string& tok, const std::string& path,
                      std::size_t line_no) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    fail(path, line_no, "bad index '" + tok + "'");
  return v;
}

double parse_value(const std::string& tok, const std::string& path,
                   std::size_t line_no) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    fail(path, line_no, "bad value '" + tok + "'");
  return v;
}

}  // namespace

SparseTensor read_tns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_tns: cannot open " + path);

  std::vector<std::size_t> declared_dims;
  bool have_dims = false;
  std::size_t order = 0;

  std::vector<coord_t> indices;
  std::vector<double> values;
  std::vector<std::size_t> maxima;

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> toks;

  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string word;
      if (hs >> word && word == "dims:") {
        declared_dims.clear();
        long long d = 0;
        while (hs >> d) {
          if (d <= 0) fail(path, line_no, "non-positive dimension in dims header");
          declared_dims.push_back(static_cast<std::size_t>(d));
        }
        if (hs.fail() && !hs.eof()) fail(path, line_no, "bad dims header");
        if (declared_dims.size() < 2)
          fail(path, line_no, "dims header needs at least 2 dimensions");
        have_dims = true;
        if (order != 0 && order != declared_dims.size())
          fail(path, line_no, "dims header order disagrees with entries");
        order = declared_dims.size();
      }
      continue;
    }

    toks.clear();
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) {
      if (t[0] == '#') break;  // trailing comment
      toks.push_back(t);
    }
    if (toks.empty()) continue;

    if (order == 0) {
      if (toks.size() < 3)
        fail(path, line_no, "expected at least 2 indices and a value");
      order = toks.size() - 1;
    }
    if (toks.size() != order + 1)
      fail(path, line_no, "expected " + std::to_string(order + 1) + " fields, got " +
                              std::to_string(toks.size()));

    for (std::size_t m = 0; m < order; ++m) {
      const long long v = parse_index(toks[m], path, line_no);
      if (v < 1) fail(path, line_no, "indices are 1-based; got " + toks[m]);
      if (static_cast<unsigned long long>(v) >
          std::numeric_limits<coord_t>::max())
        fail(path, line_no, "index too large: " + toks[m]);
      if (have_dims && static_cast<std::size_t>(v) > declared_dims[m])
        fail(path, line_no, "index " + toks[m] + " exceeds declared dimension " +
                                std::to_string(declared_dims[m]));
      indices.push_back(static_cast<coord_t>(v - 1));
      if (maxima.size() <= m) maxima.resize(order, 0);
      if (static_cast<std::size_t>(v) > maxima[m])
        maxima[m] = static_cast<std::size_t>(v);
    }
    const double val = parse_value(toks[order], path, line_no);
    if (!std::isfinite(val)) fail(path, line_no, "non-finite value");
    if (val < 0.0) fail(path, line_no, "negative value");
    values.push_back(val);
  }

  if (!have_dims && values.empty())
    throw std::runtime_error("read_tns: " + path +
                             " has no entries and no dims header");
  std::vector<std::size_t> dims = have_dims ? declared_dims : maxima;
  return SparseTensor(std::move(dims), std::move(indices), std::move(values));
}

void write_tns(const SparseTensor& tensor, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_tns: cannot open " + path);

  out << "# dims:";
  for (std::size_t d : tensor.dims()) out << ' ' << d;
  out << '\n';

  char buf[64];
  for (std::size_t e = 0; e < tensor.nnz(); ++e) {
    for (coord_t ix : tensor.index(e)) out << (static_cast<std::size_t>(ix) + 1) << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", tensor.value(e));
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("write_tns: write failed for " + path);
}

}  // namespace ntc
