#include "wbic/draw_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "wbic/error.hpp"

namespace wbic {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.write(buf, len);
}

}  // namespace

void write_draws(std::ostream& out, const DrawMatrix& draws) {
  for (std::size_t s = 0; s < draws.size(); ++s) {
    bool first = true;
    for (double v : draws.draw(s)) {
      if (!first) out.put('\t');
      put(out, v);
      first = false;
    }
    for (double v : draws.loglik_row(s)) {
      out.put('\t');
      put(out, v);
    }
    out.put('\n');
  }
}

DrawMatrix read_draws(std::istream& in, std::size_t dim, double t, std::size_t n_chains) {
  std::vector<double> draws, loglik;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      auto tab = line.find('\t', pos);
      if (tab == std::string::npos) tab = line.size();
      double v = 0.0;
      const char* b = line.data() + pos;
      const char* e = line.data() + tab;
      if (e - b >= 4 && std::string_view(b, 4) == "-inf") {
        v = -INFINITY;
      } else {
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e) {
          throw Error(ErrorKind::Parse, "draw dump line " + std::to_string(line_no) + ": bad value");
        }
      }
      vals.push_back(v);
      pos = tab + 1;
    }
    if (width == 0) width = vals.size();
    if (vals.size() != width || width <= dim) {
      throw Error(ErrorKind::Parse, "draw dump line " + std::to_string(line_no) + ": bad width");
    }
    draws.insert(draws.end(), vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(dim));
    loglik.insert(loglik.end(), vals.begin() + static_cast<std::ptrdiff_t>(dim), vals.end());
  }
  if (width == 0) throw Error(ErrorKind::Parse, "empty draw dump");
  return DrawMatrix(dim, width - dim, t, n_chains, std::move(draws), std::move(loglik));
}

}  // namespace wbic
