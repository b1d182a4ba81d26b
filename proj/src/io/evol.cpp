#include "rodfsi/io.hpp"

#include <fstream>
#include <sstream>

namespace rodfsi::io {

namespace {

constexpr const char* kHeader = "# t E visc pdiv S_term x1_left x2_left dt iters\n";

std::string row(const fsi::DiagnosticsRecord& r) {
  std::string s;
  for (const double v : {r.t, r.E, r.visc, r.pdiv, r.S_term, r.left.x(), r.left.y(), r.dt})
    s += format_double(v) + ' ';
  return s + std::to_string(r.iterations) + '\n';
}

}  // namespace

EvolWriter::EvolWriter(const std::string& path) : f_(std::fopen(path.c_str(), "w")) {
  if (!f_) throw Error("cannot write '" + path + "'");
  std::fputs(kHeader, f_);
  std::fflush(f_);
}

EvolWriter::~EvolWriter() {
  if (f_) std::fclose(f_);
}

void EvolWriter::write(const fsi::DiagnosticsRecord& r) {
  std::fputs(row(r).c_str(), f_);
  std::fflush(f_);
}

void write_evol(const std::vector<fsi::DiagnosticsRecord>& records, const std::string& path) {
  EvolWriter w(path);
  for (const auto& r : records) w.write(r);
}

std::vector<fsi::DiagnosticsRecord> read_evol(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "'");
  std::vector<fsi::DiagnosticsRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    fsi::DiagnosticsRecord r;
    double x1, x2;
    if (!(in >> r.t >> r.E >> r.visc >> r.pdiv >> r.S_term >> x1 >> x2 >> r.dt >> r.iterations))
      throw DomainError(path + ":" + std::to_string(lineno) + ": malformed record");
    r.left = Vec2(x1, x2);
    out.push_back(r);
  }
  return out;
}

}  // namespace rodfsi::io
