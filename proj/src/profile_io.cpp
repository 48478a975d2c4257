#include "soliton/profile_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace soliton {
namespace {

constexpr const char* kHeader = "xi,phi,dphi,f,df";
constexpr const char* kMagic = "# soliton-profile";

void append_number(std::string& line, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw SolitonError(ErrorCode::ProfileMalformed, "number formatting failed");
  line.append(buf.data(), end);
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& msg) {
  throw SolitonError(ErrorCode::ProfileMalformed, "line " + std::to_string(line_no) + ": " + msg);
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

}  // namespace

void write_profile_csv(std::ostream& out, const ProfileTable& table) {
  out << kMagic << " n=" << table.n << " mode=" << table.mode << '\n' << kHeader << '\n';
  std::string line;
  for (const auto& s : table.nodes) {
    line.clear();
    for (double v : {s.xi, s.phi, s.dphi, s.f, s.df}) {
      if (!line.empty()) line.push_back(',');
      append_number(line, v);
    }
    out << line << '\n';
  }
}

void write_profile_csv(const std::filesystem::path& path, const ProfileTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw SolitonError(ErrorCode::ConfigInvalid, "cannot write '" + path.string() + "'");
  write_profile_csv(out, table);
}

ProfileTable read_profile_csv(std::istream& in) {
  ProfileTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(kMagic, 0) == 0) {
        std::istringstream meta(line.substr(std::string(kMagic).size()));
        std::string tok;
        while (meta >> tok) {
          if (tok.rfind("n=", 0) == 0) {
            const std::string v = tok.substr(2);
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
            if (ec != std::errc{} || p != v.data() + v.size()) malformed(line_no, "bad n in metadata");
            table.n = n;
          } else if (tok.rfind("mode=", 0) == 0) {
            table.mode = tok.substr(5);
          }
        }
      }
      continue;
    }
    if (!header) {
      if (line != kHeader) malformed(line_no, std::string("expected header '") + kHeader + "'");
      header = true;
      continue;
    }
    std::array<double, 5> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t k = 0; k < v.size(); ++k) {
      while (p < end && *p == ' ') ++p;
      auto [q, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc{}) malformed(line_no, "column " + std::to_string(k + 1) + " is not a number");
      if (!std::isfinite(v[k])) malformed(line_no, "non-finite value");
      p = q;
      while (p < end && *p == ' ') ++p;
      if (k + 1 < v.size()) {
        if (p == end || *p != ',') malformed(line_no, "expected 5 columns");
        ++p;
      }
    }
    if (p != end) malformed(line_no, "trailing data after 5 columns");
    table.nodes.push_back(ReducedState{v[0], v[1], v[2], v[3], v[4]});
  }
  if (!header) malformed(line_no, "missing header");
  if (table.nodes.size() < 2) malformed(line_no, "need at least two rows");
  return table;
}

ProfileTable read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SolitonError(ErrorCode::ProfileMalformed, "cannot open profile '" + path.string() + "'");
  return read_profile_csv(in);
}

}  // namespace soliton
