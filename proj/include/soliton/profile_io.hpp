#pragma once

// Profile tables as CSV: a metadata comment line, a header row, then
// xi,phi,dphi,f,df in shortest round-trip decimal form.

#include "soliton/profile.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace soliton {

struct ProfileTable {
  std::size_t n = 0;
  std::string mode;
  std::vector<ReducedState> nodes;
};

void write_profile_csv(std::ostream& out, const ProfileTable& table);
void write_profile_csv(const std::filesystem::path& path, const ProfileTable& table);

/// Throws ProfileMalformed with the offending line number.
ProfileTable read_profile_csv(std::istream& in);
ProfileTable read_profile_csv(const std::filesystem::path& path);

}  // namespace soliton
