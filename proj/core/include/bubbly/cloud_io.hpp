#pragma once

#include <iosfwd>
#include <string>

#include "bubbly/placement.hpp"

namespace bubbly {

inline constexpr const char* kCloudFormatTag = "bubbly-cloud";
inline constexpr int kCloudFormatVersion = 1;

/// Writes the versioned plain-text cloud record (17 significant digits).
void write_cloud(std::ostream& out, const BubbleCloud& cloud);
void write_cloud(const std::string& path, const BubbleCloud& cloud);

/// Reads a cloud record; cell boxes are rebuilt from the domain and epsilon.
BubbleCloud read_cloud(std::istream& in);
BubbleCloud read_cloud(const std::string& path);

}  // namespace bubbly
