#pragma once

#include <string>

namespace fraclab {

/// Writes `bytes` to `path` via a sibling temp file and rename, so readers
/// never observe a partial file.
void atomic_write(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace fraclab
