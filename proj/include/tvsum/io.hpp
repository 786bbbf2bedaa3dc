// Copyright 2026 The tvsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File helpers shared by the pipeline and the fixture writer.

#ifndef TVSUM_IO_HPP_
#define TVSUM_IO_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "tvsum/error.hpp"

namespace tvsum {

namespace fs = std::filesystem;

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const fs::path &path)
      : Error("missing input: " + path.string()), path_(path) {}
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to "<path>.tmp" and renames over path.
inline void write_file(const fs::path &path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace tvsum

#endif  // TVSUM_IO_HPP_
