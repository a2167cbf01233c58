// Copyright 2026 The stgraph Authors. All Rights Reserved.
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

#include "stgraph/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "stgraph/error.hpp"

namespace stgraph {

namespace fs = std::filesystem;

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::vector<char>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    const char ch = buf[pos];
    if (ch == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    tok.push_back(buf[pos++]);
  }
  return tok;
}

int parse_positive(const std::string& tok, const fs::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kBadMagic, "malformed netpbm header in " + path.string());
}

void write_netpbm(const fs::path& path, const char* magic, int h, int w, int channels,
                  const std::uint8_t* data) {
  const std::string header =
      std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<char> bytes(header.begin(), header.end());
  const std::size_t count = static_cast<std::size_t>(h) * w * channels;
  bytes.insert(bytes.end(), reinterpret_cast<const char*>(data),
               reinterpret_cast<const char*>(data) + count);
  write_file_atomic(path, bytes);
}

}  // namespace

Image8 read_netpbm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  const std::string magic = next_token(buf, pos);
  Image8 img;
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw Error(ErrorCode::kBadMagic, "not a binary PGM/PPM: " + path.string());
  }
  img.w = parse_positive(next_token(buf, pos), path);
  img.h = parse_positive(next_token(buf, pos), path);
  const int maxval = parse_positive(next_token(buf, pos), path);
  if (maxval != 255) {
    throw Error(ErrorCode::kBadMagic, "only 8-bit netpbm is supported: " + path.string());
  }
  ++pos;  // single whitespace byte after maxval

  const std::size_t count = static_cast<std::size_t>(img.h) * img.w * img.channels;
  if (pos > buf.size() || buf.size() - pos < count) {
    throw Error(ErrorCode::kTruncated, path.string());
  }
  img.data.assign(reinterpret_cast<const std::uint8_t*>(buf.data() + pos),
                  reinterpret_cast<const std::uint8_t*>(buf.data() + pos + count));
  return img;
}

void write_pgm(const fs::path& path, int h, int w, const std::uint8_t* data) {
  write_netpbm(path, "P5", h, w, 1, data);
}

void write_ppm(const fs::path& path, int h, int w, const std::uint8_t* rgb) {
  write_netpbm(path, "P6", h, w, 3, rgb);
}

void write_file_atomic(const fs::path& path, const std::vector<char>& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& prefix,
                                 const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < prefix.size() + ext.size()) continue;
    if (name.compare(0, prefix.size(), prefix) != 0) continue;
    if (name.compare(name.size() - ext.size(), ext.size(), ext) != 0) continue;
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stgraph
