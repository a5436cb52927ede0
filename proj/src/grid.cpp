#include "mapf/grid.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include "mapf/errors.hpp"

namespace mapf {

GridMap::GridMap(std::string name, int width, int height, std::vector<std::uint8_t> blocked)
    : name_(std::move(name)), width_(width), height_(height), blocked_(std::move(blocked)) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("map dimensions must be positive");
  if (blocked_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw std::invalid_argument("blocked vector size does not match width*height");
  }
}

int GridMap::free_count() const {
  return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), std::uint8_t{0}));
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("map line " + std::to_string(line_no) + ": " + what);
}

int header_value(std::string_view line, std::string_view key, std::size_t line_no) {
  std::istringstream in{std::string(line)};
  std::string k;
  long v = 0;
  if (!(in >> k) || k != key) fail(line_no, "expected '" + std::string(key) + " <n>'");
  if (!(in >> v) || v < 1) fail(line_no, "invalid " + std::string(key));
  return static_cast<int>(v);
}

}  // namespace

GridMap parse_map(std::string_view text, std::string name) {
  const auto lines = split_lines(text);
  if (lines.size() < 4) fail(lines.size() + 1, "truncated header");
  if (lines[0].substr(0, 4) != "type") fail(1, "expected 'type ...'");
  const int height = header_value(lines[1], "height", 2);
  const int width = header_value(lines[2], "width", 3);
  if (lines[3] != "map") fail(4, "expected 'map'");

  std::vector<std::uint8_t> blocked;
  blocked.reserve(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const std::size_t line_no = 5 + static_cast<std::size_t>(r);
    if (4 + static_cast<std::size_t>(r) >= lines.size()) {
      fail(line_no, "expected " + std::to_string(height) + " body rows, found " +
                        std::to_string(r));
    }
    std::string_view row = lines[4 + r];
    if (static_cast<int>(row.size()) != width) {
      fail(line_no, "row length " + std::to_string(row.size()) + " != width " +
                        std::to_string(width));
    }
    for (char ch : row) {
      switch (ch) {
        case '.':
        case 'G': blocked.push_back(0); break;
        case '@':
        case 'O':
        case 'T': blocked.push_back(1); break;
        default: fail(line_no, std::string("unknown map character '") + ch + "'");
      }
    }
  }
  for (std::size_t i = 4 + height; i < lines.size(); ++i) {
    if (!lines[i].empty()) fail(i + 1, "unexpected content after map body");
  }
  return GridMap(std::move(name), width, height, std::move(blocked));
}

GridMap load_map_file(const std::filesystem::path& path) {
  return parse_map(read_text_file(path), path.stem().string());
}

std::string to_map_text(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                    std::to_string(map.width()) + "\nmap\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out.push_back(map.is_blocked({r, c}) ? '@' : '.');
    out.push_back('\n');
  }
  return out;
}

std::vector<int> component_labels(const GridMap& map) {
  std::vector<int> label(map.size(), -1);
  int next = 0;
  std::queue<int> open;
  for (int start = 0; start < map.size(); ++start) {
    if (map.blocked()[start] || label[start] >= 0) continue;
    label[start] = next;
    open.push(start);
    while (!open.empty()) {
      const Cell u = map.cell(open.front());
      open.pop();
      for (Action a : kAllActions) {
        if (a == Action::Wait) continue;
        const Cell v = apply(u, a);
        if (!map.is_free(v) || label[map.index(v)] >= 0) continue;
        label[map.index(v)] = next;
        open.push(map.index(v));
      }
    }
    ++next;
  }
  return label;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mapf
