#include "streammem/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace streammem {

namespace {

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

// Header fields are "key=value" tokens after the magic words.
std::string header_value(std::istringstream& line, const std::string& key) {
  std::string token;
  if (!(line >> token) || token.rfind(key + "=", 0) != 0) {
    throw std::runtime_error("snapshot header: expected " + key + "=...");
  }
  return token.substr(key.size() + 1);
}

double parse_optional_real(const std::string& token, bool& present) {
  if (token == "-") {
    present = false;
    return 0.0;
  }
  present = true;
  return std::stod(token);
}

}  // namespace

BufferSnapshot snapshot_of(const ReplayBuffer& buffer) {
  BufferSnapshot snap;
  snap.strategy = buffer.strategy();
  snap.capacity = buffer.capacity();
  snap.protect_fraction = buffer.protect_fraction();
  snap.entries.reserve(buffer.size());
  for (const Sample& s : buffer.entries()) {
    snap.entries.push_back({s.id, s.source_id, s.arrival_index, s.uncertainty, s.embedding});
  }
  return snap;
}

std::string format_buffer_snapshot(const BufferSnapshot& snapshot) {
  const std::size_t edim = snapshot.entries.empty() ? 0 : snapshot.entries.front().embedding.size();
  std::ostringstream out;
  out << "# streammem-buffer v" << snapshot.schema_version
      << " strategy=" << to_string(snapshot.strategy) << " capacity=" << snapshot.capacity
      << " protect_fraction=" << fixed9(snapshot.protect_fraction) << " edim=" << edim << "\n";
  for (const auto& e : snapshot.entries) {
    if (e.embedding.size() != edim) {
      throw std::runtime_error("snapshot: inconsistent embedding dimensions");
    }
    out << e.id << ' ' << e.source_id << ' ' << e.arrival_index << ' '
        << (e.uncertainty ? fixed9(*e.uncertainty) : "-");
    for (double v : e.embedding) out << ' ' << fixed9(v);
    out << "\n";
  }
  return out.str();
}

BufferSnapshot parse_buffer_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("snapshot: empty input");
  }
  std::istringstream header(line);
  std::string hash, magic;
  header >> hash >> magic;
  if (hash != "#" || magic.rfind("streammem-buffer", 0) != 0) {
    throw std::runtime_error("snapshot: bad header magic");
  }
  std::string version;
  header >> version;
  if (version != "v1") {
    throw std::runtime_error("snapshot: unsupported schema version " + version);
  }
  BufferSnapshot snap;
  snap.schema_version = 1;
  snap.strategy = strategy_from_string(header_value(header, "strategy"));
  snap.capacity = std::stoull(header_value(header, "capacity"));
  snap.protect_fraction = std::stod(header_value(header, "protect_fraction"));
  const std::size_t edim = std::stoull(header_value(header, "edim"));

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    BufferSnapshot::Entry e;
    std::string unc;
    if (!(fields >> e.id >> e.source_id >> e.arrival_index >> unc)) {
      throw std::runtime_error("snapshot line " + std::to_string(line_no) + ": malformed entry");
    }
    bool present = false;
    const double u = parse_optional_real(unc, present);
    if (present) e.uncertainty = u;
    e.embedding.resize(edim);
    for (std::size_t i = 0; i < edim; ++i) {
      if (!(fields >> e.embedding[i])) {
        throw std::runtime_error("snapshot line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(edim) + " embedding values");
      }
    }
    snap.entries.push_back(std::move(e));
  }
  return snap;
}

void save_buffer_snapshot(const BufferSnapshot& snapshot, const std::filesystem::path& path) {
  write_file(path, format_buffer_snapshot(snapshot));
}

BufferSnapshot load_buffer_snapshot(const std::filesystem::path& path) {
  return parse_buffer_snapshot(read_file(path));
}

std::string format_stream_dump(const StreamDump& dump) {
  std::ostringstream out;
  out << "# streammem-stream v1 height=" << dump.height << " width=" << dump.width
      << " channels=" << dump.channels << " classes=" << dump.n_classes << "\n";
  const std::size_t feature_count = static_cast<std::size_t>(dump.height) * dump.width *
                                    dump.channels;
  for (const Sample& s : dump.samples) {
    if (s.features.data.size() != feature_count) {
      throw std::runtime_error("stream dump: sample " + std::to_string(s.id) +
                               " has wrong feature payload size");
    }
    out << s.id << ' ' << s.source_id << ' ' << s.arrival_index << ' '
        << (s.uncertainty ? fixed9(*s.uncertainty) : "-") << ' ' << s.embedding.size();
    for (double v : s.embedding) out << ' ' << fixed9(v);
    for (double v : s.features.data) out << ' ' << fixed9(v);
    out << ' ' << s.labels.size();
    for (const auto& [cls, grid] : s.labels) {
      out << ' ' << cls;
      for (auto bit : grid.data) out << ' ' << static_cast<int>(bit != 0);
    }
    out << "\n";
  }
  return out.str();
}

StreamDump parse_stream_dump(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("stream dump: empty input");
  }
  std::istringstream header(line);
  std::string hash, magic, version;
  header >> hash >> magic >> version;
  if (hash != "#" || magic != "streammem-stream" || version != "v1") {
    throw std::runtime_error("stream dump: bad header");
  }
  StreamDump dump;
  dump.height = std::stoi(header_value(header, "height"));
  dump.width = std::stoi(header_value(header, "width"));
  dump.channels = std::stoi(header_value(header, "channels"));
  dump.n_classes = std::stoi(header_value(header, "classes"));

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Sample s;
    std::string unc;
    std::size_t edim = 0;
    if (!(fields >> s.id >> s.source_id >> s.arrival_index >> unc >> edim)) {
      throw std::runtime_error("stream dump line " + std::to_string(line_no) + ": malformed");
    }
    bool present = false;
    const double u = parse_optional_real(unc, present);
    if (present) s.uncertainty = u;
    s.embedding.resize(edim);
    for (std::size_t i = 0; i < edim; ++i) fields >> s.embedding[i];
    s.features = FeatureGrid(dump.height, dump.width, dump.channels);
    for (double& v : s.features.data) fields >> v;
    std::size_t n_labels = 0;
    fields >> n_labels;
    for (std::size_t k = 0; k < n_labels; ++k) {
      int cls = 0;
      fields >> cls;
      MaskGrid grid(dump.height, dump.width);
      for (auto& bit : grid.data) {
        int b = 0;
        fields >> b;
        bit = static_cast<std::uint8_t>(b != 0);
      }
      s.labels.emplace(cls, std::move(grid));
    }
    if (!fields) {
      throw std::runtime_error("stream dump line " + std::to_string(line_no) +
                               ": truncated payload");
    }
    dump.samples.push_back(std::move(s));
  }
  return dump;
}

void save_stream_dump(const StreamDump& dump, const std::filesystem::path& path) {
  write_file(path, format_stream_dump(dump));
}

StreamDump load_stream_dump(const std::filesystem::path& path) {
  return parse_stream_dump(read_file(path));
}

}  // namespace streammem
