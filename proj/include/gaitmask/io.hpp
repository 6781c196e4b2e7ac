#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "gaitmask/errors.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Number formatting. Shortest round-trip form so that serialize(load(x))
// reproduces marker values bit-exactly.
// ---------------------------------------------------------------------------

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

inline double parse_double(std::string_view sv, const char* context, std::size_t row) {
  double v = 0.0;
  const char* first = sv.data();
  const char* last = sv.data() + sv.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    raise(Errc::malformed_frame,
          std::string(context) + ": unparsable number '" + std::string(sv) + "' at row " +
              std::to_string(row));
  return v;
}

inline void split_csv_row(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      std::size_t end = i;
      if (end > start && line[end - 1] == '\r') --end;
      out.emplace_back(line.data() + start, end - start);
      start = i + 1;
    }
  }
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot write " + path.string());
  out << content;
  if (!out) raise(Errc::io_error, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Marker CSV: header `frame,<m1>_x,<m1>_y,<m1>_z,...` in layout order,
// one row per frame, millimeters.
// ---------------------------------------------------------------------------

inline std::string marker_csv_header(const MarkerLayout& layout) {
  std::string h = "frame";
  for (const auto& name : layout.marker_names) {
    h += "," + name + "_x," + name + "_y," + name + "_z";
  }
  return h;
}

inline std::vector<Pose> read_marker_csv(const fs::path& path, const MarkerLayout& layout) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  const std::size_t m = layout.marker_count();
  const std::size_t expected_cols = 1 + 3 * m;

  std::string line;
  if (!std::getline(in, line))
    raise(Errc::malformed_frame, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != marker_csv_header(layout)) {
    // Distinguish a column-count problem from a renamed marker.
    std::vector<std::string_view> cells;
    split_csv_row(line, cells);
    if (cells.size() != expected_cols)
      raise(Errc::malformed_frame, path.string() + ": header has " +
                                       std::to_string(cells.size()) + " columns, expected " +
                                       std::to_string(expected_cols));
    raise(Errc::unknown_marker, path.string() + ": header does not match layout marker order");
  }

  std::vector<Pose> frames;
  std::vector<std::string_view> cells;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    split_csv_row(line, cells);
    if (cells.size() != expected_cols)
      raise(Errc::malformed_frame, path.string() + ": row " + std::to_string(row) + " has " +
                                       std::to_string(cells.size()) + " columns, expected " +
                                       std::to_string(expected_cols));
    Pose pose(m);
    for (std::size_t i = 0; i < m; ++i) {
      pose[i].x = parse_double(cells[1 + 3 * i], path.string().c_str(), row);
      pose[i].y = parse_double(cells[2 + 3 * i], path.string().c_str(), row);
      pose[i].z = parse_double(cells[3 + 3 * i], path.string().c_str(), row);
    }
    frames.push_back(std::move(pose));
  }
  if (frames.empty()) raise(Errc::malformed_frame, path.string() + ": no frame rows");
  return frames;
}

inline void write_marker_csv(const fs::path& path, const GaitSample& sample,
                             const MarkerLayout& layout) {
  std::string out = marker_csv_header(layout);
  out += '\n';
  for (std::size_t t = 0; t < sample.frames.size(); ++t) {
    out += std::to_string(t);
    for (const auto& p : sample.frames[t]) {
      out += ',';
      append_double(out, p.x);
      out += ',';
      append_double(out, p.y);
      out += ',';
      append_double(out, p.z);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Force CSV: `sample,fz_plate1,fz_plate2`, newtons.
// ---------------------------------------------------------------------------

inline std::pair<ForceSeries, ForceSeries> read_force_csv(const fs::path& path, double rate_hz) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    raise(Errc::malformed_frame, path.string() + ": empty file");
  ForceSeries p1{{}, rate_hz, "plate1"}, p2{{}, rate_hz, "plate2"};
  std::vector<std::string_view> cells;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    split_csv_row(line, cells);
    if (cells.size() != 3)
      raise(Errc::malformed_frame, path.string() + ": row " + std::to_string(row) +
                                       " has " + std::to_string(cells.size()) +
                                       " columns, expected 3");
    p1.newtons.push_back(parse_double(cells[1], path.string().c_str(), row));
    p2.newtons.push_back(parse_double(cells[2], path.string().c_str(), row));
  }
  return {std::move(p1), std::move(p2)};
}

inline void write_force_csv(const fs::path& path, const ForceSeries& p1, const ForceSeries& p2) {
  std::string out = "sample,fz_plate1,fz_plate2\n";
  for (std::size_t i = 0; i < p1.newtons.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    append_double(out, p1.newtons[i]);
    out += ',';
    append_double(out, i < p2.newtons.size() ? p2.newtons[i] : 0.0);
    out += '\n';
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Layout file: ordered marker names, group assignments, 17-role reduction map.
// ---------------------------------------------------------------------------

struct LayoutFile {
  MarkerLayout layout;
  BodyPartMap body_parts;
};

inline LayoutFile parse_layout_json(const json& j) {
  LayoutFile out;
  if (!j.contains("markers") || !j.contains("groups") || !j.contains("reduction_17"))
    raise(Errc::missing_metadata, "layout file needs 'markers', 'groups', 'reduction_17'");
  std::set<std::string> seen;
  for (const auto& name : j.at("markers")) {
    std::string n = name.get<std::string>();
    if (!seen.insert(n).second)
      raise(Errc::unknown_marker, "duplicate marker name '" + n + "' in layout");
    out.layout.marker_names.push_back(std::move(n));
  }
  out.body_parts.group_of.assign(out.layout.marker_count(), BodyPart::head);
  std::vector<bool> assigned(out.layout.marker_count(), false);
  for (auto it = j.at("groups").begin(); it != j.at("groups").end(); ++it) {
    int idx = out.layout.index_of(it.key());
    if (idx < 0) raise(Errc::unknown_marker, "group entry for unknown marker '" + it.key() + "'");
    out.body_parts.group_of[idx] = body_part_from_name(it.value().get<std::string>());
    assigned[idx] = true;
  }
  for (std::size_t i = 0; i < assigned.size(); ++i)
    if (!assigned[i])
      raise(Errc::unknown_marker,
            "marker '" + out.layout.marker_names[i] + "' has no group assignment");
  for (int r = 0; r < kReducedRoleCount; ++r) {
    const char* role = reduced_role_name(static_cast<ReducedRole>(r));
    if (!j.at("reduction_17").contains(role))
      raise(Errc::incomplete_reduction_map, std::string("reduction map is missing role '") + role + "'");
    for (const auto& name : j.at("reduction_17").at(role)) {
      int idx = out.layout.index_of(name.get<std::string>());
      if (idx < 0)
        raise(Errc::unknown_marker,
              "reduction role '" + std::string(role) + "' references unknown marker");
      out.body_parts.reduction[r].push_back(idx);
    }
  }
  out.body_parts.validate(out.layout);
  return out;
}

inline LayoutFile load_layout(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(Errc::missing_metadata, path.string() + ": " + e.what());
  }
  return parse_layout_json(j);
}

inline json layout_to_json(const MarkerLayout& layout, const BodyPartMap& map) {
  json j;
  j["markers"] = layout.marker_names;
  json groups = json::object();
  for (std::size_t i = 0; i < layout.marker_count(); ++i)
    groups[layout.marker_names[i]] = body_part_name(map.group_of[i]);
  j["groups"] = std::move(groups);
  json red = json::object();
  for (int r = 0; r < kReducedRoleCount; ++r) {
    json names = json::array();
    for (int idx : map.reduction[r]) names.push_back(layout.marker_names[idx]);
    red[reduced_role_name(static_cast<ReducedRole>(r))] = std::move(names);
  }
  j["reduction_17"] = std::move(red);
  return j;
}

inline void save_layout(const fs::path& path, const MarkerLayout& layout, const BodyPartMap& map) {
  write_text_file(path, layout_to_json(layout, map).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Dataset manifest (metadata.json): subject ids, sex labels, file references.
// ---------------------------------------------------------------------------

struct SampleEntry {
  std::string sample_id;
  std::string marker_file;          // relative to dataset root
  std::optional<std::string> force_file;
};

struct SubjectEntry {
  std::string subject_id;
  Sex sex = Sex::female;
  std::vector<SampleEntry> samples;
};

struct DatasetManifest {
  std::string name;
  double frame_rate_hz = 250.0;
  double force_rate_hz = 1000.0;
  std::vector<SubjectEntry> subjects;
};

inline DatasetManifest load_manifest(const fs::path& root) {
  fs::path meta = root / "metadata.json";
  if (!fs::exists(meta)) raise(Errc::missing_metadata, "no metadata.json under " + root.string());
  json j;
  try {
    j = json::parse(read_text_file(meta));
  } catch (const json::exception& e) {
    raise(Errc::missing_metadata, meta.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.name = j.value("dataset", "");
  m.frame_rate_hz = j.value("frame_rate_hz", 250.0);
  m.force_rate_hz = j.value("force_rate_hz", 1000.0);
  if (!j.contains("subjects")) raise(Errc::missing_metadata, "metadata.json lacks 'subjects'");
  std::set<std::string> ids;
  for (const auto& js : j.at("subjects")) {
    SubjectEntry s;
    if (!js.contains("id")) raise(Errc::missing_metadata, "subject entry lacks 'id'");
    s.subject_id = js.at("id").get<std::string>();
    if (!ids.insert(s.subject_id).second)
      raise(Errc::duplicate_subject, "subject '" + s.subject_id + "' listed twice");
    if (!js.contains("sex"))
      raise(Errc::missing_metadata, "subject '" + s.subject_id + "' has no sex label");
    s.sex = sex_from_code(js.at("sex").get<std::string>());
    for (const auto& jt : js.value("samples", json::array())) {
      SampleEntry e;
      e.sample_id = jt.at("id").get<std::string>();
      e.marker_file = jt.at("markers").get<std::string>();
      if (jt.contains("forces")) e.force_file = jt.at("forces").get<std::string>();
      s.samples.push_back(std::move(e));
    }
    m.subjects.push_back(std::move(s));
  }
  return m;
}

inline void save_manifest(const fs::path& root, const DatasetManifest& m) {
  json j;
  if (!m.name.empty()) j["dataset"] = m.name;
  j["frame_rate_hz"] = m.frame_rate_hz;
  j["force_rate_hz"] = m.force_rate_hz;
  json subs = json::array();
  for (const auto& s : m.subjects) {
    json js;
    js["id"] = s.subject_id;
    js["sex"] = sex_code(s.sex);
    json samples = json::array();
    for (const auto& e : s.samples) {
      json je;
      je["id"] = e.sample_id;
      je["markers"] = e.marker_file;
      if (e.force_file) je["forces"] = *e.force_file;
      samples.push_back(std::move(je));
    }
    js["samples"] = std::move(samples);
    subs.push_back(std::move(js));
  }
  j["subjects"] = std::move(subs);
  write_text_file(root / "metadata.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Dataset load/save in the canonical on-disk format.
// ---------------------------------------------------------------------------

inline Dataset load_dataset(const fs::path& root, const fs::path& layout_file) {
  LayoutFile lf = load_layout(layout_file);
  DatasetManifest manifest = load_manifest(root);
  Dataset ds;
  ds.layout = std::move(lf.layout);
  ds.body_parts = std::move(lf.body_parts);
  for (const auto& se : manifest.subjects) {
    Subject subj;
    subj.subject_id = se.subject_id;
    subj.sex = se.sex;
    for (const auto& e : se.samples) {
      GaitSample sample;
      sample.subject_id = se.subject_id;
      sample.sample_id = e.sample_id;
      sample.frame_rate_hz = manifest.frame_rate_hz;
      sample.frames = read_marker_csv(root / e.marker_file, ds.layout);
      subj.samples.push_back(std::move(sample));
    }
    ds.subjects.push_back(std::move(subj));
  }
  return ds;
}

// Writes metadata + layout + one marker CSV per sample. frame_rate_hz is taken
// from the samples (they must agree after preprocessing).
inline void save_dataset(const Dataset& ds, const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  DatasetManifest m;
  m.frame_rate_hz = ds.subjects.empty() || ds.subjects[0].samples.empty()
                        ? 0.0
                        : ds.subjects[0].samples[0].frame_rate_hz;
  for (const auto& subj : ds.subjects) {
    SubjectEntry se;
    se.subject_id = subj.subject_id;
    se.sex = subj.sex;
    for (const auto& sample : subj.samples) {
      SampleEntry e;
      e.sample_id = sample.sample_id;
      e.marker_file = subj.subject_id + "/" + sample.sample_id + "_markers.csv";
      write_marker_csv(root / e.marker_file, sample, ds.layout);
      se.samples.push_back(std::move(e));
    }
    m.subjects.push_back(std::move(se));
  }
  save_manifest(root, m);
  save_layout(root / "layout.json", ds.layout, ds.body_parts);
}

}  // namespace gaitmask
