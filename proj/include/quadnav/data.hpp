#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/config.hpp"
#include "quadnav/csvio.hpp"
#include "quadnav/geodesy.hpp"
#include "quadnav/types.hpp"
#include "quadnav/windowing.hpp"

namespace quadnav {

inline constexpr double kStandardG = 9.80665;  // for 'g' accelerometer units

// Maps raw CSV columns onto the seven IMU channels. Each entry is either a
// header name or a 0-based column position; units are declared explicitly.
struct ColumnMap {
  std::string t = "t";
  std::string fx = "fx", fy = "fy", fz = "fz";
  std::string wx = "wx", wy = "wy", wz = "wz";
  enum class AccelUnit { mps2, g } accel_unit = AccelUnit::mps2;
  enum class GyroUnit { rads, degs } gyro_unit = GyroUnit::rads;

  static ColumnMap canonical() { return ColumnMap{}; }

  // Keys: imu.col.{t,fx,fy,fz,wx,wy,wz}, imu.units.accel = mps2|g,
  // imu.units.gyro = rads|degs. Missing keys keep the canonical schema.
  static ColumnMap from_config(const KvConfig& cfg) {
    ColumnMap m;
    m.t = cfg.get_or("imu.col.t", m.t);
    m.fx = cfg.get_or("imu.col.fx", m.fx);
    m.fy = cfg.get_or("imu.col.fy", m.fy);
    m.fz = cfg.get_or("imu.col.fz", m.fz);
    m.wx = cfg.get_or("imu.col.wx", m.wx);
    m.wy = cfg.get_or("imu.col.wy", m.wy);
    m.wz = cfg.get_or("imu.col.wz", m.wz);
    const std::string au = cfg.get_or("imu.units.accel", "mps2");
    if (au == "mps2") m.accel_unit = AccelUnit::mps2;
    else if (au == "g") m.accel_unit = AccelUnit::g;
    else throw std::runtime_error("config: imu.units.accel must be mps2 or g, got '" + au + "'");
    const std::string gu = cfg.get_or("imu.units.gyro", "rads");
    if (gu == "rads") m.gyro_unit = GyroUnit::rads;
    else if (gu == "degs") m.gyro_unit = GyroUnit::degs;
    else throw std::runtime_error("config: imu.units.gyro must be rads or degs, got '" + gu + "'");
    return m;
  }
};

enum class GtFormat { auto_detect, geodetic, ned };

inline GtFormat parse_gt_format(const std::string& s) {
  if (s == "auto") return GtFormat::auto_detect;
  if (s == "geodetic") return GtFormat::geodetic;
  if (s == "ned") return GtFormat::ned;
  throw std::runtime_error("config: gt.format must be auto, geodetic or ned, got '" + s + "'");
}

struct LoadResult {
  MimuRecording recording;
  int dropped_rows = 0;                 // NaN rows discarded across all IMU files
  std::vector<std::string> warnings;
};

namespace detail {

inline int resolve_column(const CsvTable& table, const std::string& spec,
                          const std::string& channel) {
  // integer spec = 0-based position; otherwise a header name
  if (!spec.empty() && (std::isdigit(static_cast<unsigned char>(spec[0])) ||
                        (spec[0] == '-' && spec.size() > 1))) {
    try {
      std::size_t pos = 0;
      const int idx = std::stoi(spec, &pos);
      if (pos == spec.size()) {
        if (idx < 0 || idx >= static_cast<int>(table.header.size()))
          throw std::runtime_error("column index " + spec + " for channel '" + channel +
                                   "' out of range");
        return idx;
      }
    } catch (const std::invalid_argument&) {
    }
  }
  const int idx = table.column(spec);
  if (idx < 0)
    throw std::runtime_error("column '" + spec + "' for channel '" + channel +
                             "' not found in CSV header");
  return idx;
}

inline double parse_field(const std::vector<std::string>& row, int col, const std::string& path,
                          std::size_t rowno) {
  if (col >= static_cast<int>(row.size()))
    throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": missing column " +
                             std::to_string(col));
  try {
    std::size_t pos = 0;
    const double v = std::stod(row[col], &pos);
    if (pos != row[col].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": cannot parse '" +
                             row[col] + "' as a number");
  }
}

inline ImuSequence parse_imu_csv(const std::string& path, const ColumnMap& map,
                                 int& dropped_rows) {
  const CsvTable table = read_csv(path);
  if (table.header.empty()) throw std::runtime_error(path + ": empty file");
  const int ct = resolve_column(table, map.t, "t");
  const int cols[6] = {resolve_column(table, map.fx, "fx"), resolve_column(table, map.fy, "fy"),
                       resolve_column(table, map.fz, "fz"), resolve_column(table, map.wx, "wx"),
                       resolve_column(table, map.wy, "wy"), resolve_column(table, map.wz, "wz")};
  const double accel_scale = map.accel_unit == ColumnMap::AccelUnit::g ? kStandardG : 1.0;
  const double gyro_scale = map.gyro_unit == ColumnMap::GyroUnit::degs ? M_PI / 180.0 : 1.0;

  ImuSequence seq;
  seq.samples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t rowno = r + 2;  // 1-based, counting the header line
    ImuSample s;
    s.t = parse_field(table.rows[r], ct, path, rowno);
    double v[6];
    for (int c = 0; c < 6; ++c) v[c] = parse_field(table.rows[r], cols[c], path, rowno);
    bool finite = std::isfinite(s.t);
    for (int c = 0; c < 6; ++c) finite = finite && std::isfinite(v[c]);
    if (!finite) {
      ++dropped_rows;
      continue;
    }
    s.f = Vec3(v[0], v[1], v[2]) * accel_scale;
    s.w = Vec3(v[3], v[4], v[5]) * gyro_scale;
    if (!seq.samples.empty() && s.t <= seq.samples.back().t)
      throw std::runtime_error(path + ": row " + std::to_string(rowno) +
                               ": timestamps not strictly increasing");
    seq.samples.push_back(s);
  }
  if (seq.samples.size() < 2) throw std::runtime_error(path + ": fewer than 2 usable rows");
  return seq;
}

inline GroundTruthTrack parse_gt_csv(const std::string& path, GtFormat format) {
  const CsvTable table = read_csv(path);
  if (format == GtFormat::auto_detect) {
    if (table.column("lat_deg") >= 0) format = GtFormat::geodetic;
    else if (table.column("n") >= 0) format = GtFormat::ned;
    else
      throw std::runtime_error(path + ": cannot auto-detect GT format (expect header "
                               "'t,lat_deg,lon_deg,alt_m' or 't,n,e,d')");
  }

  GroundTruthTrack gt;
  const int ct = table.column("t");
  if (ct < 0) throw std::runtime_error(path + ": GT file has no 't' column");
  if (format == GtFormat::geodetic) {
    const int cla = table.column("lat_deg"), clo = table.column("lon_deg"), cal = table.column("alt_m");
    if (cla < 0 || clo < 0 || cal < 0)
      throw std::runtime_error(path + ": geodetic GT needs lat_deg, lon_deg, alt_m columns");
    GeodeticPoint origin;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::size_t rowno = r + 2;
      GeodeticPoint p{parse_field(table.rows[r], cla, path, rowno),
                      parse_field(table.rows[r], clo, path, rowno),
                      parse_field(table.rows[r], cal, path, rowno)};
      if (r == 0) origin = p;
      GroundTruthPoint out;
      out.t = parse_field(table.rows[r], ct, path, rowno);
      out.p = geodetic_to_ned(p, origin);
      gt.points.push_back(out);
    }
  } else {
    const int cn = table.column("n"), ce = table.column("e"), cd = table.column("d");
    if (cn < 0 || ce < 0 || cd < 0)
      throw std::runtime_error(path + ": NED GT needs n, e, d columns");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::size_t rowno = r + 2;
      GroundTruthPoint out;
      out.t = parse_field(table.rows[r], ct, path, rowno);
      out.p = Vec3(parse_field(table.rows[r], cn, path, rowno),
                   parse_field(table.rows[r], ce, path, rowno),
                   parse_field(table.rows[r], cd, path, rowno));
      gt.points.push_back(out);
    }
  }
  validate(gt);
  return gt;
}

// Linear interpolation with an exact-hit fast path, so sampling a sequence at
// its own timestamps reproduces it bit-for-bit.
inline ImuSample sample_at(const ImuSequence& seq, double t, std::size_t& cursor) {
  const auto& s = seq.samples;
  while (cursor + 1 < s.size() && s[cursor + 1].t <= t + 1e-9) ++cursor;
  if (std::abs(s[cursor].t - t) < 1e-9) {
    ImuSample out = s[cursor];
    out.t = t;
    return out;
  }
  const std::size_t hi = std::min(cursor + 1, s.size() - 1);
  const auto& a = s[cursor];
  const auto& b = s[hi];
  ImuSample out;
  out.t = t;
  if (hi == cursor || b.t <= a.t) {
    out.f = a.f;
    out.w = a.w;
    return out;
  }
  const double u = (t - a.t) / (b.t - a.t);
  out.f = a.f + u * (b.f - a.f);
  out.w = a.w + u * (b.w - a.w);
  return out;
}

}  // namespace detail

// Loads one multi-IMU recording: unit normalization to SI, timestamp rebase
// to a common zero, crop to the overlapping span, and linear resampling onto
// the shared `target_rate` grid whenever the native rate or grid alignment
// differs. A static-interval sign check warns when gravity does not show on
// the same axis with the same sign across IMUs.
inline LoadResult load_recording(const std::vector<std::string>& imu_paths,
                                 const std::string& gt_path, const ColumnMap& colmap,
                                 GtFormat gt_format = GtFormat::auto_detect,
                                 const std::string& id = "",
                                 TrajectoryKind kind = TrajectoryKind::horizontal_periodic,
                                 double target_rate = 120.0) {
  if (imu_paths.empty()) throw std::invalid_argument("load_recording: no IMU files");
  LoadResult res;
  res.recording.id = id;
  res.recording.kind = kind;

  std::vector<ImuSequence> raw;
  for (const auto& p : imu_paths) raw.push_back(detail::parse_imu_csv(p, colmap, res.dropped_rows));
  GroundTruthTrack gt = detail::parse_gt_csv(gt_path, gt_format);

  // rebase every clock to the earliest stamp seen anywhere
  double t_zero = gt.points.front().t;
  for (const auto& seq : raw) t_zero = std::min(t_zero, seq.t_begin());
  for (auto& seq : raw)
    for (auto& s : seq.samples) s.t -= t_zero;
  for (auto& p : gt.points) p.t -= t_zero;

  double t_lo = 0.0, t_hi = std::numeric_limits<double>::max();
  for (const auto& seq : raw) {
    t_lo = std::max(t_lo, seq.t_begin());
    t_hi = std::min(t_hi, seq.t_end());
  }
  if (t_hi <= t_lo)
    throw std::runtime_error("load_recording: IMU files have no overlapping time span");

  const double dt = 1.0 / target_rate;
  const int count = static_cast<int>(std::floor((t_hi - t_lo) / dt + 1e-9)) + 1;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double native = (raw[i].size() - 1) / (raw[i].t_end() - raw[i].t_begin());
    if (native < 0.9 * target_rate)
      res.warnings.push_back("imu" + std::to_string(i + 1) + ": native rate " +
                             format_double(native) + " Hz is well below " +
                             format_double(target_rate) + " Hz; interpolation will smooth");
    ImuSequence grid;
    grid.rate_hz = target_rate;
    grid.samples.reserve(count);
    std::size_t cursor = 0;
    for (int j = 0; j < count; ++j)
      grid.samples.push_back(detail::sample_at(raw[i], t_lo + j * dt, cursor));
    res.recording.imus.push_back(std::move(grid));
  }
  res.recording.gt = std::move(gt);

  // axis-alignment sanity: gravity must dominate the same axis, same sign
  if (res.recording.imus.size() > 1) {
    int ref_axis = -1;
    double ref_sign = 0.0;
    for (std::size_t i = 0; i < res.recording.imus.size(); ++i) {
      const auto& seq = res.recording.imus[i];
      const std::size_t n = std::min<std::size_t>(seq.size(), static_cast<std::size_t>(target_rate));
      Vec3 mean = Vec3::Zero();
      for (std::size_t k = 0; k < n; ++k) mean += seq.samples[k].f;
      mean /= static_cast<double>(n);
      int axis = 0;
      mean.cwiseAbs().maxCoeff(&axis);
      const double sign = mean[axis] >= 0.0 ? 1.0 : -1.0;
      if (i == 0) {
        ref_axis = axis;
        ref_sign = sign;
      } else if (axis != ref_axis || sign != ref_sign) {
        res.warnings.push_back("imu" + std::to_string(i + 1) +
                               ": gravity axis/sign disagrees with imu1; check mounting");
      }
    }
  }

  validate(res.recording);
  return res;
}

// ---------------------------------------------------------------------------
// Canonical on-disk layout: one directory per trajectory holding imu<k>.csv
// (header t,fx,fy,fz,wx,wy,wz, SI units), gt.csv (t,n,e,d or geodetic), and
// meta.cfg with id/kind/rate_hz/n_imus.
// ---------------------------------------------------------------------------

inline void save_recording(const std::string& dir, const MimuRecording& rec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < rec.imus.size(); ++i) {
    CsvWriter w(dir + "/imu" + std::to_string(i + 1) + ".csv");
    w.header({"t", "fx", "fy", "fz", "wx", "wy", "wz"});
    for (const auto& s : rec.imus[i].samples)
      w.row({s.t, s.f.x(), s.f.y(), s.f.z(), s.w.x(), s.w.y(), s.w.z()});
  }
  {
    CsvWriter w(dir + "/gt.csv");
    w.header({"t", "n", "e", "d"});
    for (const auto& p : rec.gt.points) w.row({p.t, p.p.x(), p.p.y(), p.p.z()});
  }
  {
    std::ofstream meta(dir + "/meta.cfg");
    meta << "id = " << rec.id << "\n";
    meta << "kind = " << to_string(rec.kind) << "\n";
    meta << "rate_hz = " << format_double(rec.imus.front().rate_hz) << "\n";
    meta << "n_imus = " << rec.imus.size() << "\n";
  }
}

inline LoadResult load_recording_dir(const std::string& dir,
                                     const ColumnMap& colmap = ColumnMap::canonical(),
                                     GtFormat gt_format = GtFormat::auto_detect) {
  const KvConfig meta = KvConfig::parse_file(dir + "/meta.cfg");
  meta.require_known_keys({"id", "kind", "rate_hz", "n_imus"});
  const int n = static_cast<int>(meta.get_int("n_imus"));
  std::vector<std::string> paths;
  for (int i = 1; i <= n; ++i) paths.push_back(dir + "/imu" + std::to_string(i) + ".csv");
  return load_recording(paths, dir + "/gt.csv", colmap, gt_format, meta.get("id"),
                        parse_trajectory_kind(meta.get("kind")), meta.get_double("rate_hz"));
}

// Loads every trajectory directory under `dir`, sorted by name.
inline std::vector<MimuRecording> load_corpus(const std::string& dir,
                                              const ColumnMap& colmap = ColumnMap::canonical()) {
  namespace fs = std::filesystem;
  std::vector<std::string> subdirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "meta.cfg"))
      subdirs.push_back(entry.path().string());
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) throw std::runtime_error("load_corpus: no trajectory directories in '" + dir + "'");
  std::vector<MimuRecording> out;
  for (const auto& d : subdirs) out.push_back(load_recording_dir(d, colmap).recording);
  return out;
}

// ---------------------------------------------------------------------------
// Train/test splits
// ---------------------------------------------------------------------------

// D1/D2 train on IMU #1 windows only; D3/D4 on every available IMU. The test
// set is always the held-out trajectory (IMU #1 windows); multi-IMU testing
// goes through the fusion pipeline on the full recording instead.
struct SplitSpec {
  std::string id;
  TrajectoryKind axis = TrajectoryKind::horizontal_periodic;
  std::vector<int> train_imus;  // 1-based; empty = all available
  std::string test_trajectory;

  static SplitSpec standard(const std::string& name) {
    if (name == "D1") return {"D1", TrajectoryKind::horizontal_periodic, {1}, "4"};
    if (name == "D2") return {"D2", TrajectoryKind::vertical_periodic, {1}, "9"};
    if (name == "D3") return {"D3", TrajectoryKind::horizontal_periodic, {}, "4"};
    if (name == "D4") return {"D4", TrajectoryKind::vertical_periodic, {}, "9"};
    throw std::invalid_argument("unknown split '" + name + "' (expected D1..D4)");
  }
};

struct SplitResult {
  std::vector<Window> train;
  std::vector<Window> test;
  int train_trajectories = 0;
  int dropped_windows = 0;
};

inline SplitResult build_split(const SplitSpec& spec, const std::vector<MimuRecording>& corpus,
                               int window_size = 120, int stride = 120) {
  std::vector<const MimuRecording*> candidates;
  for (const auto& rec : corpus)
    if (rec.kind == spec.axis) candidates.push_back(&rec);

  const MimuRecording* test_rec = nullptr;
  for (const auto* rec : candidates)
    if (rec->id == spec.test_trajectory) test_rec = rec;
  if (!test_rec) {
    std::string avail;
    for (const auto* rec : candidates) avail += (avail.empty() ? "" : ", ") + rec->id;
    throw std::runtime_error("build_split " + spec.id + ": test trajectory '" +
                             spec.test_trajectory + "' not in corpus (available: " + avail + ")");
  }

  SplitResult out;
  for (const auto* rec : candidates) {
    if (rec->id == spec.test_trajectory) continue;
    std::vector<int> imus = spec.train_imus;
    if (imus.empty())
      for (int i = 1; i <= rec->n_imus(); ++i) imus.push_back(i);
    bool used = false;
    for (int idx : imus) {
      if (idx > rec->n_imus()) continue;  // missing IMU in this trajectory
      auto wr = make_windows(rec->imus[idx - 1], rec->gt, window_size, stride);
      out.dropped_windows += wr.dropped;
      for (auto& w : wr.windows) out.train.push_back(std::move(w));
      used = true;
    }
    if (used) ++out.train_trajectories;
  }
  auto wr = make_windows(test_rec->imus.front(), test_rec->gt, window_size, stride);
  out.dropped_windows += wr.dropped;
  out.test = std::move(wr.windows);
  return out;
}

}  // namespace quadnav
