#include "tireforce/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tireforce/model_io.hpp"  // DataError

namespace tireforce {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path);
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw DataError("bad numeric field: " + s);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_raw_dataset(const std::string& dir, const std::vector<RevolutionTrace>& traces) {
  std::filesystem::create_directories(dir);
  auto samples = open_out(dir + "/samples.csv");
  samples << "trace_id,angle_deg,ax,ay,az\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (const auto& s : traces[t].samples) {
      samples << t << ',' << format_double(s.angle_deg) << ',' << format_double(s.ax) << ','
              << format_double(s.ay) << ',' << format_double(s.az) << '\n';
    }
  }

  auto meta = open_out(dir + "/traces.csv");
  meta << "trace_id,velocity_kph,pressure_kpa,fz_cmd_n,slip_deg,torque_nm,maneuver,"
          "fx_n,fy_n,fz_n,entry_id,sample_rate_hz\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& tr = traces[t];
    meta << t << ',' << format_double(tr.condition.velocity_kph) << ','
         << format_double(tr.condition.inflation_pressure_kpa) << ','
         << format_double(tr.condition.vertical_load_n) << ','
         << format_double(tr.condition.slip_angle_deg) << ','
         << format_double(tr.condition.drive_torque_nm) << ',' << to_string(tr.condition.maneuver)
         << ',' << format_double(tr.label.fx_n) << ',' << format_double(tr.label.fy_n) << ','
         << format_double(tr.label.fz_n) << ',' << tr.entry_id << ','
         << format_double(tr.sample_rate_hz) << '\n';
  }
}

std::vector<RevolutionTrace> read_raw_dataset(const std::string& dir) {
  std::vector<RevolutionTrace> traces;
  {
    auto meta = open_in(dir + "/traces.csv");
    std::string line;
    std::getline(meta, line);  // header
    while (std::getline(meta, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() < 12) throw DataError("short row in traces.csv");
      RevolutionTrace tr;
      tr.condition.velocity_kph = parse_double(f[1]);
      tr.condition.inflation_pressure_kpa = parse_double(f[2]);
      tr.condition.vertical_load_n = parse_double(f[3]);
      tr.condition.slip_angle_deg = parse_double(f[4]);
      tr.condition.drive_torque_nm = parse_double(f[5]);
      tr.condition.maneuver = maneuver_from_string(f[6]);
      tr.label.fx_n = parse_double(f[7]);
      tr.label.fy_n = parse_double(f[8]);
      tr.label.fz_n = parse_double(f[9]);
      tr.entry_id = static_cast<std::int64_t>(parse_double(f[10]));
      tr.sample_rate_hz = parse_double(f[11]);
      traces.push_back(std::move(tr));
    }
  }
  {
    auto samples = open_in(dir + "/samples.csv");
    std::string line;
    std::getline(samples, line);
    while (std::getline(samples, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() < 5) throw DataError("short row in samples.csv");
      const auto t = static_cast<std::size_t>(std::stoull(f[0]));
      if (t >= traces.size()) throw DataError("sample row references unknown trace");
      traces[t].samples.push_back(
          {parse_double(f[1]), parse_double(f[2]), parse_double(f[3]), parse_double(f[4])});
    }
  }
  return traces;
}

void write_windows(const std::string& path, const std::vector<PatchWindow>& windows) {
  auto f = open_out(path);
  const std::size_t points = windows.empty() ? static_cast<std::size_t>(kWindowPoints)
                                             : windows.front().points();
  f << "trace_id,entry_id,maneuver,usable_fx,usable_fy,usable_fz";
  char buf[32];
  for (const char* ch : {"ax", "ay", "az"}) {
    for (std::size_t i = 0; i < points; ++i) {
      std::snprintf(buf, sizeof buf, ",%s_%03zu", ch, i);
      f << buf;
    }
  }
  f << ",velocity_kph,slip_deg,torque_nm,fx_n,fy_n,fz_n\n";
  for (const auto& w : windows) {
    const bool fx_ok = w.condition.maneuver == ManeuverKind::Driving;
    const bool fy_ok = w.condition.maneuver == ManeuverKind::Cornering;
    f << w.trace_id << ',' << w.entry_id << ',' << to_string(w.condition.maneuver) << ','
      << (fx_ok ? 1 : 0) << ',' << (fy_ok ? 1 : 0) << ",1";
    for (const auto* ch : {&w.ax, &w.ay, &w.az})
      for (double v : *ch) f << ',' << format_double(v);
    f << ',' << format_double(w.condition.velocity_kph) << ','
      << format_double(w.condition.slip_angle_deg) << ','
      << format_double(w.condition.drive_torque_nm) << ',' << format_double(w.label.fx_n) << ','
      << format_double(w.label.fy_n) << ',' << format_double(w.label.fz_n) << '\n';
  }
}

std::vector<PatchWindow> read_windows(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty windows file");
  const auto header = split_csv_line(line);
  // Channel block starts after the 6 leading columns and ends 6 before the end.
  if (header.size() < 13 || (header.size() - 12) % 3 != 0)
    throw DataError("unexpected windows header layout");
  const std::size_t points = (header.size() - 12) / 3;

  std::vector<PatchWindow> windows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw DataError("short row in windows file");
    PatchWindow w;
    w.trace_id = static_cast<std::int64_t>(std::stoll(fields[0]));
    w.entry_id = static_cast<std::int64_t>(std::stoll(fields[1]));
    w.condition.maneuver = maneuver_from_string(fields[2]);
    std::size_t k = 6;
    w.ax.resize(points);
    w.ay.resize(points);
    w.az.resize(points);
    w.angles_deg.assign(points, 0.0);
    for (auto* ch : {&w.ax, &w.ay, &w.az})
      for (auto& v : *ch) v = parse_double(fields[k++]);
    w.condition.velocity_kph = parse_double(fields[k++]);
    w.condition.slip_angle_deg = parse_double(fields[k++]);
    w.condition.drive_torque_nm = parse_double(fields[k++]);
    if (w.condition.slip_angle_deg != 0) w.condition.maneuver = ManeuverKind::Cornering;
    w.label.fx_n = parse_double(fields[k++]);
    w.label.fy_n = parse_double(fields[k++]);
    w.label.fz_n = parse_double(fields[k++]);
    w.condition.vertical_load_n = w.label.fz_n;
    windows.push_back(std::move(w));
  }
  return windows;
}

void write_plot_series(const std::string& path, const PredictionSeries& series) {
  auto f = open_out(path);
  f << "sample_index,measured_n,estimated_n\n";
  for (std::size_t i = 0; i < series.measured.size(); ++i)
    f << i << ',' << format_double(series.measured[i]) << ','
      << format_double(series.estimated[i]) << '\n';
}

void write_boxplot_csv(const std::string& path, const CvSummary& s) {
  auto f = open_out(path);
  f << "min,q1,median,q3,max,mean\n";
  f << format_double(s.min) << ',' << format_double(s.q1) << ',' << format_double(s.median) << ','
    << format_double(s.q3) << ',' << format_double(s.max) << ',' << format_double(s.mean) << '\n';
}

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history) {
  auto f = open_out(path);
  f << "epoch,train_mse,validation_mse\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    f << (i + 1) << ',' << format_double(history[i].train_mse) << ','
      << format_double(history[i].validation_mse) << '\n';
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& entries) {
  auto f = open_out(path);
  for (const auto& [k, v] : entries) f << k << '=' << v << '\n';
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  auto f = open_in(path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed manifest line: " + line);
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace tireforce
