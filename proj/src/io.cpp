#include "rqs/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rqs {

std::string format_real(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", v);
  return buffer;
}

std::string format_optional(const std::optional<double>& v) {
  return v.has_value() ? format_real(*v) : "nan";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view data) {
  char buffer[19];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buffer;
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  out << "layer,A,B,r,p_success,diagnostic\n";
  for (const LayerRecord& rec : trace.layers) {
    out << rec.layer << ',' << format_real(rec.a) << ',' << format_real(rec.b) << ','
        << format_real(rec.r) << ',' << format_real(rec.p_success) << ','
        << format_real(rec.diagnostic) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<ProbabilityRow>& rows) {
  std::ostringstream out;
  out << "point_key,eps,r,realization,seed,p_success\n";
  for (const ProbabilityRow& row : rows) {
    out << row.point_key << ',' << format_real(row.eps) << ',' << format_real(row.r) << ','
        << row.realization << ',' << row.seed << ',' << format_optional(row.p_success) << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "point_key,eps,r,n,mean_p,stderr\n";
  for (const AggregateRow& row : rows) {
    out << row.point_key << ',' << format_real(row.eps) << ',' << format_real(row.r) << ','
        << row.stats.n << ',' << format_real(row.stats.mean) << ','
        << format_optional(row.stats.standard_error) << '\n';
  }
  return out.str();
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  out << "dim,eps,r,delta,L,status\n";
  for (const ScalingRow& row : rows) {
    out << row.dim << ',' << format_real(row.eps) << ',' << format_real(row.r) << ','
        << format_real(row.delta) << ',' << (row.layers ? *row.layers : -1) << ',' << row.status
        << '\n';
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("output path not writable: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("failed writing output file: " + path.string());
  }
}

std::string manifest_json(const std::string& command, std::uint64_t master_seed,
                          const std::vector<std::pair<std::string, std::string>>& resolved_config,
                          const std::vector<EmittedFile>& files) {
  nlohmann::ordered_json manifest;
  manifest["tool"] = std::string(kToolName);
  manifest["version"] = std::string(kToolVersion);
  manifest["command"] = command;
  {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&tt, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    manifest["created_utc"] = stamp;
  }
  manifest["master_seed"] = master_seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : resolved_config) config[key] = value;
  manifest["config"] = config;
  nlohmann::ordered_json file_list = nlohmann::ordered_json::array();
  for (const EmittedFile& f : files) {
    nlohmann::ordered_json entry;
    entry["name"] = f.name;
    entry["bytes"] = f.bytes;
    entry["fnv1a64"] = f.checksum;
    file_list.push_back(entry);
  }
  manifest["files"] = file_list;
  return manifest.dump(2) + "\n";
}

}  // namespace rqs
