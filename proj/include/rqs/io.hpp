#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rqs/evolve.hpp"
#include "rqs/harness.hpp"

namespace rqs {

inline constexpr std::string_view kToolName = "rqsearch";
inline constexpr std::string_view kToolVersion = "0.1.0";

//! Fixed 17-significant-digit scientific formatting so emitted files are
//! byte-reproducible.
std::string format_real(double v);
std::string format_optional(const std::optional<double>& v);  // "nan" when absent

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

//! CSV emission. Schemas are fixed:
//!   trace:     layer,A,B,r,p_success,diagnostic
//!   sweep:     point_key,eps,r,realization,seed,p_success
//!   aggregate: point_key,eps,r,n,mean_p,stderr
//!   scaling:   dim,eps,r,delta,L,status   (L = -1 when not reached)
std::string trace_csv(const RunTrace& trace);
std::string sweep_csv(const std::vector<ProbabilityRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

void write_file(const std::filesystem::path& path, std::string_view content);

struct EmittedFile {
  std::string name;
  std::size_t bytes = 0;
  std::string checksum;  // fnv1a64 of the content
};

//! JSON manifest listing every emitted data file with its checksum,
//! alongside the fully resolved configuration.
std::string manifest_json(const std::string& command, std::uint64_t master_seed,
                          const std::vector<std::pair<std::string, std::string>>& resolved_config,
                          const std::vector<EmittedFile>& files);

}  // namespace rqs
