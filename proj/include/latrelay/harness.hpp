// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "latrelay/rate_regions.hpp"
#include "latrelay/relay_schemes.hpp"

namespace latrelay {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactName = "latrelay";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Configuration or domain failure with a machine-readable shape.
class RunError : public std::runtime_error {
 public:
  RunError(std::string kind, std::string field, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)), field_(std::move(field)) {}
  const std::string& kind() const noexcept { return kind_; }    // parse | validation | domain | io
  const std::string& field() const noexcept { return field_; }  // may be empty
  Json to_json() const;

 private:
  std::string kind_;
  std::string field_;
};

struct OutputSpec {
  std::optional<std::string> path;      // RunRecord JSON
  std::optional<std::string> csv_path;  // sweep matrix
  std::string format = "json";          // "csv" also writes the sweep CSV
  bool include_timing = true;           // timestamps and worker count
};

struct WzQuery {
  double P = 0, N1 = 0, N2 = 0, D = 0;
};

struct RunConfig {
  std::string command;  // rates | sweep | simulate
  ChannelParams params;
  std::string scheme = "df";
  std::uint64_t seed = 0;
  SimOptions sim;
  /// Relative offset from the theorem rate (-0.2 is 20% below) used when
  /// no explicit rate is configured.
  std::optional<double> rate_backoff;
  std::optional<double> noise_override;
  std::vector<SweepAxis> axes;
  std::optional<WzQuery> wz;
  std::vector<Json> lattices;  // descriptors to characterize
  OutputSpec output;
};

/// Strict parse: missing required fields and unknown fields both raise
/// RunError naming the field.
RunConfig parse_config(const Json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Effective configuration, defaults filled in, in fixed key order.
/// Execution-only settings (workers, output, timing) are left out.
Json config_to_json(const RunConfig& c);

/// Lattice from a descriptor {kind, dimension, scale, modulus, code_rows,
/// steps}.
Lattice lattice_from_json(const Json& d);

/// Asymptotic rate(s) the simulations back off from: R for single-message
/// schemes, (R1, R2) otherwise.  MARC uses the corner of `decoding_order`.
RatePoint theorem_rates(const std::string& scheme, const ChannelParams& p, int decoding_order);

Json report_to_json(const SimReport& r);
Json rate_point_to_json(const RatePoint& r);

/// Executes a configuration and returns the RunRecord.  Writes the sweep
/// CSV when requested; the record itself is written by `write_record`.
Json run(const RunConfig& c);
/// Two-space indented JSON followed by a newline.
std::string record_text(const Json& record);
void write_record(const RunConfig& c, const Json& record);
/// Record destination: output.path, else $LATRELAY_OUT_DIR/<command>.json,
/// else empty (stdout).
std::string record_path(const RunConfig& c);

}  // namespace latrelay
