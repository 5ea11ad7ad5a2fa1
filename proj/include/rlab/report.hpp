#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlab/battery.hpp"
#include "rlab/sources.hpp"
#include "rlab/stats.hpp"

namespace rlab {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// --- Configuration ---------------------------------------------------------

struct GroupConfig {
  std::string name;
  SourceSpec source;
  Json source_json;  // as written in the config, echoed into the report
  std::size_t samples = 1;
  std::uint64_t bits = 0;
};

struct OutputConfig {
  std::filesystem::path dir = "report";
  bool json = true;
  bool csv = true;
};

struct SuiteConfig {
  std::uint64_t base_seed = 0;
  double alpha = kDefaultAlpha;
  bool force_welch = false;  // run Welch even where normality is rejected
  unsigned threads = 0;      // 0: hardware concurrency
  std::vector<GroupConfig> groups;
  std::vector<TestId> tests;
  BatteryParams params;
  OutputConfig output;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Relative paths in the config are resolved against `base_dir`.
SuiteConfig parse_suite_config(const Json& j, const std::filesystem::path& base_dir = {});
SuiteConfig load_suite_config(const std::filesystem::path& path);

SourceSpec parse_source(const Json& j, const std::filesystem::path& base_dir = {});
std::uint64_t fnv1a64(std::string_view s) noexcept;
/// Seed of sample `index` in `group`: base ^ fnv1a64(group) ^ index ^ family.
std::uint64_t sample_seed(std::uint64_t base_seed, std::string_view group, std::uint64_t index,
                          std::uint64_t family = 0) noexcept;

// --- Report ----------------------------------------------------------------

struct SampleRecord {
  std::optional<std::uint64_t> seed;
  std::string origin;     // input file for results loaded from disk
  double metric = 0;
  bool complete = true;   // false when the primality test ran out of bits
  Json detail;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct GroupResult {
  std::string group;
  std::vector<SampleRecord> samples;
  SampleSummary summary;
  std::string normality_status;  // ok | degenerate | unavailable
  std::optional<TestVerdict> normality;

  friend bool operator==(const GroupResult&, const GroupResult&) = default;
};

struct MatrixEntry {
  std::string a;
  std::string b;
  /// exact | approx (KS); ok | skipped | degenerate | unavailable (Welch)
  std::string status;
  std::optional<TestVerdict> verdict;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Upper-triangular pairwise verdicts: one entry per unordered group pair.
struct ComparisonMatrix {
  TestId test = TestId::borel;
  Method method = Method::ks_exact;
  std::vector<MatrixEntry> entries;

  friend bool operator==(const ComparisonMatrix&, const ComparisonMatrix&) = default;
};

struct TestReport {
  TestId test = TestId::borel;
  std::vector<GroupResult> groups;
  std::vector<ComparisonMatrix> matrices;  // ks_exact, welch_t

  friend bool operator==(const TestReport&, const TestReport&) = default;
};

struct GroupInfo {
  std::string name;
  Json source;
  std::size_t samples = 0;
  std::uint64_t bits = 0;

  friend bool operator==(const GroupInfo&, const GroupInfo&) = default;
};

struct SuiteReport {
  int schema_version = kReportSchemaVersion;
  std::uint64_t base_seed = 0;
  double alpha = kDefaultAlpha;
  bool force_welch = false;
  std::vector<GroupInfo> groups;
  std::vector<TestReport> tests;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

/// Summaries, per-group Shapiro-Wilk, the KS matrix, and the Welch matrix
/// (gated on both groups passing normality unless force_welch) for one test.
TestReport analyze(TestId test, const std::vector<std::pair<std::string, std::vector<SampleRecord>>>& groups,
                   double alpha, bool force_welch);

/// Materializes every group sample, runs the selected tests, and analyzes
/// them. Deterministic for a given config.
SuiteReport run_suite(const SuiteConfig& config);

/// Builds the sample strings of one group exactly as run_suite does.
std::vector<BitString> materialize_group(const GroupConfig& group, std::uint64_t base_seed);

Json detail_to_json(const TestDetail& detail);
Json result_to_json(const TestResult& r);

Json to_json(const TestVerdict& v);
TestVerdict verdict_from_json(const Json& j);
Json to_json(const SuiteReport& r);
SuiteReport report_from_json(const Json& j);

/// Locale-independent rendering with `digits` significant digits.
std::string format_number(double v, int digits = 6);

enum class Format { json, csv };

/// Writes report.json and/or per-test CSV files into `dir`, creating it if
/// needed. Returns the paths written.
std::vector<std::filesystem::path> render(const SuiteReport& report, const std::filesystem::path& dir,
                                          const std::vector<Format>& formats);

}  // namespace rlab
