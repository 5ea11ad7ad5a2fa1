// rlab: generate bit strings, run the randomness battery, and compare sources.
//
// Exit codes: 0 success, 1 usage or config error, 2 data or source error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rlab/battery.hpp"
#include "rlab/errors.hpp"
#include "rlab/report.hpp"
#include "rlab/sources.hpp"

namespace {

using rlab::Json;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<rlab::Format> parse_formats(const std::string& s) {
  std::vector<rlab::Format> out;
  for (const auto& f : split_list(s)) {
    if (f == "json") {
      out.push_back(rlab::Format::json);
    } else if (f == "csv") {
      out.push_back(rlab::Format::csv);
    } else {
      throw rlab::InvalidArgument("unknown format '" + f + "' (expected json, csv)");
    }
  }
  return out;
}

std::vector<rlab::TestId> parse_tests(const std::string& s) {
  if (s.empty() || s == "all") return {std::begin(rlab::kAllTests), std::end(rlab::kAllTests)};
  std::vector<rlab::TestId> out;
  for (const auto& t : split_list(s)) out.push_back(rlab::test_id_from_string(t));
  return out;
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw rlab::IoError("cannot write " + out);
  f << text;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rlab::IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw rlab::FormatError(path + ": " + e.what());
  }
}

// --- generate --------------------------------------------------------------

struct GenerateOptions {
  std::string source = "prng";
  std::uint64_t seed = 0;
  std::uint64_t bits = 0;
  std::string deleted = "0,1";
  std::string digits_file;
  std::size_t digit_offset = 0;
  std::string pattern;
  std::string preparation = "hadamard";
  double frequency = 1.0;
  double rate = 1.0;
  std::string mode = "pure";
  std::string splitter = "hadamard";
  bool von_neumann = false;
  std::string out;
};

int run_generate(const GenerateOptions& o) {
  Json src = {{"kind", o.source}, {"seed", o.seed}};
  switch (rlab::source_kind_from_string(o.source)) {
    case rlab::SourceKind::pi_digits: {
      const auto d = split_list(o.deleted);
      if (d.size() != 2) throw rlab::InvalidArgument("--deleted-digits expects two digits, e.g. 0,1");
      src["path"] = o.digits_file;
      src["deleted"] = {std::stoi(d[0]), std::stoi(d[1])};
      src["offset"] = o.digit_offset;
      break;
    }
    case rlab::SourceKind::file:
      throw rlab::InvalidArgument("generate does not accept --source file");
    case rlab::SourceKind::qsim:
      src["preparation"] = o.preparation;
      src["frequency"] = o.frequency;
      src["rate"] = o.rate;
      src["mode"] = o.mode;
      src["splitter"] = o.splitter;
      src["von_neumann"] = o.von_neumann;
      break;
    case rlab::SourceKind::constant_pattern:
      src["pattern"] = o.pattern;
      break;
    case rlab::SourceKind::prng:
      break;
  }
  const rlab::SourceSpec spec = rlab::parse_source(src);
  const rlab::BitString x = rlab::generate(spec, o.bits);
  rlab::write_bitfile(x, o.out);
  std::cerr << "wrote " << x.size() << " bits to " << o.out << "\n";
  return 0;
}

// --- test ------------------------------------------------------------------

struct TestOptions {
  std::vector<std::string> files;
  std::string tests = "all";
  std::uint64_t window = rlab::EntropyParams{}.window;
  std::uint64_t samples = rlab::EntropyParams{}.samples;
  std::uint64_t carmichael_limit = rlab::BatteryParams{}.carmichael_limit;
  std::uint64_t bits = 0;
  std::string label;
  std::string out;
};

int run_test_cmd(const TestOptions& o) {
  const auto tests = parse_tests(o.tests);
  rlab::BatteryParams params;
  params.entropy = {o.window, o.samples};
  params.carmichael_limit = o.carmichael_limit;
  rlab::CarmichaelSet carmichaels;
  if (std::find(tests.begin(), tests.end(), rlab::TestId::primality) != tests.end()) {
    carmichaels = rlab::korselt_carmichael(params.carmichael_limit);
  }

  Json doc;
  doc["schema_version"] = rlab::kReportSchemaVersion;
  doc["label"] = o.label.empty() ? fs::path(o.files.front()).stem().string() : o.label;
  doc["files"] = Json::array();
  for (const auto& file : o.files) {
    rlab::BitString x = rlab::read_bitfile(file);
    if (o.bits > 0) {
      if (x.size() < o.bits) {
        throw rlab::InsufficientData(file + " holds " + std::to_string(x.size()) + " bits, --bits asks for " +
                                     std::to_string(o.bits));
      }
      x = x.slice(0, o.bits);
    }
    Json results = Json::array();
    for (rlab::TestId t : tests) {
      Json r;
      try {
        r = rlab::result_to_json(rlab::run_test(t, x, params, carmichaels));
        r["complete"] = true;
      } catch (const rlab::PrimalityExhausted& e) {
        std::cerr << file << ": " << e.what() << "\n";
        r = {{"test", "primality"},
             {"metric", static_cast<double>(e.partial().bits_consumed)},
             {"detail", rlab::detail_to_json(e.partial())},
             {"complete", false}};
      }
      results.push_back(std::move(r));
    }
    doc["files"].push_back({{"file", file}, {"len_bits", x.size()}, {"results", std::move(results)}});
  }
  emit(doc, o.out);
  return 0;
}

// --- suite -----------------------------------------------------------------

struct SuiteOptions {
  std::string config;
  std::string out;
  std::string format;
  double alpha = -1;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

int run_suite_cmd(const SuiteOptions& o) {
  rlab::SuiteConfig cfg = rlab::load_suite_config(o.config);
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (o.alpha >= 0) cfg.alpha = o.alpha;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.threads) cfg.threads = o.threads;
  if (!o.format.empty()) {
    const auto f = parse_formats(o.format);
    cfg.output.json = std::find(f.begin(), f.end(), rlab::Format::json) != f.end();
    cfg.output.csv = std::find(f.begin(), f.end(), rlab::Format::csv) != f.end();
  }
  cfg.validate();
  const rlab::SuiteReport report = rlab::run_suite(cfg);
  std::vector<rlab::Format> formats;
  if (cfg.output.json) formats.push_back(rlab::Format::json);
  if (cfg.output.csv) formats.push_back(rlab::Format::csv);
  for (const auto& p : rlab::render(report, cfg.output.dir, formats)) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

// --- compare ---------------------------------------------------------------

struct CompareOptions {
  std::vector<std::string> inputs;
  std::string out;
  std::string format = "json,csv";
  double alpha = rlab::kDefaultAlpha;
  bool force_welch = false;
};

int run_compare(const CompareOptions& o) {
  if (!(o.alpha > 0 && o.alpha < 1)) throw rlab::InvalidArgument("--alpha must lie in (0, 1)");
  // label -> test -> samples, both in first-seen order.
  std::vector<std::string> labels;
  std::map<std::string, std::map<rlab::TestId, std::vector<rlab::SampleRecord>>> data;
  std::vector<rlab::TestId> tests;
  for (const auto& path : o.inputs) {
    const Json doc = read_json_file(path);
    try {
      const std::string label = doc.at("label").get<std::string>();
      if (!data.contains(label)) labels.push_back(label);
      auto& per_test = data[label];
      for (const auto& f : doc.at("files")) {
        for (const auto& r : f.at("results")) {
          const rlab::TestId id = rlab::test_id_from_string(r.at("test").get<std::string>());
          if (std::find(tests.begin(), tests.end(), id) == tests.end()) tests.push_back(id);
          rlab::SampleRecord rec;
          rec.origin = f.at("file").get<std::string>();
          rec.metric = r.at("metric").get<double>();
          rec.complete = r.value("complete", true);
          rec.detail = r.at("detail");
          per_test[id].push_back(std::move(rec));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw rlab::FormatError(path + ": " + e.what());
    }
  }
  std::sort(tests.begin(), tests.end());

  rlab::SuiteReport report;
  report.alpha = o.alpha;
  report.force_welch = o.force_welch;
  for (const auto& l : labels) {
    std::size_t n = 0;
    for (const auto& [id, recs] : data[l]) n = std::max(n, recs.size());
    report.groups.push_back({l, nullptr, n, 0});
  }
  for (rlab::TestId t : tests) {
    std::vector<std::pair<std::string, std::vector<rlab::SampleRecord>>> groups;
    for (const auto& l : labels) {
      auto it = data[l].find(t);
      if (it == data[l].end() || it->second.empty()) {
        throw rlab::DataError("label '" + l + "' has no results for test " + std::string(rlab::to_string(t)));
      }
      groups.emplace_back(l, it->second);
    }
    report.tests.push_back(rlab::analyze(t, groups, o.alpha, o.force_welch));
  }
  for (const auto& p : rlab::render(report, o.out, parse_formats(o.format))) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlab: randomness test battery for binary strings"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a generated bit string to a bit file");
  g->add_option("--source", gen.source, "prng | pi_digits | qsim | constant_pattern")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("--bits", gen.bits, "Number of bits")->required();
  g->add_option("--deleted-digits", gen.deleted, "pi_digits: the two omitted digits")->capture_default_str();
  g->add_option("--digits-file", gen.digits_file, "pi_digits: decimal digit text file");
  g->add_option("--digit-offset", gen.digit_offset, "pi_digits: digits to skip first");
  g->add_option("--pattern", gen.pattern, "constant_pattern: bits to repeat, e.g. 01");
  g->add_option("--preparation", gen.preparation, "qsim: hadamard | demon")->capture_default_str();
  g->add_option("--frequency", gen.frequency, "qsim demon frequency")->capture_default_str();
  g->add_option("--rate", gen.rate, "qsim samples per unit time")->capture_default_str();
  g->add_option("--mode", gen.mode, "qsim demon mode: pure | mixed")->capture_default_str();
  g->add_option("--splitter", gen.splitter, "qsim splitter: hadamard | identity")->capture_default_str();
  g->add_flag("--von-neumann", gen.von_neumann, "qsim: debias with von Neumann extraction");
  g->add_option("--out", gen.out, "Output bit file")->required();

  TestOptions tst;
  auto* t = app.add_subcommand("test", "Run the battery on bit files and print JSON results");
  t->add_option("files", tst.files, "Bit files")->required();
  t->add_option("--tests", tst.tests, "Comma-separated tests or 'all'")->capture_default_str();
  t->add_option("--window", tst.window, "Entropy window (power of two)")->capture_default_str();
  t->add_option("--samples", tst.samples, "Entropy match samples")->capture_default_str();
  t->add_option("--carmichael-limit", tst.carmichael_limit, "Largest Carmichael number tested")->capture_default_str();
  t->add_option("--bits", tst.bits, "Use only the first N bits of each file");
  t->add_option("--label", tst.label, "Group label recorded in the output");
  t->add_option("--out", tst.out, "Output JSON file (default stdout)");

  SuiteOptions st;
  auto* s = app.add_subcommand("suite", "Run a suite config and write a report directory");
  s->add_option("config", st.config, "Suite config JSON")->required();
  s->add_option("--out", st.out, "Output directory (overrides config)");
  s->add_option("--format", st.format, "json,csv");
  s->add_option("--alpha", st.alpha, "Significance threshold");
  s->add_option("--seed", st.seed, "Base seed (overrides config)");
  s->add_option("--threads", st.threads, "Worker threads");

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Build comparison matrices from `test` outputs");
  c->add_option("inputs", cmp.inputs, "Result JSON files")->required();
  c->add_option("--out", cmp.out, "Output directory")->required();
  c->add_option("--format", cmp.format, "json,csv")->capture_default_str();
  c->add_option("--alpha", cmp.alpha, "Significance threshold")->capture_default_str();
  c->add_flag("--force-welch", cmp.force_welch, "Run Welch's t-test even when normality is rejected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*t) return run_test_cmd(tst);
    if (*s) return run_suite_cmd(st);
    if (*c) return run_compare(cmp);
  } catch (const rlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
