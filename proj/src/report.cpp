#include "rlab/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "rlab/errors.hpp"

namespace rlab {

namespace fs = std::filesystem;

// --- Config parsing --------------------------------------------------------

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const Json* find(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <class T>
T field(const Json& obj, const char* key, const std::string& path, T fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  try {
    return v->get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_fail(path + "." + key, e.what());
  }
}

template <class T>
T required(const Json& obj, const char* key, const std::string& path) {
  if (!find(obj, key)) config_fail(path + "." + key, "missing required field");
  return field<T>(obj, key, path, T{});
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

Unitary2 parse_splitter(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "hadamard") return hadamard();
    if (name == "identity") return identity_splitter();
    config_fail(path, "unknown splitter '" + name + "'");
  }
  if (!j.is_object()) config_fail(path, "expected a splitter name or parameter object");
  try {
    return make_unitary(field<double>(j, "omega", path, 0.0), field<double>(j, "alpha", path, 0.0),
                        field<double>(j, "phi", path, 0.0), field<double>(j, "beta", path, 0.0));
  } catch (const InvalidArgument& e) {
    config_fail(path, e.what());
  }
}

SourceSpec parse_source_at(const Json& j, const fs::path& base_dir, const std::string& path) {
  if (!j.is_object()) config_fail(path, "expected an object");
  SourceSpec s;
  const auto kind = required<std::string>(j, "kind", path);
  try {
    s.kind = source_kind_from_string(kind);
  } catch (const InvalidArgument& e) {
    config_fail(path + ".kind", e.what());
  }
  s.seed = field<std::uint64_t>(j, "seed", path, 0);
  switch (s.kind) {
    case SourceKind::prng:
      break;
    case SourceKind::pi_digits: {
      s.digits_path = resolve(required<std::string>(j, "path", path), base_dir);
      if (find(j, "deleted")) {
        const auto v = field<std::vector<int>>(j, "deleted", path, {});
        if (v.size() != 2 || v[0] < 0 || v[0] > 9 || v[1] < 0 || v[1] > 9 || v[0] == v[1]) {
          config_fail(path + ".deleted", "expected two distinct digits in [0, 9]");
        }
        s.deleted = DigitPair{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1])};
      }
      s.digit_offset = field<std::size_t>(j, "offset", path, 0);
      break;
    }
    case SourceKind::file:
      s.file_path = resolve(required<std::string>(j, "path", path), base_dir);
      break;
    case SourceKind::qsim: {
      auto& q = s.qsim;
      const auto prep = field<std::string>(j, "preparation", path, "hadamard");
      if (prep == "hadamard") {
        q.preparation = QsimParams::Preparation::hadamard;
      } else if (prep == "demon") {
        q.preparation = QsimParams::Preparation::demon;
      } else {
        config_fail(path + ".preparation", "expected 'hadamard' or 'demon'");
      }
      q.frequency = field<double>(j, "frequency", path, 1.0);
      q.rate = field<double>(j, "rate", path, 1.0);
      const auto mode = field<std::string>(j, "mode", path, "pure");
      if (mode == "pure") {
        q.mode = DemonMode::pure;
      } else if (mode == "mixed") {
        q.mode = DemonMode::mixed;
      } else {
        config_fail(path + ".mode", "expected 'pure' or 'mixed'");
      }
      if (const Json* sp = find(j, "splitter")) q.splitter = parse_splitter(*sp, path + ".splitter");
      q.von_neumann = field<bool>(j, "von_neumann", path, false);
      break;
    }
    case SourceKind::constant_pattern:
      try {
        s.pattern = BitString::from_string(required<std::string>(j, "pattern", path));
      } catch (const InvalidArgument& e) {
        config_fail(path + ".pattern", e.what());
      }
      break;
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    config_fail(path, e.what());
  }
  return s;
}

void parse_tests(const Json& j, SuiteConfig& cfg, const std::string& path) {
  auto add = [&](const std::string& name, const std::string& where) {
    TestId id;
    try {
      id = test_id_from_string(name);
    } catch (const InvalidArgument& e) {
      config_fail(where, e.what());
    }
    if (std::find(cfg.tests.begin(), cfg.tests.end(), id) != cfg.tests.end()) config_fail(where, "duplicate test");
    cfg.tests.push_back(id);
    return id;
  };
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string where = path + "[" + std::to_string(i) + "]";
      if (!j[i].is_string()) config_fail(where, "expected a test name");
      add(j[i].get<std::string>(), where);
    }
    return;
  }
  if (!j.is_object()) config_fail(path, "expected an array of test names or an object of test parameters");
  for (const auto& [name, params] : j.items()) {
    const std::string where = path + "." + name;
    const TestId id = add(name, where);
    if (!params.is_object() && !params.is_null()) config_fail(where, "expected a parameter object");
    if (params.is_null()) continue;
    if (id == TestId::entropy) {
      cfg.params.entropy.window = field<std::uint64_t>(params, "window", where, cfg.params.entropy.window);
      cfg.params.entropy.samples = field<std::uint64_t>(params, "samples", where, cfg.params.entropy.samples);
    } else if (id == TestId::primality) {
      cfg.params.carmichael_limit =
          field<std::uint64_t>(params, "carmichael_limit", where, cfg.params.carmichael_limit);
    }
  }
}

}  // namespace

SourceSpec parse_source(const Json& j, const fs::path& base_dir) { return parse_source_at(j, base_dir, "source"); }

SuiteConfig parse_suite_config(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) config_fail("$", "config must be a JSON object");
  SuiteConfig cfg;
  cfg.base_seed = field<std::uint64_t>(j, "base_seed", "$", 0);
  cfg.alpha = field<double>(j, "alpha", "$", kDefaultAlpha);
  cfg.force_welch = field<bool>(j, "force_welch", "$", false);
  cfg.threads = field<unsigned>(j, "threads", "$", 0);

  const Json* groups = find(j, "groups");
  if (!groups || !groups->is_array()) config_fail("$.groups", "expected an array of groups");
  for (std::size_t i = 0; i < groups->size(); ++i) {
    const Json& g = (*groups)[i];
    const std::string path = "$.groups[" + std::to_string(i) + "]";
    if (!g.is_object()) config_fail(path, "expected an object");
    GroupConfig gc;
    gc.name = required<std::string>(g, "name", path);
    const Json* src = find(g, "source");
    if (!src) config_fail(path + ".source", "missing required field");
    gc.source = parse_source_at(*src, base_dir, path + ".source");
    gc.source_json = *src;
    gc.samples = field<std::size_t>(g, "samples", path, 1);
    gc.bits = required<std::uint64_t>(g, "bits", path);
    cfg.groups.push_back(std::move(gc));
  }

  if (const Json* tests = find(j, "tests")) parse_tests(*tests, cfg, "$.tests");

  if (const Json* out = find(j, "output")) {
    if (!out->is_object()) config_fail("$.output", "expected an object");
    cfg.output.dir = resolve(field<std::string>(*out, "dir", "$.output", "report"), base_dir);
    if (find(*out, "formats")) {
      const auto names = field<std::vector<std::string>>(*out, "formats", "$.output", {});
      cfg.output.json = cfg.output.csv = false;
      for (const auto& n : names) {
        if (n == "json") {
          cfg.output.json = true;
        } else if (n == "csv") {
          cfg.output.csv = true;
        } else {
          config_fail("$.output.formats", "unknown format '" + n + "'");
        }
      }
    }
  }
  cfg.validate();
  return cfg;
}

SuiteConfig load_suite_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_suite_config(j, path.parent_path());
}

void SuiteConfig::validate() const {
  if (!(alpha > 0 && alpha < 1)) config_fail("$.alpha", "must lie in (0, 1)");
  if (groups.empty()) config_fail("$.groups", "at least one group is required");
  std::set<std::string> names;
  std::uint64_t needed = 1;
  for (TestId t : tests) needed = std::max(needed, min_length(t, params));
  if (std::find(tests.begin(), tests.end(), TestId::entropy) != tests.end()) {
    const auto w = params.entropy.window;
    if (w < 2 || (w & (w - 1)) != 0) config_fail("$.tests.entropy.window", "must be a power of two >= 2");
    if (params.entropy.samples == 0) config_fail("$.tests.entropy.samples", "must be positive");
  }
  if (std::find(tests.begin(), tests.end(), TestId::primality) != tests.end() &&
      (params.carmichael_limit < 561 || params.carmichael_limit > kMaxCarmichaelLimit)) {
    config_fail("$.tests.primality.carmichael_limit",
                "must lie in [561, " + std::to_string(kMaxCarmichaelLimit) + "]");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const std::string path = "$.groups[" + std::to_string(i) + "]";
    if (g.name.empty()) config_fail(path + ".name", "must be non-empty");
    if (g.name.find_first_of(",\"\r\n") != std::string::npos) {
      config_fail(path + ".name", "must not contain commas, quotes or line breaks");
    }
    if (!names.insert(g.name).second) config_fail(path + ".name", "duplicate group name '" + g.name + "'");
    if (g.samples < 1) config_fail(path + ".samples", "must be >= 1");
    if (g.bits < needed) {
      config_fail(path + ".bits", std::to_string(g.bits) + " is below the " + std::to_string(needed) +
                                      " bits required by the selected tests");
    }
  }
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::string_view group, std::uint64_t index,
                          std::uint64_t family) noexcept {
  return base_seed ^ fnv1a64(group) ^ index ^ family;
}

// --- Materialization -------------------------------------------------------

std::vector<BitString> materialize_group(const GroupConfig& group, std::uint64_t base_seed) {
  std::vector<BitString> out;
  out.reserve(group.samples);
  const SourceSpec& src = group.source;
  switch (src.kind) {
    case SourceKind::pi_digits: {
      // Samples take consecutive stretches of the digit stream.
      const DigitStream digits = read_digit_file(src.digits_path);
      std::size_t offset = src.digit_offset;
      for (std::size_t i = 0; i < group.samples; ++i) {
        const DigitPair pair = src.deleted.value_or(kPiDeletedPairs[i % kPiDeletedPairs.size()]);
        auto ex = pi_extract_from(digits, pair, group.bits, offset);
        offset += ex.digits_consumed;
        out.push_back(std::move(ex.bits));
      }
      break;
    }
    case SourceKind::file: {
      const BitString all = read_bitfile(src.file_path);
      for (std::size_t i = 0; i < group.samples; ++i) {
        if (all.size() / group.bits <= i) {
          throw InsufficientData(src.file_path.string() + " holds " + std::to_string(all.size()) +
                                 " bits, not enough for sample " + std::to_string(i));
        }
        out.push_back(all.slice(i * group.bits, group.bits));
      }
      break;
    }
    default:
      for (std::size_t i = 0; i < group.samples; ++i) {
        SourceSpec s = src;
        s.seed = sample_seed(base_seed, group.name, i, src.seed);
        out.push_back(generate(s, group.bits));
      }
  }
  return out;
}

// --- Analysis --------------------------------------------------------------

TestReport analyze(TestId test, const std::vector<std::pair<std::string, std::vector<SampleRecord>>>& groups,
                   double alpha, bool force_welch) {
  TestReport rep;
  rep.test = test;
  std::vector<std::vector<double>> metrics;
  for (const auto& [name, samples] : groups) {
    GroupResult g;
    g.group = name;
    g.samples = samples;
    std::vector<double> m;
    for (const auto& s : samples) m.push_back(s.metric);
    g.summary = summarize(m);
    if (m.size() < kShapiroWilkMinN || m.size() > kShapiroWilkMaxN) {
      g.normality_status = "unavailable";
    } else {
      try {
        g.normality = shapiro_wilk(m, alpha);
        g.normality_status = "ok";
      } catch (const DegenerateSample&) {
        g.normality_status = "degenerate";
      }
    }
    metrics.push_back(std::move(m));
    rep.groups.push_back(std::move(g));
  }

  ComparisonMatrix ks{test, Method::ks_exact, {}};
  ComparisonMatrix welch{test, Method::welch_t, {}};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const std::string& a = groups[i].first;
      const std::string& b = groups[j].first;
      const TestVerdict v = ks_two_sample(metrics[i], metrics[j], alpha);
      ks.entries.push_back({a, b, v.approximate ? "approx" : "exact", v});

      MatrixEntry e{a, b, "skipped", std::nullopt};
      const auto normal = [&](const GroupResult& g) { return g.normality && !g.normality->significant; };
      if (force_welch || (normal(rep.groups[i]) && normal(rep.groups[j]))) {
        if (metrics[i].size() < 2 || metrics[j].size() < 2) {
          e.status = "unavailable";
        } else {
          try {
            e.verdict = welch_t(metrics[i], metrics[j], alpha);
            e.status = "ok";
          } catch (const DegenerateSample&) {
            e.status = "degenerate";
          }
        }
      }
      welch.entries.push_back(std::move(e));
    }
  }
  rep.matrices.push_back(std::move(ks));
  rep.matrices.push_back(std::move(welch));
  return rep;
}

// --- Suite -----------------------------------------------------------------

namespace {

SampleRecord run_one(TestId id, const BitString& x, const BatteryParams& params, const CarmichaelSet& carmichaels,
                     std::uint64_t seed) {
  SampleRecord rec;
  rec.seed = seed;
  try {
    const TestResult r = run_test(id, x, params, carmichaels);
    rec.metric = r.metric;
    rec.detail = detail_to_json(r.detail);
  } catch (const PrimalityExhausted& e) {
    // Censored observation: every available bit was spent.
    rec.metric = static_cast<double>(e.partial().bits_consumed);
    rec.complete = false;
    rec.detail = detail_to_json(e.partial());
  }
  return rec;
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();

  CarmichaelSet carmichaels;
  if (std::find(config.tests.begin(), config.tests.end(), TestId::primality) != config.tests.end()) {
    carmichaels = korselt_carmichael(config.params.carmichael_limit);
  }

  struct Job {
    std::size_t group;
    std::size_t sample;
  };
  std::vector<Job> jobs;
  // results[group][sample][test]
  std::vector<std::vector<std::vector<SampleRecord>>> results(config.groups.size());
  // Digit and file sources are sliced sequentially, so they are built up front.
  std::vector<std::vector<BitString>> prebuilt(config.groups.size());
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const auto& gc = config.groups[g];
    results[g].resize(gc.samples);
    if (gc.source.kind == SourceKind::pi_digits || gc.source.kind == SourceKind::file) {
      try {
        prebuilt[g] = materialize_group(gc, config.base_seed);
      } catch (const std::exception& e) {
        throw DataError("group '" + gc.name + "': " + e.what());
      }
    }
    for (std::size_t i = 0; i < gc.samples; ++i) jobs.push_back({g, i});
  }

  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const auto [g, i] = jobs[k];
      const auto& gc = config.groups[g];
      try {
        const std::uint64_t seed = sample_seed(config.base_seed, gc.name, i, gc.source.seed);
        BitString generated;
        const BitString* x = nullptr;
        if (!prebuilt[g].empty()) {
          x = &prebuilt[g][i];
        } else {
          SourceSpec s = gc.source;
          s.seed = seed;
          generated = generate(s, gc.bits);
          x = &generated;
        }
        auto& slot = results[g][i];
        for (TestId t : config.tests) slot.push_back(run_one(t, *x, config.params, carmichaels, seed));
        if (!prebuilt[g].empty()) {
          for (auto& r : slot) r.seed.reset();
        }
      } catch (const std::exception& e) {
        try {
          throw DataError("group '" + gc.name + "' sample " + std::to_string(i) + ": " + e.what());
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    }
  };
  unsigned n_threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(jobs.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SuiteReport rep;
  rep.base_seed = config.base_seed;
  rep.alpha = config.alpha;
  rep.force_welch = config.force_welch;
  for (const auto& gc : config.groups) rep.groups.push_back({gc.name, gc.source_json, gc.samples, gc.bits});
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    std::vector<std::pair<std::string, std::vector<SampleRecord>>> per_group;
    for (std::size_t g = 0; g < config.groups.size(); ++g) {
      std::vector<SampleRecord> recs;
      for (const auto& sample : results[g]) recs.push_back(sample[t]);
      per_group.emplace_back(config.groups[g].name, std::move(recs));
    }
    rep.tests.push_back(analyze(config.tests[t], per_group, config.alpha, config.force_welch));
  }
  return rep;
}

// --- JSON ------------------------------------------------------------------

Json detail_to_json(const TestDetail& detail) {
  struct Visitor {
    Json operator()(const BorelDetail& d) const {
      Json levels = Json::array();
      for (const auto& l : d.levels) {
        levels.push_back({{"m", l.m},
                          {"blocks", l.blocks},
                          {"counts", l.counts},
                          {"max_count", l.max_count},
                          {"min_count", l.min_count},
                          {"max_deviation", l.max_deviation},
                          {"pass", l.pass}});
      }
      return {{"m_max", d.m_max}, {"bound", d.bound}, {"pass", d.pass}, {"levels", std::move(levels)}};
    }
    Json operator()(const EntropyDetail& d) const {
      return {{"window", d.window}, {"samples", d.samples}, {"match_sum", d.match_sum}};
    }
    Json operator()(const BookStackDetail& d) const {
      return {{"bytes", d.bytes}, {"ones_before", d.ones_before}, {"ones_after", d.ones_after}, {"diff", d.diff}};
    }
    Json operator()(const PrimalityDetail& d) const {
      return {{"numbers", d.numbers},
              {"rounds", d.rounds},
              {"survivors", d.survivors},
              {"bits_consumed", d.bits_consumed},
              {"complete", d.complete}};
    }
    Json operator()(const WalkDetail& d) const { return {{"steps", d.steps}, {"max", d.max}, {"min", d.min}}; }
  };
  return std::visit(Visitor{}, detail);
}

Json result_to_json(const TestResult& r) {
  return {{"test", std::string(to_string(r.id))}, {"metric", r.metric}, {"detail", detail_to_json(r.detail)}};
}

Json to_json(const TestVerdict& v) {
  Json j = {{"method", std::string(to_string(v.method))},
            {"statistic", v.statistic},
            {"p_value", v.p_value},
            {"significant", v.significant},
            {"approximate", v.approximate}};
  if (v.df) j["df"] = *v.df;
  return j;
}

TestVerdict verdict_from_json(const Json& j) {
  TestVerdict v;
  v.method = method_from_string(j.at("method").get<std::string>());
  v.statistic = j.at("statistic").get<double>();
  v.p_value = j.at("p_value").get<double>();
  v.significant = j.at("significant").get<bool>();
  v.approximate = j.at("approximate").get<bool>();
  if (j.contains("df")) v.df = j.at("df").get<double>();
  return v;
}

namespace {

Json summary_json(const std::string& group, const SampleSummary& s) {
  return {{"group", group}, {"n", s.n},       {"min", s.min},   {"q1", s.q1}, {"median", s.median},
          {"q3", s.q3},     {"max", s.max},   {"mean", s.mean}, {"sd", s.sd}};
}

SampleSummary summary_from_json(const Json& j) {
  SampleSummary s;
  s.n = j.at("n").get<std::size_t>();
  s.min = j.at("min").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.median = j.at("median").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.max = j.at("max").get<double>();
  s.mean = j.at("mean").get<double>();
  s.sd = j.at("sd").get<double>();
  return s;
}

Json optional_verdict(const std::optional<TestVerdict>& v) { return v ? to_json(*v) : Json(nullptr); }

std::optional<TestVerdict> optional_verdict_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return verdict_from_json(j);
}

}  // namespace

Json to_json(const SuiteReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["base_seed"] = r.base_seed;
  j["alpha"] = r.alpha;
  j["force_welch"] = r.force_welch;
  j["groups"] = Json::array();
  for (const auto& g : r.groups) {
    j["groups"].push_back({{"name", g.name}, {"source", g.source}, {"samples", g.samples}, {"bits", g.bits}});
  }
  j["tests"] = Json::array();
  for (const auto& t : r.tests) {
    Json tj;
    tj["test"] = std::string(to_string(t.test));
    tj["groups"] = Json::array();
    for (const auto& g : t.groups) {
      Json samples = Json::array();
      for (const auto& s : g.samples) {
        Json sj;
        sj["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
        if (!s.origin.empty()) sj["origin"] = s.origin;
        sj["metric"] = s.metric;
        sj["complete"] = s.complete;
        sj["detail"] = s.detail;
        samples.push_back(std::move(sj));
      }
      tj["groups"].push_back({{"group", g.group},
                              {"summary", summary_json(g.group, g.summary)},
                              {"normality_status", g.normality_status},
                              {"normality", optional_verdict(g.normality)},
                              {"samples", std::move(samples)}});
    }
    tj["matrices"] = Json::array();
    for (const auto& m : t.matrices) {
      Json entries = Json::array();
      for (const auto& e : m.entries) {
        entries.push_back({{"a", e.a}, {"b", e.b}, {"status", e.status}, {"verdict", optional_verdict(e.verdict)}});
      }
      tj["matrices"].push_back({{"method", std::string(to_string(m.method))}, {"entries", std::move(entries)}});
    }
    j["tests"].push_back(std::move(tj));
  }
  return j;
}

SuiteReport report_from_json(const Json& j) {
  try {
    SuiteReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw FormatError("unsupported report schema version " + std::to_string(r.schema_version));
    }
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.alpha = j.at("alpha").get<double>();
    r.force_welch = j.at("force_welch").get<bool>();
    for (const auto& g : j.at("groups")) {
      r.groups.push_back({g.at("name").get<std::string>(), g.at("source"), g.at("samples").get<std::size_t>(),
                          g.at("bits").get<std::uint64_t>()});
    }
    for (const auto& tj : j.at("tests")) {
      TestReport t;
      t.test = test_id_from_string(tj.at("test").get<std::string>());
      for (const auto& gj : tj.at("groups")) {
        GroupResult g;
        g.group = gj.at("group").get<std::string>();
        g.summary = summary_from_json(gj.at("summary"));
        g.normality_status = gj.at("normality_status").get<std::string>();
        g.normality = optional_verdict_from(gj.at("normality"));
        for (const auto& sj : gj.at("samples")) {
          SampleRecord s;
          if (!sj.at("seed").is_null()) s.seed = sj.at("seed").get<std::uint64_t>();
          if (sj.contains("origin")) s.origin = sj.at("origin").get<std::string>();
          s.metric = sj.at("metric").get<double>();
          s.complete = sj.at("complete").get<bool>();
          s.detail = sj.at("detail");
          g.samples.push_back(std::move(s));
        }
        t.groups.push_back(std::move(g));
      }
      for (const auto& mj : tj.at("matrices")) {
        ComparisonMatrix m;
        m.test = t.test;
        m.method = method_from_string(mj.at("method").get<std::string>());
        for (const auto& ej : mj.at("entries")) {
          m.entries.push_back({ej.at("a").get<std::string>(), ej.at("b").get<std::string>(),
                               ej.at("status").get<std::string>(), optional_verdict_from(ej.at("verdict"))});
        }
        t.matrices.push_back(std::move(m));
      }
      r.tests.push_back(std::move(t));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

// --- Rendering -------------------------------------------------------------

std::string format_number(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

namespace {

// Six significant digits, widened only when rounding would move the value
// across alpha and so contradict the significance flag.
std::string format_p_value(double p, double alpha) {
  for (int digits = 6; digits < 17; ++digits) {
    const std::string s = format_number(p, digits);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if ((back < alpha) == (p < alpha)) return s;
  }
  return format_number(p, 17);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace

std::vector<fs::path> render(const SuiteReport& report, const fs::path& dir, const std::vector<Format>& formats) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  const auto wants = [&](Format f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };

  if (wants(Format::json)) {
    const fs::path p = dir / "report.json";
    write_text(p, to_json(report).dump(2) + "\n");
    written.push_back(p);
  }
  if (wants(Format::csv)) {
    for (const auto& t : report.tests) {
      const std::string test = std::string(to_string(t.test));
      std::string summary = "group,min,q1,median,q3,max,mean,sd\n";
      for (const auto& g : t.groups) {
        const auto& s = g.summary;
        summary += g.group;
        for (double v : {s.min, s.q1, s.median, s.q3, s.max, s.mean, s.sd}) summary += "," + format_number(v);
        summary += "\n";
      }
      written.push_back(dir / (test + "_summary.csv"));
      write_text(written.back(), summary);

      std::string sw = "group,statistic,p_value,significant,status\n";
      for (const auto& g : t.groups) {
        sw += g.group + ",";
        if (g.normality) {
          sw += format_number(g.normality->statistic) + "," + format_p_value(g.normality->p_value, report.alpha) +
                "," + (g.normality->significant ? "true" : "false");
        } else {
          sw += ",,";
        }
        sw += "," + g.normality_status + "\n";
      }
      written.push_back(dir / (test + "_shapiro_wilk.csv"));
      write_text(written.back(), sw);

      for (const auto& m : t.matrices) {
        std::string csv = "group_a,group_b,statistic,p_value,significant,status\n";
        for (const auto& e : m.entries) {
          csv += e.a + "," + e.b + ",";
          if (e.verdict) {
            csv += format_number(e.verdict->statistic) + "," + format_p_value(e.verdict->p_value, report.alpha) +
                   "," + (e.verdict->significant ? "true" : "false");
          } else {
            csv += ",,";
          }
          csv += "," + e.status + "\n";
        }
        written.push_back(dir / (test + "_" + std::string(to_string(m.method)) + ".csv"));
        write_text(written.back(), csv);
      }
    }
  }
  return written;
}

}  // namespace rlab
