#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hyperlab/errors.hpp"
#include "hyperlab/harness.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kMathFailure = 1;
constexpr int kBadInput = 2;
constexpr int kIoFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace hyperlab;

  CLI::App app{"Verification suites for hyperbolic group constructions"};
  app.require_subcommand(1);
  auto* check = app.add_subcommand("check", "Run a verification suite");

  std::string config_path;
  std::string suite, group, metric, p, element, format, out;
  double scale = 0, K = 0, C = 0;
  int radius = 0, depth = 0, truncation = 0, lookup_radius = 0, window = 0, elements = 0;
  std::uint64_t seed = 0, max_pairs = 0;
  std::size_t max_ball = 0;
  bool timing = false;

  check->add_option("--config", config_path, "Flat key=value file; flags override it");
  auto* o_suite = check->add_option("--suite", suite, "strong-hyp, green, cocycle, properness, boundary, kms or all");
  auto* o_group = check->add_option("--group", group, "free:k, surface:g, modular or file:<path>");
  auto* o_metric = check->add_option("--metric", metric, "word or green");
  auto* o_scale = check->add_option("--scale", scale, "Word metric scale");
  auto* o_radius = check->add_option("--radius", radius, "Ball radius");
  auto* o_K = check->add_option("--K", K, "Delta centre K");
  auto* o_C = check->add_option("--C", C, "Delta half-width C (defaults to the rough constant)");
  auto* o_p = check->add_option("--p", p, "Exponent, comma list, or grid");
  auto* o_depth = check->add_option("--depth", depth, "Cylinder depth");
  auto* o_seed = check->add_option("--seed", seed, "Seed for sampled families");
  auto* o_g = check->add_option("--g", element, "Single element for the cocycle suite");
  auto* o_trunc = check->add_option("--truncation", truncation, "Green metric truncation radius");
  auto* o_lookup = check->add_option("--lookup-radius", lookup_radius, "Word length range for small cancellation");
  auto* o_window = check->add_option("--window", window, "Delta window radius of the cocycle suite");
  auto* o_elements = check->add_option("--elements", elements, "Element ball radius of the cocycle suite");
  auto* o_max_ball = check->add_option("--max-ball", max_ball, "Cap on ball sizes");
  auto* o_max_pairs = check->add_option("--max-pairs", max_pairs, "Cap on pair counts");
  auto* o_format = check->add_option("--format", format, "json or csv");
  auto* o_out = check->add_option("--out", out, "Report file (default stdout)");
  auto* o_timing = check->add_flag("--timing", timing, "Include wall-clock durations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kBadInput;
  }

  ScenarioConfig cfg;
  ScenarioReport report;
  try {
    if (!config_path.empty()) load_config_file(cfg, config_path);
    auto set = [&](CLI::Option* opt, const char* key, const std::string& value) {
      if (opt->count() > 0) apply_setting(cfg, key, value);
    };
    auto num = [](auto v) {
      std::ostringstream s;
      s.precision(17);
      s << v;
      return s.str();
    };
    set(o_suite, "suite", suite);
    set(o_group, "group", group);
    set(o_metric, "metric", metric);
    set(o_scale, "scale", num(scale));
    set(o_radius, "radius", num(radius));
    set(o_K, "K", num(K));
    set(o_C, "C", num(C));
    set(o_p, "p", p);
    set(o_depth, "depth", num(depth));
    set(o_seed, "seed", num(seed));
    set(o_g, "g", element);
    set(o_trunc, "truncation", num(truncation));
    set(o_lookup, "lookup_radius", num(lookup_radius));
    set(o_window, "window", num(window));
    set(o_elements, "elements", num(elements));
    set(o_max_ball, "max_ball", num(max_ball));
    set(o_max_pairs, "max_pairs", num(max_pairs));
    set(o_format, "format", format);
    set(o_out, "out", out);
    if (o_timing->count() > 0) cfg.timing = timing;
    report = run_scenario(cfg);
  } catch (const IoError& e) {
    std::cerr << "hyperlab: " << e.what() << '\n';
    return kIoFailure;
  } catch (const InputError& e) {
    std::cerr << "hyperlab: invalid input: " << e.what() << '\n';
    return kBadInput;
  } catch (const UnsupportedError& e) {
    std::cerr << "hyperlab: unsupported: " << e.what() << '\n';
    return kBadInput;
  } catch (const ResourceError& e) {
    std::cerr << "hyperlab: resource cap: " << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "hyperlab: check failed: " << e.what() << '\n';
    return kMathFailure;
  }

  try {
    if (cfg.out.empty()) {
      emit_report(report, cfg.format, std::cout);
      std::cout.flush();
      if (!std::cout) throw IoError("failed to write to stdout");
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw IoError("cannot open " + cfg.out + " for writing");
      emit_report(report, cfg.format, file);
      file.close();
      if (!file) throw IoError("failed to write " + cfg.out);
    }
  } catch (const IoError& e) {
    std::cerr << "hyperlab: " << e.what() << '\n';
    return kIoFailure;
  }

  for (const auto& s : report.suites) {
    for (const auto& c : s.checks) {
      if (!c.passed) std::cerr << "hyperlab: " << s.suite << '/' << c.name << " failed: " << c.witness.value_or("") << '\n';
    }
  }
  return exit_code(report) == 0 ? kPass : kMathFailure;
}
