// cyclekit command-line front end.
//
// Exit codes: 0 ok, 1 input or usage error, 2 reduction failure,
// 3 not oscillatory (or eps above the weak-nonlinearity limit under
// --eps-policy strict).

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cyclekit/cyclekit.hpp"

namespace fs = std::filesystem;
using cyclekit::Rational;
using cyclekit::io::json;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kReductionError = 2, kNotOscillatory = 3 };

struct SourceOptions {
  std::string input;
  std::string model;
  std::vector<std::string> params;
  std::string fixed_point;
  std::string box;
  std::optional<std::uint64_t> seed;
};

struct Resolved {
  cyclekit::Analysis analysis;
  json source;
  std::vector<std::string> notes;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cyclekit::InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

cyclekit::Params parse_params(const std::vector<std::string>& raw) {
  cyclekit::Params p;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw cyclekit::InputError("--param expects key=value, got '" + kv + "'");
    }
    p[kv.substr(0, eq)] = cyclekit::parse_rational(kv.substr(eq + 1));
  }
  return p;
}

cyclekit::FixedPoint<Rational> parse_fixed_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw cyclekit::InputError("--fixed-point expects \"x,y\"");
  return {cyclekit::parse_rational(parts[0]), cyclekit::parse_rational(parts[1]), true};
}

cyclekit::SearchBox parse_box(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw cyclekit::InputError("--box expects \"xmin,xmax,ymin,ymax\"");
  cyclekit::SearchBox b;
  b.x_min = cyclekit::to_double(cyclekit::parse_rational(parts[0]));
  b.x_max = cyclekit::to_double(cyclekit::parse_rational(parts[1]));
  b.y_min = cyclekit::to_double(cyclekit::parse_rational(parts[2]));
  b.y_max = cyclekit::to_double(cyclekit::parse_rational(parts[3]));
  if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) throw cyclekit::InputError("--box is empty");
  return b;
}

/// A user-supplied point counts as exact only when it zeroes both
/// right-hand sides; otherwise the reduction tolerates a tiny A00.
cyclekit::FixedPoint<Rational> checked_point(const cyclekit::KineticSystem<Rational>& sys,
                                             cyclekit::FixedPoint<Rational> fp) {
  fp.exact = sys.rhs_first().evaluate(fp.x, fp.y).is_zero() &&
             sys.rhs_second().evaluate(fp.x, fp.y).is_zero();
  return fp;
}

/// First fixed point that is not a saddle, falling back to the first found.
cyclekit::FixedPoint<Rational> search_fixed_point(const cyclekit::KineticSystem<Rational>& sys,
                                                  const SourceOptions& opt,
                                                  std::vector<std::string>& notes) {
  const cyclekit::SearchBox box = opt.box.empty() ? cyclekit::SearchBox{} : parse_box(opt.box);
  const auto found = cyclekit::find_fixed_points(sys, box, 9, opt.seed);
  if (found.empty()) throw cyclekit::NoFixedPointFound("no fixed point inside the search box");
  const cyclekit::FixedPointInfo* pick = &found.front();
  for (const auto& fp : found) {
    if (fp.kind != cyclekit::FixedPointKind::Saddle) {
      pick = &fp;
      break;
    }
  }
  notes.push_back("fixed point located numerically (" + std::to_string(found.size()) +
                  " found, chose " + cyclekit::to_string(pick->kind) + ")");
  return pick->exact;
}

Resolved resolve(const SourceOptions& opt) {
  if (opt.input.empty() == opt.model.empty()) {
    throw cyclekit::InputError("exactly one of --input or --model is required");
  }
  Resolved r;
  if (!opt.model.empty()) {
    const cyclekit::ModelInstance m = cyclekit::build_model(opt.model, parse_params(opt.params));
    json params = json::object();
    for (const auto& [k, v] : m.params) params[k] = cyclekit::io::exact(v);
    r.source = {{"model", m.name}, {"params", params}};
    r.notes = m.notes;
    const auto fp = opt.fixed_point.empty() ? m.fixed_point
                                            : checked_point(m.kinetic, parse_fixed_point(opt.fixed_point));
    r.analysis = cyclekit::analyze_kinetic(m.kinetic, fp);
    return r;
  }
  if (!opt.params.empty()) throw cyclekit::InputError("--param only applies to --model");
  const cyclekit::io::SystemInput in = cyclekit::io::parse_system(read_file(opt.input));
  r.source = {{"input", fs::path(opt.input).filename().string()}, {"kind", in.kind}};
  if (in.lls) {
    r.analysis = cyclekit::analyze_lls(*in.lls);
    return r;
  }
  cyclekit::FixedPoint<Rational> fp;
  if (!opt.fixed_point.empty()) {
    fp = checked_point(*in.kinetic, parse_fixed_point(opt.fixed_point));
  } else if (in.fixed_point) {
    fp = checked_point(*in.kinetic, *in.fixed_point);
  } else {
    fp = search_fixed_point(*in.kinetic, opt, r.notes);
  }
  r.analysis = cyclekit::analyze_kinetic(*in.kinetic, fp);
  return r;
}

json reduction_report(const Resolved& r) {
  const auto& a = r.analysis;
  json out;
  // A reduce report doubles as an "lls" system file.
  out["kind"] = "lls";
  out["A"] = cyclekit::io::terms_json(a.lls.table(), "n", "m");
  out["source"] = r.source;
  json red;
  if (a.kinetic) red["kinetic"] = cyclekit::io::kinetic_json(*a.kinetic);
  if (a.fixed_point) red["fixed_point"] = cyclekit::io::fixed_point_json(*a.fixed_point);
  if (a.map) red["map"] = cyclekit::io::map_json(*a.map);
  red["lls"] = cyclekit::io::lls_json(a.lls, a.diagnosis);
  out["reduction"] = red;
  return out;
}

// Stages forward each other's warnings, so repeats are dropped.
void append(json& arr, const std::vector<std::string>& items) {
  for (const auto& s : items) {
    if (std::find(arr.begin(), arr.end(), json(s)) == arr.end()) arr.push_back(s);
  }
}

void emit(const json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cyclekit::InputError("cannot write '" + path + "'");
  out << text;
}

unsigned thread_count() {
  if (const char* env = std::getenv("CYCLEKIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw cyclekit::InputError("CYCLEKIT_THREADS must be a positive integer");
  }
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

struct CountOptions {
  std::string eps_policy = "warn";
  std::string time = "tau";
};

/// Adds the averaging and cycle sections. Returns the exit code the policy
/// demands.
int cycle_sections(const Resolved& r, const CountOptions& co, json& out, json& warnings,
                   std::optional<cyclekit::OscillatorAnalysis>& osc_out) {
  cyclekit::OscillatorAnalysis o = cyclekit::analyze_oscillator(r.analysis.lls);
  out["averaging"] = cyclekit::io::averaging_json(o.oscillator, o.averaged, co.time == "t");
  out["cycles"] = cyclekit::io::cycles_json(o.report);
  append(warnings, o.oscillator.warnings);
  append(warnings, o.report.warnings);
  const bool too_strong = cyclekit::to_double(o.oscillator.eps) >= cyclekit::kWeakNonlinearityLimit;
  osc_out = std::move(o);
  if (co.eps_policy == "strict" && too_strong) {
    warnings.push_back("eps-policy strict: eps >= 0.3, first-order averaging refused");
    return kNotOscillatory;
  }
  return kOk;
}

int run_reduce(const SourceOptions& so, const std::string& output) {
  const Resolved r = resolve(so);
  json out = reduction_report(r);
  json warnings = json::array();
  append(warnings, r.notes);
  out["warnings"] = warnings;
  emit(out, output);
  return kOk;
}

int run_count(const SourceOptions& so, const CountOptions& co, const std::string& output) {
  const Resolved r = resolve(so);
  json out = reduction_report(r);
  json warnings = json::array();
  append(warnings, r.notes);
  std::optional<cyclekit::OscillatorAnalysis> osc;
  const int code = cycle_sections(r, co, out, warnings, osc);
  out["warnings"] = warnings;
  emit(out, output);
  return code;
}

struct VerifyOptions {
  std::string seeds;
  double t_max = 0.0;
  std::string trajectories;
  std::string frame = "kinetic";
};

int run_verify(const SourceOptions& so, const CountOptions& co, const VerifyOptions& vo,
               const std::string& output) {
  const Resolved r = resolve(so);
  json out = reduction_report(r);
  json warnings = json::array();
  append(warnings, r.notes);
  std::optional<cyclekit::OscillatorAnalysis> osc;
  const int code = cycle_sections(r, co, out, warnings, osc);
  if (code != kOk) {
    out["warnings"] = warnings;
    emit(out, output);
    return code;
  }

  std::vector<double> seeds;
  if (vo.seeds.empty()) {
    seeds = cyclekit::default_seeds(osc->report);
  } else {
    for (const auto& s : split(vo.seeds, ',')) seeds.push_back(cyclekit::to_double(cyclekit::parse_rational(s)));
  }
  const auto& a = r.analysis;
  const bool kinetic = vo.frame == "kinetic" && a.kinetic && a.map;
  const cyclekit::SectionSystem sys =
      kinetic ? cyclekit::section_system(*a.kinetic, *a.map, a.lls) : cyclekit::section_system(a.lls);
  cyclekit::DetectSettings st;
  st.t_max = vo.t_max;
  st.threads = thread_count();
  const bool record = !vo.trajectories.empty();
  const cyclekit::DetectionResult det = cyclekit::detect_limit_cycles(sys, seeds, st, record);
  const cyclekit::Comparison cmp =
      cyclekit::compare_with_kb(osc->report, det.cycles, cyclekit::to_double(osc->oscillator.eps));

  json detection = cyclekit::io::detection_json(det);
  detection["frame"] = kinetic ? "kinetic" : "lls";
  out["detection"] = detection;
  out["comparison"] = cyclekit::io::comparison_json(cmp);
  append(warnings, det.warnings);

  if (record) {
    fs::create_directories(vo.trajectories);
    json files = json::array();
    for (std::size_t i = 0; i < det.outcomes.size(); ++i) {
      const auto& o = det.outcomes[i];
      const std::string name = "seed_" + std::to_string(i / (st.both_directions ? 2 : 1)) + "_" +
                               (o.direction == cyclekit::Direction::Forward ? "forward" : "reversed") +
                               ".csv";
      std::ofstream f(fs::path(vo.trajectories) / name, std::ios::binary);
      if (!f) throw cyclekit::InputError("cannot write trajectory '" + name + "'");
      f << cyclekit::io::trajectory_csv(o.samples, "xi", "xi_dot");
      files.push_back(name);
    }
    out["trajectories"] = files;
  }
  out["warnings"] = warnings;
  emit(out, output);
  return kOk;
}

int run_table(int nmax, int mmax, const std::string& format, const std::string& output) {
  if (nmax < 1 || mmax < 1) throw cyclekit::InputError("--nmax and --mmax must be at least 1");
  const cyclekit::DegreeTable grid = cyclekit::degree_bound_table(nmax, mmax);
  std::string text;
  if (format == "csv") {
    text = cyclekit::degree_table_csv(grid);
  } else if (format == "text") {
    text = cyclekit::degree_table_text(grid);
  } else {
    text = json{{"nmax", nmax}, {"mmax", mmax}, {"cells", cyclekit::io::table_json(grid)}}.dump(2) + "\n";
  }
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw cyclekit::InputError("cannot write '" + output + "'");
    out << text;
  }
  return kOk;
}

int run_zoo(const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& e : cyclekit::zoo()) {
      json d = json::object();
      for (const auto& [k, v] : e.defaults) d[k] = cyclekit::to_string(v);
      arr.push_back({{"name", e.name}, {"description", e.description}, {"defaults", d}});
    }
    std::cout << arr.dump(2) << "\n";
    return kOk;
  }
  for (const auto& e : cyclekit::zoo()) {
    std::cout << e.name << "  " << e.description << "\n   ";
    for (const auto& [k, v] : e.defaults) std::cout << ' ' << k << '=' << cyclekit::to_string(v);
    std::cout << "\n";
  }
  return kOk;
}

void add_source_options(CLI::App* cmd, SourceOptions& so) {
  cmd->add_option("--input", so.input, "System file (JSON)");
  cmd->add_option("--model", so.model, "Built-in model name (see `zoo`)");
  cmd->add_option("--param", so.params, "Model parameter override key=value")->expected(1, -1);
  cmd->add_option("--fixed-point", so.fixed_point, "Fixed point \"x,y\" to reduce at");
  cmd->add_option("--box", so.box, "Fixed-point search box \"xmin,xmax,ymin,ymax\"");
  cmd->add_option("--seed", so.seed, "Seed for the fixed-point search jitter");
}

void add_count_options(CLI::App* cmd, CountOptions& co) {
  cmd->add_option("--eps-policy", co.eps_policy, "Reaction to eps >= 0.3")
      ->check(CLI::IsMember({"warn", "strict"}));
  cmd->add_option("--time", co.time, "Report averaged rates per tau or per t")
      ->check(CLI::IsMember({"tau", "t"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit-cycle analysis of planar kinetic systems in Lienard-like form"};
  app.require_subcommand(1);
  std::string output;
  SourceOptions so;
  CountOptions co;
  VerifyOptions vo;
  int nmax = 10, mmax = 10;
  std::string table_format = "text", zoo_format = "text";

  auto* reduce = app.add_subcommand("reduce", "Reduce a system to LLS form");
  add_source_options(reduce, so);
  reduce->add_option("--output,-o", output, "Output file (default stdout)");

  auto* count = app.add_subcommand("count", "Averaged equations and limit-cycle count");
  add_source_options(count, so);
  add_count_options(count, co);
  count->add_option("--output,-o", output, "Output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Cross-check the count by integration");
  add_source_options(verify, so);
  add_count_options(verify, co);
  verify->add_option("--seeds", vo.seeds, "Seed radii \"r1,r2,...\"");
  verify->add_option("--tmax", vo.t_max, "Integration time limit per seed")->check(CLI::NonNegativeNumber);
  verify->add_option("--emit-trajectories", vo.trajectories, "Directory for per-seed CSV");
  verify->add_option("--frame", vo.frame, "Integrate the kinetic system or its LLS form")
      ->check(CLI::IsMember({"kinetic", "lls"}));
  verify->add_option("--output,-o", output, "Output file (default stdout)");

  auto* table = app.add_subcommand("table", "Degree-bound table over 1..nmax x 1..mmax");
  table->add_option("--nmax", nmax, "Largest N");
  table->add_option("--mmax", mmax, "Largest M");
  table->add_option("--format", table_format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  table->add_option("--output,-o", output, "Output file (default stdout)");

  auto* zoo = app.add_subcommand("zoo", "List built-in models");
  zoo->add_option("--format", zoo_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*reduce) return run_reduce(so, output);
    if (*count) return run_count(so, co, output);
    if (*verify) return run_verify(so, co, vo, output);
    if (*table) return run_table(nmax, mmax, table_format, output);
    if (*zoo) return run_zoo(zoo_format);
  } catch (const cyclekit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const cyclekit::NoFixedPointFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const cyclekit::DegenerateTransform& e) {
    std::cerr << "reduction failed: " << e.what() << "\n";
    return kReductionError;
  } catch (const cyclekit::NotReducible& e) {
    std::cerr << "reduction failed: " << e.what() << "\n";
    return kReductionError;
  } catch (const cyclekit::FixedPointNotShifted& e) {
    std::cerr << "reduction failed: " << e.what() << "\n";
    return kReductionError;
  } catch (const cyclekit::NotOscillatory& e) {
    std::cerr << "not oscillatory: " << e.what() << "\n";
    return kNotOscillatory;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
