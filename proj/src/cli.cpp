#include "ergolab/cli.hpp"

#include "ergolab/cascade.hpp"
#include "ergolab/construction_io.hpp"
#include "ergolab/ledrappier.hpp"
#include "ergolab/markov.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/verify/acceptance.hpp"
#include "ergolab/verify/properties.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace ergolab::cli {

using Json = nlohmann::ordered_json;

Exit exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownPreset:
      return Config;
    case ErrorCode::BudgetExceeded:
      return Budget;
    default:
      return Precondition;
  }
}

namespace {

// ---------------------------------------------------------------------------
// Shared options and helpers

struct Common {
  std::uint64_t seed = 1;
  std::uint64_t budget_levels = 10'000'000;
  std::string tolerance = "1/100";
  std::string format;  // default: csv for correlate, json elsewhere
  std::string output;
};

struct Source {
  std::string preset;
  std::string file;
};

void add_source(CLI::App* cmd, Source& src, const std::string& default_preset) {
  src.preset = default_preset;
  cmd->add_option("--preset", src.preset, "chacon, asym5, asym5-junction[:relay], staircase[:r1,r2,...]")
      ->capture_default_str();
  cmd->add_option("--file", src.file, "construction file (overrides --preset)");
}

rank_one::Construction load(const Source& src) {
  return src.file.empty() ? rank_one::preset(src.preset) : rank_one::load_construction(src.file);
}

rank_one::BuildOptions options_for(const Common& common) {
  rank_one::BuildOptions o;
  o.budget_levels = common.budget_levels;
  return o;
}

/// Deepest stage whose tower fits the level budget (requested depth wins).
rank_one::TowerView build_view(const rank_one::Construction& c, const Common& common, std::size_t depth) {
  if (depth == 0) {
    rank_one::BuildOptions probe;
    probe.lookahead = 63;
    const auto meta = rank_one::build(c, 1, probe);
    depth = 1;
    while (depth < meta.meta_depth() && meta.height(depth + 1) <= common.budget_levels) ++depth;
  }
  return rank_one::build(c, depth, options_for(common));
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "expected a comma-separated integer list, got '" + text + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::ConfigError, "empty integer list");
  return out;
}

/// "6..9" or "6,7,9".
std::vector<std::size_t> parse_stage_range(const std::string& text) {
  std::vector<std::size_t> out;
  static const std::regex range(R"(\s*(\d+)\s*\.\.\s*(\d+)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, range)) {
    const auto lo = std::stoull(m[1]);
    const auto hi = std::stoull(m[2]);
    if (lo == 0 || hi < lo) fail(ErrorCode::ConfigError, "bad stage range '" + text + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (std::int64_t v : parse_int_list(text)) {
    if (v <= 0) fail(ErrorCode::ConfigError, "stages must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// A set is a level list, {"levels": [...]} and/or {"ranges": [[lo, hi], ...]},
/// optionally with its own "stage". A file holds one set or an array of sets.
rank_one::LevelSet set_from_json(const rank_one::TowerView& view, const Json& j, std::size_t default_stage) {
  std::size_t stage = default_stage;
  std::vector<std::uint64_t> levels;
  auto take_levels = [&](const Json& arr) {
    for (const auto& v : arr) {
      if (!v.is_number_unsigned()) fail(ErrorCode::ConfigError, "levels must be non-negative integers");
      levels.push_back(v.get<std::uint64_t>());
    }
  };
  if (j.is_array()) {
    take_levels(j);
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key == "stage") {
        if (!value.is_number_unsigned()) fail(ErrorCode::ConfigError, "stage must be a positive integer");
        stage = value.get<std::size_t>();
      } else if (key == "levels") {
        take_levels(value);
      } else if (key == "ranges") {
        for (const auto& r : value) {
          if (!r.is_array() || r.size() != 2 || !r[0].is_number_unsigned() || !r[1].is_number_unsigned()) {
            fail(ErrorCode::ConfigError, "ranges must be [lo, hi] pairs");
          }
          for (auto l = r[0].get<std::uint64_t>(); l < r[1].get<std::uint64_t>(); ++l) levels.push_back(l);
        }
      } else {
        fail(ErrorCode::ConfigError, "unknown set key '" + key + "'");
      }
    }
  } else {
    fail(ErrorCode::ConfigError, "a set is a level array or an object");
  }
  if (stage == 0) fail(ErrorCode::ConfigError, "set stage missing (use --stage)");
  if (stage > view.stage()) fail(ErrorCode::StageOrder, "set stage " + std::to_string(stage) + " is not built");
  for (auto l : levels) {
    if (l >= view.height(stage)) fail(ErrorCode::ConfigError, "level " + std::to_string(l) + " outside stage " + std::to_string(stage));
  }
  return rank_one::make_level_set(view, stage, levels);
}

std::vector<rank_one::LevelSet> load_sets(const rank_one::TowerView& view, const std::string& path, std::size_t stage) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open set file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ConfigError, "set file '" + path + "': " + e.what());
  }
  const bool many = j.is_array() && !j.empty() && !j.front().is_number();
  std::vector<rank_one::LevelSet> sets;
  if (many) {
    for (const auto& item : j) sets.push_back(set_from_json(view, item, stage));
  } else {
    sets.push_back(set_from_json(view, j, stage));
  }
  return sets;
}

Json bound_json(const rank_one::CorrelationBound& b) {
  return {{"lower", to_string(b.lower)}, {"upper", to_string(b.upper)}, {"eval_stage", b.eval_stage}};
}

void emit(const Common& common, std::ostream& out, const std::string& text) {
  if (common.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.output, std::ios::binary);
  if (!file) fail(ErrorCode::ConfigError, "cannot write '" + common.output + "'");
  file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Subcommands

struct ConstructArgs {
  Source src;
  std::size_t depth = 0;
};

int do_construct(const Common& common, const ConstructArgs& a, std::ostream& out) {
  const auto c = load(a.src);
  const auto view = build_view(c, common, a.depth);
  const auto adams = rank_one::adams_ratios(view);
  if (common.format == "csv") {
    std::string text = "stage,height,level_width,tower_mass\n";
    for (std::size_t n = 1; n <= view.stage(); ++n) {
      text += std::to_string(n) + "," + std::to_string(view.height(n)) + "," + to_string(view.level_width(n)) + "," +
              to_string(view.tower_mass(n)) + "\n";
    }
    emit(common, out, text);
    return Ok;
  }
  Json stages = Json::array();
  for (std::size_t n = 1; n <= view.stage(); ++n) {
    Json s = {{"stage", n},
              {"height", view.height(n)},
              {"level_width", to_string(view.level_width(n))},
              {"tower_mass", to_string(view.tower_mass(n))}};
    if (n < view.meta_depth()) s["adams_ratio"] = to_string(adams[n - 1]);
    stages.push_back(std::move(s));
  }
  Json j = {{"construction", rank_one::format_construction(c)},
            {"built_stage", view.stage()},
            {"total_mass", to_string(view.total_mass())},
            {"stages", std::move(stages)}};
  emit(common, out, dump(j));
  return Ok;
}

struct CorrelateArgs {
  Source src;
  std::size_t stage = 0;
  std::string sets;
  std::string shifts;
  std::size_t eval_stage = 0;
  std::size_t refine_depth = 0;
  std::size_t depth = 0;
};

int do_correlate(const Common& common, const CorrelateArgs& a, std::ostream& out) {
  const auto c = load(a.src);
  const auto view = build_view(c, common, a.depth);
  const auto shifts = parse_int_list(a.shifts);
  auto sets = load_sets(view, a.sets, a.stage);
  if (sets.size() == 1) sets.resize(shifts.size(), sets.front());
  if (sets.size() != shifts.size()) fail(ErrorCode::ConfigError, "need one set per shift (or a single set)");
  const auto bound = a.eval_stage == 0 ? rank_one::auto_correlation(view, sets, shifts, parse_rational(common.tolerance))
                                       : rank_one::correlation(view, sets, shifts, a.eval_stage, {a.refine_depth});
  if (common.format == "csv") {
    std::string text;
    for (std::size_t i = 0; i < shifts.size(); ++i) text += "shift_" + std::to_string(i + 1) + ",";
    text += "lower,upper,eval_stage\n";
    for (auto k : shifts) text += std::to_string(k) + ",";
    text += to_string(bound.lower) + "," + to_string(bound.upper) + "," + std::to_string(bound.eval_stage) + "\n";
    emit(common, out, text);
    return Ok;
  }
  Json j = bound_json(bound);
  j["shifts"] = shifts;
  j["width"] = to_string(bound.width());
  emit(common, out, dump(j));
  return Ok;
}

struct WeakLimitArgs {
  Source src;
  std::string stages = "6..10";
  std::size_t set_stage = 5;
  std::string target = "0:1/2,1:1/2";
  std::string theta = "0";
  std::size_t eval_offset = 3;
  std::size_t refine_depth = 2;
};

rank_one::WeakLimitTarget parse_target(const std::string& text, const std::string& theta) {
  rank_one::WeakLimitTarget t;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorCode::ConfigError, "target terms are power:weight, got '" + item + "'");
    const auto power = parse_int_list(item.substr(0, colon));
    t.powers.push_back({power.front(), parse_rational(item.substr(colon + 1))});
  }
  t.theta_weight = parse_rational(theta);
  t.validate();
  return t;
}

int do_weak_limit(const Common& common, const WeakLimitArgs& a, std::ostream& out) {
  const auto stages = parse_stage_range(a.stages);
  const auto target = parse_target(a.target, a.theta);
  const auto c = load(a.src);
  const auto view = build_view(c, common, 0);
  const auto family = rank_one::single_level_family(view, a.set_stage);
  Json rows = Json::array();
  std::string csv = "j,k,deviation,best\n";
  for (std::size_t j : stages) {
    const std::size_t eval = std::min(j + a.eval_offset, view.stage());
    const auto scan = rank_one::detect_weak_limit(view, j, target, family, eval, {a.refine_depth});
    Json cands = Json::array();
    for (std::size_t i = 0; i < scan.candidates.size(); ++i) {
      cands.push_back({{"k", scan.candidates[i]}, {"deviation", to_string(scan.deviations[i])}});
      csv += std::to_string(j) + "," + std::to_string(scan.candidates[i]) + "," + to_string(scan.deviations[i]) + "," +
             (i == scan.best ? "1" : "0") + "\n";
    }
    rows.push_back({{"j", j},
                    {"h_j", view.height(j)},
                    {"eval_stage", eval},
                    {"candidates", std::move(cands)},
                    {"best_k", scan.best_shift()},
                    {"best_deviation", to_string(scan.best_deviation())}});
  }
  if (common.format == "csv") {
    emit(common, out, csv);
  } else {
    emit(common, out, dump({{"family_pairs", family.size()}, {"rows", std::move(rows)}}));
  }
  return Ok;
}

struct MixingArgs {
  Source src;
  std::size_t eval_stage = 8;
  std::size_t set_stage = 4;
  std::string sets;
  std::string fraction = "1/3";
  std::int64_t h = 300;
  std::string eps = "1/20";
};

int do_mixing_scan(const Common& common, const MixingArgs& a, std::ostream& out) {
  const auto c = load(a.src);
  const auto view = build_view(c, common, a.eval_stage);
  std::vector<rank_one::LevelSet> sets;
  if (!a.sets.empty()) {
    sets = load_sets(view, a.sets, a.set_stage);
  } else {
    const Rational frac = parse_rational(a.fraction);
    if (frac < 0 || frac > 1) fail(ErrorCode::ConfigError, "--fraction must lie in [0, 1]");
    const mpz_class top = mpz_class(static_cast<unsigned long>(view.height(a.set_stage))) * frac.get_num() / frac.get_den();
    sets.push_back(rank_one::level_range(view, a.set_stage, 0, top.get_ui()));
  }
  if (sets.size() == 1) sets.resize(3, sets.front());
  if (sets.size() != 3) fail(ErrorCode::ConfigError, "mixing scan takes one or three sets");
  const auto scan = rank_one::mixing_scan(view, sets[0], sets[1], sets[2], a.h, parse_rational(a.eps), a.eval_stage);
  if (common.format == "csv") {
    std::string text = "z,w\n";
    for (const auto& [z, w] : scan.offenders) text += std::to_string(z) + "," + std::to_string(w) + "\n";
    emit(common, out, text);
    return Ok;
  }
  Json pairs = Json::array();
  for (const auto& [z, w] : scan.offenders) pairs.push_back({z, w});
  emit(common, out,
       dump({{"d", to_string(scan.d)},
             {"h", a.h},
             {"eps", to_string(parse_rational(a.eps))},
             {"eval_stage", a.eval_stage},
             {"grid_points", scan.grid_points},
             {"offender_count", scan.offenders.size()},
             {"offenders", std::move(pairs)}}));
  return Ok;
}

struct LedrappierArgs {
  std::uint32_t n = 16;
  bool square = false;
  std::string cyl = "(0,0)=0";
  std::string shifts;
};

std::string site_text(const ledrappier::Site& s) { return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")"; }

int do_ledrappier(const Common& common, const LedrappierArgs& a, std::ostream& out) {
  const auto lat = a.square ? ledrappier::TorusLattice::square(a.n) : ledrappier::TorusLattice::closing(a.n);
  lat.validate();
  const auto sys = ledrappier::build_system(lat);
  const auto cyl = ledrappier::parse_cylinder(a.cyl);
  cyl.validate(lat);
  std::vector<ledrappier::Site> shifts{{0, 0}};
  if (!a.shifts.empty()) {
    for (const auto& s : ledrappier::parse_sites(a.shifts)) {
      if (std::find(shifts.begin(), shifts.end(), s) == shifts.end()) shifts.push_back(s);
    }
  }
  const Rational measure = ledrappier::shifted_correlation(sys, cyl, shifts);
  const Rational single = ledrappier::cylinder_measure(sys, cyl);
  Rational product = 1;
  for (std::size_t i = 0; i < shifts.size(); ++i) product *= single;

  std::vector<ledrappier::Site> family;
  for (const auto& v : shifts) {
    for (const auto& con : cyl.constraints) {
      const auto s = con.site + v;
      const bool seen = std::any_of(family.begin(), family.end(), [&](const auto& f) { return lat.index(f) == lat.index(s); });
      if (!seen) family.push_back(s);
    }
  }
  Json deps = Json::array();
  for (std::uint32_t mask : ledrappier::dependency_scan(sys, family)) {
    Json rel = Json::array();
    for (std::size_t i = 0; i < family.size(); ++i) {
      if ((mask >> i) & 1U) rel.push_back(site_text(family[i]));
    }
    deps.push_back(std::move(rel));
  }
  if (common.format == "csv") {
    emit(common, out, "measure,product,dependencies\n" + to_string(measure) + "," + to_string(product) + "," +
                          std::to_string(deps.size()) + "\n");
    return Ok;
  }
  emit(common, out,
       dump({{"lattice", std::to_string(lat.nx) + "x" + std::to_string(lat.ny)},
             {"dimension", sys.dimension()},
             {"measure", to_string(measure)},
             {"product", to_string(product)},
             {"dependencies", std::move(deps)}}));
  return Ok;
}

struct CascadeArgs {
  std::string base = "odometer:2";
  std::size_t depth = 40;
  std::string cocycle;
  std::size_t samples = 256;
  std::uint64_t length = 16384;
  std::size_t min_returns = 10;
};

cascade::BaseSystem make_base(const Common& common, const CascadeArgs& a) {
  static const std::regex odometer(R"(odometer:(\d+))");
  static const std::regex tower(R"(tower:([^@]+)@(\d+))");
  std::smatch m;
  if (std::regex_match(a.base, m, odometer)) {
    const auto radix = std::stoul(m[1]);
    if (radix < 2 || radix > 1024) fail(ErrorCode::ConfigError, "odometer radix must be in [2, 1024]");
    return cascade::BaseSystem::odometer(static_cast<std::uint32_t>(radix), a.depth);
  }
  if (std::regex_match(a.base, m, tower)) {
    const std::size_t stage = std::stoul(m[2]);
    return cascade::BaseSystem::tower(rank_one::build(rank_one::preset(m[1]), stage, options_for(common)), stage);
  }
  fail(ErrorCode::ConfigError, "base must be odometer:<r> or tower:<preset>@<stage>");
}

int do_cascade(const Common& common, const CascadeArgs& a, std::ostream& out) {
  const auto base = make_base(common, a);
  const auto f = cascade::load_cocycle_csv(a.cocycle);
  f.validate(base);
  if (a.samples == 0) fail(ErrorCode::ConfigError, "--samples must be positive");
  std::mt19937_64 rng(common.seed);
  const auto sample = base.sample(a.samples, rng);
  const auto res = cascade::recurrence_statistic(base, f, sample, a.length, a.min_returns);
  if (common.format == "csv") {
    std::string text = "start,defined,reached,returns\n";
    for (const auto& p : res.per_point) {
      text += std::to_string(p.start) + "," + (p.defined ? "1" : "0") + "," + std::to_string(p.reached) + "," +
              std::to_string(p.returns) + "\n";
    }
    emit(common, out, text);
    return Ok;
  }
  Json points = Json::array();
  for (const auto& p : res.per_point) {
    Json pj = {{"start", p.start}, {"defined", p.defined}, {"returns", p.returns}};
    if (!p.defined) pj["reached"] = p.reached;
    points.push_back(std::move(pj));
  }
  emit(common, out,
       dump({{"fraction", to_string(res.fraction)},
             {"qualifying", res.qualifying},
             {"defined", res.defined},
             {"length", a.length},
             {"min_returns", a.min_returns},
             {"per_point", std::move(points)}}));
  return Ok;
}

struct MarkovArgs {
  std::string matrix;
  std::string f;
  std::size_t cesaro = 0;
};

int do_markov(const Common& common, const MarkovArgs& a, std::ostream& out) {
  std::ifstream in(a.matrix);
  if (!in) fail(ErrorCode::ConfigError, "cannot open matrix file '" + a.matrix + "'");
  const auto p = markov::parse_matrix_csv(in);
  Json j = {{"size", p.size()},
            {"ergodic", markov::is_ergodic(p)},
            {"mixing", markov::is_mixing(p)},
            {"second_modulus_approx", markov::spectral_estimate(p).second_modulus}};
  if (!a.f.empty()) {
    const auto f = markov::parse_vector(a.f);
    const auto s = markov::symmetrization_residual(p, f);
    j["norm_sq"] = to_string(s.lhs);
    j["adjoint_form"] = to_string(s.rhs);
    j["residual"] = to_string(s.residual());
    if (a.cesaro > 0) j["cesaro_norm_sq"] = to_string(markov::cesaro_average(p, f, a.cesaro));
  } else if (a.cesaro > 0) {
    fail(ErrorCode::ConfigError, "--cesaro needs --f");
  }
  const auto nu = markov::joining_of_matrix(p);
  if (common.format == "csv") {
    std::string text;
    for (std::size_t r = 0; r < nu.n; ++r) {
      for (std::size_t c = 0; c < nu.n; ++c) text += (c ? "," : "") + to_string(nu(r, c));
      text += "\n";
    }
    emit(common, out, text);
    return Ok;
  }
  Json rows = Json::array();
  for (std::size_t r = 0; r < nu.n; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < nu.n; ++c) row.push_back(to_string(nu(r, c)));
    rows.push_back(std::move(row));
  }
  j["joining"] = std::move(rows);
  emit(common, out, dump(j));
  return Ok;
}

int do_props(const Common& common, std::ostream& out) {
  const auto results = verify::all_properties(common.seed);
  bool ok = true;
  Json rows = Json::array();
  std::string csv = "module,property,cases,failures,first_failure\n";
  for (const auto& r : results) {
    ok = ok && r.passed();
    rows.push_back({{"module", r.module}, {"property", r.name}, {"cases", r.cases}, {"failures", r.failures},
                    {"first_failure", r.first_failure}});
    csv += r.module + "," + r.name + "," + std::to_string(r.cases) + "," + std::to_string(r.failures) + "," +
           r.first_failure + "\n";
  }
  if (common.format == "csv") {
    emit(common, out, csv);
  } else {
    emit(common, out, dump({{"seed", common.seed}, {"passed", ok}, {"properties", std::move(rows)}}));
  }
  return ok ? Ok : CheckFailed;
}

int do_repro(const Common& common, std::ostream& out) {
  const auto results = verify::run_acceptance(common.seed);
  bool ok = true;
  std::string text;
  Json rows = Json::array();
  for (const auto& r : results) {
    ok = ok && r.acceptable();
    text += verify::format_line(r) + "\n";
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"analysed", r.analysed()},
                    {"detail", r.detail}, {"analysis", r.analysis}});
  }
  // Timings vary between runs; they appear only in the text form.
  emit(common, out, common.format == "json" ? dump({{"seed", common.seed}, {"criteria", std::move(rows)}}) : text);
  return ok ? Ok : CheckFailed;
}

struct AsymmetryArgs {
  Source src;
  std::string stages = "6..9";
  std::size_t set_stage = 4;
  std::size_t refine_depth = 3;
};

int do_asymmetry(const Common& common, const AsymmetryArgs& a, std::ostream& out) {
  const auto stages = parse_stage_range(a.stages);
  const auto c = load(a.src);
  const std::size_t last = *std::max_element(stages.begin(), stages.end());
  const auto view = rank_one::build(c, last + 1, options_for(common));
  const auto rows = verify::asymmetry_table(view, stages, a.set_stage, a.refine_depth);
  if (common.format == "csv") {
    std::string text = "i,set,measure,forward_lower,forward_upper,backward_lower,backward_upper,eval_stage\n";
    for (const auto& r : rows) {
      text += std::to_string(r.stage) + "," + r.set + "," + to_string(r.measure) + "," + to_string(r.forward_lower) + "," +
              to_string(r.forward_upper) + "," + to_string(r.backward_lower) + "," + to_string(r.backward_upper) + "," +
              std::to_string(r.eval_stage) + "\n";
    }
    emit(common, out, text);
    return Ok;
  }
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back({{"i", r.stage},
                     {"n", view.height(r.stage) + 1},
                     {"set", r.set},
                     {"sparse", r.sparse},
                     {"measure", to_string(r.measure)},
                     {"forward_ratio", {to_string(r.forward_lower), to_string(r.forward_upper)}},
                     {"backward", {to_string(r.backward_lower), to_string(r.backward_upper)}},
                     {"eval_stage", r.eval_stage}});
  }
  emit(common, out, dump({{"set_stage", a.set_stage}, {"refine_depth", a.refine_depth}, {"rows", std::move(table)}}));
  return Ok;
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << Json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ergolab: exact experiments with rank-one maps, Markov operators, Ledrappier's action and cascades"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "seed for sampled experiments")->capture_default_str();
  app.add_option("--budget-levels", common.budget_levels, "largest tower (levels) to materialize")->capture_default_str();
  app.add_option("--tolerance", common.tolerance, "target enclosure width for automatic refinement")->capture_default_str();
  app.add_option("--format", common.format, "json or csv (correlate defaults to csv)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", common.output, "write the result to this file instead of stdout");
  app.fallthrough();

  ConstructArgs construct;
  auto* c_construct = app.add_subcommand("construct", "heights, widths and masses of a construction");
  add_source(c_construct, construct.src, "chacon");
  c_construct->add_option("--depth", construct.depth, "stage to build (default: deepest within budget)");

  CorrelateArgs correlate;
  auto* c_correlate = app.add_subcommand("correlate", "enclosure of mu(cap T^k_i A_i)");
  add_source(c_correlate, correlate.src, "chacon");
  c_correlate->add_option("--stage", correlate.stage, "stage of the sets in --sets");
  c_correlate->add_option("--sets", correlate.sets, "JSON set file")->required();
  c_correlate->add_option("--shifts", correlate.shifts, "comma-separated shifts k_i")->required();
  c_correlate->add_option("--eval-stage", correlate.eval_stage, "evaluation stage (default: refine to --tolerance)");
  c_correlate->add_option("--refine-depth", correlate.refine_depth, "band resolution stages")->capture_default_str();
  c_correlate->add_option("--depth", correlate.depth, "stage to build");

  WeakLimitArgs weak;
  auto* c_weak = app.add_subcommand("weak-limit", "scan k in {h_j - 1, h_j, h_j + 1} against a target operator");
  add_source(c_weak, weak.src, "chacon");
  c_weak->add_option("--stages", weak.stages, "tower indices j, e.g. 6..10")->capture_default_str();
  c_weak->add_option("--set-stage", weak.set_stage, "single-level family stage")->capture_default_str();
  c_weak->add_option("--target", weak.target, "power:weight terms")->capture_default_str();
  c_weak->add_option("--theta", weak.theta, "weight of the projection onto constants")->capture_default_str();
  c_weak->add_option("--eval-offset", weak.eval_offset, "evaluate at stage j + offset")->capture_default_str();
  c_weak->add_option("--refine-depth", weak.refine_depth, "band resolution stages")->capture_default_str();

  MixingArgs mixing;
  auto* c_mixing = app.add_subcommand("mixing-scan", "d(h) = #Der(eps, A, B, C) / h");
  c_mixing->set_help_flag("--help", "print this help message and exit");
  add_source(c_mixing, mixing.src, "staircase");
  c_mixing->add_option("--eval-stage", mixing.eval_stage, "evaluation stage")->capture_default_str();
  c_mixing->add_option("--set-stage", mixing.set_stage, "stage of the default set")->capture_default_str();
  c_mixing->add_option("--fraction", mixing.fraction, "default A = B = C = lowest fraction of the set stage")->capture_default_str();
  c_mixing->add_option("--sets", mixing.sets, "JSON set file with one or three sets");
  c_mixing->add_option("--h", mixing.h, "scan range")->capture_default_str();
  c_mixing->add_option("--eps", mixing.eps, "epsilon")->capture_default_str();

  LedrappierArgs led;
  auto* c_led = app.add_subcommand("ledrappier", "cylinder correlations on a finite Ledrappier torus");
  c_led->add_option("--n", led.n, "torus width (height = row-transfer period)")->capture_default_str();
  c_led->add_flag("--square", led.square, "use the n x n torus instead");
  c_led->add_option("--cyl", led.cyl, "cylinder, e.g. \"(0,0)=0;(1,0)=1\"")->capture_default_str();
  c_led->add_option("--shifts", led.shifts, "translation vectors, e.g. \"(4,0);(0,4)\"; the origin is always included");

  CascadeArgs cas;
  auto* c_cascade = app.add_subcommand("cascade", "zero-sum return statistics of a cylindrical cascade");
  c_cascade->add_option("--base", cas.base, "odometer:<r> or tower:<preset>@<stage>")->capture_default_str();
  c_cascade->add_option("--depth", cas.depth, "odometer digits")->capture_default_str();
  c_cascade->add_option("--cocycle", cas.cocycle, "cocycle CSV (stage,<j> then level,value rows)")->required();
  c_cascade->add_option("--samples", cas.samples, "sample points")->capture_default_str();
  c_cascade->add_option("--length", cas.length, "orbit length L")->capture_default_str();
  c_cascade->add_option("--min-returns", cas.min_returns, "required zero returns K")->capture_default_str();

  MarkovArgs mk;
  auto* c_markov = app.add_subcommand("markov", "gates, symmetrization identity and joining of a matrix");
  c_markov->add_option("--matrix", mk.matrix, "CSV of p/q entries")->required();
  c_markov->add_option("--f", mk.f, "comma-separated vector");
  c_markov->add_option("--cesaro", mk.cesaro, "Cesaro average length N");

  auto* c_props = app.add_subcommand("props", "run every module property suite");
  auto* c_repro = app.add_subcommand("repro", "run the acceptance suite end to end");

  AsymmetryArgs asym;
  auto* c_asym = app.add_subcommand("asym5-asymmetry", "forward and backward triple correlations at n(i) = h_i + 1");
  add_source(c_asym, asym.src, "asym5");
  c_asym->add_option("--stages", asym.stages, "stages i, e.g. 6..9")->capture_default_str();
  c_asym->add_option("--set-stage", asym.set_stage, "stage of the test sets")->capture_default_str();
  c_asym->add_option("--refine-depth", asym.refine_depth, "band resolution stages")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    write_error(err, error_name(ErrorCode::ConfigError), e.what());
    return Config;
  }

  if (common.format.empty()) common.format = *c_correlate ? "csv" : "json";

  try {
    if (*c_construct) return do_construct(common, construct, out);
    if (*c_correlate) return do_correlate(common, correlate, out);
    if (*c_weak) return do_weak_limit(common, weak, out);
    if (*c_mixing) return do_mixing_scan(common, mixing, out);
    if (*c_led) return do_ledrappier(common, led, out);
    if (*c_cascade) return do_cascade(common, cas, out);
    if (*c_markov) return do_markov(common, mk, out);
    if (*c_props) return do_props(common, out);
    if (*c_repro) return do_repro(common, out);
    if (*c_asym) return do_asymmetry(common, asym, out);
  } catch (const Error& e) {
    write_error(err, error_name(e.code()), e.what());
    return exit_code(e.code());
  }
  return Config;
}

}  // namespace ergolab::cli
