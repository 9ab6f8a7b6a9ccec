#include "evanskit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "evanskit/errors.hpp"
#include "evanskit/lopatinski.hpp"
#include "evanskit/parallel.hpp"
#include "evanskit/systems.hpp"
#include "json.hpp"

namespace evanskit::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::config, path + ": " + what);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) bad(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0)) bad(path, "must be positive");
  return v;
}

cplx complex_value(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad(path, "expected a number or [re, im]");
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json frequency_json(const Frequency& f) { return {{"lambda", complex_json(f.lambda)}, {"xi", f.xi}}; }

const std::set<std::string> kTasks{"profile", "eval", "contour", "lowfreq", "regime-scan", "print-defaults"};

}  // namespace

std::string to_json(const RunConfig& c) {
  json j;
  j["task"] = c.task;
  j["system"] = {{"name", c.system}, {"params", c.params}};
  json shock = json::object();
  if (c.u_minus) shock["u_minus"] = std::vector<double>(c.u_minus->data(), c.u_minus->data() + c.u_minus->size());
  if (c.u_plus) shock["u_plus"] = std::vector<double>(c.u_plus->data(), c.u_plus->data() + c.u_plus->size());
  if (c.speed) shock["s"] = *c.speed;
  j["shock"] = shock;
  j["variant"] = c.variant;
  j["scale"] = c.scale;
  j["profile"] = {{"L", c.profile.L}, {"nodes", c.profile.nodes}, {"tol", c.profile.tol},
                  {"phase_shift", c.profile.phase_shift}};
  j["evans"] = {{"x_match", c.evans.x_match}, {"rel_tol", c.evans.rel_tol}, {"abs_tol", c.evans.abs_tol}};
  j["winding"] = {{"initial_samples", c.winding.initial_samples}, {"max_depth", c.winding.max_depth}};
  j["contour"] = {{"shape", c.contour.shape},       {"center", complex_json(c.contour.center)},
                  {"radius", c.contour.radius},     {"re_offset", c.contour.re_offset},
                  {"lower", complex_json(c.contour.lower)}, {"upper", complex_json(c.contour.upper)},
                  {"xi", c.contour.xi}};
  json freqs = json::array();
  for (const Frequency& f : c.frequencies) freqs.push_back(frequency_json(f));
  j["frequencies"] = freqs;
  j["lowfreq"] = {{"angles", c.lowfreq.angles}, {"re_min", c.lowfreq.re_min}, {"radii", c.lowfreq.radii}};
  j["regime_scan"] = {{"shell_radius", c.scan.shell_radius},   {"shell_samples", c.scan.shell_samples},
                      {"shell_re_min", c.scan.shell_re_min},   {"contour_radius", c.scan.contour_radius},
                      {"xi_slices", c.scan.xi_slices}};
  j["jobs"] = c.jobs;
  j["out"] = c.out;
  return j.dump(2);
}

std::string defaults_json() { return to_json(RunConfig{}); }

RunConfig parse_config(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  only_keys(j, "", {"task", "system", "shock", "variant", "scale", "profile", "evans", "winding", "contour",
                    "frequencies", "lowfreq", "regime_scan", "jobs", "out"});
  if (j.contains("task")) {
    c.task = text(j["task"], "task");
    if (!kTasks.count(c.task)) bad("task", "unknown task '" + c.task + "'");
  }
  if (j.contains("system")) {
    const json& s = j["system"];
    if (s.is_string()) {
      c.system = s.get<std::string>();
    } else {
      only_keys(s, "system", {"name", "params"});
      if (s.contains("name")) c.system = text(s["name"], "system.name");
      if (s.contains("params")) {
        if (!s["params"].is_object()) bad("system.params", "expected an object");
        const std::map<std::string, double> known = default_params(c.system);
        for (auto it = s["params"].begin(); it != s["params"].end(); ++it) {
          const std::string path = "system.params." + it.key();
          if (!known.count(it.key())) bad(path, "unknown key");
          c.params[it.key()] = number(it.value(), path);
        }
      }
    }
  }
  if (j.contains("shock")) {
    const json& s = j["shock"];
    only_keys(s, "shock", {"u_minus", "u_plus", "s"});
    auto vec = [&](const char* key) {
      const std::vector<double> v = numbers(s[key], join("shock", key));
      return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    if (s.contains("u_minus")) c.u_minus = vec("u_minus");
    if (s.contains("u_plus")) c.u_plus = vec("u_plus");
    if (s.contains("s")) c.speed = number(s["s"], "shock.s");
  }
  if (j.contains("variant")) {
    c.variant = text(j["variant"], "variant");
    try {
      variant_from_string(c.variant);
    } catch (const Error&) {
      bad("variant", "unknown variant '" + c.variant + "'");
    }
  }
  if (j.contains("scale")) {
    c.scale = text(j["scale"], "scale");
    if (c.scale != "r" && c.scale != "r2" && c.scale != "unit") bad("scale", "expected r, r2 or unit");
  }
  if (j.contains("profile")) {
    const json& p = j["profile"];
    only_keys(p, "profile", {"L", "nodes", "tol", "phase_shift"});
    if (p.contains("L")) {
      c.profile.L = number(p["L"], "profile.L");
      if (c.profile.L < 0) bad("profile.L", "must be >= 0");
    }
    if (p.contains("nodes")) {
      c.profile.nodes = integer(p["nodes"], "profile.nodes");
      if (c.profile.nodes < 11) bad("profile.nodes", "must be >= 11");
    }
    if (p.contains("tol")) c.profile.tol = positive(p["tol"], "profile.tol");
    if (p.contains("phase_shift")) c.profile.phase_shift = number(p["phase_shift"], "profile.phase_shift");
  }
  if (j.contains("evans")) {
    const json& e = j["evans"];
    only_keys(e, "evans", {"x_match", "rel_tol", "abs_tol"});
    if (e.contains("x_match")) c.evans.x_match = number(e["x_match"], "evans.x_match");
    if (e.contains("rel_tol")) c.evans.rel_tol = positive(e["rel_tol"], "evans.rel_tol");
    if (e.contains("abs_tol")) c.evans.abs_tol = positive(e["abs_tol"], "evans.abs_tol");
  }
  if (j.contains("winding")) {
    const json& w = j["winding"];
    only_keys(w, "winding", {"initial_samples", "max_depth"});
    if (w.contains("initial_samples")) {
      c.winding.initial_samples = integer(w["initial_samples"], "winding.initial_samples");
      if (c.winding.initial_samples < 4) bad("winding.initial_samples", "must be >= 4");
    }
    if (w.contains("max_depth")) {
      c.winding.max_depth = integer(w["max_depth"], "winding.max_depth");
      if (c.winding.max_depth < 0) bad("winding.max_depth", "must be >= 0");
    }
  }
  if (j.contains("contour")) {
    const json& k = j["contour"];
    only_keys(k, "contour", {"shape", "center", "radius", "re_offset", "lower", "upper", "xi"});
    if (k.contains("shape")) {
      c.contour.shape = text(k["shape"], "contour.shape");
      if (c.contour.shape != "circle" && c.contour.shape != "semicircle" && c.contour.shape != "rectangle") {
        bad("contour.shape", "expected circle, semicircle or rectangle");
      }
    }
    if (k.contains("center")) c.contour.center = complex_value(k["center"], "contour.center");
    if (k.contains("radius")) c.contour.radius = positive(k["radius"], "contour.radius");
    if (k.contains("re_offset")) c.contour.re_offset = number(k["re_offset"], "contour.re_offset");
    if (k.contains("lower")) c.contour.lower = complex_value(k["lower"], "contour.lower");
    if (k.contains("upper")) c.contour.upper = complex_value(k["upper"], "contour.upper");
    if (k.contains("xi")) c.contour.xi = numbers(k["xi"], "contour.xi");
    if (c.contour.shape == "rectangle" &&
        !(c.contour.lower.real() < c.contour.upper.real() && c.contour.lower.imag() < c.contour.upper.imag())) {
      bad("contour.lower", "must lie below and left of contour.upper");
    }
  }
  if (j.contains("frequencies")) {
    const json& fl = j["frequencies"];
    if (!fl.is_array() || fl.empty()) bad("frequencies", "expected a nonempty array");
    c.frequencies.clear();
    for (std::size_t i = 0; i < fl.size(); ++i) {
      const std::string path = "frequencies[" + std::to_string(i) + "]";
      if (fl[i].is_object()) {
        only_keys(fl[i], path, {"lambda", "xi"});
        if (!fl[i].contains("lambda")) bad(path + ".lambda", "missing");
        Frequency f(complex_value(fl[i]["lambda"], path + ".lambda"));
        if (fl[i].contains("xi")) f.xi = numbers(fl[i]["xi"], path + ".xi");
        c.frequencies.push_back(f);
      } else {
        c.frequencies.emplace_back(complex_value(fl[i], path));
      }
    }
  }
  if (j.contains("lowfreq")) {
    const json& l = j["lowfreq"];
    only_keys(l, "lowfreq", {"angles", "re_min", "radii"});
    if (l.contains("angles")) {
      c.lowfreq.angles = integer(l["angles"], "lowfreq.angles");
      if (c.lowfreq.angles < 1) bad("lowfreq.angles", "must be >= 1");
    }
    if (l.contains("re_min")) c.lowfreq.re_min = number(l["re_min"], "lowfreq.re_min");
    if (l.contains("radii")) {
      c.lowfreq.radii = numbers(l["radii"], "lowfreq.radii");
      if (c.lowfreq.radii.empty()) bad("lowfreq.radii", "must not be empty");
      for (std::size_t i = 0; i < c.lowfreq.radii.size(); ++i) {
        if (!(c.lowfreq.radii[i] > 0)) bad("lowfreq.radii[" + std::to_string(i) + "]", "must be positive");
        if (i > 0 && !(c.lowfreq.radii[i] < c.lowfreq.radii[i - 1])) bad("lowfreq.radii", "must decrease strictly");
      }
    }
  }
  if (j.contains("regime_scan")) {
    const json& s = j["regime_scan"];
    only_keys(s, "regime_scan", {"shell_radius", "shell_samples", "shell_re_min", "contour_radius", "xi_slices"});
    if (s.contains("shell_radius")) c.scan.shell_radius = positive(s["shell_radius"], "regime_scan.shell_radius");
    if (s.contains("shell_samples")) {
      c.scan.shell_samples = integer(s["shell_samples"], "regime_scan.shell_samples");
      if (c.scan.shell_samples < 1) bad("regime_scan.shell_samples", "must be >= 1");
    }
    if (s.contains("shell_re_min")) c.scan.shell_re_min = number(s["shell_re_min"], "regime_scan.shell_re_min");
    if (s.contains("contour_radius")) {
      c.scan.contour_radius = positive(s["contour_radius"], "regime_scan.contour_radius");
    }
    if (s.contains("xi_slices")) c.scan.xi_slices = numbers(s["xi_slices"], "regime_scan.xi_slices");
  }
  if (j.contains("jobs")) {
    c.jobs = integer(j["jobs"], "jobs");
    if (c.jobs < 1) bad("jobs", "must be >= 1");
  }
  if (j.contains("out")) c.out = text(j["out"], "out");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

// write to a sibling temp file, then rename over the target
void write_atomic(const fs::path& target, const std::string& content) {
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::config, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::config, "short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

struct Setup {
  SystemSpec spec;
  SystemModel model;
  Vec u_minus, u_plus;
};

Setup setup(const RunConfig& c) {
  Setup s;
  s.spec = get_system(c.system, c.params);
  if (!s.spec.model) throw Error(ErrorKind::config, "system '" + c.system + "' has no conservation-law model");
  s.model = *s.spec.model;
  s.u_minus = c.u_minus.value_or(s.spec.u_minus);
  s.u_plus = c.u_plus.value_or(s.spec.u_plus);
  if (c.speed) s.model.s = *c.speed;
  if (s.u_minus.size() != s.model.n) bad("shock.u_minus", "expected " + std::to_string(s.model.n) + " entries");
  if (s.u_plus.size() != s.model.n) bad("shock.u_plus", "expected " + std::to_string(s.model.n) + " entries");
  const double rh = check_rh(s.model, s.u_minus, s.u_plus);
  if (rh > 1e-8 * (1.0 + s.u_minus.norm() + s.u_plus.norm())) {
    std::ostringstream msg;
    msg << "end states violate the Rankine-Hugoniot condition (residual " << rh << ")";
    bad("shock", msg.str());
  }
  return s;
}

Scale scale_of(const std::string& s) { return s == "unit" ? Scale::unit : s == "r2" ? Scale::r2 : Scale::r; }

Contour contour_of(const ContourSpec& k) {
  if (k.shape == "semicircle") return semicircle(k.radius, k.re_offset, k.xi);
  if (k.shape == "rectangle") return rectangle(k.lower, k.upper, k.xi);
  return circle(k.center, k.radius, k.xi);
}

std::string table(const std::vector<EvansSample>& samples) {
  std::ostringstream os;
  write_samples(os, samples);
  return os.str();
}

json sample_json(const EvansSample& s) {
  return {{"freq", frequency_json(s.freq)},
          {"D", complex_json(s.D())},
          {"value", complex_json(s.value)},
          {"log_scale", s.log_scale},
          {"conditioning", s.conditioning},
          {"ill_conditioned", s.ill_conditioned}};
}

json contour_json(const ContourResult& r) {
  return {{"winding", r.winding},
          {"phase_sum", r.phase_sum},
          {"samples", r.samples.size()},
          {"refinement_depth", r.refinement_depth}};
}

}  // namespace

std::string run(const RunConfig& c) {
  if (c.task == "print-defaults") return defaults_json();
  const Setup s = setup(c);
  const fs::path out(c.out);
  json summary;
  summary["task"] = c.task;
  summary["system"] = c.system;

  const ShockProfile p = solve_profile(s.model, s.u_minus, s.u_plus, c.profile);
  summary["profile"] = {{"L", p.L()},
                        {"nodes", p.size()},
                        {"residual", profile_residual(s.model, p)},
                        {"nu_minus", p.nu_minus},
                        {"nu_plus", p.nu_plus}};

  WindingOptions wopts = c.winding;
  wopts.jobs = c.jobs;

  if (c.task == "profile") {
    std::ostringstream os;
    write_profile(os, p);
    write_atomic(out / "profile.dat", os.str());
    summary["profile"]["interpolation_defect"] = interpolation_defect(s.model, p);
  } else if (c.task == "eval") {
    const EvansEngine engine(s.model, p, variant_from_string(c.variant), scale_of(c.scale), c.evans);
    std::vector<EvansSample> samples(c.frequencies.size());
    parallel_for(samples.size(), c.jobs, [&](std::size_t i) { samples[i] = engine.evaluate(c.frequencies[i]); });
    write_atomic(out / "samples.dat", table(samples));
    summary["variant"] = c.variant;
    json list = json::array();
    for (const auto& x : samples) list.push_back(sample_json(x));
    summary["samples"] = list;
  } else if (c.task == "contour") {
    const EvansEngine engine(s.model, p, variant_from_string(c.variant), scale_of(c.scale), c.evans);
    const ContourResult r = winding(engine, contour_of(c.contour), wopts);
    write_atomic(out / "contour.dat", table(r.samples));
    summary["variant"] = c.variant;
    summary["contour"] = contour_json(r);
    summary["contour"]["shape"] = c.contour.shape;
  } else if (c.task == "lowfreq") {
    const auto angles = sample_angles(s.model.d, c.lowfreq.angles, c.lowfreq.re_min);
    const LowFrequencyFit fit = fit_low_frequency(s.model, p, angles, c.lowfreq.radii, c.jobs, c.evans);
    std::ostringstream os;
    write_fit_report(os, fit);
    write_atomic(out / "lowfreq.dat", os.str());
    json gammas = json::array(), deltas = json::array(), flagged = json::array();
    for (std::size_t a = 0; a < fit.angles.size(); ++a) {
      gammas.push_back(complex_json(fit.gamma_estimates[a]));
      deltas.push_back(complex_json(fit.delta_values[a]));
      if (fit.unstable[a]) flagged.push_back(a);
    }
    summary["lowfreq"] = {{"spread", fit.spread}, {"gamma", gammas}, {"delta", deltas}, {"inviscid_unstable", flagged}};
  } else if (c.task == "regime-scan") {
    // small |lambda, xi|: D_bf on a half shell; intermediate lambda: D_mbf windings per xi slice
    const EvansEngine bf(s.model, p, Variant::sharp_md, Scale::r, c.evans);
    const EvansEngine mbf(s.model, p, Variant::sharp_md, Scale::r2, c.evans);
    const auto angles = sample_angles(s.model.d, c.scan.shell_samples, c.scan.shell_re_min);
    std::vector<EvansSample> shell(angles.size());
    parallel_for(shell.size(), c.jobs,
                 [&](std::size_t i) { shell[i] = bf.evaluate(angles[i].scaled(1.0 / c.scan.shell_radius)); });
    write_atomic(out / "shell.dat", table(shell));
    double min_abs = std::numeric_limits<double>::infinity(), min_cond = min_abs;
    for (const auto& x : shell) {
      min_abs = std::min(min_abs, std::abs(x.D()));
      min_cond = std::min(min_cond, x.conditioning);
    }
    summary["shell"] = {{"radius", c.scan.shell_radius}, {"min_abs_D", min_abs}, {"min_conditioning", min_cond}};
    std::vector<double> slices = c.scan.xi_slices;
    if (s.model.d == 1) slices = {0.0};
    json list = json::array();
    for (std::size_t k = 0; k < slices.size(); ++k) {
      std::vector<double> xi(s.model.d - 1, 0.0);
      if (!xi.empty()) xi[0] = slices[k];
      const ContourResult r = winding(mbf, semicircle(c.scan.contour_radius, c.scan.shell_radius, xi), wopts);
      write_atomic(out / ("slice_" + std::to_string(k) + ".dat"), table(r.samples));
      json entry = contour_json(r);
      entry["xi"] = slices[k];
      list.push_back(entry);
    }
    summary["slices"] = list;
  }
  const std::string text = summary.dump(2);
  write_atomic(out / "summary.json", text + "\n");
  return text;
}

int error_record(const std::exception& e, std::string& record) {
  json j;
  int code = 3;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = std::string(to_string(err->kind()));
    if (err->kind() == ErrorKind::config || err->kind() == ErrorKind::unknown_system) code = 2;
  } else {
    j["error"] = "internal";
  }
  j["message"] = e.what();
  j["exit_code"] = code;
  record = j.dump();
  return code;
}

}  // namespace evanskit::cli
