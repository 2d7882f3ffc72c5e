#include "cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sstedr/sstedr.hpp"

namespace sstedr::cli {
namespace {

namespace fs = std::filesystem;

// Ordered key=value parameter table. Precedence: defaults < config file <
// command-line flags.
class Settings {
 public:
  Settings(std::initializer_list<std::pair<std::string, std::string>> defaults) {
    for (const auto& [k, v] : defaults) {
      order_.push_back(k);
      values_[k] = v;
    }
  }

  bool known(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, std::string value) {
    if (!known(key)) throw InvalidArgument("unknown parameter `" + key + "`");
    values_[key] = std::move(value);
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto body = detail::trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
      const std::string key(detail::trim(body.substr(0, eq)));
      if (!known(key)) throw ParseError(lineno, "unknown parameter `" + key + "`");
      values_[key] = std::string(detail::trim(body.substr(eq + 1)));
    }
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

  double number(const std::string& key) const {
    const auto v = detail::parse_double(text(key));
    if (!v) throw InvalidArgument("parameter `" + key + "` is not a number: " + text(key));
    return *v;
  }

  std::size_t count(const std::string& key) const {
    const auto& s = text(key);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw InvalidArgument("parameter `" + key + "` is not a non-negative integer: " + s);
    }
    return v;
  }

  /// Log lines in config-file syntax, so a run log can be fed back as --config.
  void write(std::ostream& out) const {
    for (const auto& k : order_) out << k << '=' << values_.at(k) << '\n';
  }

  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

std::string flag_name(const std::string& key) {
  std::string s = "--" + key;
  for (char& c : s) c = c == '_' ? '-' : c;
  return s;
}

// Binds one string flag per setting; applied after parsing when present.
struct FlagBinding {
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;

  void bind(CLI::App& app, const Settings& s) {
    for (const auto& k : s.keys()) {
      options[k] = app.add_option(flag_name(k), raw[k], "default " + s.text(k));
    }
  }

  void apply(Settings& s) const {
    for (const auto& [k, opt] : options) {
      if (opt->count() > 0) s.set(k, raw.at(k));
    }
  }
};

struct CommonArgs {
  std::string config;
  std::string out_dir = ".";
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + dir);
  return p;
}

void write_freq_csv(const fs::path& path, const SstMatrix& s, const std::vector<double>& freq) {
  auto out = open_out(path);
  std::vector<double> t(freq.size());
  for (std::size_t m = 0; m < t.size(); ++m) t[m] = s.time(static_cast<Eigen::Index>(m));
  io::write_series(out, "t,freq_hz", t, freq);
  finish(out, path);
}

void write_log(const fs::path& path, std::string_view command, const Settings& s,
               const std::vector<std::pair<std::string, std::string>>& notes) {
  auto out = open_out(path);
  out << "# sstedr " << command << '\n';
  for (const auto& [k, v] : notes) out << "# " << k << '=' << v << '\n';
  s.write(out);
  finish(out, path);
}

// --- sst -------------------------------------------------------------------

int cmd_sst(const std::string& input, const Settings& s, const CommonArgs& common, bool write_matrix,
            std::ostream& out) {
  auto in = open_in(input);
  const auto sig = io::read_signal(in);
  const auto dy = to_dyadic(sig);
  if (dy.size() < 4) throw InvalidArgument("signal too short: need at least 4 samples");

  SstParams p;
  p.wavelet = WaveletSpec(s.number("sigma"));
  p.voices = static_cast<int>(s.count("n_v"));
  p.gamma = s.number("gamma");
  p.n_xi = s.count("n_xi");
  if (p.voices < 1) throw InvalidArgument("n_v must be positive");
  const double lambda = s.number("lambda");

  const auto dir = prepare_out_dir(common.out_dir);
  const auto sst = synchrosqueeze(dy, p);
  const auto ridge = extract_ridge(sst, lambda);
  write_freq_csv(dir / "ridge.csv", sst, ridge.freqs);
  if (write_matrix) {
    auto f = open_out(dir / "sst.csv");
    io::write_sst_magnitude(f, sst);
    finish(f, dir / "sst.csv");
  }
  write_log(dir / "run.log", "sst", s,
            {{"input", input},
             {"samples_read", std::to_string(sig.size())},
             {"samples_used", std::to_string(dy.size())}});
  out << "wrote " << (dir / "ridge.csv").string() << '\n';
  return ok;
}

// --- edr -------------------------------------------------------------------

int cmd_edr(const std::string& ecg_path, const std::string& annotations, const Settings& s,
            const CommonArgs& common, std::ostream& out) {
  auto in = open_in(ecg_path);
  const auto ecg = io::read_signal(in);

  EdrConfig cfg;
  cfg.sigma = s.number("sigma");
  cfg.n_v = static_cast<int>(s.count("n_v"));
  cfg.gamma = s.number("gamma");
  cfg.lambda = s.number("lambda");
  cfg.n_w = s.count("n_w");
  cfg.n_xi = s.count("n_xi");
  cfg.detrend_window_s = s.number("detrend_window");
  cfg.edr_dt = s.number("edr_dt");
  cfg.validate();

  std::optional<EdrResult> result;
  if (annotations.empty()) {
    result = run_edr(ecg, cfg);
  } else {
    auto af = open_in(annotations);
    auto beats = load_annotations(af);
    for (double& t : beats.times) t += ecg.t0();
    result = run_edr(ecg, beats, cfg);
  }

  const auto dir = prepare_out_dir(common.out_dir);
  write_freq_csv(dir / "if_e.csv", result->sst, result->if_e);
  {
    auto f = open_out(dir / "edr.csv");
    io::write_signal(f, result->edr);
    finish(f, dir / "edr.csv");
  }
  const auto& st = result->stats;
  write_log(dir / "run.log", "edr", s,
            {{"input", ecg_path},
             {"beats_source", st.detector_used ? "detector" : "annotations:" + annotations},
             {"polarity", std::string(to_string(st.polarity))},
             {"beats_total", std::to_string(st.beats_total)},
             {"pvc_excluded", std::to_string(st.pvc_excluded)},
             {"pac_retained", std::to_string(st.pac_retained)},
             {"beats_dropped_after_truncation", std::to_string(st.dropped_after_truncation)},
             {"edr_samples", std::to_string(result->edr.size())}});
  out << "wrote " << (dir / "if_e.csv").string() << " and " << (dir / "edr.csv").string() << '\n';
  return ok;
}

// --- eval ------------------------------------------------------------------

std::vector<std::size_t> parse_segments(const std::string& text) {
  std::vector<std::size_t> ks;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = detail::trim(rest.substr(0, comma));
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || v == 0) {
      throw InvalidArgument("segments must be a comma-separated list of positive integers");
    }
    ks.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (ks.empty()) throw InvalidArgument("no segment counts given");
  return ks;
}

// Linear interpolation of (t, v) at x, t strictly increasing and x inside [t0, tN].
double interpolate(const io::Series& s, double x) {
  const auto it = std::upper_bound(s.t.begin(), s.t.end(), x);
  if (it == s.t.begin()) return s.value.front();
  if (it == s.t.end()) return s.value.back();
  const auto i = static_cast<std::size_t>(it - s.t.begin()) - 1;
  const double f = (x - s.t[i]) / (s.t[i + 1] - s.t[i]);
  return s.value[i] + f * (s.value[i + 1] - s.value[i]);
}

int cmd_eval(const std::string& ref_path, const std::string& est_path, const Settings& s,
             const CommonArgs& common, std::ostream& out) {
  auto rin = open_in(ref_path);
  auto ein = open_in(est_path);
  const auto ref = io::read_series(rin, "t,freq_hz");
  const auto est = io::read_series(ein, "t,freq_hz");
  const double dt_ref = io::uniform_step(ref.t);
  const double dt_est = io::uniform_step(est.t);
  const auto ks = parse_segments(s.text("segments"));

  std::vector<double> aligned;
  const bool same_grid = ref.t.size() == est.t.size() && std::abs(ref.t.front() - est.t.front()) <= 1e-6 * dt_ref &&
                         std::abs(dt_ref - dt_est) <= 1e-6 * dt_ref;
  if (same_grid) {
    aligned = est.value;
  } else {
    const double tol = std::max(dt_ref, dt_est);
    if (std::abs(ref.t.front() - est.t.front()) > tol || std::abs(ref.t.back() - est.t.back()) > tol) {
      throw InvalidArgument("reference and estimate cover different time ranges");
    }
    aligned.reserve(ref.t.size());
    for (double t : ref.t) aligned.push_back(interpolate(est, t));
  }

  nlohmann::json doc;
  doc["reference"] = ref_path;
  doc["estimate"] = est_path;
  doc["samples"] = ref.t.size();
  doc["dt"] = dt_ref;
  doc["resampled"] = !same_grid;
  doc["results"] = nlohmann::json::array();
  for (std::size_t k : ks) {
    if (k > ref.t.size()) throw InvalidArgument("K=" + std::to_string(k) + " exceeds the sample count");
    const auto rep = segment_error(ref.value, aligned, dt_ref, k);
    nlohmann::json r;
    r["K"] = k;
    r["segment_seconds"] = static_cast<double>(ref.t.size()) * dt_ref / static_cast<double>(k);
    r["E_K"] = rep.e_k;
    r["E_K_signed"] = rep.e_k_signed;
    r["empty_segments"] = rep.empty_segments;
    r["deltas"] = rep.deltas;
    doc["results"].push_back(std::move(r));
  }

  const auto dir = prepare_out_dir(common.out_dir);
  auto f = open_out(dir / "metrics.json");
  f << doc.dump(2) << '\n';
  finish(f, dir / "metrics.json");
  for (const auto& r : doc["results"]) out << "E_" << r["K"] << " = " << r["E_K"] << " %\n";
  return ok;
}

// --- synth -----------------------------------------------------------------

RespirationSpec respiration_from(const Settings& s, double duration, double dt, double start_hz) {
  return RespirationSpec::chirp(start_hz, s.number("chirp_rate"), duration, dt);
}

int cmd_synth(const Settings& s, const CommonArgs& common, std::ostream& out) {
  const std::string kind = s.text("kind");
  const auto seed = static_cast<std::uint64_t>(s.count("seed"));
  const double duration = s.number("duration");
  const auto dir = prepare_out_dir(common.out_dir);

  if (kind == "respiration") {
    const double dt = s.text("dt").empty() ? 0.05 : s.number("dt");
    auto spec = respiration_from(s, duration, dt, s.number("iif"));
    spec.noise_sd = s.number("noise_sd");
    const auto rec = gen_respiration(spec, seed);
    {
      auto f = open_out(dir / "signal.csv");
      io::write_signal(f, rec.signal);
      finish(f, dir / "signal.csv");
    }
    {
      auto f = open_out(dir / "truth_iif.csv");
      std::vector<double> t(rec.signal.size());
      for (std::size_t m = 0; m < t.size(); ++m) t[m] = rec.signal.time(m);
      io::write_series(f, "t,freq_hz", t, rec.true_iif);
      finish(f, dir / "truth_iif.csv");
    }
    write_log(dir / "run.log", "synth", s, {{"samples", std::to_string(rec.signal.size())}});
    out << "wrote " << (dir / "signal.csv").string() << '\n';
    return ok;
  }
  if (kind != "ecg") throw InvalidArgument("kind must be `respiration` or `ecg`");

  EcgSpec spec;
  spec.dt = s.text("dt").empty() ? 0.001 : s.number("dt");
  spec.duration = duration;
  const std::string rr = s.text("rr");
  if (rr == "metronomic") {
    spec.rr_model = RrModel::metronomic;
  } else if (rr == "af") {
    spec.rr_model = RrModel::af_uniform;
  } else if (rr == "ramp") {
    spec.rr_model = RrModel::ramping;
  } else {
    throw InvalidArgument("rr must be metronomic, af or ramp");
  }
  spec.rr = s.number("rr_mean");
  spec.rr_start = s.number("rr_mean");
  spec.rr_end = s.number("rr_end");
  spec.rr_min = s.number("rr_min");
  spec.rr_max = s.number("rr_max");
  spec.respiration = respiration_from(s, duration, 1.0, s.number("mod_hz"));
  spec.modulation_depth = s.number("mod_depth");
  spec.pac_fraction = s.number("pac_fraction");
  spec.pvc_fraction = s.number("pvc_fraction");
  spec.drift_amplitude = s.number("drift");
  spec.noise_sd = s.number("noise_sd");
  const double truth_dt = s.number("truth_dt");
  if (!(truth_dt > 0.0)) throw InvalidArgument("truth_dt must be positive");

  const auto rec = gen_ecg(spec, seed);
  {
    auto f = open_out(dir / "ecg.csv");
    io::write_signal(f, rec.ecg);
    finish(f, dir / "ecg.csv");
  }
  {
    auto f = open_out(dir / "beats.csv");
    io::write_annotations(f, rec.beats);
    finish(f, dir / "beats.csv");
  }
  {
    auto f = open_out(dir / "truth_iif.csv");
    std::vector<double> t, v;
    for (std::size_t k = 0;; ++k) {
      const double tk = static_cast<double>(k) * truth_dt;
      if (tk > rec.ecg.end_time() + 1e-9) break;
      t.push_back(tk);
      v.push_back(spec.respiration.phase_rate(tk));
    }
    io::write_series(f, "t,freq_hz", t, v);
    finish(f, dir / "truth_iif.csv");
  }
  write_log(dir / "run.log", "synth", s,
            {{"samples", std::to_string(rec.ecg.size())}, {"beats", std::to_string(rec.beats.size())}});
  out << "wrote " << (dir / "ecg.csv").string() << '\n';
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchrosqueezing instantaneous frequency and ECG-derived respiration"};
  app.require_subcommand(1);

  Settings sst_settings{{"sigma", "0.15"}, {"n_v", "32"}, {"gamma", "1e-8"}, {"lambda", "5"},
                        {"n_xi", "512"},   {"seed", "0"}};
  Settings edr_settings{{"sigma", "0.125"}, {"n_v", "32"},          {"gamma", "1e-8"},
                        {"lambda", "10"},   {"n_w", "80"},          {"n_xi", "512"},
                        {"detrend_window", "0.1"}, {"edr_dt", "0.25"}, {"seed", "0"}};
  Settings eval_settings{{"segments", "240,120,20"}, {"seed", "0"}};
  Settings synth_settings{{"kind", "respiration"}, {"seed", "0"},         {"duration", "1200"},
                          {"dt", ""},              {"iif", "0.3"},        {"chirp_rate", "0"},
                          {"noise_sd", "0"},       {"rr", "metronomic"},  {"rr_mean", "0.8"},
                          {"rr_end", "0.7"},       {"rr_min", "0.4"},     {"rr_max", "1.2"},
                          {"mod_hz", "0.25"},      {"mod_depth", "0.2"},  {"pac_fraction", "0"},
                          {"pvc_fraction", "0"},   {"drift", "0"},        {"truth_dt", "0.25"}};

  CommonArgs common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key=value parameter file");
    sub->add_option("--out-dir", common.out_dir, "output directory");
  };

  std::string sst_input;
  bool write_matrix = false;
  auto* sst = app.add_subcommand("sst", "instantaneous frequency of a signal via the synchrosqueezed CWT");
  sst->add_option("input", sst_input, "signal CSV (t,value)")->required();
  sst->add_flag("--write-sst", write_matrix, "also write the squeezed magnitude matrix (sst.csv)");
  add_common(sst);
  FlagBinding sst_flags;
  sst_flags.bind(*sst, sst_settings);

  std::string ecg_input, annotations;
  auto* edr = app.add_subcommand("edr", "ECG-derived respiration");
  edr->add_option("ecg", ecg_input, "ECG CSV (t,value)")->required();
  edr->add_option("--annotations", annotations, "beat annotations (t,label); detector used if absent");
  add_common(edr);
  FlagBinding edr_flags;
  edr_flags.bind(*edr, edr_settings);

  std::string ref_input, est_input;
  auto* eval = app.add_subcommand("eval", "segment-median relative error between two IF series");
  eval->add_option("reference", ref_input, "reference IF CSV (t,freq_hz)")->required();
  eval->add_option("estimate", est_input, "estimated IF CSV (t,freq_hz)")->required();
  add_common(eval);
  FlagBinding eval_flags;
  eval_flags.bind(*eval, eval_settings);

  auto* synth = app.add_subcommand("synth", "synthetic respiration or ECG with ground truth");
  add_common(synth);
  FlagBinding synth_flags;
  synth_flags.bind(*synth, synth_settings);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return input_error;
  }

  const auto configure = [&](Settings& s, const FlagBinding& flags) {
    if (!common.config.empty()) s.load_file(common.config);
    flags.apply(s);
  };

  try {
    if (sst->parsed()) {
      configure(sst_settings, sst_flags);
      return cmd_sst(sst_input, sst_settings, common, write_matrix, out);
    }
    if (edr->parsed()) {
      configure(edr_settings, edr_flags);
      return cmd_edr(ecg_input, annotations, edr_settings, common, out);
    }
    if (eval->parsed()) {
      configure(eval_settings, eval_flags);
      return cmd_eval(ref_input, est_input, eval_settings, common, out);
    }
    configure(synth_settings, synth_flags);
    return cmd_synth(synth_settings, common, out);
  } catch (const InsufficientBeats& e) {
    err << "error: " << e.what() << '\n';
    return insufficient_beats;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return degenerate_sst;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return input_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal_error;
  }
}

}  // namespace sstedr::cli
