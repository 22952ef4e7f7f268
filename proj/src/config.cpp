#include "config.hpp"

#include "error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace lsa {

using nlohmann::json;

const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::simulate:
        return "simulate";
    case Scenario::sweep_current:
        return "sweep-current";
    case Scenario::sweep_power:
        return "sweep-power";
    case Scenario::correlate:
        return "correlate";
    case Scenario::isolation:
        return "isolation";
    }
    return "?";
}

const char* to_string(Profile p) {
    return p == Profile::ci ? "ci" : "paper";
}

std::optional<Scenario> scenario_from_string(const std::string& s) {
    for (auto v : {Scenario::simulate, Scenario::sweep_current, Scenario::sweep_power, Scenario::correlate,
                   Scenario::isolation})
        if (s == to_string(v))
            return v;
    return std::nullopt;
}

std::optional<Profile> profile_from_string(const std::string& s) {
    if (s == "ci")
        return Profile::ci;
    if (s == "paper")
        return Profile::paper;
    return std::nullopt;
}

namespace {

const char* name_of(FilterKind k) {
    switch (k) {
    case FilterKind::bessel:
        return "bessel";
    case FilterKind::butterworth:
        return "butterworth";
    case FilterKind::none:
        return "none";
    }
    return "?";
}

const char* name_of(PhaseMode m) {
    switch (m) {
    case PhaseMode::constant:
        return "constant";
    case PhaseMode::per_pulse_uniform:
        return "per_pulse_uniform";
    case PhaseMode::sequence:
        return "sequence";
    }
    return "?";
}

const char* name_of(EveMode m) {
    return m == EveMode::reference ? "reference" : "simulated";
}

const char* name_of(Phi0Policy p) {
    return p == Phi0Policy::fixed ? "fixed" : "uniform_per_trial";
}

const char* name_of(TraceFormat f) {
    switch (f) {
    case TraceFormat::csv:
        return "csv";
    case TraceFormat::binary:
        return "binary";
    case TraceFormat::none:
        return "none";
    }
    return "?";
}

const char* name_of(BoundSource b) {
    return to_string(b);
}

std::vector<double> scaled(const std::vector<double>& v, double k) {
    std::vector<double> out;
    for (double x : v)
        out.push_back(x * k);
    return out;
}

// Division keeps whole milliamps exact on the way back out.
std::vector<double> from_milli(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v)
        out.push_back(x / 1e3);
    return out;
}

std::vector<double> milliamp_range(int lo, int hi) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i)
        v.push_back(i / 1e3);
    return v;
}

/// Finds the line of a nested key by scanning for each quoted component in
/// turn. Good enough for hand-written configs; falls back to line 1.
std::size_t line_of(const std::string& text, const std::vector<std::string>& path) {
    std::size_t pos = 0;
    for (const auto& key : path) {
        const std::string quoted = "\"" + key + "\"";
        std::size_t found = std::string::npos;
        for (std::size_t at = text.find(quoted, pos); at != std::string::npos; at = text.find(quoted, at + 1)) {
            std::size_t k = at + quoted.size();
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k])))
                ++k;
            if (k < text.size() && text[k] == ':') {
                found = at;
                break;
            }
        }
        if (found == std::string::npos)
            return pos == 0 ? 1 : static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')) + 1;
        pos = found + 1;
    }
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')) + 1;
}

std::string join_path(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& p : path)
        s += (s.empty() ? "" : ".") + p;
    return s;
}

class Reader {
public:
    Reader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
        std::ostringstream os;
        os << origin_ << ":" << line_of(text_, path) << ": '" << join_path(path) << "': " << msg;
        throw ConfigError(os.str());
    }

    double number(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_number())
            fail(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            fail(path, "must be finite");
        return d;
    }

    double positive(const json& v, const std::vector<std::string>& path) const {
        const double d = number(v, path);
        if (!(d > 0.0))
            fail(path, "must be > 0");
        return d;
    }

    double non_negative(const json& v, const std::vector<std::string>& path) const {
        const double d = number(v, path);
        if (!(d >= 0.0))
            fail(path, "must be >= 0");
        return d;
    }

    std::int64_t integer(const json& v, const std::vector<std::string>& path, std::int64_t min) const {
        if (!v.is_number_integer())
            fail(path, "expected an integer");
        const auto i = v.get<std::int64_t>();
        if (i < min)
            fail(path, "must be >= " + std::to_string(min));
        return i;
    }

    std::uint64_t unsigned_integer(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_number_unsigned())
            fail(path, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_boolean())
            fail(path, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_string())
            fail(path, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const std::vector<std::string>& path, bool allow_empty = false) const {
        if (!v.is_array())
            fail(path, "expected an array of numbers");
        if (v.empty() && !allow_empty)
            fail(path, "must not be empty");
        std::vector<double> out;
        for (const auto& e : v)
            out.push_back(non_negative(e, path));
        return out;
    }

    template <class Enum>
    Enum choice(const json& v, const std::vector<std::string>& path, std::initializer_list<Enum> values) const {
        const auto s = string(v, path);
        std::string allowed;
        for (auto e : values) {
            if (s == to_string_any(e))
                return e;
            allowed += (allowed.empty() ? "" : ", ") + std::string(to_string_any(e));
        }
        fail(path, "unknown value '" + s + "' (expected one of: " + allowed + ")");
    }

    /// Walks the members of an object section, rejecting unknown keys.
    template <class F>
    void section(const json& obj, const std::vector<std::string>& path, std::initializer_list<const char*> allowed,
                 F&& handle) const {
        if (!obj.is_object())
            fail(path, "expected an object");
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            auto sub = path;
            sub.push_back(it.key());
            if (!keys.count(it.key())) {
                std::string list;
                for (const auto& k : keys)
                    list += (list.empty() ? "" : ", ") + k;
                fail(sub, "unknown key (allowed: " + list + ")");
            }
            handle(it.key(), it.value(), sub);
        }
    }

private:
    template <class E>
    static const char* to_string_any(E e) {
        return name_of(e);
    }

    const std::string& text_;
    std::string origin_;
};

void read_laser(const Reader& r, const json& obj, const std::vector<std::string>& path, LaserParams& p) {
    r.section(obj, path,
              {"tau_n_ns", "tau_p_ps", "g_cm3_per_s", "epsilon_cm3", "N0_per_cm3", "beta", "alpha", "eta", "V_cm3",
               "Gamma", "kappa_per_s", "lambda0_nm", "q_C", "h_J_s"},
              [&](const std::string& k, const json& v, const std::vector<std::string>& sub) {
                  const double x = r.positive(v, sub);
                  if (k == "tau_n_ns")
                      p.carrier_lifetime = x / 1e9;
                  else if (k == "tau_p_ps")
                      p.photon_lifetime = x / 1e12;
                  else if (k == "g_cm3_per_s")
                      p.differential_gain = x;
                  else if (k == "epsilon_cm3")
                      p.gain_compression = x;
                  else if (k == "N0_per_cm3")
                      p.transparency_density = x;
                  else if (k == "beta")
                      p.spontaneous_coupling = x;
                  else if (k == "alpha")
                      p.linewidth_enhancement = x;
                  else if (k == "eta")
                      p.quantum_efficiency = x;
                  else if (k == "V_cm3")
                      p.active_volume = x;
                  else if (k == "Gamma")
                      p.confinement = x;
                  else if (k == "kappa_per_s")
                      p.injection_coupling = x;
                  else if (k == "lambda0_nm")
                      p.wavelength = x / 1e9;
                  else if (k == "q_C")
                      p.elementary_charge = x;
                  else if (k == "h_J_s")
                      p.planck = x;
              });
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        r.fail(path, e.what());
    }
}

} // namespace

json laser_to_json(const LaserParams& p) {
    return {{"tau_n_ns", p.carrier_lifetime * 1e9},
            {"tau_p_ps", p.photon_lifetime * 1e12},
            {"g_cm3_per_s", p.differential_gain},
            {"epsilon_cm3", p.gain_compression},
            {"N0_per_cm3", p.transparency_density},
            {"beta", p.spontaneous_coupling},
            {"alpha", p.linewidth_enhancement},
            {"eta", p.quantum_efficiency},
            {"V_cm3", p.active_volume},
            {"Gamma", p.confinement},
            {"kappa_per_s", p.injection_coupling},
            {"lambda0_nm", p.wavelength * 1e9},
            {"q_C", p.elementary_charge},
            {"h_J_s", p.planck}};
}

LaserParams laser_from_json(const json& obj) {
    const std::string text = obj.dump();
    Reader r(text, "laser");
    LaserParams p;
    read_laser(r, obj, {}, p);
    return p;
}

namespace {

void apply_document(const Reader& r, const json& doc, RunConfig& c) {
    r.section(
        doc, {},
        {"scenario", "profile", "seed", "dt_fs", "noise", "laser", "eve_laser", "drive", "injection", "analysis",
         "constraints", "simulate", "sweep_current", "sweep_power", "correlate", "isolation", "output"},
        [&](const std::string& k, const json& v, const std::vector<std::string>& sub) {
            if (k == "scenario") {
                const auto s = scenario_from_string(r.string(v, sub));
                if (!s)
                    r.fail(sub, "unknown scenario (expected simulate, sweep-current, sweep-power, correlate, isolation)");
                c.scenario = *s;
            } else if (k == "profile") {
                // already resolved by the caller
            } else if (k == "seed") {
                c.seed = r.unsigned_integer(v, sub);
            } else if (k == "dt_fs") {
                c.dt = r.positive(v, sub) / 1e15;
            } else if (k == "noise") {
                c.noise = r.boolean(v, sub);
            } else if (k == "laser") {
                read_laser(r, v, sub, c.laser);
            } else if (k == "eve_laser") {
                read_laser(r, v, sub, c.eve_laser);
            } else if (k == "drive") {
                r.section(v, sub,
                          {"I_on_mA", "I_off_mA", "period_ns", "on_fraction", "filter", "filter_order",
                           "filter_bw_GHz", "n_pulses"},
                          [&](const std::string& dk, const json& dv, const std::vector<std::string>& ds) {
                              if (dk == "I_on_mA")
                                  c.drive.on_current = r.non_negative(dv, ds) / 1e3;
                              else if (dk == "I_off_mA")
                                  c.drive.off_current = r.non_negative(dv, ds) / 1e3;
                              else if (dk == "period_ns")
                                  c.drive.period = r.positive(dv, ds) / 1e9;
                              else if (dk == "on_fraction") {
                                  if (dv.is_string()) {
                                      if (dv.get<std::string>() != "auto")
                                          r.fail(ds, "expected a number in (0, 1) or \"auto\"");
                                      c.auto_duty = true;
                                  } else {
                                      c.drive.on_fraction = r.positive(dv, ds);
                                      if (!(c.drive.on_fraction < 1.0))
                                          r.fail(ds, "must lie in (0, 1)");
                                      c.auto_duty = false;
                                  }
                              } else if (dk == "filter")
                                  c.drive.filter.kind = r.choice(dv, ds, {FilterKind::bessel, FilterKind::butterworth,
                                                                          FilterKind::none});
                              else if (dk == "filter_order") {
                                  c.drive.filter.order = static_cast<int>(r.integer(dv, ds, 1));
                                  if (c.drive.filter.order > 8)
                                      r.fail(ds, "must be <= 8");
                              } else if (dk == "filter_bw_GHz")
                                  c.drive.filter.cutoff = r.positive(dv, ds) * 1e9;
                              else if (dk == "n_pulses")
                                  c.drive.n_pulses = r.integer(dv, ds, 1);
                          });
            } else if (k == "injection") {
                r.section(v, sub, {"P_inj_W", "phase_mode", "phase_rad", "detuning_rad_per_s"},
                          [&](const std::string& ik, const json& iv, const std::vector<std::string>& is) {
                              if (ik == "P_inj_W")
                                  c.injection.power = r.non_negative(iv, is);
                              else if (ik == "phase_mode")
                                  c.injection.phase_mode =
                                      r.choice(iv, is, {PhaseMode::constant, PhaseMode::per_pulse_uniform});
                              else if (ik == "phase_rad")
                                  c.injection.phase = r.number(iv, is);
                              else if (ik == "detuning_rad_per_s")
                                  c.injection.detuning = r.number(iv, is);
                          });
            } else if (k == "analysis") {
                r.section(v, sub, {"burn_in_periods"},
                          [&](const std::string&, const json& av, const std::vector<std::string>& as) {
                              c.analysis.burn_in = r.integer(av, as, 0);
                          });
            } else if (k == "constraints") {
                r.section(v, sub, {"enforce"}, [&](const std::string&, const json& cv, const std::vector<std::string>& cs) {
                    c.enforce_constraints = r.boolean(cv, cs);
                });
            } else if (k == "simulate") {
                r.section(v, sub, {"record_stride", "trace_format"},
                          [&](const std::string& sk, const json& sv, const std::vector<std::string>& ss) {
                              if (sk == "record_stride")
                                  c.record_stride = r.integer(sv, ss, 1);
                              else
                                  c.trace_format =
                                      r.choice(sv, ss, {TraceFormat::csv, TraceFormat::binary, TraceFormat::none});
                          });
            } else if (k == "sweep_current") {
                r.section(v, sub, {"I_on_mA", "I_off_mA", "P_inj_W", "auto_duty", "min_lasing_fraction"},
                          [&](const std::string& sk, const json& sv, const std::vector<std::string>& ss) {
                              if (sk == "I_on_mA")
                                  c.sweep_on_currents = from_milli(r.numbers(sv, ss));
                              else if (sk == "I_off_mA")
                                  c.sweep_off_currents = from_milli(r.numbers(sv, ss));
                              else if (sk == "P_inj_W")
                                  c.sweep_injected_power = r.non_negative(sv, ss);
                              else if (sk == "auto_duty")
                                  c.sweep_auto_duty = r.boolean(sv, ss);
                              else if (sk == "min_lasing_fraction") {
                                  c.min_lasing_fraction = r.non_negative(sv, ss);
                                  if (c.min_lasing_fraction > 1.0)
                                      r.fail(ss, "must be <= 1");
                              }
                          });
            } else if (k == "sweep_power") {
                r.section(v, sub, {"P_inj_W", "shape_stride"},
                          [&](const std::string& sk, const json& sv, const std::vector<std::string>& ss) {
                              if (sk == "P_inj_W")
                                  c.power_grid = r.numbers(sv, ss);
                              else
                                  c.shape_stride = r.integer(sv, ss, 1);
                          });
            } else if (k == "correlate") {
                r.section(v, sub,
                          {"P_inj_W", "n_trials", "pulses_per_trial", "phase_mode", "eve_mode", "phi0_policy",
                           "phi0_alice_rad", "phi0_eve_rad", "max_lag_pulses", "ceiling_P_inj_W",
                           "randomness_pulses"},
                          [&](const std::string& sk, const json& sv, const std::vector<std::string>& ss) {
                              if (sk == "P_inj_W")
                                  c.correlate_powers = r.numbers(sv, ss);
                              else if (sk == "n_trials")
                                  c.n_trials = r.integer(sv, ss, 2);
                              else if (sk == "pulses_per_trial")
                                  c.pulses_per_trial = r.integer(sv, ss, 10);
                              else if (sk == "phase_mode")
                                  c.correlate_phase_mode =
                                      r.choice(sv, ss, {PhaseMode::constant, PhaseMode::per_pulse_uniform});
                              else if (sk == "eve_mode")
                                  c.eve_mode = r.choice(sv, ss, {EveMode::reference, EveMode::simulated});
                              else if (sk == "phi0_policy")
                                  c.phi0_policy = r.choice(sv, ss, {Phi0Policy::fixed, Phi0Policy::uniform_per_trial});
                              else if (sk == "phi0_alice_rad")
                                  c.phi0_alice = r.number(sv, ss);
                              else if (sk == "phi0_eve_rad")
                                  c.phi0_eve = r.number(sv, ss);
                              else if (sk == "max_lag_pulses")
                                  c.max_lag = r.integer(sv, ss, 0);
                              else if (sk == "ceiling_P_inj_W")
                                  c.ceiling_power = r.positive(sv, ss);
                              else if (sk == "randomness_pulses") {
                                  c.randomness_pulses = r.integer(sv, ss, 0);
                                  if (c.randomness_pulses != 0 && c.randomness_pulses < 200)
                                      r.fail(ss, "must be 0 (disabled) or >= 200");
                              }
                          });
            } else if (k == "isolation") {
                r.section(v, sub, {"eve_max_W", "threshold_W", "source"},
                          [&](const std::string& sk, const json& sv, const std::vector<std::string>& ss) {
                              if (sk == "eve_max_W")
                                  c.eve_max_power = r.positive(sv, ss);
                              else if (sk == "threshold_W")
                                  c.isolation_threshold = r.positive(sv, ss);
                              else
                                  c.bound_source = r.choice(sv, ss, {BoundSource::lidt, BoundSource::fuse,
                                                                     BoundSource::power_limiter, BoundSource::custom});
                          });
            } else if (k == "output") {
                r.section(v, sub, {"dir"}, [&](const std::string&, const json& ov, const std::vector<std::string>& os) {
                    c.output_dir = r.string(ov, os);
                    if (c.output_dir.empty())
                        r.fail(os, "must not be empty");
                });
            }
        });
}

void check_consistency(const Reader& r, const RunConfig& c) {
    try {
        c.drive.validate();
    } catch (const InvalidArgument& e) {
        r.fail({"drive"}, e.what());
    }
    if (c.drive.n_pulses <= c.analysis.burn_in)
        r.fail({"drive", "n_pulses"}, "must exceed analysis.burn_in_periods");
    if (c.dt > c.laser.photon_lifetime / 10.0)
        r.fail({"dt_fs"}, "exceeds laser.tau_p/10 (integration would be unstable)");
    if (c.dt > c.drive.period / 100.0)
        r.fail({"dt_fs"}, "exceeds drive period/100");
    if (c.drive.filter.kind != FilterKind::none && !(c.drive.filter.cutoff * c.dt < 0.5))
        r.fail({"drive", "filter_bw_GHz"}, "lies above the Nyquist frequency of the integration step");
    const auto spp = std::llround(c.drive.period / c.dt);
    if (c.record_stride > 0 && spp % c.record_stride != 0)
        r.fail({"simulate", "record_stride"}, "must divide the samples per period (" + std::to_string(spp) + ")");
    if (c.pulses_per_trial <= 2 * c.max_lag)
        r.fail({"correlate", "max_lag_pulses"}, "must be below half of pulses_per_trial");
}

} // namespace

RunConfig default_config(Profile profile) {
    RunConfig c;
    c.profile = profile;
    c.drive.on_current = 0.120;
    c.drive.off_current = 0.080;
    c.drive.on_fraction = 0.5;
    c.sweep_on_currents = milliamp_range(15, 24);
    c.sweep_off_currents = milliamp_range(0, 9);
    c.power_grid = {0.0, 1e-9, 10e-9, 100e-9};
    if (profile == Profile::ci) {
        c.drive.n_pulses = 2000 + c.analysis.burn_in;
        c.n_trials = 20;
        c.pulses_per_trial = 2000;
        c.randomness_pulses = 5000;
        c.correlate_powers = {0.0, 0.1e-9, 1e-9, 10e-9, 100e-9};
    } else {
        c.drive.n_pulses = 25000 + c.analysis.burn_in;
        c.n_trials = 50;
        c.pulses_per_trial = 25000;
        c.randomness_pulses = 25000;
        c.correlate_powers = {0.0, 0.1e-9, 1e-9, 10e-9, 100e-9, 1e-6, 10e-6, 100e-6, 480e-6};
    }
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& origin, std::optional<Profile> profile_override) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto ? upto - 1 : 0), '\n') + 1;
        std::ostringstream os;
        os << origin << ":" << line << ": invalid JSON: " << e.what();
        throw ConfigError(os.str());
    }
    Reader r(text, origin);
    if (!doc.is_object())
        r.fail({}, "config must be a JSON object");
    // A manifest embeds the effective config under "config".
    if (doc.contains("manifest_version")) {
        if (!doc.contains("config") || !doc["config"].is_object())
            r.fail({"config"}, "manifest has no config object");
        doc = doc["config"];
    }
    Profile profile = Profile::ci;
    if (doc.contains("profile")) {
        const auto p = profile_from_string(r.string(doc["profile"], {"profile"}));
        if (!p)
            r.fail({"profile"}, "expected \"ci\" or \"paper\"");
        profile = *p;
    }
    if (profile_override)
        profile = *profile_override;
    RunConfig c = default_config(profile);
    apply_document(r, doc, c);
    if (!doc.contains("drive") || !doc["drive"].contains("n_pulses"))
        c.drive.n_pulses = (profile == Profile::ci ? 2000 : 25000) + c.analysis.burn_in;
    if (!doc.contains("eve_laser"))
        c.eve_laser = c.laser;
    check_consistency(r, c);
    return c;
}

RunConfig load_config(const std::string& path, std::optional<Profile> profile_override) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path, profile_override);
}

json to_json(const RunConfig& c, bool include_output) {
    json j;
    j["scenario"] = to_string(c.scenario);
    j["profile"] = to_string(c.profile);
    j["seed"] = c.seed;
    j["dt_fs"] = c.dt * 1e15;
    j["noise"] = c.noise;
    j["laser"] = laser_to_json(c.laser);
    j["eve_laser"] = laser_to_json(c.eve_laser);
    json drive = {{"I_on_mA", c.drive.on_current * 1e3},
                  {"I_off_mA", c.drive.off_current * 1e3},
                  {"period_ns", c.drive.period * 1e9},
                  {"filter", name_of(c.drive.filter.kind)},
                  {"filter_order", c.drive.filter.order},
                  {"filter_bw_GHz", c.drive.filter.cutoff / 1e9},
                  {"n_pulses", c.drive.n_pulses}};
    if (c.auto_duty)
        drive["on_fraction"] = "auto";
    else
        drive["on_fraction"] = c.drive.on_fraction;
    j["drive"] = drive;
    j["injection"] = {{"P_inj_W", c.injection.power},
                      {"phase_mode", name_of(c.injection.phase_mode)},
                      {"phase_rad", c.injection.phase},
                      {"detuning_rad_per_s", c.injection.detuning}};
    j["analysis"] = {{"burn_in_periods", c.analysis.burn_in}};
    j["constraints"] = {{"enforce", c.enforce_constraints}};
    j["simulate"] = {{"record_stride", c.record_stride}, {"trace_format", name_of(c.trace_format)}};
    j["sweep_current"] = {{"I_on_mA", scaled(c.sweep_on_currents, 1e3)},
                          {"I_off_mA", scaled(c.sweep_off_currents, 1e3)},
                          {"P_inj_W", c.sweep_injected_power},
                          {"auto_duty", c.sweep_auto_duty},
                          {"min_lasing_fraction", c.min_lasing_fraction}};
    j["sweep_power"] = {{"P_inj_W", c.power_grid}, {"shape_stride", c.shape_stride}};
    j["correlate"] = {{"P_inj_W", c.correlate_powers},
                      {"n_trials", c.n_trials},
                      {"pulses_per_trial", c.pulses_per_trial},
                      {"phase_mode", name_of(c.correlate_phase_mode)},
                      {"eve_mode", name_of(c.eve_mode)},
                      {"phi0_policy", name_of(c.phi0_policy)},
                      {"phi0_alice_rad", c.phi0_alice},
                      {"phi0_eve_rad", c.phi0_eve},
                      {"max_lag_pulses", c.max_lag},
                      {"ceiling_P_inj_W", c.ceiling_power},
                      {"randomness_pulses", c.randomness_pulses}};
    j["isolation"] = {{"eve_max_W", c.eve_max_power},
                      {"threshold_W", c.isolation_threshold},
                      {"source", name_of(c.bound_source)}};
    if (include_output)
        j["output"] = {{"dir", c.output_dir}};
    return j;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string config_digest(const RunConfig& cfg) {
    return sha256_hex(to_json(cfg, false).dump());
}

double parse_quantity(const std::string& text, const std::string& unit) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || !std::isfinite(value))
        throw InvalidArgument("'" + text + "' does not start with a number");
    std::string rest(res.ptr, end);
    if (rest.empty()) {
        if (unit.empty())
            return value;
        throw InvalidArgument("'" + text + "' is missing the unit " + unit);
    }
    if (rest.size() < unit.size() || rest.compare(rest.size() - unit.size(), unit.size(), unit) != 0)
        throw InvalidArgument("'" + text + "' must end with the unit " + (unit.empty() ? "(none)" : unit));
    const std::string prefix = rest.substr(0, rest.size() - unit.size());
    static const std::pair<const char*, double> table[] = {
        {"", 1.0},     {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xC2\xB5", 1e-6},
        {"m", 1e-3},   {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12},
    };
    for (const auto& [name, scale] : table)
        if (prefix == name)
            return value * scale;
    throw InvalidArgument("'" + text + "' has an unknown SI prefix '" + prefix + "'");
}

} // namespace lsa
