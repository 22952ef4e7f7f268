#include <lsa/lsa.h>

#include "config.hpp"
#include "error.hpp"
#include "runner.hpp"
#include "statistics.hpp"
#include "trace_io.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

using namespace lsa;

struct lsa_params {
    LaserParams value;
};

struct lsa_trace {
    Trace value;
};

struct lsa_run {
    std::optional<Profile> profile;
    std::optional<RunConfig> config;
    RunOptions options;
    lsa_progress_fn progress = nullptr;
    void* progress_user = nullptr;
    std::string config_json;
    std::string digest;
    std::string directory;
    std::string summary_json;
    std::string summary_text;

    RunConfig& cfg() {
        if (!config)
            config = default_config(profile.value_or(Profile::ci));
        return *config;
    }
};

namespace {

thread_local std::string last_error;

lsa_status fail(lsa_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
lsa_status guard(F&& f) {
    try {
        f();
        return LSA_OK;
    } catch (const ConfigError& e) {
        return fail(LSA_ERR_CONFIG, e.what());
    } catch (const InvalidArgument& e) {
        return fail(LSA_ERR_INVALID_ARGUMENT, e.what());
    } catch (const NumericalError& e) {
        return fail(LSA_ERR_NUMERICAL, e.what());
    } catch (const IoError& e) {
        return fail(LSA_ERR_IO, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(LSA_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(LSA_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LSA_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* what) {
    if (!p)
        throw InvalidArgument(std::string(what) + " must not be null");
}

DriveWaveform to_core(const lsa_drive& d) {
    DriveWaveform w;
    w.on_current = d.on_current;
    w.off_current = d.off_current;
    w.period = d.period;
    w.on_fraction = d.on_fraction;
    switch (d.filter) {
    case LSA_FILTER_BESSEL:
        w.filter.kind = FilterKind::bessel;
        break;
    case LSA_FILTER_BUTTERWORTH:
        w.filter.kind = FilterKind::butterworth;
        break;
    case LSA_FILTER_NONE:
        w.filter.kind = FilterKind::none;
        break;
    default:
        throw InvalidArgument("unknown filter kind");
    }
    w.filter.order = d.filter_order;
    w.filter.cutoff = d.filter_cutoff;
    w.n_pulses = d.n_pulses;
    return w;
}

InjectionSignal to_core(const lsa_injection& i) {
    InjectionSignal s;
    s.power = i.power;
    if (i.phase_mode != LSA_PHASE_CONSTANT && i.phase_mode != LSA_PHASE_PER_PULSE_UNIFORM)
        throw InvalidArgument("unknown injection phase mode");
    s.phase_mode = i.phase_mode == LSA_PHASE_CONSTANT ? PhaseMode::constant : PhaseMode::per_pulse_uniform;
    s.phase = i.phase;
    s.phase_seed = i.phase_seed;
    s.detuning = i.detuning;
    return s;
}

IntegrationOptions to_core(const lsa_integration& o) {
    IntegrationOptions r;
    r.dt = o.dt;
    r.seed = o.seed;
    r.noise = o.noise != 0;
    r.record_stride = o.record_stride;
    return r;
}

std::int64_t parse_int(const std::string& key, const std::string& v, std::int64_t min) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty() || x < min)
        throw InvalidArgument(key + ": expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    return x;
}

} // namespace

extern "C" {

const char* lsa_version(void) {
    return kToolVersion;
}

const char* lsa_last_error(void) {
    return last_error.c_str();
}

const char* lsa_status_name(lsa_status status) {
    switch (status) {
    case LSA_OK:
        return "ok";
    case LSA_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case LSA_ERR_CONFIG:
        return "configuration error";
    case LSA_ERR_NUMERICAL:
        return "numerical failure";
    case LSA_ERR_IO:
        return "i/o error";
    case LSA_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

int lsa_exit_code(lsa_status status) {
    switch (status) {
    case LSA_OK:
        return 0;
    case LSA_ERR_INVALID_ARGUMENT:
    case LSA_ERR_CONFIG:
        return 2;
    case LSA_ERR_NUMERICAL:
        return 3;
    default:
        return 1;
    }
}

lsa_status lsa_params_create(lsa_params** out) {
    return guard([&] {
        need(out, "out");
        *out = new lsa_params{};
    });
}

lsa_status lsa_params_set(lsa_params* p, const char* key, double value) {
    return guard([&] {
        need(p, "params");
        need(key, "key");
        auto j = laser_to_json(p->value);
        if (!j.contains(key))
            throw InvalidArgument(std::string("unknown laser parameter '") + key + "'");
        j[key] = value;
        p->value = laser_from_json(j);
    });
}

lsa_status lsa_params_get(const lsa_params* p, const char* key, double* value) {
    return guard([&] {
        need(p, "params");
        need(key, "key");
        need(value, "value");
        const auto j = laser_to_json(p->value);
        if (!j.contains(key))
            throw InvalidArgument(std::string("unknown laser parameter '") + key + "'");
        *value = j[key].get<double>();
    });
}

void lsa_params_destroy(lsa_params* p) {
    delete p;
}

lsa_status lsa_threshold_current(const lsa_params* p, double* amps) {
    return guard([&] {
        need(p, "params");
        need(amps, "amps");
        *amps = threshold_current(p->value);
    });
}

lsa_status lsa_power_to_photon_density(const lsa_params* p, double watts, double* per_cm3) {
    return guard([&] {
        need(p, "params");
        need(per_cm3, "per_cm3");
        *per_cm3 = power_to_photon_density(watts, p->value);
    });
}

lsa_status lsa_photon_density_to_power(const lsa_params* p, double per_cm3, double* watts) {
    return guard([&] {
        need(p, "params");
        need(watts, "watts");
        *watts = photon_density_to_power(per_cm3, p->value);
    });
}

void lsa_drive_default(lsa_drive* d) {
    if (!d)
        return;
    const DriveWaveform w;
    d->on_current = w.on_current;
    d->off_current = w.off_current;
    d->period = w.period;
    d->on_fraction = w.on_fraction;
    d->filter = w.filter.kind == FilterKind::bessel        ? LSA_FILTER_BESSEL
                : w.filter.kind == FilterKind::butterworth ? LSA_FILTER_BUTTERWORTH
                                                           : LSA_FILTER_NONE;
    d->filter_order = w.filter.order;
    d->filter_cutoff = w.filter.cutoff;
    d->n_pulses = w.n_pulses;
}

void lsa_injection_default(lsa_injection* inj) {
    if (!inj)
        return;
    const InjectionSignal s;
    inj->power = s.power;
    inj->phase_mode = s.phase_mode == PhaseMode::constant ? LSA_PHASE_CONSTANT : LSA_PHASE_PER_PULSE_UNIFORM;
    inj->phase = s.phase;
    inj->phase_seed = s.phase_seed;
    inj->detuning = s.detuning;
}

void lsa_integration_default(lsa_integration* opt) {
    if (!opt)
        return;
    const IntegrationOptions o;
    opt->dt = o.dt;
    opt->seed = o.seed;
    opt->noise = o.noise ? 1 : 0;
    opt->record_stride = o.record_stride;
}

lsa_status lsa_check_drive(const lsa_params* p, const lsa_drive* d) {
    return guard([&] {
        need(p, "params");
        need(d, "drive");
        require_drive_constraints(to_core(*d), p->value);
    });
}

lsa_status lsa_integrate(const lsa_params* p, const lsa_drive* d, const lsa_injection* inj,
                         const lsa_integration* opt, lsa_trace** out) {
    return guard([&] {
        need(p, "params");
        need(d, "drive");
        need(opt, "options");
        need(out, "out");
        const InjectionSignal s = inj ? to_core(*inj) : InjectionSignal{};
        auto t = std::make_unique<lsa_trace>();
        t->value = integrate(p->value, to_core(*d), s, to_core(*opt));
        *out = t.release();
    });
}

lsa_status lsa_integrate_free_running(const lsa_params* p, const lsa_drive* d, const lsa_integration* opt,
                                      lsa_trace** out) {
    return guard([&] {
        need(p, "params");
        need(d, "drive");
        need(opt, "options");
        need(out, "out");
        auto t = std::make_unique<lsa_trace>();
        t->value = integrate_free_running(p->value, to_core(*d), to_core(*opt));
        *out = t.release();
    });
}

size_t lsa_trace_length(const lsa_trace* t) {
    return t ? t->value.size() : 0;
}

const double* lsa_trace_column(const lsa_trace* t, lsa_column column) {
    if (!t)
        return nullptr;
    const Trace& v = t->value;
    switch (column) {
    case LSA_COL_TIME:
        return v.time.data();
    case LSA_COL_CURRENT:
        return v.current.data();
    case LSA_COL_CARRIER_DENSITY:
        return v.carrier_density.data();
    case LSA_COL_PHOTON_DENSITY:
        return v.photon_density.data();
    case LSA_COL_PHASE:
        return v.phase.data();
    case LSA_COL_POWER:
        return v.power.data();
    }
    return nullptr;
}

lsa_status lsa_trace_stats(const lsa_trace* t, lsa_integration_stats* out) {
    return guard([&] {
        need(t, "trace");
        need(out, "out");
        out->steps = t->value.stats.steps;
        out->photon_clamps = t->value.stats.photon_clamps;
        out->carrier_clamps = t->value.stats.carrier_clamps;
        out->floor_events = t->value.stats.floor_events;
    });
}

lsa_status lsa_trace_save(const lsa_trace* t, const char* path, const char* digest) {
    return guard([&] {
        need(t, "trace");
        need(path, "path");
        save_trace(path, t->value, Provenance{digest ? digest : "", kToolVersion});
    });
}

lsa_status lsa_trace_load(const char* path, lsa_trace** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto t = std::make_unique<lsa_trace>();
        t->value = load_trace(path);
        *out = t.release();
    });
}

lsa_status lsa_trace_pulse_energies(const lsa_trace* t, const lsa_drive* d, int64_t burn_in, double* out,
                                    size_t capacity, size_t* count) {
    return guard([&] {
        need(t, "trace");
        need(d, "drive");
        need(count, "count");
        PulseAnalysisOptions opt;
        opt.burn_in = burn_in;
        const auto e = energy_per_pulse(t->value, to_core(*d), opt);
        *count = e.size();
        if (out) {
            if (capacity < e.size())
                throw InvalidArgument("output buffer holds " + std::to_string(capacity) + " values, " +
                                      std::to_string(e.size()) + " needed");
            std::copy(e.begin(), e.end(), out);
        }
    });
}

void lsa_trace_destroy(lsa_trace* t) {
    delete t;
}

lsa_status lsa_isolation_budget(double eve_max_watts, double threshold_watts, double* decibels) {
    return guard([&] {
        need(decibels, "decibels");
        *decibels = isolation_budget(eve_max_watts, threshold_watts).required_isolation_db;
    });
}

lsa_status lsa_parse_quantity(const char* text, const char* unit, double* value) {
    return guard([&] {
        need(text, "text");
        need(value, "value");
        *value = parse_quantity(text, unit ? unit : "");
    });
}

lsa_status lsa_pearson(const double* x, const double* y, size_t n, double* rho) {
    return guard([&] {
        need(rho, "rho");
        if (n && (!x || !y))
            throw InvalidArgument("series must not be null");
        *rho = pearson(std::vector<double>(x, x + n), std::vector<double>(y, y + n));
    });
}

lsa_status lsa_cross_correlation(const double* x, const double* y, size_t n, int64_t max_lag, int64_t* best_lag,
                                 double* best_rho) {
    return guard([&] {
        need(best_lag, "best_lag");
        need(best_rho, "best_rho");
        if (n && (!x || !y))
            throw InvalidArgument("series must not be null");
        const auto r = cross_correlation_vs_lag(std::vector<double>(x, x + n), std::vector<double>(y, y + n), max_lag);
        *best_lag = r.best_lag;
        *best_rho = r.best_rho;
    });
}

lsa_status lsa_run_create(lsa_run** out) {
    return guard([&] {
        need(out, "out");
        *out = new lsa_run{};
    });
}

lsa_status lsa_run_set_option(lsa_run* run, const char* key_c, const char* value_c) {
    return guard([&] {
        need(run, "run");
        need(key_c, "key");
        need(value_c, "value");
        const std::string key = key_c, v = value_c;
        if (key == "profile") {
            const auto p = profile_from_string(v);
            if (!p)
                throw InvalidArgument("profile: expected ci or paper, got '" + v + "'");
            if (run->config)
                throw InvalidArgument("profile must be set before the config is loaded");
            run->profile = p;
        } else if (key == "scenario") {
            const auto s = scenario_from_string(v);
            if (!s)
                throw InvalidArgument("unknown scenario '" + v + "'");
            run->cfg().scenario = *s;
        } else if (key == "seed") {
            std::size_t used = 0;
            unsigned long long x = 0;
            try {
                x = std::stoull(v, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (v.empty() || v[0] == '-' || used != v.size())
                throw InvalidArgument("seed: expected an unsigned 64-bit integer, got '" + v + "'");
            run->cfg().seed = x;
        } else if (key == "out") {
            if (v.empty())
                throw InvalidArgument("out: directory must not be empty");
            run->cfg().output_dir = v;
        } else if (key == "jobs") {
            run->options.jobs = static_cast<int>(parse_int(key, v, 0));
        } else if (key == "resume") {
            run->options.resume = parse_int(key, v, 0) != 0;
        } else if (key == "eve_max") {
            auto& c = run->cfg();
            c.eve_max_power = parse_quantity(v, "W");
            c.bound_source = BoundSource::custom;
            isolation_budget(c.eve_max_power, c.isolation_threshold);
        } else if (key == "threshold") {
            auto& c = run->cfg();
            c.isolation_threshold = parse_quantity(v, "W");
            isolation_budget(c.eve_max_power, c.isolation_threshold);
        } else if (key == "source") {
            const auto s = bound_source_from_string(v);
            if (!s)
                throw InvalidArgument("unknown bound source '" + v + "'");
            auto& c = run->cfg();
            c.bound_source = *s;
            if (*s != BoundSource::custom)
                c.eve_max_power = preset_power(*s);
        } else {
            throw InvalidArgument("unknown run option '" + key + "'");
        }
    });
}

lsa_status lsa_run_load_config(lsa_run* run, const char* path) {
    return guard([&] {
        need(run, "run");
        need(path, "path");
        run->config = load_config(path, run->profile);
    });
}

lsa_status lsa_run_load_config_string(lsa_run* run, const char* text, const char* origin) {
    return guard([&] {
        need(run, "run");
        need(text, "text");
        run->config = parse_config(text, origin ? origin : "config", run->profile);
    });
}

lsa_status lsa_run_set_progress(lsa_run* run, lsa_progress_fn fn, void* user) {
    return guard([&] {
        need(run, "run");
        run->progress = fn;
        run->progress_user = user;
    });
}

const char* lsa_run_config_json(lsa_run* run) {
    if (!run)
        return "";
    run->config_json = to_json(run->cfg(), true).dump(2);
    return run->config_json.c_str();
}

const char* lsa_run_digest(lsa_run* run) {
    if (!run)
        return "";
    run->digest = config_digest(run->cfg());
    return run->digest.c_str();
}

lsa_status lsa_run_execute(lsa_run* run) {
    return guard([&] {
        need(run, "run");
        RunOptions opt = run->options;
        if (run->progress) {
            auto fn = run->progress;
            auto user = run->progress_user;
            opt.progress = [fn, user](const std::string& line) { fn(line.c_str(), user); };
        }
        const auto res = execute(run->cfg(), opt);
        run->directory = res.directory;
        run->digest = res.digest;
        run->summary_json = res.summary.dump(2);
        run->summary_text = res.summary_text;
    });
}

const char* lsa_run_directory(const lsa_run* run) {
    return run ? run->directory.c_str() : "";
}

const char* lsa_run_summary_json(const lsa_run* run) {
    return run ? run->summary_json.c_str() : "";
}

const char* lsa_run_summary_text(const lsa_run* run) {
    return run ? run->summary_text.c_str() : "";
}

void lsa_run_destroy(lsa_run* run) {
    delete run;
}

} // extern "C"
