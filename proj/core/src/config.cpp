#include "clmcomm/config.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace clmcomm {

using nlohmann::json;

std::vector<TrajectorySpec> ReferenceConfig::moves() const {
    std::vector<TrajectorySpec> out;
    for (double v : v_max) {
        out.push_back({start, end, v, a_max, j_max, dwell});
        out.push_back({end, start, v, a_max, j_max, dwell});
    }
    return out;
}

void ExperimentConfig::validate() const {
    plant.validate();
    initial_params.validate(plant.geometry.coil_count);
    validate_calibration_delta(calibration_delta);
    if (!(calibration_delta > 0.0)) throw ValidationError("config: calibration delta must lie in (0, pi/4]");
    mech.validate();
    if (pid) pid->validate();
    if (!(feedback_bandwidth > 0.0)) throw ValidationError("config: feedback bandwidth must be > 0");
    if (reference.v_max.empty()) throw ValidationError("config: reference needs at least one velocity");
    for (const auto& m : reference.moves()) m.validate();
    if (!(lowpass_hz > 0.0 && lowpass_hz < 0.5 * mech.sample_rate)) {
        throw ValidationError("config: lowpass cutoff must lie in (0, f_s/2)");
    }
    if (log_stride == 0) throw ValidationError("config: log_stride must be >= 1");
    if (training.gain_hidden.empty() || training.cogging_hidden.empty()) {
        throw ValidationError("config: networks need at least one hidden layer");
    }
    if (training.decimation == 0) throw ValidationError("config: decimation must be >= 1");
    if (!(training.learning_rate > 0.0) || training.epochs < 0 || training.ls_interval < 0 || training.lambda < 0.0) {
        throw ValidationError("config: invalid training hyperparameters");
    }
    if (!(guard_margin > 0.0)) throw ValidationError("config: guard margin must be > 0");
}

PidGains ExperimentConfig::feedback_gains() const {
    return pid ? *pid : PidGains::tuned_for_mass(mech.mass, feedback_bandwidth);
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.plant.geometry = MotorGeometry{};
    cfg.plant.coils = {{62.83, -0.51}, {59.17, -0.57}, {61.0, -0.54}};
    ParasiticProfile& p = cfg.plant.parasitics;
    const std::array<double, 3> phase_shift{0.0, 0.9, 1.7};
    for (int l = 0; l < 3; ++l) {
        std::array<HarmonicSeries, 3> axes;
        for (int q = 0; q < 3; ++q) {
            const double s = phase_shift[static_cast<std::size_t>(l)] + 0.4 * q;
            axes[static_cast<std::size_t>(q)] = {{3, 0.08, s}, {5, 0.04, 0.5 + s}};
        }
        p.gain_harmonics.push_back(axes);
    }
    p.cogging[0] = {{1, 1.6, 0.3}, {2, 0.8, -0.7}, {6, 0.3, 1.1}};
    p.cogging[1] = {{1, 0.3, 0.9}, {2, 0.1, 0.2}};
    p.cogging[2] = {{1, 0.03, -0.4}};
    p.noise_std = {0.5, 0.2, 0.02};
    cfg.initial_params = CommutationParams::uniform(3, 67.0, -0.52);
    cfg.training.decimation = 25;
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError("config: '" + path_ + "' must be an object");
    }
    ~Reader() = default;

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ValidationError("config: '" + path_ + "." + key + "': " + e.what());
        }
    }

    bool has(const char* key) {
        seen_.insert(key);
        return obj_.contains(key);
    }
    const json& at(const char* key) const { return obj_.at(key); }
    std::string child(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) throw ValidationError("config: unknown key '" + path_ + "." + item.key() + "'");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

const std::array<const char*, 3> kAxisKeys{"y", "x", "z"};

HarmonicSeries read_series(const json& arr, const std::string& path) {
    if (!arr.is_array()) throw ValidationError("config: '" + path + "' must be an array");
    HarmonicSeries s;
    for (const auto& item : arr) {
        Reader r(item, path + "[]");
        HarmonicTerm t;
        r.get("order", t.order);
        r.get("amplitude", t.amplitude);
        r.get("phase_rad", t.phase);
        r.finish();
        s.push_back(t);
    }
    return s;
}

json write_series(const HarmonicSeries& s) {
    json arr = json::array();
    for (const auto& t : s) arr.push_back({{"order", t.order}, {"amplitude", t.amplitude}, {"phase_rad", t.phase}});
    return arr;
}

std::array<HarmonicSeries, 3> read_axes(const json& obj, const std::string& path) {
    Reader r(obj, path);
    std::array<HarmonicSeries, 3> axes;
    for (std::size_t q = 0; q < 3; ++q) {
        if (r.has(kAxisKeys[q])) axes[q] = read_series(r.at(kAxisKeys[q]), r.child(kAxisKeys[q]));
    }
    r.finish();
    return axes;
}

json write_axes(const std::array<HarmonicSeries, 3>& axes) {
    json obj;
    for (std::size_t q = 0; q < 3; ++q) obj[kAxisKeys[q]] = write_series(axes[q]);
    return obj;
}

// Scalar or per-coil list.
std::vector<double> read_per_coil(const json& value, int coils, const std::string& path) {
    if (value.is_number()) return std::vector<double>(static_cast<std::size_t>(coils), value.get<double>());
    try {
        return value.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ValidationError("config: '" + path + "' must be a number or a list of numbers");
    }
}

void read_motor(const json& obj, ExperimentConfig& cfg) {
    Reader r(obj, "motor");
    MotorTruth& m = cfg.plant;
    if (r.has("geometry")) {
        Reader g(r.at("geometry"), "motor.geometry");
        g.get("coil_count", m.geometry.coil_count);
        g.get("pole_pitch_m", m.geometry.pole_pitch);
        g.get("lever_arm_m", m.geometry.lever_arm);
        g.get("mu", m.geometry.mu);
        g.finish();
    }
    if (r.has("coils")) {
        m.coils.clear();
        for (const auto& item : r.at("coils")) {
            Reader c(item, "motor.coils[]");
            CoilSetTruth t;
            c.get("k_N_per_A", t.k);
            c.get("zeta_rad", t.zeta);
            c.finish();
            m.coils.push_back(t);
        }
    }
    if (r.has("parasitics")) {
        Reader p(r.at("parasitics"), "motor.parasitics");
        ParasiticProfile& prof = m.parasitics;
        if (p.has("gain_ripple")) {
            prof.gain_harmonics.clear();
            const json& arr = p.at("gain_ripple");
            if (!arr.is_array()) throw ValidationError("config: 'motor.parasitics.gain_ripple' must be an array");
            for (const auto& item : arr) prof.gain_harmonics.push_back(read_axes(item, "motor.parasitics.gain_ripple[]"));
        }
        if (p.has("cogging_N")) prof.cogging = read_axes(p.at("cogging_N"), "motor.parasitics.cogging_N");
        p.get("noise_std", prof.noise_std);
        p.finish();
    }
    r.finish();
}

json write_motor(const MotorTruth& m) {
    json coils = json::array();
    for (const auto& c : m.coils) coils.push_back({{"k_N_per_A", c.k}, {"zeta_rad", c.zeta}});
    json ripple = json::array();
    for (const auto& axes : m.parasitics.gain_harmonics) ripple.push_back(write_axes(axes));
    return {{"geometry",
             {{"coil_count", m.geometry.coil_count},
              {"pole_pitch_m", m.geometry.pole_pitch},
              {"lever_arm_m", m.geometry.lever_arm},
              {"mu", m.geometry.mu}}},
            {"coils", coils},
            {"parasitics",
             {{"gain_ripple", ripple},
              {"cogging_N", write_axes(m.parasitics.cogging)},
              {"noise_std", m.parasitics.noise_std}}}};
}

ExperimentConfig from_json(const json& root) {
    ExperimentConfig cfg = default_config();
    Reader r(root, "config");
    if (r.has("motor")) read_motor(r.at("motor"), cfg);
    const int coils = cfg.plant.geometry.coil_count;
    if (r.has("commutation")) {
        Reader c(r.at("commutation"), "commutation");
        if (c.has("k_hat")) cfg.initial_params.k_hat = read_per_coil(c.at("k_hat"), coils, "commutation.k_hat");
        if (c.has("zeta_hat")) {
            cfg.initial_params.zeta_hat = read_per_coil(c.at("zeta_hat"), coils, "commutation.zeta_hat");
        }
        c.finish();
    }
    if (r.has("calibration")) {
        Reader c(r.at("calibration"), "calibration");
        c.get("delta_rad", cfg.calibration_delta);
        c.finish();
    }
    if (r.has("pgnn")) {
        Reader p(r.at("pgnn"), "pgnn");
        TrainingHyperparams& t = cfg.training;
        p.get("gain_hidden", t.gain_hidden);
        p.get("cogging_hidden", t.cogging_hidden);
        p.get("lambda", t.lambda);
        p.get("learning_rate", t.learning_rate);
        p.get("epochs", t.epochs);
        p.get("ls_interval", t.ls_interval);
        p.get("gain_init_scale", t.gain_init_scale);
        p.get("cogging_init_scale", t.cogging_init_scale);
        p.get("decimation", t.decimation);
        p.get("via_commands", cfg.pgnn_via_commands);
        p.finish();
    }
    if (r.has("mechanics")) {
        Reader m(r.at("mechanics"), "mechanics");
        m.get("mass_kg", cfg.mech.mass);
        m.get("viscous_Ns_per_m", cfg.mech.viscous);
        m.get("coulomb_N", cfg.mech.coulomb);
        m.get("sample_rate_Hz", cfg.mech.sample_rate);
        m.finish();
    }
    if (r.has("feedback")) {
        Reader f(r.at("feedback"), "feedback");
        f.get("bandwidth_Hz", cfg.feedback_bandwidth);
        if (f.has("pid")) {
            Reader g(f.at("pid"), "feedback.pid");
            PidGains gains = PidGains::tuned_for_mass(cfg.mech.mass, cfg.feedback_bandwidth);
            g.get("kp_N_per_m", gains.kp);
            g.get("ki_N_per_ms", gains.ki);
            g.get("kd_Ns_per_m", gains.kd);
            g.get("derivative_cutoff_Hz", gains.derivative_cutoff);
            g.get("integrator_limit_N", gains.integrator_limit);
            g.finish();
            cfg.pid = gains;
        }
        f.get("guard_margin_m", cfg.guard_margin);
        f.finish();
    }
    if (r.has("reference")) {
        Reader ref(r.at("reference"), "reference");
        ref.get("start_m", cfg.reference.start);
        ref.get("end_m", cfg.reference.end);
        ref.get("v_max_m_per_s", cfg.reference.v_max);
        ref.get("a_max_m_per_s2", cfg.reference.a_max);
        ref.get("j_max_m_per_s3", cfg.reference.j_max);
        ref.get("dwell_s", cfg.reference.dwell);
        ref.finish();
    }
    r.get("seed", cfg.seed);
    if (r.has("report")) {
        Reader rep(r.at("report"), "report");
        rep.get("lowpass_Hz", cfg.lowpass_hz);
        rep.get("log_stride", cfg.log_stride);
        rep.finish();
    }
    r.finish();
    cfg.validate();
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["motor"] = write_motor(cfg.plant);
    j["commutation"] = {{"k_hat", cfg.initial_params.k_hat}, {"zeta_hat", cfg.initial_params.zeta_hat}};
    j["calibration"] = {{"delta_rad", cfg.calibration_delta}};
    const auto& t = cfg.training;
    j["pgnn"] = {{"gain_hidden", t.gain_hidden},
                 {"cogging_hidden", t.cogging_hidden},
                 {"lambda", t.lambda},
                 {"learning_rate", t.learning_rate},
                 {"epochs", t.epochs},
                 {"ls_interval", t.ls_interval},
                 {"gain_init_scale", t.gain_init_scale},
                 {"cogging_init_scale", t.cogging_init_scale},
                 {"decimation", t.decimation},
                 {"via_commands", cfg.pgnn_via_commands}};
    j["mechanics"] = {{"mass_kg", cfg.mech.mass},
                      {"viscous_Ns_per_m", cfg.mech.viscous},
                      {"coulomb_N", cfg.mech.coulomb},
                      {"sample_rate_Hz", cfg.mech.sample_rate}};
    j["feedback"] = {{"bandwidth_Hz", cfg.feedback_bandwidth}, {"guard_margin_m", cfg.guard_margin}};
    if (cfg.pid) {
        j["feedback"]["pid"] = {{"kp_N_per_m", cfg.pid->kp},
                                {"ki_N_per_ms", cfg.pid->ki},
                                {"kd_Ns_per_m", cfg.pid->kd},
                                {"derivative_cutoff_Hz", cfg.pid->derivative_cutoff},
                                {"integrator_limit_N", cfg.pid->integrator_limit}};
    }
    j["reference"] = {{"start_m", cfg.reference.start},       {"end_m", cfg.reference.end},
                      {"v_max_m_per_s", cfg.reference.v_max}, {"a_max_m_per_s2", cfg.reference.a_max},
                      {"j_max_m_per_s3", cfg.reference.j_max}, {"dwell_s", cfg.reference.dwell}};
    j["seed"] = cfg.seed;
    j["report"] = {{"lowpass_Hz", cfg.lowpass_hz}, {"log_stride", cfg.log_stride}};
    return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return from_json(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : to_json(cfg).dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return buf.data();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace clmcomm
