#include "clmcomm/serialization.hpp"

#include "clmcomm/csv.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace clmcomm {

using nlohmann::json;

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd parse_matrix(const json& rows, Eigen::Index expect_rows, Eigen::Index expect_cols, const char* what) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != expect_rows) {
        throw ValidationError(std::string("model: bad row count for ") + what);
    }
    Eigen::MatrixXd m(expect_rows, expect_cols);
    for (Eigen::Index r = 0; r < expect_rows; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expect_cols) {
            throw ValidationError(std::string("model: bad column count for ") + what);
        }
        for (Eigen::Index c = 0; c < expect_cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd parse_vector(const json& arr) {
    const auto v = arr.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mlp_json(const Mlp& net) {
    json layers = json::array();
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        layers.push_back({{"weights", matrix_rows(net.weights[i])}, {"biases", vector_json(net.biases[i])}});
    }
    return {{"widths", net.widths()}, {"activation", "tanh"}, {"layers", layers}};
}

Mlp parse_mlp(const json& j) {
    const auto widths = j.at("widths").get<std::vector<int>>();
    Mlp net = Mlp::zeros(widths);
    const json& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != net.weights.size()) throw ValidationError("model: layer count mismatch");
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        net.weights[i] = parse_matrix(layers[i].at("weights"), net.weights[i].rows(), net.weights[i].cols(), "weights");
        net.biases[i] = parse_vector(layers[i].at("biases"));
    }
    net.validate();
    return net;
}

json coil_json(const PgnnCoilModel& m, const Eigen::VectorXd* anchor) {
    json j = {{"pole_pitch_m", m.pole_pitch},
              {"input_scaling", {{"center_m", m.scaling.center}, {"half_span_m", m.scaling.half_span}}},
              {"A", matrix_rows(m.a)},
              {"B", matrix_rows(m.b)},
              {"gain_a", mlp_json(m.gain_a)},
              {"gain_b", mlp_json(m.gain_b)},
              {"cogging", mlp_json(m.cogging)}};
    if (anchor && anchor->size() > 0) j["anchor"] = vector_json(*anchor);
    return j;
}

PgnnCoilModel parse_coil(const json& j, Eigen::VectorXd* anchor) {
    PgnnCoilModel m;
    m.pole_pitch = j.at("pole_pitch_m").get<double>();
    m.scaling.center = j.at("input_scaling").at("center_m").get<double>();
    m.scaling.half_span = j.at("input_scaling").at("half_span_m").get<double>();
    m.a = parse_matrix(j.at("A"), 3, 2, "A");
    m.b = parse_matrix(j.at("B"), 3, 2, "B");
    m.gain_a = parse_mlp(j.at("gain_a"));
    m.gain_b = parse_mlp(j.at("gain_b"));
    m.cogging = parse_mlp(j.at("cogging"));
    m.validate();
    if (anchor) {
        *anchor = j.contains("anchor") ? parse_vector(j.at("anchor")) : Eigen::VectorXd();
        if (anchor->size() != 0 && anchor->size() != 12) throw ValidationError("model: anchor needs 12 entries");
    }
    return m;
}

json params_json(const CommutationParams& p) { return {{"k_hat", p.k_hat}, {"zeta_hat", p.zeta_hat}}; }

CommutationParams parse_params(const json& j) {
    CommutationParams p;
    p.k_hat = j.at("k_hat").get<std::vector<double>>();
    p.zeta_hat = j.at("zeta_hat").get<std::vector<double>>();
    p.validate(p.coil_count());
    return p;
}

// Wraps JSON library failures so callers see validation errors only.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string model_to_json(const StoredModel& stored) {
    json coils = json::array();
    for (std::size_t l = 0; l < stored.model.coils.size(); ++l) {
        const Eigen::VectorXd* anchor = l < stored.anchors.size() ? &stored.anchors[l] : nullptr;
        coils.push_back(coil_json(stored.model.coils[l], anchor));
    }
    json j = {{"format", "clmcomm-pgnn"}, {"version", kModelFormatVersion}, {"coils", coils}};
    if (stored.fixed) j["fixed_commutation"] = params_json(*stored.fixed);
    return j.dump(2) + "\n";
}

StoredModel parse_model_json(const std::string& text) {
    return guarded("model", [&] {
        const json j = json::parse(text);
        if (j.value("format", "") != "clmcomm-pgnn") throw ValidationError("model: not a PGNN model document");
        if (j.at("version").get<int>() != kModelFormatVersion) throw ValidationError("model: unsupported version");
        StoredModel stored;
        for (const auto& c : j.at("coils")) {
            Eigen::VectorXd anchor;
            stored.model.coils.push_back(parse_coil(c, &anchor));
            stored.anchors.push_back(anchor);
        }
        stored.model.validate();
        if (j.contains("fixed_commutation")) {
            stored.fixed = parse_params(j.at("fixed_commutation"));
            stored.fixed->validate(stored.model.coil_count());
        }
        return stored;
    });
}

StoredModel load_model(const std::filesystem::path& path) { return parse_model_json(read_text(path)); }

std::string coil_model_to_json(const PgnnCoilModel& model, const Eigen::VectorXd& anchor) {
    json j = coil_json(model, &anchor);
    j["format"] = "clmcomm-pgnn-coil";
    j["version"] = kModelFormatVersion;
    return j.dump(2) + "\n";
}

PgnnCoilModel parse_coil_model_json(const std::string& text, Eigen::VectorXd* anchor) {
    return guarded("coil model", [&] {
        const json j = json::parse(text);
        if (j.value("format", "") != "clmcomm-pgnn-coil") throw ValidationError("coil model: wrong format tag");
        if (j.at("version").get<int>() != kModelFormatVersion) throw ValidationError("coil model: unsupported version");
        return parse_coil(j, anchor);
    });
}

std::string params_to_json(const CommutationParams& params) { return params_json(params).dump(2) + "\n"; }

CommutationParams parse_params_json(const std::string& text) {
    return guarded("commutation parameters", [&] {
        const json j = json::parse(text);
        return parse_params(j.contains("calibrated") ? j.at("calibrated") : j);
    });
}

CommutationParams load_params(const std::filesystem::path& path) { return parse_params_json(read_text(path)); }

std::string calibration_to_json(const CalibrationResult& result, double delta) {
    json records = json::array();
    for (const auto& r : result.records) records.push_back({{"delta_rad", r.delta}, {"c1", r.c1}, {"c2", r.c2}});
    const json j = {{"delta_rad", delta},
                    {"initial", params_json(result.initial)},
                    {"calibrated", params_json(result.calibrated)},
                    {"coefficients", records}};
    return j.dump(2) + "\n";
}

std::string calibration_to_csv(const CalibrationResult& result) {
    std::ostringstream out;
    out << "parameter,coil,initial,calibrated\n";
    const auto n = result.initial.k_hat.size();
    for (std::size_t l = 0; l < n; ++l) {
        out << "k_hat," << l + 1 << ',' << csv::format_double(result.initial.k_hat[l]) << ','
            << csv::format_double(result.calibrated.k_hat[l]) << '\n';
    }
    for (std::size_t l = 0; l < n; ++l) {
        out << "zeta_hat," << l + 1 << ',' << csv::format_double(result.initial.zeta_hat[l]) << ','
            << csv::format_double(result.calibrated.zeta_hat[l]) << '\n';
    }
    return out.str();
}

std::string training_curve_csv(const std::vector<TrainingResult>& results) {
    std::ostringstream out;
    out << "coil,epoch,cost,least_squares\n";
    for (std::size_t l = 0; l < results.size(); ++l) {
        for (const auto& p : results[l].curve) {
            out << l + 1 << ',' << p.epoch << ',' << csv::format_double(p.cost) << ',' << (p.least_squares ? 1 : 0)
                << '\n';
        }
    }
    return out.str();
}

void write_log_csv(const ExperimentLog& log, const std::filesystem::path& path, std::size_t stride) {
    if (stride == 0) throw ValidationError("log: stride must be >= 1");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    const std::size_t coils = log.currents.empty() ? 0 : log.currents.front().size();
    const bool has_commands = !log.commands.empty();

    out << "t,y_ref,y,error,u_ff,u_fb,F_y_star,F_x_star,T_z_star,F_y,F_x,T_z";
    for (std::size_t l = 1; l <= coils; ++l) out << ",i_a_" << l << ",i_b_" << l << ",i_c_" << l;
    if (has_commands) {
        for (std::size_t l = 1; l <= coils; ++l) out << ",magnitude_" << l << ",delta_" << l;
    }
    out << '\n';

    const auto f = [](double v) { return csv::format_double(v); };
    for (std::size_t k = 0; k < log.size(); k += stride) {
        out << f(log.t[k]) << ',' << f(log.y_ref[k]) << ',' << f(log.y[k]) << ',' << f(log.error[k]) << ','
            << f(log.u_ff[k]) << ',' << f(log.u_fb[k]);
        for (int q = 0; q < 3; ++q) out << ',' << f(log.f_star[k][q]);
        for (int q = 0; q < 3; ++q) out << ',' << f(log.f_measured[k][q]);
        for (const auto& c : log.currents[k]) out << ',' << f(c.a) << ',' << f(c.b) << ',' << f(c.c);
        if (has_commands) {
            for (const auto& c : log.commands[k]) out << ',' << f(c.magnitude) << ',' << f(c.delta);
        }
        out << '\n';
    }
    if (!out) throw ValidationError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
    if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace clmcomm
