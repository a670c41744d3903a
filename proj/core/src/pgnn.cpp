#include "clmcomm/pgnn.hpp"

#include "clmcomm/allocation.hpp"
#include "clmcomm/motor_plant.hpp"

#include <sstream>

namespace clmcomm {

namespace {

std::vector<int> layer_widths(const std::vector<int>& hidden) {
    std::vector<int> w{1};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(3);
    return w;
}

struct Harmonics {
    Eigen::RowVectorXd cos;
    Eigen::RowVectorXd sin;
};

Harmonics harmonics(const Eigen::RowVectorXd& y, double pole_pitch) {
    const Eigen::ArrayXXd angle = y.array() * (kTwoPi / pole_pitch);
    return {angle.cos().matrix(), angle.sin().matrix()};
}

Eigen::RowVectorXd network_input(const PgnnCoilModel& model, const Eigen::RowVectorXd& y) {
    return ((y.array() - model.scaling.center) / model.scaling.half_span).matrix();
}

// Regressor matrix (D x T), one column per record.
Eigen::MatrixXd regressor_batch(const PgnnCoilModel& model, const IdentificationSet& data) {
    const Eigen::Index t = data.size();
    const Eigen::RowVectorXd x = network_input(model, data.y);
    const Harmonics h = harmonics(data.y, model.pole_pitch);
    const Eigen::MatrixXd ha = model.gain_a.hidden_batch(x);
    const Eigen::MatrixXd hb = model.gain_b.hidden_batch(x);
    const Eigen::MatrixXd hc = model.cogging.hidden_batch(x);
    const Eigen::RowVectorXd ia = data.currents.row(0);
    const Eigen::RowVectorXd ib = data.currents.row(1);

    Eigen::MatrixXd m(model.linear_dimension(), t);
    Eigen::Index r = 0;
    m.row(r++) = h.cos.cwiseProduct(ia);
    m.row(r++) = h.cos.cwiseProduct(ib);
    m.row(r++) = h.sin.cwiseProduct(ia);
    m.row(r++) = h.sin.cwiseProduct(ib);
    m.middleRows(r, ha.rows()) = ha.array().rowwise() * ia.array();
    r += ha.rows();
    m.row(r++) = ia;
    m.middleRows(r, hb.rows()) = hb.array().rowwise() * ib.array();
    r += hb.rows();
    m.row(r++) = ib;
    m.middleRows(r, hc.rows()) = hc;
    r += hc.rows();
    m.row(r) = Eigen::RowVectorXd::Ones(t);
    return m;
}

// Regularisation weight and anchor in linear-parameter coordinates of one axis; zero
// weight outside the four physical slots.
std::pair<Eigen::VectorXd, Eigen::VectorXd> axis_regularization(const PgnnCoilModel& model,
                                                                 const RegularizationSpec& reg, int q) {
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(model.linear_dimension());
    Eigen::VectorXd anchor = Eigen::VectorXd::Zero(model.linear_dimension());
    const std::array<int, 4> slots{physical_index_a(q, 0), physical_index_a(q, 1), physical_index_b(q, 0),
                                   physical_index_b(q, 1)};
    for (int s = 0; s < 4; ++s) {
        weight(s) = reg.lambda(slots[static_cast<std::size_t>(s)]);
        anchor(s) = reg.anchor(slots[static_cast<std::size_t>(s)]);
    }
    return {weight, anchor};
}

void require_data(const IdentificationSet& data) {
    if (data.size() == 0) throw ValidationError("pgnn: empty identification data");
}

}  // namespace

// ---------------------------------------------------------------------------
// PgnnCoilModel

PgnnCoilModel PgnnCoilModel::zeros(const std::vector<int>& gain_hidden, const std::vector<int>& cogging_hidden,
                                   double pole_pitch, InputScaling scaling) {
    PgnnCoilModel m;
    m.gain_a = Mlp::zeros(layer_widths(gain_hidden));
    m.gain_b = Mlp::zeros(layer_widths(gain_hidden));
    m.cogging = Mlp::zeros(layer_widths(cogging_hidden));
    m.pole_pitch = pole_pitch;
    m.scaling = scaling;
    return m;
}

void PgnnCoilModel::validate() const {
    gain_a.validate();
    gain_b.validate();
    cogging.validate();
    if (gain_a.output_width() != 3 || gain_b.output_width() != 3 || cogging.output_width() != 3) {
        throw ValidationError("pgnn: networks must have three outputs");
    }
    if (!(pole_pitch > 0.0)) throw ValidationError("pgnn: pole_pitch must be > 0");
    if (!(scaling.half_span > 0.0)) throw ValidationError("pgnn: input half span must be > 0");
    if (!a.allFinite() || !b.allFinite()) throw ValidationError("pgnn: non-finite physical parameters");
}

GainMatrix PgnnCoilModel::gain(double y) const {
    const double angle = kTwoPi * y / pole_pitch;
    const double x = scaling.apply(y);
    GainMatrix k = a * std::cos(angle) + b * std::sin(angle);
    k.col(0) += gain_a.forward(x);
    k.col(1) += gain_b.forward(x);
    return k;
}

ForceVector PgnnCoilModel::cogging_force(double y) const {
    return ForceVector::from(cogging.forward(scaling.apply(y)));
}

ForceVector PgnnCoilModel::predict(const CurrentPair& currents, double y) const {
    return ForceVector::from(gain(y) * currents.vec()) + cogging_force(y);
}

ForceVector PgnnCoilModel::predict(const MagnitudePhaseCommand& cmd, double y, const FixedCommutation& fixed) const {
    return predict(command_to_currents(cmd, y, fixed), y);
}

Eigen::VectorXd PgnnCoilModel::physical_parameters() const {
    Eigen::VectorXd theta(12);
    theta.head<6>() = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(a.data());
    theta.tail<6>() = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(b.data());
    return theta;
}

void PgnnCoilModel::set_physical_parameters(const Eigen::VectorXd& theta_phy) {
    if (theta_phy.size() != 12) throw ValidationError("pgnn: physical parameter vector must have 12 entries");
    a = Eigen::Map<const GainMatrix>(theta_phy.data());
    b = Eigen::Map<const GainMatrix>(theta_phy.data() + 6);
}

std::size_t PgnnCoilModel::parameter_count() const {
    return 12 + gain_a.parameter_count() + gain_b.parameter_count() + cogging.parameter_count();
}

Eigen::VectorXd PgnnCoilModel::parameters() const {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
    theta.head<12>() = physical_parameters();
    double* p = theta.data() + 12;
    gain_a.write_parameters(p);
    p += gain_a.parameter_count();
    gain_b.write_parameters(p);
    p += gain_b.parameter_count();
    cogging.write_parameters(p);
    return theta;
}

void PgnnCoilModel::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(parameter_count())) {
        throw ValidationError("pgnn: parameter vector has wrong length");
    }
    set_physical_parameters(theta.head<12>());
    const double* p = theta.data() + 12;
    gain_a.read_parameters(p);
    p += gain_a.parameter_count();
    gain_b.read_parameters(p);
    p += gain_b.parameter_count();
    cogging.read_parameters(p);
}

Eigen::Index PgnnCoilModel::linear_dimension() const {
    return 4 + gain_a.last_hidden_width() + 1 + gain_b.last_hidden_width() + 1 + cogging.last_hidden_width() + 1;
}

Eigen::VectorXd PgnnCoilModel::linear_parameters(int axis) const {
    Eigen::VectorXd theta(linear_dimension());
    Eigen::Index r = 0;
    theta(r++) = a(axis, 0);
    theta(r++) = a(axis, 1);
    theta(r++) = b(axis, 0);
    theta(r++) = b(axis, 1);
    for (const Mlp* net : {&gain_a, &gain_b, &cogging}) {
        const auto n = net->weights.back().cols();
        theta.segment(r, n) = net->weights.back().row(axis).transpose();
        r += n;
        theta(r++) = net->biases.back()(axis);
    }
    return theta;
}

void PgnnCoilModel::set_linear_parameters(int axis, const Eigen::VectorXd& theta_l) {
    if (theta_l.size() != linear_dimension()) throw ValidationError("pgnn: linear parameter vector has wrong length");
    Eigen::Index r = 0;
    a(axis, 0) = theta_l(r++);
    a(axis, 1) = theta_l(r++);
    b(axis, 0) = theta_l(r++);
    b(axis, 1) = theta_l(r++);
    for (Mlp* net : {&gain_a, &gain_b, &cogging}) {
        const auto n = net->weights.back().cols();
        net->weights.back().row(axis) = theta_l.segment(r, n).transpose();
        r += n;
        net->biases.back()(axis) = theta_l(r++);
    }
}

std::vector<Eigen::Index> PgnnCoilModel::linear_parameter_indices(int axis) const {
    std::vector<Eigen::Index> idx{physical_index_a(axis, 0), physical_index_a(axis, 1), physical_index_b(axis, 0),
                                  physical_index_b(axis, 1)};
    Eigen::Index offset = 12;
    for (const Mlp* net : {&gain_a, &gain_b, &cogging}) {
        const auto count = static_cast<Eigen::Index>(net->parameter_count());
        const auto& w_out = net->weights.back();
        // Output layer sits at the end of the network block: W (column-major) then b.
        const Eigen::Index w_start = offset + count - w_out.size() - net->biases.back().size();
        for (Eigen::Index j = 0; j < w_out.cols(); ++j) idx.push_back(w_start + j * w_out.rows() + axis);
        idx.push_back(w_start + w_out.size() + axis);
        offset += count;
    }
    return idx;
}

Eigen::VectorXd build_regressor(const PgnnCoilModel& model, double y, const CurrentPair& currents) {
    IdentificationSet one;
    one.y = Eigen::RowVectorXd::Constant(1, y);
    one.currents = currents.vec();
    one.force = Eigen::Matrix3Xd::Zero(3, 1);
    return regressor_batch(model, one).col(0);
}

// ---------------------------------------------------------------------------
// Regularisation and data

RegularizationSpec RegularizationSpec::uniform(double weight, const Eigen::VectorXd& anchor) {
    return {Eigen::VectorXd::Constant(12, weight), anchor};
}

void RegularizationSpec::validate() const {
    if (lambda.size() != 12 || anchor.size() != 12) throw ValidationError("regularization: need 12 weights and anchors");
    if ((lambda.array() < 0.0).any()) throw ValidationError("regularization: weights must be >= 0");
}

double RegularizationSpec::penalty(const Eigen::VectorXd& theta_phy) const {
    return (lambda.array() * (theta_phy - anchor).array()).matrix().squaredNorm();
}

IdentificationSet make_identification_set(const DataSetZ& z1, const DataSetZ& z2, const FixedCommutation& fixed) {
    const auto total = static_cast<Eigen::Index>(z1.size() + z2.size());
    if (total == 0) throw ValidationError("pgnn: empty identification data");
    IdentificationSet set;
    set.y.resize(total);
    set.currents.resize(2, total);
    set.force.resize(3, total);
    Eigen::Index k = 0;
    for (const DataSetZ* z : {&z1, &z2}) {
        for (const auto& r : z->records) {
            const CurrentPair i = command_to_currents({r.fy_star, z->delta}, r.y, fixed);
            set.y(k) = r.y;
            set.currents.col(k) = i.vec();
            set.force.col(k) = r.force.vec();
            ++k;
        }
    }
    return set;
}

InputScaling scaling_for(const IdentificationSet& data) {
    require_data(data);
    const double lo = data.y.minCoeff();
    const double hi = data.y.maxCoeff();
    const double half = 0.5 * (hi - lo);
    return {0.5 * (hi + lo), half > 0.0 ? half : 1.0};
}

Eigen::Matrix3Xd predict_batch(const PgnnCoilModel& model, const IdentificationSet& data) {
    const Eigen::RowVectorXd x = network_input(model, data.y);
    const Harmonics h = harmonics(data.y, model.pole_pitch);
    const Eigen::MatrixXd fa = model.gain_a.forward_batch(x);
    const Eigen::MatrixXd fb = model.gain_b.forward_batch(x);
    Eigen::Matrix3Xd out = model.cogging.forward_batch(x);
    const Eigen::RowVectorXd ia = data.currents.row(0);
    const Eigen::RowVectorXd ib = data.currents.row(1);
    out += model.a.col(0) * h.cos.cwiseProduct(ia) + model.a.col(1) * h.cos.cwiseProduct(ib) +
           model.b.col(0) * h.sin.cwiseProduct(ia) + model.b.col(1) * h.sin.cwiseProduct(ib);
    out += (fa.array().rowwise() * ia.array()).matrix() + (fb.array().rowwise() * ib.array()).matrix();
    return out;
}

double data_mse(const PgnnCoilModel& model, const IdentificationSet& data) {
    require_data(data);
    return (data.force - predict_batch(model, data)).squaredNorm() / static_cast<double>(data.size());
}

double cost(const PgnnCoilModel& model, const IdentificationSet& data, const RegularizationSpec& reg) {
    return data_mse(model, data) + reg.penalty(model.physical_parameters());
}

Eigen::VectorXd cost_gradient(const PgnnCoilModel& model, const IdentificationSet& data,
                              const RegularizationSpec& reg, double* cost_out) {
    require_data(data);
    const auto t = static_cast<double>(data.size());
    const Eigen::RowVectorXd x = network_input(model, data.y);
    const Harmonics h = harmonics(data.y, model.pole_pitch);
    std::vector<Eigen::MatrixXd> act_a, act_b, act_c;
    const Eigen::MatrixXd fa = model.gain_a.forward_batch(x, &act_a);
    const Eigen::MatrixXd fb = model.gain_b.forward_batch(x, &act_b);
    const Eigen::MatrixXd fc = model.cogging.forward_batch(x, &act_c);
    const Eigen::RowVectorXd ia = data.currents.row(0);
    const Eigen::RowVectorXd ib = data.currents.row(1);
    const Eigen::RowVectorXd cos_a = h.cos.cwiseProduct(ia);
    const Eigen::RowVectorXd cos_b = h.cos.cwiseProduct(ib);
    const Eigen::RowVectorXd sin_a = h.sin.cwiseProduct(ia);
    const Eigen::RowVectorXd sin_b = h.sin.cwiseProduct(ib);

    Eigen::Matrix3Xd pred = fc;
    pred += model.a.col(0) * cos_a + model.a.col(1) * cos_b + model.b.col(0) * sin_a + model.b.col(1) * sin_b;
    pred += (fa.array().rowwise() * ia.array()).matrix() + (fb.array().rowwise() * ib.array()).matrix();
    const Eigen::Matrix3Xd residual = data.force - pred;
    const Eigen::VectorXd theta_phy = model.physical_parameters();
    if (cost_out != nullptr) *cost_out = residual.squaredNorm() / t + reg.penalty(theta_phy);

    // d cost / d prediction
    const Eigen::Matrix3Xd upstream = residual * (-2.0 / t);

    PgnnCoilModel grad = model;
    GainMatrix ga;
    GainMatrix gb;
    ga.col(0) = upstream * cos_a.transpose();
    ga.col(1) = upstream * cos_b.transpose();
    gb.col(0) = upstream * sin_a.transpose();
    gb.col(1) = upstream * sin_b.transpose();
    grad.a = ga;
    grad.b = gb;
    for (Mlp* net : {&grad.gain_a, &grad.gain_b, &grad.cogging}) {
        for (auto& w : net->weights) w.setZero();
        for (auto& b : net->biases) b.setZero();
    }
    model.gain_a.backward_batch(act_a, (upstream.array().rowwise() * ia.array()).matrix(), grad.gain_a);
    model.gain_b.backward_batch(act_b, (upstream.array().rowwise() * ib.array()).matrix(), grad.gain_b);
    model.cogging.backward_batch(act_c, upstream, grad.cogging);

    Eigen::VectorXd g = grad.parameters();
    g.head<12>() += 2.0 * (reg.lambda.array().square() * (theta_phy - reg.anchor).array()).matrix();
    return g;
}

double anchor_cost(const PgnnCoilModel& model, const IdentificationSet& data, const RegularizationSpec& reg) {
    PgnnCoilModel anchor = model;
    anchor.set_physical_parameters(reg.anchor);
    for (Mlp* net : {&anchor.gain_a, &anchor.gain_b, &anchor.cogging}) {
        net->weights.back().setZero();
        net->biases.back().setZero();
    }
    return cost(anchor, data, reg);
}

double anchor_residual_correlation(const PgnnCoilModel& model, const IdentificationSet& data,
                                   const RegularizationSpec& reg) {
    require_data(data);
    const Eigen::MatrixXd m = regressor_batch(model, data);
    const auto t = static_cast<double>(data.size());
    double worst = 0.0;
    for (int q = 0; q < 3; ++q) {
        const auto [weight, anchor] = axis_regularization(model, reg, q);
        const Eigen::RowVectorXd residual = data.force.row(q) - anchor.transpose() * m;
        const Eigen::VectorXd corr = m * residual.transpose() / t;
        worst = std::max(worst, corr.cwiseAbs().maxCoeff());
    }
    return worst;
}

namespace {

// Columns [cos i_a, cos i_b, sin i_a, sin i_b] of the network-free model.
Eigen::MatrixXd physical_design(const IdentificationSet& data, double pole_pitch) {
    const Harmonics h = harmonics(data.y, pole_pitch);
    const Eigen::RowVectorXd ia = data.currents.row(0);
    const Eigen::RowVectorXd ib = data.currents.row(1);
    Eigen::MatrixXd design(data.size(), 4);
    design.col(0) = h.cos.cwiseProduct(ia).transpose();
    design.col(1) = h.cos.cwiseProduct(ib).transpose();
    design.col(2) = h.sin.cwiseProduct(ia).transpose();
    design.col(3) = h.sin.cwiseProduct(ib).transpose();
    return design;
}

void require_excitation(const IdentificationSet& data, double pole_pitch) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(physical_design(data, pole_pitch));
    const Eigen::Vector4d sv = svd.singularValues();
    const double condition = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
    if (!(condition < 1e10)) {
        std::ostringstream msg;
        msg << "least squares: data not persistently exciting (current columns have condition estimate "
            << condition << ")";
        throw NumericalError(msg.str());
    }
}

}  // namespace

LeastSquaresReport least_squares_linear(PgnnCoilModel& model, const IdentificationSet& data,
                                        const RegularizationSpec& reg) {
    require_data(data);
    reg.validate();
    const Eigen::MatrixXd m = regressor_batch(model, data);
    const Eigen::Index dim = m.rows();
    const Eigen::Index t = data.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));

    require_excitation(data, model.pole_pitch);

    LeastSquaresReport report;
    for (int q = 0; q < 3; ++q) {
        const auto [weight, anchor] = axis_regularization(model, reg, q);
        // Stacked system [M^T / sqrt(T); diag(w)] theta = [F_q / sqrt(T); w .* anchor].
        Eigen::MatrixXd design(t + dim, dim);
        design.topRows(t) = m.transpose() * scale;
        design.bottomRows(dim) = weight.asDiagonal();
        Eigen::VectorXd rhs(t + dim);
        rhs.head(t) = data.force.row(q).transpose() * scale;
        rhs.tail(dim) = weight.cwiseProduct(anchor);

        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
        const Eigen::VectorXd diag = cod.matrixQTZ().diagonal().head(cod.rank()).cwiseAbs();
        const auto qi = static_cast<std::size_t>(q);
        report.rank[qi] = cod.rank();
        report.condition[qi] = cod.rank() < dim || diag.size() == 0 ? std::numeric_limits<double>::infinity()
                                                                     : diag.maxCoeff() / diag.minCoeff();
        model.set_linear_parameters(q, cod.solve(rhs));
    }
    return report;
}

Eigen::VectorXd fit_physical_anchor(const IdentificationSet& data, double pole_pitch) {
    require_data(data);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(physical_design(data, pole_pitch));
    if (qr.rank() < 4) throw NumericalError("physical anchor: data does not excite both current columns");

    Eigen::VectorXd theta(12);
    for (int q = 0; q < 3; ++q) {
        const Eigen::Vector4d sol = qr.solve(data.force.row(q).transpose());
        theta(physical_index_a(q, 0)) = sol(0);
        theta(physical_index_a(q, 1)) = sol(1);
        theta(physical_index_b(q, 0)) = sol(2);
        theta(physical_index_b(q, 1)) = sol(3);
    }
    return theta;
}

Eigen::VectorXd ideal_physical_parameters(double k, double zeta, double mu, double lever_arm) {
    // K_pair(y) = A cos(angle) + B sin(angle): sample at angle 0 and pi/2.
    const MotorGeometry unit{1, 1.0, {lever_arm}, mu};
    const CoilSetTruth truth{k, zeta};
    const Eigen::Matrix<double, 3, 2> a = star_reduce(ideal_gain_matrix(0.0, 0, unit, truth));
    const Eigen::Matrix<double, 3, 2> b = star_reduce(ideal_gain_matrix(0.25, 0, unit, truth));
    Eigen::VectorXd theta(12);
    theta.head<6>() = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(a.data());
    theta.tail<6>() = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(b.data());
    return theta;
}

// ---------------------------------------------------------------------------
// Full model

void PgnnFullModel::validate() const {
    if (coils.empty()) throw ValidationError("pgnn: full model needs at least one coil set");
    for (const auto& c : coils) {
        c.validate();
        if (c.pole_pitch != coils.front().pole_pitch) throw ValidationError("pgnn: coil models must share pole_pitch");
    }
}

Eigen::Matrix<double, 3, Eigen::Dynamic> PgnnFullModel::stacked_gain(double y) const {
    Eigen::Matrix<double, 3, Eigen::Dynamic> k(3, 2 * coil_count());
    for (int l = 0; l < coil_count(); ++l) k.block<3, 2>(0, 2 * l) = coils[static_cast<std::size_t>(l)].gain(y);
    return k;
}

ForceVector PgnnFullModel::mean_cogging(double y) const {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& c : coils) sum += c.cogging_force(y).vec();
    return ForceVector::from(sum / static_cast<double>(coils.size()));
}

ForceVector PgnnFullModel::predict(const std::vector<CurrentTriple>& currents, double y) const {
    if (currents.size() != coils.size()) throw ValidationError("pgnn: one current triple per coil set required");
    Eigen::Vector3d f = mean_cogging(y).vec();
    for (std::size_t l = 0; l < coils.size(); ++l) f += coils[l].gain(y) * reduce_star(currents[l]).vec();
    return ForceVector::from(f);
}

PgnnFullModel combine_coilsets(std::vector<PgnnCoilModel> models) {
    PgnnFullModel full{std::move(models)};
    full.validate();
    return full;
}

}  // namespace clmcomm
