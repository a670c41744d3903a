#include "clmcomm/metrics.hpp"

namespace clmcomm {

std::vector<double> lowpass_filter(std::span<const double> signal, double cutoff_hz, double sample_rate) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate)) {
        throw ValidationError("lowpass: cutoff must lie in (0, f_s / 2)");
    }
    const double a = std::exp(-kTwoPi * cutoff_hz / sample_rate);
    std::vector<double> out(signal.size(), 0.0);
    for (std::size_t k = 0; k + 1 < signal.size(); ++k) out[k + 1] = a * out[k] + (1.0 - a) * signal[k];
    return out;
}

double mean_square(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return sum / static_cast<double>(values.size());
}

std::array<std::vector<double>, 3> commutation_error(const ExperimentLog& log) {
    std::array<std::vector<double>, 3> err;
    for (auto& e : err) e.reserve(log.size());
    for (std::size_t k = 0; k < log.size(); ++k) {
        const ForceVector d = log.f_measured[k] - log.f_star[k];
        for (int q = 0; q < 3; ++q) err[static_cast<std::size_t>(q)].push_back(d[q]);
    }
    return err;
}

MseReport mse_report(const ExperimentLog& log, double cutoff_hz) {
    if (log.size() == 0) throw ValidationError("mse report: empty log");
    MseReport report;
    const auto err = commutation_error(log);
    for (std::size_t q = 0; q < 3; ++q) {
        report.unfiltered[q] = mean_square(err[q]);
        report.filtered[q] = mean_square(lowpass_filter(err[q], cutoff_hz, log.sample_rate));
    }
    report.tracking = mean_square(log.error);
    return report;
}

}  // namespace clmcomm
