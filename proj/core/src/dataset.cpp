#include "clmcomm/dataset.hpp"

#include "clmcomm/csv.hpp"

#include <fstream>

namespace clmcomm {

namespace {
constexpr std::string_view kHeader = "delta,y,F_y,F_x,T_z,F_y_star";
}

DataSetZ DataSetZ::decimated(std::size_t stride) const {
    if (stride == 0) throw ValidationError("decimation stride must be >= 1");
    DataSetZ out{coil, delta, {}};
    out.records.reserve(records.size() / stride + 1);
    for (std::size_t k = 0; k < records.size(); k += stride) out.records.push_back(records[k]);
    return out;
}

void write_dataset_csv(const DataSetZ& data, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << kHeader << '\n';
    const std::string delta = csv::format_double(data.delta);
    for (const auto& r : data.records) {
        out << delta << ',' << csv::format_double(r.y) << ',' << csv::format_double(r.force.fy) << ','
            << csv::format_double(r.force.fx) << ',' << csv::format_double(r.force.tz) << ','
            << csv::format_double(r.fy_star) << '\n';
    }
}

DataSetZ read_dataset_csv(const std::filesystem::path& path, int coil) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ValidationError(path.string() + ": unexpected header '" + line + "'");

    DataSetZ data{coil, 0.0, {}};
    bool first = true;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cols = csv::split(line);
        if (cols.size() != 6) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
        }
        const double delta = csv::parse_double(cols[0]);
        if (first) {
            data.delta = delta;
            first = false;
        } else if (delta != data.delta) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": delta must be constant");
        }
        data.records.push_back({csv::parse_double(cols[1]),
                                {csv::parse_double(cols[2]), csv::parse_double(cols[3]), csv::parse_double(cols[4])},
                                csv::parse_double(cols[5])});
    }
    if (data.records.empty()) throw ValidationError(path.string() + ": no records");
    return data;
}

std::string dataset_file_name(int run, int coil) {
    return "Z_" + std::to_string(run) + "_" + std::to_string(coil) + ".csv";
}

}  // namespace clmcomm
