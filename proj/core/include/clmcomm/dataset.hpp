#pragma once

#include "clmcomm/types.hpp"

#include <filesystem>
#include <vector>

namespace clmcomm {

struct ForceRecord {
    double y = 0.0;         ///< position [m]
    ForceVector force;      ///< measured force
    double fy_star = 0.0;   ///< desired driving force of the active coil set [N]
};

/// Identification data of one coil set, generated with a constant phase excitation.
struct DataSetZ {
    int coil = 0;           ///< zero-based coil-set index
    double delta = 0.0;     ///< constant phase excitation [rad]
    std::vector<ForceRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    /// Every `stride`-th record, starting with the first.
    DataSetZ decimated(std::size_t stride) const;
};

/// CSV with header `delta,y,F_y,F_x,T_z,F_y_star`. Values use shortest round-trip formatting.
void write_dataset_csv(const DataSetZ& data, const std::filesystem::path& path);
DataSetZ read_dataset_csv(const std::filesystem::path& path, int coil);

/// Conventional file name Z_<i>_<l>.csv with one-based run i and coil l.
std::string dataset_file_name(int run, int coil);

}  // namespace clmcomm
