#pragma once

#include "clmcomm/pgnn.hpp"

#include <cstdint>
#include <vector>

namespace clmcomm {

struct TrainingHyperparams {
    std::vector<int> gain_hidden{2};
    std::vector<int> cogging_hidden{16};
    double lambda = 0.1;
    double learning_rate = 1e-3;
    int epochs = 2000;
    int ls_interval = 100;          ///< re-solve the linear parameters every this many epochs (0: never)
    double gain_init_scale = 1.0;   ///< hidden weights/biases of the gain networks ~ U(-s, s)
    double cogging_init_scale = 1.0;
    std::size_t decimation = 1;     ///< use every n-th record of each run
    std::uint64_t seed = 1;
};

struct TrainingEpoch {
    int epoch = 0;
    double cost = 0.0;
    bool least_squares = false;  ///< linear parameters were re-solved before this evaluation
};

struct TrainingResult {
    PgnnCoilModel model;
    Eigen::VectorXd anchor;       ///< theta_phy*
    double anchor_cost = 0.0;     ///< cost of the network-free model at the anchor
    double initial_cost = 0.0;    ///< after the initial least-squares solve
    double final_cost = 0.0;      ///< cost of the returned model
    double data_mse = 0.0;        ///< data-fit part of final_cost
    double anchor_data_mse = 0.0;
    std::vector<TrainingEpoch> curve;
};

/// Identifies one coil set: fits the physical anchor without networks, initialises the
/// linear parameters by least squares, runs full-batch Adam on the whole cost with
/// periodic and terminal least-squares solves, and returns the lowest-cost iterate.
TrainingResult train(const IdentificationSet& data, double pole_pitch, const TrainingHyperparams& hp);

}  // namespace clmcomm
