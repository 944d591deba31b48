#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "feelsim/dataset.hpp"
#include "feelsim/orchestrator.hpp"

namespace feelsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataSource {
    enum class Kind { synthetic, idx };
    Kind kind = Kind::synthetic;
    BlobSpec blob;
    double test_fraction = 0.2;
    std::string train_images, train_labels, test_images, test_labels;
};

// File form of SimulationConfig plus data source and output directory.
// Sections and keys carry explicit unit suffixes; unknown keys are rejected.
struct ExperimentConfig {
    SimulationConfig sim;
    DataSource data;
    std::string out_dir = "out";
};

ExperimentConfig parse_experiment_config(const std::string& path);

// Parses the key=value body (used by the file parser and by tests).
ExperimentConfig parse_experiment_config_text(const std::string& text);

std::pair<LocalDataset, LocalDataset> load_dataset_pair(const DataSource& source,
                                                        std::uint64_t master_seed);

}  // namespace feelsim
