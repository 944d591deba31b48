#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace feelsim {

// Column-per-sample feature matrix plus integer class labels.
struct LocalDataset {
    Eigen::MatrixXd inputs;   // dim x n
    std::vector<int> labels;  // values in [0, num_classes)
    int owner = -1;

    int size() const { return static_cast<int>(labels.size()); }
    int dim() const { return static_cast<int>(inputs.rows()); }
};

LocalDataset subset(const LocalDataset& data, const std::vector<int>& indices);

// IDX-format ingestion (big-endian magic 0x00000803 images / 0x00000801
// labels); pixel values are scaled to [0, 1].
LocalDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path);

void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

// Seeded Gaussian class blobs: class means are drawn N(0, class_spread^2 I)
// and samples N(mean, noise_std^2 I).
struct BlobSpec {
    int input_dim = 32;
    int num_classes = 10;
    int samples_per_class = 100;
    double class_spread = 0.45;
    double noise_std = 1.0;
};

LocalDataset make_synthetic_blobs(const BlobSpec& spec, std::uint64_t seed);

std::pair<LocalDataset, LocalDataset> split_train_test(const LocalDataset& data,
                                                       double test_fraction, std::uint64_t seed);

}  // namespace feelsim
