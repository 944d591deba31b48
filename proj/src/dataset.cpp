#include "feelsim/dataset.hpp"

#include <fstream>
#include <numeric>
#include <stdexcept>

#include "feelsim/rng.hpp"

namespace feelsim {

namespace {

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error("idx: truncated header in " + path);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace

LocalDataset subset(const LocalDataset& data, const std::vector<int>& indices) {
    LocalDataset out;
    out.owner = data.owner;
    out.inputs.resize(data.inputs.rows(), static_cast<Eigen::Index>(indices.size()));
    out.labels.reserve(indices.size());
    Eigen::Index col = 0;
    for (int idx : indices) {
        if (idx < 0 || idx >= data.size()) throw std::out_of_range("subset: index out of range");
        out.inputs.col(col++) = data.inputs.col(idx);
        out.labels.push_back(data.labels[idx]);
    }
    return out;
}

LocalDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("idx: cannot open image file " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("idx: cannot open label file " + labels_path);

    const std::uint32_t img_magic = read_be_u32(img, images_path);
    if (img_magic != 0x00000803u)
        throw std::runtime_error("idx: bad image magic in " + images_path);
    const std::uint32_t n_img = read_be_u32(img, images_path);
    const std::uint32_t rows = read_be_u32(img, images_path);
    const std::uint32_t cols = read_be_u32(img, images_path);

    const std::uint32_t lab_magic = read_be_u32(lab, labels_path);
    if (lab_magic != 0x00000801u)
        throw std::runtime_error("idx: bad label magic in " + labels_path);
    const std::uint32_t n_lab = read_be_u32(lab, labels_path);
    if (n_img != n_lab) throw std::runtime_error("idx: image/label count mismatch");

    const std::size_t dim = std::size_t(rows) * cols;
    LocalDataset out;
    out.inputs.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n_img));
    out.labels.resize(n_img);

    std::vector<unsigned char> pixel(dim);
    for (std::uint32_t i = 0; i < n_img; ++i) {
        if (!img.read(reinterpret_cast<char*>(pixel.data()), static_cast<std::streamsize>(dim)))
            throw std::runtime_error("idx: truncated image data in " + images_path);
        for (std::size_t p = 0; p < dim; ++p)
            out.inputs(static_cast<Eigen::Index>(p), i) = pixel[p] / 255.0;
    }
    std::vector<unsigned char> raw(n_lab);
    if (!lab.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n_lab)))
        throw std::runtime_error("idx: truncated label data in " + labels_path);
    for (std::uint32_t i = 0; i < n_lab; ++i) out.labels[i] = raw[i];
    return out;
}

void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("idx: cannot write " + path);
    write_be_u32(out, 0x00000803u);
    write_be_u32(out, static_cast<std::uint32_t>(images.size()));
    write_be_u32(out, static_cast<std::uint32_t>(rows));
    write_be_u32(out, static_cast<std::uint32_t>(cols));
    for (const auto& im : images) {
        if (im.size() != std::size_t(rows) * cols)
            throw std::invalid_argument("idx: image size mismatch");
        out.write(reinterpret_cast<const char*>(im.data()),
                  static_cast<std::streamsize>(im.size()));
    }
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("idx: cannot write " + path);
    write_be_u32(out, 0x00000801u);
    write_be_u32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

LocalDataset make_synthetic_blobs(const BlobSpec& spec, std::uint64_t seed) {
    if (spec.input_dim < 1 || spec.num_classes < 2 || spec.samples_per_class < 1)
        throw std::invalid_argument("blobs: need input_dim >= 1, num_classes >= 2, samples >= 1");
    if (spec.noise_std < 0.0 || spec.class_spread < 0.0)
        throw std::invalid_argument("blobs: spreads must be >= 0");

    Rng mean_rng(derive_seed(seed, {0xb10b}));
    Eigen::MatrixXd means(spec.input_dim, spec.num_classes);
    for (int c = 0; c < spec.num_classes; ++c)
        for (int d = 0; d < spec.input_dim; ++d) means(d, c) = spec.class_spread * mean_rng.normal();

    const int total = spec.num_classes * spec.samples_per_class;
    LocalDataset out;
    out.inputs.resize(spec.input_dim, total);
    out.labels.resize(total);

    int col = 0;
    for (int c = 0; c < spec.num_classes; ++c) {
        Rng rng(derive_seed(seed, {0x5a11, static_cast<std::uint64_t>(c)}));
        for (int s = 0; s < spec.samples_per_class; ++s, ++col) {
            for (int d = 0; d < spec.input_dim; ++d)
                out.inputs(d, col) = means(d, c) + spec.noise_std * rng.normal();
            out.labels[col] = c;
        }
    }

    // deterministic shuffle so class order carries no information downstream
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(seed, {0x0d9e}));
    shuffle_rng.shuffle(order);
    return subset({std::move(out.inputs), std::move(out.labels), -1}, order);
}

std::pair<LocalDataset, LocalDataset> split_train_test(const LocalDataset& data,
                                                       double test_fraction, std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0)
        throw std::invalid_argument("split_train_test: test_fraction must be in [0, 1)");
    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0x511d}));
    rng.shuffle(order);
    const int n_test = static_cast<int>(test_fraction * data.size());
    std::vector<int> test_idx(order.begin(), order.begin() + n_test);
    std::vector<int> train_idx(order.begin() + n_test, order.end());
    return {subset(data, train_idx), subset(data, test_idx)};
}

}  // namespace feelsim
