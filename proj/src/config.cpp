#include "feelsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "feelsim/rng.hpp"
#include "feelsim/units.hpp"

namespace feelsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

struct KeyValue {
    std::string value;
    int line = 0;
};

using SectionMap = std::map<std::string, std::map<std::string, KeyValue>>;

SectionMap tokenize(const std::string& text) {
    SectionMap out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty section");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key '" + key + "' outside any section");
        if (out[section].count(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "' in section [" + section + "]");
        out[section][key] = KeyValue{value, line_no};
    }
    return out;
}

class Reader {
  public:
    explicit Reader(SectionMap sections) : sections_(std::move(sections)) {}

    bool has(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string raw(const std::string& section, const std::string& key) {
        consumed_.insert(section + "." + key);
        return sections_.at(section).at(key).value;
    }

    double number(const std::string& section, const std::string& key, double fallback) {
        if (!has(section, key)) return fallback;
        const std::string v = raw(section, key);
        try {
            std::size_t used = 0;
            const double parsed = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("");
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError("config: [" + section + "] " + key + " = '" + v +
                              "' is not a number");
        }
    }

    long long integer(const std::string& section, const std::string& key, long long fallback) {
        if (!has(section, key)) return fallback;
        const double v = number(section, key, 0.0);
        const auto r = static_cast<long long>(v);
        if (static_cast<double>(r) != v)
            throw ConfigError("config: [" + section + "] " + key + " must be an integer");
        return r;
    }

    bool flag(const std::string& section, const std::string& key, bool fallback) {
        if (!has(section, key)) return fallback;
        const std::string v = raw(section, key);
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError("config: [" + section + "] " + key + " must be on/off");
    }

    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback) {
        if (!has(section, key)) return fallback;
        return raw(section, key);
    }

    void reject_unknown() const {
        for (const auto& [section, keys] : sections_)
            for (const auto& [key, kv] : keys)
                if (!consumed_.count(section + "." + key))
                    throw ConfigError("config line " + std::to_string(kv.line) +
                                      ": unknown key '" + key + "' in section [" + section + "]");
    }

  private:
    SectionMap sections_;
    std::set<std::string> consumed_;
};

void check(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ConfigError("config: " + field + " " + rule);
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& text) {
    Reader r(tokenize(text));
    ExperimentConfig cfg;
    SimulationConfig& sim = cfg.sim;

    sim.num_workers = static_cast<int>(r.integer("simulation", "num_workers", sim.num_workers));
    sim.participants_per_round = static_cast<int>(
        r.integer("simulation", "participants_per_round", sim.participants_per_round));
    sim.rounds = static_cast<int>(r.integer("simulation", "rounds", sim.rounds));
    sim.deadline_s = r.number("simulation", "deadline_s", sim.deadline_s);
    sim.bandwidth_hz = r.number("simulation", "bandwidth_hz", sim.bandwidth_hz);
    if (r.has("simulation", "model_bits")) {
        const std::string v = r.raw("simulation", "model_bits");
        if (v == "auto") {
            sim.model_bits = 0.0;
        } else {
            try {
                sim.model_bits = std::stod(v);
            } catch (const std::exception&) {
                throw ConfigError("config: [simulation] model_bits must be 'auto' or a number");
            }
            check(sim.model_bits > 0.0, "[simulation] model_bits", "must be > 0");
        }
    }
    sim.energy_budget_j = r.number("simulation", "energy_budget_j", sim.energy_budget_j);
    sim.initial_battery_j = r.number("simulation", "initial_battery_j", sim.initial_battery_j);
    sim.master_seed =
        static_cast<std::uint64_t>(r.integer("simulation", "master_seed",
                                             static_cast<long long>(sim.master_seed)));

    sim.trainer.learning_rate = r.number("trainer", "learning_rate", sim.trainer.learning_rate);
    sim.trainer.batch_size =
        static_cast<int>(r.integer("trainer", "batch_size", sim.trainer.batch_size));
    sim.trainer.epochs = static_cast<int>(r.integer("trainer", "epochs", sim.trainer.epochs));
    sim.trainer.threshold = r.number("trainer", "threshold", sim.trainer.threshold);
    sim.exclusion_enabled = r.flag("trainer", "exclusion", sim.exclusion_enabled);
    const std::string rule = r.text("trainer", "prob_rule", "true_label");
    if (rule == "true_label")
        sim.trainer.prob_rule = ProbRule::true_label;
    else if (rule == "max_class")
        sim.trainer.prob_rule = ProbRule::max_class;
    else
        throw ConfigError("config: [trainer] prob_rule must be true_label or max_class");

    sim.channel.num_antennas =
        static_cast<int>(r.integer("channel", "num_antennas", sim.channel.num_antennas));
    sim.channel.noise_power_w = r.number("channel", "noise_power_w", sim.channel.noise_power_w);
    sim.channel.rician_factor_db =
        r.number("channel", "rician_factor_db", sim.channel.rician_factor_db);
    sim.channel.path_loss_exponent =
        r.number("channel", "path_loss_exponent", sim.channel.path_loss_exponent);
    sim.channel.reference_distance_m =
        r.number("channel", "reference_distance_m", sim.channel.reference_distance_m);
    sim.interference = r.flag("channel", "interference",
                              sim.interference == InterferenceMode::eq10_verbatim)
                           ? InterferenceMode::eq10_verbatim
                           : InterferenceMode::tdma_isolated;
    sim.min_distance_m = r.number("channel", "min_distance_m", sim.min_distance_m);
    sim.max_distance_m = r.number("channel", "max_distance_m", sim.max_distance_m);

    sim.compute.f_min_hz = r.number("worker", "f_min_hz", sim.compute.f_min_hz);
    sim.compute.f_max_hz = r.number("worker", "f_max_hz", sim.compute.f_max_hz);
    sim.compute.alpha = r.number("worker", "alpha", sim.compute.alpha);
    sim.compute.cycles_per_sample =
        r.number("worker", "cycles_per_sample", sim.compute.cycles_per_sample);
    if (r.has("worker", "p_min_dbm")) sim.power.p_min_w = dbm_to_watts(r.number("worker", "p_min_dbm", 0.0));
    if (r.has("worker", "p_max_dbm")) sim.power.p_max_w = dbm_to_watts(r.number("worker", "p_max_dbm", 0.0));

    sim.hidden_width = static_cast<int>(r.integer("model", "hidden_width", sim.hidden_width));
    sim.dirichlet_concentration =
        r.number("data", "dirichlet_concentration", sim.dirichlet_concentration);

    const std::string source = r.text("data", "source", "synthetic");
    if (source == "synthetic")
        cfg.data.kind = DataSource::Kind::synthetic;
    else if (source == "idx")
        cfg.data.kind = DataSource::Kind::idx;
    else
        throw ConfigError("config: [data] source must be synthetic or idx");

    cfg.data.blob.input_dim =
        static_cast<int>(r.integer("data", "input_dim", cfg.data.blob.input_dim));
    cfg.data.blob.num_classes =
        static_cast<int>(r.integer("data", "classes", cfg.data.blob.num_classes));
    cfg.data.blob.samples_per_class = static_cast<int>(
        r.integer("data", "samples_per_class", cfg.data.blob.samples_per_class));
    cfg.data.blob.class_spread = r.number("data", "class_spread", cfg.data.blob.class_spread);
    cfg.data.blob.noise_std = r.number("data", "noise_std", cfg.data.blob.noise_std);
    cfg.data.test_fraction = r.number("data", "test_fraction", cfg.data.test_fraction);
    cfg.data.train_images = r.text("data", "train_images", "");
    cfg.data.train_labels = r.text("data", "train_labels", "");
    cfg.data.test_images = r.text("data", "test_images", "");
    cfg.data.test_labels = r.text("data", "test_labels", "");

    cfg.out_dir = r.text("output", "dir", cfg.out_dir);

    r.reject_unknown();

    // invariants, named by field
    check(sim.num_workers >= 1, "[simulation] num_workers", "must be >= 1");
    check(sim.participants_per_round >= 1 && sim.participants_per_round <= sim.num_workers,
          "[simulation] participants_per_round", "must be in [1, num_workers]");
    check(sim.rounds >= 1, "[simulation] rounds", "must be >= 1");
    check(sim.deadline_s > 0.0, "[simulation] deadline_s", "must be > 0");
    check(sim.bandwidth_hz > 0.0, "[simulation] bandwidth_hz", "must be > 0");
    check(sim.energy_budget_j > 0.0, "[simulation] energy_budget_j", "must be > 0");
    check(sim.initial_battery_j >= 0.0, "[simulation] initial_battery_j", "must be >= 0");
    check(sim.trainer.learning_rate > 0.0, "[trainer] learning_rate", "must be > 0");
    check(sim.trainer.batch_size >= 1, "[trainer] batch_size", "must be >= 1");
    check(sim.trainer.epochs >= 1, "[trainer] epochs", "must be >= 1");
    check(sim.trainer.threshold >= 0.0 && sim.trainer.threshold <= 1.0, "[trainer] threshold",
          "must be in [0, 1]");
    check(sim.channel.num_antennas >= 1, "[channel] num_antennas", "must be >= 1");
    check(sim.channel.noise_power_w > 0.0, "[channel] noise_power_w", "must be > 0");
    check(sim.channel.path_loss_exponent > 0.0, "[channel] path_loss_exponent", "must be > 0");
    check(sim.channel.reference_distance_m > 0.0, "[channel] reference_distance_m", "must be > 0");
    check(sim.min_distance_m > 0.0 && sim.min_distance_m <= sim.max_distance_m,
          "[channel] min_distance_m", "must satisfy 0 < min <= max");
    check(sim.compute.f_min_hz > 0.0 && sim.compute.f_min_hz <= sim.compute.f_max_hz,
          "[worker] f_min_hz", "must satisfy 0 < f_min <= f_max");
    check(sim.compute.alpha > 0.0, "[worker] alpha", "must be > 0");
    check(sim.compute.cycles_per_sample > 0.0, "[worker] cycles_per_sample", "must be > 0");
    check(sim.power.p_min_w > 0.0 && sim.power.p_min_w <= sim.power.p_max_w,
          "[worker] p_min_dbm", "must satisfy p_min <= p_max");
    check(sim.hidden_width >= 1, "[model] hidden_width", "must be >= 1");
    check(sim.dirichlet_concentration > 0.0, "[data] dirichlet_concentration", "must be > 0");
    check(cfg.data.test_fraction > 0.0 && cfg.data.test_fraction < 1.0, "[data] test_fraction",
          "must be in (0, 1)");
    if (cfg.data.kind == DataSource::Kind::synthetic) {
        check(cfg.data.blob.input_dim >= 1, "[data] input_dim", "must be >= 1");
        check(cfg.data.blob.num_classes >= 2, "[data] classes", "must be >= 2");
        check(cfg.data.blob.samples_per_class >= 1, "[data] samples_per_class", "must be >= 1");
    } else {
        check(!cfg.data.train_images.empty(), "[data] train_images", "is required for idx source");
        check(!cfg.data.train_labels.empty(), "[data] train_labels", "is required for idx source");
        check(!cfg.data.test_images.empty(), "[data] test_images", "is required for idx source");
        check(!cfg.data.test_labels.empty(), "[data] test_labels", "is required for idx source");
    }
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config_text(buf.str());
}

std::pair<LocalDataset, LocalDataset> load_dataset_pair(const DataSource& source,
                                                        std::uint64_t master_seed) {
    if (source.kind == DataSource::Kind::idx) {
        LocalDataset train = load_idx_dataset(source.train_images, source.train_labels);
        LocalDataset test = load_idx_dataset(source.test_images, source.test_labels);
        return {std::move(train), std::move(test)};
    }
    const LocalDataset full =
        make_synthetic_blobs(source.blob, derive_seed(master_seed, {0xda7a}));
    return split_train_test(full, source.test_fraction, derive_seed(master_seed, {0xda7b}));
}

}  // namespace feelsim
