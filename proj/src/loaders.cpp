#include "tsnet/loaders.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tsnet/error.hpp"

namespace tsnet {

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw ConfigError("csv: missing column '" + name + "'; file has columns: " +
                          [&] {
                              std::string all;
                              for (const auto& h : header)
                                  all += (all.empty() ? "" : ", ") + h;
                              return all;
                          }());
    }
};

std::vector<std::string> split_cells(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

Table read_table(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file '" + path + "'");

    Table t;
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw ParseError("csv '" + path + "': empty dataset (no header row)");
    t.header = split_cells(line, delim);

    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto cells = split_cells(line, delim);
        if (cells.size() != t.header.size())
            throw ParseError("csv '" + path + "' row " + std::to_string(row_no) + ": " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(t.header.size()));
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), values[c]);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw ParseError("csv '" + path + "' row " + std::to_string(row_no) +
                                 ", column '" + t.header[c] + "': non-numeric cell '" +
                                 cell + "'");
        }
        t.rows.push_back(std::move(values));
    }
    if (t.rows.empty()) throw ParseError("csv '" + path + "': empty dataset");
    return t;
}

std::size_t as_level(double v, const std::string& column, std::size_t row,
                     std::size_t cardinality) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(cardinality))
        throw ParseError("csv row " + std::to_string(row) + ", column '" + column +
                         "': level " + std::to_string(v) + " is not an integer in [0, " +
                         std::to_string(cardinality) + ")");
    return static_cast<std::size_t>(r);
}

// z-scores the given feature columns in place using statistics of the
// training rows only; constant columns are centered but not scaled.
void standardize_features(Dataset& ds, const Split& split) {
    const std::size_t d = ds.feature_dim;
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (std::size_t id : split.train)
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.instances[id].features[j];
    const double n = static_cast<double>(split.train.size());
    for (double& m : mean) m /= n;
    for (std::size_t id : split.train)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = ds.instances[id].features[j] - mean[j];
            var[j] += c * c;
        }
    std::vector<double> inv_std(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        var[j] /= n;
        if (var[j] > 0.0) inv_std[j] = 1.0 / std::sqrt(var[j]);
    }
    for (Instance& inst : ds.instances)
        for (std::size_t j = 0; j < d; ++j)
            inst.features[j] = (inst.features[j] - mean[j]) * inv_std[j];
}

void append_bias(Dataset& ds) {
    for (Instance& inst : ds.instances) inst.features.push_back(1.0);
    ds.feature_dim += 1;
}

void finish_ingestion(LoadedData& data, bool standardize, bool bias, double fraction,
                      std::uint64_t seed) {
    data.split = make_split(data.dataset, fraction, seed, Stratify::PerDomain);
    if (standardize) standardize_features(data.dataset, data.split);
    if (bias) append_bias(data.dataset);
    data.dataset.validate();
}

}  // namespace

LoadedData load_csv(const DatasetConfig& cfg) {
    if (!cfg.schema) throw ConfigError("load_csv: no descriptor schema configured");
    if (cfg.label_column.empty()) throw ConfigError("load_csv: no label column configured");
    const DescriptorSchema& schema = *cfg.schema;
    if (cfg.factor_columns.size() != schema.factors().size())
        throw ConfigError("load_csv: " + std::to_string(cfg.factor_columns.size()) +
                          " factor columns for " +
                          std::to_string(schema.factors().size()) + " schema factors");

    const Table t = read_table(cfg.path, cfg.delimiter);
    const std::size_t label_col = t.column(cfg.label_column);
    std::vector<std::size_t> factor_cols;
    for (const auto& name : cfg.factor_columns) factor_cols.push_back(t.column(name));

    std::vector<std::size_t> feature_cols;
    if (cfg.feature_columns.empty()) {
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c == label_col) continue;
            if (std::find(factor_cols.begin(), factor_cols.end(), c) != factor_cols.end())
                continue;
            feature_cols.push_back(c);
        }
    } else {
        for (const auto& name : cfg.feature_columns) feature_cols.push_back(t.column(name));
    }
    if (feature_cols.empty()) throw ConfigError("load_csv: no feature columns");

    LoadedData data;
    data.schema = schema;
    data.dataset.kind = cfg.kind;

    std::map<std::vector<std::size_t>, std::size_t> group_of;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::vector<std::size_t> levels(factor_cols.size());
        for (std::size_t f = 0; f < factor_cols.size(); ++f)
            levels[f] = as_level(row[factor_cols[f]], cfg.factor_columns[f], r + 2,
                                 schema.factors()[f].cardinality);

        auto it = group_of.find(levels);
        if (it == group_of.end()) {
            std::string label;
            for (std::size_t f = 0; f < levels.size(); ++f)
                label += (f ? "/" : "") + schema.factors()[f].name + "-" +
                         std::to_string(levels[f]);
            const std::size_t g = data.dataset.add_group(label, encode(schema, levels));
            it = group_of.emplace(levels, g).first;
        }
        std::vector<double> x(feature_cols.size());
        for (std::size_t f = 0; f < feature_cols.size(); ++f) x[f] = row[feature_cols[f]];
        data.dataset.add_instance(it->second, std::move(x), row[label_col]);
    }

    finish_ingestion(data, cfg.standardize, cfg.append_bias_feature, cfg.split_fraction,
                     cfg.split_seed);
    return data;
}

LoadedData load_school(const std::string& path, std::size_t min_students_per_year,
                       double split_fraction, std::uint64_t split_seed, bool standardize,
                       bool append_bias_feature, bool shared_bias) {
    const Table t = read_table(path, ',');
    const std::size_t school_col = t.column("school");
    const std::size_t year_col = t.column("year");
    const std::size_t score_col = t.column("score");

    // (school, year) student counts; years are 1..3 in the published layout.
    std::map<long, std::array<std::size_t, 3>> counts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long school = std::lround(t.rows[r][school_col]);
        const long year = std::lround(t.rows[r][year_col]);
        if (year < 1 || year > 3)
            throw ParseError("school csv row " + std::to_string(r + 2) +
                             ": year must be 1..3, got " + std::to_string(year));
        auto& c = counts.try_emplace(school, std::array<std::size_t, 3>{0, 0, 0})
                      .first->second;
        ++c[static_cast<std::size_t>(year - 1)];
    }

    // A school passes when each of its three year groups exceeds the
    // threshold; threshold 0 disables the filter entirely.
    std::vector<long> retained;
    for (const auto& [school, c] : counts) {
        if (min_students_per_year == 0 ||
            (c[0] > min_students_per_year && c[1] > min_students_per_year &&
             c[2] > min_students_per_year))
            retained.push_back(school);
    }
    if (retained.empty())
        throw ConfigError("school: no school passes the >" +
                          std::to_string(min_students_per_year) +
                          " students-per-year filter");

    std::map<long, std::size_t> school_level;
    for (std::size_t i = 0; i < retained.size(); ++i) school_level[retained[i]] = i;

    LoadedData data;
    data.schema = DescriptorSchema({{"school", retained.size()}, {"year", 3}},
                                   EncodingMode::Distributed, shared_bias);
    data.dataset.kind = TaskKind::Regression;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> group_of;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto it = school_level.find(std::lround(row[school_col]));
        if (it == school_level.end()) continue;
        const std::size_t year = static_cast<std::size_t>(std::lround(row[year_col])) - 1;
        const auto key = std::make_pair(it->second, year);
        auto git = group_of.find(key);
        if (git == group_of.end()) {
            const std::size_t levels[2] = {key.first, key.second};
            const std::size_t g = data.dataset.add_group(
                "school-" + std::to_string(it->first) + "/year-" +
                    std::to_string(year + 1),
                encode(data.schema, levels));
            git = group_of.emplace(key, g).first;
        }
        std::vector<double> x;
        x.reserve(t.header.size() - 3);
        for (std::size_t c = 0; c < t.header.size(); ++c)
            if (c != school_col && c != year_col && c != score_col) x.push_back(row[c]);
        if (x.empty()) throw ParseError("school csv: no feature columns");
        data.dataset.add_instance(git->second, std::move(x), row[score_col]);
    }

    finish_ingestion(data, standardize, append_bias_feature, split_fraction, split_seed);
    return data;
}

LoadedData load_restaurant(const std::string& path, double split_fraction,
                           std::uint64_t split_seed, bool standardize,
                           bool append_bias_feature) {
    const Table t = read_table(path, ',');
    const std::size_t rest_col = t.column("restaurant");
    const std::size_t task_cols[3] = {t.column("food"), t.column("service"),
                                      t.column("overall")};
    static const char* task_names[3] = {"food", "service", "overall"};

    std::map<long, std::size_t> freq;
    for (const auto& row : t.rows) ++freq[std::lround(row[rest_col])];

    // 8 most frequently scored restaurants; ties broken by smaller id.
    std::vector<std::pair<long, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    const std::size_t keep = std::min<std::size_t>(8, ranked.size());
    std::vector<long> selected;
    for (std::size_t i = 0; i < keep; ++i) selected.push_back(ranked[i].first);
    std::sort(selected.begin(), selected.end());
    std::map<long, std::size_t> rest_level;
    for (std::size_t i = 0; i < selected.size(); ++i) rest_level[selected[i]] = i;

    LoadedData data;
    data.domain_schema = DescriptorSchema({{"restaurant", keep}},
                                          EncodingMode::OneHotAtomic, false);
    data.task_schema =
        DescriptorSchema({{"task", 3}}, EncodingMode::OneHotAtomic, false);
    // The concatenated encoding equals a distributed (restaurant, task)
    // schema, which is what the joint protocols consume.
    data.schema = DescriptorSchema({{"restaurant", keep}, {"task", 3}},
                                   EncodingMode::Distributed, false);
    data.dataset.kind = TaskKind::Regression;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> group_of;
    for (const auto& row : t.rows) {
        const auto it = rest_level.find(std::lround(row[rest_col]));
        if (it == rest_level.end()) continue;
        std::vector<double> x;
        x.reserve(t.header.size() - 4);
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c == rest_col || c == task_cols[0] || c == task_cols[1] ||
                c == task_cols[2])
                continue;
            x.push_back(row[c]);
        }
        if (x.empty()) throw ParseError("restaurant csv: no feature columns");

        for (std::size_t task = 0; task < 3; ++task) {
            const auto key = std::make_pair(it->second, task);
            auto git = group_of.find(key);
            if (git == group_of.end()) {
                const std::size_t d_levels[1] = {key.first};
                const std::size_t t_levels[1] = {task};
                const Descriptor desc =
                    concat_mdmt(encode(*data.domain_schema, d_levels),
                                encode(*data.task_schema, t_levels));
                const std::size_t g = data.dataset.add_group(
                    "restaurant-" + std::to_string(it->first) + "/" + task_names[task],
                    desc);
                git = group_of.emplace(key, g).first;
            }
            data.dataset.add_instance(git->second, x, row[task_cols[task]]);
        }
    }

    finish_ingestion(data, standardize, append_bias_feature, split_fraction, split_seed);
    return data;
}

std::vector<Descriptor> load_descriptor_rows(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open descriptor file '" + path + "'");
    std::vector<Descriptor> out;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto cells = split_cells(line, delimiter);
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto [ptr, ec] = std::from_chars(
                cells[c].data(), cells[c].data() + cells[c].size(), values[c]);
            if (ec != std::errc() || ptr != cells[c].data() + cells[c].size())
                throw ParseError("descriptors '" + path + "' row " +
                                 std::to_string(row_no) + ": non-numeric cell '" +
                                 cells[c] + "'");
        }
        if (!out.empty() && values.size() != out.front().encoded.size())
            throw ShapeError("descriptors '" + path + "': ragged rows");
        out.push_back(raw_descriptor(std::move(values)));
    }
    if (out.empty()) throw ParseError("descriptors '" + path + "': empty file");
    return out;
}

}  // namespace tsnet
