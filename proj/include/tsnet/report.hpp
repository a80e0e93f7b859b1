#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tsnet {

struct MetricRow {
    std::string domain;
    double value = 0.0;
};

// A named comparison method run on the same splits (blind-transfer LR,
// tensor completion, an alternative encoding, ...).
struct MethodResult {
    std::string method;
    std::vector<MetricRow> rows;
    double aggregate = 0.0;
};

// Result document of one experiment run. The aggregate is always the mean
// of the per-domain rows, and the domain weighting in force is spelled out
// because the empirical risk can average per domain or per instance.
struct ExperimentReport {
    std::string setting;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string metric;            // rmse | error_rate | accuracy
    std::string domain_weighting;
    std::vector<MetricRow> rows;
    double aggregate = 0.0;
    std::vector<std::pair<std::size_t, double>> curve;
    std::vector<MethodResult> comparisons;
};

// Sets aggregate to the mean of rows; call after filling rows.
double mean_of_rows(const std::vector<MetricRow>& rows);

// Fixed sectioned text schema: [report] header fields, [rows], [curve], and
// one [comparison.<name>] section per comparison. Doubles are %.17g, so a
// rerun with identical inputs reproduces the file byte for byte.
void write_report(const ExperimentReport& report, std::ostream& out);
void write_report_file(const ExperimentReport& report, const std::string& path);
ExperimentReport parse_report(std::istream& in);
ExperimentReport parse_report_file(const std::string& path);

}  // namespace tsnet
