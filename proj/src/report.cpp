#include "tsnet/report.hpp"

#include <fstream>
#include <sstream>

#include "tsnet/config.hpp"
#include "tsnet/error.hpp"

namespace tsnet {

double mean_of_rows(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw ValueError("report: no rows to aggregate");
    double sum = 0.0;
    for (const MetricRow& r : rows) sum += r.value;
    return sum / static_cast<double>(rows.size());
}

void write_report(const ExperimentReport& report, std::ostream& out) {
    out << "[report]\n";
    out << "setting = " << report.setting << '\n';
    out << "config_hash = " << report.config_hash << '\n';
    out << "seed = " << report.seed << '\n';
    out << "metric = " << report.metric << '\n';
    out << "domain_weighting = " << report.domain_weighting << '\n';
    out << "aggregate = " << format_double(report.aggregate) << '\n';
    out << "\n[rows]\n";
    for (const MetricRow& r : report.rows)
        out << r.domain << " = " << format_double(r.value) << '\n';
    out << "\n[curve]\n";
    for (const auto& [epoch, value] : report.curve)
        out << "epoch_" << epoch << " = " << format_double(value) << '\n';
    for (const MethodResult& m : report.comparisons) {
        out << "\n[comparison." << m.method << "]\n";
        out << "aggregate = " << format_double(m.aggregate) << '\n';
        for (const MetricRow& r : m.rows)
            out << r.domain << " = " << format_double(r.value) << '\n';
    }
}

void write_report_file(const ExperimentReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_report(report, out);
    if (!out) throw Error("failed writing report to '" + path + "'");
}

ExperimentReport parse_report(std::istream& in) {
    const Config doc = Config::parse(in);
    if (!doc.has_section("report")) throw ParseError("report: missing [report] section");

    ExperimentReport rep;
    rep.setting = doc.get("report", "setting");
    rep.config_hash = doc.get_or("report", "config_hash", "");
    rep.seed = doc.get_seed_or("report", "seed", 0);
    rep.metric = doc.get_or("report", "metric", "");
    rep.domain_weighting = doc.get_or("report", "domain_weighting", "");
    rep.aggregate = doc.get_double("report", "aggregate");

    if (const auto* rows = doc.find_section("rows"))
        for (const auto& [k, v] : rows->entries)
            rep.rows.push_back({k, doc.get_double("rows", k)});
    if (const auto* curve = doc.find_section("curve")) {
        for (const auto& [k, v] : curve->entries) {
            if (k.rfind("epoch_", 0) != 0)
                throw ParseError("report: bad curve key '" + k + "'");
            rep.curve.emplace_back(std::stoull(k.substr(6)),
                                   doc.get_double("curve", k));
        }
    }
    for (const auto& section : doc.sections()) {
        if (section.name.rfind("comparison.", 0) != 0) continue;
        MethodResult m;
        m.method = section.name.substr(11);
        for (const auto& [k, v] : section.entries) {
            const double value = doc.get_double(section.name, k);
            if (k == "aggregate")
                m.aggregate = value;
            else
                m.rows.push_back({k, value});
        }
        rep.comparisons.push_back(std::move(m));
    }
    return rep;
}

ExperimentReport parse_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report file '" + path + "'");
    return parse_report(in);
}

}  // namespace tsnet
