#include "sysfi/report.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sysfi/errors.hpp"

namespace sysfi {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open report file for writing: " + path.string());
    out << text;
    if (!out) throw IoError("short write on report file: " + path.string());
}

} // namespace

std::string render_report_json(const CampaignReport& report, const std::string& config_echo_json,
                               std::uint64_t seed) {
    json echo;
    try {
        echo = json::parse(config_echo_json);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config echo is not valid JSON: ") + e.what());
    }

    json doc;
    doc["config"] = echo;
    doc["seed"] = seed;
    doc["complete"] = report.complete;
    doc["faults"] = report.fault_count;
    doc["inputs"] = report.input_count;
    doc["records"] = report.records.size();

    json metrics;
    metrics["sdc1_rate"] = report.sdc1_rate;
    metrics["sdc_topk_rate"] = report.sdc_topk_rate;
    metrics["topk"] = report.thresholds.topk;
    char key_a[32], key_b[32];
    std::snprintf(key_a, sizeof(key_a), "%g", report.thresholds.confidence_drop_a);
    std::snprintf(key_b, sizeof(key_b), "%g", report.thresholds.confidence_drop_b);
    metrics["sdc_confidence_drop_rates"] = {
        {key_a, report.sdc_conf_a_rate},
        {key_b, report.sdc_conf_b_rate},
    };
    metrics["avf"] = report.avf;
    metrics["afd"] = report.afd;
    metrics["zero_distance_count"] = report.zero_distance_count;
    metrics["fit"] = report.fit;
    doc["metrics"] = metrics;

    if (!report.fit_components.empty()) {
        json comps = json::array();
        for (const FitComponent& c : report.fit_components) {
            comps.push_back({{"fit_raw", c.fit_raw}, {"size_bits", c.size_bits}, {"sdc", c.sdc}});
        }
        doc["fit_components"] = comps;
    }

    json hist;
    hist["edges"] = report.histogram.edges;
    hist["counts"] = report.histogram.counts;
    doc["histogram"] = hist;

    return doc.dump(2) + "\n";
}

std::string render_records_csv(const CampaignReport& report) {
    std::string out = "fault_index,input_index,golden_top,faulty_top,sdc1,sdc_topk,"
                      "sdc_conf_a,sdc_conf_b,output_mismatch,faulty_distance\n";
    for (const InjectionRecord& r : report.records) {
        out += std::to_string(r.fault_index);
        out += ',';
        out += std::to_string(r.input_index);
        out += ',';
        out += std::to_string(argmax_index(r.golden));
        out += ',';
        out += std::to_string(argmax_index(r.faulty));
        out += ',';
        out += r.sdc1 ? '1' : '0';
        out += ',';
        out += r.sdc_topk ? '1' : '0';
        out += ',';
        out += r.sdc_conf_a ? '1' : '0';
        out += ',';
        out += r.sdc_conf_b ? '1' : '0';
        out += ',';
        out += r.output_mismatch ? '1' : '0';
        out += ',';
        out += fmt_double(r.faulty_distance);
        out += '\n';
    }
    return out;
}

std::string render_histogram_csv(const CampaignReport& report) {
    std::string out = "bin_left,bin_right,count\n";
    const Histogram& h = report.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out += fmt_double(h.edges[b]);
        out += ',';
        out += fmt_double(h.edges[b + 1]);
        out += ',';
        out += std::to_string(h.counts[b]);
        out += '\n';
    }
    return out;
}

ReportFiles write_report_files(const std::filesystem::path& out_dir, const CampaignReport& report,
                               const std::string& config_echo_json, std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    ReportFiles files{out_dir / "report.json", out_dir / "records.csv", out_dir / "histogram.csv"};
    write_text(files.report, render_report_json(report, config_echo_json, seed));
    write_text(files.records, render_records_csv(report));
    write_text(files.histogram, render_histogram_csv(report));
    return files;
}

} // namespace sysfi
