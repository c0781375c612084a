#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sysfi/campaign.hpp"

namespace sysfi {

// Canonical JSON rendering of a report: aggregates, histogram, the echoed
// campaign configuration and the seed. Deliberately excludes wall-clock
// stats so reruns with the same seed produce byte-identical files.
// `config_echo_json` must be a JSON object (pass "{}" when there is none).
std::string render_report_json(const CampaignReport& report, const std::string& config_echo_json,
                               std::uint64_t seed);

std::string render_records_csv(const CampaignReport& report);
std::string render_histogram_csv(const CampaignReport& report);

struct ReportFiles {
    std::filesystem::path report;
    std::filesystem::path records;
    std::filesystem::path histogram;
};

// Writes report.json, records.csv and histogram.csv under out_dir
// (created if needed).
ReportFiles write_report_files(const std::filesystem::path& out_dir, const CampaignReport& report,
                               const std::string& config_echo_json, std::uint64_t seed);

} // namespace sysfi
