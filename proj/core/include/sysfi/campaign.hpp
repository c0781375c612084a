#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "sysfi/inference.hpp"
#include "sysfi/metrics.hpp"

namespace sysfi {

struct MetricThresholds {
    std::size_t topk = 5;
    double confidence_drop_a = 0.10;
    double confidence_drop_b = 0.20;
    double mismatch_tolerance = 1e-9; // any |G-F| beyond this counts as corrupted output
};

// Outcome of one (fault, input) injection run.
struct InjectionRecord {
    std::size_t fault_index = 0;
    std::size_t input_index = 0;
    std::vector<double> golden;
    std::vector<double> faulty;
    bool sdc1 = false;
    bool sdc_topk = false;
    bool sdc_conf_a = false;
    bool sdc_conf_b = false;
    bool output_mismatch = false;
    double faulty_distance = 0.0;
};

struct Histogram {
    std::vector<double> edges;        // bins + 1 edges, equal width over [min, max]
    std::vector<std::size_t> counts;  // counts sum to the record count
};

// Equal-width bins over [min, max] of the faulty distances. A degenerate
// range collapses into the first bin.
Histogram histogram_afd(std::span<const InjectionRecord> records, int bins);

struct CampaignOptions {
    int workers = 0; // 0 = hardware concurrency
    int histogram_bins = 50;
    MetricThresholds thresholds;
    std::vector<FitComponent> fit_components; // sdc field is overwritten with the measured rate
    std::atomic<bool>* cancel = nullptr;      // optional graceful-drain flag
};

struct CampaignReport {
    std::vector<InjectionRecord> records;
    std::size_t fault_count = 0;
    std::size_t input_count = 0;

    double sdc1_rate = 0.0;
    double sdc_topk_rate = 0.0;
    double sdc_conf_a_rate = 0.0;
    double sdc_conf_b_rate = 0.0;
    double avf = 0.0; // fraction of injections corrupting any output element
    double afd = 0.0; // mean faulty distance
    std::size_t zero_distance_count = 0; // height of the zero peak; equals
                                         // records * (1 - sdc1_rate) by the
                                         // zero-iff-argmax-unchanged identity
    Histogram histogram;

    double fit = 0.0; // sum fit_raw * size * measured SDC over fit components
    std::vector<FitComponent> fit_components;

    bool complete = true;                  // false after a graceful drain
    double simulations_per_second = 0.0;   // wall-clock stat; never serialized
    MetricThresholds thresholds;
};

// Runs golden (cached per input) and faulty inference for every
// (fault, input) pair, classifies each outcome and aggregates all metrics.
// (fault, input) pairs execute on a worker pool; records merge in stable
// (fault index, input index) order, so the report content is independent of
// worker count and scheduling.
CampaignReport run_campaign(const NetworkModel& model, const std::vector<QuantTensor>& inputs,
                            const ExecutionPlan& plan_template, std::span<const Fault> faults,
                            const CampaignOptions& options);

} // namespace sysfi
