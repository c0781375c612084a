#include "sysfi/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "sysfi/errors.hpp"

namespace sysfi {

Histogram histogram_afd(std::span<const InjectionRecord> records, int bins) {
    if (bins < 1) throw ValidationError("histogram_afd: bins must be >= 1");
    Histogram hist;
    hist.counts.assign(static_cast<std::size_t>(bins), 0);
    if (records.empty()) {
        hist.edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
        return hist;
    }

    double lo = records.front().faulty_distance;
    double hi = lo;
    for (const InjectionRecord& r : records) {
        lo = std::min(lo, r.faulty_distance);
        hi = std::max(hi, r.faulty_distance);
    }
    const double width = (hi - lo) / bins;
    hist.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) hist.edges[static_cast<std::size_t>(b)] = lo + width * b;
    hist.edges.back() = hi;

    for (const InjectionRecord& r : records) {
        std::size_t bin = 0;
        if (width > 0.0) {
            bin = static_cast<std::size_t>((r.faulty_distance - lo) / width);
            if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins) - 1;
        }
        ++hist.counts[bin];
    }
    return hist;
}

CampaignReport run_campaign(const NetworkModel& model, const std::vector<QuantTensor>& inputs,
                            const ExecutionPlan& plan_template, std::span<const Fault> faults,
                            const CampaignOptions& options) {
    if (inputs.empty()) throw ValidationError("run_campaign: no inputs");
    plan_template.validate(model);
    for (const Fault& fault : faults) validate_fault(fault, plan_template.config);

    const auto start = std::chrono::steady_clock::now();

    // Golden runs, one per input, through the same hierarchical path with an
    // empty fault list (identical to the fast path on integer models).
    ExecutionPlan golden_plan = plan_template;
    golden_plan.faults.clear();
    std::vector<std::vector<double>> golden(inputs.size());
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        golden[n] = infer_hierarchical(model, inputs[n], golden_plan);
    }

    const std::size_t total = faults.size() * inputs.size();
    std::vector<InjectionRecord> records(total);
    std::vector<char> done(total, 0);
    std::atomic<std::size_t> next{0};

    const MetricThresholds& th = options.thresholds;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            if (options.cancel && options.cancel->load()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const std::size_t job = next.fetch_add(1);
            if (job >= total) return;
            const std::size_t fault_index = job / inputs.size();
            const std::size_t input_index = job % inputs.size();

            try {
                ExecutionPlan plan = plan_template;
                plan.faults = {faults[fault_index]};
                const std::vector<double> faulty =
                    infer_hierarchical(model, inputs[input_index], plan);
                const std::vector<double>& gold = golden[input_index];

                InjectionRecord rec;
                rec.fault_index = fault_index;
                rec.input_index = input_index;
                rec.golden = gold;
                rec.faulty = faulty;
                rec.sdc1 = sdc_top1(gold, faulty);
                rec.sdc_topk = sdc_topk(gold, faulty, std::min(th.topk, gold.size()));
                rec.sdc_conf_a = sdc_confidence_drop(gold, faulty, th.confidence_drop_a);
                rec.sdc_conf_b = sdc_confidence_drop(gold, faulty, th.confidence_drop_b);
                rec.faulty_distance = faulty_distance(gold, faulty);
                for (std::size_t c = 0; c < gold.size(); ++c) {
                    if (std::abs(gold[c] - faulty[c]) > th.mismatch_tolerance) {
                        rec.output_mismatch = true;
                        break;
                    }
                }
                records[job] = std::move(rec);
                done[job] = 1;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int workers = options.workers > 0 ? options.workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(total, 1)));
    if (workers == 1 || total <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    CampaignReport report;
    report.fault_count = faults.size();
    report.input_count = inputs.size();
    report.thresholds = th;
    report.complete = true;
    for (std::size_t job = 0; job < total; ++job) {
        if (done[job]) {
            report.records.push_back(std::move(records[job]));
        } else {
            report.complete = false;
        }
    }

    const std::size_t n = report.records.size();
    if (n > 0) {
        std::size_t c1 = 0, ck = 0, ca = 0, cb = 0, mism = 0, zeros = 0;
        double dist_sum = 0.0;
        for (const InjectionRecord& r : report.records) {
            c1 += r.sdc1;
            ck += r.sdc_topk;
            ca += r.sdc_conf_a;
            cb += r.sdc_conf_b;
            mism += r.output_mismatch;
            zeros += (r.faulty_distance == 0.0);
            dist_sum += r.faulty_distance;
        }
        report.sdc1_rate = static_cast<double>(c1) / n;
        report.sdc_topk_rate = static_cast<double>(ck) / n;
        report.sdc_conf_a_rate = static_cast<double>(ca) / n;
        report.sdc_conf_b_rate = static_cast<double>(cb) / n;
        report.avf = static_cast<double>(mism) / n;
        report.afd = dist_sum / n;
        report.zero_distance_count = zeros;
    }
    report.histogram = histogram_afd(report.records, options.histogram_bins);

    report.fit_components = options.fit_components;
    for (FitComponent& comp : report.fit_components) comp.sdc = report.sdc1_rate;
    report.fit = fit_accelerator(report.fit_components);

    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    if (elapsed.count() > 0.0) {
        report.simulations_per_second = static_cast<double>(n) / elapsed.count();
    }
    return report;
}

} // namespace sysfi
