// sysfi: fault-injection campaigns for systolic-array DNN accelerators.
//
// Subcommands:
//   run          execute a campaign from a config file, write report files
//   sample-size  statistical fault-list sizing
//   expand-fault print the lattice points a fault corrupts
//   infer        single inference, optionally faulty, optionally compared
//
// Exit codes: 0 success, 2 unreadable config/arguments, 3 validation
// failure, 4 runtime failure.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sysfi/campaign.hpp"
#include "sysfi/errors.hpp"
#include "sysfi/report.hpp"
#include "sysfi/tensor_io.hpp"

using nlohmann::json;
using namespace sysfi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

std::atomic<bool> g_cancel{false};

void handle_signal(int) { g_cancel.store(true); }

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    try {
        json doc;
        in >> doc;
        return doc;
    } catch (const json::exception& e) {
        throw IoError("malformed config " + path.string() + ": " + e.what());
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- campaign config ----

struct CampaignSetup {
    std::filesystem::path model_path;
    std::filesystem::path inputs_path;
    std::size_t input_count = 0;
    SystolicConfig config;
    std::optional<std::filesystem::path> fault_list_path;
    std::optional<std::vector<std::string>> fault_inline;
    std::optional<FaultListSpec> fault_spec;
    std::optional<std::size_t> target_layer;
    bool weights_on_a = false;
    MetricThresholds thresholds;
    std::vector<FitComponent> fit_components;
    int histogram_bins = 50;
    std::filesystem::path output_dir = "out";
    int workers = 0;
    std::uint64_t seed = 0;
};

SystolicConfig parse_systolic(const json& node) {
    SystolicConfig cfg;
    cfg.n1 = node.at("n1").get<int>();
    cfg.n2 = node.at("n2").get<int>();
    cfg.n3 = node.at("n3").get<int>();
    const std::string preset = node.value("projection", "output-stationary");
    if (preset == "output-stationary") {
        cfg.projection = Projection::output_stationary();
    } else if (preset == "weight-stationary") {
        cfg.projection = Projection::weight_stationary();
    } else if (preset == "custom") {
        const auto p = node.at("p").get<std::vector<std::vector<int>>>();
        if (p.size() != 2 || p[0].size() != 3 || p[1].size() != 3) {
            throw ValidationError("custom projection: p must be a 2x3 integer matrix");
        }
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c) cfg.projection.p[r][c] = p[r][c];
        const auto pi = node.at("pi").get<std::vector<int>>();
        if (pi.size() != 3) throw ValidationError("custom projection: pi must have 3 entries");
        for (int c = 0; c < 3; ++c) cfg.projection.pi[c] = pi[c];
    } else {
        throw ValidationError("unknown projection preset '" + preset + "'");
    }
    if (node.contains("op_format")) cfg.op_format = parse_format(node.at("op_format"));
    if (node.contains("acc_format")) cfg.acc_format = parse_format(node.at("acc_format"));
    return cfg;
}

FaultScope parse_scope(const json& node) {
    FaultScope scope;
    if (node.contains("lines")) {
        scope.lines.clear();
        for (const auto& name : node.at("lines")) {
            const auto line = line_from_name(name.get<std::string>());
            if (!line) throw ValidationError("unknown line in fault scope");
            scope.lines.push_back(*line);
        }
    }
    if (node.contains("kinds")) {
        scope.kinds.clear();
        for (const auto& name : node.at("kinds")) {
            const std::string text = name.get<std::string>();
            if (text == "stuck0") scope.kinds.push_back(FaultKind::Stuck0);
            else if (text == "stuck1") scope.kinds.push_back(FaultKind::Stuck1);
            else if (text == "flip") scope.kinds.push_back(FaultKind::Flip);
            else throw ValidationError("unknown fault kind in scope: " + text);
        }
    }
    scope.permanent = node.value("permanent", true);
    if (node.contains("transient_cycles")) {
        const auto range = node.at("transient_cycles").get<std::vector<Cycle>>();
        if (range.size() != 2) throw ValidationError("transient_cycles must be [first, last]");
        scope.transient_cycles = {{range[0], range[1]}};
    }
    if (node.contains("bit_range")) {
        const auto range = node.at("bit_range").get<std::vector<int>>();
        if (range.size() != 2) throw ValidationError("bit_range must be [low, high]");
        scope.bit_range = {{range[0], range[1]}};
    }
    return scope;
}

CampaignSetup parse_campaign_config(const std::filesystem::path& path) {
    const json doc = load_json_file(path);
    const std::filesystem::path base = path.parent_path();
    CampaignSetup setup;
    try {
        setup.model_path = base / doc.at("model").get<std::string>();
        const json& inputs = doc.at("inputs");
        setup.inputs_path = base / inputs.at("path").get<std::string>();
        setup.input_count = inputs.at("count").get<std::size_t>();
        setup.config = parse_systolic(doc.at("systolic"));

        const json& faults = doc.at("faults");
        const bool has_list = faults.contains("list");
        const bool has_inline = faults.contains("inline");
        const bool has_generate = faults.contains("generate");
        if (static_cast<int>(has_list) + has_inline + has_generate != 1) {
            throw ValidationError(
                "fault section must contain exactly one of 'list', 'inline' and 'generate'");
        }
        if (has_list) {
            setup.fault_list_path = base / faults.at("list").get<std::string>();
        } else if (has_inline) {
            setup.fault_inline = faults.at("inline").get<std::vector<std::string>>();
        } else {
            const json& gen = faults.at("generate");
            FaultListSpec spec;
            if (gen.contains("count")) {
                const json& count = gen.at("count");
                if (count.is_string() && count.get<std::string>() == "statistical") {
                    spec.count = std::nullopt;
                } else {
                    spec.count = count.get<std::size_t>();
                }
            }
            spec.confidence = gen.value("confidence", 0.95);
            spec.margin = gen.value("margin", 0.01);
            spec.expected_rate = gen.value("p", 0.5);
            spec.seed = gen.value("seed", std::uint64_t{0});
            if (gen.contains("scope")) spec.scope = parse_scope(gen.at("scope"));
            setup.fault_spec = spec;
            setup.seed = spec.seed;
        }

        if (doc.contains("target_layer")) {
            setup.target_layer = doc.at("target_layer").get<std::size_t>();
        }
        setup.weights_on_a = doc.value("weights_on_a", false);

        if (doc.contains("metrics")) {
            const json& metrics = doc.at("metrics");
            setup.thresholds.topk = metrics.value("topk", std::size_t{5});
            if (metrics.contains("confidence_drops")) {
                const auto drops = metrics.at("confidence_drops").get<std::vector<double>>();
                if (drops.size() != 2) {
                    throw ValidationError("metrics.confidence_drops must list two thresholds");
                }
                setup.thresholds.confidence_drop_a = drops[0];
                setup.thresholds.confidence_drop_b = drops[1];
            }
        }
        if (doc.contains("fit_components")) {
            for (const json& comp : doc.at("fit_components")) {
                setup.fit_components.push_back(
                    {comp.at("fit_raw").get<double>(), comp.at("size_bits").get<double>(), 0.0});
            }
        }
        setup.histogram_bins = doc.value("histogram_bins", 50);
        if (doc.contains("output_dir")) {
            setup.output_dir = base / doc.at("output_dir").get<std::string>();
        }
        setup.workers = doc.value("workers", 0);
        if (doc.contains("seed")) setup.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return setup;
}

std::vector<QuantTensor> load_inputs(const NetworkModel& model, const std::filesystem::path& path,
                                     std::size_t count) {
    std::vector<QuantTensor> inputs;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.path().extension() == ".tensor") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            if (inputs.size() == count) break;
            inputs.push_back(load_tensor(file));
        }
    } else {
        const IdxImages images = load_idx_images(path);
        for (std::size_t n = 0; n < images.images.size() && n < count; ++n) {
            inputs.push_back(quantize_model_input(model, images.images[n]));
        }
    }
    if (inputs.size() < count) {
        throw ValidationError("input set provides " + std::to_string(inputs.size()) +
                              " inputs, config requests " + std::to_string(count));
    }
    return inputs;
}

json systolic_echo(const SystolicConfig& cfg) {
    json node;
    node["n1"] = cfg.n1;
    node["n2"] = cfg.n2;
    node["n3"] = cfg.n3;
    node["p"] = {{cfg.projection.p[0][0], cfg.projection.p[0][1], cfg.projection.p[0][2]},
                 {cfg.projection.p[1][0], cfg.projection.p[1][1], cfg.projection.p[1][2]}};
    node["pi"] = {cfg.projection.pi[0], cfg.projection.pi[1], cfg.projection.pi[2]};
    node["op_format"] = format_name(cfg.op_format);
    node["acc_format"] = format_name(cfg.acc_format);
    return node;
}

// Everything needed to reproduce the report; worker count and output paths
// deliberately excluded (they cannot change the content).
json config_echo(const CampaignSetup& setup) {
    json echo;
    echo["model"] = setup.model_path.string();
    echo["inputs"] = {{"path", setup.inputs_path.string()}, {"count", setup.input_count}};
    echo["systolic"] = systolic_echo(setup.config);
    if (setup.fault_list_path) {
        echo["faults"] = {{"list", setup.fault_list_path->string()}};
    } else if (setup.fault_inline) {
        echo["faults"] = {{"inline", *setup.fault_inline}};
    } else {
        const FaultListSpec& spec = *setup.fault_spec;
        json gen;
        if (spec.count) {
            gen["count"] = *spec.count;
        } else {
            gen["count"] = "statistical";
            gen["confidence"] = spec.confidence;
            gen["margin"] = spec.margin;
            gen["p"] = spec.expected_rate;
        }
        gen["seed"] = spec.seed;
        json scope;
        json lines = json::array();
        for (Line line : spec.scope.lines) lines.push_back(line_name(line));
        scope["lines"] = lines;
        json kinds = json::array();
        for (FaultKind kind : spec.scope.kinds) kinds.push_back(fault_kind_name(kind));
        scope["kinds"] = kinds;
        scope["permanent"] = spec.scope.permanent;
        if (spec.scope.transient_cycles) {
            scope["transient_cycles"] = {spec.scope.transient_cycles->first,
                                         spec.scope.transient_cycles->second};
        }
        gen["scope"] = scope;
        echo["faults"] = {{"generate", gen}};
    }
    if (setup.target_layer) echo["target_layer"] = *setup.target_layer;
    echo["weights_on_a"] = setup.weights_on_a;
    echo["metrics"] = {{"topk", setup.thresholds.topk},
                       {"confidence_drops", {setup.thresholds.confidence_drop_a,
                                             setup.thresholds.confidence_drop_b}}};
    echo["histogram_bins"] = setup.histogram_bins;
    echo["seed"] = setup.seed;
    return echo;
}

// ---- subcommands ----

struct RunArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> target_layer;
    bool json_output = false;
};

int cmd_run(const RunArgs& args) {
    CampaignSetup setup = parse_campaign_config(args.config_path);
    if (args.seed) {
        setup.seed = *args.seed;
        if (setup.fault_spec) setup.fault_spec->seed = *args.seed;
    }
    if (args.workers) setup.workers = *args.workers;
    if (args.out_dir) setup.output_dir = *args.out_dir;
    if (args.target_layer) setup.target_layer = *args.target_layer;

    const NetworkModel model = load_model(setup.model_path);
    const std::vector<QuantTensor> inputs = load_inputs(model, setup.inputs_path,
                                                        setup.input_count);

    ExecutionPlan plan;
    plan.target_layer = setup.target_layer;
    plan.config = setup.config;
    plan.weights_on_a = setup.weights_on_a;
    plan.validate(model);

    std::vector<Fault> faults;
    if (setup.fault_list_path) {
        faults = parse_fault_list(*setup.fault_list_path);
        for (const Fault& fault : faults) validate_fault(fault, setup.config);
    } else if (setup.fault_inline) {
        faults = parse_fault_lines(*setup.fault_inline);
        for (const Fault& fault : faults) validate_fault(fault, setup.config);
    } else {
        faults = generate_fault_list(*setup.fault_spec, setup.config);
    }

    CampaignOptions options;
    options.workers = setup.workers;
    options.histogram_bins = setup.histogram_bins;
    options.thresholds = setup.thresholds;
    options.fit_components = setup.fit_components;
    options.cancel = &g_cancel;

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    const CampaignReport report = run_campaign(model, inputs, plan, faults, options);
    const ReportFiles files = write_report_files(setup.output_dir, report,
                                                 config_echo(setup).dump(), setup.seed);

    if (args.json_output) {
        json summary;
        summary["report"] = files.report.string();
        summary["records"] = report.records.size();
        summary["sdc1_rate"] = report.sdc1_rate;
        summary["afd"] = report.afd;
        summary["complete"] = report.complete;
        summary["simulations_per_second"] = report.simulations_per_second;
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << "campaign: " << report.records.size() << " records ("
                  << report.fault_count << " faults x " << report.input_count << " inputs)"
                  << (report.complete ? "" : " [INCOMPLETE]") << '\n'
                  << "  SDC-1 rate        " << fmt_double(report.sdc1_rate) << '\n'
                  << "  SDC-" << report.thresholds.topk << " rate        "
                  << fmt_double(report.sdc_topk_rate) << '\n'
                  << "  SDC-" << static_cast<int>(report.thresholds.confidence_drop_a * 100)
                  << "% rate       " << fmt_double(report.sdc_conf_a_rate) << '\n'
                  << "  SDC-" << static_cast<int>(report.thresholds.confidence_drop_b * 100)
                  << "% rate       " << fmt_double(report.sdc_conf_b_rate) << '\n'
                  << "  AVF               " << fmt_double(report.avf) << '\n'
                  << "  AFD               " << fmt_double(report.afd) << '\n'
                  << "  FIT               " << fmt_double(report.fit) << '\n'
                  << "  simulations/sec   " << fmt_double(report.simulations_per_second) << '\n'
                  << "  wrote " << files.report.string() << ", " << files.records.string() << ", "
                  << files.histogram.string() << '\n';
    }
    return kExitOk;
}

int cmd_sample_size(std::int64_t population, double margin, double confidence, double p,
                    bool json_output) {
    std::int64_t n = 0;
    double z = 0.0;
    try {
        z = z_for_confidence(confidence);
        n = sample_size(population, margin, z, p);
    } catch (const ValidationError& e) {
        // Bad numeric arguments are an argument error, not a campaign
        // validation failure.
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (json_output) {
        json out;
        out["population"] = population;
        out["margin"] = margin;
        out["confidence"] = confidence;
        out["z"] = z;
        out["p"] = p;
        out["sample_size"] = n;
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << n << '\n';
    }
    return kExitOk;
}

int cmd_expand_fault(const std::string& config_path, const std::string& fault_text, bool csv,
                     bool json_output) {
    const CampaignSetup setup = parse_campaign_config(config_path);
    const std::string records[] = {fault_text};
    const std::vector<Fault> faults = parse_fault_lines(records);
    if (faults.size() != 1) throw ValidationError("expected exactly one fault record");
    const Fault& fault = faults[0];

    const auto expanded = expand_fault(fault, setup.config, setup.config.domain());
    if (json_output) {
        json out;
        out["fault"] = fault_to_string(fault);
        json points = json::array();
        for (const auto& [p, t] : expanded) {
            const PECoord pe = setup.config.pe_of(p);
            points.push_back({{"i", p.i}, {"j", p.j}, {"k", p.k}, {"x", pe.x}, {"y", pe.y},
                              {"cycle", t}});
        }
        out["points"] = points;
        std::cout << out.dump(2) << '\n';
    } else if (csv) {
        std::cout << "i,j,k,x,y,cycle\n";
        for (const auto& [p, t] : expanded) {
            const PECoord pe = setup.config.pe_of(p);
            std::cout << p.i << ',' << p.j << ',' << p.k << ',' << pe.x << ',' << pe.y << ',' << t
                      << '\n';
        }
    } else {
        std::cout << "fault: " << fault_to_string(fault) << '\n'
                  << "corrupted points (" << expanded.size() << "):\n";
        for (const auto& [p, t] : expanded) {
            const PECoord pe = setup.config.pe_of(p);
            std::cout << "  p=(" << p.i << ',' << p.j << ',' << p.k << ") pe=(" << pe.x << ','
                      << pe.y << ") cycle=" << t << '\n';
        }
    }
    return kExitOk;
}

struct InferArgs {
    std::string model_path;
    std::string input_path;
    std::size_t input_index = 0;
    std::optional<std::string> config_path;
    bool compare = false;
    bool json_output = false;
    std::optional<std::string> trace_path;
};

void print_vector(const char* label, const std::vector<double>& v) {
    std::cout << label << " [";
    for (std::size_t n = 0; n < v.size(); ++n) {
        std::cout << (n ? ", " : "") << fmt_double(v[n]);
    }
    std::cout << "]\n";
}

int cmd_infer(const InferArgs& args) {
    const NetworkModel model = load_model(args.model_path);

    QuantTensor input;
    const std::filesystem::path input_path = args.input_path;
    if (input_path.extension() == ".tensor") {
        input = load_tensor(input_path);
    } else {
        const IdxImages images = load_idx_images(input_path);
        if (args.input_index >= images.images.size()) {
            throw ValidationError("input index out of range for IDX file");
        }
        input = quantize_model_input(model, images.images[args.input_index]);
    }

    std::optional<ExecutionPlan> plan;
    if (args.config_path) {
        const CampaignSetup setup = parse_campaign_config(*args.config_path);
        ExecutionPlan p;
        p.target_layer = setup.target_layer;
        p.config = setup.config;
        p.weights_on_a = setup.weights_on_a;
        if (setup.fault_list_path) {
            p.faults = parse_fault_list(*setup.fault_list_path);
        } else if (setup.fault_inline) {
            p.faults = parse_fault_lines(*setup.fault_inline);
        } else if (setup.fault_spec) {
            p.faults = generate_fault_list(*setup.fault_spec, setup.config);
        }
        plan = std::move(p);
    }

    SimTrace trace;
    SimTrace* trace_ptr = args.trace_path ? &trace : nullptr;

    const std::vector<double> golden = infer_reference(model, input);
    std::vector<double> faulty;
    if (plan) {
        faulty = infer_hierarchical(model, input, *plan, nullptr, trace_ptr);
    }

    if (args.trace_path && plan) {
        std::ofstream out(*args.trace_path);
        if (!out) throw IoError("cannot open trace file: " + *args.trace_path);
        trace.write_csv(out);
    }

    const std::vector<double>& shown = plan ? faulty : golden;
    if (args.compare) {
        const std::vector<double>& f = plan ? faulty : golden;
        const MetricThresholds th;
        if (args.json_output) {
            json out;
            out["golden"] = golden;
            out["faulty"] = f;
            out["sdc1"] = sdc_top1(golden, f);
            out["sdc_topk"] = sdc_topk(golden, f, std::min(th.topk, golden.size()));
            out["sdc_conf_10pct"] = sdc_confidence_drop(golden, f, 0.10);
            out["sdc_conf_20pct"] = sdc_confidence_drop(golden, f, 0.20);
            out["faulty_distance"] = faulty_distance(golden, f);
            std::cout << out.dump(2) << '\n';
        } else {
            print_vector("golden:", golden);
            print_vector("faulty:", f);
            std::cout << "sdc1: " << (sdc_top1(golden, f) ? "true" : "false") << '\n'
                      << "sdc_top" << th.topk << ": "
                      << (sdc_topk(golden, f, std::min(th.topk, golden.size())) ? "true" : "false")
                      << '\n'
                      << "sdc_conf_10pct: "
                      << (sdc_confidence_drop(golden, f, 0.10) ? "true" : "false") << '\n'
                      << "sdc_conf_20pct: "
                      << (sdc_confidence_drop(golden, f, 0.20) ? "true" : "false") << '\n'
                      << "faulty_distance: " << fmt_double(faulty_distance(golden, f)) << '\n';
        }
    } else if (args.json_output) {
        json out;
        out["probabilities"] = shown;
        out["argmax"] = argmax_index(shown);
        std::cout << out.dump(2) << '\n';
    } else {
        print_vector(plan ? "faulty:" : "golden:", shown);
        std::cout << "argmax: " << argmax_index(shown) << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"systolic-array DNN fault-injection simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    std::uint64_t seed_opt = 0;
    int workers_opt = 0;
    std::string out_dir_opt;
    std::size_t target_layer_opt = 0;
    auto* run = app.add_subcommand("run", "run a fault-injection campaign");
    run->add_option("--config", run_args.config_path, "campaign config file")->required();
    auto* seed_flag = run->add_option("--seed", seed_opt, "override the campaign seed");
    auto* workers_flag = run->add_option("--workers", workers_opt, "worker thread count");
    auto* out_dir_flag = run->add_option("--out-dir", out_dir_opt, "report output directory");
    auto* target_flag = run->add_option("--target-layer", target_layer_opt,
                                        "override the simulated layer index");
    run->add_flag("--json", run_args.json_output, "machine-readable summary");

    std::int64_t population = 0;
    double margin = 0.01, confidence = 0.95, rate = 0.5;
    bool ss_json = false;
    auto* ss = app.add_subcommand("sample-size", "statistical fault-list sizing");
    ss->add_option("population", population, "total fault population")->required();
    ss->add_option("--margin", margin, "error margin (default 0.01)");
    ss->add_option("--confidence", confidence, "confidence level (default 0.95)");
    ss->add_option("--p", rate, "expected failure rate (default 0.5)");
    ss->add_flag("--json", ss_json, "machine-readable output");

    std::string ef_config, ef_fault;
    bool ef_csv = false, ef_json = false;
    auto* ef = app.add_subcommand("expand-fault", "list the points a fault corrupts");
    ef->add_option("--config", ef_config, "campaign config file (systolic section)")->required();
    ef->add_option("fault", ef_fault, "fault record: line x y t_start t_end|inf kind bit")
        ->required();
    ef->add_flag("--csv", ef_csv, "CSV output");
    ef->add_flag("--json", ef_json, "machine-readable output");

    InferArgs infer_args;
    std::string trace_opt;
    std::string infer_config;
    auto* infer = app.add_subcommand("infer", "run one inference");
    infer->add_option("--model", infer_args.model_path, "model manifest")->required();
    infer->add_option("--input", infer_args.input_path, "input .tensor or IDX image file")
        ->required();
    infer->add_option("--index", infer_args.input_index, "image index within an IDX file");
    auto* infer_config_flag =
        infer->add_option("--config", infer_config, "campaign config providing plan and faults");
    infer->add_flag("--compare", infer_args.compare, "print golden and faulty plus metrics");
    infer->add_flag("--json", infer_args.json_output, "machine-readable output");
    auto* trace_flag = infer->add_option("--trace", trace_opt, "write a per-cycle trace CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            if (*seed_flag) run_args.seed = seed_opt;
            if (*workers_flag) run_args.workers = workers_opt;
            if (*out_dir_flag) run_args.out_dir = out_dir_opt;
            if (*target_flag) run_args.target_layer = target_layer_opt;
            return cmd_run(run_args);
        }
        if (ss->parsed()) return cmd_sample_size(population, margin, confidence, rate, ss_json);
        if (ef->parsed()) return cmd_expand_fault(ef_config, ef_fault, ef_csv, ef_json);
        if (infer->parsed()) {
            if (*infer_config_flag) infer_args.config_path = infer_config;
            if (*trace_flag) infer_args.trace_path = trace_opt;
            return cmd_infer(infer_args);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
