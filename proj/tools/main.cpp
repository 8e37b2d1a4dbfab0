// copyspace: command-line frontend for detection, dataset synthesis,
// evaluation, design rendering, and parameter sweeps.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "copyspace/annotations.hpp"
#include "copyspace/complexity.hpp"
#include "copyspace/detector.hpp"
#include "copyspace/errors.hpp"
#include "copyspace/image.hpp"
#include "copyspace/metrics.hpp"
#include "copyspace/render.hpp"
#include "copyspace/synth.hpp"

namespace fs = std::filesystem;
using namespace copyspace;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNoCandidates = 4;
constexpr int kExitUndefinedMetric = 5;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw StorageError("write failed for '" + path + "'");
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> values;
    std::stringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ArgumentError("bad numeric list entry '" + tok + "'");
        }
    }
    if (values.empty()) throw ArgumentError("empty numeric list");
    return values;
}

// "0.5:0.95:0.05" -> thresholds in exact hundredths.
std::vector<double> parse_threshold_range(const std::string& text) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':')
        throw ArgumentError("range must have the form start:stop:step, e.g. 0.5:0.95:0.05");
    const auto to_h = [](double v) { return static_cast<int>(std::lround(v * 100.0)); };
    const int h0 = to_h(start), h1 = to_h(stop), hs = to_h(step);
    if (hs <= 0 || h0 < 0 || h1 > 100 || h0 > h1)
        throw ArgumentError("range must satisfy 0 <= start <= stop <= 1 with positive step");
    std::vector<double> thresholds;
    for (int h = h0; h <= h1; h += hs) thresholds.push_back(static_cast<double>(h) / 100.0);
    return thresholds;
}

std::map<int, size_t> parse_counts(const std::string& text) {
    std::map<int, size_t> counts;
    std::stringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("counts entries must have the form class=count");
        try {
            const int level = std::stoi(tok.substr(0, eq));
            const long long n = std::stoll(tok.substr(eq + 1));
            if (n < 0) throw ArgumentError("counts must be non-negative");
            counts[level] = static_cast<size_t>(n);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw ArgumentError("bad counts entry '" + tok + "'");
        }
    }
    if (counts.empty()) throw ArgumentError("empty counts list");
    return counts;
}

std::vector<Detection> set_to_detections(const DetectionSet& set) {
    std::vector<Detection> dets;
    dets.reserve(set.boxes.size());
    for (const auto& sb : set.boxes) dets.push_back(Detection{set.image_id, sb.box, sb.score});
    return dets;
}

// ---- detect ----

struct DetectOptions {
    std::vector<std::string> images;
    std::string params_path;
    std::string out_dir;
    bool emit_heatmap = false;
    int jobs = 1;
    // flag overrides, negative means "not set"
    int top_k = -1;
    double max_complexity = -1.0;
    std::string aspects;
    double min_area_frac = -1.0;
    double nms_iou = -1.0;
};

int run_detect(const DetectOptions& opt) {
    DetectParams params;
    if (!opt.params_path.empty()) params = params_from_json(read_text_file(opt.params_path));
    if (opt.top_k >= 0) params.top_k = opt.top_k;
    if (opt.max_complexity >= 0.0) params.max_complexity = opt.max_complexity;
    if (!opt.aspects.empty()) params.aspect_ratios = parse_csv_doubles(opt.aspects);
    if (opt.min_area_frac >= 0.0) params.min_area_frac = opt.min_area_frac;
    if (opt.nms_iou >= 0.0) params.nms_iou = opt.nms_iou;
    validate_params(params);

    fs::create_directories(opt.out_dir);

    struct PerImage {
        DetectionSet set;
        ColorImage overlay;
        ColorImage heatmap;
        bool has_heatmap = false;
    };
    std::vector<PerImage> results(opt.images.size());
    std::vector<std::exception_ptr> failures(opt.images.size());

    std::atomic<size_t> cursor{0};
    const int jobs = std::max(1, opt.jobs);
    auto worker = [&]() {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= opt.images.size()) return;
            try {
                const ColorImage color = read_image_file(opt.images[i]);
                const GrayImage gray = to_luma(color);
                DetectionSet set = detect(gray, params, stem_of(opt.images[i]));
                OverlayStyle style;
                style.draw_scores = true;
                const ColorImage overlay = draw_overlay(color, {}, set_to_detections(set), style);
                PerImage r;
                r.set = std::move(set);
                r.overlay = overlay;
                if (opt.emit_heatmap) {
                    r.heatmap = heatmap_image(complexity_map(gray));
                    r.has_heatmap = true;
                }
                results[i] = std::move(r);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    std::vector<Detection> all;
    for (size_t i = 0; i < opt.images.size(); ++i) {
        const std::string stem = stem_of(opt.images[i]);
        const auto dets = set_to_detections(results[i].set);
        all.insert(all.end(), dets.begin(), dets.end());
        write_png_file((fs::path(opt.out_dir) / (stem + "_overlay.png")).string(), results[i].overlay);
        if (results[i].has_heatmap)
            write_png_file((fs::path(opt.out_dir) / (stem + "_complexity.png")).string(),
                           results[i].heatmap);
        std::printf("%s: %zu box(es), top score %.4f\n", stem.c_str(), results[i].set.boxes.size(),
                    results[i].set.boxes.empty() ? 0.0 : results[i].set.boxes.front().score);
    }
    const std::string det_path = (fs::path(opt.out_dir) / "detections.json").string();
    write_text_file(det_path, write_detections(all));
    std::printf("wrote %s\n", det_path.c_str());
    return 0;
}

// ---- eval ----

int run_eval(const std::string& manifest_path, const std::string& detections_path,
             double iou_threshold, const std::string& range, const std::string& report_path) {
    const DatasetManifest manifest = load_manifest(read_text_file(manifest_path));
    const std::vector<Detection> dets = read_detections(read_text_file(detections_path));

    EvalConfig config;
    config.iou_threshold = iou_threshold;
    config.thresholds = parse_threshold_range(range);

    const std::string base_dir = fs::path(manifest_path).parent_path().string();
    const EvalReport report = evaluate_dataset(manifest, base_dir, dets, config);
    write_text_file(report_path, report_to_json(report));
    std::fputs(report_table(report).c_str(), stdout);
    std::printf("wrote %s\n", report_path.c_str());
    return 0;
}

// ---- synth ----

int run_synth(uint64_t seed, const std::string& counts_text, const std::string& config_path,
              const std::string& out_dir) {
    SynthConfig config;
    if (!config_path.empty()) config = synth_config_from_json(read_text_file(config_path));
    const auto counts = parse_counts(counts_text);
    const DatasetManifest manifest = synth_dataset(seed, counts, config, out_dir);
    std::printf("wrote %zu sample(s) under %s (manifest: %s)\n", manifest.entries.size(),
                out_dir.c_str(), (fs::path(out_dir) / "manifest").string().c_str());
    for (const auto& [level, n] : manifest.class_histogram())
        std::printf("  class %d: %zu\n", level, n);
    return 0;
}

// ---- render ----

int run_render(const std::string& image_path, const std::string& text,
               const std::string& params_path, int variants, const std::string& out_dir) {
    if (variants < 1) throw ArgumentError("--variants must be >= 1");
    DetectParams base;
    if (!params_path.empty()) base = params_from_json(read_text_file(params_path));
    validate_params(base);

    // Variant grid: cycle through the base aspect ratios; each full cycle
    // shrinks the target panel area.
    std::vector<DetectParams> grid;
    const size_t n_aspects = base.aspect_ratios.size();
    for (int i = 0; i < variants; ++i) {
        DetectParams p = base;
        p.aspect_ratios = {base.aspect_ratios[i % n_aspects]};
        const int cycle = i / static_cast<int>(n_aspects);
        for (int c = 0; c < cycle; ++c) p.min_area_frac *= 0.7;
        grid.push_back(p);
    }

    const ColorImage color = read_image_file(image_path);
    DesignSpec spec;
    spec.copy_text = text;
    const auto variations = generate_variations(color, spec, grid);

    fs::create_directories(out_dir);
    for (const auto& v : variations) {
        if (!v.image) {
            std::printf("variant %zu: no candidate region\n", v.grid_index);
            continue;
        }
        const std::string path =
            (fs::path(out_dir) / ("variant_" + std::to_string(v.grid_index) + ".png")).string();
        write_png_file(path, *v.image);
        std::printf("variant %zu: %s\n", v.grid_index, path.c_str());
    }
    return 0;
}

// ---- sweep ----

int run_sweep(const std::string& image_path, const std::string& grid_path,
              const std::string& out_dir) {
    const auto grid = params_grid_from_json(read_text_file(grid_path));
    const ColorImage color = read_image_file(image_path);
    const GrayImage gray = to_luma(color);
    const auto sets = parameter_sweep(gray, grid, stem_of(image_path));

    fs::create_directories(out_dir);
    size_t non_empty = 0;
    for (size_t i = 0; i < sets.size(); ++i) {
        const std::string record_path =
            (fs::path(out_dir) / ("sweep_" + std::to_string(i) + ".json")).string();
        write_text_file(record_path, detection_set_to_json(sets[i]));
        OverlayStyle style;
        style.draw_scores = true;
        const ColorImage overlay = draw_overlay(color, {}, set_to_detections(sets[i]), style);
        write_png_file((fs::path(out_dir) / ("sweep_" + std::to_string(i) + "_overlay.png")).string(),
                       overlay);
        if (!sets[i].boxes.empty()) ++non_empty;
        std::printf("row %zu: %zu box(es) -> %s\n", i, sets[i].boxes.size(), record_path.c_str());
    }
    if (non_empty == 0) throw NoCandidatesError("every grid row produced an empty detection set");
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"copyspace detection toolkit"};
    app.require_subcommand(1);

    // detect
    DetectOptions det;
    auto* cmd_detect = app.add_subcommand("detect", "detect copyspace regions in images");
    cmd_detect->add_option("images", det.images, "input images (PNG or JPEG)")->required();
    cmd_detect->add_option("--params", det.params_path, "detector params JSON file");
    cmd_detect->add_option("--out", det.out_dir, "output directory")->required();
    cmd_detect->add_option("--top-k", det.top_k, "keep at most K boxes");
    cmd_detect->add_option("--max-complexity", det.max_complexity, "mean-complexity cutoff");
    cmd_detect->add_option("--aspects", det.aspects, "comma-separated aspect ratios");
    cmd_detect->add_option("--min-area-frac", det.min_area_frac, "minimum box area fraction");
    cmd_detect->add_option("--nms-iou", det.nms_iou, "suppression IoU threshold");
    cmd_detect->add_flag("--emit-heatmap", det.emit_heatmap, "write complexity heatmaps");
    cmd_detect->add_option("--jobs", det.jobs, "worker thread count");

    // eval
    std::string eval_manifest, eval_dets, eval_report;
    double eval_iou = 0.5;
    std::string eval_range = "0.5:0.95:0.05";
    auto* cmd_eval = app.add_subcommand("eval", "evaluate detections against a labeled manifest");
    cmd_eval->add_option("--manifest", eval_manifest, "dataset manifest file")->required();
    cmd_eval->add_option("--detections", eval_dets, "detection records file")->required();
    cmd_eval->add_option("--iou-threshold", eval_iou, "matching threshold for meanIoU");
    cmd_eval->add_option("--range", eval_range, "mAP threshold range start:stop:step");
    cmd_eval->add_option("--report", eval_report, "report output file (JSON)")->required();

    // synth
    uint64_t synth_seed = 0;
    std::string synth_counts, synth_config_path, synth_out;
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    cmd_synth->add_option("--seed", synth_seed, "dataset seed")->required();
    cmd_synth->add_option("--counts", synth_counts, "per-class counts, e.g. 1=169,2=8,3=7,4=7")
        ->required();
    cmd_synth->add_option("--config", synth_config_path, "generator config JSON file");
    cmd_synth->add_option("--out", synth_out, "output directory")->required();

    // render
    std::string render_image, render_text, render_params, render_out;
    int render_variants = 4;
    auto* cmd_render = app.add_subcommand("render", "render design variations into an image");
    cmd_render->add_option("image", render_image, "input image")->required();
    cmd_render->add_option("--text", render_text, "copy text")->required();
    cmd_render->add_option("--params", render_params, "base detector params JSON file");
    cmd_render->add_option("--variants", render_variants, "number of variants");
    cmd_render->add_option("--out", render_out, "output directory")->required();

    // sweep
    std::string sweep_image, sweep_grid, sweep_out;
    auto* cmd_sweep = app.add_subcommand("sweep", "run a detector parameter sweep");
    cmd_sweep->add_option("image", sweep_image, "input image")->required();
    cmd_sweep->add_option("--grid", sweep_grid, "JSON array of params records")->required();
    cmd_sweep->add_option("--out", sweep_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (cmd_detect->parsed()) return run_detect(det);
    if (cmd_eval->parsed()) return run_eval(eval_manifest, eval_dets, eval_iou, eval_range, eval_report);
    if (cmd_synth->parsed()) return run_synth(synth_seed, synth_counts, synth_config_path, synth_out);
    if (cmd_render->parsed())
        return run_render(render_image, render_text, render_params, render_variants, render_out);
    if (cmd_sweep->parsed()) return run_sweep(sweep_image, sweep_grid, sweep_out);
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
            case ErrorKind::NoCandidates:
                return kExitNoCandidates;
            case ErrorKind::UndefinedMetric:
                return kExitUndefinedMetric;
            case ErrorKind::Argument:
                return kExitUsage;
            default:
                return kExitInput;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
