// Acceptance suite: every release gate in one binary, one pass/fail line per
// criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "copyspace/annotations.hpp"
#include "copyspace/complexity.hpp"
#include "copyspace/detector.hpp"
#include "copyspace/errors.hpp"
#include "copyspace/image.hpp"
#include "copyspace/metrics.hpp"
#include "copyspace/rng.hpp"
#include "copyspace/synth.hpp"

using namespace copyspace;
namespace fs = std::filesystem;

namespace {

// Frozen per-class mAP@0.5 floors for the synthetic end-to-end gate. The
// calibration run of the default generator + default detector at seed 20240
// (counts 200/50/50/50, 512x512) measured 0.980 / 0.837 / 0.644 / 0.396;
// the floors sit a safety margin below those values. The headline
// requirements are class-1 >= 0.5 and a strict monotone decrease.
constexpr uint64_t kTrendSeed = 20240;
constexpr double kClassFloors[4] = {0.85, 0.65, 0.45, 0.25};

struct Outcome {
    int failures = 0;
    std::vector<std::string> details;
};

void run_criterion(Outcome& outcome, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++outcome.failures;
}

uint64_t fnv1a(const std::vector<uint8_t>& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---- criterion bodies ----

bool iou_oracle_equivalence(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    SplitMix64 rng(0x10401);
    for (int i = 0; i < 1000; ++i) {
        const int grid = static_cast<int>(rng.uniform_int(8, 64));
        const auto random_box = [&]() {
            const int x0 = static_cast<int>(rng.uniform_int(0, grid - 2));
            const int y0 = static_cast<int>(rng.uniform_int(0, grid - 2));
            return BoundingBox{static_cast<double>(x0), static_cast<double>(y0),
                               static_cast<double>(rng.uniform_int(x0 + 1, grid)),
                               static_cast<double>(rng.uniform_int(y0 + 1, grid))};
        };
        const BoundingBox a = random_box();
        const BoundingBox b = random_box();
        const double expected = oracles::rasterized_iou(a, b, grid);
        if (std::abs(iou(a, b) - expected) > 1e-12) {
            detail = "mismatch at pair " + std::to_string(i);
            return false;
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= 1.0) {
        detail = "runtime " + std::to_string(seconds) + "s exceeds 1s";
        return false;
    }
    return true;
}

bool ap_brute_force_equivalence(std::string& detail) {
    // the worked example: ranked TP, FP, TP over two ground truths
    {
        const std::vector<GroundTruth> gts{
            {"a", BoundingBox{0, 0, 10, 10}, "copyspace"},
            {"b", BoundingBox{0, 0, 10, 10}, "copyspace"},
        };
        const std::vector<Detection> dets{
            {"a", BoundingBox{0, 0, 10, 10}, 0.9},
            {"a", BoundingBox{50, 50, 60, 60}, 0.8},
            {"b", BoundingBox{0, 0, 10, 10}, 0.7},
        };
        const double expected = (51.0 + 50.0 * (2.0 / 3.0)) / 101.0;
        if (std::abs(average_precision(dets, gts, 0.5) - expected) > 1e-9) {
            detail = "worked example deviates from (51 + 50*2/3)/101";
            return false;
        }
        if (std::abs(expected - 0.8350) > 5e-5) {
            detail = "worked example expectation drifted";
            return false;
        }
    }

    SplitMix64 rng(0x0AB2);
    for (int trial = 0; trial < 500; ++trial) {
        const int n_gts = static_cast<int>(rng.uniform_int(1, 4));
        const int n_dets = static_cast<int>(rng.uniform_int(0, 6));
        std::vector<GroundTruth> gts;
        std::vector<Detection> dets;
        for (int i = 0; i < n_gts; ++i) {
            const std::string id = "img" + std::to_string(rng.uniform_int(0, 2));
            const double x0 = rng.uniform_real(0, 40);
            const double y0 = rng.uniform_real(0, 40);
            gts.push_back({id, BoundingBox{x0, y0, x0 + rng.uniform_real(4, 25),
                                           y0 + rng.uniform_real(4, 25)}, "copyspace"});
        }
        for (int i = 0; i < n_dets; ++i) {
            const std::string id = "img" + std::to_string(rng.uniform_int(0, 2));
            const double x0 = rng.uniform_real(0, 40);
            const double y0 = rng.uniform_real(0, 40);
            dets.push_back({id, BoundingBox{x0, y0, x0 + rng.uniform_real(4, 25),
                                            y0 + rng.uniform_real(4, 25)}, rng.next_double()});
        }
        const double threshold = rng.uniform_real(0.1, 0.9);
        const double got = average_precision(dets, gts, threshold);
        const double expected = oracles::brute_force_ap(dets, gts, threshold);
        if (std::abs(got - expected) > 1e-9) {
            detail = "fixture " + std::to_string(trial) + ": " + std::to_string(got) + " vs " +
                     std::to_string(expected);
            return false;
        }
    }
    return true;
}

bool map_range_identity(std::string& detail) {
    SplitMix64 rng(0x3A9);
    const auto thresholds = canonical_thresholds();
    if (thresholds.size() != 10) {
        detail = "canonical range must have 10 thresholds";
        return false;
    }

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<GroundTruth> gts;
        std::vector<Detection> dets;
        for (int i = 0; i < 5; ++i) {
            const std::string id = "img" + std::to_string(i);
            const double x0 = rng.uniform_real(0, 40);
            const double y0 = rng.uniform_real(0, 40);
            const BoundingBox box{x0, y0, x0 + rng.uniform_real(5, 25), y0 + rng.uniform_real(5, 25)};
            gts.push_back({id, box, "copyspace"});
            const double jitter = rng.uniform_real(0, 6);
            dets.push_back({id, BoundingBox{box.x0 + jitter, box.y0, box.x1 + jitter, box.y1},
                            rng.next_double()});
        }
        double mean = 0.0;
        for (double t : thresholds) mean += average_precision(dets, gts, t);
        mean /= static_cast<double>(thresholds.size());
        if (std::abs(map_range(dets, gts, thresholds) - mean) > 1e-12) {
            detail = "map_range deviates from the mean of individual APs";
            return false;
        }
    }

    // uniform IoU 0.6 fixture: shift 2.5 on width 10 -> 7.5/12.5 exactly
    std::vector<GroundTruth> gts;
    std::vector<Detection> dets;
    for (int i = 0; i < 6; ++i) {
        const std::string id = "u" + std::to_string(i);
        gts.push_back({id, BoundingBox{0, 0, 10, 10}, "copyspace"});
        dets.push_back({id, BoundingBox{2.5, 0, 12.5, 10}, 0.9});
    }
    const double got = map_range(dets, gts, thresholds);
    if (std::abs(got - 0.3) > 1e-12) {
        detail = "uniform-IoU-0.6 fixture gave " + std::to_string(got) + ", want exactly 0.3";
        return false;
    }
    return true;
}

bool perfect_detector_sanity(std::string& detail) {
    const fs::path root = fs::temp_directory_path() / "copyspace_accept_perfect";
    fs::remove_all(root);
    SynthConfig config;
    config.canvas_width = 128;
    config.canvas_height = 128;
    const DatasetManifest manifest =
        synth_dataset(4242, {{1, 3}, {2, 2}, {3, 2}, {4, 2}}, config, root.string());

    std::vector<Detection> dets;
    for (const auto& entry : manifest.entries) {
        int w = 0, h = 0;
        peek_image_file_size((root / entry.image_path).string(), w, h);
        std::ifstream in(root / entry.label_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        for (const auto& gt : parse_label_file(text, w, h, entry.image_path))
            dets.push_back(Detection{gt.image_id, gt.box, 1.0});
    }

    const EvalReport report = evaluate_dataset(manifest, root.string(), dets, {});
    fs::remove_all(root);

    const auto is_one = [](const std::optional<double>& v) { return v && *v == 1.0; };
    if (!is_one(report.overall.map_50) || !is_one(report.overall.map_range) ||
        !is_one(report.overall.mean_iou)) {
        detail = "overall row is not exactly 1.0";
        return false;
    }
    for (const auto& [level, row] : report.per_class)
        if (!is_one(row.map_50) || !is_one(row.map_range) || !is_one(row.mean_iou)) {
            detail = "class " + std::to_string(level) + " row is not exactly 1.0";
            return false;
        }
    return true;
}

bool synthetic_trend(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const SynthConfig config;
    const DetectParams params;
    const std::map<int, size_t> counts{{1, 200}, {2, 50}, {3, 50}, {4, 50}};

    double ap_by_class[4] = {0, 0, 0, 0};
    for (int level = 1; level <= 4; ++level) {
        std::vector<GroundTruth> gts;
        std::vector<Detection> dets;
        for (size_t index = 0; index < counts.at(level); ++index) {
            const uint64_t seed = derive_sample_seed(kTrendSeed, level, index);
            const SynthSample sample = synth_sample(seed, ComplexityClass{level}, config);
            const std::string id = std::to_string(level) + "_" + std::to_string(index);
            GroundTruth gt = sample.ground_truth;
            gt.image_id = id;
            gts.push_back(gt);
            const DetectionSet set = detect(to_luma(sample.image), params, id);
            for (const auto& sb : set.boxes) dets.push_back(Detection{id, sb.box, sb.score});
        }
        const double ap = average_precision(dets, gts, 0.5);
        const double oracle_ap = oracles::brute_force_ap(dets, gts, 0.5);
        if (std::abs(ap - oracle_ap) > 1e-9) {
            detail = "class " + std::to_string(level) + " AP disagrees with the brute-force oracle";
            return false;
        }
        ap_by_class[level - 1] = ap;
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof(buf), "mAP@0.5 by class: %.3f %.3f %.3f %.3f (%.0fs)",
                  ap_by_class[0], ap_by_class[1], ap_by_class[2], ap_by_class[3], seconds);
    detail = buf;

    if (ap_by_class[0] < 0.5) return false;
    for (int i = 1; i < 4; ++i)
        if (!(ap_by_class[i] < ap_by_class[i - 1])) return false;
    for (int i = 0; i < 4; ++i)
        if (ap_by_class[i] < kClassFloors[i]) return false;
    if (seconds >= 120.0) return false;
    return true;
}

bool determinism(std::string& detail) {
    // synth: identical corpora byte for byte, verified by file hashing
    const fs::path root_a = fs::temp_directory_path() / "copyspace_accept_det_a";
    const fs::path root_b = fs::temp_directory_path() / "copyspace_accept_det_b";
    fs::remove_all(root_a);
    fs::remove_all(root_b);
    SynthConfig config;
    config.canvas_width = 256;
    config.canvas_height = 256;
    const std::map<int, size_t> counts{{1, 2}, {2, 2}, {3, 2}, {4, 2}};
    synth_dataset(777, counts, config, root_a.string());
    synth_dataset(777, counts, config, root_b.string());

    size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root_a)) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path rel = fs::relative(entry.path(), root_a);
        const uint64_t ha = fnv1a(read_binary_file(entry.path().string()));
        const uint64_t hb = fnv1a(read_binary_file((root_b / rel).string()));
        if (ha != hb) {
            detail = "hash mismatch for " + rel.string();
            return false;
        }
    }
    fs::remove_all(root_a);
    fs::remove_all(root_b);
    if (files < 17) { // 8 images + 8 labels + manifest
        detail = "corpus unexpectedly small";
        return false;
    }

    // detect: byte-identical records across runs
    const SynthSample sample = synth_sample(31, ComplexityClass{3}, SynthConfig{});
    const GrayImage gray = to_luma(sample.image);
    const auto to_records = [&]() {
        const DetectionSet set = detect(gray, DetectParams{}, "img");
        std::vector<Detection> dets;
        for (const auto& sb : set.boxes) dets.push_back(Detection{"img", sb.box, sb.score});
        return write_detections(dets);
    };
    const std::string first = to_records();
    const std::string second = to_records();
    if (first != second) {
        detail = "detection records differ between runs";
        return false;
    }
    return true;
}

bool parser_round_trips(std::string& detail) {
    SplitMix64 rng(0xF00D);
    for (int i = 0; i < 10000; ++i) {
        const double W = std::floor(rng.uniform_real(16, 4096));
        const double H = std::floor(rng.uniform_real(16, 4096));
        const double x0 = rng.uniform_real(0, W - 2);
        const double y0 = rng.uniform_real(0, H - 2);
        const GroundTruth gt{"id", BoundingBox{x0, y0, x0 + rng.uniform_real(1, W - x0),
                                               y0 + rng.uniform_real(1, H - y0)}, "copyspace"};
        const auto parsed = parse_label_file(write_label_file({gt}, W, H), W, H, "id");
        if (parsed.size() != 1) {
            detail = "case " + std::to_string(i) + ": lost a box";
            return false;
        }
        const double tol = 1e-6 * std::max(W, H) + 1e-9;
        if (std::abs(parsed[0].box.x0 - gt.box.x0) > tol ||
            std::abs(parsed[0].box.y0 - gt.box.y0) > tol ||
            std::abs(parsed[0].box.x1 - gt.box.x1) > tol ||
            std::abs(parsed[0].box.y1 - gt.box.y1) > tol) {
            detail = "case " + std::to_string(i) + ": coordinate drift above quantization";
            return false;
        }
    }

    for (int doc = 0; doc < 200; ++doc) {
        std::vector<Detection> dets;
        const int n = static_cast<int>(rng.uniform_int(0, 20));
        for (int i = 0; i < n; ++i) {
            const double x0 = rng.uniform_real(0, 1000);
            const double y0 = rng.uniform_real(0, 1000);
            dets.push_back(Detection{"img" + std::to_string(rng.uniform_int(0, 5)),
                                     BoundingBox{x0, y0, x0 + rng.uniform_real(1, 200),
                                                 y0 + rng.uniform_real(1, 200)},
                                     rng.next_double()});
        }
        const std::string first = write_detections(dets);
        const std::string second = write_detections(read_detections(first));
        if (first != second) {
            detail = "detection document " + std::to_string(doc) + " is not a fixed point";
            return false;
        }
    }
    return true;
}

bool imaging_oracles(std::string& detail) {
    SplitMix64 rng(0x1A6E);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = static_cast<int>(rng.uniform_int(3, 128));
        const int h = static_cast<int>(rng.uniform_int(3, 128));
        GrayImage img;
        img.width = w;
        img.height = h;
        img.data.resize(static_cast<size_t>(w) * h);
        for (auto& v : img.data) v = rng.next_double();

        const ComplexityMap map = complexity_map(img);
        const auto expected = oracles::naive_sobel(img);
        for (size_t i = 0; i < expected.size(); ++i)
            if (std::abs(map.data[i] - expected[i]) > 1e-9) {
                detail = "convolution mismatch in image " + std::to_string(trial);
                return false;
            }

        const IntegralImage integral = build_integral(map);
        for (int r = 0; r < 10; ++r) {
            const double x0 = rng.uniform_real(0, w - 1);
            const double y0 = rng.uniform_real(0, h - 1);
            const BoundingBox rect{x0, y0, x0 + rng.uniform_real(0.5, w - x0),
                                   y0 + rng.uniform_real(0.5, h - y0)};
            const double got = region_mean(integral, rect);
            const double want = oracles::naive_region_mean(map.data, w, h, rect);
            if (std::abs(got - want) > 1e-9) {
                detail = "region mean mismatch in image " + std::to_string(trial);
                return false;
            }
        }
    }
    return true;
}

bool detect_performance(std::string& detail) {
    SynthConfig config;
    config.canvas_width = 640;
    config.canvas_height = 640;
    const SynthSample sample = synth_sample(606, ComplexityClass{3}, config);
    const GrayImage textured = to_luma(sample.image);
    GrayImage uniform;
    uniform.width = 640;
    uniform.height = 640;
    uniform.data.assign(static_cast<size_t>(640) * 640, 0.5);

    double worst = 0.0;
    const std::vector<const GrayImage*> cases{&textured, &uniform};
    for (const GrayImage* img : cases) {
        detect(*img, DetectParams{}, "warmup");
        const auto start = std::chrono::steady_clock::now();
        detect(*img, DetectParams{}, "timed");
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        worst = std::max(worst, ms);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst case %.1f ms", worst);
    detail = buf;
    return worst < 200.0;
}

} // namespace

int main() {
    Outcome outcome;
    run_criterion(outcome, "IoU oracle equivalence, 1000 integer pairs", iou_oracle_equivalence);
    run_criterion(outcome, "AP equals brute-force interpolation on small fixtures",
                  ap_brute_force_equivalence);
    run_criterion(outcome, "mAP range identity and uniform-IoU-0.6 fixture", map_range_identity);
    run_criterion(outcome, "perfect detector scores 1.0 on every row", perfect_detector_sanity);
    run_criterion(outcome, "synthetic end-to-end class trend", synthetic_trend);
    run_criterion(outcome, "bit-exact determinism of synth and detect", determinism);
    run_criterion(outcome, "parser round trips (10k labels, detection fixed point)",
                  parser_round_trips);
    run_criterion(outcome, "imaging matches naive convolution and region means", imaging_oracles);
    run_criterion(outcome, "default detect under 200 ms at 640x640", detect_performance);

    if (outcome.failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criterion(s) failed\n", outcome.failures);
    return outcome.failures;
}
