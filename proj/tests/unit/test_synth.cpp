#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "copyspace/complexity.hpp"
#include "copyspace/detector.hpp"
#include "copyspace/errors.hpp"
#include "copyspace/rng.hpp"
#include "copyspace/synth.hpp"

using namespace copyspace;
namespace fs = std::filesystem;

namespace {

// Mean complexity inside/outside an integer rectangle, by direct loops.
void rect_complexity_split(const SynthSample& sample, double& inside, double& outside) {
    const ComplexityMap map = complexity_map(to_luma(sample.image));
    const auto& b = sample.ground_truth.box;
    double in_sum = 0, out_sum = 0;
    long in_n = 0, out_n = 0;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const bool in = x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
            if (in) {
                in_sum += map.at(x, y);
                ++in_n;
            } else {
                out_sum += map.at(x, y);
                ++out_n;
            }
        }
    inside = in_sum / in_n;
    outside = out_sum / out_n;
}

} // namespace

TEST_CASE("zero-polygon config yields a blank canvas with a near-zero map") {
    SynthConfig config;
    config.polygons_per_class = {{1, {0, 0}}, {2, {1, 1}}, {3, {2, 2}}, {4, {3, 3}}};
    const auto sample = synth_sample(7, ComplexityClass{1}, config);

    // whole canvas equals the background color
    const float r = sample.image.data[0];
    const float g = sample.image.data[1];
    const float b = sample.image.data[2];
    for (size_t i = 0; i < sample.image.data.size(); i += 3) {
        CHECK(sample.image.data[i] == r);
        CHECK(sample.image.data[i + 1] == g);
        CHECK(sample.image.data[i + 2] == b);
    }
    const ComplexityMap map = complexity_map(to_luma(sample.image));
    for (double v : map.data) CHECK(v == 0.0);
    CHECK(sample.ground_truth.box.valid());
}

TEST_CASE("same seed, class, and config reproduce the sample bit-exactly") {
    const SynthConfig config;
    const auto a = synth_sample(12345, ComplexityClass{3}, config);
    const auto b = synth_sample(12345, ComplexityClass{3}, config);
    CHECK(a.image.data == b.image.data);
    CHECK(a.ground_truth.box == b.ground_truth.box);
    CHECK(encode_png(a.image) == encode_png(b.image));

    const auto c = synth_sample(12346, ComplexityClass{3}, config);
    CHECK(a.image.data != c.image.data); // different seed, different canvas
}

TEST_CASE("no polygon pixel enters the planted rectangle") {
    const SynthConfig config;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const auto sample = synth_sample(seed, ComplexityClass{4}, config);
        const auto& box = sample.ground_truth.box;
        // every pixel inside the rectangle still carries the background color
        const int bx = static_cast<int>(box.x0), by = static_cast<int>(box.y0);
        const float r = sample.image.at(bx, by, 0);
        const float g = sample.image.at(bx, by, 1);
        const float b = sample.image.at(bx, by, 2);
        for (int y = by; y < static_cast<int>(box.y1); ++y)
            for (int x = bx; x < static_cast<int>(box.x1); ++x) {
                CHECK(sample.image.at(x, y, 0) == r);
                CHECK(sample.image.at(x, y, 1) == g);
                CHECK(sample.image.at(x, y, 2) == b);
            }
    }
}

TEST_CASE("class-3 samples are emptier inside the rectangle than outside") {
    SynthConfig config;
    config.canvas_width = 320; // scale-free claim, smaller canvas keeps this fast
    config.canvas_height = 320;
    int ok = 0;
    const int trials = 100;
    for (uint64_t seed = 0; seed < trials; ++seed) {
        const auto sample = synth_sample(derive_sample_seed(5150, 3, seed), ComplexityClass{3}, config);
        double inside = 0, outside = 0;
        rect_complexity_split(sample, inside, outside);
        if (inside < outside) ++ok;
    }
    CHECK(ok == trials);
}

TEST_CASE("mean outside-rect complexity ascends strictly with the class level") {
    SynthConfig config;
    config.canvas_width = 320;
    config.canvas_height = 320;
    const int trials = 100;
    double outside_by_class[4] = {0, 0, 0, 0};
    for (int level = 1; level <= 4; ++level) {
        for (uint64_t seed = 0; seed < trials; ++seed) {
            const auto sample =
                synth_sample(derive_sample_seed(6001, level, seed), ComplexityClass{level}, config);
            double inside = 0, outside = 0;
            rect_complexity_split(sample, inside, outside);
            outside_by_class[level - 1] += outside;
        }
        outside_by_class[level - 1] /= trials;
    }
    CHECK(outside_by_class[0] < outside_by_class[1]);
    CHECK(outside_by_class[1] < outside_by_class[2]);
    CHECK(outside_by_class[2] < outside_by_class[3]);
}

TEST_CASE("labels re-parse to the planted rectangle") {
    const SynthConfig config;
    for (uint64_t seed = 100; seed < 110; ++seed) {
        const auto sample = synth_sample(seed, ComplexityClass{2}, config);
        const std::string label =
            write_label_file({sample.ground_truth}, config.canvas_width, config.canvas_height);
        const auto parsed = parse_label_file(label, config.canvas_width, config.canvas_height);
        REQUIRE(parsed.size() == 1);
        const double tol = 1e-6 * std::max(config.canvas_width, config.canvas_height) + 1e-9;
        CHECK(std::abs(parsed[0].box.x0 - sample.ground_truth.box.x0) <= tol);
        CHECK(std::abs(parsed[0].box.y0 - sample.ground_truth.box.y0) <= tol);
        CHECK(std::abs(parsed[0].box.x1 - sample.ground_truth.box.x1) <= tol);
        CHECK(std::abs(parsed[0].box.y1 - sample.ground_truth.box.y1) <= tol);
    }
}

TEST_CASE("synth_dataset writes the documented layout and manifest") {
    const fs::path root = fs::temp_directory_path() / "copyspace_synth_test";
    fs::remove_all(root);

    SynthConfig config;
    config.canvas_width = 96;
    config.canvas_height = 96;
    const std::map<int, size_t> counts{{1, 2}, {2, 1}, {3, 0}, {4, 0}};
    const auto manifest = synth_dataset(77, counts, config, root.string());

    CHECK(manifest.entries.size() == 3);
    const auto hist = manifest.class_histogram();
    CHECK(hist.at(1) == 2);
    CHECK(hist.at(2) == 1);
    CHECK(fs::exists(root / "images" / "1_0.png"));
    CHECK(fs::exists(root / "images" / "1_1.png"));
    CHECK(fs::exists(root / "images" / "2_0.png"));
    CHECK(fs::exists(root / "labels" / "1_0.txt"));
    CHECK(fs::exists(root / "manifest"));

    std::ifstream in(root / "manifest");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto parsed = load_manifest(text);
    CHECK(parsed.class_histogram() == hist);
    fs::remove_all(root);
}

TEST_CASE("regenerating a dataset produces byte-identical files") {
    const fs::path root_a = fs::temp_directory_path() / "copyspace_synth_a";
    const fs::path root_b = fs::temp_directory_path() / "copyspace_synth_b";
    fs::remove_all(root_a);
    fs::remove_all(root_b);

    SynthConfig config;
    config.canvas_width = 128;
    config.canvas_height = 128;
    const std::map<int, size_t> counts{{1, 2}, {3, 2}};
    synth_dataset(31337, counts, config, root_a.string());
    synth_dataset(31337, counts, config, root_b.string());

    for (const auto& entry : fs::recursive_directory_iterator(root_a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), root_a);
        CHECK(read_binary_file(entry.path().string()) ==
              read_binary_file((root_b / rel).string()));
    }
    fs::remove_all(root_a);
    fs::remove_all(root_b);
}

TEST_CASE("infeasible placement raises GenerationError after bounded attempts") {
    SynthConfig config;
    config.canvas_width = 64;
    config.canvas_height = 64;
    // aspect 9 at 90% area needs a rectangle far wider than the canvas
    config.clear_rect_area_range = {0.9, 0.9};
    config.clear_rect_aspect_range = {9.0, 9.0};
    CHECK_THROWS_AS(synth_sample(1, ComplexityClass{4}, config), GenerationError);
}

TEST_CASE("config validation enforces ascending counts") {
    SynthConfig config;
    config.polygons_per_class = {{1, {10, 20}}, {2, {10, 20}}, {3, {12, 22}}, {4, {14, 24}}};
    CHECK_THROWS_AS(validate_synth_config(config), ArgumentError);
    config.polygons_per_class = {{1, {1, 2}}, {2, {2, 4}}, {3, {4, 8}}};
    CHECK_THROWS_AS(validate_synth_config(config), ArgumentError); // class 4 missing
}

TEST_CASE("synth config JSON round trip") {
    SynthConfig config;
    config.canvas_width = 300;
    config.clear_rect_area_range = {0.2, 0.4};
    config.stroke_probability = 0.25;
    config.allow_overlap_clear = true;
    const SynthConfig back = synth_config_from_json(synth_config_to_json(config));
    CHECK(back.canvas_width == 300);
    CHECK(back.clear_rect_area_range == config.clear_rect_area_range);
    CHECK(back.stroke_probability == 0.25);
    CHECK(back.allow_overlap_clear == true);
    CHECK(back.polygons_per_class.at(4).max_count == config.polygons_per_class.at(4).max_count);
    CHECK(back.palette.size() == config.palette.size());
}
