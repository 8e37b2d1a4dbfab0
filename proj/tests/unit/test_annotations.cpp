#include <cmath>

#include "doctest.h"

#include "copyspace/annotations.hpp"
#include "copyspace/errors.hpp"
#include "copyspace/rng.hpp"

using namespace copyspace;

TEST_CASE("label line converts center/extent to pixel corners") {
    const auto gts = parse_label_file("0 0.5 0.5 0.2 0.1", 200, 100, "img");
    REQUIRE(gts.size() == 1);
    CHECK(gts[0].box.x0 == doctest::Approx(80.0));
    CHECK(gts[0].box.y0 == doctest::Approx(45.0));
    CHECK(gts[0].box.x1 == doctest::Approx(120.0));
    CHECK(gts[0].box.y1 == doctest::Approx(55.0));
    CHECK(gts[0].image_id == "img");
    CHECK(gts[0].category == "copyspace");
}

TEST_CASE("empty text parses to an empty list") {
    CHECK(parse_label_file("", 64, 64).empty());
}

TEST_CASE("full-frame box covers the whole image") {
    const auto gts = parse_label_file("0 0.5 0.5 1.0 1.0", 64, 64);
    REQUIRE(gts.size() == 1);
    CHECK(gts[0].box == BoundingBox{0, 0, 64, 64});
}

TEST_CASE("label parse failures carry the line number") {
    CHECK_THROWS_AS(parse_label_file("0 0.5 0.5 0.2", 100, 100), ParseError);
    CHECK_THROWS_AS(parse_label_file("0 0.5 0.5 0.2 abc", 100, 100), ParseError);
    CHECK_THROWS_AS(parse_label_file("1 0.5 0.5 0.2 0.1", 100, 100), ParseError);
    CHECK_THROWS_AS(parse_label_file("0 0.9 0.5 0.4 0.1", 100, 100), ParseError); // leaves unit square
    try {
        parse_label_file("0 0.5 0.5 0.2 0.1\n0 2.0 0.5 0.2 0.1", 100, 100);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_label_file("0 0.5 0.5 0.2 0.1", 0, 100), ArgumentError);
    CHECK_THROWS_AS(parse_label_file("0 0.5 0.5 0.2 0.1", 100, -5), ArgumentError);
}

TEST_CASE("write_label_file emits fixed 6-decimal lines") {
    const GroundTruth gt{"", BoundingBox{80, 45, 120, 55}, "copyspace"};
    CHECK(write_label_file({gt}, 200, 100) == "0 0.500000 0.500000 0.200000 0.100000\n");
    CHECK(write_label_file({}, 200, 100).empty());
    const GroundTruth outside{"", BoundingBox{80, 45, 220, 55}, "copyspace"};
    CHECK_THROWS_AS(write_label_file({outside}, 200, 100), ArgumentError);
}

TEST_CASE("normalize/denormalize are exact inverses") {
    SplitMix64 rng(0xA11CE5);
    for (int i = 0; i < 2000; ++i) {
        const double W = rng.uniform_real(8, 4096);
        const double H = rng.uniform_real(8, 4096);
        NormalizedBox n;
        n.w = rng.uniform_real(1e-3, 1.0);
        n.h = rng.uniform_real(1e-3, 1.0);
        n.cx = rng.uniform_real(n.w / 2, 1.0 - n.w / 2);
        n.cy = rng.uniform_real(n.h / 2, 1.0 - n.h / 2);
        const NormalizedBox back = normalize(denormalize(n, W, H), W, H);
        CHECK(std::abs(back.cx - n.cx) < 1e-9);
        CHECK(std::abs(back.cy - n.cy) < 1e-9);
        CHECK(std::abs(back.w - n.w) < 1e-9);
        CHECK(std::abs(back.h - n.h) < 1e-9);
    }
}

TEST_CASE("label round trip stays within quantization tolerance") {
    SplitMix64 rng(0xBEEF);
    for (int i = 0; i < 1000; ++i) {
        const double W = std::floor(rng.uniform_real(16, 2048));
        const double H = std::floor(rng.uniform_real(16, 2048));
        const double x0 = rng.uniform_real(0, W - 2);
        const double y0 = rng.uniform_real(0, H - 2);
        const double x1 = rng.uniform_real(x0 + 1, W);
        const double y1 = rng.uniform_real(y0 + 1, H);
        const GroundTruth gt{"id", BoundingBox{x0, y0, x1, y1}, "copyspace"};

        const auto parsed = parse_label_file(write_label_file({gt}, W, H), W, H, "id");
        REQUIRE(parsed.size() == 1);
        const double tol = 1e-6 * std::max(W, H) + 1e-9;
        CHECK(std::abs(parsed[0].box.x0 - x0) <= tol);
        CHECK(std::abs(parsed[0].box.y0 - y0) <= tol);
        CHECK(std::abs(parsed[0].box.x1 - x1) <= tol);
        CHECK(std::abs(parsed[0].box.y1 - y1) <= tol);
    }
}

TEST_CASE("manifest histogram counts entries per class") {
    const std::string doc = R"({"entries": [
        {"image_path": "a.png", "label_path": "a.txt", "complexity_class": 1},
        {"image_path": "b.png", "label_path": "b.txt", "complexity_class": 1},
        {"image_path": "c.png", "label_path": "c.txt", "complexity_class": 2}
    ]})";
    const auto manifest = load_manifest(doc);
    const auto hist = manifest.class_histogram();
    CHECK(hist.at(1) == 2);
    CHECK(hist.at(2) == 1);
    CHECK(hist.size() == 2);
}

TEST_CASE("manifest rejects unknown classes and duplicate paths") {
    CHECK_THROWS_AS(load_manifest(R"({"entries": [
        {"image_path": "a.png", "label_path": "a.txt", "complexity_class": 5}]})"),
                    ParseError);
    CHECK_THROWS_AS(load_manifest(R"({"entries": [
        {"image_path": "a.png", "label_path": "a.txt", "complexity_class": 1},
        {"image_path": "a.png", "label_path": "b.txt", "complexity_class": 2}]})"),
                    ValidationError);
}

TEST_CASE("manifest with Table-2-shaped counts reproduces the histogram") {
    DatasetManifest manifest;
    const std::map<int, size_t> shape{{1, 1690}, {2, 80}, {3, 69}, {4, 73}};
    for (const auto& [level, n] : shape)
        for (size_t i = 0; i < n; ++i) {
            const std::string stem = std::to_string(level) + "_" + std::to_string(i);
            manifest.entries.push_back(
                ManifestEntry{stem + ".png", stem + ".txt", ComplexityClass{level}});
        }
    const auto parsed = load_manifest(write_manifest(manifest));
    CHECK(parsed.class_histogram() == shape);
}

TEST_CASE("detection serialization sorts by image then confidence") {
    const Detection low{"img", BoundingBox{0, 0, 10, 10}, 0.3};
    const Detection high{"img", BoundingBox{5, 5, 15, 15}, 0.9};
    const std::string text = write_detections({low, high});
    const auto parsed = read_detections(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].confidence == 0.9);
    CHECK(parsed[1].confidence == 0.3);

    const std::string single = write_detections({Detection{"a", BoundingBox{0, 0, 1, 1}, 1.0}});
    CHECK(single.find("\"confidence\": 1.0") != std::string::npos);
}

TEST_CASE("detection serialize/parse is a fixed point") {
    SplitMix64 rng(0x5EED);
    std::vector<Detection> dets;
    for (int i = 0; i < 64; ++i) {
        const double x0 = rng.uniform_real(0, 500);
        const double y0 = rng.uniform_real(0, 500);
        dets.push_back(Detection{"img_" + std::to_string(i % 7),
                                 BoundingBox{x0, y0, x0 + rng.uniform_real(1, 100),
                                             y0 + rng.uniform_real(1, 100)},
                                 rng.next_double()});
    }
    const std::string first = write_detections(dets);
    const std::string second = write_detections(read_detections(first));
    CHECK(first == second);
}

TEST_CASE("detection serialization rejects non-finite and out-of-range values") {
    CHECK_THROWS_AS(write_detections({Detection{"a", BoundingBox{0, 0, 1, 1}, 1.5}}), ArgumentError);
    CHECK_THROWS_AS(
        write_detections({Detection{"a", BoundingBox{0, 0, std::nan(""), 1}, 0.5}}),
        ArgumentError);
}
