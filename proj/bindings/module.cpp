#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "copyspace/annotations.hpp"
#include "copyspace/complexity.hpp"
#include "copyspace/detector.hpp"
#include "copyspace/errors.hpp"
#include "copyspace/image.hpp"
#include "copyspace/metrics.hpp"
#include "copyspace/render.hpp"
#include "copyspace/rng.hpp"
#include "copyspace/synth.hpp"

namespace py = pybind11;
using namespace copyspace;

namespace {

py::array_t<float> color_to_numpy(const ColorImage& img) {
    py::array_t<float> arr({img.height, img.width, 3});
    std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
    return arr;
}

ColorImage color_from_numpy(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3)
        throw ArgumentError("expected an array of shape (height, width, 3)");
    ColorImage img;
    img.height = static_cast<int>(arr.shape(0));
    img.width = static_cast<int>(arr.shape(1));
    img.data.assign(arr.data(), arr.data() + arr.size());
    return img;
}

py::array_t<double> gray_to_numpy(int width, int height, const std::vector<double>& data) {
    py::array_t<double> arr({height, width});
    std::copy(data.begin(), data.end(), arr.mutable_data());
    return arr;
}

GrayImage gray_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw ArgumentError("expected an array of shape (height, width)");
    GrayImage img;
    img.height = static_cast<int>(arr.shape(0));
    img.width = static_cast<int>(arr.shape(1));
    img.data.assign(arr.data(), arr.data() + arr.size());
    return img;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Copyspace detection toolkit: heuristic detection, synthetic datasets, evaluation";

    // error taxonomy
    const auto base = py::register_exception<Error>(m, "CopyspaceError");
    py::register_exception<ArgumentError>(m, "ArgumentError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<DecodeError>(m, "DecodeError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<GenerationError>(m, "GenerationError", base);
    py::register_exception<StorageError>(m, "StorageError", base);
    py::register_exception<NoCandidatesError>(m, "NoCandidatesError", base);
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base);

    // geometry and annotations
    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init<>())
        .def(py::init([](double x0, double y0, double x1, double y1) {
                 return BoundingBox{x0, y0, x1, y1};
             }),
             py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"))
        .def_readwrite("x0", &BoundingBox::x0)
        .def_readwrite("y0", &BoundingBox::y0)
        .def_readwrite("x1", &BoundingBox::x1)
        .def_readwrite("y1", &BoundingBox::y1)
        .def("width", &BoundingBox::width)
        .def("height", &BoundingBox::height)
        .def("area", &BoundingBox::area)
        .def("valid", &BoundingBox::valid)
        .def("__eq__", [](const BoundingBox& a, const BoundingBox& b) { return a == b; })
        .def("__repr__", [](const BoundingBox& b) {
            return "BoundingBox(" + std::to_string(b.x0) + ", " + std::to_string(b.y0) + ", " +
                   std::to_string(b.x1) + ", " + std::to_string(b.y1) + ")";
        });

    py::class_<ComplexityClass>(m, "ComplexityClass")
        .def(py::init([](int level) { return ComplexityClass{level}; }), py::arg("level"))
        .def_readwrite("level", &ComplexityClass::level)
        .def("__repr__",
             [](const ComplexityClass& c) { return "ComplexityClass(" + std::to_string(c.level) + ")"; });

    py::class_<GroundTruth>(m, "GroundTruth")
        .def(py::init([](std::string image_id, BoundingBox box) {
                 return GroundTruth{std::move(image_id), box, copyspace_category()};
             }),
             py::arg("image_id"), py::arg("box"))
        .def_readwrite("image_id", &GroundTruth::image_id)
        .def_readwrite("box", &GroundTruth::box)
        .def_readonly("category", &GroundTruth::category);

    py::class_<Detection>(m, "Detection")
        .def(py::init([](std::string image_id, BoundingBox box, double confidence) {
                 return Detection{std::move(image_id), box, confidence};
             }),
             py::arg("image_id"), py::arg("box"), py::arg("confidence"))
        .def_readwrite("image_id", &Detection::image_id)
        .def_readwrite("box", &Detection::box)
        .def_readwrite("confidence", &Detection::confidence);

    py::class_<ManifestEntry>(m, "ManifestEntry")
        .def_readwrite("image_path", &ManifestEntry::image_path)
        .def_readwrite("label_path", &ManifestEntry::label_path)
        .def_readwrite("complexity_class", &ManifestEntry::complexity_class);

    py::class_<DatasetManifest>(m, "DatasetManifest")
        .def(py::init<>())
        .def_readwrite("entries", &DatasetManifest::entries)
        .def("class_histogram", &DatasetManifest::class_histogram);

    m.def("parse_label_file", &parse_label_file, py::arg("text"), py::arg("image_width"),
          py::arg("image_height"), py::arg("image_id") = "");
    m.def("write_label_file", &write_label_file, py::arg("gts"), py::arg("image_width"),
          py::arg("image_height"));
    m.def("load_manifest", &load_manifest, py::arg("text"));
    m.def("write_manifest", &write_manifest, py::arg("manifest"));
    m.def("write_detections", &write_detections, py::arg("detections"));
    m.def("read_detections", &read_detections, py::arg("text"));

    // imaging
    py::class_<ColorImage>(m, "ColorImage")
        .def(py::init<>())
        .def_static("filled", &ColorImage::filled, py::arg("width"), py::arg("height"),
                    py::arg("r"), py::arg("g"), py::arg("b"))
        .def_static("from_numpy", &color_from_numpy, py::arg("array"),
                    "Build from a float array of shape (height, width, 3) in [0, 1].")
        .def_readonly("width", &ColorImage::width)
        .def_readonly("height", &ColorImage::height)
        .def("to_numpy", &color_to_numpy);

    py::class_<GrayImage>(m, "GrayImage")
        .def(py::init<>())
        .def_static("from_numpy", &gray_from_numpy, py::arg("array"),
                    "Build from a float array of shape (height, width) in [0, 1].")
        .def_readonly("width", &GrayImage::width)
        .def_readonly("height", &GrayImage::height)
        .def("to_numpy",
             [](const GrayImage& g) { return gray_to_numpy(g.width, g.height, g.data); });

    py::class_<ComplexityMap>(m, "ComplexityMap")
        .def_readonly("width", &ComplexityMap::width)
        .def_readonly("height", &ComplexityMap::height)
        .def("to_numpy",
             [](const ComplexityMap& c) { return gray_to_numpy(c.width, c.height, c.data); });

    py::class_<IntegralImage>(m, "IntegralImage")
        .def_readonly("width", &IntegralImage::width)
        .def_readonly("height", &IntegralImage::height);

    m.def("decode_image",
          [](const py::bytes& data) {
              const std::string view = data;
              return decode_image(std::vector<uint8_t>(view.begin(), view.end()));
          },
          py::arg("data"), "Decode PNG or JPEG bytes into a ColorImage.");
    m.def("encode_png",
          [](const ColorImage& img) {
              const auto bytes = encode_png(img);
              return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          },
          py::arg("image"));
    m.def("read_image_file", &read_image_file, py::arg("path"));
    m.def("write_png_file", &write_png_file, py::arg("path"), py::arg("image"));
    m.def("to_luma", &to_luma, py::arg("image"));
    m.def("complexity_map", &complexity_map, py::arg("image"));
    m.def("build_integral", &build_integral, py::arg("map"));
    m.def("region_mean", &region_mean, py::arg("integral"), py::arg("rect"));
    m.def("heatmap_image", &heatmap_image, py::arg("map"));

    // detector
    py::class_<DetectParams>(m, "DetectParams")
        .def(py::init<>())
        .def_readwrite("min_area_frac", &DetectParams::min_area_frac)
        .def_readwrite("aspect_ratios", &DetectParams::aspect_ratios)
        .def_readwrite("scale_steps", &DetectParams::scale_steps)
        .def_readwrite("stride_frac", &DetectParams::stride_frac)
        .def_readwrite("max_complexity", &DetectParams::max_complexity)
        .def_readwrite("area_exponent", &DetectParams::area_exponent)
        .def_readwrite("nms_iou", &DetectParams::nms_iou)
        .def_readwrite("top_k", &DetectParams::top_k)
        .def_readwrite("margin_frac", &DetectParams::margin_frac);

    py::class_<ScoredBox>(m, "ScoredBox")
        .def_readonly("box", &ScoredBox::box)
        .def_readonly("score", &ScoredBox::score)
        .def_readonly("mean_complexity", &ScoredBox::mean_complexity);

    py::class_<DetectionSet>(m, "DetectionSet")
        .def_readonly("image_id", &DetectionSet::image_id)
        .def_readonly("params", &DetectionSet::params)
        .def_readonly("boxes", &DetectionSet::boxes);

    m.def("validate_params", &validate_params, py::arg("params"));
    m.def("enumerate_candidates", &enumerate_candidates, py::arg("image_width"),
          py::arg("image_height"), py::arg("params"));
    m.def("score_candidates", &score_candidates, py::arg("integral"), py::arg("candidates"),
          py::arg("params"));
    m.def("nms", &nms, py::arg("scored"), py::arg("nms_iou"), py::arg("max_keep") = SIZE_MAX);
    m.def("detect", &detect, py::arg("image"), py::arg("params") = DetectParams{},
          py::arg("image_id") = "");
    m.def("parameter_sweep", &parameter_sweep, py::arg("image"), py::arg("grid"),
          py::arg("image_id") = "");
    m.def("params_to_json", &params_to_json, py::arg("params"));
    m.def("params_from_json", &params_from_json, py::arg("text"));
    m.def("detection_set_to_json", &detection_set_to_json, py::arg("set"));

    // metrics
    py::class_<MatchedPair>(m, "MatchedPair")
        .def_readonly("detection_index", &MatchedPair::detection_index)
        .def_readonly("ground_truth_index", &MatchedPair::ground_truth_index)
        .def_readonly("iou", &MatchedPair::iou);

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("pairs", &MatchResult::pairs)
        .def_readonly("unmatched_detections", &MatchResult::unmatched_detections)
        .def_readonly("unmatched_gts", &MatchResult::unmatched_gts);

    py::class_<EvalConfig>(m, "EvalConfig")
        .def(py::init<>())
        .def_readwrite("iou_threshold", &EvalConfig::iou_threshold)
        .def_readwrite("thresholds", &EvalConfig::thresholds);

    py::class_<EvalRow>(m, "EvalRow")
        .def_readonly("n_images", &EvalRow::n_images)
        .def_readonly("n_gts", &EvalRow::n_gts)
        .def_readonly("map_50", &EvalRow::map_50)
        .def_readonly("map_50_95", &EvalRow::map_range)
        .def_readonly("mean_iou", &EvalRow::mean_iou);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("note", &EvalReport::note)
        .def_readonly("iou_threshold", &EvalReport::iou_threshold)
        .def_readonly("thresholds", &EvalReport::thresholds)
        .def_readonly("per_class", &EvalReport::per_class)
        .def_readonly("overall", &EvalReport::overall)
        .def_readonly("macro", &EvalReport::macro);

    m.def("iou", &iou, py::arg("a"), py::arg("b"));
    m.def("match_greedy", &match_greedy, py::arg("detections"), py::arg("ground_truths"),
          py::arg("iou_threshold"));
    m.def("average_precision", &average_precision, py::arg("detections"), py::arg("ground_truths"),
          py::arg("iou_threshold"));
    m.def("map_range", &map_range, py::arg("detections"), py::arg("ground_truths"),
          py::arg("thresholds"));
    m.def("canonical_thresholds", &canonical_thresholds);
    m.def("mean_matched_iou", &mean_matched_iou, py::arg("detections"), py::arg("ground_truths"),
          py::arg("iou_threshold"));
    m.def("evaluate_dataset", &evaluate_dataset, py::arg("manifest"), py::arg("base_dir"),
          py::arg("detections"), py::arg("config") = EvalConfig{});
    m.def("report_table", &report_table, py::arg("report"));
    m.def("report_to_json", &report_to_json, py::arg("report"));

    // synthesis
    py::class_<Rgb>(m, "Rgb")
        .def(py::init([](float r, float g, float b) { return Rgb{r, g, b}; }), py::arg("r"),
             py::arg("g"), py::arg("b"))
        .def_readwrite("r", &Rgb::r)
        .def_readwrite("g", &Rgb::g)
        .def_readwrite("b", &Rgb::b);

    py::class_<CountRange>(m, "CountRange")
        .def(py::init([](int lo, int hi) { return CountRange{lo, hi}; }), py::arg("min_count"),
             py::arg("max_count"))
        .def_readwrite("min_count", &CountRange::min_count)
        .def_readwrite("max_count", &CountRange::max_count);

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("canvas_width", &SynthConfig::canvas_width)
        .def_readwrite("canvas_height", &SynthConfig::canvas_height)
        .def_readwrite("clear_rect_area_range", &SynthConfig::clear_rect_area_range)
        .def_readwrite("clear_rect_aspect_range", &SynthConfig::clear_rect_aspect_range)
        .def_readwrite("polygons_per_class", &SynthConfig::polygons_per_class)
        .def_readwrite("vertex_range", &SynthConfig::vertex_range)
        .def_readwrite("palette", &SynthConfig::palette)
        .def_readwrite("stroke_probability", &SynthConfig::stroke_probability)
        .def_readwrite("gradient_probability", &SynthConfig::gradient_probability)
        .def_readwrite("allow_overlap_clear", &SynthConfig::allow_overlap_clear);

    py::class_<SynthSample>(m, "SynthSample")
        .def_readonly("image", &SynthSample::image)
        .def_readonly("ground_truth", &SynthSample::ground_truth)
        .def_readonly("complexity_class", &SynthSample::complexity_class)
        .def_readonly("seed", &SynthSample::seed);

    m.def("default_synth_config", &default_synth_config);
    m.def("validate_synth_config", &validate_synth_config, py::arg("config"));
    m.def("synth_sample", &synth_sample, py::arg("seed"), py::arg("complexity_class"),
          py::arg("config") = SynthConfig{});
    m.def("synth_dataset", &synth_dataset, py::arg("seed"), py::arg("counts"), py::arg("config"),
          py::arg("output_root"));
    m.def("synth_config_to_json", &synth_config_to_json, py::arg("config"));
    m.def("synth_config_from_json", &synth_config_from_json, py::arg("text"));
    m.def("derive_sample_seed", &derive_sample_seed, py::arg("dataset_seed"),
          py::arg("complexity_class"), py::arg("index"));

    // rendering
    py::class_<OverlayStyle>(m, "OverlayStyle")
        .def(py::init<>())
        .def_readwrite("gt_color", &OverlayStyle::gt_color)
        .def_readwrite("det_color", &OverlayStyle::det_color)
        .def_readwrite("line_width", &OverlayStyle::line_width)
        .def_readwrite("draw_scores", &OverlayStyle::draw_scores);

    py::class_<DesignSpec>(m, "DesignSpec")
        .def(py::init<>())
        .def_readwrite("copy_text", &DesignSpec::copy_text)
        .def_readwrite("panel_opacity", &DesignSpec::panel_opacity)
        .def_readwrite("panel_color", &DesignSpec::panel_color)
        .def_readwrite("text_color", &DesignSpec::text_color)
        .def_readwrite("padding_frac", &DesignSpec::padding_frac);

    py::class_<Variation>(m, "Variation")
        .def_readonly("grid_index", &Variation::grid_index)
        .def_readonly("detections", &Variation::detections)
        .def_readonly("image", &Variation::image);

    m.def("draw_overlay", &draw_overlay, py::arg("image"), py::arg("ground_truths"),
          py::arg("detections"), py::arg("style") = OverlayStyle{});
    m.def("render_design", &render_design, py::arg("image"), py::arg("box"), py::arg("spec"));
    m.def("generate_variations", &generate_variations, py::arg("image"), py::arg("spec"),
          py::arg("grid"));
}
