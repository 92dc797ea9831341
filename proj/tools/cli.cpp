#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace asrg::cli {

namespace {

const char* to_string(Connectivity c) { return c == Connectivity::four ? "four" : "eight"; }
const char* to_string(Polarity p) { return p == Polarity::bright_foreground ? "bright" : "dark"; }
const char* to_string(NeighborhoodRule r) {
    return r == NeighborhoodRule::pixel_only ? "pixel_only" : "pixel_and_mean";
}

Connectivity parse_connectivity(const std::string& s) {
    if (s == "four" || s == "4") return Connectivity::four;
    if (s == "eight" || s == "8") return Connectivity::eight;
    throw std::invalid_argument("unknown connectivity '" + s + "' (expected four or eight)");
}

Polarity parse_polarity(const std::string& s) {
    if (s == "bright") return Polarity::bright_foreground;
    if (s == "dark") return Polarity::dark_foreground;
    throw std::invalid_argument("unknown polarity '" + s + "' (expected bright or dark)");
}

NeighborhoodRule parse_rule(const std::string& s) {
    if (s == "pixel_only") return NeighborhoodRule::pixel_only;
    if (s == "pixel_and_mean") return NeighborhoodRule::pixel_and_mean;
    throw std::invalid_argument("unknown neighborhood rule '" + s + "' (expected pixel_only or pixel_and_mean)");
}

void write_json(const std::filesystem::path& path, const Json& j) {
    const std::string text = j.dump(2) + "\n";
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Json read_json(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": invalid JSON: " + e.what());
    }
}

bool is_image_file(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".png";
}

}  // namespace

Json config_to_json(const SegmentationConfig& cfg) {
    Json j;
    j["k"] = cfg.k;
    j["seed_mask_r"] = cfg.seed_mask_r;
    j["median_radius"] = cfg.median_radius;
    j["grow_radius"] = cfg.grow_radius;
    j["connectivity"] = to_string(cfg.connectivity);
    j["polarity"] = to_string(cfg.polarity);
    j["min_area"] = cfg.min_area;
    j["rng_seed"] = cfg.rng_seed;
    j["neighborhood_rule"] = to_string(cfg.neighborhood_rule);
    j["feature_weights"] = {cfg.feature_weights.x, cfg.feature_weights.y, cfg.feature_weights.intensity};
    return j;
}

SegmentationConfig config_from_json(const Json& j) {
    const Json& c = j.contains("config") ? j.at("config") : j;
    SegmentationConfig cfg;
    try {
        if (c.contains("k")) cfg.k = c.at("k").get<int>();
        if (c.contains("seed_mask_r")) cfg.seed_mask_r = c.at("seed_mask_r").get<int>();
        if (c.contains("median_radius")) cfg.median_radius = c.at("median_radius").get<int>();
        if (c.contains("grow_radius")) cfg.grow_radius = c.at("grow_radius").get<int>();
        if (c.contains("connectivity")) cfg.connectivity = parse_connectivity(c.at("connectivity").get<std::string>());
        if (c.contains("polarity")) cfg.polarity = parse_polarity(c.at("polarity").get<std::string>());
        if (c.contains("min_area")) cfg.min_area = c.at("min_area").get<std::uint64_t>();
        if (c.contains("rng_seed")) cfg.rng_seed = c.at("rng_seed").get<std::uint64_t>();
        if (c.contains("neighborhood_rule")) cfg.neighborhood_rule = parse_rule(c.at("neighborhood_rule").get<std::string>());
        if (c.contains("feature_weights")) {
            const auto w = c.at("feature_weights").get<std::vector<double>>();
            if (w.size() != 3) throw std::invalid_argument("feature_weights must have three entries");
            cfg.feature_weights = {w[0], w[1], w[2]};
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

Json run_report(const std::string& input, const SegmentationConfig& cfg, const SegmentationRun& run,
                bool include_timings) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = input;
    j["config"] = config_to_json(cfg);
    j["growth_order"] = "best_first_fifo";
    j["image"] = {{"width", run.preprocessed.width()}, {"height", run.preprocessed.height()}};
    j["otsu"] = {{"threshold", run.otsu.threshold}, {"between_class_variance", run.otsu.between_class_variance}};

    Json rois = Json::array();
    for (const auto& r : run.rois.rois) {
        rois.push_back({{"id", r.id},
                        {"pixel_count", r.pixel_count},
                        {"bbox", {r.bbox.min_x, r.bbox.min_y, r.bbox.max_x, r.bbox.max_y}},
                        {"centroid", {r.centroid_x, r.centroid_y}}});
    }
    j["roi_count"] = run.rois.rois.size();
    j["rois"] = std::move(rois);
    j["candidate_count"] = run.candidates.size();

    Json seeds = Json::array();
    for (const auto& s : run.selection.seeds) {
        seeds.push_back({{"x", s.x},
                         {"y", s.y},
                         {"intensity", s.intensity},
                         {"roi_id", s.roi_id},
                         {"cluster_id", s.cluster_id},
                         {"fallback", s.fallback}});
    }
    j["seeds"] = std::move(seeds);
    j["kmeans"] = {{"iterations", run.selection.model.iterations},
                  {"start", run.selection.model.start},
                  {"inertia", run.selection.model.inertia}};
    j["region_count"] = run.grown.region_sizes.size();
    j["region_sizes"] = run.grown.region_sizes;
    j["frontier_rejections"] = run.grown.frontier_rejections;
    j["warnings"] = run.warnings;
    if (include_timings) {
        Json t;
        for (const auto& s : run.timings) t[s.stage] = s.milliseconds;
        j["timings_ms"] = std::move(t);
    }
    return j;
}

Json eval_report_to_json(const EvalReport& report) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["n_gt_regions"] = report.n_gt_regions;
    j["n_pred_regions"] = report.n_pred_regions;
    Json matches = Json::array();
    for (const auto& m : report.matches) {
        matches.push_back({{"gt_id", m.gt_id}, {"pred_id", m.pred_id}, {"intersection", m.intersection}, {"dice", m.dice}});
    }
    j["matches"] = std::move(matches);
    j["mean_dice"] = report.mean_dice;
    j["over_segmented"] = report.over_segmented;
    j["under_segmented"] = report.under_segmented;
    return j;
}

SceneSpec scene_from_json(const Json& j) {
    SceneSpec spec;
    try {
        spec.width = j.value("width", spec.width);
        spec.height = j.value("height", spec.height);
        spec.bg_intensity = j.value("bg_intensity", spec.bg_intensity);
        spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
        spec.rng_seed = j.value("rng_seed", spec.rng_seed);
        if (j.contains("blobs")) {
            for (const auto& b : j.at("blobs")) {
                spec.blobs.push_back({b.at("x").get<int>(), b.at("y").get<int>(), b.at("radius").get<int>(),
                                      b.at("intensity").get<int>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid scene spec: ") + e.what());
    }
    return spec;
}

Json scene_to_json(const SceneSpec& spec) {
    Json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["bg_intensity"] = spec.bg_intensity;
    j["noise_sigma"] = spec.noise_sigma;
    j["rng_seed"] = spec.rng_seed;
    Json blobs = Json::array();
    for (const auto& b : spec.blobs) {
        blobs.push_back({{"x", b.cx}, {"y", b.cy}, {"radius", b.radius}, {"intensity", b.intensity}});
    }
    j["blobs"] = std::move(blobs);
    return j;
}

BlobSpec parse_blob(const std::string& text) {
    std::vector<int> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoi(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw std::invalid_argument("invalid blob '" + text + "' (expected cx,cy,radius,intensity)");
        }
    }
    if (v.size() != 4) throw std::invalid_argument("invalid blob '" + text + "' (expected cx,cy,radius,intensity)");
    return {v[0], v[1], v[2], v[3]};
}

GrayImage seed_overlay(const GrayImage& input, const std::vector<Seed>& seeds, Polarity polarity) {
    GrayImage out = input;
    const std::uint8_t mark = polarity == Polarity::bright_foreground ? 0 : 255;
    for (const auto& s : seeds) out(s.x, s.y) = mark;
    return out;
}

namespace {

// Runs the pipeline on one file and writes the three artifacts.
void segment_one(const std::filesystem::path& input, const std::string& prefix, const SegmentationConfig& cfg,
                 bool timings, std::ostream& log) {
    const GrayImage img = load_gray(input);
    const SegmentationRun run = segment(img, cfg);
    save_label_png(run.grown.labels, prefix + ".labels.png");
    save_gray(seed_overlay(img, run.selection.seeds, cfg.polarity), prefix + ".seeds.png");
    write_json(prefix + ".report.json", run_report(input.string(), cfg, run, timings));
    for (const auto& w : run.warnings) log << "warning: " << input.string() << ": " << w << "\n";
    log << input.string() << ": threshold " << run.otsu.threshold << ", " << run.rois.rois.size() << " ROIs, "
        << run.selection.seeds.size() << " seeds, " << run.grown.region_sizes.size() << " regions\n";
}

}  // namespace

int cmd_segment(const SegmentOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        validate(opts.config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (!std::filesystem::is_directory(opts.input)) {
        try {
            segment_one(opts.input, opts.output_prefix, opts.config, opts.timings, out);
        } catch (const std::exception& e) {
            err << "error: " << opts.input.string() << ": " << e.what() << "\n";
            return kFailure;
        }
        return kOk;
    }

    // Batch mode: the prefix names an output directory.
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(opts.input)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        err << "error: no .pgm or .png files in " << opts.input.string() << "\n";
        return kFailure;
    }
    const std::filesystem::path outdir(opts.output_prefix);
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) {
        err << "error: cannot create " << outdir.string() << ": " << ec.message() << "\n";
        return kFailure;
    }

    std::vector<std::string> logs(files.size());
    std::vector<std::string> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            std::ostringstream log;
            try {
                segment_one(files[i], (outdir / files[i].stem()).string(), opts.config, opts.timings, log);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            logs[i] = log.str();
        }
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(files.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
    }

    int status = kOk;
    for (std::size_t i = 0; i < files.size(); ++i) {
        out << logs[i];
        if (!errors[i].empty()) {
            err << "error: " << files[i].string() << ": " << errors[i] << "\n";
            status = kFailure;
        }
    }
    return status;
}

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        SceneSpec spec = opts.spec_path ? scene_from_json(read_json(*opts.spec_path)) : opts.scene;
        const Scene scene = generate_blobs(spec);
        if (spec.blobs.empty()) err << "warning: scene has no blobs; writing a constant image\n";
        save_gray(scene.image, opts.output_prefix + ".image.png");
        save_label_png(scene.truth, opts.output_prefix + ".gt.png");
        write_json(opts.output_prefix + ".scene.json", scene_to_json(spec));
        out << "wrote " << opts.output_prefix << ".image.png, " << opts.output_prefix << ".gt.png\n";
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_eval(const std::filesystem::path& pred, const std::filesystem::path& gt, const std::filesystem::path& report,
             std::ostream& out, std::ostream& err) {
    try {
        const EvalReport r = dice_match(load_labels(pred), load_labels(gt));
        write_json(report, eval_report_to_json(r));
        out << "mean_dice " << std::setprecision(6) << r.mean_dice << " (" << r.matches.size() << "/" << r.n_gt_regions
            << " GT regions matched, " << r.n_pred_regions << " predicted)\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_otsu(const std::filesystem::path& input, std::ostream& out, std::ostream& err) {
    try {
        const auto r = otsu_threshold(histogram(load_gray(input)));
        out << "threshold " << r.threshold << "\n"
            << "between_class_variance " << std::setprecision(17) << r.between_class_variance << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Automatic seeded region growing for grayscale images", "asrg"};
    app.require_subcommand(1);

    // segment
    auto* seg = app.add_subcommand("segment", "Segment an image, or every image in a directory");
    seg->option_defaults()->always_capture_default();
    SegmentOptions sopts;
    std::string config_path;
    std::string connectivity = "four", polarity = "bright", rule = "pixel_and_mean";
    std::vector<double> weights;
    SegmentationConfig& cfg = sopts.config;
    seg->add_option("input", sopts.input, "Input PGM/PNG image or directory")->required();
    seg->add_option("-o,--output", sopts.output_prefix, "Output prefix (output directory in batch mode)")->required();
    seg->add_option("--config", config_path, "Start from the config in a JSON file or run report");
    auto* o_k = seg->add_option("--k", cfg.k, "Number of seeds (K-means clusters)");
    auto* o_r = seg->add_option("--seed-mask-r", cfg.seed_mask_r, "Odd side length R of the seed interior mask");
    auto* o_med = seg->add_option("--median-radius", cfg.median_radius, "Median filter radius");
    auto* o_grow = seg->add_option("--grow-radius", cfg.grow_radius, "Neighbourhood radius of the growth test");
    auto* o_conn = seg->add_option("--connectivity", connectivity, "four or eight");
    auto* o_pol = seg->add_option("--polarity", polarity, "bright or dark foreground");
    auto* o_area = seg->add_option("--min-area", cfg.min_area, "Smallest ROI kept, in pixels");
    auto* o_seed = seg->add_option("--rng-seed", cfg.rng_seed, "Seed for the K-means restarts");
    auto* o_rule = seg->add_option("--neighborhood-rule", rule, "pixel_and_mean or pixel_only");
    auto* o_w = seg->add_option("--feature-weights", weights, "Weights of x, y and intensity features")->expected(3);
    seg->add_flag("--timings", sopts.timings, "Include per-stage timings in the report (breaks byte-identity)");
    seg->add_option("--jobs", sopts.jobs, "Parallel workers in batch mode")->check(CLI::PositiveNumber);

    // synth
    auto* syn = app.add_subcommand("synth", "Generate a synthetic blob image with ground truth");
    SynthOptions yopts;
    std::string spec_path;
    std::vector<std::string> blob_text;
    syn->add_option("--spec", spec_path, "Scene spec JSON");
    syn->add_option("-o,--output", yopts.output_prefix, "Output prefix")->required();
    syn->add_option("--width", yopts.scene.width, "Image width");
    syn->add_option("--height", yopts.scene.height, "Image height");
    syn->add_option("--bg", yopts.scene.bg_intensity, "Background intensity");
    syn->add_option("--sigma", yopts.scene.noise_sigma, "Gaussian noise sigma");
    syn->add_option("--rng-seed", yopts.scene.rng_seed, "Noise seed");
    syn->add_option("--blob", blob_text, "Blob as cx,cy,radius,intensity (repeatable)");

    // eval
    auto* ev = app.add_subcommand("eval", "Score a predicted label map against ground truth");
    std::filesystem::path pred, gt, report;
    ev->add_option("pred", pred, "Predicted label map")->required();
    ev->add_option("gt", gt, "Ground-truth label map")->required();
    ev->add_option("-o,--output", report, "Report JSON path")->required();

    // otsu
    auto* ot = app.add_subcommand("otsu", "Print the Otsu threshold of an image");
    std::filesystem::path otsu_input;
    ot->add_option("input", otsu_input, "Input PGM/PNG image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*seg) {
            if (!config_path.empty()) {
                const SegmentationConfig overrides = cfg;
                cfg = config_from_json(read_json(config_path));
                if (o_k->count()) cfg.k = overrides.k;
                if (o_r->count()) cfg.seed_mask_r = overrides.seed_mask_r;
                if (o_med->count()) cfg.median_radius = overrides.median_radius;
                if (o_grow->count()) cfg.grow_radius = overrides.grow_radius;
                if (o_area->count()) cfg.min_area = overrides.min_area;
                if (o_seed->count()) cfg.rng_seed = overrides.rng_seed;
            }
            if (config_path.empty() || o_conn->count()) cfg.connectivity = parse_connectivity(connectivity);
            if (config_path.empty() || o_pol->count()) cfg.polarity = parse_polarity(polarity);
            if (config_path.empty() || o_rule->count()) cfg.neighborhood_rule = parse_rule(rule);
            if (o_w->count()) cfg.feature_weights = {weights.at(0), weights.at(1), weights.at(2)};
            return cmd_segment(sopts, out, err);
        }
        if (*syn) {
            if (!spec_path.empty()) yopts.spec_path = spec_path;
            for (const auto& b : blob_text) yopts.scene.blobs.push_back(parse_blob(b));
            return cmd_synth(yopts, out, err);
        }
        if (*ev) return cmd_eval(pred, gt, report, out, err);
        if (*ot) return cmd_otsu(otsu_input, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace asrg::cli
