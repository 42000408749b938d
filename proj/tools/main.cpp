// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paflab/annotations.hpp"
#include "paflab/correction.hpp"
#include "paflab/labelgen.hpp"
#include "paflab/metrics.hpp"
#include "paflab/parser.hpp"
#include "paflab/render.hpp"
#include "paflab/synthetic.hpp"
#include "paflab/tensor_file.hpp"
#include "parallel.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace paflab;
using cli::RunConfig;

namespace {

std::vector<fs::path> list_labelsets(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pls") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

long image_id_from_stem(const fs::path& path) {
    const std::string stem = path.stem().string();
    std::size_t used = 0;
    long id = 0;
    try {
        id = std::stol(stem, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != stem.size()) {
        throw std::runtime_error("labelset filename is not an image id: " + path.string());
    }
    return id;
}

json poses_to_json(const std::vector<PoseResult>& poses) {
    json out = json::array();
    for (const auto& pose : poses) {
        json parts = json::array();
        for (const auto& part : pose.parts) {
            if (part.has_value()) {
                parts.push_back(json::array({part->pos.x, part->pos.y, part->score}));
            } else {
                parts.push_back(nullptr);
            }
        }
        out.push_back({{"parts", std::move(parts)}, {"score", pose.instance_score}});
    }
    return out;
}

std::vector<PoseResult> poses_from_json(const json& arr, int num_parts) {
    std::vector<PoseResult> poses;
    for (const auto& p : arr) {
        PoseResult pose;
        pose.instance_score = p.at("score").get<double>();
        const auto& parts = p.at("parts");
        if (static_cast<int>(parts.size()) != num_parts) {
            throw std::runtime_error("results file part count does not match the skeleton");
        }
        for (const auto& part : parts) {
            if (part.is_null()) {
                pose.parts.push_back(std::nullopt);
            } else {
                pose.parts.push_back(PosePart{{part.at(0).get<double>(), part.at(1).get<double>()},
                                              part.at(2).get<double>()});
            }
        }
        poses.push_back(std::move(pose));
    }
    return poses;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const RunConfig& cfg, const fs::path& annotations, const fs::path& out_dir,
                 int jobs) {
    const auto images = read_annotations(annotations, cfg.skeleton);
    fs::create_directories(out_dir);

    std::vector<LabelGenDiagnostics> diags(images.size());
    cli::parallel_for(images.size(), jobs, [&](std::size_t i) {
        const auto& image = images[i];
        LabelGenConfig gen_cfg;
        gen_cfg.grid = cli::grid_for_image(image.width, image.height, cfg.stride);
        gen_cfg.sigma = cfg.effective_sigma();
        gen_cfg.limb_width = cfg.limb_width;
        const LabelSet labels = generate_labels(image.persons, image.ignore_regions,
                                                cfg.skeleton, gen_cfg, &diags[i]);
        write_labelset(out_dir / (std::to_string(image.image_id) + ".pls"), labels);
    });

    long persons = 0, missing = 0, degenerate = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        persons += static_cast<long>(images[i].persons.size());
        missing += diags[i].missing_endpoint_limbs;
        degenerate += diags[i].degenerate_limbs;
    }
    std::printf("images %zu persons %ld skipped_limbs_missing_endpoint %ld degenerate_limbs %ld\n",
                images.size(), persons, missing, degenerate);
    return 0;
}

// ----------------------------------------------------------------- correct

CorrectionScope scope_from_string(const std::string& s) {
    if (s == "maps") return CorrectionScope::MapsOnly;
    if (s == "pafs") return CorrectionScope::PafsOnly;
    if (s == "both") return CorrectionScope::Both;
    throw std::runtime_error("unknown correction scope: " + s);
}

int cmd_correct(const RunConfig& cfg, const fs::path& gt_dir, const fs::path& teacher_dir,
                const fs::path& out_dir, const std::string& scope_name, int jobs) {
    const CorrectionScope scope = scope_from_string(scope_name);
    const auto files = list_labelsets(gt_dir);
    fs::create_directories(out_dir);

    struct Stat {
        long map_cells = 0;
        long paf_cells = 0;
        double norm_delta_sum = 0.0;
    };
    std::vector<Stat> stats(files.size());

    cli::parallel_for(files.size(), jobs, [&](std::size_t i) {
        const fs::path teacher_path = teacher_dir / files[i].filename();
        const LabelSet gt = read_labelset(files[i], cfg.skeleton);
        LabelSet teacher = read_labelset(teacher_path, cfg.skeleton);
        sanitize_teacher(teacher);
        const LabelSet corrected = correct_labels(gt, teacher, scope);

        Stat& st = stats[i];
        const std::size_t cells = gt.grid().cell_count();
        for (int j = 0; j < gt.part_count(); ++j) {
            for (std::size_t k = 0; k < cells; ++k) {
                if (corrected.maps[j].values[k] != gt.maps[j].values[k]) st.map_cells++;
            }
        }
        for (int c = 0; c < gt.limb_count(); ++c) {
            for (int y = 0; y < gt.grid().height; ++y) {
                for (int x = 0; x < gt.grid().width; ++x) {
                    const Vec2 before = gt.pafs[c].at(x, y);
                    const Vec2 after = corrected.pafs[c].at(x, y);
                    if (before != after) {
                        st.paf_cells++;
                        st.norm_delta_sum += after.norm() - before.norm();
                    }
                }
            }
        }
        write_labelset(out_dir / files[i].filename(), corrected);
    });

    long total_map = 0, total_paf = 0;
    double total_delta = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const double mean_delta =
            stats[i].paf_cells > 0 ? stats[i].norm_delta_sum / stats[i].paf_cells : 0.0;
        std::printf("%s map_cells_changed %ld paf_cells_changed %ld mean_paf_norm_delta %s\n",
                    files[i].stem().string().c_str(), stats[i].map_cells, stats[i].paf_cells,
                    format_double(mean_delta).c_str());
        total_map += stats[i].map_cells;
        total_paf += stats[i].paf_cells;
        total_delta += stats[i].norm_delta_sum;
    }
    std::printf("total map_cells_changed %ld paf_cells_changed %ld mean_paf_norm_delta %s\n",
                total_map, total_paf,
                format_double(total_paf > 0 ? total_delta / total_paf : 0.0).c_str());
    return 0;
}

// ------------------------------------------------------------------- parse

int cmd_parse(const RunConfig& cfg, const fs::path& labels_dir, const fs::path& out_file,
              int jobs) {
    const auto files = list_labelsets(labels_dir);
    std::vector<json> entries(files.size());
    cli::parallel_for(files.size(), jobs, [&](std::size_t i) {
        const long image_id = image_id_from_stem(files[i]);
        const LabelSet labels = read_labelset(files[i], cfg.skeleton);
        const auto poses = parse_poses(labels.maps, labels.pafs, cfg.skeleton, cfg.parser);
        entries[i] = {{"image_id", image_id}, {"poses", poses_to_json(poses)}};
    });

    json root = json::array();
    std::size_t total_poses = 0;
    for (auto& e : entries) {
        total_poses += e["poses"].size();
        root.push_back(std::move(e));
    }
    write_text_atomic(out_file, root.dump(1) + "\n");
    std::printf("images %zu poses %zu\n", files.size(), total_poses);
    return 0;
}

// -------------------------------------------------------------------- eval

int cmd_eval(const RunConfig& cfg, const fs::path& preds_file, const fs::path& gt_file,
             const fs::path& out_file) {
    std::ifstream in(preds_file);
    if (!in) throw std::runtime_error("cannot open " + preds_file.string());
    const json preds_json = json::parse(in);

    std::vector<ImagePredictions> preds;
    for (const auto& entry : preds_json) {
        ImagePredictions p;
        p.image_id = entry.at("image_id").get<long>();
        p.poses = poses_from_json(entry.at("poses"), cfg.skeleton.part_count());
        preds.push_back(std::move(p));
    }

    std::vector<ImageGroundTruth> gts;
    for (const auto& image : read_annotations(gt_file, cfg.skeleton)) {
        gts.push_back({image.image_id, image.persons});
    }

    const EvalConfig eval_cfg;
    const EvalReport report = evaluate(preds, gts, cfg.skeleton, eval_cfg);

    std::string kv;
    const auto emit = [&](const std::string& key, double value) {
        std::printf("%-6s %s\n", key.c_str(), format_double(value).c_str());
        kv += key + " " + format_double(value) + "\n";
    };
    emit("ap", report.ap);
    emit("ap50", report.ap50);
    emit("ap75", report.ap75);
    emit("ap_m", report.ap_m);
    emit("ap_l", report.ap_l);
    for (std::size_t t = 0; t < eval_cfg.thresholds.size(); ++t) {
        char key[32];
        std::snprintf(key, sizeof(key), "ap@%.2f", eval_cfg.thresholds[t]);
        std::printf("%-6s %s\n", key, format_double(report.per_threshold[t]).c_str());
        kv += std::string(key) + " " + format_double(report.per_threshold[t]) + "\n";
    }
    write_text_atomic(out_file, kv);
    return 0;
}

// ------------------------------------------------------------------- synth

json event_to_json(const CorruptionEvent& ev) {
    json out;
    switch (ev.kind) {
        case CorruptionKind::PersonTranslated:
            out["kind"] = "person_translated";
            out["person"] = ev.person;
            out["delta"] = {ev.delta.x, ev.delta.y};
            break;
        case CorruptionKind::KeypointHidden:
            out["kind"] = "keypoint_hidden";
            out["person"] = ev.person;
            out["part"] = ev.part;
            out["previous"] = {ev.previous.x, ev.previous.y,
                               static_cast<int>(ev.previous.state)};
            break;
        case CorruptionKind::RegionDropped: {
            out["kind"] = "region_dropped";
            out["region_index"] = ev.region_index;
            json flat = json::array();
            for (const auto& v : ev.region.vertices) {
                flat.push_back(v.x);
                flat.push_back(v.y);
            }
            out["region"] = std::move(flat);
            break;
        }
    }
    return out;
}

int cmd_synth(const RunConfig& cfg, int n_scenes, int persons, const fs::path& out_dir,
              std::uint64_t seed, bool emit_teacher) {
    fs::create_directories(out_dir);
    if (emit_teacher) fs::create_directories(out_dir / "teacher");

    std::vector<ImageAnnotations> corrupted_images, reference_images;
    json ledger_root = json::array();

    for (int i = 0; i < n_scenes; ++i) {
        const long image_id = i + 1;
        Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(image_id));
        const Scene scene = gen_scene(rng, cfg.scene, persons, cfg.skeleton);

        CorruptionConfig corrupt = cfg.corruption;
        corrupt.seed = seed * 7777777ull + static_cast<std::uint64_t>(image_id);
        const CorruptionResult result = inject_failures(scene, corrupt);

        const int width = static_cast<int>(scene.image_dims.x);
        const int height = static_cast<int>(scene.image_dims.y);
        corrupted_images.push_back({image_id, width, height, result.corrupted.persons,
                                    result.corrupted.ignore_regions()});
        reference_images.push_back({image_id, width, height, result.reference.persons,
                                    result.reference.ignore_regions()});

        json events = json::array();
        for (const auto& ev : result.ledger) events.push_back(event_to_json(ev));
        ledger_root.push_back({{"image_id", image_id}, {"events", std::move(events)}});

        if (emit_teacher) {
            LabelGenConfig gen_cfg;
            gen_cfg.grid = cli::grid_for_image(width, height, cfg.stride);
            gen_cfg.sigma = cfg.effective_sigma();
            gen_cfg.limb_width = cfg.limb_width;
            const LabelSet teacher =
                oracle_teacher(result.reference, cfg.skeleton, gen_cfg,
                               {cfg.teacher_alpha, cfg.teacher_blur});
            write_labelset(out_dir / "teacher" / (std::to_string(image_id) + ".pls"), teacher);
        }
    }

    write_annotations(out_dir / "annotations.json", corrupted_images, cfg.skeleton);
    write_annotations(out_dir / "reference.json", reference_images, cfg.skeleton);
    write_text_atomic(out_dir / "ledger.json", ledger_root.dump(1) + "\n");

    std::size_t events = 0;
    for (const auto& entry : ledger_root) events += entry["events"].size();
    std::printf("scenes %d persons_per_scene %d corruption_events %zu\n", n_scenes, persons,
                events);
    return 0;
}

// ------------------------------------------------------------------ render

int cmd_render(const RunConfig& cfg, const fs::path& labels_dir, const fs::path& preds_file,
               const fs::path& annotations, const fs::path& out_dir, int jobs) {
    fs::create_directories(out_dir);
    if (!labels_dir.empty()) {
        const auto files = list_labelsets(labels_dir);
        cli::parallel_for(files.size(), jobs, [&](std::size_t i) {
            const LabelSet labels = read_labelset(files[i]);
            const std::string stem = files[i].stem().string();
            write_png(out_dir / (stem + "_maps.png"), render_confidence(labels.maps));
            write_png(out_dir / (stem + "_pafs.png"), render_paf(labels.pafs));
        });
        std::printf("rendered %zu labelsets\n", files.size());
        return 0;
    }

    std::ifstream in(preds_file);
    if (!in) throw std::runtime_error("cannot open " + preds_file.string());
    const json preds_json = json::parse(in);

    std::map<long, Vec2> dims;
    if (!annotations.empty()) {
        for (const auto& image : read_annotations(annotations, cfg.skeleton)) {
            dims[image.image_id] = {static_cast<double>(image.width),
                                    static_cast<double>(image.height)};
        }
    }
    std::size_t count = 0;
    for (const auto& entry : preds_json) {
        const long image_id = entry.at("image_id").get<long>();
        const auto poses = poses_from_json(entry.at("poses"), cfg.skeleton.part_count());
        Vec2 size{368.0, 368.0};
        if (const auto it = dims.find(image_id); it != dims.end()) {
            size = it->second;
        }
        write_png(out_dir / ("poses_" + std::to_string(image_id) + ".png"),
                  render_poses(poses, cfg.skeleton, size));
        count++;
    }
    std::printf("rendered %zu pose overlays\n", count);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label pipeline for PAF-based multi-person pose estimation"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration");
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for per-image work");

    // generate
    auto* generate = app.add_subcommand("generate", "annotations -> label tensors");
    std::string gen_annotations, gen_out;
    double flag_stride = 0.0, flag_sigma = 0.0, flag_limb_width = 0.0;
    generate->add_option("--annotations", gen_annotations)->required();
    generate->add_option("--out", gen_out)->required();
    generate->add_option("--stride", flag_stride);
    generate->add_option("--sigma", flag_sigma);
    generate->add_option("--limb-width", flag_limb_width);

    // correct
    auto* correct = app.add_subcommand("correct", "fuse teacher predictions into labels");
    std::string cor_gt, cor_teacher, cor_out, cor_scope = "both";
    correct->add_option("--gt", cor_gt)->required();
    correct->add_option("--teacher", cor_teacher)->required();
    correct->add_option("--out", cor_out)->required();
    correct->add_option("--scope", cor_scope)->check(CLI::IsMember({"maps", "pafs", "both"}));

    // parse
    auto* parse = app.add_subcommand("parse", "label tensors -> skeletons");
    std::string parse_labels, parse_out;
    double flag_peak = -1.0, flag_min_limb = -1.0, flag_fraction = -1.0;
    int flag_samples = 0;
    parse->add_option("--labels", parse_labels)->required();
    parse->add_option("--out", parse_out)->required();
    parse->add_option("--peak-threshold", flag_peak);
    parse->add_option("--min-limb-score", flag_min_limb);
    parse->add_option("--n-samples", flag_samples);
    parse->add_option("--min-sample-fraction", flag_fraction);

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against annotations");
    std::string eval_preds, eval_gt, eval_out = "eval_report.txt";
    eval->add_option("--preds", eval_preds)->required();
    eval->add_option("--gt", eval_gt)->required();
    eval->add_option("--out", eval_out);

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic corrupted scenes");
    int synth_scenes = 1, synth_persons = 2;
    std::string synth_out, synth_corrupt;
    std::uint64_t synth_seed = 1;
    double synth_image_size = 0.0;
    bool synth_teacher = false;
    synth->add_option("--n-scenes", synth_scenes)->required();
    synth->add_option("--persons", synth_persons)->required();
    synth->add_option("--out", synth_out)->required();
    synth->add_option("--corrupt", synth_corrupt, "JSON corruption configuration");
    synth->add_option("--seed", synth_seed);
    synth->add_option("--image-size", synth_image_size);
    synth->add_flag("--emit-teacher", synth_teacher, "write oracle teacher labelsets");

    // render
    auto* render = app.add_subcommand("render", "labels or predictions -> PNGs");
    std::string render_labels, render_preds, render_annotations, render_out;
    render->add_option("--labels", render_labels);
    render->add_option("--preds", render_preds);
    render->add_option("--annotations", render_annotations, "image sizes for pose overlays");
    render->add_option("--out", render_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);

        if (*generate) {
            if (flag_stride > 0.0) cfg.stride = flag_stride;
            if (flag_sigma > 0.0) cfg.sigma = flag_sigma;
            if (flag_limb_width > 0.0) cfg.limb_width = flag_limb_width;
            return cmd_generate(cfg, gen_annotations, gen_out, jobs);
        }
        if (*correct) {
            return cmd_correct(cfg, cor_gt, cor_teacher, cor_out, cor_scope, jobs);
        }
        if (*parse) {
            if (flag_peak >= 0.0) cfg.parser.peak_threshold = flag_peak;
            if (flag_min_limb >= 0.0) cfg.parser.min_limb_score = flag_min_limb;
            if (flag_samples >= 2) cfg.parser.n_samples = flag_samples;
            if (flag_fraction >= 0.0) cfg.parser.min_sample_fraction = flag_fraction;
            return cmd_parse(cfg, parse_labels, parse_out, jobs);
        }
        if (*eval) {
            return cmd_eval(cfg, eval_preds, eval_gt, eval_out);
        }
        if (*synth) {
            if (!synth_corrupt.empty()) cfg.apply_corruption_file(synth_corrupt);
            if (synth_image_size > 0.0) {
                cfg.scene.image_dims = {synth_image_size, synth_image_size};
            }
            return cmd_synth(cfg, synth_scenes, synth_persons, synth_out, synth_seed,
                             synth_teacher);
        }
        if (*render) {
            if (render_labels.empty() == render_preds.empty()) {
                throw std::runtime_error("render needs exactly one of --labels or --preds");
            }
            return cmd_render(cfg, render_labels, render_preds, render_annotations, render_out,
                              jobs);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
