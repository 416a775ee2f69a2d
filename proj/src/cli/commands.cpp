#include "repliscope/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fit_json.hpp"
#include "repliscope/csv.hpp"
#include "repliscope/decay_models.hpp"
#include "repliscope/image.hpp"
#include "repliscope/intrinsic_dim.hpp"
#include "repliscope/manifest.hpp"
#include "repliscope/predictor.hpp"
#include "repliscope/replication.hpp"
#include "repliscope/vecstore.hpp"

namespace repliscope::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "repliscope 0.1.0";
constexpr std::size_t kDefaultAlphaDim = 128 * 128 * 3;

struct GlobalOptions {
    std::size_t threads = 0;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
};

struct Context {
    const GlobalOptions& global;
    std::ostream& out;
    RunResult& result;

    fs::path output(const std::string& name) const {
        const fs::path path = fs::path(global.out_dir) / name;
        fs::create_directories(path.parent_path());
        return path;
    }
    void produced(const fs::path& p) const { result.artifacts.push_back(p); }
    void warn(const std::string& msg) const {
        if (std::find(result.log.begin(), result.log.end(), msg) == result.log.end()) {
            result.log.push_back(msg);
        }
    }
    void warn_all(const Warnings& w) const {
        for (const auto& msg : w) warn(msg);
    }
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + text + "' for " + what);
    }
}

XY parse_pair(const std::string& text, const std::string& what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError(what + " expects X:Y, got '" + text + "'");
    return {parse_number(text.substr(0, colon), what), parse_number(text.substr(colon + 1), what)};
}

std::string safe_name(const std::string& name) {
    std::string out = name;
    for (char& ch : out) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
    }
    return out;
}

// The 8000 default only makes sense for 128x128x3 raw pixels.
double resolve_alpha(std::optional<double> given, const VectorDataset& training,
                     const VectorDataset& generated) {
    if (given) return *given;
    for (const VectorDataset* ds : {&training, &generated}) {
        if (ds->space_tag() != SpaceTag::pixel_raw_0_255 || ds->dim() != kDefaultAlphaDim) {
            throw UsageError(
                "no default alpha for " + std::string(to_string(ds->space_tag())) +
                " vectors of dim " + std::to_string(ds->dim()) +
                "; the default 8000 applies to 128x128x3 raw pixels only, pass --alpha");
        }
    }
    return kDefaultAlpha;
}

void check_generated_count(const Context& ctx, const VectorDataset& generated) {
    if (generated.count() < kDefaultGeneratedCount) {
        ctx.warn("only " + std::to_string(generated.count()) + " generated samples; " +
                 std::to_string(kDefaultGeneratedCount) + " are expected");
    }
}

void check_spaces(const VectorDataset& training, const VectorDataset& generated) {
    if (training.space_tag() != generated.space_tag()) {
        throw InvalidInput("training vectors are " + std::string(to_string(training.space_tag())) +
                           " but generated vectors are " +
                           std::string(to_string(generated.space_tag())) +
                           "; replication distances require both sets in the same space");
    }
    if (training.dim() != generated.dim()) {
        throw InvalidInput("training dim " + std::to_string(training.dim()) +
                           " differs from generated dim " + std::to_string(generated.dim()));
    }
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
    std::string in_dir;
    std::string out_vds;
    std::size_t resolution = 128;
    std::size_t id_resolution = 32;
    bool zscore = false;
    std::size_t subsample = 0;
};

void cmd_preprocess(const PreprocessArgs& a, const Context& ctx) {
    PreprocessConfig cfg;
    cfg.target_resolution = a.resolution;
    cfg.id_resolution = a.id_resolution;
    cfg.zscore = a.zscore;
    cfg.threads = ctx.global.threads;
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }

    auto loaded = load_image_dir(a.in_dir, cfg);
    ctx.warn_all(loaded.warnings);
    VectorDataset ds = a.subsample > 0 ? subsample(loaded.dataset, a.subsample, ctx.global.seed)
                                       : std::move(loaded.dataset);

    const fs::path out_path(a.out_vds);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_vds(ds, out_path);
    ctx.produced(out_path);

    if (loaded.stats) {
        json stats{{"channels", loaded.stats->channels()},
                   {"mean", loaded.stats->mean},
                   {"std", loaded.stats->stddev}};
        const fs::path stats_path = out_path.string() + ".stats.json";
        write_json(stats_path, stats);
        ctx.produced(stats_path);
    }
    ctx.out << "count=" << ds.count() << " dim=" << ds.dim() << " channels=" << loaded.channels
            << " skipped=" << loaded.skipped.size() << '\n';
}

// ---------------------------------------------------------------------------
// id

struct IdArgs {
    std::string vds;
    std::size_t k1 = 10;
    std::size_t k2 = 20;
    std::size_t id_resolution = 32;
    bool full_res = false;
    std::string duplicates = "warn";
    std::string per_point_csv;
};

void cmd_id(const IdArgs& a, const Context& ctx) {
    IdConfig cfg;
    cfg.k1 = a.k1;
    cfg.k2 = a.k2;
    cfg.threads = ctx.global.threads;
    cfg.duplicate_policy =
        a.duplicates == "error" ? DuplicatePolicy::error : DuplicatePolicy::deduplicate_warn;
    cfg.keep_per_point = !a.per_point_csv.empty();
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    if (a.id_resolution == 0) throw UsageError("--id-resolution must be >= 1");

    const auto raw = read_vds(a.vds);
    const auto ds = a.full_res ? raw : dataset_for_id(raw, a.id_resolution);
    const auto est = estimate_id(ds, cfg);
    ctx.warn_all(est.warnings);

    json summary{{"value", est.value}, {"k1", cfg.k1},          {"k2", cfg.k2},
                 {"n_used", est.n_used}, {"count", raw.count()}, {"dim", ds.dim()}};
    if (const auto layout = infer_square_layout(ds.dim());
        layout && ds.space_tag() != SpaceTag::external_embedding) {
        summary["resolution"] = layout->side;
    }
    ctx.out << summary.dump(2) << '\n';

    if (!a.per_point_csv.empty()) {
        write_per_point_csv(est, ds, a.per_point_csv);
        ctx.produced(a.per_point_csv);
    }
}

// ---------------------------------------------------------------------------
// replication

struct ReplicationArgs {
    std::string training_vds;
    std::string generated_vds;
    std::optional<double> alpha;
    std::string sweep;
};

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<double> alphas;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) alphas.push_back(parse_number(item, "--sweep"));
    if (alphas.empty()) throw UsageError("--sweep needs at least one value");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] < 0.0) throw UsageError("--sweep values must be >= 0");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) {
            throw UsageError("--sweep values must be strictly ascending");
        }
    }
    return alphas;
}

void cmd_replication(const ReplicationArgs& a, const Context& ctx) {
    std::vector<double> sweep_alphas;
    if (!a.sweep.empty()) sweep_alphas = parse_sweep(a.sweep);
    if (a.alpha && *a.alpha < 0.0) throw UsageError("--alpha must be >= 0");

    const auto training = read_vds(a.training_vds);
    const auto generated = read_vds(a.generated_vds);
    check_spaces(training, generated);
    const double alpha = resolve_alpha(a.alpha, training, generated);
    check_generated_count(ctx, generated);

    const auto nn = min_distances(generated, training, KnnOptions{ctx.global.threads});
    const auto report = report_from_distances(nn, alpha);

    const json summary{{"alpha", report.alpha},
                       {"n_generated", report.n_generated},
                       {"n_replicated", report.n_replicated},
                       {"percentage", report.percentage}};
    const auto summary_path = ctx.output("replication_summary.json");
    write_json(summary_path, summary);
    ctx.produced(summary_path);

    const auto csv_path = ctx.output("replication_samples.csv");
    write_replication_csv(report, generated, training, csv_path);
    ctx.produced(csv_path);

    if (!sweep_alphas.empty()) {
        const auto sweep_path = ctx.output("alpha_sweep.csv");
        write_sweep_csv(alpha_sweep(nn, sweep_alphas), sweep_path);
        ctx.produced(sweep_path);
    }
    if (generated.has_source_ids() && training.has_source_ids()) {
        const auto montage_path = ctx.output("montage_pairs.csv");
        write_montage_manifest(report, generated, training, montage_path);
        ctx.produced(montage_path);
    }
    ctx.out << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// analyze / loocv shared

struct MeasuredCombo {
    std::string name;
    std::vector<std::size_t> level_sizes;
    std::vector<ReplicationPoint> points;
};

std::vector<MeasuredCombo> measure_manifest(const ExperimentManifest& m, const Context& ctx) {
    std::map<fs::path, std::shared_ptr<const VectorDataset>> cache;
    auto load = [&](const fs::path& p) {
        auto it = cache.find(p);
        if (it != cache.end()) return it->second;
        std::error_code ec;
        if (!fs::exists(p, ec)) throw InvalidInput("missing file: " + p.string());
        auto ds = std::make_shared<const VectorDataset>(read_vds(p));
        cache.emplace(p, ds);
        return ds;
    };

    PointOptions opts;
    opts.id.k1 = m.k1;
    opts.id.k2 = m.k2;
    opts.id_resolution = m.id_resolution;
    opts.threads = ctx.global.threads;

    std::vector<MeasuredCombo> measured;
    for (const auto& combo : m.combos) {
        MeasuredCombo mc{combo.name, {}, {}};
        for (const auto& level : combo.levels) {
            const auto training = load(level.training_path);
            const auto generated = load(level.generated_path);
            check_spaces(*training, *generated);
            const double alpha =
                resolve_alpha(m.alpha_given ? std::optional(m.alpha) : std::nullopt, *training,
                              *generated);
            if (training->count() != level.size) {
                ctx.warn("combo '" + combo.name + "': level size " + std::to_string(level.size) +
                         " differs from training row count " + std::to_string(training->count()) +
                         "; using the row count as dataset size");
            }
            check_generated_count(ctx, *generated);
            const ExperimentLevel exp{training.get(), generated.get(), alpha};
            Warnings w;
            const auto pts = sample_replication_points(std::span(&exp, 1), opts, &w);
            for (auto& msg : w) ctx.warn("combo '" + combo.name + "': " + msg);
            mc.level_sizes.push_back(level.size);
            mc.points.push_back(pts.front());
        }
        measured.push_back(std::move(mc));
    }
    return measured;
}

std::vector<ComboRecord> to_records(const std::vector<MeasuredCombo>& measured) {
    std::vector<ComboRecord> records;
    for (const auto& mc : measured) records.push_back(ComboRecord::make(mc.name, mc.points));
    return records;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
    std::string manifest;
    std::size_t curve_samples = 101;
};

void cmd_analyze(const AnalyzeArgs& a, const Context& ctx) {
    if (a.curve_samples < 2) throw UsageError("--curve-samples must be >= 2");
    const auto manifest = ExperimentManifest::load(a.manifest);
    const auto measured = measure_manifest(manifest, ctx);

    const auto points_path = ctx.output("points.csv");
    {
        std::ofstream csv(points_path);
        if (!csv) throw Error("cannot open " + points_path.string() + " for writing");
        csv << std::setprecision(6) << "combo,level_size,mu1,mu2,replication_pct\n";
        for (const auto& mc : measured) {
            for (std::size_t i = 0; i < mc.points.size(); ++i) {
                const auto& p = mc.points[i];
                csv << csv_field(mc.name) << ',' << mc.level_sizes[i] << ',' << p.mu1 << ','
                    << p.mu2 << ',' << p.percentage << '\n';
            }
        }
        if (!csv) throw Error("failed writing " + points_path.string());
    }
    ctx.produced(points_path);

    json doc{{"alpha", manifest.alpha_given ? json(manifest.alpha) : json(kDefaultAlpha)},
             {"resolution", manifest.resolution},
             {"id_resolution", manifest.id_resolution},
             {"k1", manifest.k1},
             {"k2", manifest.k2},
             {"seed", manifest.seed},
             {"combos", json::array()}};

    for (const auto& mc : measured) {
        json entry{{"name", mc.name}, {"points", json::array()}};
        for (std::size_t i = 0; i < mc.points.size(); ++i) {
            const auto& p = mc.points[i];
            entry["points"].push_back({{"level_size", mc.level_sizes[i]},
                                       {"mu1", p.mu1},
                                       {"mu2", p.mu2},
                                       {"replication_pct", p.percentage}});
        }

        if (mc.points.size() < 2) {
            ctx.warn("combo '" + mc.name + "' has a single level; no fit");
            doc["combos"].push_back(std::move(entry));
            continue;
        }
        const auto record = ComboRecord::make(mc.name, mc.points);
        try {
            const auto decay = fit_f1(record.id_replication());
            const auto growth = fit_g(record.id_size());
            const CompositeModel model{decay, growth};

            std::vector<double> observed, predicted;
            for (const auto& p : record.points) {
                observed.push_back(p.percentage);
                predicted.push_back(eval_f2(model, p.mu2));
            }
            const double r2_f2 = r_squared(observed, predicted);
            entry["fits"] = json::array(
                {decay_json(decay), growth_json(growth),
                 composite_json(model, r2_f2, record.points.size())});

            const auto [mu_lo, mu_hi] = std::minmax_element(
                record.points.begin(), record.points.end(),
                [](const auto& l, const auto& r) { return l.mu1 < r.mu1; });
            const std::string stem = "curves/" + safe_name(mc.name);
            const auto f1_path = ctx.output(stem + "_f1.csv");
            write_curve_csv(sample_curve([&](double x) { return eval_f1(decay, x); }, mu_lo->mu1,
                                         mu_hi->mu1, a.curve_samples),
                            f1_path);
            const auto g_path = ctx.output(stem + "_g.csv");
            write_curve_csv(sample_curve([&](double x) { return eval_g(growth, x); }, mu_lo->mu1,
                                         mu_hi->mu1, a.curve_samples),
                            g_path);
            const auto f2_path = ctx.output(stem + "_f2.csv");
            write_curve_csv(sample_curve([&](double n) { return eval_f2(model, n); },
                                         record.points.front().mu2, record.points.back().mu2,
                                         a.curve_samples, true),
                            f2_path);
            for (const auto& p : {f1_path, g_path, f2_path}) ctx.produced(p);
        } catch (const DegenerateData& e) {
            ctx.warn("combo '" + mc.name + "': no fit (" + e.what() + ")");
        }
        doc["combos"].push_back(std::move(entry));
    }

    const auto fits_path = ctx.output("fits.json");
    write_json(fits_path, doc);
    ctx.produced(fits_path);
    ctx.out << "analyzed " << measured.size() << " combos; wrote " << fits_path.string() << '\n';
}

// ---------------------------------------------------------------------------
// loocv

struct LoocvArgs {
    std::string manifest;
    std::string from_analysis;
    std::string mode = "one-shot";
};

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

std::vector<ComboRecord> records_from_analysis(const json& doc) {
    std::vector<ComboRecord> records;
    try {
        for (const auto& c : doc.at("combos")) {
            std::vector<ReplicationPoint> pts;
            for (const auto& p : c.at("points")) {
                pts.push_back({p.at("mu1").get<double>(), p.at("mu2").get<double>(),
                               p.at("replication_pct").get<double>()});
            }
            records.push_back(ComboRecord::make(c.at("name").get<std::string>(), std::move(pts)));
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed analysis file: ") + e.what());
    }
    return records;
}

void cmd_loocv(const LoocvArgs& a, const Context& ctx) {
    if (a.manifest.empty() == a.from_analysis.empty()) {
        throw UsageError("loocv takes either a manifest or --from-analysis FILE");
    }
    const auto mode = *prediction_mode_from_string(a.mode);
    std::vector<ComboRecord> records;
    if (!a.manifest.empty()) {
        records = to_records(measure_manifest(ExperimentManifest::load(a.manifest), ctx));
    } else {
        records = records_from_analysis(load_json_file(a.from_analysis));
    }

    const auto reports = loocv(records, mode);
    const auto path = ctx.output("loocv.csv");
    write_loocv_csv(reports, path);
    ctx.produced(path);
    std::ifstream echo(path);
    ctx.out << echo.rdbuf();
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
    std::optional<double> shared_a;
    std::optional<double> shared_c;
    std::string fits;
    std::vector<std::string> exclude;
    std::string combo;
    std::vector<std::string> points;
    std::optional<double> growth_s;
    std::optional<double> growth_beta;
    std::vector<std::string> growth_points;
    std::optional<double> pct_for_id;
    std::optional<double> pct_for_size;
    std::optional<double> size_for_pct;
};

void cmd_predict(const PredictArgs& a, const Context& ctx) {
    const int queries = int(a.pct_for_id.has_value()) + int(a.pct_for_size.has_value()) +
                        int(a.size_for_pct.has_value());
    if (queries != 1) {
        throw UsageError("give exactly one of --pct-for-id, --pct-for-size, --size-for-pct");
    }
    if (a.points.empty() || a.points.size() > 2) {
        throw UsageError("give one (one-shot) or two (two-shot) --point MU1:PCT values");
    }
    if (a.shared_a.has_value() != a.shared_c.has_value()) {
        throw UsageError("--shared-a and --shared-c must be given together");
    }
    if (!a.shared_a && a.fits.empty()) {
        throw UsageError("shared (a, c) need --shared-a/--shared-c or --fits to pool from");
    }
    const bool explicit_growth = a.growth_s.has_value() || a.growth_beta.has_value();
    if (a.growth_s.has_value() != a.growth_beta.has_value()) {
        throw UsageError("--growth-s and --growth-beta must be given together");
    }
    const int growth_sources = int(explicit_growth) + int(!a.growth_points.empty()) +
                               int(!a.combo.empty() && !a.fits.empty());
    if (growth_sources > 1) throw UsageError("conflicting growth model sources");
    if (!a.combo.empty() && a.fits.empty()) throw UsageError("--combo requires --fits");
    const bool needs_growth = !a.pct_for_id.has_value();
    if (needs_growth && growth_sources == 0) {
        throw UsageError("size queries need a growth model: --growth-s/--growth-beta, "
                         "--growth-point MU1:SIZE (x2+), or --fits with --combo");
    }

    std::vector<XY> pts;
    for (const auto& p : a.points) pts.push_back(parse_pair(p, "--point"));
    std::vector<XY> growth_pts;
    for (const auto& p : a.growth_points) growth_pts.push_back(parse_pair(p, "--growth-point"));

    json fits_doc;
    if (!a.fits.empty()) fits_doc = load_json_file(a.fits);

    SharedParams shared{0.0, 0.0};
    if (a.shared_a) {
        shared = {*a.shared_a, *a.shared_c};
    } else {
        std::vector<DecayFit> pool;
        for (const auto& c : fits_doc.value("combos", json::array())) {
            const auto name = c.value("name", std::string{});
            if (name == a.combo ||
                std::find(a.exclude.begin(), a.exclude.end(), name) != a.exclude.end()) {
                continue;
            }
            for (const auto& f : c.value("fits", json::array())) {
                if (f.value("model", "") == "f1") pool.push_back(decay_from_json(f));
            }
        }
        if (pool.empty()) throw InvalidInput("no f1 fits to pool in " + a.fits);
        shared = pool_shared_params(pool);
    }

    const double b = pts.size() == 1 ? one_shot_b(shared.a, shared.c, pts[0])
                                     : two_shot_b(shared.a, shared.c, pts[0], pts[1]);
    const auto decay = DecayFit::from_parameters(shared.a, b, shared.c);

    json result{{"mode", pts.size() == 1 ? "one-shot" : "two-shot"}, {"decay", decay_json(decay)}};

    if (a.pct_for_id) {
        result["query"] = "pct_for_id";
        result["input"] = *a.pct_for_id;
        result["value"] = eval_f1(decay, *a.pct_for_id);
    } else {
        GrowthFit growth;
        if (explicit_growth) {
            growth.s = *a.growth_s;
            growth.beta = *a.growth_beta;
        } else if (!growth_pts.empty()) {
            growth = fit_g(growth_pts);
        } else {
            bool found = false;
            for (const auto& c : fits_doc.value("combos", json::array())) {
                if (c.value("name", std::string{}) != a.combo) continue;
                for (const auto& f : c.value("fits", json::array())) {
                    if (f.value("model", "") == "g") {
                        growth = growth_from_json(f);
                        found = true;
                    }
                }
            }
            if (!found) throw InvalidInput("no growth fit for combo '" + a.combo + "' in " + a.fits);
        }
        if (!(growth.s > 0.0)) throw InvalidInput("growth scale s must be > 0");
        const CompositeModel model{decay, growth};
        result["growth"] = growth_json(growth);
        if (a.pct_for_size) {
            result["query"] = "pct_for_size";
            result["input"] = *a.pct_for_size;
            result["value"] = eval_f2(model, *a.pct_for_size);
        } else {
            result["query"] = "size_for_pct";
            result["input"] = *a.size_for_pct;
            result["value"] = invert_f2(model, *a.size_for_pct);
        }
    }

    const auto path = ctx.output("predict.json");
    write_json(path, result);
    ctx.produced(path);
    ctx.out << result.dump(2) << '\n';
}

}  // namespace

RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunResult result;
    GlobalOptions global;

    CLI::App app{"Measure GAN training-data replication and predict minimal dataset sizes",
                 "repliscope"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--threads", global.threads, "Worker threads (0 = auto)");
    app.add_option("--out-dir", global.out_dir, "Directory for output artifacts");
    app.add_option("--seed", global.seed, "Seed for randomized steps");

    PreprocessArgs pre;
    auto* sc_pre = app.add_subcommand("preprocess", "Images -> VDS (center crop, bilinear resize)");
    sc_pre->add_option("in_dir", pre.in_dir, "Image directory")->required();
    sc_pre->add_option("out_vds", pre.out_vds, "Output VDS file")->required();
    sc_pre->add_option("--resolution", pre.resolution, "Square output side in pixels");
    sc_pre->add_option("--id-resolution", pre.id_resolution, "Side used for ID estimation");
    sc_pre->add_flag("--zscore", pre.zscore, "Per-channel z-score (writes a stats sidecar)");
    sc_pre->add_option("--subsample", pre.subsample, "Keep N random rows (uses --seed)");

    IdArgs id;
    auto* sc_id = app.add_subcommand("id", "Maximum-likelihood intrinsic dimensionality");
    sc_id->add_option("vds", id.vds, "Input VDS file")->required();
    sc_id->add_option("--k1", id.k1, "Smallest neighborhood size");
    sc_id->add_option("--k2", id.k2, "Largest neighborhood size");
    sc_id->add_option("--id-resolution", id.id_resolution, "Downscale pixel rows to this side");
    sc_id->add_flag("--full-res", id.full_res, "Estimate at native dimension");
    sc_id->add_option("--duplicates", id.duplicates, "Duplicate-row policy")
        ->check(CLI::IsMember({"warn", "error"}));
    sc_id->add_option("--per-point-csv", id.per_point_csv, "Write per-point m_hat means");

    ReplicationArgs rep;
    auto* sc_rep = app.add_subcommand("replication", "Replication percentage at threshold alpha");
    sc_rep->add_option("training_vds", rep.training_vds, "Training VDS")->required();
    sc_rep->add_option("generated_vds", rep.generated_vds, "Generated VDS")->required();
    sc_rep->add_option("--alpha", rep.alpha, "Distance threshold (default 8000 for 128x128x3)");
    sc_rep->add_option("--sweep", rep.sweep, "Comma-separated ascending alphas");

    AnalyzeArgs ana;
    auto* sc_ana = app.add_subcommand("analyze", "Measure every level and fit f1, g, f2");
    sc_ana->add_option("manifest", ana.manifest, "Experiment manifest (JSON)")->required();
    sc_ana->add_option("--curve-samples", ana.curve_samples, "Points per emitted curve");

    PredictArgs pr;
    auto* sc_pr = app.add_subcommand("predict", "One/two-shot prediction from shared (a, c)");
    sc_pr->add_option("--shared-a", pr.shared_a, "Shared decay base a");
    sc_pr->add_option("--shared-c", pr.shared_c, "Shared translation c");
    sc_pr->add_option("--fits", pr.fits, "fits.json from analyze (pool a, c from it)");
    sc_pr->add_option("--exclude", pr.exclude, "Combo names left out of pooling");
    sc_pr->add_option("--combo", pr.combo, "Combo in --fits whose g fit to use");
    sc_pr->add_option("--point", pr.points, "Measured MU1:PCT (once or twice)");
    sc_pr->add_option("--growth-s", pr.growth_s, "Growth scale s");
    sc_pr->add_option("--growth-beta", pr.growth_beta, "Growth rate beta");
    sc_pr->add_option("--growth-point", pr.growth_points, "MU1:SIZE pairs to fit g from");
    sc_pr->add_option("--pct-for-id", pr.pct_for_id, "Predict replication % at this ID");
    sc_pr->add_option("--pct-for-size", pr.pct_for_size, "Predict replication % at this size");
    sc_pr->add_option("--size-for-pct", pr.size_for_pct, "Dataset size reaching this %");

    LoocvArgs lo;
    auto* sc_lo = app.add_subcommand("loocv", "Leave-one-combo-out prediction errors");
    sc_lo->add_option("manifest", lo.manifest, "Experiment manifest (JSON)");
    sc_lo->add_option("--from-analysis", lo.from_analysis, "fits.json written by analyze");
    sc_lo->add_option("--mode", lo.mode, "one-shot | two-shot | full")
        ->check(CLI::IsMember({"one-shot", "two-shot", "full"}));

    auto* sc_ver = app.add_subcommand("version", "Print the version");

    std::vector<const char*> argv{"repliscope"};
    for (const auto& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return result;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        result.exit_code = kExitUsage;
        return result;
    }

    const Context ctx{global, out, result};
    try {
        if (sc_pre->parsed()) cmd_preprocess(pre, ctx);
        else if (sc_id->parsed()) cmd_id(id, ctx);
        else if (sc_rep->parsed()) cmd_replication(rep, ctx);
        else if (sc_ana->parsed()) cmd_analyze(ana, ctx);
        else if (sc_pr->parsed()) cmd_predict(pr, ctx);
        else if (sc_lo->parsed()) cmd_loocv(lo, ctx);
        else if (sc_ver->parsed()) out << kVersion << '\n';
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        result.exit_code = kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitComputation;
    }
    for (const auto& w : result.log) err << "warning: " << w << '\n';
    if (result.exit_code != kExitOk) result.artifacts.clear();
    return result;
}

}  // namespace repliscope::cli
