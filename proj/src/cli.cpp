#include "topoclass/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "topoclass/data.hpp"
#include "topoclass/io.hpp"
#include "topoclass/isomap.hpp"
#include "topoclass/network.hpp"
#include "topoclass/svg.hpp"
#include "topoclass/topology.hpp"
#include "topoclass/training.hpp"

namespace topoclass::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Shared {
    std::uint64_t seed = 7;
    fs::path out_dir = ".";
    std::string format = "json";
};

fs::path resolve(const Shared& shared, const fs::path& p) {
    return p.is_absolute() ? p : shared.out_dir / p;
}

std::string join_doubles(const Vector& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += io::format_double(v[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    bool annulus = false;
    bool shells = false;
    std::size_t samples = 500;
    std::size_t dim = 2;
    std::size_t classes = 2;
    double inner = 0.9;
    double outer_min = 1.0;
    double outer_max = 2.0;
    fs::path output;
};

int cmd_gen(const Shared& shared, const GenArgs& a, std::ostream& out) {
    ShellSpec spec;
    spec.dim = a.shells ? a.dim : 2;
    spec.inner_max_radius = a.inner;
    spec.outer_min_radius = a.outer_min;
    spec.outer_max_radius = a.outer_max;
    spec.samples_per_class = a.samples;
    spec.seed = shared.seed;
    if (a.classes < 2) throw SpecError("--classes must be at least 2");
    if (!(0.0 < spec.inner_max_radius && spec.inner_max_radius < spec.outer_min_radius &&
          spec.outer_min_radius <= spec.outer_max_radius)) {
        throw SpecError("radii must satisfy 0 < inner < outer-min <= outer-max");
    }
    const LabeledPointCloud cloud =
        gen_concentric(spec.dim, shell_bands(spec, a.classes), spec.samples_per_class, spec.seed);

    const fs::path path = resolve(shared, a.output);
    if (shared.format == "csv")
        io::write_text(path, cloud_to_csv(cloud));
    else
        save_cloud(cloud, path);

    out << "wrote " << cloud.size() << " points in R^" << cloud.dim << " to " << path.string() << "\n";
    for (std::size_t c = 0; c < cloud.class_count; ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (cloud.labels[i] != c) continue;
            const double r = norm(cloud.points[i]);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ++count;
        }
        out << "  class " << c << ": " << count << " points, norm in [" << lo << ", " << hi << "]\n";
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    fs::path data;
    bool paper_net = false;
    std::vector<std::size_t> dims;
    double lr = 0.05;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double target = 0.999;
    fs::path model = "model.json";
    fs::path history = "history.csv";
};

TrainConfig make_config(double lr, std::size_t epochs, std::size_t batch, double target, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.target_accuracy = target;
    cfg.seed = seed;
    return cfg;
}

int cmd_train(const Shared& shared, const TrainArgs& a, std::ostream& out) {
    const LabeledPointCloud cloud = load_cloud(a.data);
    std::vector<std::size_t> dims = a.paper_net || a.dims.empty() ? kPaperNetDims : a.dims;
    if (dims.size() < 2) throw ConfigError("--dims needs at least an input and an output width");
    if (dims.front() != cloud.dim)
        throw ConfigError("architecture input width " + std::to_string(dims.front()) +
                          " does not match data dimension " + std::to_string(cloud.dim));
    if (dims.back() != cloud.class_count)
        throw ConfigError("architecture output width " + std::to_string(dims.back()) +
                          " does not match class count " + std::to_string(cloud.class_count));

    Rng rng(shared.seed);
    const Mlp net = build_mlp(dims, rng);
    const auto result = train(net, cloud, make_config(a.lr, a.epochs, a.batch_size, a.target, shared.seed));

    save_mlp(result.net, resolve(shared, a.model));
    io::write_text(resolve(shared, a.history), history_to_csv(result.history));
    const auto& last = result.history.epochs.back();
    out << "trained " << result.net.layer_count() << " layers for " << result.history.epochs.size()
        << " epochs: loss " << last.loss << ", accuracy " << last.accuracy << "\n";
    if (!result.reached_target) {
        out << "target accuracy " << a.target << " not reached\n";
        return kQualityFailure;
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

struct TraceArgs {
    fs::path model;
    fs::path data;
    std::size_t neighbors = 10;
    bool pre_activation = false;
    fs::path index = "trace.json";
};

// Isomap with the requested k, doubling it until the kNN graph is connected.
EmbeddingResult connected_isomap(const std::vector<Vector>& points, std::size_t k) {
    const std::size_t cap = points.size() - 1;
    k = std::min(k, cap);
    for (;;) {
        try {
            return isomap(points, {k, 3, false});
        } catch (const DisconnectedError&) {
            if (k == cap) throw;
            k = std::min(cap, 2 * k);
        }
    }
}

std::string stage_file_name(std::size_t index, const std::string& name) {
    return "stage_" + std::to_string(index) + "_" + name + ".svg";
}

int cmd_trace(const Shared& shared, const TraceArgs& a, std::ostream& out) {
    const Mlp net = load_mlp(a.model);
    const LabeledPointCloud cloud = load_cloud(a.data);
    if (cloud.dim != net.input_dim())
        throw ConfigError("data dimension " + std::to_string(cloud.dim) + " does not match model input " +
                          std::to_string(net.input_dim()));
    if (cloud.size() < 3) throw ConfigError("tracing needs at least three points");
    const ActivationTrace trace = forward_trace(net, cloud, {a.pre_activation});

    json stages = json::array();
    for (std::size_t s = 0; s < trace.stages.size(); ++s) {
        const auto& stage = trace.stages[s];
        json entry;
        entry["index"] = s;
        entry["name"] = stage.name;
        entry["dim"] = stage.dim();
        entry["points"] = stage.points;
        const std::size_t diag_k = std::min(a.neighbors, cloud.size() - 1);
        entry["diagnostics"] = diagnostics_to_json(diagnose_stage(stage.points, trace.labels, trace.class_count, diag_k));

        std::vector<Vector> drawn = stage.points;
        std::string title = stage.name + " (R^" + std::to_string(stage.dim()) + ")";
        if (stage.dim() > 3) {
            const auto embedding = connected_isomap(stage.points, a.neighbors);
            drawn = embedding.coordinates;
            entry["projected"] = true;
            entry["isomap"] = {{"neighbors", embedding.neighbors},
                               {"eigenvalues", embedding.eigenvalues},
                               {"stress", embedding.stress},
                               {"clamped_negative", embedding.clamped_negative}};
            entry["embedding"] = embedding.coordinates;
            title += ", Isomap to R^3 (k=" + std::to_string(embedding.neighbors) + ")";
        } else {
            entry["projected"] = false;
        }
        auto scene = svg::scatter(drawn, trace.labels, title);
        if (drawn.front().size() == 3) scene.annotations.push_back("orthographic (x, y); radius encodes z");
        const std::string file = stage_file_name(s, stage.name);
        io::write_text(resolve(shared, file), svg::render(scene));
        entry["svg"] = file;
        stages.push_back(std::move(entry));
    }
    json index;
    index["labels"] = trace.labels;
    index["class_count"] = trace.class_count;
    index["stage_dims"] = json::array();
    for (const auto& st : trace.stages) index["stage_dims"].push_back(st.dim());
    index["stages"] = std::move(stages);
    io::write_json(resolve(shared, a.index), index);
    out << "traced " << trace.stages.size() << " stages; index at " << resolve(shared, a.index).string() << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// check-sep
// ---------------------------------------------------------------------------

struct CheckArgs {
    fs::path model;
    fs::path data;
    fs::path output = "separability.json";
};

int cmd_check_sep(const Shared& shared, const CheckArgs& a, std::ostream& out) {
    const Mlp net = load_mlp(a.model);
    const LabeledPointCloud cloud = load_cloud(a.data);
    if (cloud.dim != net.input_dim()) throw ConfigError("data dimension does not match model input");
    const SeparabilityReport report = check_separation(net, cloud);
    const fs::path path = resolve(shared, a.output);
    if (shared.format == "csv") {
        std::ostringstream csv;
        csv << "index,assigned,label\n";
        for (const auto& v : report.violating_points)
            csv << v.index << ',' << (v.assigned ? std::to_string(*v.assigned) : "boundary") << ',' << v.label << '\n';
        io::write_text(path, csv.str());
    } else {
        io::write_json(path, report_to_json(report));
    }
    out << "voronoi criterion: " << (report.voronoi_ok ? "satisfied" : "violated") << " ("
        << report.violating_points.size() << " violating points)\n";
    out << "disc certificate: " << (report.disc_ok.value_or(false) ? "disjoint" : "not disjoint") << "\n";
    return report.voronoi_ok ? kSuccess : kQualityFailure;
}

// ---------------------------------------------------------------------------
// witness
// ---------------------------------------------------------------------------

struct WitnessArgs {
    fs::path model;
    double inner = 0.5;
    double outer = 1.5;
    fs::path output = "witness.json";
};

int cmd_witness(const Shared& shared, const WitnessArgs& a, std::ostream& out) {
    const Mlp net = load_mlp(a.model);
    const Matrix& w = net.layers().front().weight;
    KernelWitness witness;
    try {
        witness = kernel_witness(w, a.inner, a.outer);
    } catch (const NotApplicableError&) {
        out << "no bottleneck; theorem does not apply (first layer is " << w.rows() << "x" << w.cols() << ")\n";
        return kNotApplicable;
    }
    const WitnessImages images = witness_images(net, witness);
    json doc = witness_to_json(witness);
    doc["first_layer_shape"] = {w.rows(), w.cols()};
    doc["first_layer"] = {{"p1", images.first_layer_p1}, {"p2", images.first_layer_p2}, {"gap", images.first_layer_gap}};
    doc["output"] = {{"p1", images.output_p1}, {"p2", images.output_p2}, {"gap", images.output_gap}};
    doc["shared_image"] = images.output_p1;
    io::write_json(resolve(shared, a.output), doc);
    out << "witness: p1 = (" << join_doubles(witness.p1, ' ') << "), p2 = (" << join_doubles(witness.p2, ' ')
        << "), ||Net(p1) - Net(p2)|| = " << images.output_gap << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// sweep-bottleneck
// ---------------------------------------------------------------------------

struct SweepArgs {
    fs::path data;
    std::vector<std::size_t> widths{1, 2, 3, 4, 5};
    std::vector<std::size_t> tail{16, 16};
    std::size_t seeds = 5;
    double lr = 0.05;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double target = 0.999;
    double pass_accuracy = 0.99;
    fs::path output = "sweep.csv";
};

int cmd_sweep(const Shared& shared, const SweepArgs& a, std::ostream& out) {
    const LabeledPointCloud cloud = load_cloud(a.data);
    if (a.seeds < 1) throw ConfigError("--seeds must be at least 1");
    std::vector<std::size_t> widths = a.widths;
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());

    std::ostringstream csv;
    csv << "width,best_accuracy,runs_passing,runs,witness_gap,witness_p1,witness_p2\n";
    for (std::size_t width : widths) {
        if (width == 0) throw ConfigError("widths must be positive");
        std::vector<std::size_t> dims{cloud.dim, width};
        dims.insert(dims.end(), a.tail.begin(), a.tail.end());
        dims.push_back(cloud.class_count);

        double best = -1.0;
        std::optional<Mlp> best_net;
        std::size_t passing = 0;
        for (std::size_t s = 0; s < a.seeds; ++s) {
            const std::uint64_t seed = shared.seed + s;
            Rng rng(seed);
            auto result = train(build_mlp(dims, rng), cloud, make_config(a.lr, a.epochs, a.batch_size, a.target, seed));
            const double acc = result.history.epochs.back().accuracy;
            if (acc >= a.pass_accuracy) ++passing;
            if (acc > best) {
                best = acc;
                best_net = std::move(result.net);
            }
        }
        csv << width << ',' << io::format_double(best) << ',' << passing << ',' << a.seeds << ',';
        if (width < cloud.dim) {
            const auto witness = kernel_witness(best_net->layers().front().weight);
            const auto images = witness_images(*best_net, witness);
            csv << io::format_double(images.output_gap) << ',' << join_doubles(witness.p1, ';') << ','
                << join_doubles(witness.p2, ';');
        } else {
            csv << ",,";
        }
        csv << '\n';
        out << "width " << width << ": best accuracy " << best << ", " << passing << "/" << a.seeds
            << " runs >= " << a.pass_accuracy << "\n";
    }
    io::write_text(resolve(shared, a.output), csv.str());
    return kSuccess;
}

// ---------------------------------------------------------------------------
// isomap
// ---------------------------------------------------------------------------

struct IsomapArgs {
    fs::path data;
    std::size_t neighbors = 10;
    std::size_t target_dim = 3;
    bool restrict_largest = false;
    fs::path output = "embedding.json";
    fs::path svg_path;
};

int cmd_isomap(const Shared& shared, const IsomapArgs& a, std::ostream& out) {
    const LabeledPointCloud cloud = load_cloud(a.data);
    EmbeddingResult result;
    try {
        result = isomap(cloud.points, {a.neighbors, a.target_dim, a.restrict_largest});
    } catch (const DisconnectedError& e) {
        out << e.what() << "\nre-run with a larger --k or with --restrict-largest\n";
        return kNotApplicable;
    }
    const fs::path path = resolve(shared, a.output);
    if (shared.format == "csv")
        io::write_text(path, embedding_to_csv(result, &cloud.labels));
    else
        io::write_json(path, embedding_to_json(result, &cloud.labels));
    if (!a.svg_path.empty()) {
        std::vector<std::size_t> labels;
        for (std::size_t i : result.kept_indices) labels.push_back(cloud.labels[i]);
        auto scene = svg::scatter(result.coordinates, labels,
                                  "Isomap to R^" + std::to_string(a.target_dim) + " (k=" + std::to_string(a.neighbors) + ")");
        io::write_text(resolve(shared, a.svg_path), svg::render(scene));
    }
    out << "embedded " << result.coordinates.size() << " points, stress " << result.stress << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// urysohn
// ---------------------------------------------------------------------------

struct UrysohnArgs {
    fs::path data;
    double extent = 2.5;
    std::size_t grid = 101;
    fs::path prefix = "urysohn";
};

int cmd_urysohn(const Shared& shared, const UrysohnArgs& a, std::ostream& out) {
    const LabeledPointCloud cloud = load_cloud(a.data);
    if (cloud.dim != 2) {
        out << "urysohn maps are drawn for 2-D data only (data is " << cloud.dim << "-D)\n";
        return kNotApplicable;
    }
    if (a.grid < 2) throw ConfigError("--grid must be at least 2");
    if (!(a.extent > 0.0)) throw ConfigError("--extent must be positive");
    auto classes = cloud.by_class();
    std::function<double(std::span<const double>)> field;
    double gap = 0.0;
    if (cloud.class_count == 2) {
        auto f = urysohn_binary(classes[0], classes[1]);
        gap = f.set_gap();
        field = [f = std::move(f)](std::span<const double> x) { return f(x); };
    } else {
        auto f = urysohn_multiclass(classes);
        gap = f.min_gap();
        field = [f = std::move(f)](std::span<const double> x) { return f(x); };
    }
    const double top = static_cast<double>(cloud.class_count - 1);

    std::ostringstream grid_csv;
    grid_csv << "x,y,value\n";
    svg::Scene scene;
    scene.title = "Urysohn separator, " + std::to_string(cloud.class_count) + " classes";
    const double step = 2.0 * a.extent / static_cast<double>(a.grid - 1);
    for (std::size_t r = 0; r < a.grid; ++r) {
        for (std::size_t c = 0; c < a.grid; ++c) {
            const Vector x{-a.extent + step * static_cast<double>(c), -a.extent + step * static_cast<double>(r)};
            const double v = field(x);
            grid_csv << io::format_double(x[0]) << ',' << io::format_double(x[1]) << ',' << io::format_double(v) << '\n';
            scene.cells.push_back({x[0] - step / 2, x[1] - step / 2, x[0] + step / 2, x[1] + step / 2,
                                   svg::ramp_color(v / top)});
        }
    }

    std::ostringstream samples_csv;
    samples_csv << "index,label,value\n";
    std::vector<double> lo(cloud.class_count, std::numeric_limits<double>::infinity());
    std::vector<double> hi(cloud.class_count, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double v = field(cloud.points[i]);
        const std::size_t l = cloud.labels[i];
        lo[l] = std::min(lo[l], v);
        hi[l] = std::max(hi[l], v);
        samples_csv << i << ',' << l << ',' << io::format_double(v) << '\n';
        scene.marks.push_back({cloud.points[i][0], cloud.points[i][1], 1.2, svg::label_color(l)});
    }
    bool in_discs = true;
    json per_class = json::array();
    for (std::size_t k = 0; k < cloud.class_count; ++k) {
        const double target = static_cast<double>(k);
        const bool ok = lo[k] >= target - kUrysohnTargetRadius && hi[k] <= target + kUrysohnTargetRadius;
        in_discs = in_discs && ok;
        per_class.push_back({{"class", k}, {"min", lo[k]}, {"max", hi[k]}, {"within_target", ok}});
    }
    scene.annotations.push_back("grid " + std::to_string(a.grid) + "x" + std::to_string(a.grid) + " over [-" +
                                io::format_double(a.extent) + ", " + io::format_double(a.extent) + "]^2");

    const std::string prefix = a.prefix.string();
    io::write_text(resolve(shared, prefix + "_grid.csv"), grid_csv.str());
    io::write_text(resolve(shared, prefix + "_samples.csv"), samples_csv.str());
    io::write_text(resolve(shared, prefix + ".svg"), svg::render(scene));
    io::write_json(resolve(shared, prefix + ".json"), {{"class_count", cloud.class_count},
                                                        {"set_gap", gap},
                                                        {"target_radius", kUrysohnTargetRadius},
                                                        {"grid", a.grid},
                                                        {"extent", a.extent},
                                                        {"classes", per_class},
                                                        {"separated", in_discs}});
    out << "urysohn field: classes " << (in_discs ? "hit their targets" : "miss their targets")
        << ", set gap " << gap << "\n";
    return in_discs ? kSuccess : kQualityFailure;
}

void add_shared(CLI::App* cmd, Shared& shared) {
    cmd->add_option("--seed", shared.seed, "Seed for data generation, initialisation and shuffling")
        ->capture_default_str();
    cmd->add_option("--out-dir", shared.out_dir, "Directory for relative output paths")->capture_default_str();
    cmd->add_option("--format", shared.format, "Report format where a choice exists")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neural networks as topological classifiers: data, training, separability checks, "
                 "kernel witnesses, Isomap traces",
                 "topoclass"};
    app.require_subcommand(1);
    Shared shared;

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a ball/shell dataset");
    add_shared(gen_cmd, shared);
    auto* annulus_flag = gen_cmd->add_flag("--annulus", gen.annulus, "2-D annulus: ball r<=0.9 vs shell 1<=r<=2 (default)");
    gen_cmd->add_flag("--shells", gen.shells, "Ball/shell data in --dim dimensions")->excludes(annulus_flag);
    gen_cmd->add_option("--n", gen.samples, "Samples per class")->capture_default_str();
    gen_cmd->add_option("--dim", gen.dim, "Ambient dimension (with --shells)")->capture_default_str();
    gen_cmd->add_option("--classes", gen.classes, "Number of nested classes")->capture_default_str();
    gen_cmd->add_option("--inner", gen.inner, "Inner ball radius")->capture_default_str();
    gen_cmd->add_option("--outer-min", gen.outer_min, "Shell inner radius")->capture_default_str();
    gen_cmd->add_option("--outer-max", gen.outer_max, "Shell outer radius")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "Output dataset path")->required();

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a softmax MLP with SGD");
    add_shared(train_cmd, shared);
    train_cmd->add_option("data", tr.data, "Dataset JSON")->required();
    auto* paper_flag = train_cmd->add_flag("--paper-net", tr.paper_net, "2-5-5-2-2-2 ReLU + 2-2 softmax (default)");
    train_cmd->add_option("--dims", tr.dims, "Layer widths, e.g. 2,1,2")->delimiter(',')->excludes(paper_flag);
    train_cmd->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
    train_cmd->add_option("--epochs", tr.epochs, "Maximum epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--target", tr.target, "Early-stop training accuracy")->capture_default_str();
    train_cmd->add_option("--model", tr.model, "Model output path")->capture_default_str();
    train_cmd->add_option("--history", tr.history, "History CSV path")->capture_default_str();

    TraceArgs tc;
    auto* trace_cmd = app.add_subcommand("trace", "Trace activations and draw one SVG per stage");
    add_shared(trace_cmd, shared);
    trace_cmd->add_option("model", tc.model, "Model JSON")->required();
    trace_cmd->add_option("data", tc.data, "Dataset JSON")->required();
    trace_cmd->add_option("--k", tc.neighbors, "Isomap / component neighbourhood size")->capture_default_str();
    trace_cmd->add_flag("--pre-activation", tc.pre_activation, "Also record W x + b stages");
    trace_cmd->add_option("-o,--output", tc.index, "Index JSON path")->capture_default_str();

    CheckArgs ck;
    auto* check_cmd = app.add_subcommand("check-sep", "Check Voronoi and disc separation of a trained model");
    add_shared(check_cmd, shared);
    check_cmd->add_option("model", ck.model, "Model JSON")->required();
    check_cmd->add_option("data", ck.data, "Dataset JSON")->required();
    check_cmd->add_option("-o,--output", ck.output, "Report path")->capture_default_str();

    WitnessArgs wt;
    auto* witness_cmd = app.add_subcommand("witness", "Kernel witness for a bottleneck first layer");
    add_shared(witness_cmd, shared);
    witness_cmd->add_option("model", wt.model, "Model JSON")->required();
    witness_cmd->add_option("--inner", wt.inner, "Radius of p1 (<= 0.9)")->capture_default_str();
    witness_cmd->add_option("--outer", wt.outer, "Radius of p2 (in [1, 2])")->capture_default_str();
    witness_cmd->add_option("-o,--output", wt.output, "Witness JSON path")->capture_default_str();

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep-bottleneck", "Train with varying first-layer width");
    add_shared(sweep_cmd, shared);
    sweep_cmd->add_option("data", sw.data, "Dataset JSON")->required();
    sweep_cmd->add_option("--widths", sw.widths, "First-layer widths")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--tail", sw.tail, "Hidden widths after the first layer")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--seeds", sw.seeds, "Runs per width (seeds seed..seed+n-1)")->capture_default_str();
    sweep_cmd->add_option("--lr", sw.lr, "Learning rate")->capture_default_str();
    sweep_cmd->add_option("--epochs", sw.epochs, "Maximum epochs")->capture_default_str();
    sweep_cmd->add_option("--batch-size", sw.batch_size, "Mini-batch size")->capture_default_str();
    sweep_cmd->add_option("--target", sw.target, "Early-stop training accuracy")->capture_default_str();
    sweep_cmd->add_option("--pass-accuracy", sw.pass_accuracy, "Accuracy counted as passing")->capture_default_str();
    sweep_cmd->add_option("-o,--output", sw.output, "CSV path")->capture_default_str();

    IsomapArgs im;
    auto* isomap_cmd = app.add_subcommand("isomap", "Isomap embedding of a dataset");
    add_shared(isomap_cmd, shared);
    isomap_cmd->add_option("data", im.data, "Dataset JSON")->required();
    isomap_cmd->add_option("--k", im.neighbors, "Neighbourhood size")->capture_default_str();
    isomap_cmd->add_option("--dim", im.target_dim, "Target dimension")->capture_default_str();
    isomap_cmd->add_flag("--restrict-largest", im.restrict_largest, "Embed only the largest kNN component");
    isomap_cmd->add_option("-o,--output", im.output, "Embedding path")->capture_default_str();
    isomap_cmd->add_option("--svg", im.svg_path, "Also draw the embedding to this SVG");

    UrysohnArgs ur;
    auto* urysohn_cmd = app.add_subcommand("urysohn", "Sample the distance-ratio separator on a grid (2-D)");
    add_shared(urysohn_cmd, shared);
    urysohn_cmd->add_option("data", ur.data, "Dataset JSON")->required();
    urysohn_cmd->add_option("--extent", ur.extent, "Grid covers [-extent, extent]^2")->capture_default_str();
    urysohn_cmd->add_option("--grid", ur.grid, "Grid points per axis")->capture_default_str();
    urysohn_cmd->add_option("--prefix", ur.prefix, "Output file prefix")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsageError;
    }

    try {
        if (*gen_cmd) return cmd_gen(shared, gen, out);
        if (*train_cmd) return cmd_train(shared, tr, out);
        if (*trace_cmd) return cmd_trace(shared, tc, out);
        if (*check_cmd) return cmd_check_sep(shared, ck, out);
        if (*witness_cmd) return cmd_witness(shared, wt, out);
        if (*sweep_cmd) return cmd_sweep(shared, sw, out);
        if (*isomap_cmd) return cmd_isomap(shared, im, out);
        if (*urysohn_cmd) return cmd_urysohn(shared, ur, out);
    } catch (const NotApplicableError& e) {
        err << "not applicable: " << e.what() << "\n";
        return kNotApplicable;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kQualityFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace topoclass::cli
