#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mivkit/extraction.hpp"
#include "mivkit/layout.hpp"
#include "mivkit/measure.hpp"
#include "mivkit/model_io.hpp"
#include "mivkit/ppa.hpp"
#include "mivkit/simulator.hpp"
#include "mivkit/svg_plot.hpp"
#include "mivkit/text_util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace mivkit;

namespace {

constexpr const char* kVersion = "miv-cellkit 1.0.0 (curves v1, report v1)";

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitParse = 3;
constexpr int kExitFitQuality = 4;
constexpr int kExitConvergence = 5;

struct CliError : std::runtime_error {
    CliError(int code, std::string error_id, const std::string& msg)
        : std::runtime_error(msg), exit_code(code), id(std::move(error_id)) {}
    int exit_code;
    std::string id;
};

bool g_verbose = false;

void note(const std::string& msg) {
    if (g_verbose) std::fprintf(stderr, "[mivcellkit] %s\n", msg.c_str());
}

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw CliError(kExitInput, "E_INPUT", "missing input file '" + path + "'");
}

std::string out_path(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    return path;
}

std::string data_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("MIVCELLKIT_DATA_DIR")) return env;
    return "data";
}

const std::vector<std::pair<Variant, Polarity>>& device_ids() {
    static const std::vector<std::pair<Variant, Polarity>> ids = [] {
        std::vector<std::pair<Variant, Polarity>> v;
        for (Variant var : all_variants())
            for (Polarity pol : {Polarity::n, Polarity::p}) v.emplace_back(var, pol);
        return v;
    }();
    return ids;
}

std::string device_stem(Variant v, Polarity p) { return to_string(v) + "_" + to_string(p); }

int cmd_gen_synthetic(const std::string& data, const std::string& out_dir, double noise,
                      std::uint64_t seed) {
    fs::create_directories(out_dir);
    for (const auto& [variant, pol] : device_ids()) {
        const std::string card_path = data + "/fixtures/" + device_stem(variant, pol) + ".params";
        require_input(card_path);
        const ModelCard card = read_model_card(card_path);
        const CharacterizationSet set =
            generate_synthetic(card.params, card.consts, variant, noise, seed);
        const std::string out = out_dir + "/" + device_stem(variant, pol) + ".csv";
        write_curves(set, out);
        note("wrote " + out);
    }
    return kExitOk;
}

ordered_json report_to_json(const ExtractionReport& rep, const std::string& variant,
                            Polarity polarity) {
    ordered_json j;
    j["format"] = "miv-cellkit extraction report v1";
    j["variant"] = variant;
    j["polarity"] = to_string(polarity);
    j["errors_pct"] = {{"IDVG", rep.idvg_error_pct},
                       {"IDVD", rep.idvd_error_pct},
                       {"CV", rep.cv_error_pct}};
    const char* stage_names[] = {"low_drain", "high_drain", "capacitance"};
    ordered_json iters;
    for (size_t i = 0; i < rep.stage_iterations.size(); ++i)
        iters[stage_names[i]] = rep.stage_iterations[i];
    j["iterations"] = iters;
    ordered_json fitted;
    for (const auto& [name, field] : param_fields()) fitted[name] = rep.fitted.*field;
    j["fitted"] = fitted;
    j["warnings"] = rep.warnings;
    return j;
}

int cmd_extract(const std::string& data, const std::string& curves_path, std::string bounds_path,
                const std::string& report_path, const std::string& params_out, std::string variant,
                std::uint64_t seed) {
    require_input(curves_path);
    if (bounds_path.empty()) bounds_path = data + "/default.bounds";
    require_input(bounds_path);

    CharacterizationSet target = read_curves(curves_path);
    const ParamBounds bounds = read_bounds(bounds_path);
    if (variant.empty()) {
        variant = "traditional";  // fall back when the filename carries no hint
        const std::string stem = fs::path(curves_path).stem().string();
        for (Variant v : all_variants())
            if (stem.rfind(to_string(v) + "_", 0) == 0) variant = to_string(v);
    }
    target.variant = variant_from_string(variant);

    ModelConstants consts;  // process constants are fixed per the study
    ExtractionReport rep = extract(target, bounds, consts, seed);
    note("extracted in " + std::to_string(rep.wall_seconds) + " s, errors " +
         format_double(rep.idvg_error_pct) + "/" + format_double(rep.idvd_error_pct) + "/" +
         format_double(rep.cv_error_pct) + " %");

    write_file_atomic(out_path(report_path), report_to_json(rep, variant, target.polarity).dump(2) + "\n");
    if (!params_out.empty()) write_model_card({rep.fitted, consts}, out_path(params_out));

    const bool good =
        rep.idvg_error_pct < 10.0 && rep.idvd_error_pct < 10.0 && rep.cv_error_pct < 10.0;
    if (!good) {
        std::fprintf(stderr, "{\"error\":{\"code\":\"E_FIT_QUALITY\",\"message\":\"a region error is >= 10%%\"}}\n");
        return kExitFitQuality;
    }
    return kExitOk;
}

int cmd_area(const std::string& csv_out) {
    const LibraryAreaSummary summary = library_area_summary({});
    write_file_atomic(out_path(csv_out), area_csv(summary));
    for (size_t v = 0; v < all_variants().size(); ++v)
        note("avg reduction " + to_string(all_variants()[v]) + ": " +
             format_double(summary.avg_reduction_pct[v]) + " %");
    return kExitOk;
}

int cmd_simulate(const std::string& netlist_path, const std::string& waves_out, double dt,
                 double t_stop) {
    require_input(netlist_path);
    Netlist nl = parse_netlist(netlist_path);
    if (dt <= 0.0) dt = nl.tran_dt;
    if (t_stop <= 0.0) t_stop = nl.tran_stop;
    if (dt <= 0.0 || t_stop <= 0.0)
        throw CliError(kExitParse, "E_PARSE", "no .tran card and no --dt/--tstop given");

    TransientResult tr = transient(nl, t_stop, dt);
    std::string csv = "time_s";
    for (int n = 1; n < nl.node_count(); ++n) csv += "," + nl.node_names[n];
    csv += "\n";
    for (size_t i = 0; i < tr.time.size(); ++i) {
        csv += format_double(tr.time[i]);
        for (int n = 1; n < nl.node_count(); ++n) csv += "," + format_double(tr.node_v[n][i]);
        csv += "\n";
    }
    write_file_atomic(out_path(waves_out), csv);
    note("charge residual " + format_double(tr.charge_residual_rel));
    return kExitOk;
}

ModelSet load_models(const std::string& models_dir, const std::vector<Variant>& variants) {
    ModelSet models;
    std::set<std::pair<Variant, Polarity>> needed;
    for (Variant v : variants) {
        needed.insert({v, Polarity::n});
        needed.insert({Variant::traditional, Polarity::p});  // bottom layer
    }
    for (const auto& [variant, pol] : needed) {
        const std::string path = models_dir + "/" + device_stem(variant, pol) + ".params";
        require_input(path);
        ModelCard card = read_model_card(path);
        if (card.params.polarity != pol)
            throw CliError(kExitParse, "E_PARSE", path + ": polarity does not match its name");
        models.params[{variant, pol}] = card.params;
        models.consts = card.consts;
    }
    return models;
}

int cmd_ppa(const std::string& models_dir, const std::string& report_out, const std::string& csv_path,
            std::vector<std::string> cells, std::vector<std::string> variant_names, double dt,
            int jobs) {
    std::vector<Variant> variants;
    if (variant_names.empty())
        variants = all_variants();
    else
        for (const auto& name : variant_names) variants.push_back(variant_from_string(name));
    if (cells.empty())
        for (const auto& spec : cell_library()) cells.push_back(spec.name);
    else
        for (const auto& c : cells) cell_by_name(c);  // reject unknown names early

    const ModelSet models = load_models(models_dir, variants);
    SimSettings sim;
    sim.dt = dt;
    sim.jobs = jobs;
    PpaReport report = run_ppa(cells, variants, models, {}, sim);
    write_file_atomic(out_path(report_out), ppa_json(report));
    if (!csv_path.empty()) write_file_atomic(out_path(csv_path), ppa_csv(report));
    if (!report.diagnostics.empty()) {
        for (const auto& d : report.diagnostics) std::fprintf(stderr, "diagnostic: %s\n", d.c_str());
        throw CliError(kExitConvergence, "E_CONVERGENCE",
                       std::to_string(report.diagnostics.size()) + " cell/variant pairs failed");
    }
    return kExitOk;
}

PpaReport ppa_report_from_json(const std::string& path) {
    const ordered_json j = ordered_json::parse(read_file(path));
    PpaReport report;
    for (const auto& row : j.at("rows")) {
        PpaRow r;
        r.cell = row.at("cell").get<std::string>();
        r.variant = variant_from_string(row.at("variant").get<std::string>());
        r.delay_s = row.at("delay_s").get<double>();
        r.power_w = row.at("power_w").get<double>();
        r.cell_area_nm2 = row.at("cell_area_nm2").get<double>();
        r.substrate_nm2 = row.at("substrate_area_nm2").get<double>();
        report.rows.push_back(r);
    }
    return report;
}

int cmd_plot(const std::string& curves_path, const std::string& fit_path,
             const std::string& ppa_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (!ppa_path.empty()) {
        require_input(ppa_path);
        const PpaReport report = ppa_report_from_json(ppa_path);
        if (report.rows.empty()) throw CliError(kExitParse, "E_PARSE", "ppa report has no rows");
        for (const auto& f : write_ppa_plots(report, out_dir)) note("wrote " + out_dir + "/" + f);
        return kExitOk;
    }
    require_input(curves_path);
    require_input(fit_path);
    const CharacterizationSet reference = read_curves(curves_path);
    const ordered_json j = ordered_json::parse(read_file(fit_path));
    ModelParams fitted;
    fitted.polarity = polarity_from_string(j.at("polarity").get<std::string>());
    for (const auto& [name, field] : param_fields())
        fitted.*field = j.at("fitted").at(name).get<double>();
    ModelConstants consts;
    for (const auto& f : write_curve_plots(reference, fitted, consts, out_dir))
        note("wrote " + out_dir + "/" + f);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"device-to-standard-cell characterization toolchain"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int jobs = 0;
    std::string data_flag;
    app.add_option("--seed", seed, "seed for every random choice in the pipeline");
    app.add_option("--jobs", jobs, "worker cap for parallel sections (0 = all cores)");
    app.add_flag("--verbose", g_verbose, "progress notes on stderr");
    app.add_option("--data", data_flag, "data directory (default $MIVCELLKIT_DATA_DIR or ./data)");

    auto* gen = app.add_subcommand("gen-synthetic", "sample the shipped reference devices");
    std::string gen_out = "out/curves";
    double gen_noise = 0.01;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--noise", gen_noise, "relative noise sigma in [0, 0.1]");

    auto* ext = app.add_subcommand("extract", "fit model parameters to a curve file");
    std::string ext_curves, ext_bounds, ext_out = "report.json", ext_params, ext_variant;
    ext->add_option("--curves", ext_curves, "curve CSV")->required();
    ext->add_option("--bounds", ext_bounds, "bounds file (default <data>/default.bounds)");
    ext->add_option("--out", ext_out, "report JSON path");
    ext->add_option("--params-out", ext_params, "also write the fitted model card");
    ext->add_option("--variant", ext_variant, "variant label for the report");

    auto* area = app.add_subcommand("area", "cell area table for all cells and variants");
    std::string area_out = "area.csv";
    area->add_option("--out", area_out, "CSV path");

    auto* sim = app.add_subcommand("simulate", "transient analysis of a netlist file");
    std::string sim_netlist, sim_out = "waves.csv";
    double sim_dt = 0.0, sim_tstop = 0.0;
    sim->add_option("--netlist", sim_netlist, "netlist file")->required();
    sim->add_option("--out", sim_out, "waveform CSV path");
    sim->add_option("--dt", sim_dt, "time step override, s");
    sim->add_option("--tstop", sim_tstop, "stop time override, s");

    auto* ppa = app.add_subcommand("ppa", "simulate the cell library and report PPA");
    std::string ppa_models, ppa_out = "ppa.json", ppa_csv_path;
    std::vector<std::string> ppa_cells, ppa_variants;
    double ppa_dt = 1e-12;
    ppa->add_option("--models", ppa_models, "directory of fitted model cards")->required();
    ppa->add_option("--out", ppa_out, "report JSON path");
    ppa->add_option("--csv", ppa_csv_path, "also write the flat CSV table");
    ppa->add_option("--cells", ppa_cells, "cell filter")->delimiter(',');
    ppa->add_option("--variants", ppa_variants, "variant filter")->delimiter(',');
    ppa->add_option("--dt", ppa_dt, "time step, s");

    auto* plot = app.add_subcommand("plot", "SVG plots for curves or a PPA report");
    std::string plot_curves, plot_fit, plot_ppa, plot_out = "plots";
    plot->add_option("--curves", plot_curves, "reference curve CSV");
    plot->add_option("--fit", plot_fit, "extraction report JSON");
    plot->add_option("--ppa", plot_ppa, "ppa report JSON");
    plot->add_option("--out", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string data = data_dir(data_flag);
        if (gen->parsed()) return cmd_gen_synthetic(data, gen_out, gen_noise, seed);
        if (ext->parsed())
            return cmd_extract(data, ext_curves, ext_bounds, ext_out, ext_params, ext_variant, seed);
        if (area->parsed()) return cmd_area(area_out);
        if (sim->parsed()) return cmd_simulate(sim_netlist, sim_out, sim_dt, sim_tstop);
        if (ppa->parsed())
            return cmd_ppa(ppa_models, ppa_out, ppa_csv_path, ppa_cells, ppa_variants, ppa_dt, jobs);
        if (plot->parsed()) return cmd_plot(plot_curves, plot_fit, plot_ppa, plot_out);
    } catch (const CliError& e) {
        ordered_json err{{"error", {{"code", e.id}, {"message", e.what()}}}};
        std::printf("%s\n", err.dump().c_str());
        return e.exit_code;
    } catch (const ConvergenceError& e) {
        ordered_json err{{"error", {{"code", "E_CONVERGENCE"}, {"message", e.what()}}}};
        std::printf("%s\n", err.dump().c_str());
        return kExitConvergence;
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        const bool parse_like = msg.find(": ") != std::string::npos || msg.find("unknown") == 0;
        const bool missing = msg.find("cannot open") != std::string::npos;
        const char* code = missing ? "E_INPUT" : parse_like ? "E_PARSE" : "E_INTERNAL";
        ordered_json err{{"error", {{"code", code}, {"message", msg}}}};
        std::printf("%s\n", err.dump().c_str());
        return missing ? kExitInput : parse_like ? kExitParse : kExitInternal;
    }
    return kExitInternal;
}
