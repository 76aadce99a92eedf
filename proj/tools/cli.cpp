#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spiked/density.hpp"
#include "spiked/errors.hpp"
#include "spiked/montecarlo.hpp"
#include "spiked/numkit.hpp"
#include "spiked/spike_density.hpp"

namespace spiked::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kHistogramBins = 50;
constexpr double kDefaultZMin = 1e-4;
constexpr double kDefaultZMax = 1 - 1e-4;

// Bad arguments or unusable output paths; maps to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what_arg) : Error("ConfigError: " + what_arg) {}
};

bool is_config_error(const Error& e)
{
    return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnsupportedModel*>(&e) ||
           dynamic_cast<const ThetaZeroSingularity*>(&e) || dynamic_cast<const DomainError*>(&e) ||
           dynamic_cast<const InvalidCount*>(&e) || dynamic_cast<const UnknownFigure*>(&e);
}

SpikedModel model_of(const RunConfig& c)
{
    SpikedModel model;
    model.variant = variant_of(c.statistic);
    model.theta = c.theta;
    if (c.statistic == Statistic::nz1_asym && c.command != "simulate" && c.command != "validate") {
        model.n = std::max(c.n, 1);
        model.m = std::max(c.m, model.n);
        return model;
    }
    if (c.n <= 0) throw ConfigError("--n is required for statistic " + std::string(to_string(c.statistic)));
    if (c.m <= 0) throw ConfigError("--m is required for statistic " + std::string(to_string(c.statistic)));
    model.n = c.n;
    model.m = c.m;
    return model;
}

json model_json(const SpikedModel& model)
{
    json j;
    j["variant"] = std::string(to_string(model.variant));
    j["n"] = model.n;
    j["m"] = model.m;
    j["alpha"] = model.alpha();
    j["theta"] = model.theta;
    j["beta"] = model.beta();
    return j;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    file << text;
    if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

// Appends `suffix` before the extension of `path` ("a/b.csv" -> "a/b_hist.csv").
std::string sibling(const std::string& path, const std::string& suffix, const std::string& ext)
{
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? path.substr(0, dot) : path) + suffix + ext;
}

std::vector<double> grid_for(const RunConfig& c)
{
    const bool arcsine = is_arcsine_type(c.statistic);
    const double lo = c.z_min.value_or(arcsine ? 0.0 : kDefaultZMin);
    const double hi = c.z_max.value_or(arcsine ? 1.0 : kDefaultZMax);
    return density::make_grid(c.statistic, c.grid_points, lo, hi);
}

mc::SpikeVector spike_for(const RunConfig& c, const SpikedModel& model)
{
    mc::SpikeStyle style;
    if (c.spike == "first_basis") {
        style = mc::SpikeStyle::first_basis;
    } else if (c.spike == "random") {
        style = mc::SpikeStyle::random;
    } else {
        throw ConfigError("--spike must be first_basis or random");
    }
    return mc::make_spike(model.n, c.seed, style, model.variant == Variant::real);
}

void check_counts(const RunConfig& c)
{
    if (c.grid_points < 2) throw ConfigError("--grid-points must be at least 2");
    if (c.samples < 1) throw ConfigError("--samples must be at least 1");
}

int cmd_curve(const RunConfig& c, std::ostream& out, bool cumulative)
{
    const SpikedModel model = model_of(c);
    density::check_compatible(c.statistic, model);
    const auto grid = grid_for(c);
    const auto curve = density::evaluate_curve(c.statistic, model, grid, cumulative);
    const char* column = cumulative ? "cdf" : "density";
    if (c.format == "json") {
        json j;
        j["command"] = c.command;
        j["statistic"] = std::string(to_string(c.statistic));
        j["model"] = model_json(model);
        j["grid_points"] = c.grid_points;
        j["z"] = curve.z;
        j[column] = curve.value;
        write_text(c.output_path, dump(j), out);
        return kOk;
    }
    std::string text = std::string("z,") + column + "\n";
    for (std::size_t i = 0; i < curve.z.size(); ++i) {
        text += format_number(curve.z[i]) + "," + format_number(curve.value[i]) + "\n";
    }
    write_text(c.output_path, text, out);
    return kOk;
}

mc::SampleBatch simulate_batch(const RunConfig& c, const SpikedModel& model)
{
    return mc::sample_wishart(c.statistic, model, spike_for(c, model), c.seed,
                              static_cast<std::size_t>(c.samples), c.threads);
}

int cmd_simulate(const RunConfig& c, std::ostream& out)
{
    const SpikedModel model = model_of(c);
    const auto batch = simulate_batch(c, model);
    json meta;
    meta["artifact_version"] = std::string(kArtifactVersion);
    meta["statistic"] = std::string(to_string(c.statistic));
    meta["model"] = model_json(model);
    meta["spike"] = c.spike;
    meta["seed"] = c.seed;
    meta["count"] = batch.values.size();
    if (c.format == "json") {
        meta["values"] = batch.values;
        write_text(c.output_path, dump(meta), out);
        return kOk;
    }
    std::string text = "index,value\n";
    for (std::size_t i = 0; i < batch.values.size(); ++i) {
        text += std::to_string(i) + "," + format_number(batch.values[i]) + "\n";
    }
    write_text(c.output_path, text, out);
    if (!c.output_path.empty()) write_text(sibling(c.output_path, "", ".json"), dump(meta), out);
    return kOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out)
{
    const SpikedModel model = model_of(c);
    SpikedModel reference = model;
    if (c.model_theta) reference.theta = *c.model_theta;
    density::check_compatible(c.statistic, reference);
    const auto batch = simulate_batch(c, model);
    numkit::GofReport report;
    const density::Support sup = density::support_of(c.statistic);
    if (c.statistic == Statistic::nz1_asym) {
        const double th = reference.theta;
        report = numkit::ks_test(batch.values, [th](double v) { return density::cdf_nz1_asymptotic(th, v); },
                                 sup.lo, sup.hi);
    } else {
        const density::TabulatedCdf table(c.statistic, reference);
        report = numkit::ks_test(batch.values, [&table](double z) { return table(z); }, sup.lo, sup.hi);
    }
    json j;
    j["artifact_version"] = std::string(kArtifactVersion);
    j["statistic"] = std::string(to_string(c.statistic));
    j["sample_model"] = model_json(model);
    j["reference_model"] = model_json(reference);
    j["seed"] = c.seed;
    j["sample_count"] = report.sample_count;
    j["ks_statistic"] = report.ks_statistic;
    j["critical_value_1pct"] = report.critical_value_1pct;
    j["passed"] = report.passed;
    json hist = json::array();
    for (const auto& b : report.histogram) hist.push_back({{"left", b.left}, {"right", b.right}, {"density", b.density}});
    j["histogram"] = hist;
    json qq = json::array();
    for (const auto& q : report.qq) {
        qq.push_back({{"level", q.level}, {"theoretical", q.theoretical}, {"empirical", q.empirical}});
    }
    j["qq"] = qq;
    write_text(c.output_path, dump(j), out);
    return report.passed ? kOk : kValidationFailed;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    std::string text;
    for (std::size_t k = 0; k < header.size(); ++k) text += (k ? "," : "") + header[k];
    text += "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k) text += (k ? "," : "") + format_number(columns[k][i]);
        text += "\n";
    }
    return text;
}

int cmd_figure(const RunConfig& c, std::ostream& out)
{
    const FigureSpec fig = figure_spec(c.figure_id);
    if (c.output_path.empty()) throw ConfigError("figure needs --out for its table, histogram and metadata files");
    const double lo = c.z_min.value_or(fig.z_min);
    const double hi = c.z_max.value_or(fig.z_max);
    const auto grid = density::make_grid(fig.statistic, c.grid_points, lo, hi);
    const bool asymptotic = fig.statistic == Statistic::nz1_asym;

    std::vector<std::string> header{asymptotic ? "v" : "z"};
    std::vector<std::vector<double>> columns{grid};
    std::vector<std::string> hist_header;
    std::vector<std::vector<double>> hist_columns;
    json curves = json::array();

    if (asymptotic) {
        // One analytic c.d.f. per theta; empirical c.d.f.s of n Z1 per (n, theta).
        std::vector<double> thetas;
        for (const auto& curve : fig.curves) {
            if (std::find(thetas.begin(), thetas.end(), curve.model.theta) == thetas.end()) {
                thetas.push_back(curve.model.theta);
            }
        }
        for (double th : thetas) {
            std::vector<double> col;
            for (double v : grid) col.push_back(density::cdf_nz1_asymptotic(th, v));
            header.push_back("theta=" + format_number(th));
            columns.push_back(std::move(col));
        }
        hist_header.push_back("v");
        hist_columns.push_back(grid);
        for (const auto& curve : fig.curves) {
            RunConfig sim = c;
            sim.statistic = Statistic::nz1_asym;
            auto values = simulate_batch(sim, curve.model).values;
            std::sort(values.begin(), values.end());
            std::vector<double> col;
            for (double v : grid) {
                const auto k = std::upper_bound(values.begin(), values.end(), v) - values.begin();
                col.push_back(static_cast<double>(k) / static_cast<double>(values.size()));
            }
            hist_header.push_back(curve.label);
            hist_columns.push_back(std::move(col));
            curves.push_back({{"label", curve.label}, {"model", model_json(curve.model)}});
        }
    } else {
        std::vector<double> left;
        std::vector<double> right;
        for (int b = 0; b < kHistogramBins; ++b) {
            left.push_back(static_cast<double>(b) / kHistogramBins);
            right.push_back(static_cast<double>(b + 1) / kHistogramBins);
        }
        hist_header = {"bin_left", "bin_right"};
        hist_columns = {left, right};
        for (const auto& curve : fig.curves) {
            density::check_compatible(fig.statistic, curve.model);
            header.push_back(curve.label);
            columns.push_back(density::evaluate_curve(fig.statistic, curve.model, grid, false).value);
            RunConfig sim = c;
            sim.statistic = fig.statistic;
            const auto values = simulate_batch(sim, curve.model).values;
            std::vector<double> counts(kHistogramBins, 0.0);
            for (double v : values) counts[std::min(kHistogramBins - 1, static_cast<int>(v * kHistogramBins))] += 1;
            for (double& h : counts) h *= kHistogramBins / static_cast<double>(values.size());
            hist_header.push_back(curve.label);
            hist_columns.push_back(std::move(counts));
            curves.push_back({{"label", curve.label}, {"model", model_json(curve.model)}});
        }
    }

    write_text(c.output_path, csv_table(header, columns), out);
    write_text(sibling(c.output_path, "_hist", ".csv"), csv_table(hist_header, hist_columns), out);
    json meta;
    meta["artifact_version"] = std::string(kArtifactVersion);
    meta["figure"] = fig.id;
    meta["statistic"] = std::string(to_string(fig.statistic));
    meta["caption"] = fig.caption;
    meta["note"] = fig.note;
    meta["samples_per_curve"] = c.samples;
    meta["seed"] = c.seed;
    meta["curves"] = curves;
    write_text(sibling(c.output_path, "", ".json"), dump(meta), out);
    return kOk;
}

FigureSpec varying_n(std::string id, Statistic stat, Variant variant, int alpha, double theta, std::string caption)
{
    FigureSpec f;
    f.id = std::move(id);
    f.statistic = stat;
    f.caption = std::move(caption);
    f.note = "caption leaves the n values open; n = 3, 4, 5, 6, 7 are used";
    for (int n = 3; n <= 7; ++n) f.curves.push_back({"n=" + std::to_string(n), {n, n + alpha, theta, variant}});
    return f;
}

FigureSpec varying_theta(std::string id, Statistic stat, Variant variant, int n, int m,
                         const std::vector<double>& thetas, std::string caption, std::string note)
{
    FigureSpec f;
    f.id = std::move(id);
    f.statistic = stat;
    f.caption = std::move(caption);
    f.note = std::move(note);
    for (double th : thetas) f.curves.push_back({"theta=" + format_number(th), {n, m, th, variant}});
    return f;
}

}  // namespace

std::vector<std::string> figure_ids()
{
    return {"fig1", "fig3", "fig5", "fig6", "fig8", "fig11", "fig12", "fig14", "fig16"};
}

FigureSpec figure_spec(std::string_view id)
{
    const std::string theta_note = "caption leaves the theta values open; theta = 0.1, 1, 10 are used";
    if (id == "fig1") {
        return varying_n("fig1", Statistic::z1, Variant::complex, 2, 3.0,
                         "smallest-eigenvector projection Z1, different values of n with alpha = 2 and theta = 3");
    }
    if (id == "fig3") {
        return varying_theta("fig3", Statistic::z1, Variant::complex, 3, 5, {0.1, 1.0, 10.0},
                             "smallest-eigenvector projection Z1, different values of theta with alpha = 2 and n = 3",
                             theta_note);
    }
    if (id == "fig5") {
        FigureSpec f;
        f.id = "fig5";
        f.statistic = Statistic::nz1_asym;
        f.caption = "asymptotic c.d.f. of V = n Z1 against simulation, different values of n and theta with alpha = 2";
        f.note = "theta values are open in the caption; theta = 0.5, 1, 5 are used with n = 15, 25, 30";
        f.z_min = 0.0;
        f.z_max = 4.0;
        for (int n : {15, 25, 30}) {
            for (double th : {0.5, 1.0, 5.0}) {
                f.curves.push_back({"n=" + std::to_string(n) + " theta=" + format_number(th),
                                    {n, n + 2, th, Variant::complex}});
            }
        }
        return f;
    }
    if (id == "fig6") {
        return varying_n("fig6", Statistic::zn, Variant::complex, 2, 3.0,
                         "largest-eigenvector projection Zn, different values of n with alpha = 2 and theta = 3");
    }
    if (id == "fig8") {
        return varying_theta("fig8", Statistic::zn, Variant::complex, 3, 5, {0.1, 1.0, 10.0},
                             "largest-eigenvector projection Zn, different values of theta with alpha = 2 and n = 3",
                             theta_note);
    }
    if (id == "fig11") {
        return varying_n("fig11", Statistic::z2, Variant::complex, 1, 3.0,
                         "second-smallest projection Z2, different values of n with alpha = 1 and theta = 3");
    }
    if (id == "fig12") {
        return varying_theta("fig12", Statistic::w1_real, Variant::real, 2, 5, {0.0, 0.5, 2.0},
                             "real smallest-eigenvector projection W1, different values of theta with n = 2 and "
                             "alpha = 3",
                             "caption leaves the theta values open; theta = 0, 0.5, 2 are used");
    }
    if (id == "fig14" || id == "fig16") {
        FigureSpec f;
        f.id = std::string(id);
        f.statistic = id == "fig14" ? Statistic::y1_sing : Statistic::yn_sing;
        f.caption = std::string(id == "fig14" ? "smallest" : "largest") +
                    " singular projection, different values of n with n - m = 1 and theta = 0.3";
        f.note = "caption leaves the n values open; n = 3, 4, 5, 6, 7 are used";
        for (int n = 3; n <= 7; ++n) f.curves.push_back({"n=" + std::to_string(n), {n, n - 1, 0.3, Variant::singular}});
        return f;
    }
    std::string known;
    for (const auto& f : figure_ids()) known += (known.empty() ? "" : ", ") + f;
    throw UnknownFigure("'" + std::string(id) + "' is not one of " + known);
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int execute(const RunConfig& c, std::ostream& out)
{
    check_counts(c);
    if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
    if (c.command == "pdf") return cmd_curve(c, out, false);
    if (c.command == "cdf") return cmd_curve(c, out, true);
    if (c.command == "simulate") return cmd_simulate(c, out);
    if (c.command == "validate") return cmd_validate(c, out);
    if (c.command == "figure") return cmd_figure(c, out);
    throw ConfigError("unknown command '" + c.command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    std::string stat_name;
    CLI::App app{"Eigenvector projection densities of single-spiked Wishart matrices", "spiked_eigvec"};
    app.require_subcommand(1);

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--stat", stat_name, "z1, z2, zn, nz1_asym, w1_real, w2_real, y1_sing or yn_sing")
            ->required();
        sub->add_option("--n", c.n, "matrix dimension n");
        sub->add_option("--m", c.m, "degrees of freedom m");
        sub->add_option("--theta", c.theta, "spike strength theta >= 0");
        sub->add_option("--out", c.output_path, "output file (default: standard output)");
        sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto add_sampling = [&](CLI::App* sub) {
        sub->add_option("--samples", c.samples, "number of Monte-Carlo draws");
        sub->add_option("--seed", c.seed, "random seed");
        sub->add_option("--spike", c.spike, "first_basis or random")
            ->check(CLI::IsMember({"first_basis", "random"}));
        sub->add_option("--threads", c.threads, "worker threads (0 = all available)");
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid-points", c.grid_points, "number of grid points");
        sub->add_option_function<double>("--z-min", [&](double v) { c.z_min = v; }, "grid start");
        sub->add_option_function<double>("--z-max", [&](double v) { c.z_max = v; }, "grid end");
    };

    for (const char* name : {"pdf", "cdf"}) {
        auto* sub = app.add_subcommand(name, std::string("tabulate the ") + (name[0] == 'p' ? "density" : "c.d.f."));
        add_model(sub);
        add_grid(sub);
    }
    auto* sim = app.add_subcommand("simulate", "draw Monte-Carlo samples of a statistic");
    add_model(sim);
    add_sampling(sim);
    auto* val = app.add_subcommand("validate", "Kolmogorov-Smirnov test of samples against the analytic c.d.f.");
    add_model(val);
    add_sampling(val);
    val->add_option_function<double>("--model-theta", [&](double v) { c.model_theta = v; },
                                     "theta of the reference c.d.f. (default: --theta)");
    auto* fig = app.add_subcommand("figure", "emit the data table of a figure");
    fig->add_option("id", c.figure_id, "figure id")->required();
    fig->add_option("--out", c.output_path, "output CSV; histogram and metadata files are written beside it");
    add_grid(fig);
    add_sampling(fig);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        c.command = app.get_subcommands().front()->get_name();
        if (!stat_name.empty()) c.statistic = parse_statistic(stat_name);
        return execute(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_config_error(e) ? kConfigError : kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}

}  // namespace spiked::cli
