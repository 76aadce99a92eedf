#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spiked/model.hpp"

// Command-line front end: density and c.d.f. grids, simulation, goodness-of-fit
// validation and figure tables. Output bytes depend only on the arguments.
namespace spiked::cli {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kConfigError = 2,
    kNumericalError = 3,
};

struct RunConfig {
    std::string command;
    Statistic statistic = Statistic::z1;
    int n = 0;
    int m = 0;
    double theta = 0.0;
    // validate only: theta of the model c.d.f. when it should differ from the
    // sampled one (negative controls).
    std::optional<double> model_theta;
    std::optional<double> z_min;
    std::optional<double> z_max;
    int grid_points = 501;
    long long samples = 100000;
    std::uint64_t seed = 42;
    std::string output_path;  // empty writes to the output stream
    std::string format = "csv";
    std::string spike = "first_basis";
    std::string figure_id;
    unsigned threads = 0;  // 0 = worker_count()
};

// One curve of a figure table.
struct FigureCurve {
    std::string label;
    SpikedModel model;
};

struct FigureSpec {
    std::string id;
    Statistic statistic = Statistic::z1;
    std::string caption;
    std::string note;  // parameter choices the caption leaves open
    // Figures span the whole support: every density they plot is finite at
    // both ends, and arcsine-type grids use cell centers.
    double z_min = 0.0;
    double z_max = 1.0;
    std::vector<FigureCurve> curves;
};

// Throws UnknownFigure for ids outside the supported set.
FigureSpec figure_spec(std::string_view id);
std::vector<std::string> figure_ids();

// 17 significant digits, '.' decimal point, independent of the locale.
std::string format_number(double v);

// Runs a command; args excludes the program name. Diagnostics go to err as a
// single line. Returns an ExitCode value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs an already-parsed configuration; throws on failure.
int execute(const RunConfig& config, std::ostream& out);

}  // namespace spiked::cli
