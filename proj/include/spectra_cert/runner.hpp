#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/potential.hpp"

namespace spectra_cert {

// Invalid or incomplete experiment configuration; the message names the field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ZWindow {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
    int n_re = 1, n_im = 1;
    bool operator==(const ZWindow&) const = default;
};

struct ExperimentConfig {
    std::string experiment;
    std::string potential_name;
    ParamMap potential_params;
    int dimension = 3;
    int grid_n = 256;
    double r_max = 40.0;
    int ell_max = 32;
    std::optional<double> outlier_tol;
    std::vector<cplx> z_list;
    std::optional<ZWindow> z_window;
    std::vector<double> levels;
    std::optional<cplx> lambda;
    std::vector<int> n_list;
    // spectrum: "radial" (sector `ell`) or "box" (`box_n` points per axis on [-r_max, r_max]^3)
    std::string mode = "radial";
    int ell = 0;
    int box_n = 10;
    std::string magnetic_name = "zero";
    ParamMap magnetic_params;
    std::string output_path = "out";
    std::vector<std::string> formats{"json"};

    bool operator==(const ExperimentConfig&) const = default;
};

std::vector<std::string> experiment_names();

// Parses and validates a JSON document; throws ConfigError naming the field.
ExperimentConfig parse_config(const std::string& text);
// Same, after applying `key=value` overrides (dotted keys; value parsed as
// JSON, else taken as a string).
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides);
// Canonical JSON text of the config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

struct OutputFile {
    std::string path;
    std::string fnv1a64;  // hex digest of the file contents
    std::size_t bytes = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string config;  // canonical config echo
    std::string version;
    std::vector<StageTiming> timings;
    std::vector<OutputFile> files;
    // Empty when every numerical check of the experiment held.
    std::vector<std::string> check_failures;
};

std::string toolkit_version();
std::string fnv1a64_hex(const std::string& bytes);

// Runs the experiment, writes outputs atomically under config.output_path
// and a manifest.json next to them.
RunManifest run(const ExperimentConfig& config);

// Potentials with parameter keys, and thresholds for dimension d, as JSON.
std::string catalog_listing(int d);

// Exit codes of the command-line runner.
enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2 };

}  // namespace spectra_cert
