#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spectra_cert/errors.hpp"
#include "spectra_cert/runner.hpp"

using namespace spectra_cert;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical certification of spectral stability for complex Schroedinger operators"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run_cmd->add_option("config", config_path, "Config file")->required();
    run_cmd->add_option("--set", overrides, "Override a config field, key=value (dotted keys)");

    std::string validate_path;
    std::vector<std::string> validate_overrides;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a JSON config and print it with defaults filled");
    validate_cmd->add_option("config", validate_path, "Config file")->required();
    validate_cmd->add_option("--set", validate_overrides, "Override a config field, key=value (dotted keys)");

    int dim = 3;
    auto* catalog_cmd = app.add_subcommand("catalog", "List potentials and thresholds for a dimension");
    catalog_cmd->add_option("--dim", dim, "Dimension d >= 3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), exit_config_error);
    }

    try {
        if (*catalog_cmd) {
            std::cout << catalog_listing(dim) << "\n";
            return exit_ok;
        }
        if (*validate_cmd) {
            std::cout << serialize_config(parse_config(read_text(validate_path), validate_overrides)) << "\n";
            return exit_ok;
        }
        const auto config = parse_config(read_text(config_path), overrides);
        const auto manifest = run(config);
        for (const auto& f : manifest.files) std::cout << f.path << " " << f.fnv1a64 << "\n";
        if (!manifest.check_failures.empty()) {
            for (const auto& msg : manifest.check_failures) std::cerr << "check failed: " << msg << "\n";
            return exit_check_failed;
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_check_failed;
    }
}
