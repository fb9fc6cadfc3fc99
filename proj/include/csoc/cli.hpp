#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csoc/spacetime.hpp"

namespace csoc::cli {

/// Malformed config file or flag value. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kDomainError = 3,
};

/// Everything a scenario run depends on. Serializes to an INI-style text with
/// one section per concern; doubles are written in shortest round-trip form.
struct ScenarioConfig {
    std::string scenario = "all";
    std::uint64_t seed = 42;
    std::size_t probes = 64;
    std::size_t jobs = 1;
    std::string output_dir = "csoc-out";

    double hbar = 1.0;
    double m = 1.0;
    double c = 1.0;
    double q = 1.0;
    std::string metric = "minus-plus";  ///< or "plus-minus"
    std::string potential = "constant(0.5,0,0,0)";

    /// "postulated" ties both coefficients to sqrt(hbar/m); "explicit" uses sigma_x / sigma_y.
    std::string diffusion = "postulated";
    int epsilon = 1;
    Real4 sigma_x{1.0, 1.0, 1.0, 1.0};
    Real4 sigma_y{1.0, 1.0, 1.0, 1.0};

    double tau_f = 1.0;
    double half_width = 1.0;

    std::size_t n_samples = 1000000;  ///< one-step samples for the moment suite
    std::size_t n_paths = 20000;
    std::size_t n_steps = 100;
    double d_tau = 0.01;
    Real4 drift_v{0.0, 0.0, 0.0, 0.0};
    Real4 drift_u{0.0, 0.0, 0.0, 0.0};

    /// Throws ConfigError on out-of-range values or unknown names.
    void validate() const;

    Metric metric_value() const;

    std::string to_ini() const;
    /// Starts from the defaults and applies every key found. Unknown sections or keys are errors.
    static ScenarioConfig from_ini(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);

    nlohmann::ordered_json to_json() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// "key = value" override on top of a loaded config, keyed as "section.key".
void apply_override(ScenarioConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Every scenario except "all", in run order.
const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

struct CsvTable {
    std::string file;  ///< name inside the output directory
    std::string content;
};

struct ScenarioResult {
    std::string name;
    bool passed = false;
    nlohmann::ordered_json report;
    std::vector<CsvTable> tables;
    double seconds = 0.0;  ///< wall time; kept out of the report so reports stay deterministic
};

/// Runs one named scenario in memory. Throws ConfigError / DomainError as appropriate.
ScenarioResult run_scenario(const std::string& name, const ScenarioConfig& cfg);

/// Runs cfg.scenario (or every scenario for "all"), writes the manifest, one
/// <scenario>.json per scenario and its CSV tables into cfg.output_dir, and
/// returns the exit code. Progress lines go to `log`.
int run(const ScenarioConfig& cfg, std::ostream& log);

/// 17 significant digits.
std::string format_double(double v);

std::string library_version();

}  // namespace csoc::cli
