#pragma once

#include <stdexcept>
#include <string>

namespace cnb {

enum class errc {
    config,       // malformed or inconsistent input
    domain,       // argument outside the valid chart / parameter domain
    singularity,  // collision or antipodal configuration
    chart,        // coordinate chart degenerate (pole, equator crossing)
    drift,        // conservation or constraint drift above tolerance
    family        // relative-equilibrium family constraint violated
};

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

struct config_error : error {
    explicit config_error(const std::string& m) : error(errc::config, m) {}
};
struct domain_error : error {
    explicit domain_error(const std::string& m) : error(errc::domain, m) {}
};
struct singularity_error : error {
    explicit singularity_error(const std::string& m) : error(errc::singularity, m) {}
};
struct chart_error : error {
    explicit chart_error(const std::string& m) : error(errc::chart, m) {}
};
struct drift_error : error {
    explicit drift_error(const std::string& m) : error(errc::drift, m) {}
};
struct family_error : error {
    explicit family_error(const std::string& m) : error(errc::family, m) {}
};

}  // namespace cnb
