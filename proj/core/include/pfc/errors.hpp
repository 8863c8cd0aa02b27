#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

struct NotControllable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotObservable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadSchedule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPE : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotDivisible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingDownstreamControl : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveRate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the integrator the moment any state component stops being finite.
struct NonFiniteState : std::runtime_error {
    double time;
    int component;
    NonFiniteState(const std::string& what, double t, int idx)
        : std::runtime_error(what), time(t), component(idx) {}
};

// Scenario configuration problems; line < 0 means "not tied to a line".
struct ConfigError : std::runtime_error {
    int line;
    explicit ConfigError(const std::string& what, int line_no = -1)
        : std::runtime_error(what), line(line_no) {}
};

}  // namespace pfc
