#pragma once

#include <stdexcept>
#include <string>

namespace ewens {

struct TruncationOverflow : std::runtime_error {
    explicit TruncationOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidWindow : std::invalid_argument {
    explicit InvalidWindow(const std::string& what) : std::invalid_argument(what) {}
};

struct DivergentAtZero : std::domain_error {
    explicit DivergentAtZero(const std::string& what) : std::domain_error(what) {}
};

struct NotCoprime : std::invalid_argument {
    explicit NotCoprime(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateSeries : std::runtime_error {
    explicit DegenerateSeries(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientGrid : std::invalid_argument {
    explicit InsufficientGrid(const std::string& what) : std::invalid_argument(what) {}
};

struct ConfigInvalid : std::invalid_argument {
    explicit ConfigInvalid(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace ewens
