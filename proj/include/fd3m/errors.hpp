#pragma once

#include <stdexcept>
#include <string>

namespace fd3m {

/// Invalid user-supplied configuration (bad layout, widths, scheme tags, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite loss or gradient. Carries enough context
/// to locate the offending epoch in a long run.
class DivergedLossError : public std::runtime_error {
public:
    DivergedLossError(const std::string& what, int subdomain, int iteration, long epoch,
                      double learning_rate)
        : std::runtime_error(what),
          subdomain(subdomain),
          iteration(iteration),
          epoch(epoch),
          learning_rate(learning_rate) {}

    int subdomain = -1;
    int iteration = -1;
    long epoch = -1;
    double learning_rate = 0.0;
};

} // namespace fd3m
