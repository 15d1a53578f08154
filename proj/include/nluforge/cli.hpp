#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nluforge/llm.hpp"

namespace nluforge {

/// Process-level dependencies, replaceable in tests.
struct CliEnv {
    /// Builds the transport for a live or record run.
    std::function<std::shared_ptr<Transport>(const std::string& endpoint)> make_transport;
    std::function<std::optional<std::string>(const std::string& name)> getenv;

    static CliEnv process();
};

/// Environment variable holding the API key.
inline constexpr const char* kApiKeyEnv = "NLUFORGE_API_KEY";

/// Runs one subcommand. Returns 0 on success, 1 on data errors (a JSON error
/// report is written to `err`), 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnv& env = CliEnv::process());

}  // namespace nluforge
