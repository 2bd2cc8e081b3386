#include "foamforge/core/types.hpp"

#include "foamforge/core/error.hpp"

namespace foamforge::core {

void Config::validate() const {
    if (max_loops < 1) throw ConfigError("max_loops must be positive");
    if (temperature < 0.0 || temperature > 1.0)
        throw ConfigError("temperature must be in [0, 1]");
    if (top_k < 1) throw ConfigError("top_k must be positive");
    if (embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
    if (visualization_max_retries < 1)
        throw ConfigError("visualization_max_retries must be positive");
}

int folder_rank(const std::string& folder_name) {
    if (folder_name == "system") return 0;
    if (folder_name == "constant") return 1;
    if (folder_name == "0") return 2;
    return 3;  // case-root auxiliary files (Allrun, scripts, ...)
}

}  // namespace foamforge::core
