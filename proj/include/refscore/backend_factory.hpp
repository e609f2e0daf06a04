#pragma once
// Backend selection for cmd_score. Separate header because HttpBackend
// drags in httplib.

#include "refscore/config.hpp"
#include "refscore/http_backend.hpp"
#include "refscore/pipeline.hpp"

namespace refscore {

inline std::unique_ptr<ScoreBackend> make_backend(const RunConfig& cfg, const Corpus& corpus) {
    if (cfg.mock) {
        MockProfile profile;
        profile.agreement = cfg.mock_agreement;
        return std::make_unique<MockBackend>(corpus, cfg.seed, profile);
    }
    if (cfg.model.endpoint_url.empty())
        throw ConfigError("endpoint_url is required unless mock mode is enabled");
    if (cfg.model.model_name.empty())
        throw ConfigError("model is required unless mock mode is enabled");
    return std::make_unique<HttpBackend>(cfg.model);
}

} // namespace refscore
