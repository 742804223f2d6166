#pragma once

#include <optional>
#include <string>

#include "vld/perception.hpp"

namespace vld {

struct RemoteTransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RemoteGrammarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RemoteRole { request, floor, recognition, choice };
const char* to_string(RemoteRole role);

struct RemoteConfig {
    std::string url;       // e.g. http://host:port/v1/chat/completions
    std::string token;     // bearer auth, optional
    std::string model = "default";
    int timeout_seconds = 30;
    int retries = 2;       // grammar-violation retries per query
    std::string prompt_dir; // optional override for the prompt assets
};

// Reads VLD_REMOTE_URL / VLD_REMOTE_TOKEN; explicit values win.
RemoteConfig remote_config_from_env(RemoteConfig base = {});

// One answer line, case-sensitive:
//   ANSWER: <int>          floor count / request floor
//   BOX: x0 x1 y0 y1       recognition hit
//   POINT: <1-5>           choice
//   OBJECT: <color> <category> <label...>   request object
//   NONE                   refusal / not found
// Throws RemoteGrammarError on anything else.
struct ParsedAnswer {
    std::optional<int> answer;
    std::optional<PixelBox> box;
    std::optional<int> point;
    std::optional<ObjectTag> object;
    bool none = false;
};
ParsedAnswer parse_answer_line(RemoteRole role, const std::string& line);

// Prompt template for a role: prompt_dir asset when present, built-in text
// otherwise.
std::string prompt_template(RemoteRole role, const std::string& prompt_dir);

// Grayscale PGM of a depth image (ranges scaled into 0..255), base64-encoded
// for the image part of VLM queries.
std::string depth_to_pgm_base64(const DepthImage& depth);

class RemoteClient {
public:
    explicit RemoteClient(RemoteConfig config);

    // POSTs a chat-completion body and extracts the reply text. Throws
    // RemoteTransportError when the endpoint cannot be reached.
    std::string query_text(const std::string& prompt,
                           const std::string& image_base64 = "");

    // query + grammar validation + retries; nullopt after exhausted retries
    // (callers treat it as refusal / not-found).
    std::optional<ParsedAnswer> query(RemoteRole role, const std::string& prompt,
                                      const std::string& image_base64 = "");

    const RemoteConfig& config() const { return config_; }

private:
    RemoteConfig config_;
    std::string host_;
    int port_ = 80;
    std::string path_;
};

// Backends speaking the wire protocol; perception queries carry only
// observations (prompt text plus a depth snapshot), never world state.
Backends make_remote_backends(const RemoteConfig& config, const WorldModel& world,
                              const CameraRig& rig = {});

} // namespace vld
