#include "vld/remote.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "vld/render.hpp"

namespace vld {

using nlohmann::json;

const char* to_string(RemoteRole role) {
    switch (role) {
        case RemoteRole::request: return "request";
        case RemoteRole::floor: return "floor";
        case RemoteRole::recognition: return "recognition";
        case RemoteRole::choice: return "choice";
    }
    return "request";
}

RemoteConfig remote_config_from_env(RemoteConfig base) {
    if (base.url.empty()) {
        if (const char* url = std::getenv("VLD_REMOTE_URL")) base.url = url;
    }
    if (base.token.empty()) {
        if (const char* token = std::getenv("VLD_REMOTE_TOKEN")) base.token = token;
    }
    return base;
}

namespace {

bool parse_int_strict(const std::string& s, int& out) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i >= s.size()) return false;
    for (std::size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9') return false;
    try {
        out = std::stoi(s);
    } catch (...) {
        return false;
    }
    return true;
}

std::string trim_line(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> parts;
    std::string p;
    while (in >> p) parts.push_back(p);
    return parts;
}

} // namespace

ParsedAnswer parse_answer_line(RemoteRole role, const std::string& raw) {
    std::string line = trim_line(raw);
    ParsedAnswer out;
    if (line == "NONE") {
        if (role == RemoteRole::choice)
            throw RemoteGrammarError("choice role cannot answer NONE");
        out.none = true;
        return out;
    }
    if (line.rfind("ANSWER: ", 0) == 0) {
        if (role != RemoteRole::floor && role != RemoteRole::request)
            throw RemoteGrammarError("ANSWER not valid for this role");
        int v;
        if (!parse_int_strict(line.substr(8), v) || v < 0)
            throw RemoteGrammarError("malformed ANSWER payload: " + line);
        out.answer = v;
        return out;
    }
    if (line.rfind("BOX: ", 0) == 0) {
        if (role != RemoteRole::recognition)
            throw RemoteGrammarError("BOX not valid for this role");
        auto parts = split_ws(line.substr(5));
        if (parts.size() != 4) throw RemoteGrammarError("BOX needs four integers");
        int v[4];
        for (int i = 0; i < 4; ++i)
            if (!parse_int_strict(parts[static_cast<std::size_t>(i)], v[i]))
                throw RemoteGrammarError("malformed BOX payload: " + line);
        if (v[0] > v[1] || v[2] > v[3]) throw RemoteGrammarError("inverted BOX bounds");
        out.box = PixelBox{v[0], v[1], v[2], v[3]};
        return out;
    }
    if (line.rfind("POINT: ", 0) == 0) {
        if (role != RemoteRole::choice)
            throw RemoteGrammarError("POINT not valid for this role");
        int v;
        if (!parse_int_strict(line.substr(7), v))
            throw RemoteGrammarError("malformed POINT payload: " + line);
        if (v < 1 || v > 5) throw RemoteGrammarError("POINT out of range [1,5]");
        out.point = v;
        return out;
    }
    if (line.rfind("OBJECT: ", 0) == 0) {
        if (role != RemoteRole::request)
            throw RemoteGrammarError("OBJECT not valid for this role");
        auto parts = split_ws(line.substr(8));
        if (parts.size() < 3) throw RemoteGrammarError("OBJECT needs color category label");
        ObjectTag tag;
        tag.color = color_from_string(parts[0]);
        tag.category = category_from_string(parts[1]);
        std::string label;
        for (std::size_t i = 2; i < parts.size(); ++i) {
            if (i > 2) label += " ";
            label += parts[i];
        }
        tag.label = label;
        out.object = tag;
        return out;
    }
    throw RemoteGrammarError("unparseable answer line: " + line);
}

namespace {

const char* builtin_prompt(RemoteRole role) {
    switch (role) {
        case RemoteRole::request:
            return
                "# vld-prompt/1 request\n"
                "You extract delivery targets from customer requests.\n"
                "Think in three steps: (1) drop details irrelevant to locating the "
                "window, (2) find the floor number, (3) find the distinctive object "
                "near the window.\n"
                "Example request: 'Leave it on floor 3, window with the red vase. "
                "The lobby code is 1234.'\n"
                "Step 1: the lobby code is irrelevant. Step 2: floor 3. Step 3: red "
                "vase.\n"
                "Answer the floor first as 'ANSWER: <int>'. When asked for the "
                "object, answer 'OBJECT: <color> <category> <label>'.\n"
                "Request: %REQUEST%\n";
        case RemoteRole::floor:
            return
                "# vld-prompt/1 floor\n"
                "The attached depth image is a front view of a building facade.\n"
                "Count the floors visible in this view. You must answer with a "
                "number, as 'ANSWER: <int>'. Answer 'NONE' only if no building is "
                "visible.\n";
        case RemoteRole::recognition:
            return
                "# vld-prompt/1 recognition\n"
                "The attached image is one of five views around a building.\n"
                "Target: a window with this distinctive object nearby: %TARGET%.\n"
                "If the target window is visible, answer its pixel bounding box as "
                "'BOX: x_min x_max y_min y_max'. Otherwise answer 'NONE'.\n";
        case RemoteRole::choice:
            return
                "# vld-prompt/1 choice\n"
                "The attached image carries five marked points on its horizontal "
                "center line, numbered 1..5 left to right. Their safe moving "
                "distances in meters are: %DISTANCES%.\n"
                "Delivery task: %TASK%.\n"
                "Pick the point to fly toward to keep searching around the "
                "building. Answer exactly one line: 'POINT: <1-5>'.\n";
    }
    return "";
}

const char* prompt_filename(RemoteRole role) {
    switch (role) {
        case RemoteRole::request: return "request_cot.txt";
        case RemoteRole::floor: return "floor_count.txt";
        case RemoteRole::recognition: return "recognition.txt";
        case RemoteRole::choice: return "choice.txt";
    }
    return "";
}

const char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += kBase64Chars[(v >> 6) & 63];
        out += kBase64Chars[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += kBase64Chars[(v >> 6) & 63];
        out += "=";
    }
    return out;
}

} // namespace

std::string prompt_template(RemoteRole role, const std::string& prompt_dir) {
    if (!prompt_dir.empty()) {
        std::ifstream in(prompt_dir + "/" + prompt_filename(role));
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }
    return builtin_prompt(role);
}

std::string depth_to_pgm_base64(const DepthImage& depth) {
    std::ostringstream pgm;
    pgm << "P5\n" << depth.width << " " << depth.height << "\n255\n";
    for (double d : depth.data) {
        int v = static_cast<int>(255.0 * d / depth.max_range);
        pgm << static_cast<char>(std::min(255, std::max(0, v)));
    }
    return base64_encode(pgm.str());
}

RemoteClient::RemoteClient(RemoteConfig config) : config_(std::move(config)) {
    // split url into host:port and path
    std::string url = config_.url;
    std::string rest;
    if (url.rfind("http://", 0) == 0) rest = url.substr(7);
    else if (url.rfind("https://", 0) == 0)
        throw RemoteTransportError("https endpoints are not supported in this build");
    else rest = url;
    auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = hostport.find(':');
    host_ = colon == std::string::npos ? hostport : hostport.substr(0, colon);
    port_ = colon == std::string::npos ? 80 : std::stoi(hostport.substr(colon + 1));
    if (host_.empty()) throw RemoteTransportError("remote endpoint url is empty");
}

std::string RemoteClient::query_text(const std::string& prompt,
                                     const std::string& image_base64) {
    json content = json::array();
    content.push_back(json{{"type", "text"}, {"text", prompt}});
    if (!image_base64.empty())
        content.push_back(json{{"type", "image"},
                               {"format", "pgm"},
                               {"image_base64", image_base64}});
    json body{{"model", config_.model},
              {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};

    httplib::Client client(host_, port_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.token.empty())
        headers.emplace("Authorization", "Bearer " + config_.token);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
        throw RemoteTransportError("cannot reach remote endpoint " + config_.url);
    if (res->status != 200)
        throw RemoteTransportError("remote endpoint returned HTTP " +
                                   std::to_string(res->status));
    try {
        json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw RemoteTransportError("remote reply is not a chat completion");
    }
}

std::optional<ParsedAnswer> RemoteClient::query(RemoteRole role, const std::string& prompt,
                                                const std::string& image_base64) {
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        std::string reply = query_text(prompt, image_base64);
        try {
            return parse_answer_line(role, reply);
        } catch (const RemoteGrammarError&) {
            // retry; the endpoint failed the answer grammar
        }
    }
    return std::nullopt;
}

namespace {

std::string replace_token(std::string s, const std::string& token,
                          const std::string& value) {
    auto pos = s.find(token);
    if (pos != std::string::npos) s.replace(pos, token.size(), value);
    return s;
}

} // namespace

Backends make_remote_backends(const RemoteConfig& config, const WorldModel& world,
                              const CameraRig& rig) {
    auto client = std::make_shared<RemoteClient>(config);
    std::string dir = config.prompt_dir;

    Backends b;
    b.parse_request = [client, dir](const std::string& text) {
        std::string prompt = replace_token(prompt_template(RemoteRole::request, dir),
                                           "%REQUEST%", text);
        auto floor_ans = client->query(RemoteRole::request,
                                       prompt + "\nGive the floor number now.");
        auto object_ans = client->query(RemoteRole::request,
                                        prompt + "\nGive the object now.");
        if (!floor_ans || floor_ans->none || !floor_ans->answer || !object_ans ||
            !object_ans->object)
            throw RemoteGrammarError("request understanding failed");
        RequestInterpretation out;
        out.target_floor = std::max(1, *floor_ans->answer);
        out.target_object = *object_ans->object;
        return out;
    };
    b.count_floors = [client, dir, &world, rig](const DronePose& pose, int cam) {
        DepthImage depth = render_depth(world, pose, cam, rig);
        auto ans = client->query(RemoteRole::floor,
                                 prompt_template(RemoteRole::floor, dir),
                                 depth_to_pgm_base64(depth));
        FloorCountAnswer out;
        if (!ans || ans->none || !ans->answer) {
            out.refused = true;
            return out;
        }
        out.floors_visible = *ans->answer;
        return out;
    };
    b.recognize = [client, dir](const std::array<std::vector<VisibleFeature>,
                                                 CameraRig::kNumCameras>& features,
                                const std::array<DepthImage, CameraRig::kNumCameras>& depths,
                                const ObjectTag& target) {
        std::string prompt = replace_token(prompt_template(RemoteRole::recognition, dir),
                                           "%TARGET%", target.describe());
        RecognitionAnswer out;
        for (int view = 1; view <= CameraRig::kNumCameras; ++view) {
            auto ans = client->query(RemoteRole::recognition, prompt,
                                     depth_to_pgm_base64(
                                         depths[static_cast<std::size_t>(view - 1)]));
            if (!ans || ans->none || !ans->box) continue;
            out.found = true;
            out.pixel_box = ans->box;
            out.view = view;
            // ground-truth the claim for the failure-rate metrics: the
            // feature whose box center is nearest the returned box center
            double cx = 0.5 * (ans->box->x_min + ans->box->x_max);
            double cy = 0.5 * (ans->box->y_min + ans->box->y_max);
            double best = 1e18;
            for (const VisibleFeature& feat :
                 features[static_cast<std::size_t>(view - 1)]) {
                double fx = 0.5 * (feat.pixel_box.x_min + feat.pixel_box.x_max);
                double fy = 0.5 * (feat.pixel_box.y_min + feat.pixel_box.y_max);
                double d2 = (fx - cx) * (fx - cx) + (fy - cy) * (fy - cy);
                if (d2 < best) {
                    best = d2;
                    out.window_id = feat.window_id;
                }
            }
            return out;
        }
        return out;
    };
    b.choose = [client, dir, &world, rig](const ChoiceQuery& q)
        -> std::optional<ChoiceAnswer> {
        std::ostringstream dists;
        for (int k = 0; k < 5; ++k) {
            if (k) dists << ", ";
            dists << q.distances[static_cast<std::size_t>(k)];
        }
        std::string prompt = prompt_template(RemoteRole::choice, dir);
        prompt = replace_token(prompt, "%DISTANCES%", dists.str());
        prompt = replace_token(prompt, "%TASK%", "continue around the building");
        DepthImage depth = render_depth(world, q.pose, q.view, rig);
        auto ans = client->query(RemoteRole::choice, prompt, depth_to_pgm_base64(depth));
        if (!ans || !ans->point) return std::nullopt;
        return ChoiceAnswer{*ans->point};
    };
    return b;
}

} // namespace vld
