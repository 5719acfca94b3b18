#pragma once

// Client for OpenAI-compatible completion APIs with a persistent response
// cache and an offline replay mode, plus the two oracles built on it: a
// move-suggestion pruner (frequency-ranked sampled moves) and a centipawn
// critic. Requests canonicalize to compact JSON with sorted keys; the cache
// key is the SHA-256 of that canonical form, so identical requests replay
// bit-identically. The cache file is append-only JSON lines, one entry per
// line.
//
// Prompt templates are plain strings with {placeholders}; the shipped
// defaults embed the position key, which keeps rendering injective across
// distinct states.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "pmcts/game.hpp"
#include "pmcts/search.hpp"

namespace pmcts {

struct HttpError : std::runtime_error {
    int status;
    HttpError(int status_code, const std::string& body)
        : std::runtime_error("http status " + std::to_string(status_code) + ": " +
                             body.substr(0, 200)),
          status(status_code) {}
};

struct RateLimited : std::runtime_error {
    explicit RateLimited(const std::string& what) : std::runtime_error("rate limited: " + what) {}
};

struct ReplayMiss : std::runtime_error {
    explicit ReplayMiss(const std::string& key)
        : std::runtime_error("replay cache misses key " + key) {}
};

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

struct LlmRequest {
    std::string model;
    std::string prompt;
    int n = 1;
    double temperature = 0.0;
    int max_tokens = 64;
    std::vector<std::string> stop;

    void validate() const {
        if (n < 1) throw std::invalid_argument("LlmRequest: n >= 1");
        if (temperature < 0) throw std::invalid_argument("LlmRequest: temperature >= 0");
    }
};

// Compact JSON with sorted keys and verbatim field values.
inline std::string canonical_request_json(const LlmRequest& r) {
    nlohmann::json j{{"max_tokens", r.max_tokens}, {"model", r.model},       {"n", r.n},
                     {"prompt", r.prompt},         {"stop", r.stop},         {"temperature", r.temperature}};
    return j.dump();
}

inline std::string cache_key(const LlmRequest& r) { return sha256_hex(canonical_request_json(r)); }

struct CacheEntry {
    std::string key;
    std::vector<std::string> texts;
    std::int64_t timestamp = 0;
    std::string backend;
};

enum class LlmMode { Live, CachedLive, Replay };

inline LlmMode llm_mode_from_string(const std::string& name) {
    if (name == "live") return LlmMode::Live;
    if (name == "cached-live") return LlmMode::CachedLive;
    if (name == "replay") return LlmMode::Replay;
    throw std::invalid_argument("unknown llm mode: " + name);
}

struct LlmConfig {
    std::string endpoint = "https://api.openai.com";  // scheme://host[:port]
    bool chat_api = false;                            // /v1/chat/completions vs /v1/completions
    std::string model = "gpt-3.5-turbo-instruct";
    std::string api_key_env = "LLM_API_KEY";
    LlmMode mode = LlmMode::Replay;
    std::string cache_path = "llm_cache.jsonl";
    int max_retries = 3;
    int min_interval_ms = 0;  // simple outbound rate limit

    static LlmConfig from_json(const nlohmann::json& j) {
        LlmConfig c;
        if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
        if (j.contains("chat_api")) c.chat_api = j.at("chat_api").get<bool>();
        if (j.contains("model")) c.model = j.at("model").get<std::string>();
        if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
        if (j.contains("mode")) c.mode = llm_mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("cache_path")) c.cache_path = j.at("cache_path").get<std::string>();
        if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
        if (j.contains("min_interval_ms")) c.min_interval_ms = j.at("min_interval_ms").get<int>();
        return c;
    }
};

class LlmClient {
public:
    explicit LlmClient(LlmConfig config) : config_(std::move(config)) {
        if (config_.mode != LlmMode::Live) load_cache();
    }

    const LlmConfig& config() const { return config_; }
    std::int64_t live_calls() const { return live_calls_; }

    std::vector<std::string> complete(const LlmRequest& request) {
        request.validate();
        std::string key = cache_key(request);
        if (config_.mode != LlmMode::Live) {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
            if (config_.mode == LlmMode::Replay) throw ReplayMiss(key);
        }
        std::vector<std::string> texts = live_complete(request);
        if (config_.mode == LlmMode::CachedLive) store(key, texts);
        return texts;
    }

private:
    void load_cache() {
        std::ifstream in(config_.cache_path);
        if (!in) return;  // an absent cache simply starts empty
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            cache_[j.at("key").get<std::string>()] =
                j.at("texts").get<std::vector<std::string>>();
        }
    }

    void store(const std::string& key, const std::vector<std::string>& texts) {
        std::lock_guard lock(mutex_);
        cache_[key] = texts;
        std::ofstream out(config_.cache_path, std::ios::app);
        nlohmann::json j{{"backend", config_.model},
                         {"key", key},
                         {"texts", texts},
                         {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count()}};
        out << j.dump() << '\n';
    }

    std::vector<std::string> live_complete(const LlmRequest& request) {
        std::lock_guard lock(http_mutex_);
        if (config_.min_interval_ms > 0) {
            auto now = std::chrono::steady_clock::now();
            auto wait = last_call_ + std::chrono::milliseconds(config_.min_interval_ms) - now;
            if (wait.count() > 0) std::this_thread::sleep_for(wait);
        }

        nlohmann::json body;
        body["model"] = request.model;
        body["n"] = request.n;
        body["temperature"] = request.temperature;
        body["max_tokens"] = request.max_tokens;
        if (!request.stop.empty()) body["stop"] = request.stop;
        std::string path;
        if (config_.chat_api) {
            path = "/v1/chat/completions";
            body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
        } else {
            path = "/v1/completions";
            body["prompt"] = request.prompt;
        }

        httplib::Client client(config_.endpoint);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        int backoff_ms = 500;
        for (int attempt = 0;; ++attempt) {
            auto res = client.Post(path, headers, body.dump(), "application/json");
            last_call_ = std::chrono::steady_clock::now();
            if (!res) throw HttpError(0, "no response from " + config_.endpoint + path);
            if (res->status == 429 || res->status == 503) {
                if (attempt >= config_.max_retries)
                    throw RateLimited("gave up after " + std::to_string(attempt) + " retries");
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
                backoff_ms *= 2;
                continue;
            }
            if (res->status != 200) throw HttpError(res->status, res->body);
            ++live_calls_;
            nlohmann::json j = nlohmann::json::parse(res->body);
            std::vector<std::string> texts;
            for (const auto& choice : j.at("choices"))
                texts.push_back(config_.chat_api
                                    ? choice.at("message").at("content").get<std::string>()
                                    : choice.at("text").get<std::string>());
            if (static_cast<int>(texts.size()) != request.n)
                throw HttpError(res->status, "expected " + std::to_string(request.n) +
                                                 " choices, got " + std::to_string(texts.size()));
            return texts;
        }
    }

    LlmConfig config_;
    std::mutex mutex_;
    std::mutex http_mutex_;
    std::unordered_map<std::string, std::vector<std::string>> cache_;
    std::chrono::steady_clock::time_point last_call_{};
    std::int64_t live_calls_ = 0;
};

// ---- prompt rendering ----

template <typename G>
concept HasBoardText = requires(const G g, const typename G::Board b) {
    { g.board_text(b) } -> std::convertible_to<std::string>;
};

template <GameRules G>
std::string render_prompt(const std::string& tmpl, const GameState<G>& state) {
    const G& game = state.game();
    auto legal = state.legal_actions();
    std::string moves;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        if (i) moves += ", ";
        moves += game.encode_action(legal[i]);
    }
    std::string board;
    if constexpr (HasBoardText<G>) board = game.board_text(state.board());
    else board = state.board_key();

    std::map<std::string, std::string> vars{
        {"game", game.name()},
        {"key", state.board_key()},
        {"fen", state.board_key()},
        {"board", board},
        {"legal_moves", moves},
        {"turn", to_string(state.turn())},
        {"ply", std::to_string(state.ply())},
    };
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size();) {
        if (tmpl[i] == '{') {
            auto end = tmpl.find('}', i);
            if (end != std::string::npos) {
                auto it = vars.find(tmpl.substr(i + 1, end - i - 1));
                if (it != vars.end()) {
                    out += it->second;
                    i = end + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

struct PromptTemplates {
    std::string prune =
        "You are playing {game}. Current position:\n{board}\n"
        "Position key: {key}\n"
        "Legal moves: {legal_moves}\n"
        "Reply with the single best move for the side to move, in the same "
        "notation as the legal move list, and nothing else.";
    std::string evaluate =
        "You are a strong {game} analyst. Current position:\n{board}\n"
        "Position key: {key}\n"
        "Judge the positional advantage of the player who moves first from the "
        "root of this analysis, in centipawns. Reply with a single number.";

    static PromptTemplates from_json(const nlohmann::json& j) {
        PromptTemplates t;
        if (j.contains("prune")) t.prune = j.at("prune").get<std::string>();
        if (j.contains("evaluate")) t.evaluate = j.at("evaluate").get<std::string>();
        return t;
    }
};

// ---- completion parsing ----

// First token of the text that parses as a move in the game's notation
// (syntactically; legality is filtered by the caller).
template <GameRules G>
std::optional<typename G::Action> parse_move_token(const GameState<G>& state,
                                                   const std::string& text) {
    const G& game = state.game();
    std::string token;
    auto flush = [&]() -> std::optional<typename G::Action> {
        if (token.empty()) return std::nullopt;
        auto a = game.decode_action(state.board(), token);
        token.clear();
        return a;
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '=' || c == '+' ||
            c == '#') {
            token += c;
        } else if (auto a = flush()) {
            return a;
        }
    }
    return flush();
}

template <GameRules G>
struct MoveVotes {
    std::vector<typename G::Action> ranked;  // frequency desc, ties canonical
    bool fallback = false;                   // no legal parse: full legal list returned
    int parsed = 0;
    int illegal = 0;
};

// Tally the sampled completions into a frequency-ranked legal move list.
template <GameRules G>
MoveVotes<G> rank_move_votes(const GameState<G>& state, const std::vector<std::string>& texts,
                             int k_max) {
    MoveVotes<G> votes;
    auto legal = state.legal_actions();
    std::map<std::string, std::pair<typename G::Action, int>> counts;
    for (const auto& text : texts) {
        auto move = parse_move_token(state, text);
        if (!move) continue;
        ++votes.parsed;
        bool is_legal = false;
        for (const auto& a : legal)
            if (a == *move) {
                is_legal = true;
                break;
            }
        if (!is_legal) {
            ++votes.illegal;
            continue;
        }
        auto [it, inserted] =
            counts.try_emplace(state.game().encode_action(*move), std::make_pair(*move, 0));
        ++it->second.second;
    }
    if (counts.empty()) {
        votes.ranked = legal;
        votes.fallback = true;
        return votes;
    }
    std::vector<std::pair<std::string, std::pair<typename G::Action, int>>> ordered(counts.begin(),
                                                                                    counts.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second.second != b.second.second) return a.second.second > b.second.second;
        return a.first < b.first;
    });
    for (const auto& [code, entry] : ordered) {
        if (k_max > 0 && static_cast<int>(votes.ranked.size()) >= k_max) break;
        votes.ranked.push_back(entry.first);
    }
    return votes;
}

// First signed integer/decimal figure in the text, if any.
inline std::optional<double> parse_first_number(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool sign = (c == '+' || c == '-') && i + 1 < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (!sign && !std::isdigit(static_cast<unsigned char>(c))) continue;
        std::size_t j = i + (sign ? 1 : 0);
        std::string num = sign ? std::string(1, c) : "";
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) num += text[j++];
        if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
            num += text[j++];
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                num += text[j++];
        }
        return std::stod(num);
    }
    return std::nullopt;
}

// Samples n move suggestions and keeps the legal ones, ranked by how often
// they were suggested; falls back to the full legal list (and flags it) when
// nothing legal parses.
template <GameRules G>
class LlmPruner : public Pruner<G> {
public:
    LlmPruner(std::shared_ptr<LlmClient> client, PromptTemplates templates, int k_max,
              int samples = 20, double temperature = 0.7, int max_tokens = 16)
        : client_(std::move(client)),
          templates_(std::move(templates)),
          k_max_(k_max),
          samples_(samples),
          temperature_(temperature),
          max_tokens_(max_tokens) {}

    std::vector<typename G::Action> prune(const GameState<G>& state) override {
        LlmRequest request;
        request.model = client_->config().model;
        request.prompt = render_prompt(templates_.prune, state);
        request.n = samples_;
        request.temperature = temperature_;
        request.max_tokens = max_tokens_;
        auto texts = client_->complete(request);
        auto votes = rank_move_votes(state, texts, k_max_);
        ++calls_;
        if (votes.fallback) ++fallbacks_;
        return votes.ranked;
    }

    std::string id() const override { return "llm"; }
    int max_width() const override { return k_max_; }
    std::int64_t fallbacks() const { return fallbacks_; }
    std::int64_t calls() const { return calls_; }

private:
    std::shared_ptr<LlmClient> client_;
    PromptTemplates templates_;
    int k_max_;
    int samples_;
    double temperature_;
    int max_tokens_;
    std::int64_t fallbacks_ = 0;
    std::int64_t calls_ = 0;
};

// Single deterministic completion parsed as a centipawn figure, divided by
// 1000 and clamped to [-clamp, clamp]; unparsable answers score 0 and are
// flagged.
template <GameRules G>
class LlmCritic : public Critic<G> {
public:
    LlmCritic(std::shared_ptr<LlmClient> client, PromptTemplates templates, double clamp = 10.0,
              int max_tokens = 16)
        : client_(std::move(client)),
          templates_(std::move(templates)),
          clamp_(clamp),
          max_tokens_(max_tokens) {}

    double evaluate(const GameState<G>& state) override {
        LlmRequest request;
        request.model = client_->config().model;
        request.prompt = render_prompt(templates_.evaluate, state);
        request.n = 1;
        request.temperature = 0.0;
        request.max_tokens = max_tokens_;
        auto texts = client_->complete(request);
        auto value = parse_first_number(texts.at(0));
        if (!value) {
            ++unparsable_;
            return 0.0;
        }
        return std::clamp(*value / 1000.0, -clamp_, clamp_);
    }

    std::string id() const override { return "llm"; }
    std::int64_t unparsable() const { return unparsable_; }

private:
    std::shared_ptr<LlmClient> client_;
    PromptTemplates templates_;
    double clamp_;
    int max_tokens_;
    std::int64_t unparsable_ = 0;
};

}  // namespace pmcts
