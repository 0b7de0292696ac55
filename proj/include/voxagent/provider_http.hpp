#pragma once

// Remote plan provider: POSTs the transcript to a chat-completion endpoint.
// Transport failures are infrastructure errors, kept distinct from plan
// failures so the harness can exclude those episodes from its denominators.

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "planner.hpp"

namespace voxagent {

class RemoteProvider : public PlanProvider {
  public:
    std::string url;    // e.g. http://host:8080/v1/chat
    std::string key;    // bearer token, optional
    std::string model;  // model name passed through
    int max_retries = 3;
    int timeout_seconds = 60;

    RemoteProvider(std::string url_, std::string key_ = "", std::string model_ = "")
        : url(std::move(url_)), key(std::move(key_)), model(std::move(model_)) {}

    // PROVIDER_URL is required; PROVIDER_KEY and PROVIDER_MODEL are optional.
    static RemoteProvider from_env() {
        const char* u = std::getenv("PROVIDER_URL");
        if (!u || !*u) throw ProviderError("PROVIDER_URL is not set");
        const char* k = std::getenv("PROVIDER_KEY");
        const char* m = std::getenv("PROVIDER_MODEL");
        return RemoteProvider(u, k ? k : "", m ? m : "");
    }

    std::string complete(const std::vector<ChatMessage>& transcript) override {
        json msgs = json::array();
        for (const auto& m : transcript) msgs.push_back(m.to_json());
        json body = {{"model", model}, {"messages", std::move(msgs)}};
        std::string payload = body.dump();

        auto [base, path] = split_url(url);
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt < max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
            httplib::Client cli(base);
            cli.set_connection_timeout(timeout_seconds, 0);
            cli.set_read_timeout(timeout_seconds, 0);
            cli.set_write_timeout(timeout_seconds, 0);
            httplib::Headers headers;
            if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
            auto res = cli.Post(path, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            json doc = json::parse(res->body, nullptr, false);
            if (doc.is_discarded()) {
                last_error = "endpoint returned non-JSON body";
                continue;
            }
            if (doc.contains("content") && doc.at("content").is_string())
                return doc.at("content").get<std::string>();
            // tolerate the common nested layout
            if (doc.contains("choices") && doc.at("choices").is_array() &&
                !doc.at("choices").empty()) {
                const json& ch = doc.at("choices").front();
                if (ch.contains("message") && ch.at("message").contains("content") &&
                    ch.at("message").at("content").is_string())
                    return ch.at("message").at("content").get<std::string>();
            }
            last_error = "response body has no content field";
        }
        throw ProviderError("chat endpoint failed after " + std::to_string(max_retries) +
                            " attempts: " + last_error);
    }

  private:
    static std::pair<std::string, std::string> split_url(const std::string& u) {
        auto scheme = u.find("://");
        size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
        auto slash = u.find('/', host_start);
        if (slash == std::string::npos) return {u, "/"};
        return {u.substr(0, slash), u.substr(slash)};
    }
};

}  // namespace voxagent
