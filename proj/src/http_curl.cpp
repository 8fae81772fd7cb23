#include "devcarbon/error.hpp"
#include "devcarbon/http.hpp"

#include <curl/curl.h>

#include <cctype>
#include <cstdio>
#include <mutex>

namespace devcarbon {

namespace {

size_t append_body(char* data, size_t size, size_t count, void* user) {
    static_cast<std::string*>(user)->append(data, size * count);
    return size * count;
}

void global_init_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

struct CurlDeleter {
    void operator()(CURL* c) const { curl_easy_cleanup(c); }
};

struct SlistDeleter {
    void operator()(curl_slist* l) const { curl_slist_free_all(l); }
};

class CurlTransport final : public HttpTransport {
public:
    explicit CurlTransport(std::chrono::seconds timeout) : timeout_(timeout) { global_init_once(); }

    HttpResponse get(const std::string& url) override { return perform(url, nullptr, nullptr); }

    HttpResponse post(const std::string& url, const std::vector<std::string>& headers,
                      const std::string& body) override {
        return perform(url, &headers, &body);
    }

private:
    HttpResponse perform(const std::string& url, const std::vector<std::string>* headers, const std::string* body) {
        std::unique_ptr<CURL, CurlDeleter> curl(curl_easy_init());
        if (!curl) throw TransportError("curl_easy_init failed");

        HttpResponse response;
        std::unique_ptr<curl_slist, SlistDeleter> header_list;
        if (headers) {
            curl_slist* raw = nullptr;
            for (const auto& h : *headers) raw = curl_slist_append(raw, h.c_str());
            header_list.reset(raw);
        }

        curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
        curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, static_cast<long>(timeout_.count()));
        curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, append_body);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &response.body);
        curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, "devcarbon/0.1");
        if (header_list) curl_easy_setopt(curl.get(), CURLOPT_HTTPHEADER, header_list.get());
        if (body) {
            curl_easy_setopt(curl.get(), CURLOPT_POST, 1L);
            curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDS, body->c_str());
            curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDSIZE, static_cast<long>(body->size()));
        }

        CURLcode rc = curl_easy_perform(curl.get());
        if (rc != CURLE_OK) throw TransportError(std::string("HTTP request failed: ") + curl_easy_strerror(rc));
        curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &response.status);
        return response;
    }

    std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_curl_transport(std::chrono::seconds timeout) {
    return std::make_unique<CurlTransport>(timeout);
}

std::string url_encode(const std::string& value) {
    std::string out;
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

}  // namespace devcarbon
