#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

namespace devcarbon {

struct HttpResponse {
    long status = 0;
    std::string body;
};

/// Minimal blocking HTTP interface. Implementations throw TransportError
/// when no response was received at all; HTTP error statuses are returned.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;

    virtual HttpResponse get(const std::string& url) = 0;
    virtual HttpResponse post(const std::string& url, const std::vector<std::string>& headers,
                              const std::string& body) = 0;
};

/// libcurl-backed transport.
std::unique_ptr<HttpTransport> make_curl_transport(std::chrono::seconds timeout = std::chrono::seconds{60});

std::string url_encode(const std::string& value);

}  // namespace devcarbon
