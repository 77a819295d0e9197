#pragma once

// Indicator download from a World Bank style JSON API:
//   GET {base}/country/all/indicator/{code}?format=json&date=YYYY:YYYY&page=N&per_page=M
// Pages are merged into one long-schema CSV per descriptor and cached on disk.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

// <resolv.h>, pulled in by httplib, defines _res, which collides with
// Eigen's internal parameter names.
#ifdef _res
#undef _res
#endif

#include "panelecon/csv.hpp"
#include "panelecon/error.hpp"

namespace panelecon::fetch {

struct IndicatorDescriptor {
    std::string provider = "worldbank";
    std::string code;
    int start_year = 0;
    int end_year = 0;
    std::string variable;  // column name in the cached CSV; defaults to the code

    std::string variable_name() const { return variable.empty() ? code : variable; }
};

struct FetchOptions {
    std::string base_url = "https://api.worldbank.org/v2";
    std::filesystem::path cache_dir = "cache";
    int per_page = 1000;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{30};
};

struct FetchOutcome {
    IndicatorDescriptor descriptor;
    std::filesystem::path file;
    bool ok = false;
    bool from_cache = false;
    std::size_t rows = 0;
    std::size_t pages = 0;
    int network_calls = 0;
    int http_status = 0;
    std::string error;
};

namespace detail {

struct BaseUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash
};

inline BaseUrl split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("fetch: base URL '" + url + "' has no scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    BaseUrl b;
    b.origin = url.substr(0, path_start);
    b.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!b.prefix.empty() && b.prefix.back() == '/') b.prefix.pop_back();
    return b;
}

inline std::string safe_component(const std::string& s) {
    std::string out;
    for (char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

struct Page {
    int page = 0;
    int pages = 0;
    std::vector<std::string> rows;  // rendered CSV lines
};

/// Thrown for a body that is not the expected paged JSON shape.
struct MalformedPayload : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Provider-level error object, e.g. an unknown indicator code.
struct ProviderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Page parse_page(const std::string& body, const std::string& variable) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedPayload(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty() || !j[0].is_object()) throw MalformedPayload("expected a JSON array headed by a paging object");
    const auto& head = j[0];
    if (head.contains("message")) {
        std::string msg;
        for (const auto& m : head["message"]) {
            if (!msg.empty()) msg += "; ";
            msg += "provider error " + m.value("id", std::string("?")) + " (" + m.value("key", std::string()) +
                   "): " + m.value("value", std::string());
        }
        throw ProviderError(msg.empty() ? "provider error" : msg);
    }
    auto as_int = [](const nlohmann::json& v) -> int {
        if (v.is_number_integer()) return v.get<int>();
        if (v.is_string()) return std::stoi(v.get<std::string>());
        throw MalformedPayload("non-integer paging field");
    };
    Page p;
    try {
        p.page = as_int(head.at("page"));
        p.pages = as_int(head.at("pages"));
    } catch (const nlohmann::json::exception&) {
        throw MalformedPayload("paging object lacks page/pages");
    } catch (const std::invalid_argument&) {
        throw MalformedPayload("paging field is not a number");
    }
    if (j.size() < 2 || j[1].is_null()) return p;  // no data rows
    if (!j[1].is_array()) throw MalformedPayload("data element is not an array");
    for (const auto& rec : j[1]) {
        if (!rec.is_object()) throw MalformedPayload("data record is not an object");
        std::string entity = rec.value("countryiso3code", std::string());
        if (entity.empty() && rec.contains("country") && rec["country"].is_object()) {
            entity = rec["country"].value("id", std::string());
        }
        const std::string year = rec.value("date", std::string());
        if (entity.empty() || !csv::parse_year(year)) throw MalformedPayload("data record lacks country code or year");
        std::string value = "NA";
        if (rec.contains("value") && rec["value"].is_number()) value = csv::format_roundtrip(rec["value"].get<double>());
        p.rows.push_back(csv::escape_field(entity) + "," + year + "," + csv::escape_field(variable) + "," + value);
    }
    return p;
}

inline void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Cache file for a descriptor: one per (provider, code, range).
inline std::filesystem::path cache_path(const IndicatorDescriptor& d, const FetchOptions& o) {
    return o.cache_dir / (detail::safe_component(d.provider) + "_" + detail::safe_component(d.code) + "_" +
                          std::to_string(d.start_year) + "-" + std::to_string(d.end_year) + ".csv");
}

/// Downloads every page of one descriptor, or reuses its cache file.
inline FetchOutcome fetch_indicator(const IndicatorDescriptor& d, const FetchOptions& o) {
    FetchOutcome out;
    out.descriptor = d;
    if (d.code.empty()) {
        out.error = "descriptor has an empty indicator code";
        return out;
    }
    if (d.provider != "worldbank") {
        out.error = "unsupported provider '" + d.provider + "'";
        return out;
    }
    if (d.start_year > d.end_year) {
        out.error = "year range " + std::to_string(d.start_year) + ":" + std::to_string(d.end_year) + " is empty";
        return out;
    }
    out.file = cache_path(d, o);
    if (std::filesystem::exists(out.file)) {
        out.ok = true;
        out.from_cache = true;
        std::ifstream in(out.file);
        std::string line;
        std::size_t lines = 0;
        while (std::getline(in, line)) ++lines;
        out.rows = lines > 0 ? lines - 1 : 0;
        return out;
    }

    const auto base = detail::split_base_url(o.base_url);
    httplib::Client client(base.origin);
    client.set_connection_timeout(o.timeout);
    client.set_read_timeout(o.timeout);
    client.set_follow_location(true);

    std::vector<std::string> rows;
    int page = 1;
    int pages = 1;
    while (page <= pages) {
        const std::string path = base.prefix + "/country/all/indicator/" + d.code +
                                 "?format=json&date=" + std::to_string(d.start_year) + ":" +
                                 std::to_string(d.end_year) + "&page=" + std::to_string(page) +
                                 "&per_page=" + std::to_string(o.per_page);
        std::optional<std::string> body;
        std::string last_error;
        auto backoff = o.initial_backoff;
        for (int attempt = 1; attempt <= o.max_attempts; ++attempt) {
            ++out.network_calls;
            auto res = client.Get(path);
            if (!res) {
                last_error = "HTTP request failed: " + httplib::to_string(res.error());
            } else {
                out.http_status = res->status;
                if (res->status == 200) {
                    body = res->body;
                    break;
                }
                last_error = "HTTP status " + std::to_string(res->status);
                // A 4xx other than rate limiting will not improve on retry;
                // surface any provider message it carries.
                if (res->status >= 400 && res->status < 500 && res->status != 429) {
                    try {
                        detail::parse_page(res->body, d.variable_name());
                    } catch (const detail::ProviderError& e) {
                        last_error += ": " + std::string(e.what());
                    } catch (const std::exception&) {
                    }
                    break;
                }
            }
            if (attempt < o.max_attempts) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
        }
        if (!body) {
            out.error = d.code + ": " + last_error;
            return out;
        }
        try {
            auto p = detail::parse_page(*body, d.variable_name());
            pages = std::max(p.pages, 1);
            rows.insert(rows.end(), std::make_move_iterator(p.rows.begin()), std::make_move_iterator(p.rows.end()));
            ++out.pages;
        } catch (const detail::ProviderError& e) {
            out.error = d.code + ": " + e.what() + " (HTTP status " + std::to_string(out.http_status) + ")";
            return out;
        } catch (const detail::MalformedPayload& e) {
            auto raw = out.file;
            raw.replace_extension(".page" + std::to_string(page) + ".raw");
            detail::write_atomically(raw, *body);
            out.error = d.code + ": malformed payload (" + e.what() + "); raw body saved to " + raw.string();
            return out;
        }
        ++page;
    }

    std::string csv_text = "entity,year,variable,value\n";
    for (const auto& r : rows) csv_text += r + "\n";
    detail::write_atomically(out.file, csv_text);
    out.rows = rows.size();
    out.ok = true;
    return out;
}

inline std::vector<FetchOutcome> fetch_indicators(const std::vector<IndicatorDescriptor>& descriptors,
                                                  const FetchOptions& options) {
    std::vector<FetchOutcome> out;
    out.reserve(descriptors.size());
    for (const auto& d : descriptors) out.push_back(fetch_indicator(d, options));
    return out;
}

}  // namespace panelecon::fetch
