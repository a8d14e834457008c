#include "travwave/report.hpp"

#include <cmath>
#include <cstdio>

namespace travwave {

void JsonWriter::comma() {
    if (pendingKey_) {
        pendingKey_ = false;
        return;
    }
    if (!needComma_.empty()) {
        if (needComma_.back()) out_ += ',';
        needComma_.back() = true;
    }
}

JsonWriter& JsonWriter::beginObject() {
    comma();
    out_ += '{';
    needComma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::endObject() {
    out_ += '}';
    needComma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::beginArray() {
    comma();
    out_ += '[';
    needComma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::endArray() {
    out_ += ']';
    needComma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    comma();
    out_ += '"';
    out_ += k;
    out_ += "\":";
    pendingKey_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    if (std::isnan(v)) out_ += "\"nan\"";
    else if (std::isinf(v)) out_ += v > 0 ? "\"inf\"" : "\"-inf\"";
    else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12e", v);
        out_ += buf;
    }
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    comma();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    comma();
    out_ += '"';
    for (char c : v) {
        switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out_ += buf;
            } else out_ += c;
        }
    }
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::null() {
    comma();
    out_ += "null";
    return *this;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace travwave
