#pragma once

#include <cstdint>
#include <type_traits>
#include <string>
#include <vector>

namespace travwave {

/// Deterministic JSON emitter: fixed field order (insertion order), all
/// floating-point values rendered with %.12e, non-finite values as the
/// strings "inf" / "-inf" / "nan". Identical inputs give identical bytes.
class JsonWriter {
public:
    JsonWriter& beginObject();
    JsonWriter& endObject();
    JsonWriter& beginArray();
    JsonWriter& endArray();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(long long v);
    template <typename T>
        requires(std::is_integral_v<T> && !std::is_same_v<T, bool> && !std::is_same_v<T, long long>)
    JsonWriter& value(T v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& null();

    template <typename T>
    JsonWriter& kv(const std::string& k, const T& v) {
        key(k);
        return value(v);
    }

    std::string str() const { return out_; }

private:
    void comma();
    std::string out_;
    std::vector<bool> needComma_;
    bool pendingKey_ = false;
};

/// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

} // namespace travwave
