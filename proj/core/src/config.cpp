#include "travwave/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace travwave {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset reader. Supports: # comments, [table] and [table.sub] headers,
// bare or quoted keys, values = number | "string" | true/false | [array]
// | { inline table }. Arrays may span lines. That covers the problem schema;
// anything else is rejected with a line number.
// ---------------------------------------------------------------------------

class TomlSubset {
public:
    explicit TomlSubset(const std::string& text) : text_(text) {}

    json run() {
        json root = json::object();
        json* table = &root;
        std::size_t lineNo = 0;
        std::istringstream in(text_);
        std::string line;
        while (std::getline(in, line)) {
            ++lineNo;
            std::string s = stripComment(line);
            if (trim(s).empty()) continue;
            std::string t = trim(s);
            if (t.front() == '[') {
                if (t.back() != ']') fail(lineNo, "malformed table header");
                table = &descend(root, trim(t.substr(1, t.size() - 2)), lineNo);
                continue;
            }
            auto eq = findTopLevelEquals(t);
            if (eq == std::string::npos) fail(lineNo, "expected key = value");
            std::string key = parseKey(trim(t.substr(0, eq)), lineNo);
            std::string valText = trim(t.substr(eq + 1));
            // array/inline-table values may continue on following lines
            while (!balanced(valText)) {
                std::string more;
                if (!std::getline(in, more)) fail(lineNo, "unterminated value");
                ++lineNo;
                valText += "\n" + stripComment(more);
            }
            if (table->contains(key)) fail(lineNo, "duplicate key '" + key + "'");
            std::size_t pos = 0;
            (*table)[key] = parseValue(valText, pos, lineNo);
            skipWs(valText, pos);
            if (pos != valText.size()) fail(lineNo, "trailing characters after value");
        }
        return root;
    }

private:
    [[noreturn]] void fail(std::size_t line, const std::string& what) {
        throw ConfigError("toml line " + std::to_string(line) + ": " + what);
    }

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static std::string stripComment(const std::string& s) {
        bool inStr = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') inStr = !inStr;
            else if (s[i] == '#' && !inStr) return s.substr(0, i);
        }
        return s;
    }

    static bool balanced(const std::string& s) {
        int depth = 0;
        bool inStr = false;
        for (char c : s) {
            if (c == '"') inStr = !inStr;
            else if (!inStr && (c == '[' || c == '{')) ++depth;
            else if (!inStr && (c == ']' || c == '}')) --depth;
        }
        return depth <= 0 && !inStr;
    }

    static std::size_t findTopLevelEquals(const std::string& s) {
        bool inStr = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') inStr = !inStr;
            else if (s[i] == '=' && !inStr) return i;
        }
        return std::string::npos;
    }

    std::string parseKey(const std::string& raw, std::size_t line) {
        if (raw.empty()) fail(line, "empty key");
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated quoted key");
            return raw.substr(1, raw.size() - 2);
        }
        for (char c : raw)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
                fail(line, "invalid character in bare key");
        return raw;
    }

    json& descend(json& root, const std::string& dotted, std::size_t line) {
        json* cur = &root;
        std::size_t start = 0;
        while (start <= dotted.size()) {
            std::size_t dot = dotted.find('.', start);
            std::string part = parseKey(trim(dotted.substr(start, dot - start)), line);
            if (part.empty()) fail(line, "empty table name component");
            if (!cur->contains(part)) (*cur)[part] = json::object();
            cur = &(*cur)[part];
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        return *cur;
    }

    static void skipWs(const std::string& s, std::size_t& pos) {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    json parseValue(const std::string& s, std::size_t& pos, std::size_t line) {
        skipWs(s, pos);
        if (pos >= s.size()) fail(line, "missing value");
        char c = s[pos];
        if (c == '"') return parseString(s, pos, line);
        if (c == '[') return parseArray(s, pos, line);
        if (c == '{') return parseInlineTable(s, pos, line);
        if (s.compare(pos, 4, "true") == 0) { pos += 4; return json(true); }
        if (s.compare(pos, 5, "false") == 0) { pos += 5; return json(false); }
        return parseNumber(s, pos, line);
    }

    json parseString(const std::string& s, std::size_t& pos, std::size_t line) {
        ++pos; // opening quote
        std::string out;
        while (pos < s.size() && s[pos] != '"') {
            if (s[pos] == '\\' && pos + 1 < s.size()) {
                char e = s[++pos];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(line, "unsupported escape in string");
                }
                ++pos;
            } else {
                out += s[pos++];
            }
        }
        if (pos >= s.size()) fail(line, "unterminated string");
        ++pos; // closing quote
        return json(out);
    }

    json parseNumber(const std::string& s, std::size_t& pos, std::size_t line) {
        std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) ||
                                  s[pos] == '+' || s[pos] == '-' || s[pos] == '.' ||
                                  s[pos] == 'e' || s[pos] == 'E' || s[pos] == '_'))
            ++pos;
        std::string text = s.substr(start, pos - start);
        std::erase(text, '_');
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) fail(line, "malformed number '" + text + "'");
            return json(v);
        } catch (const std::exception&) {
            fail(line, "malformed number '" + text + "'");
        }
    }

    json parseArray(const std::string& s, std::size_t& pos, std::size_t line) {
        ++pos; // '['
        json arr = json::array();
        skipWs(s, pos);
        if (pos < s.size() && s[pos] == ']') { ++pos; return arr; }
        for (;;) {
            arr.push_back(parseValue(s, pos, line));
            skipWs(s, pos);
            if (pos < s.size() && s[pos] == ',') { ++pos; skipWs(s, pos); if (pos < s.size() && s[pos] == ']') { ++pos; break; } continue; }
            if (pos < s.size() && s[pos] == ']') { ++pos; break; }
            fail(line, "expected ',' or ']' in array");
        }
        return arr;
    }

    json parseInlineTable(const std::string& s, std::size_t& pos, std::size_t line) {
        ++pos; // '{'
        json obj = json::object();
        skipWs(s, pos);
        if (pos < s.size() && s[pos] == '}') { ++pos; return obj; }
        for (;;) {
            skipWs(s, pos);
            std::string key;
            if (pos < s.size() && s[pos] == '"') key = parseString(s, pos, line).get<std::string>();
            else {
                std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                          s[pos] == '_' || s[pos] == '-' || s[pos] == '.'))
                    ++pos;
                key = s.substr(start, pos - start);
                if (key.empty()) fail(line, "empty key in inline table");
            }
            skipWs(s, pos);
            if (pos >= s.size() || s[pos] != '=') fail(line, "expected '=' in inline table");
            ++pos;
            obj[key] = parseValue(s, pos, line);
            skipWs(s, pos);
            if (pos < s.size() && s[pos] == ',') { ++pos; continue; }
            if (pos < s.size() && s[pos] == '}') { ++pos; break; }
            fail(line, "expected ',' or '}' in inline table");
        }
        return obj;
    }

    const std::string& text_;
};

// ---------------------------------------------------------------------------
// Schema: { p, s_star, d, g, h }; each coefficient { breakpoints, segments,
// values? }. `values` keys are the breakpoint locations rendered as numbers.
// ---------------------------------------------------------------------------

void requireKeys(const json& obj, std::initializer_list<const char*> allowed,
                 std::initializer_list<const char*> required, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
    for (const char* k : required)
        if (!obj.contains(k)) throw ConfigError("missing key '" + std::string(k) + "' in " + where);
}

double asNumber(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

PiecewiseFunction coefficientFromJson(const json& obj, const std::string& name, PointValueRule rule) {
    if (!obj.is_object()) throw ConfigError("coefficient '" + name + "' must be a table");
    requireKeys(obj, {"breakpoints", "segments", "values"}, {"breakpoints", "segments"}, "'" + name + "'");

    const json& bj = obj.at("breakpoints");
    const json& sj = obj.at("segments");
    if (!bj.is_array() || !sj.is_array())
        throw ConfigError("'" + name + "': breakpoints and segments must be arrays");

    std::vector<double> breaks;
    for (const auto& v : bj) breaks.push_back(asNumber(v, name + ".breakpoints entry"));
    std::vector<std::string> sources;
    for (const auto& v : sj) {
        if (!v.is_string()) throw ConfigError("'" + name + "': segments must be strings");
        sources.push_back(v.get<std::string>());
    }

    std::vector<std::optional<double>> declared(breaks.size());
    if (obj.contains("values")) {
        const json& vj = obj.at("values");
        if (!vj.is_object()) throw ConfigError("'" + name + "': values must be a table");
        for (auto it = vj.begin(); it != vj.end(); ++it) {
            double where;
            try {
                std::size_t used = 0;
                where = std::stod(it.key(), &used);
                if (used != it.key().size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ConfigError("'" + name + "': values key '" + it.key() + "' is not a breakpoint location");
            }
            bool matched = false;
            for (std::size_t k = 0; k < breaks.size(); ++k) {
                if (std::fabs(breaks[k] - where) <= 1e-12) {
                    declared[k] = asNumber(it.value(), name + ".values entry");
                    matched = true;
                    break;
                }
            }
            if (!matched)
                throw ConfigError("'" + name + "': values key '" + it.key() + "' matches no breakpoint");
        }
    }

    try {
        return PiecewiseFunction::fromStrings(std::move(breaks), sources, std::move(declared), rule);
    } catch (const SyntaxError& e) {
        throw ConfigError("'" + name + "': " + e.what());
    }
}

ProblemSpec specFromJson(const json& root) {
    if (!root.is_object()) throw ConfigError("problem file must contain a table/object");
    requireKeys(root, {"p", "s_star", "d", "g", "h"}, {"p", "s_star", "d", "g", "h"}, "problem file");

    double p = asNumber(root.at("p"), "p");
    double sStar = asNumber(root.at("s_star"), "s_star");
    PiecewiseFunction d = coefficientFromJson(root.at("d"), "d", PointValueRule::MinOfSides);
    PiecewiseFunction g = coefficientFromJson(root.at("g"), "g", PointValueRule::RightLimit);
    PiecewiseFunction h = coefficientFromJson(root.at("h"), "h", PointValueRule::RightLimit);
    return ProblemSpec::make(p, sStar, std::move(d), std::move(g), std::move(h));
}

} // namespace

ProblemSpec parse_problem_text(const std::string& text, bool isJson) {
    json root;
    if (isJson) {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("json: ") + e.what());
        }
    } else {
        root = TomlSubset(text).run();
    }
    return specFromJson(root);
}

LoadedProblem load_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open problem file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    bool isJson;
    std::string ext = path.extension().string();
    if (ext == ".json") isJson = true;
    else if (ext == ".toml") isJson = false;
    else {
        std::size_t i = text.find_first_not_of(" \t\r\n");
        isJson = (i != std::string::npos && text[i] == '{');
    }

    LoadedProblem lp;
    lp.spec = parse_problem_text(text, isJson);
    lp.rawBytes = std::move(text);
    lp.path = path.string();
    return lp;
}

} // namespace travwave
