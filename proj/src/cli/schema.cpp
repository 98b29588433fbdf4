#include "edcast/cli/schema.hpp"

#include <cmath>
#include <regex>

namespace edcast::cli {

namespace {

using nlohmann::json;

std::string type_of(const json& v) {
    switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "number";
    case json::value_t::string: return "string";
    case json::value_t::array: return "array";
    case json::value_t::object: return "object";
    default: return "unknown";
    }
}

bool has_type(const json& v, const std::string& t) {
    if (t == "number") return v.is_number();
    if (t == "integer") {
        if (v.is_number_integer()) return true;
        if (!v.is_number_float()) return false;
        double d = v.get<double>();
        return std::isfinite(d) && d == std::floor(d);
    }
    return type_of(v) == t;
}

bool json_equal(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
    return a == b;
}

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void check(const json& v, const json& s, const std::string& at, std::vector<std::string>& errs) const {
        if (s.is_boolean()) {
            if (!s.get<bool>()) errs.push_back(where(at) + ": no value is allowed here");
            return;
        }
        if (s.contains("$ref")) {
            check(v, resolve(s["$ref"].get<std::string>()), at, errs);
            return;
        }
        if (s.contains("type")) {
            const auto& t = s["type"];
            bool ok = false;
            std::string names;
            if (t.is_string()) {
                ok = has_type(v, t.get<std::string>());
                names = t.get<std::string>();
            } else {
                for (const auto& x : t) {
                    ok = ok || has_type(v, x.get<std::string>());
                    names += (names.empty() ? "" : " or ") + x.get<std::string>();
                }
            }
            if (!ok) {
                errs.push_back(where(at) + ": expected " + names + ", got " + type_of(v));
                return;
            }
        }
        if (s.contains("const") && !json_equal(v, s["const"])) {
            errs.push_back(where(at) + ": must equal " + s["const"].dump());
        }
        if (s.contains("enum")) {
            bool found = false;
            for (const auto& e : s["enum"]) found = found || json_equal(v, e);
            if (!found) errs.push_back(where(at) + ": " + v.dump() + " is not one of " + s["enum"].dump());
        }
        if (v.is_number()) check_number(v.get<double>(), s, at, errs);
        if (v.is_string()) check_string(v.get<std::string>(), s, at, errs);
        if (v.is_array()) check_array(v, s, at, errs);
        if (v.is_object()) check_object(v, s, at, errs);
        if (s.contains("anyOf")) {
            bool any = false;
            for (const auto& sub : s["anyOf"]) {
                std::vector<std::string> e;
                check(v, sub, at, e);
                if (e.empty()) {
                    any = true;
                    break;
                }
            }
            if (!any) errs.push_back(where(at) + ": matches none of the allowed forms");
        }
        if (s.contains("oneOf")) {
            std::size_t matched = 0;
            std::vector<std::string> closest;
            for (const auto& sub : s["oneOf"]) {
                std::vector<std::string> e;
                check(v, sub, at, e);
                if (e.empty()) ++matched;
                else if (closest.empty() || e.size() < closest.size()) closest = std::move(e);
            }
            if (matched == 0) {
                errs.push_back(where(at) + ": matches none of the allowed forms");
                for (auto& e : closest) errs.push_back("  closest form: " + e);
            } else if (matched > 1) {
                errs.push_back(where(at) + ": matches more than one allowed form");
            }
        }
    }

private:
    static std::string where(const std::string& at) { return at.empty() ? "/" : at; }

    const json& resolve(const std::string& ref) const {
        if (ref.empty() || ref[0] != '#') throw std::invalid_argument("only local schema references are supported: " + ref);
        return root_.at(json::json_pointer(ref.substr(1)));
    }

    void check_number(double x, const json& s, const std::string& at, std::vector<std::string>& errs) const {
        if (s.contains("minimum") && x < s["minimum"].get<double>()) {
            errs.push_back(where(at) + ": must be >= " + s["minimum"].dump());
        }
        if (s.contains("maximum") && x > s["maximum"].get<double>()) {
            errs.push_back(where(at) + ": must be <= " + s["maximum"].dump());
        }
        if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
            errs.push_back(where(at) + ": must be > " + s["exclusiveMinimum"].dump());
        }
        if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) {
            errs.push_back(where(at) + ": must be < " + s["exclusiveMaximum"].dump());
        }
    }

    void check_string(const std::string& x, const json& s, const std::string& at, std::vector<std::string>& errs) const {
        if (s.contains("minLength") && x.size() < s["minLength"].get<std::size_t>()) {
            errs.push_back(where(at) + ": must have at least " + s["minLength"].dump() + " characters");
        }
        if (s.contains("pattern") && !std::regex_search(x, std::regex(s["pattern"].get<std::string>()))) {
            errs.push_back(where(at) + ": does not match " + s["pattern"].dump());
        }
    }

    void check_array(const json& v, const json& s, const std::string& at, std::vector<std::string>& errs) const {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
            errs.push_back(where(at) + ": needs at least " + s["minItems"].dump() + " items");
        }
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
            errs.push_back(where(at) + ": allows at most " + s["maxItems"].dump() + " items");
        }
        if (s.value("uniqueItems", false)) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                for (std::size_t j = i + 1; j < v.size(); ++j) {
                    if (json_equal(v[i], v[j])) {
                        errs.push_back(where(at) + ": duplicate item " + v[i].dump());
                    }
                }
            }
        }
        if (s.contains("items")) {
            for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], at + "/" + std::to_string(i), errs);
        }
    }

    void check_object(const json& v, const json& s, const std::string& at, std::vector<std::string>& errs) const {
        if (s.contains("required")) {
            for (const auto& k : s["required"]) {
                if (!v.contains(k.get<std::string>())) {
                    errs.push_back(where(at) + ": missing required property \"" + k.get<std::string>() + "\"");
                }
            }
        }
        const json* props = s.contains("properties") ? &s["properties"] : nullptr;
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string child = at + "/" + escape_token(it.key());
            if (s.contains("propertyNames")) {
                std::vector<std::string> e;
                check(json(it.key()), s["propertyNames"], child, e);
                if (!e.empty()) errs.push_back(child + ": property name \"" + it.key() + "\" is not allowed");
            }
            if (props && props->contains(it.key())) {
                check(it.value(), (*props)[it.key()], child, errs);
            } else if (s.contains("additionalProperties")) {
                const auto& ap = s["additionalProperties"];
                if (ap.is_boolean() && !ap.get<bool>()) {
                    errs.push_back(where(at) + ": unknown property \"" + it.key() + "\"");
                } else {
                    check(it.value(), ap, child, errs);
                }
            }
        }
    }

    const json& root_;
};

} // namespace

std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema) {
    std::vector<std::string> errs;
    Validator(schema).check(instance, schema, "", errs);
    return errs;
}

} // namespace edcast::cli
