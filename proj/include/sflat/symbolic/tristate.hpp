#pragma once

#include <map>
#include <string>

namespace sflat {

/// Three-valued verdict. `reason` is non-empty for inconclusive results and
/// `certificate` records the sample point (name -> value) backing a "no".
struct TriState {
    enum class Value { Yes, No, Inconclusive };

    Value value = Value::Inconclusive;
    std::string reason = "not evaluated";
    std::map<std::string, std::string> certificate;

    static TriState yes(std::string why = {}) { return {Value::Yes, std::move(why), {}}; }
    static TriState no(std::string why = {}, std::map<std::string, std::string> cert = {}) {
        return {Value::No, std::move(why), std::move(cert)};
    }
    static TriState inconclusive(std::string why) {
        if (why.empty()) why = "unspecified";
        return {Value::Inconclusive, std::move(why), {}};
    }

    bool is_yes() const { return value == Value::Yes; }
    bool is_no() const { return value == Value::No; }
    bool is_inconclusive() const { return value == Value::Inconclusive; }
};

inline const char* to_string(TriState::Value v) {
    switch (v) {
        case TriState::Value::Yes: return "yes";
        case TriState::Value::No: return "no";
        case TriState::Value::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string to_string(const TriState& t) { return to_string(t.value); }

/// yes+yes -> yes, any no -> no, otherwise the first inconclusive.
TriState combine_all(const TriState& a, const TriState& b);

}  // namespace sflat
