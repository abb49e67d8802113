#pragma once

// Minimal JSON-schema checker covering the subset used by the shipped
// schemas: type, required, properties, items, enum, minimum, maximum.

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace testutil {

inline bool schema_type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return false;
}

inline bool validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            std::string& error, const std::string& path = "$") {
    if (schema.contains("type") &&
        !schema_type_matches(value, schema["type"].get<std::string>())) {
        error = path + ": expected " + schema["type"].get<std::string>();
        return false;
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"])
            if (e == value) found = true;
        if (!found) {
            error = path + ": value not in enum";
            return false;
        }
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
            error = path + ": below minimum";
            return false;
        }
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
            error = path + ": above maximum";
            return false;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>())) {
                    error = path + ": missing required key " + key.get<std::string>();
                    return false;
                }
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema["properties"].items())
                if (value.contains(key) &&
                    !validate_schema(value[key], sub, error, path + "." + key))
                    return false;
    }
    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i)
            if (!validate_schema(value[i], schema["items"], error,
                                 path + "[" + std::to_string(i) + "]"))
                return false;
    }
    return true;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

} // namespace testutil
