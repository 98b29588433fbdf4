#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace edcast::cli {

/// Checks `instance` against a draft-07 schema restricted to the keywords
/// the bundled schemas use: $ref (local), type, const, enum, properties,
/// required, additionalProperties, propertyNames, items, minItems, maxItems,
/// uniqueItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
/// minLength, pattern, oneOf and anyOf. Each error reads "<pointer>: <reason>";
/// an empty result means valid.
std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema);

const nlohmann::json& experiment_schema();
const nlohmann::json& dgp_spec_schema();

} // namespace edcast::cli
