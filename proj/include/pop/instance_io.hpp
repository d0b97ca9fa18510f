#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pop/instance.hpp"

namespace pop {

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Number fields accept JSON numbers or strings ("0.35", "7/20").
Rational rational_from_json(const nlohmann::json& value);
/// Integers stay JSON numbers; everything else becomes an exact string.
nlohmann::json rational_to_json(const Rational& value);

/// Parses the instance schema. Broken references and missing entries are
/// reported as error diagnostics in `diagnostics` instead of throwing;
/// malformed JSON structure throws std::invalid_argument.
Instance instance_from_json(const nlohmann::json& doc, std::vector<Diagnostic>& diagnostics);

/// Parse + validate; throws ValidationError on any error diagnostic.
Instance load_instance(const nlohmann::json& doc);
Instance load_instance_text(const std::string& text);
Instance load_instance_file(const std::string& path);

/// Parse diagnostics followed by validate() diagnostics.
std::vector<Diagnostic> validate_json(const nlohmann::json& doc);

nlohmann::json to_json(const Instance& instance);
nlohmann::json to_json(const Diagnostic& diagnostic);
nlohmann::json to_json(const std::vector<Diagnostic>& diagnostics);

/// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string instance_hash(const Instance& instance);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace pop
