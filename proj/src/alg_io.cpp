#include "clo/alg_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace clo {

namespace {

using Json = nlohmann::ordered_json;

std::string type_name(const Json& j) { return j.type_name(); }

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key))
    throw SchemaError(std::string("missing field '") + key + "'", "$");
  return j.at(key);
}

std::string as_name(const Json& j, const std::string& where) {
  if (!j.is_string())
    throw SchemaError("expected an element name, got " + type_name(j), where);
  return j.get<std::string>();
}

}  // namespace

Algebra load_algebra_text(const std::string& text, bool validate) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what(), "$");
  }
  if (!j.is_object()) throw SchemaError("top level must be an object", "$");

  std::string name = field(j, "name").is_string()
                         ? j["name"].get<std::string>()
                         : throw SchemaError("'name' must be a string", "name");
  const Json& jelems = field(j, "elements");
  if (!jelems.is_array() || jelems.empty())
    throw SchemaError("'elements' must be a non-empty array", "elements");
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < jelems.size(); ++i) {
    std::string e = as_name(jelems[i], "elements[" + std::to_string(i) + "]");
    if (!index.emplace(e, static_cast<int>(i)).second)
      throw SchemaError("duplicate element '" + e + "'", "elements");
    names.push_back(std::move(e));
  }
  const int n = static_cast<int>(names.size());
  auto lookup = [&](const Json& v, const std::string& where) {
    std::string s = as_name(v, where);
    auto it = index.find(s);
    if (it == index.end())
      throw SchemaError("unknown element '" + s + "'", where);
    return it->second;
  };

  int unit = lookup(field(j, "unit"), "unit");

  const Json& jprod = field(j, "product");
  if (!jprod.is_array() || static_cast<int>(jprod.size()) != n)
    throw SchemaError("'product' must have one row per element", "product");
  std::vector<int> product(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    const Json& row = jprod[r];
    std::string where = "product[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw SchemaError("row must have one entry per element", where);
    for (int c = 0; c < n; ++c)
      product[r * n + c] =
          lookup(row[c], where + "[" + std::to_string(c) + "]");
  }

  auto unary = [&](const char* key) {
    const Json& arr = field(j, key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      throw SchemaError(std::string("'") + key +
                            "' must list one value per element",
                        key);
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i)
      out[i] = lookup(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
    return out;
  };
  std::vector<int> omega = unary("omega");
  std::vector<int> omegastar = unary("omegastar");

  std::map<Subset, int> entries;
  std::optional<int> default_value;
  if (j.contains("shuffle")) {
    const Json& js = j["shuffle"];
    if (!js.is_object())
      throw SchemaError("'shuffle' must be an object", "shuffle");
    if (js.contains("default"))
      default_value = lookup(js["default"], "shuffle.default");
    if (js.contains("entries")) {
      const Json& jent = js["entries"];
      if (!jent.is_array())
        throw SchemaError("'entries' must be an array", "shuffle.entries");
      for (std::size_t k = 0; k < jent.size(); ++k) {
        std::string where = "shuffle.entries[" + std::to_string(k) + "]";
        const Json& ent = jent[k];
        if (!ent.is_object() || !ent.contains("subset") ||
            !ent.contains("value"))
          throw SchemaError("entry needs 'subset' and 'value'", where);
        if (!ent["subset"].is_array() || ent["subset"].empty())
          throw SchemaError("'subset' must be a non-empty array", where);
        Subset s;
        for (const auto& v : ent["subset"])
          s.push_back(lookup(v, where + ".subset"));
        s = sorted_unique(std::move(s));
        int value = lookup(ent["value"], where + ".value");
        // normalize: the unit is absorbed unless the subset is {unit}
        if (s.size() > 1)
          s.erase(std::remove(s.begin(), s.end(), unit), s.end());
        if (s.size() == 1 && s[0] == unit) {
          if (value != unit)
            throw SchemaError("the shuffle of {unit} must be the unit", where);
          continue;
        }
        auto [it, fresh] = entries.emplace(s, value);
        if (!fresh && it->second != value)
          throw SchemaError("conflicting entries for one subset", where);
      }
    }
  }

  Algebra a = Algebra::make(
      std::move(name), std::move(names), unit, std::move(product),
      std::move(omega), std::move(omegastar),
      ShuffleTable::from_entries(std::move(entries), default_value));
  if (validate) {
    PropertyReport report = validate_axioms(a);
    for (const auto& check : report.checks) {
      if (!check.passed) {
        std::string witness;
        for (const auto& w : check.witness) witness += " " + w;
        throw Error("algebra '" + a.label() + "' violates " + check.name +
                    " at" + witness);
      }
    }
  }
  return a;
}

Algebra load_algebra_file(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_algebra_text(buffer.str(), validate);
}

std::string save_algebra_text(const Algebra& a) {
  Json j;
  j["name"] = a.label();
  j["elements"] = a.names();
  j["unit"] = a.name_of(a.unit());
  Json rows = Json::array();
  for (int r = 0; r < a.size(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < a.size(); ++c) row.push_back(a.name_of(a.mul(r, c)));
    rows.push_back(std::move(row));
  }
  j["product"] = std::move(rows);
  Json om = Json::array(), oms = Json::array();
  for (int i = 0; i < a.size(); ++i) {
    om.push_back(a.name_of(a.omega(i)));
    oms.push_back(a.name_of(a.omegastar(i)));
  }
  j["omega"] = std::move(om);
  j["omegastar"] = std::move(oms);

  Json shuffle = Json::object();
  const ShuffleTable& table = a.shuffle_table();
  std::map<Subset, int> entries;
  if (table.default_value() && !table.has_rule()) {
    shuffle["default"] = a.name_of(*table.default_value());
    entries = table.entries();
  } else {
    // materialize; undefined subsets are simply omitted
    for_each_nonunit_subset(a, [&](const Subset& s) {
      if (auto v = a.try_shuffle(s)) entries[s] = *v;
    });
  }
  Json jent = Json::array();
  for (const auto& [subset, value] : entries) {
    Json names = Json::array();
    for (int x : subset) names.push_back(a.name_of(x));
    jent.push_back(Json{{"subset", std::move(names)},
                        {"value", a.name_of(value)}});
  }
  if (!jent.empty()) shuffle["entries"] = std::move(jent);
  j["shuffle"] = std::move(shuffle);
  return j.dump(2) + "\n";
}

void save_algebra_file(const Algebra& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << save_algebra_text(a);
}

}  // namespace clo
