#include "cbrm/case_library.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cbrm/errors.hpp"

namespace cbrm {

using json = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void collect(const GeneralizedEpisode& g, std::set<std::string>& seen,
             std::vector<const CaseRecord*>& out) {
  for (const auto& c : g.cases) {
    if (seen.insert(c.id).second) out.push_back(&c);
  }
  for (const auto& sub : g.sub_episodes) collect(sub, seen, out);
}

Rational mean_of(const std::vector<const CaseRecord*>& cases) {
  Rational sum = 0;
  for (const auto* c : cases) sum += case_measure(*c);
  return sum / static_cast<long long>(cases.size());
}

}  // namespace

std::size_t CaseLibrary::n() const { return distinct_cases(*this).size(); }

Rational case_measure(const CaseRecord& c) {
  return std::visit(
      overloaded{
          [](const Rational& t) { return t; },
          [](const CbrParameters& p) { return mean_phases(p); },
          [](const Trajectory& t) {
            if (!t.absorbed()) {
              throw Error(ErrorCode::NotAbsorbed, "trajectory ends before R4");
            }
            return mean_phases(estimate_parameters(std::span(&t, 1)).params);
          },
      },
      c.source);
}

std::vector<const CaseRecord*> distinct_cases(const GeneralizedEpisode& g) {
  std::set<std::string> seen;
  std::vector<const CaseRecord*> out;
  collect(g, seen, out);
  return out;
}

std::vector<const CaseRecord*> distinct_cases(const CaseLibrary& lib) {
  std::set<std::string> seen;
  std::vector<const CaseRecord*> out;
  for (const auto& g : lib.episodes) collect(g, seen, out);
  return out;
}

Rational episode_efficiency(const GeneralizedEpisode& g) {
  const auto cases = distinct_cases(g);
  if (cases.empty()) {
    throw Error(ErrorCode::EmptyEpisode, "episode '" + g.name + "' has no cases");
  }
  return mean_of(cases);
}

Rational system_efficiency(const CaseLibrary& lib) {
  if (lib.episodes.empty()) throw Error(ErrorCode::EmptyLibrary, "library has no episodes");
  Rational sum = 0;
  for (const auto& g : lib.episodes) sum += episode_efficiency(g);
  return sum / static_cast<long long>(lib.episodes.size());
}

Rational flat_efficiency(const CaseLibrary& lib) {
  const auto cases = distinct_cases(lib);
  if (cases.empty()) throw Error(ErrorCode::EmptyLibrary, "library has no cases");
  return mean_of(cases);
}

std::vector<Rational> flat_efficiency_trend(const CaseLibrary& lib) {
  std::vector<Rational> out;
  Rational sum = 0;
  long long k = 0;
  for (const auto* c : distinct_cases(lib)) {
    sum += case_measure(*c);
    out.push_back(sum / ++k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaError, where + ": " + what);
}

Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) {
    return Rational(v.is_number_unsigned() ? BigInt(v.get<std::uint64_t>())
                                           : BigInt(v.get<std::int64_t>()));
  }
  if (!v.is_string()) schema(where, "expected a rational string or integer");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const Error& e) {
    schema(where, e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing '") + key + "'");
  return *it;
}

class LibraryReader {
 public:
  explicit LibraryReader(const LoadOptions& options) : options_(options) {}

  CaseLibrary read(const json& doc) {
    if (!doc.is_object()) schema("$", "top level must be an object");
    for (const auto& [key, _] : doc.items()) {
      if (key != "episodes") schema("$", "unknown key '" + key + "'");
    }
    const json& eps = require(doc, "episodes", "$");
    if (!eps.is_array()) schema("$.episodes", "expected an array");
    CaseLibrary lib;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      lib.episodes.push_back(episode(eps[i], "$.episodes[" + std::to_string(i) + "]"));
    }
    lib.warnings = std::move(warnings_);
    return lib;
  }

 private:
  GeneralizedEpisode episode(const json& e, const std::string& where) {
    if (!e.is_object()) schema(where, "episode must be an object");
    GeneralizedEpisode g;
    for (const auto& [key, value] : e.items()) {
      if (key == "name") {
        if (!value.is_string()) schema(where + ".name", "expected a string");
        g.name = value.get<std::string>();
      } else if (key == "cases") {
        if (!value.is_array()) schema(where + ".cases", "expected an array");
        std::set<std::string> local;
        for (std::size_t i = 0; i < value.size(); ++i) {
          CaseRecord c = record(value[i], where + ".cases[" + std::to_string(i) + "]");
          if (!local.insert(c.id).second) {
            throw Error(ErrorCode::DuplicateCaseId,
                        "'" + c.id + "' listed twice in " + where + ".cases");
          }
          g.cases.push_back(std::move(c));
        }
      } else if (key == "sub_episodes") {
        if (!value.is_array()) schema(where + ".sub_episodes", "expected an array");
        for (std::size_t i = 0; i < value.size(); ++i) {
          g.sub_episodes.push_back(
              episode(value[i], where + ".sub_episodes[" + std::to_string(i) + "]"));
        }
      } else {
        schema(where, "unknown key '" + key + "'");
      }
    }
    if (!e.contains("name")) schema(where, "missing 'name'");
    return g;
  }

  CaseRecord record(const json& c, const std::string& where) {
    if (!c.is_object()) schema(where, "case must be an object");
    const json& id = require(c, "id", where);
    if (!id.is_string() || id.get<std::string>().empty()) {
      schema(where + ".id", "expected a non-empty string");
    }
    int sources = 0;
    for (const auto& [key, _] : c.items()) {
      if (key == "t" || key == "trajectory" || key == "params") {
        ++sources;
      } else if (key != "id") {
        schema(where, "unknown key '" + key + "'");
      }
    }
    if (sources != 1) schema(where, "exactly one of 't', 'trajectory', 'params' required");

    CaseRecord out{id.get<std::string>(), Rational(0)};
    if (c.contains("t")) {
      Rational t = rational_field(c["t"], where + ".t");
      if (t < 0) schema(where + ".t", "negative measure " + to_fraction(t));
      if (t < 3) {
        const std::string msg =
            where + ".t: measure " + to_fraction(t) + " is below the minimum of 3";
        if (!options_.allow_low_t) throw Error(ErrorCode::SchemaError, msg);
        warnings_.push_back(msg);
      }
      out.source = std::move(t);
    } else if (c.contains("trajectory")) {
      out.source = trajectory(c["trajectory"], where + ".trajectory");
    } else {
      out.source = params(c["params"], where + ".params");
    }

    const auto [it, inserted] = by_id_.emplace(out.id, out);
    if (!inserted && !(it->second == out)) {
      throw Error(ErrorCode::DuplicateCaseId,
                  "'" + out.id + "' at " + where + " differs from its earlier definition");
    }
    return out;
  }

  static Trajectory trajectory(const json& v, const std::string& where) {
    if (!v.is_array()) schema(where, "expected an array of labels");
    std::vector<std::string> labels;
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw Error(ErrorCode::InvalidTrajectory, where + ": labels must be strings");
      }
      labels.push_back(item.get<std::string>());
    }
    try {
      Trajectory t = validate_trajectory(std::span<const std::string>(labels));
      if (!t.absorbed()) {
        throw Error(ErrorCode::NotAbsorbed, "trajectory does not end at R4");
      }
      return t;
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidTrajectory, where + ": " + e.what());
    }
  }

  static CbrParameters params(const json& v, const std::string& where) {
    if (!v.is_object()) schema(where, "expected an object with p31, p33, p34");
    for (const auto& [key, _] : v.items()) {
      if (key != "p31" && key != "p33" && key != "p34") {
        schema(where, "unknown key '" + key + "'");
      }
    }
    Rational p31 = rational_field(require(v, "p31", where), where + ".p31");
    Rational p33 = rational_field(require(v, "p33", where), where + ".p33");
    Rational p34 = rational_field(require(v, "p34", where), where + ".p34");
    try {
      return CbrParameters(std::move(p31), std::move(p33), std::move(p34));
    } catch (const Error& e) {
      schema(where, e.what());
    }
  }

  LoadOptions options_;
  std::map<std::string, CaseRecord> by_id_;
  std::vector<std::string> warnings_;
};

json write_case(const CaseRecord& c) {
  json out{{"id", c.id}};
  std::visit(overloaded{
                 [&](const Rational& t) { out["t"] = to_fraction(t); },
                 [&](const Trajectory& t) { out["trajectory"] = t.labels(); },
                 [&](const CbrParameters& p) {
                   out["params"] = {{"p31", to_fraction(p.p31())},
                                    {"p33", to_fraction(p.p33())},
                                    {"p34", to_fraction(p.p34())}};
                 },
             },
             c.source);
  return out;
}

json write_episode(const GeneralizedEpisode& g) {
  json cases = json::array();
  for (const auto& c : g.cases) cases.push_back(write_case(c));
  json subs = json::array();
  for (const auto& s : g.sub_episodes) subs.push_back(write_episode(s));
  return {{"name", g.name}, {"cases", std::move(cases)}, {"sub_episodes", std::move(subs)}};
}

}  // namespace

CaseLibrary parse_library(std::istream& in, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return LibraryReader(options).read(doc);
}

CaseLibrary parse_library_text(const std::string& text, const LoadOptions& options) {
  std::istringstream in(text);
  return parse_library(in, options);
}

CaseLibrary load_library(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  return parse_library(in, options);
}

std::string serialize_library(const CaseLibrary& lib) {
  json eps = json::array();
  for (const auto& g : lib.episodes) eps.push_back(write_episode(g));
  return json{{"episodes", std::move(eps)}}.dump(2) + "\n";
}

}  // namespace cbrm
