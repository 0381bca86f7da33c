#pragma once

// Game datasets: CSV / JSON-lines I/O, synthetic trust-game generation by
// rejection sampling, simulated trustee behavior, and estimation/prediction
// splits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trustlab/error.hpp"
#include "trustlab/format.hpp"
#include "trustlab/measures.hpp"
#include "trustlab/payoff.hpp"
#include "trustlab/random.hpp"
#include "trustlab/trust_game.hpp"

namespace trustlab {

enum class PartnerType { kHumanHuman, kHumanMachine, kUnspecified };

enum class RiskType {
  kPhysical,
  kPsychological,
  kSocial,
  kTimeLoss,
  kPerformance,
  kFinancial,
  kEthical,
  kPrivacy,
  kSecurity,
  kUnspecified,
};

enum class Split { kEstimation, kPrediction };

namespace detail {

inline constexpr std::array<std::pair<PartnerType, std::string_view>, 3>
    kPartnerNames{{{PartnerType::kHumanHuman, "human_human"},
                   {PartnerType::kHumanMachine, "human_machine"},
                   {PartnerType::kUnspecified, "unspecified"}}};

inline constexpr std::array<std::pair<RiskType, std::string_view>, 10>
    kRiskNames{{{RiskType::kPhysical, "physical"},
                {RiskType::kPsychological, "psychological"},
                {RiskType::kSocial, "social"},
                {RiskType::kTimeLoss, "time_loss"},
                {RiskType::kPerformance, "performance"},
                {RiskType::kFinancial, "financial"},
                {RiskType::kEthical, "ethical"},
                {RiskType::kPrivacy, "privacy"},
                {RiskType::kSecurity, "security"},
                {RiskType::kUnspecified, "unspecified"}}};

}  // namespace detail

inline std::string_view to_string(PartnerType p) {
  for (const auto& [k, v] : detail::kPartnerNames)
    if (k == p) return v;
  return "unspecified";
}

inline std::string_view to_string(RiskType r) {
  for (const auto& [k, v] : detail::kRiskNames)
    if (k == r) return v;
  return "unspecified";
}

inline std::string_view to_string(Split s) {
  return s == Split::kEstimation ? "estimation" : "prediction";
}

inline std::optional<PartnerType> parse_partner_type(std::string_view s) {
  if (s.empty()) return PartnerType::kUnspecified;
  for (const auto& [k, v] : detail::kPartnerNames)
    if (v == s) return k;
  return std::nullopt;
}

inline std::optional<RiskType> parse_risk_type(std::string_view s) {
  if (s.empty()) return RiskType::kUnspecified;
  for (const auto& [k, v] : detail::kRiskNames)
    if (v == s) return k;
  return std::nullopt;
}

struct GameRecord {
  std::string game_id;
  PayoffMatrix payoffs;
  std::optional<double> pr_trust;
  std::optional<double> pr_fulfill;
  std::optional<int> trust_decision;
  PartnerType partner_type = PartnerType::kUnspecified;
  RiskType risk_type = RiskType::kUnspecified;
  std::optional<double> scale_magnitude;
  std::optional<Split> split;
  // Values of unrecognized CSV columns, aligned with
  // GameDataset::extra_columns.
  std::vector<std::string> extras;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

struct GameDataset {
  std::vector<GameRecord> records;
  std::vector<std::string> extra_columns;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Labels partition the records only if every record carries one.
  bool has_split_labels() const {
    return !records.empty() &&
           std::all_of(records.begin(), records.end(),
                       [](const GameRecord& r) { return r.split.has_value(); });
  }

  GameDataset subset(Split s) const {
    GameDataset out{{}, extra_columns};
    for (const GameRecord& r : records)
      if (r.split == s) out.records.push_back(r);
    return out;
  }

  friend bool operator==(const GameDataset&, const GameDataset&) = default;
};

inline constexpr std::array<std::string_view, 16> kCsvColumns{
    "game_id",  "a11",        "a12",        "a21",
    "a22",      "b11",        "b12",        "b21",
    "b22",      "pr_trust",   "pr_fulfill", "trust_decision",
    "partner_type", "risk_type", "scale_magnitude", "split"};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

// Splits one CSV record (RFC 4180 quoting). Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field at line " +
                                  std::to_string(line + 1));
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line;
  return true;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string optional_to_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline GameDataset parse_csv(std::istream& in) {
  std::vector<std::string> header;
  std::size_t line = 0;
  if (!detail::read_csv_record(in, header, line)) {
    throw InputError("csv: missing header row");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0].erase(0, 3);
  }
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!index.emplace(header[i], i).second) {
      throw InputError("csv: duplicate column '" + header[i] + "'");
    }
  }
  for (std::string_view required :
       {"game_id", "a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22"}) {
    if (!index.count(required)) {
      throw InputError("csv: missing required column '" +
                       std::string(required) + "'");
    }
  }
  GameDataset ds;
  std::vector<std::size_t> extra_idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(kCsvColumns.begin(), kCsvColumns.end(), header[i]) ==
        kCsvColumns.end()) {
      ds.extra_columns.push_back(header[i]);
      extra_idx.push_back(i);
    }
  }

  std::vector<std::string> fields;
  std::size_t row = 0;
  while (detail::read_csv_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++row;
    const std::string where = "csv row " + std::to_string(row) + " (line " +
                              std::to_string(line) + ")";
    if (fields.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    auto field = [&](std::string_view col) -> std::optional<std::string_view> {
      auto it = index.find(col);
      if (it == index.end()) return std::nullopt;
      return std::string_view(fields[it->second]);
    };
    auto number = [&](std::string_view col) {
      auto v = parse_double(*field(col));
      if (!v || !std::isfinite(*v)) {
        throw InputError(where + ", column " + std::string(col) +
                         ": non-numeric payoff '" + std::string(*field(col)) +
                         "'");
      }
      return *v;
    };
    auto proportion = [&](std::string_view col) -> std::optional<double> {
      auto f = field(col);
      if (!f || f->empty()) return std::nullopt;
      auto v = parse_double(*f);
      if (!v) {
        throw InputError(where + ", column " + std::string(col) +
                         ": not a number '" + std::string(*f) + "'");
      }
      if (!(*v >= 0.0 && *v <= 1.0)) {
        throw InputError(where + ", column " + std::string(col) +
                         ": proportion " + std::string(*f) +
                         " outside [0, 1]");
      }
      return v;
    };

    Cells a{number("a11"), number("a12"), number("a21"), number("a22")};
    Cells b{number("b11"), number("b12"), number("b21"), number("b22")};
    std::optional<PayoffMatrix> m;
    try {
      m.emplace(a, b);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    GameRecord rec{std::string(*field("game_id")), *m};
    rec.pr_trust = proportion("pr_trust");
    rec.pr_fulfill = proportion("pr_fulfill");
    if (auto f = field("trust_decision"); f && !f->empty()) {
      auto v = parse_int(*f);
      if (!v || (*v != 0 && *v != 1)) {
        throw InputError(where + ", column trust_decision: expected 0 or 1, "
                                 "found '" + std::string(*f) + "'");
      }
      rec.trust_decision = static_cast<int>(*v);
    }
    if (auto f = field("partner_type")) {
      auto p = parse_partner_type(*f);
      if (!p) {
        throw InputError(where + ", column partner_type: unknown value '" +
                         std::string(*f) + "'");
      }
      rec.partner_type = *p;
    }
    if (auto f = field("risk_type")) {
      auto r = parse_risk_type(*f);
      if (!r) {
        throw InputError(where + ", column risk_type: unknown value '" +
                         std::string(*f) + "'");
      }
      rec.risk_type = *r;
    }
    if (auto f = field("scale_magnitude"); f && !f->empty()) {
      auto v = parse_double(*f);
      if (!v || !(*v > 0.0) || !std::isfinite(*v)) {
        throw InputError(where + ", column scale_magnitude: expected a "
                                 "positive number, found '" +
                         std::string(*f) + "'");
      }
      rec.scale_magnitude = v;
    }
    if (auto f = field("split"); f && !f->empty()) {
      if (*f == "estimation") {
        rec.split = Split::kEstimation;
      } else if (*f == "prediction") {
        rec.split = Split::kPrediction;
      } else {
        throw InputError(where + ", column split: unknown value '" +
                         std::string(*f) + "'");
      }
    }
    for (std::size_t i : extra_idx) rec.extras.push_back(fields[i]);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

inline GameDataset parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in);
}

inline GameDataset parse_csv_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_csv(in);
}

inline void write_csv(const GameDataset& ds, std::ostream& out) {
  bool first = true;
  for (std::string_view c : kCsvColumns) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  for (const std::string& c : ds.extra_columns) out << ',' << detail::csv_escape(c);
  out << '\n';
  for (const GameRecord& r : ds.records) {
    const PayoffMatrix& m = r.payoffs;
    out << detail::csv_escape(r.game_id);
    for (double x : m.trustor()) out << ',' << format_double(x);
    for (double x : m.trustee()) out << ',' << format_double(x);
    out << ',' << detail::optional_to_field(r.pr_trust) << ','
        << detail::optional_to_field(r.pr_fulfill) << ','
        << (r.trust_decision ? std::to_string(*r.trust_decision) : "") << ','
        << to_string(r.partner_type) << ',' << to_string(r.risk_type) << ','
        << detail::optional_to_field(r.scale_magnitude) << ','
        << (r.split ? to_string(*r.split) : "");
    for (const std::string& e : r.extras) out << ',' << detail::csv_escape(e);
    out << '\n';
  }
}

inline std::string to_csv(const GameDataset& ds) {
  std::ostringstream out;
  write_csv(ds, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON lines: one object per record with the CSV keys; null marks absence.

inline nlohmann::ordered_json to_json(const GameRecord& r,
                                      const std::vector<std::string>& extras) {
  auto opt = [](const auto& v) -> nlohmann::ordered_json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["game_id"] = r.game_id;
  j["a11"] = r.payoffs.a11();
  j["a12"] = r.payoffs.a12();
  j["a21"] = r.payoffs.a21();
  j["a22"] = r.payoffs.a22();
  j["b11"] = r.payoffs.b11();
  j["b12"] = r.payoffs.b12();
  j["b21"] = r.payoffs.b21();
  j["b22"] = r.payoffs.b22();
  j["pr_trust"] = opt(r.pr_trust);
  j["pr_fulfill"] = opt(r.pr_fulfill);
  j["trust_decision"] = opt(r.trust_decision);
  j["partner_type"] = to_string(r.partner_type);
  j["risk_type"] = to_string(r.risk_type);
  j["scale_magnitude"] = opt(r.scale_magnitude);
  j["split"] = r.split ? nlohmann::ordered_json(to_string(*r.split)) : nullptr;
  for (std::size_t i = 0; i < extras.size() && i < r.extras.size(); ++i) {
    j[extras[i]] = r.extras[i];
  }
  return j;
}

inline void write_jsonl(const GameDataset& ds, std::ostream& out) {
  for (const GameRecord& r : ds.records) {
    out << to_json(r, ds.extra_columns).dump() << '\n';
  }
}

// Converts each JSON line to a CSV record and reuses the CSV validation, so
// both formats share one set of rules and error messages.
inline GameDataset parse_jsonl(std::istream& in) {
  std::vector<nlohmann::ordered_json> rows;
  std::vector<std::string> columns(kCsvColumns.begin(), kCsvColumns.end());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("jsonl line " + std::to_string(n) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw InputError("jsonl line " + std::to_string(n) + ": not an object");
    }
    for (const auto& [key, value] : j.items()) {
      if (std::find(columns.begin(), columns.end(), key) == columns.end()) {
        columns.push_back(key);
      }
    }
    rows.push_back(std::move(j));
  }
  std::ostringstream csv;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    csv << (i ? "," : "") << detail::csv_escape(columns[i]);
  }
  csv << '\n';
  for (const auto& j : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) csv << ',';
      auto it = j.find(columns[i]);
      if (it == j.end() || it->is_null()) continue;
      if (it->is_string()) {
        csv << detail::csv_escape(it->get<std::string>());
      } else if (it->is_number_float()) {
        csv << format_double(it->get<double>());
      } else {
        csv << detail::csv_escape(it->dump());
      }
    }
    csv << '\n';
  }
  std::istringstream again(csv.str());
  return parse_csv(again);
}

// ---------------------------------------------------------------------------
// Named per-game quantities, computed on normalized payoffs.

inline double game_quantity(std::string_view name, const PayoffMatrix& m) {
  const InterdependenceWeights w = decompose(normalize(m));
  if (name == "rc_a") return w.rc_a;
  if (name == "fc_a") return w.fc_a;
  if (name == "bc_a") return w.bc_a;
  if (name == "rc_b") return w.rc_b;
  if (name == "fc_b") return w.fc_b;
  if (name == "bc_b") return w.bc_b;
  if (name == "ti") return trust_index(w);
  if (name == "tau_b") return nash_threshold(w);
  throw InputError("unknown game quantity '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Generation

enum class Condition { kExposure, kImprovement, kTemptation, kMutualGain };

enum class Constraint {
  kA22GtA21,
  kB22GtB21,
  kB11GtB12,
  kA21EqA22,
  kB21EqB22,
};

inline std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "exposure") return Condition::kExposure;
  if (s == "improvement") return Condition::kImprovement;
  if (s == "temptation") return Condition::kTemptation;
  if (s == "mutual_gain") return Condition::kMutualGain;
  return std::nullopt;
}

inline std::optional<Constraint> parse_constraint(std::string_view s) {
  if (s == "a22_gt_a21") return Constraint::kA22GtA21;
  if (s == "b22_gt_b21") return Constraint::kB22GtB21;
  if (s == "b11_gt_b12") return Constraint::kB11GtB12;
  if (s == "a21_eq_a22") return Constraint::kA21EqA22;
  if (s == "b21_eq_b22") return Constraint::kB21EqB22;
  return std::nullopt;
}

// Conditions and constraints a game satisfies, ';'-separated in a fixed
// order. Generated corpora carry this in the "flags" column.
inline std::string achieved_flags(const PayoffMatrix& m) {
  const GameTheoryConditions gt = check_game_theory(m);
  const std::pair<bool, std::string_view> flags[] = {
      {gt.exposure, "exposure"},
      {gt.improvement, "improvement"},
      {gt.temptation, "temptation"},
      {gt.mutual_gain, "mutual_gain"},
      {m.a22() > m.a21(), "a22_gt_a21"},
      {m.b22() > m.b21(), "b22_gt_b21"},
      {m.b11() > m.b12(), "b11_gt_b12"},
      {m.a21() == m.a22(), "a21_eq_a22"},
      {m.b21() == m.b22(), "b21_eq_b22"},
  };
  std::string out;
  for (const auto& [on, name] : flags) {
    if (!on) continue;
    if (!out.empty()) out += ';';
    out += name;
  }
  return out;
}

// Trustor response planted into generated data: pr_trust is the logistic
// function of intercept + sum(coefficient * game_quantity(name)), and
// trust_decision is a Bernoulli draw from it.
struct PlantedResponse {
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
};

struct GeneratorSpec {
  int n = 1;
  std::set<Condition> required;
  std::set<Constraint> constraints;
  double scale_lo = 1.0;
  double scale_hi = 1.0;
  std::uint64_t seed = 0;
  // Assign one of the nine risk categories uniformly at random.
  bool assign_risk_types = false;
  std::optional<PlantedResponse> response;
  // When set, pr_fulfill holds the simulated trustee choice (0 or 1).
  std::optional<double> trustee_noise;

  void validate() const {
    if (n < 1) throw InputError("generator: n must be >= 1");
    if (!(scale_lo >= 1.0) || !(scale_hi >= scale_lo) ||
        !std::isfinite(scale_hi)) {
      throw InputError("generator: scale range must satisfy 1 <= lo <= hi");
    }
    auto has = [&](Constraint c) { return constraints.count(c) > 0; };
    if (required.count(Condition::kTemptation) && has(Constraint::kB11GtB12)) {
      throw InputError(
          "generator: contradictory constraints temptation and b11_gt_b12");
    }
    if (has(Constraint::kA21EqA22) && has(Constraint::kA22GtA21)) {
      throw InputError(
          "generator: contradictory constraints a21_eq_a22 and a22_gt_a21");
    }
    if (has(Constraint::kB21EqB22) && has(Constraint::kB22GtB21)) {
      throw InputError(
          "generator: contradictory constraints b21_eq_b22 and b22_gt_b21");
    }
    if (trustee_noise && !(*trustee_noise >= 0.0 && *trustee_noise <= 0.5)) {
      throw InputError("generator: trustee noise must lie in [0, 0.5]");
    }
  }
};

inline constexpr long kMaxRejectionAttempts = 1'000'000;

namespace detail {

inline bool meets(const PayoffMatrix& m, const GeneratorSpec& spec) {
  const GameTheoryConditions gt = check_game_theory(m);
  for (Condition c : spec.required) {
    switch (c) {
      case Condition::kExposure:
        if (!gt.exposure) return false;
        break;
      case Condition::kImprovement:
        if (!gt.improvement) return false;
        break;
      case Condition::kTemptation:
        if (!gt.temptation) return false;
        break;
      case Condition::kMutualGain:
        if (!gt.mutual_gain) return false;
        break;
    }
  }
  for (Constraint c : spec.constraints) {
    switch (c) {
      case Constraint::kA22GtA21:
        if (!(m.a22() > m.a21())) return false;
        break;
      case Constraint::kB22GtB21:
        if (!(m.b22() > m.b21())) return false;
        break;
      case Constraint::kB11GtB12:
        if (!(m.b11() > m.b12())) return false;
        break;
      case Constraint::kA21EqA22:
      case Constraint::kB21EqB22:
        break;  // imposed by construction
    }
  }
  return true;
}

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

// Trustee follows the SPE trusted-branch choice, flipped with probability
// noise_eps.
inline int simulate_trustee(const PayoffMatrix& m, double noise_eps, Rng& rng) {
  if (!(noise_eps >= 0.0 && noise_eps <= 0.5)) {
    throw InputError("trustee noise must lie in [0, 0.5]");
  }
  const bool tw =
      spe(m).trustee_choice_if_trusted == TrusteeChoice::kTrustworthy;
  const bool flip = rng.bernoulli(noise_eps);
  return (tw != flip) ? 1 : 0;
}

inline int simulate_trustee(const GameRecord& r, double noise_eps,
                            std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0));
  return simulate_trustee(r.payoffs, noise_eps, rng);
}

inline GameDataset generate(const GeneratorSpec& spec) {
  spec.validate();
  if (spec.response) {
    for (const auto& [name, coef] : spec.response->coefficients) {
      static const std::set<std::string, std::less<>> known{
          "rc_a", "fc_a", "bc_a", "rc_b", "fc_b", "bc_b", "ti", "tau_b"};
      if (!known.count(name)) {
        throw InputError("generator: unknown response quantity '" + name + "'");
      }
    }
  }
  Rng rng(spec.seed);
  const double log_lo = std::log10(spec.scale_lo);
  const double log_hi = std::log10(spec.scale_hi);
  const bool a_eq = spec.constraints.count(Constraint::kA21EqA22) > 0;
  const bool b_eq = spec.constraints.count(Constraint::kB21EqB22) > 0;
  const int width = static_cast<int>(std::to_string(spec.n).size());

  GameDataset ds;
  ds.extra_columns = {"flags"};
  ds.records.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    std::optional<PayoffMatrix> game;
    double scale = 0.0;
    for (long attempt = 0; attempt < kMaxRejectionAttempts && !game; ++attempt) {
      scale = log_hi > log_lo ? std::pow(10.0, rng.uniform(log_lo, log_hi))
                              : spec.scale_lo;
      Cells a, b;
      for (double& x : a) x = rng.uniform(-scale, scale);
      for (double& x : b) x = rng.uniform(-scale, scale);
      if (a_eq) a[3] = a[2];
      if (b_eq) b[3] = b[2];
      if (a[0] == a[1] && a[1] == a[2] && a[2] == a[3]) continue;
      if (b[0] == b[1] && b[1] == b[2] && b[2] == b[3]) continue;
      PayoffMatrix m(a, b);
      if (detail::meets(m, spec)) game.emplace(m);
    }
    if (!game) {
      throw InputError("generator: no game satisfied the constraints within " +
                       std::to_string(kMaxRejectionAttempts) + " attempts");
    }
    std::string id = std::to_string(i + 1);
    id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
    GameRecord rec{"g" + id, *game};
    rec.scale_magnitude = scale;
    rec.extras = {achieved_flags(*game)};
    if (spec.assign_risk_types) {
      rec.risk_type = static_cast<RiskType>(rng.below(9));
    }
    if (spec.response) {
      double eta = spec.response->intercept;
      for (const auto& [name, coef] : spec.response->coefficients) {
        eta += coef * game_quantity(name, *game);
      }
      const double p = detail::logistic(eta);
      rec.pr_trust = p;
      rec.trust_decision = rng.bernoulli(p) ? 1 : 0;
    }
    if (spec.trustee_noise) {
      rec.pr_fulfill = simulate_trustee(*game, *spec.trustee_noise, rng);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Splits and filters

inline GameDataset split(const GameDataset& ds, double fraction,
                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InputError("split fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_est = static_cast<std::size_t>(
      std::lround(fraction * static_cast<double>(ds.size())));
  GameDataset out = ds;
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.records[order[k]].split =
        k < n_est ? Split::kEstimation : Split::kPrediction;
  }
  return out;
}

inline GameDataset filter_by_verdict(const GameDataset& ds, Verdict wanted) {
  GameDataset out{{}, ds.extra_columns};
  for (const GameRecord& r : ds.records) {
    if (satisfies(classify(r.payoffs).verdict, wanted)) out.records.push_back(r);
  }
  return out;
}

enum class FilterOrder { kFilterThenSplit, kSplitThenFilter };

// Filtering before the split rebalances the halves; filtering after keeps
// the original assignment and leaves the halves unequal.
inline GameDataset filter_and_split(const GameDataset& ds, Verdict wanted,
                                    double fraction, std::uint64_t seed,
                                    FilterOrder order) {
  if (order == FilterOrder::kFilterThenSplit) {
    return split(filter_by_verdict(ds, wanted), fraction, seed);
  }
  return filter_by_verdict(split(ds, fraction, seed), wanted);
}

}  // namespace trustlab
