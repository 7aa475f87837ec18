//
// Copyright 2026 The rasens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: analyze, run, dp-run and validate.

#ifndef RASENS_CLI_HPP_
#define RASENS_CLI_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rasens/analyzer.hpp"
#include "rasens/annotate.hpp"
#include "rasens/csv.hpp"
#include "rasens/dp.hpp"
#include "rasens/engine.hpp"
#include "rasens/error.hpp"
#include "rasens/oracle.hpp"
#include "rasens/syntax.hpp"

namespace rasens {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitInputError = 2,
  kExitUnbounded = 3,
  kExitInfeasible = 4,
};

struct Workspace {
  std::vector<std::string> schema_files;
  std::vector<std::string> data_specs;  // REL=FILE
  std::string query_file;
  std::string query_text;
  std::string format = "json";
  uint64_t enum_cap = SolverOptions{}.enum_cap;
  size_t dnf_cap = SolverOptions{}.dnf_cap;
  std::vector<std::string> delta_overrides;  // op=value
  bool trace = false;
  std::string epsilon = "1";
  uint64_t seed = 0;
  uint64_t samples = 0;
  size_t oracle_cap = kDefaultOracleCap;
};

namespace internal {

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kValidation, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Prefixes syntax errors with the file they come from.
template <typename F>
auto WithFile(const std::string& path, F&& fn) {
  try {
    return fn(ReadFile(path));
  } catch (const SyntaxError& e) {
    throw Error(ErrorKind::kSyntax, path + ":" + e.what());
  }
}

inline SolverOptions SolverFrom(const Workspace& ws) {
  SolverOptions o;
  o.enum_cap = ws.enum_cap;
  o.dnf_cap = ws.dnf_cap;
  return o;
}

inline AnalyzerOptions AnalyzerFrom(const Workspace& ws) {
  AnalyzerOptions o;
  o.solver = SolverFrom(ws);
  for (const auto& spec : ws.delta_overrides) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kValidation, "--delta-override expects op=value, got '" + spec + "'");
    }
    const auto op = ParseOpKind(spec.substr(0, eq));
    if (!op) throw Error(ErrorKind::kValidation, "unknown operator '" + spec.substr(0, eq) + "'");
    const std::string v = spec.substr(eq + 1);
    if (v == "inf") {
      o.delta_override[*op] = SensitivityValue::Infinity();
    } else {
      auto x = ParseRational(v);
      if (!x || *x < 0) throw Error(ErrorKind::kValidation, "bad delta value '" + v + "'");
      o.delta_override[*op] = SensitivityValue(*x);
    }
  }
  return o;
}

inline Catalog LoadCatalog(const Workspace& ws) {
  if (ws.schema_files.empty()) throw Error(ErrorKind::kValidation, "no --schema given");
  std::vector<ConstrainedSchema> all;
  for (const auto& f : ws.schema_files) {
    auto v = WithFile(f, [](const std::string& text) { return ParseSchemas(text); });
    all.insert(all.end(), v.begin(), v.end());
  }
  return MakeCatalog(all);
}

inline TopQuery LoadQuery(const Workspace& ws) {
  if (!ws.query_text.empty()) {
    if (!ws.query_file.empty()) {
      throw Error(ErrorKind::kValidation, "give either --query or --expr, not both");
    }
    return ParseQuery(ws.query_text);
  }
  if (ws.query_file.empty()) throw Error(ErrorKind::kValidation, "no --query given");
  return WithFile(ws.query_file, [](const std::string& text) { return ParseQuery(text); });
}

inline Database LoadData(const Workspace& ws, const Catalog& catalog, const Plan& plan) {
  Database db;
  for (const auto& spec : ws.data_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kValidation, "--data expects REL=FILE, got '" + spec + "'");
    }
    const std::string rel = spec.substr(0, eq);
    auto it = catalog.find(rel);
    if (it == catalog.end()) throw Error(ErrorKind::kValidation, "unknown relation '" + rel + "'");
    const std::string path = spec.substr(eq + 1);
    try {
      db[rel] = WithFile(path, [&](const std::string& text) { return LoadRelation(text, it->second); });
    } catch (const DataError& e) {
      std::vector<std::string> rows;
      for (const auto& r : e.rows()) rows.push_back(path + ": " + r);
      throw DataError(std::move(rows));
    }
  }
  for (const auto& rel : ReferencedRelations(plan)) {
    if (!db.count(rel)) throw Error(ErrorKind::kValidation, "no --data for relation '" + rel + "'");
  }
  return db;
}

inline Rational ParseEpsilon(const std::string& s) {
  auto e = ParseRational(s);
  if (!e || *e <= 0) throw Error(ErrorKind::kValidation, "--epsilon must be a positive number");
  return *e;
}

inline void PrintWarnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

inline std::string RowText(const Tuple& t) {
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + ToString(t[i]);
  return "(" + s + ")";
}

inline int CmdAnalyze(const Workspace& ws, std::ostream& out, std::ostream& err) {
  const Catalog catalog = LoadCatalog(ws);
  const AnalyzerOptions opts = AnalyzerFrom(ws);
  const SensitivityReport rep = Analyze(LoadQuery(ws), catalog, opts);
  if (ws.format == "table") {
    out << ToTable(rep);
  } else {
    out << ToJson(rep).dump(2) << "\n";
  }
  PrintWarnings(rep.warnings, err);
  return rep.gs.is_infinite() ? kExitUnbounded : kExitOk;
}

inline int CmdRun(const Workspace& ws, std::ostream& out) {
  const Catalog catalog = LoadCatalog(ws);
  const AnnotatedQuery q = Annotate(LoadQuery(ws), catalog, SolverFrom(ws));
  const Database db = LoadData(ws, catalog, q.query.body);
  std::vector<Relation> trace;
  const Rational value = Evaluate(q, db, ws.trace ? &trace : nullptr);
  if (ws.format == "table") {
    out << "value: " << ToDecimalString(value) << "\n";
    if (ws.trace) {
      for (size_t k = 0; k < trace.size(); ++k) {
        out << "node " << k << " " << internal::NodeLabel(q.plan.nodes[k].plan) << ": "
            << trace[k].size() << " row(s)\n";
        for (const auto& t : trace[k].tuples) out << "  " << RowText(t) << "\n";
      }
    }
    return kExitOk;
  }
  nlohmann::json j;
  j["query"] = ToString(q.query);
  j["value"] = ToDecimalString(value);
  j["value_float"] = ToDouble(value);
  if (ws.trace) {
    nlohmann::json nodes = nlohmann::json::array();
    for (size_t k = 0; k < trace.size(); ++k) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& t : trace[k].tuples) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : t) row.push_back(ValueJson(v));
        rows.push_back(std::move(row));
      }
      nodes.push_back({{"id", k},
                       {"label", internal::NodeLabel(q.plan.nodes[k].plan)},
                       {"attributes", trace[k].attributes},
                       {"row_count", trace[k].size()},
                       {"rows", std::move(rows)}});
    }
    j["trace"] = std::move(nodes);
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline int CmdDpRun(const Workspace& ws, std::ostream& out, std::ostream& err) {
  const Catalog catalog = LoadCatalog(ws);
  const AnalyzerOptions opts = AnalyzerFrom(ws);
  const AnnotatedQuery q = Annotate(LoadQuery(ws), catalog, opts.solver);
  const SensitivityReport rep = Analyze(q, opts);
  if (rep.gs.is_infinite()) {
    PrintWarnings(rep.warnings, err);
    throw Error(ErrorKind::kUnbounded, "unbounded sensitivity: refusing to add infinite noise");
  }
  const Rational epsilon = ParseEpsilon(ws.epsilon);
  const Database db = LoadData(ws, catalog, q.query.body);
  Rng rng(ws.seed);
  DpParams params{epsilon, ws.seed};
  const DpAnswer a = DpAnswerQuery(q, rep, db, params, rng);
  nlohmann::json j = ToJson(a);
  j["query"] = ToString(q.query);
  if (ws.samples > 0) {
    // Further independent releases from the same stream, for empirical checks.
    std::vector<double> xs{a.noisy_value};
    for (uint64_t i = 1; i < ws.samples; ++i) {
      xs.push_back(DpAnswerQuery(q, rep, db, params, rng).noisy_value);
    }
    j["samples"] = xs;
  }
  out << j.dump(2) << "\n";
  PrintWarnings(a.warnings, err);
  return kExitOk;
}

inline int CmdValidate(const Workspace& ws, std::ostream& out, std::ostream& err) {
  const Catalog catalog = LoadCatalog(ws);
  const AnalyzerOptions opts = AnalyzerFrom(ws);
  const AnnotatedQuery q = Annotate(LoadQuery(ws), catalog, opts.solver);
  const SensitivityReport rep = Analyze(q, opts);
  const ValidationResult v = Validate(q, rep, catalog, ws.oracle_cap, opts.solver);
  if (ws.format == "table") {
    out << "gs:      " << v.gs << "\n"
        << "oracle:  " << ToString(v.oracle.value) << "\n"
        << "verdict: " << VerdictName(v.verdict) << "\n"
        << "witness R:      " << DatabaseJson(v.oracle.witness.r).dump() << "\n"
        << "witness R_plus: " << DatabaseJson(v.oracle.witness.r_plus).dump() << "\n";
  } else {
    out << ToJson(v).dump(2) << "\n";
  }
  PrintWarnings(rep.warnings, err);
  if (v.verdict == Verdict::kViolation) {
    err << "error: oracle sensitivity " << ToString(v.oracle.value) << " exceeds GS " << v.gs
        << "\n";
    return kExitViolation;
  }
  return kExitOk;
}

inline int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnbounded: return kExitUnbounded;
    case ErrorKind::kInfeasible: return kExitInfeasible;
    default: return kExitInputError;
  }
}

}  // namespace internal

// Runs one command. `args` excludes the program name.
inline int RunCli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static sensitivity analysis and differentially private evaluation of "
               "relational algebra queries over constrained schemas",
               "rasens"};
  app.require_subcommand(1);
  Workspace ws;

  auto common = [&](CLI::App* sub, bool with_data) {
    sub->add_option("--schema", ws.schema_files, "schema file (repeatable)")->required();
    auto* qf = sub->add_option("--query", ws.query_file, "query file");
    auto* qe = sub->add_option("--expr", ws.query_text, "query text");
    qf->excludes(qe);
    sub->add_option("--enum-cap", ws.enum_cap, "enumeration cap for solution counting")
        ->check(CLI::PositiveNumber);
    sub->add_option("--dnf-cap", ws.dnf_cap, "maximum disjuncts before propagation-only mode")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", ws.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
    if (with_data) sub->add_option("--data", ws.data_specs, "REL=FILE (repeatable)");
  };
  auto overrides = [&](CLI::App* sub) {
    sub->add_option("--delta-override", ws.delta_overrides,
                    "test hook: replace an operator's delta, e.g. union=1");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "report per-node and global sensitivity");
  common(analyze, false);
  overrides(analyze);

  CLI::App* run = app.add_subcommand("run", "evaluate the query exactly");
  common(run, true);
  run->add_flag("--trace", ws.trace, "print every intermediate relation");

  CLI::App* dp = app.add_subcommand("dp-run", "release the answer with Laplace noise");
  common(dp, true);
  overrides(dp);
  dp->add_option("--epsilon", ws.epsilon, "privacy parameter (decimal or p/q)");
  dp->add_option("--seed", ws.seed, "random seed");
  dp->add_option("--samples", ws.samples, "draw this many independent releases");

  CLI::App* validate = app.add_subcommand("validate", "compare GS with a brute-force oracle");
  common(validate, false);
  overrides(validate);
  validate->add_option("--oracle-cap", ws.oracle_cap, "maximum universe size (tuples)")
      ->check(CLI::Range(1, 20));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*analyze) return internal::CmdAnalyze(ws, out, err);
    if (*run) return internal::CmdRun(ws, out);
    if (*dp) return internal::CmdDpRun(ws, out, err);
    if (*validate) return internal::CmdValidate(ws, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return internal::ExitCodeFor(e.kind());
  }
  return kExitInputError;
}

}  // namespace rasens

#endif  // RASENS_CLI_HPP_
