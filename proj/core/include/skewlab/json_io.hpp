#pragma once

#include <string>

#include <json.hpp>

#include "skewlab/bohr.hpp"
#include "skewlab/detect.hpp"
#include "skewlab/extremal.hpp"
#include "skewlab/inequalities.hpp"
#include "skewlab/point_set.hpp"
#include "skewlab/table.hpp"
#include "skewlab/tracer.hpp"

namespace skewlab {

using json = nlohmann::json;

// Point sets: {"domain":{"kind":"grid"|"cyclic","size":n},"points":[[x,y],...]}
json to_json(const PointSet2& A);
PointSet2 point_set_from_json(const json& j);

// 1-D sets: {"n":n,"elements":[...]}
json to_json(const IntSet1& B);
IntSet1 int_set_from_json(const json& j);

// Bohr descriptors: {"N":N,"freqs":[...],"radius":rho}
json bohr_descriptor(const BohrSet& B);
BohrSet bohr_from_json(const json& j);

json to_json(const SkewCornerWitness& w);
json to_json(const SixPointWitness& w);
json to_json(const NormValue& v);
json to_json(const InequalityVerdict& v);
json to_json(const RegularityReport& r);
json to_json(const StructureReport& r);
json to_json(const ExtremalResult& r);
json to_json(const Verdict& v);
json to_json(const StepReport& r);
json to_json(const IncrementOutcome& o);
json to_json(const IterationLog& l);

json to_json(const IncrementConstants& c);
IncrementConstants constants_from_json(const json& j);

// Function tables. JSON: {"rows":[...],"cols":[...],"values":[[...],...]}.
// CSV: header row "x\<col>..." then one row per row index.
json to_json(const FunctionTable2& t);
FunctionTable2 table_from_json(const json& j);
std::string table_to_csv(const FunctionTable2& t);
FunctionTable2 table_from_csv(const std::string& csv);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace skewlab
