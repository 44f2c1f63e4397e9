#ifndef OLIGOSCOPE_JSON_IO_HPP_
#define OLIGOSCOPE_JSON_IO_HPP_

#include <json.hpp>

#include "oligoscope/contraction.hpp"
#include "oligoscope/coupling.hpp"
#include "oligoscope/formula.hpp"
#include "oligoscope/partial_iso.hpp"
#include "oligoscope/semigroup.hpp"
#include "oligoscope/stability.hpp"
#include "oligoscope/structures.hpp"
#include "oligoscope/types.hpp"

namespace oligoscope {

using json = nlohmann::json;

json to_json(const ClassKind& kind);
ClassKind kind_from_json(const json& j);

// {kind, size, payload}: edge list as sorted pairs; order as permutation
// array; boolean as atom count + sorted element masks; metric as row-major
// "p/q" strings.
json to_json(const FiniteStructure& s);
FiniteStructure structure_from_json(const json& j);

json to_json(const Embedding& e);

// {kind, window, pairs, context?}
json to_json(const PartialIso& p);
PartialIso partial_iso_from_json(const json& j);

// {elements, product, star, generators}
json to_json(const StarSemigroupTable& t);

json to_json(const TypeSpec& t);
TypeSpec type_from_json(const json& j);

json to_json(const Configuration& c);
Configuration configuration_from_json(const json& j);

json to_json(const Formula& f);
Formula formula_from_json(const json& j);

json to_json(const OrderWitness& w);
json to_json(const StabilityVerdict& v);

json to_json(const CouplingMatrix& m);
CouplingMatrix coupling_from_json(const json& j);
std::string coupling_to_csv(const CouplingMatrix& m);
CouplingMatrix coupling_from_csv(const std::string& text);

json to_json(const ContractionMatrix& m);
ContractionMatrix contraction_from_json(const json& j);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_JSON_IO_HPP_
