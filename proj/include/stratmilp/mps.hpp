#ifndef STRATMILP_MPS_HPP
#define STRATMILP_MPS_HPP

#include <string>

#include "stratmilp/model.hpp"

namespace stratmilp {

/// Parses fixed- or free-format MPS (NAME/OBJSENSE/ROWS/COLUMNS/RHS/RANGES/
/// BOUNDS sections, INTORG/INTEND markers). GE rows are negated to LE;
/// OBJSENSE MAX negates the objective. Throws std::runtime_error with a
/// line number on malformed input.
MILPInstance parse_mps(const std::string& text);

/// Free-format MPS with full-precision values; parse(serialize(parse(t)))
/// reproduces the instance exactly.
std::string serialize_mps(const MILPInstance& inst);

}  // namespace stratmilp

#endif
