#ifndef KDV5_SERIALIZE_HPP
#define KDV5_SERIALIZE_HPP

#include <json.hpp>

#include "kdv5/operator.hpp"

namespace kdv5 {

/// JSON schema: {v, Kphi, Kx, real_flag, coeffs: [[l..., k, re, im], ...]}.
/// Exact zeros are omitted; doubles round-trip bit-exactly.
nlohmann::json field_to_json(const FourierField& f);
FourierField field_from_json(const nlohmann::json& j);

/// Mirrors the field schema with a block list:
/// {v, Kphi, Kx, h10, blocks: [{i1, i2, coeffs: [[l..., re, im], ...]}, ...]}.
nlohmann::json operator_to_json(const VarCoeffOperator& a);
VarCoeffOperator operator_from_json(const nlohmann::json& j);

}  // namespace kdv5

#endif
