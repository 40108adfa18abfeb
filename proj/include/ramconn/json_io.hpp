#pragma once

#include "ramconn/cohomology.hpp"
#include "ramconn/family.hpp"
#include "ramconn/global.hpp"

#include <json.hpp>

namespace ramconn {

using Json = nlohmann::json;

// scalars are exact coefficient-string lists in the declared power basis
Json scalar_to_json(const Scalar& x);
Scalar scalar_from_json(const FieldPtr& f, const Json& j);

Json field_to_json(const FieldPtr& f);
FieldPtr field_from_json(const Json& j);

Json series_to_json(const TruncSeries& s);
TruncSeries series_from_json(const FieldPtr& f, const Json& j);

Json form_to_json(const OneForm& w);
OneForm form_from_json(const FieldPtr& f, const Json& j);

Json exponent_to_json(const Exponent& e);
Exponent exponent_from_json(const FieldPtr& f, const Json& j);

Json formal_connection_to_json(const FormalConnection& c);
FormalConnection formal_connection_from_json(const FieldPtr& f, const Json& j);

Json local_data_to_json(const LocalRamifiedData& d);
LocalRamifiedData local_data_from_json(const FieldPtr& f, const Json& j);

Json global_connection_to_json(const GlobalConnection& gc);
GlobalConnection global_connection_from_json(const Json& j);

Json exponent_set_to_json(const ExponentSet& ns);
ExponentSet exponent_set_from_json(const FieldPtr& f, const Json& j);

Json family_block_to_json(const FamilyBlock& fb);
FamilyBlock family_block_from_json(const Json& j);

Json report_to_json(const std::vector<CheckResult>& checks);

Json parse_json_file(const std::string& path);

} // namespace ramconn
