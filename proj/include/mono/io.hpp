#ifndef MONO_IO_HPP
#define MONO_IO_HPP

#include <mono/driver.hpp>
#include <mono/prepared.hpp>

#include <json.hpp>

#include <string>

namespace mono {

using Json = nlohmann::ordered_json;

// shared parsing context: coefficient field, truncation bound, value-group
// shape (rank d, squarefree basis of size k)
struct IoContext {
    FieldPtr field;
    Rat trunc;
    SquarefreeBasis basis{std::size_t(1)};
    std::size_t rank = 1;
};

Json rat_json(const Rat& r);
Rat rat_from_json(const Json& j);

Json value_to_json(const GroupValue& v);
GroupValue value_from_json(const Json& j, const IoContext& ctx);

Json series_to_json(const TruncatedSeries& s);
TruncatedSeries series_from_json(const Json& j, std::size_t nvars, const IoContext& ctx);

Json seq_to_json(const TransformSeq& s);
TransformSeq seq_from_json(const Json& j);

Json transformation_to_json(const Transformation& t);
Transformation transformation_from_json(const Json& j, const IoContext& ctx);

Json pair_to_json(const PreparedPair& p);
PreparedPair pair_from_json(const Json& j);

Json certificate_to_json(const PreparedPair& p0, const std::vector<Transformation>& cert);
std::vector<Transformation> certificate_from_json(const Json& j, const IoContext& ctx);

Json form_to_json(const MonomialForm& f);

// blow-up tree of a certificate, one chart node per stage
std::string certificate_to_dot(const PreparedPair& p0, const std::vector<Transformation>& cert);
std::string seq_to_dot(const TransformSeq& seq, const std::vector<GroupValue>& initial,
                       const SquarefreeBasis& basis);

IoContext context_from_json(const Json& doc);

} // namespace mono

#endif
