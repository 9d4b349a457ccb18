#pragma once

#include <json.hpp>

#include "pqlab/commlab.hpp"
#include "pqlab/concepts.hpp"
#include "pqlab/learner.hpp"
#include "pqlab/speakability.hpp"

namespace pqlab {

using Json = nlohmann::json;

/// Value rounded to 12 significant digits; non-finite values become null.
Json number(double v);

Json to_json(const Concept& c);
Json to_json(const Answer& a);
Json to_json(const Hypothesis& h);
Json to_json(const Edge& e);
Json to_json(const CoverCertificate& cert);
Json to_json(const CountingAudit& audit);
Json to_json(const KlChainAudit& audit);
Json to_json(const ConversionReport& report);
Json to_json(const OneWayCost& cost);
Json to_json(const Distribution& d);

/// [[x, b], ...] indexed by q - 1.
Hypothesis hypothesis_from_json(int modulus, const Json& j);
CoverCertificate certificate_from_json(const Json& j);

Distribution distribution_from_json(const Json& j);

/// {"prior": [...], "per_input": [[...], ...]}
AnswerFamily family_from_json(const Json& j);

/// {"relation": [[0/1 per z] per x], "mu": [...]} (mu defaults to uniform).
SingleInputProblem single_input_from_json(const Json& j);

/// {"inputs": X, "bob_inputs": Y, "answers": Z, "valid": [[x, y, z], ...],
///  "mu": [[per y] per x]} (mu defaults to uniform).
TwoSidedProblem two_sided_from_json(const Json& j);
Json to_json(const TwoSidedProblem& p);
Json to_json(const SingleInputProblem& p);

}  // namespace pqlab
