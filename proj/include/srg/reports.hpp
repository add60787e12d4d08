#pragma once

#include "srg/config.hpp"
#include "srg/kernels.hpp"
#include "srg/model.hpp"
#include "srg/rgloop.hpp"
#include "srg/verify.hpp"
#include "srg/wick.hpp"

#include <json.hpp>

#include <string>

namespace srg {

using Json = nlohmann::ordered_json;

// Every JSON report embeds the resolved configuration and the ledger
// constants in use; timestamps live in a separate "meta" block so the rest
// of a report is byte-reproducible across serial runs.
Json meta_block();
Json config_json(const RunConfig& cfg);
Json ledger_json(const ParameterLedger& led);
Json complex_json(Complex z);

Json hypotheses_json(const RunConfig& cfg, const HypothesisReport& rep,
                     const ParameterLedger& ledger);
Json trace_json(const RunConfig& cfg, const RGTrace& trace, const EigenvectorResult& ev,
                const GapReport& gap, const HfLimitReport& hf, const ParameterLedger& locked,
                const ParameterLedger& empirical, double g_used, double oracle_e,
                double oracle_gap_value, bool oracle_ran);
Json wick_json(const RunConfig& cfg, const WickCompare& cmp, const WickBoundReport& bounds,
               const WickKernels& kernels);
Json contour_json(const RunConfig& cfg, const AnalyticitySuite& suite, const ContourSpec& contour);
Json oracle_json(const RunConfig& cfg, const GroundState& gs, bool compared, double z_re,
                 double z_im, double mismatch, bool within_tol);

std::string levels_csv(const RGTrace& trace);
std::string counterexample_csv(const std::vector<CounterexampleRow>& rows);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);

}  // namespace srg
