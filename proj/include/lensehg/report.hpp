#pragma once

// Serialization of verification reports. One report becomes one JSON
// document; keys are emitted in sorted order so identical runs produce
// byte-identical files (runtime_ms is the only field expected to vary).

#include <fstream>
#include <ios>
#include <string>

#include <json.hpp>

#include "lensehg/errors.hpp"
#include "lensehg/identities.hpp"
#include "lensehg/version.hpp"

namespace lensehg {

inline nlohmann::json report_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["identity_name"] = rep.identity_name;
    j["params"] = rep.params.is_null() ? nlohmann::json::object() : rep.params;
    if (!j["params"].contains("seed")) j["params"]["seed"] = rep.seed;
    j["lhs"] = detail::jc(rep.lhs);
    j["rhs"] = detail::jc(rep.rhs);
    j["abs_err"] = rep.abs_err;
    j["rel_err"] = rep.rel_err;
    j["quad_err"] = nlohmann::json{{"lhs", rep.quad_err_lhs},
                                   {"rhs", rep.quad_err_rhs}};
    j["tol"] = rep.tolerance;
    j["pass"] = rep.pass;
    j["runtime_ms"] = rep.runtime_ms;
    j["artifact_version"] = version_string;
    return j;
}

// Failing reports are written exactly like passing ones; a missing file
// is an orchestration bug, a pass=false line is data. In append mode each
// report occupies a single line so files accumulate as JSON-per-line.
inline void write_report(const VerificationReport& rep, const std::string& path,
                         bool append = false) {
    std::ofstream out(path, append ? (std::ios::out | std::ios::app)
                                   : std::ios::out);
    if (!out) throw config_error("cannot open report path: " + path);
    const nlohmann::json j = report_json(rep);
    if (append) {
        out << j.dump() << '\n';
    } else {
        out << j.dump(2) << '\n';
    }
    out.flush();
    if (!out) throw config_error("failed writing report to: " + path);
}

} // namespace lensehg
