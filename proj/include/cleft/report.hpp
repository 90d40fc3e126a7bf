#pragma once

#include "cleft/factor_system.hpp"
#include "cleft/gallery.hpp"
#include "cleft/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace cleft {

/// Machine-readable run report: named residual checks against thresholds,
/// deterministic ordering, overall pass iff all checks pass. The body
/// contains no timestamps so identical inputs give identical reports.
struct Report {
    std::string tool = kToolName;
    std::string version = kVersion;
    int schema = kReportSchema;
    std::string input_digest;
    std::string scalarization = "equal-weight normalized block trace";
    std::vector<Claim> checks;
    std::vector<std::string> skipped;

    bool pass() const
    {
        for (const Claim& c : checks)
            if (!c.pass)
                return false;
        return true;
    }

    const Claim* first_failure() const
    {
        for (const Claim& c : checks)
            if (!c.pass)
                return &c;
        return nullptr;
    }

    void append(const VerificationReport& rep, const std::string& kind)
    {
        for (const NamedResidual& c : rep.checks)
            checks.push_back({c.name, kind, c.residual, c.threshold, c.pass});
    }

    void append(const std::vector<Claim>& claims)
    {
        for (const Claim& c : claims)
            checks.push_back(c);
    }

    void add(std::string name, std::string kind, double residual, double threshold)
    {
        bool ok = residual < threshold;
        checks.push_back({std::move(name), std::move(kind), residual, threshold, ok});
    }

    std::string to_text() const
    {
        std::string out;
        out += std::string(tool) + " report (schema " + std::to_string(schema) + ", version " + version + ")\n";
        out += "input " + (input_digest.empty() ? std::string("-") : input_digest) + "\n";
        out += "scalarization " + scalarization + "\n";
        char line[256];
        for (const Claim& c : checks) {
            std::snprintf(line, sizeof(line), "%s  %-52s  residual=%.6e  threshold=%.1e  [%s]\n",
                          c.pass ? "PASS" : "FAIL", c.name.c_str(), c.residual, c.threshold, c.kind.c_str());
            out += line;
        }
        for (const std::string& s : skipped)
            out += "SKIP  " + s + "\n";
        out += pass() ? "OVERALL PASS\n" : "OVERALL FAIL\n";
        return out;
    }

    std::string to_json() const
    {
        nlohmann::ordered_json j;
        j["tool"] = tool;
        j["version"] = version;
        j["schema"] = schema;
        j["input_digest"] = input_digest;
        j["scalarization"] = scalarization;
        j["checks"] = nlohmann::ordered_json::array();
        for (const Claim& c : checks) {
            nlohmann::ordered_json jc;
            jc["name"] = c.name;
            jc["kind"] = c.kind;
            jc["residual"] = c.residual;
            jc["threshold"] = c.threshold;
            jc["pass"] = c.pass;
            j["checks"].push_back(jc);
        }
        j["skipped"] = skipped;
        j["pass"] = pass();
        return j.dump(2) + "\n";
    }
};

/// FNV-1a 64-bit digest of the input bytes, hex encoded.
inline std::string digest(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cleft
