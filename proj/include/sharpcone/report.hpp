#ifndef SHARPCONE_REPORT_HPP
#define SHARPCONE_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace sharpcone {

struct CheckRecord {
    std::string name;
    std::string anchor;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string verdict; // pass, fail, skipped, error
    std::string note;

    bool passed() const { return verdict == "pass"; }
};

/// Verification report of one command. Records are kept in insertion order
/// and emitted sorted by name.
class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    const std::string& command() const { return command_; }
    const std::vector<CheckRecord>& checks() const { return checks_; }
    nlohmann::json& data() { return data_; }
    const nlohmann::json& data() const { return data_; }

    /// Passes iff residual <= tolerance and the residual is finite.
    CheckRecord& check(const std::string& name, const std::string& anchor, double residual, double tolerance)
    {
        const bool ok = std::isfinite(residual) && residual <= tolerance;
        return add({name, anchor, residual, tolerance, ok ? "pass" : "fail", {}});
    }

    CheckRecord& check_bool(const std::string& name, const std::string& anchor, bool ok, double residual = 0.0,
                            double tolerance = 0.0)
    {
        return add({name, anchor, residual, tolerance, ok ? "pass" : "fail", {}});
    }

    CheckRecord& skipped(const std::string& name, const std::string& anchor, const std::string& note)
    {
        return add({name, anchor, 0.0, 0.0, "skipped", note});
    }

    /// A module error surfaced as a failed record.
    CheckRecord& error(const std::string& name, const std::string& anchor, const std::string& what)
    {
        return add({name, anchor, 0.0, 0.0, "error", what});
    }

    CheckRecord& add(CheckRecord r)
    {
        checks_.push_back(std::move(r));
        return checks_.back();
    }

    void merge(const Report& other)
    {
        for (const auto& c : other.checks_)
            checks_.push_back(c);
        for (const auto& [k, v] : other.data_.items())
            data_[k] = v;
    }

    void set_timing(const std::string& phase, double seconds) { timings_[phase] = seconds; }

    bool pass() const
    {
        return std::all_of(checks_.begin(), checks_.end(), [](const CheckRecord& c) { return c.passed(); });
    }

    std::vector<CheckRecord> sorted() const
    {
        auto out = checks_;
        std::stable_sort(out.begin(), out.end(),
                         [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
        return out;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j = nlohmann::json::object();
        j["command"] = command_;
        j["pass"] = pass();
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : sorted()) {
            nlohmann::json r = {{"name", c.name},           {"anchor", c.anchor},
                                {"residual", c.residual},   {"tolerance", c.tolerance},
                                {"verdict", c.verdict}};
            if (!c.note.empty())
                r["note"] = c.note;
            cs.push_back(std::move(r));
        }
        j["checks"] = std::move(cs);
        j["data"] = data_;
        if (!timings_.empty())
            j["timings"] = timings_;
        return j;
    }

    std::string to_text() const
    {
        std::ostringstream os;
        os << command_ << ": " << (pass() ? "PASS" : "FAIL") << "\n";
        for (const auto& c : sorted()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e <= %.1e", c.residual, c.tolerance);
            os << "  [" << c.verdict << "] " << c.name << "  " << buf << "  (" << c.anchor << ")";
            if (!c.note.empty())
                os << "  " << c.note;
            os << "\n";
        }
        if (!timings_.empty())
            for (const auto& [k, v] : timings_.items())
                os << "  time " << k << ": " << v.get<double>() << " s\n";
        return os.str();
    }

private:
    std::string command_;
    std::vector<CheckRecord> checks_;
    nlohmann::json data_ = nlohmann::json::object();
    nlohmann::json timings_ = nlohmann::json::object();
};

} // namespace sharpcone

#endif
