#pragma once

#include "rdrn/domain/types.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace rdrn::sim {

// Line-oriented structured trace: `time_ms node kind detail`.
class TraceLog {
public:
    void record(SimTime t, std::string_view node, std::string_view kind, std::string_view detail) {
        std::ostringstream os;
        os << t.millis() << ' ' << node << ' ' << kind;
        if (!detail.empty()) {
            os << ' ' << detail;
        }
        m_lines.push_back(os.str());
    }

    void record_raw(std::string line) { m_lines.push_back(std::move(line)); }

    const std::vector<std::string>& lines() const noexcept { return m_lines; }

    std::string str() const {
        std::string out;
        for (const auto& l : m_lines) {
            out += l;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> m_lines;
};

}  // namespace rdrn::sim
