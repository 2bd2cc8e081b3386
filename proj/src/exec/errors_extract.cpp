#include <regex>
#include <sstream>

#include "foamforge/exec/executor.hpp"

namespace foamforge::exec {

using core::ErrorRecord;
using core::Severity;

namespace {

constexpr const char* kFatalMarkers[] = {"--> FOAM FATAL ERROR", "--> FOAM FATAL IO ERROR"};
constexpr const char* kWarningMarker = "--> FOAM Warning";
constexpr const char* kFatalTerminator = "FOAM exiting";
constexpr int kTailLines = 50;

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool starts_fatal(const std::string& line) {
    for (const char* marker : kFatalMarkers) {
        if (line.find(marker) != std::string::npos) return true;
    }
    return false;
}

// Appends "<path> line <n>" when the block carries OpenFOAM's
// "file: <path> ... line <n>" diagnostics.
std::string block_location(const std::string& log_name, const std::string& block) {
    static const std::regex file_re(R"(file:\s*(\S+))");
    static const std::regex line_re(R"(line\s+(\d+))");
    std::string loc = log_name;
    std::smatch m;
    if (std::regex_search(block, m, file_re)) {
        std::string path = m[1].str();
        if (!path.empty() && (path.back() == '.' || path.back() == ',')) path.pop_back();
        loc += " " + path;
        if (std::regex_search(block, m, line_re)) loc += " line " + m[1].str();
    }
    return loc;
}

std::string last_lines(const std::string& text, int count) {
    auto lines = split_lines(text);
    std::size_t start = lines.size() > static_cast<std::size_t>(count)
                            ? lines.size() - static_cast<std::size_t>(count)
                            : 0;
    std::string out;
    for (std::size_t i = start; i < lines.size(); ++i) {
        if (i > start) out += "\n";
        out += lines[i];
    }
    return out;
}

// Scans one log for fatal and warning blocks, in text order.
void scan_log(const std::string& log_name, const std::string& text,
              std::vector<ErrorRecord>& out, bool& saw_fatal) {
    const auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size()) {
        if (starts_fatal(lines[i])) {
            std::string block = lines[i];
            ++i;
            while (i < lines.size() && lines[i].find(kFatalTerminator) == std::string::npos) {
                block += "\n" + lines[i];
                ++i;
            }
            if (i < lines.size()) {
                block += "\n" + lines[i];
                ++i;
            }
            out.push_back({block, block_location(log_name, block), Severity::fatal});
            saw_fatal = true;
        } else if (lines[i].find(kWarningMarker) != std::string::npos) {
            // Warning block: the marker line plus following lines until a
            // blank line or the next marker.
            std::string block = lines[i];
            ++i;
            while (i < lines.size() && !lines[i].empty() && !starts_fatal(lines[i]) &&
                   lines[i].find(kWarningMarker) == std::string::npos) {
                block += "\n" + lines[i];
                ++i;
            }
            out.push_back({block, block_location(log_name, block), Severity::warning});
        } else {
            ++i;
        }
    }
}

}  // namespace

std::vector<ErrorRecord> extract_errors(const ExecutionResult& result) {
    std::vector<ErrorRecord> records;
    std::map<std::string, bool> fatal_in_log;

    for (const auto& [name, text] : result.logs) {
        bool saw_fatal = false;
        scan_log(name, text, records, saw_fatal);
        fatal_in_log[name] = saw_fatal;
    }

    // Nonzero exit with no recognized fatal block in the command's log:
    // synthesize a fatal record carrying the log tail.
    for (const auto& [command, code] : result.exit_codes) {
        if (code == 0) continue;
        const std::string log_name =
            result.logs.count(command) ? command : "log." + command;
        auto it = result.logs.find(log_name);
        const bool recognized = fatal_in_log.count(log_name) && fatal_in_log[log_name];
        if (recognized) continue;
        std::ostringstream msg;
        msg << "command '" << command << "' exited with code " << code;
        if (it != result.logs.end() && !it->second.empty()) {
            msg << "; log tail:\n" << last_lines(it->second, kTailLines);
        }
        records.push_back({msg.str(), log_name, Severity::fatal});
    }

    return records;
}

bool indicates_failure(const ExecutionResult& result) {
    for (const auto& [_, code] : result.exit_codes) {
        if (code != 0) return true;
    }
    for (const auto& rec : extract_errors(result)) {
        if (rec.severity == Severity::fatal) return true;
    }
    return false;
}

std::string render_logs(const std::map<std::string, std::string>& logs) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, text] : logs) {
        if (!first) out << "\n";
        out << "=== " << name << " ===\n" << text;
        if (!text.empty() && text.back() != '\n') out << "\n";
        first = false;
    }
    return out.str();
}

}  // namespace foamforge::exec
