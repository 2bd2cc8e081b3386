#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace foamforge {

/// Base class for every error the engine raises deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class UnknownVocabularyTerm : public ValidationError {
public:
    UnknownVocabularyTerm(std::string field, std::string value)
        : ValidationError("unknown vocabulary term for " + field + ": '" + value + "'"),
          field(std::move(field)),
          value(std::move(value)) {}

    std::string field;
    std::string value;
};

class CyclicDependency : public Error {
public:
    explicit CyclicDependency(std::vector<std::string> cycle_ids)
        : Error(format(cycle_ids)), cycle(std::move(cycle_ids)) {}

    std::vector<std::string> cycle;

private:
    static std::string format(const std::vector<std::string>& ids) {
        std::string msg = "cyclic file dependency:";
        for (const auto& id : ids) msg += " " + id;
        return msg;
    }
};

class ParseError : public Error {
public:
    ParseError(int line, int column, std::string expected)
        : Error("parse error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": expected " + expected),
          line(line),
          column(column),
          expected(std::move(expected)) {}

    int line;
    int column;
    std::string expected;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexNotBuilt : public Error {
public:
    using Error::Error;
};

class SchemaViolation : public Error {
public:
    using Error::Error;
};

class ProviderFailure : public Error {
public:
    using Error::Error;
};

class ScriptExhausted : public Error {
public:
    using Error::Error;
};

class UnknownTemplate : public Error {
public:
    explicit UnknownTemplate(const std::string& id)
        : Error("unknown prompt template: " + id), template_id(id) {}

    std::string template_id;
};

class MissingSlot : public Error {
public:
    MissingSlot(const std::string& template_id, const std::string& slot)
        : Error("template " + template_id + " is missing slot value: " + slot),
          template_id(template_id),
          slot(slot) {}

    std::string template_id;
    std::string slot;
};

class EmptyPlan : public Error {
public:
    using Error::Error;
};

class EmptyCorrection : public Error {
public:
    using Error::Error;
};

class MissingAccount : public Error {
public:
    using Error::Error;
};

class VisualizationExhausted : public Error {
public:
    explicit VisualizationExhausted(int attempts)
        : Error("visualization failed after " + std::to_string(attempts) + " attempts"),
          attempts(attempts) {}

    int attempts;
};

class ExecutorFailure : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class SpawnFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnknownTool : public Error {
public:
    explicit UnknownTool(const std::string& name) : Error("unknown tool: " + name) {}
};

class UnknownCase : public Error {
public:
    explicit UnknownCase(const std::string& id) : Error("unknown case_id: " + id) {}
};

class UnknownJob : public Error {
public:
    explicit UnknownJob(const std::string& id) : Error("unknown job_id: " + id) {}
};

}  // namespace foamforge
