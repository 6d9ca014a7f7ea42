#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace windcurve {

// Base of every error raised by the library. kind() is a stable,
// machine-readable tag used by the CLI's error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define WINDCURVE_DEFINE_ERROR(Name, tag)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(tag, what) {}        \
    }

WINDCURVE_DEFINE_ERROR(InvalidPeriodError, "invalid_period");
WINDCURVE_DEFINE_ERROR(InvalidSeriesError, "invalid_series");
WINDCURVE_DEFINE_ERROR(MisalignedError, "misaligned");
WINDCURVE_DEFINE_ERROR(AlignmentError, "alignment");
WINDCURVE_DEFINE_ERROR(SplitError, "split");
WINDCURVE_DEFINE_ERROR(NormalizationError, "normalization");
WINDCURVE_DEFINE_ERROR(InvalidCurveError, "invalid_curve");
WINDCURVE_DEFINE_ERROR(DomainError, "domain");
WINDCURVE_DEFINE_ERROR(EstimationError, "estimation");
WINDCURVE_DEFINE_ERROR(FitError, "fit");
WINDCURVE_DEFINE_ERROR(TrainingError, "training");
WINDCURVE_DEFINE_ERROR(SchemaError, "schema");
WINDCURVE_DEFINE_ERROR(ImputationError, "imputation");
WINDCURVE_DEFINE_ERROR(ParameterError, "parameter");
WINDCURVE_DEFINE_ERROR(UndefinedMetricError, "undefined_metric");
WINDCURVE_DEFINE_ERROR(ConfigError, "config");
WINDCURVE_DEFINE_ERROR(IoError, "io");

#undef WINDCURVE_DEFINE_ERROR

// Malformed input file; carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace windcurve
