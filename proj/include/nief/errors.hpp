#pragma once

#include <stdexcept>
#include <string>

namespace nief {

// Bad input: maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The numbers went somewhere they should not: maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    enum class Kind {
        SingularDenominator,
        NonPhysical,
        SingularSystem,
        DivisionByZero,
        GridTooNarrow,
        RegimeViolation,
        LorentzCatastrophe,
        QuadratureNotConverged,
        DegenerateGeometry,
        PVNotConverged,
        ZeroWidth,
        Infeasible,
        MissingColumns,
    };

    NumericalError(Kind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    static const char* kind_name(Kind k) noexcept {
        switch (k) {
        case Kind::SingularDenominator: return "SingularDenominator";
        case Kind::NonPhysical: return "NonPhysical";
        case Kind::SingularSystem: return "SingularSystem";
        case Kind::DivisionByZero: return "DivisionByZero";
        case Kind::GridTooNarrow: return "GridTooNarrow";
        case Kind::RegimeViolation: return "RegimeViolation";
        case Kind::LorentzCatastrophe: return "LorentzCatastrophe";
        case Kind::QuadratureNotConverged: return "QuadratureNotConverged";
        case Kind::DegenerateGeometry: return "DegenerateGeometry";
        case Kind::PVNotConverged: return "PVNotConverged";
        case Kind::ZeroWidth: return "ZeroWidth";
        case Kind::Infeasible: return "Infeasible";
        case Kind::MissingColumns: return "MissingColumns";
        }
        return "NumericalError";
    }

private:
    Kind kind_;
};

[[noreturn]] inline void fail(NumericalError::Kind k, const std::string& what) { throw NumericalError(k, what); }

} // namespace nief
