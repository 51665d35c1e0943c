// SPDX-License-Identifier: Apache-2.0
#ifndef DBRIS_ERROR_HPP
#define DBRIS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dbris
{

enum class ErrorKind
{
    InvalidInput,
    EmptyPattern,
    NonPassive,
    SingularNetwork,
    NullField,
    IncidenceInvalid,
    InfeasiblePopulation,
    IncompatibleTraces,
    EmptyOverlap,
    Parse,
};

// Every library failure carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace dbris

#endif
