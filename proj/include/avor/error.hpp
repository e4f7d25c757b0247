#pragma once

#include <stdexcept>
#include <string>

namespace avor
{

enum class ErrorCode
{
  parse,             // malformed document or schema violation
  format,            // well-formed but inconsistent (e.g. non-uniform dt)
  reference,         // dangling identifier
  validation,        // domain invariant violated
  io,                // file system failure
  no_cutin,          // segmentation could not find the manoeuvre
  degenerate,        // numerically undefined input (e.g. constant trace)
  spec_mismatch,     // grids on different specs
  out_of_range,      // time window outside the available data
  invalid_argument,
  not_found,
  conflict,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char * to_string(ErrorCode code) noexcept;

}  // namespace avor
