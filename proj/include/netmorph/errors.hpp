/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file errors.hpp
  \brief Error hierarchy shared across the library

  The split mirrors how callers react: configuration problems are usage bugs,
  parse/validation problems are input bugs, transport problems are retriable
  environment failures.  The CLI maps them to distinct exit codes.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace netmorph
{

/*! \brief Malformed source text; carries the 1-based line of the offence. */
class parse_error : public std::runtime_error
{
public:
  parse_error( const std::string& what, unsigned line, unsigned column = 0 )
      : std::runtime_error( format( what, line, column ) ), line_( line ), column_( column )
  {
  }

  unsigned line() const noexcept { return line_; }
  unsigned column() const noexcept { return column_; }

private:
  static std::string format( const std::string& what, unsigned line, unsigned column )
  {
    std::string msg = "line " + std::to_string( line );
    if ( column != 0 )
    {
      msg += ", col " + std::to_string( column );
    }
    msg += ": " + what;
    return msg;
  }

  unsigned line_;
  unsigned column_;
};

/*! \brief Structurally well-formed input that violates a semantic rule. */
class validation_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Bad configuration: unknown options, missing credentials, bad flags. */
class config_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Backend transport failure (network, exhausted scripts); aborts a session. */
class transport_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Filesystem failure while reading or writing artifacts. */
class io_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace netmorph
