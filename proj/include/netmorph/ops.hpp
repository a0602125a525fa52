/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file ops.hpp
  \brief Primitive gate operators, their arity rules, and their semantics
*/

#pragma once

#include "errors.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netmorph
{

/*! \brief Gate operators of the supported netlist subset.
 *
 * The declaration order is the canonical sort order used everywhere results
 * are listed (characterization tables, dictionaries, reports).
 */
enum class gate_op : uint8_t
{
  AND = 0,
  OR,
  NAND,
  NOR,
  XOR,
  XNOR,
  NOT,
  BUF
};

inline constexpr std::array<gate_op, 8> all_gate_ops = {
    gate_op::AND, gate_op::OR, gate_op::NAND, gate_op::NOR,
    gate_op::XOR, gate_op::XNOR, gate_op::NOT, gate_op::BUF };

inline constexpr std::string_view to_string( gate_op op )
{
  switch ( op )
  {
  case gate_op::AND: return "AND";
  case gate_op::OR: return "OR";
  case gate_op::NAND: return "NAND";
  case gate_op::NOR: return "NOR";
  case gate_op::XOR: return "XOR";
  case gate_op::XNOR: return "XNOR";
  case gate_op::NOT: return "NOT";
  case gate_op::BUF: return "BUF";
  }
  return "?";
}

/*! \brief Lowercase Verilog primitive name of the operator. */
inline std::string verilog_name( gate_op op )
{
  std::string name( to_string( op ) );
  for ( char& c : name )
  {
    c = static_cast<char>( c - 'A' + 'a' );
  }
  return name;
}

/*! \brief Case-insensitive operator lookup; nullopt for unknown names. */
inline std::optional<gate_op> gate_op_from_string( std::string_view name )
{
  std::string upper( name );
  for ( char& c : upper )
  {
    if ( c >= 'a' && c <= 'z' )
    {
      c = static_cast<char>( c - 'a' + 'A' );
    }
  }
  for ( gate_op op : all_gate_ops )
  {
    if ( upper == to_string( op ) )
    {
      return op;
    }
  }
  return std::nullopt;
}

/*! \brief True for the single-input operators. */
inline constexpr bool is_unary( gate_op op )
{
  return op == gate_op::NOT || op == gate_op::BUF;
}

/*! \brief NOT/BUF take exactly one input; all other operators take two or more. */
inline constexpr bool arity_ok( gate_op op, std::size_t fan_in )
{
  return is_unary( op ) ? fan_in == 1 : fan_in >= 2;
}

/*! \brief An operator together with a concrete fan-in, e.g. (NAND, 2). */
struct gate_type
{
  gate_op op{ gate_op::AND };
  unsigned fan_in{ 2 };

  auto operator<=>( const gate_type& ) const = default;
};

inline std::string to_string( const gate_type& t )
{
  return std::string( to_string( t.op ) ) + "/" + std::to_string( t.fan_in );
}

/*! \brief Word-parallel gate evaluation: each bit position is one input vector.
 *
 * XOR is odd parity and XNOR its complement for any fan-in, matching the
 * Verilog primitives.  Throws on an arity violation.
 */
inline uint64_t gate_semantics_word( gate_op op, std::span<const uint64_t> args )
{
  if ( !arity_ok( op, args.size() ) )
  {
    throw validation_error( "operator " + std::string( to_string( op ) ) + " does not take " + std::to_string( args.size() ) + " input(s)" );
  }
  switch ( op )
  {
  case gate_op::NOT:
    return ~args[0];
  case gate_op::BUF:
    return args[0];
  case gate_op::AND:
  case gate_op::NAND:
  {
    uint64_t acc = args[0];
    for ( std::size_t i = 1; i < args.size(); ++i )
    {
      acc &= args[i];
    }
    return op == gate_op::AND ? acc : ~acc;
  }
  case gate_op::OR:
  case gate_op::NOR:
  {
    uint64_t acc = args[0];
    for ( std::size_t i = 1; i < args.size(); ++i )
    {
      acc |= args[i];
    }
    return op == gate_op::OR ? acc : ~acc;
  }
  case gate_op::XOR:
  case gate_op::XNOR:
  {
    uint64_t acc = args[0];
    for ( std::size_t i = 1; i < args.size(); ++i )
    {
      acc ^= args[i];
    }
    return op == gate_op::XOR ? acc : ~acc;
  }
  }
  return 0;
}

/*! \brief Scalar gate evaluation over explicit input bits. */
inline bool gate_semantics( gate_op op, const std::vector<bool>& args )
{
  std::vector<uint64_t> words( args.size() );
  for ( std::size_t i = 0; i < args.size(); ++i )
  {
    words[i] = args[i] ? ~0ull : 0ull;
  }
  return ( gate_semantics_word( op, words ) & 1ull ) != 0;
}

} // namespace netmorph
