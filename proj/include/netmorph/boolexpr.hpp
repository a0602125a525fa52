/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file boolexpr.hpp
  \brief Boolean-function circuit format: parsing, truth tables, equivalence

  The format is a list of assignment lines such as `Y = NAND(A1, A2)`.  It is
  the exchange format between the rewriting pipeline and a language model:
  easy to prompt with, easy to parse back, and small enough to check
  exhaustively.
*/

#pragma once

#include "common.hpp"
#include "errors.hpp"
#include "ops.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netmorph
{

/*! \brief One `target = OP(arg, ...)` statement. */
struct assignment
{
  std::string target;
  gate_op op{ gate_op::AND };
  std::vector<std::string> args;

  bool operator==( const assignment& ) const = default;
};

/*! \brief A circuit in the Boolean-function format.
 *
 * `inputs` lists the free variables in order of first appearance; `output` is
 * the variable named `Y` when one is assigned, otherwise the target of the
 * last statement.  Statements are topologically ordered by construction
 * (forward references are a parse error).
 */
struct boolean_circuit
{
  std::vector<assignment> statements;
  std::vector<std::string> inputs;
  std::string output;

  bool operator==( const boolean_circuit& ) const = default;
};

/*! \brief Hard cap on truth-table width; 2^16 bits is still cheap to sweep. */
inline constexpr unsigned max_truth_table_inputs = 16;

/*! \brief Packed truth table: bit i is the output for input vector i.
 *
 * Input vector i assigns bit j of i to input j, so input 0 is the
 * fastest-toggling column.
 */
class truth_table
{
public:
  explicit truth_table( unsigned num_inputs )
      : num_inputs_( num_inputs ), words_( word_count( num_inputs ), 0 )
  {
    if ( num_inputs > max_truth_table_inputs )
    {
      throw validation_error( "truth table over " + std::to_string( num_inputs ) + " inputs exceeds the " + std::to_string( max_truth_table_inputs ) + "-input cap" );
    }
  }

  static std::size_t word_count( unsigned num_inputs )
  {
    return num_inputs <= 6 ? 1 : std::size_t( 1 ) << ( num_inputs - 6 );
  }

  unsigned num_inputs() const { return num_inputs_; }
  uint64_t num_bits() const { return uint64_t( 1 ) << num_inputs_; }

  bool bit( uint64_t index ) const
  {
    return ( words_[index >> 6] >> ( index & 63 ) ) & 1ull;
  }

  void set_word( std::size_t word_index, uint64_t value )
  {
    words_[word_index] = value;
    if ( num_inputs_ < 6 && word_index == 0 )
    {
      words_[0] &= ( uint64_t( 1 ) << num_bits() ) - 1;
    }
  }

  const std::vector<uint64_t>& words() const { return words_; }

  /*! \brief Bits in vector order, index 0 first: AND(2) reads "0001". */
  std::string to_binary_string() const
  {
    std::string out;
    out.reserve( num_bits() );
    for ( uint64_t i = 0; i < num_bits(); ++i )
    {
      out += bit( i ) ? '1' : '0';
    }
    return out;
  }

  bool operator==( const truth_table& ) const = default;

private:
  unsigned num_inputs_;
  std::vector<uint64_t> words_;
};

namespace detail
{

inline constexpr std::array<uint64_t, 6> input_projections = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull };

/*! \brief Value of input variable `var` across the 64 vectors of word `word_index`. */
inline uint64_t input_word( unsigned var, uint64_t word_index )
{
  if ( var < 6 )
  {
    return input_projections[var];
  }
  return ( ( word_index >> ( var - 6 ) ) & 1ull ) ? ~0ull : 0ull;
}

/*! \brief Scanner for one assignment line; whitespace-liberal by design. */
class line_scanner
{
public:
  explicit line_scanner( std::string_view line ) : line_( line ) {}

  void skip_ws()
  {
    while ( pos_ < line_.size() && ( line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r' ) )
    {
      ++pos_;
    }
  }

  bool at_end()
  {
    skip_ws();
    return pos_ >= line_.size();
  }

  bool consume( char c )
  {
    skip_ws();
    if ( pos_ < line_.size() && line_[pos_] == c )
    {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<std::string_view> identifier()
  {
    skip_ws();
    if ( pos_ >= line_.size() || !is_ident_start( line_[pos_] ) )
    {
      return std::nullopt;
    }
    const std::size_t begin = pos_;
    while ( pos_ < line_.size() && is_ident_char( line_[pos_] ) )
    {
      ++pos_;
    }
    return line_.substr( begin, pos_ - begin );
  }

  unsigned column() const { return static_cast<unsigned>( pos_ ) + 1; }

private:
  std::string_view line_;
  std::size_t pos_{ 0 };
};

/*! \brief Parses one assignment line; nullopt when the line is blank. */
inline std::optional<assignment> parse_assignment_line( std::string_view line, unsigned line_no )
{
  line_scanner scan( line );
  if ( scan.at_end() )
  {
    return std::nullopt;
  }
  const auto target = scan.identifier();
  if ( !target )
  {
    throw parse_error( "expected an identifier on the left of '='", line_no, scan.column() );
  }
  if ( !scan.consume( '=' ) )
  {
    throw parse_error( "expected '=' after '" + std::string( *target ) + "'", line_no, scan.column() );
  }
  const auto op_name = scan.identifier();
  if ( !op_name )
  {
    throw parse_error( "expected an operator name after '='", line_no, scan.column() );
  }
  const auto op = gate_op_from_string( *op_name );
  if ( !op )
  {
    throw parse_error( "unknown operator '" + std::string( *op_name ) + "'", line_no, scan.column() );
  }
  if ( !scan.consume( '(' ) )
  {
    throw parse_error( "expected '(' after operator name", line_no, scan.column() );
  }
  assignment stmt;
  stmt.target = std::string( *target );
  stmt.op = *op;
  while ( true )
  {
    const auto arg = scan.identifier();
    if ( !arg )
    {
      throw parse_error( "expected an argument identifier", line_no, scan.column() );
    }
    stmt.args.emplace_back( *arg );
    if ( scan.consume( ',' ) )
    {
      continue;
    }
    if ( scan.consume( ')' ) )
    {
      break;
    }
    throw parse_error( "expected ',' or ')' in the argument list", line_no, scan.column() );
  }
  if ( !scan.at_end() )
  {
    throw parse_error( "unexpected text after ')'", line_no, scan.column() );
  }
  if ( !arity_ok( stmt.op, stmt.args.size() ) )
  {
    throw parse_error( "operator " + std::string( to_string( stmt.op ) ) + ( is_unary( stmt.op ) ? " takes exactly one argument" : " takes at least two arguments" ) + " (got " + std::to_string( stmt.args.size() ) + ")", line_no );
  }
  return stmt;
}

/*! \brief True when a line has the `id = OP(id, ...)` shape (used for response extraction). */
inline bool looks_like_assignment( std::string_view line )
{
  try
  {
    line_scanner scan( line );
    if ( scan.at_end() )
    {
      return false;
    }
    if ( !scan.identifier() || !scan.consume( '=' ) || !scan.identifier() || !scan.consume( '(' ) )
    {
      return false;
    }
    while ( true )
    {
      if ( !scan.identifier() )
      {
        return false;
      }
      if ( scan.consume( ',' ) )
      {
        continue;
      }
      break;
    }
    return scan.consume( ')' ) && scan.at_end();
  }
  catch ( ... )
  {
    return false;
  }
}

} // namespace detail

/*! \brief Parses the Boolean-function format.
 *
 * Rules enforced here, each reported with its line number:
 *  - every non-blank line is a single assignment `id = OP(arg, ...)`;
 *  - operator names are case-insensitive; NOT/BUF are unary, the rest n-ary;
 *  - every identifier is assigned at most once;
 *  - an assigned identifier may only be used after its assignment.
 */
inline boolean_circuit parse_boolean_circuit( std::string_view text )
{
  boolean_circuit circuit;
  std::vector<unsigned> stmt_lines;
  unsigned line_no = 0;
  for ( std::string_view line : split_lines( text ) )
  {
    ++line_no;
    auto stmt = detail::parse_assignment_line( line, line_no );
    if ( stmt )
    {
      circuit.statements.push_back( std::move( *stmt ) );
      stmt_lines.push_back( line_no );
    }
  }
  if ( circuit.statements.empty() )
  {
    throw parse_error( "no assignment statements found", line_no == 0 ? 1 : line_no );
  }

  std::unordered_map<std::string_view, std::size_t> defined_at;
  for ( std::size_t i = 0; i < circuit.statements.size(); ++i )
  {
    const auto [it, inserted] = defined_at.emplace( circuit.statements[i].target, i );
    if ( !inserted )
    {
      throw parse_error( "'" + circuit.statements[i].target + "' is assigned more than once", stmt_lines[i] );
    }
  }
  std::set<std::string_view> seen_inputs;
  for ( std::size_t i = 0; i < circuit.statements.size(); ++i )
  {
    for ( const std::string& arg : circuit.statements[i].args )
    {
      const auto it = defined_at.find( arg );
      if ( it != defined_at.end() )
      {
        if ( it->second >= i )
        {
          throw parse_error( "forward reference to '" + arg + "'", stmt_lines[i] );
        }
      }
      else if ( seen_inputs.insert( arg ).second )
      {
        circuit.inputs.push_back( arg );
      }
    }
  }
  circuit.output = defined_at.count( "Y" ) ? "Y" : circuit.statements.back().target;
  return circuit;
}

/*! \brief Canonical emission: one statement per line, `Y = OP(a, b)` spacing. */
inline std::string emit_boolean_circuit( const boolean_circuit& circuit )
{
  std::string out;
  for ( const assignment& stmt : circuit.statements )
  {
    out += stmt.target;
    out += " = ";
    out += to_string( stmt.op );
    out += "(";
    out += join( stmt.args, ", " );
    out += ")\n";
  }
  return out;
}

/*! \brief Set of operators appearing in the circuit. */
inline std::set<gate_op> operators_used( const boolean_circuit& circuit )
{
  std::set<gate_op> ops;
  for ( const assignment& stmt : circuit.statements )
  {
    ops.insert( stmt.op );
  }
  return ops;
}

/*! \brief Truth table with input variable j bound to `input_order[j]`.
 *
 * Every free variable of the circuit must appear in `input_order`; extra
 * names in the order are allowed (they become don't-care columns), which is
 * what name-matched equivalence needs.
 */
inline truth_table compute_truth_table( const boolean_circuit& circuit, std::span<const std::string> input_order )
{
  truth_table table( static_cast<unsigned>( input_order.size() ) );
  std::unordered_map<std::string_view, unsigned> var_of;
  for ( unsigned i = 0; i < input_order.size(); ++i )
  {
    var_of.emplace( input_order[i], i );
  }
  for ( const std::string& input : circuit.inputs )
  {
    if ( !var_of.count( input ) )
    {
      throw validation_error( "circuit input '" + input + "' is not bound by the given input order" );
    }
  }

  std::unordered_map<std::string_view, uint64_t> value;
  std::vector<uint64_t> arg_words;
  for ( std::size_t w = 0; w < table.words().size(); ++w )
  {
    value.clear();
    for ( const std::string& input : circuit.inputs )
    {
      value[input] = detail::input_word( var_of[input], w );
    }
    for ( const assignment& stmt : circuit.statements )
    {
      arg_words.clear();
      for ( const std::string& arg : stmt.args )
      {
        arg_words.push_back( value.at( arg ) );
      }
      value[stmt.target] = gate_semantics_word( stmt.op, arg_words );
    }
    table.set_word( w, value.at( circuit.output ) );
  }
  return table;
}

/*! \brief Truth table over the circuit's own input order. */
inline truth_table compute_truth_table( const boolean_circuit& circuit )
{
  return compute_truth_table( circuit, circuit.inputs );
}

/*! \brief Result of an equivalence check; `reason` is empty iff equivalent. */
struct equivalence_result
{
  bool equivalent{ false };
  std::string reason;
};

namespace detail
{

inline std::string render_vector( uint64_t index, std::span<const std::string> input_order )
{
  std::string out;
  for ( std::size_t i = 0; i < input_order.size(); ++i )
  {
    if ( i != 0 )
    {
      out += ", ";
    }
    out += input_order[i] + "=" + ( ( index >> i ) & 1ull ? "1" : "0" );
  }
  return out;
}

} // namespace detail

/*! \brief Name-matched exhaustive equivalence over at most 2^16 vectors.
 *
 * Inputs are matched by name; differing input name sets are reported as
 * non-equivalence (reason "input mismatch ..."), not as an error, because the
 * caller treats that as a functionality failure of a candidate rewrite.
 */
inline equivalence_result check_equivalent( const boolean_circuit& a, const boolean_circuit& b )
{
  std::vector<std::string> a_sorted = a.inputs;
  std::vector<std::string> b_sorted = b.inputs;
  std::sort( a_sorted.begin(), a_sorted.end() );
  std::sort( b_sorted.begin(), b_sorted.end() );
  if ( a_sorted != b_sorted )
  {
    return { false, "input mismatch: {" + join( a_sorted, ", " ) + "} vs {" + join( b_sorted, ", " ) + "}" };
  }

  const truth_table ta = compute_truth_table( a, a.inputs );
  const truth_table tb = compute_truth_table( b, a.inputs );
  for ( std::size_t w = 0; w < ta.words().size(); ++w )
  {
    uint64_t diff = ta.words()[w] ^ tb.words()[w];
    if ( a.inputs.size() < 6 )
    {
      diff &= ( uint64_t( 1 ) << ta.num_bits() ) - 1;
    }
    if ( diff != 0 )
    {
      const uint64_t index = ( uint64_t( w ) << 6 ) + static_cast<uint64_t>( std::countr_zero( diff ) );
      return { false, "differs on input vector " + std::to_string( index ) + " (" + detail::render_vector( index, a.inputs ) + ")" };
    }
  }
  return { true, "" };
}

/*! \brief Convenience wrapper around check_equivalent. */
inline bool equivalent( const boolean_circuit& a, const boolean_circuit& b )
{
  return check_equivalent( a, b ).equivalent;
}

} // namespace netmorph
