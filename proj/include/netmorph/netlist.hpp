/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file netlist.hpp
  \brief Gate-level Verilog subset: parsing, emission, structural metrics

  The subset covers structural netlists built from the eight primitive gates
  (and, or, nand, nor, xor, xnor, not, buf) plus module/port/wire scaffolding.
  Anything else (flip-flops, assigns, parameters) passes through verbatim as
  opaque lines so that sequential designs survive a rewrite untouched.
*/

#pragma once

#include "common.hpp"
#include "errors.hpp"
#include "ops.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <tuple>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace netmorph
{

enum class port_direction : uint8_t
{
  input,
  output
};

struct port
{
  std::string name;
  port_direction direction{ port_direction::input };

  bool operator==( const port& ) const = default;
};

/*! \brief One primitive gate instance; `output` is the first terminal. */
struct gate_instance
{
  gate_op op{ gate_op::AND };
  std::string name;
  std::string output;
  std::vector<std::string> inputs;

  bool operator==( const gate_instance& ) const = default;

  gate_type type() const
  {
    return { op, static_cast<unsigned>( inputs.size() ) };
  }
};

inline constexpr std::string_view const_zero = "1'b0";
inline constexpr std::string_view const_one = "1'b1";

inline bool is_constant_net( std::string_view name )
{
  return name == const_zero || name == const_one;
}

/*! \brief A parsed netlist.
 *
 * Invariants established by parse_netlist and preserved by the rewriting
 * pipeline: ports are unique and directed, wires are unique and disjoint from
 * ports, every gate output is a wire or output port driven by exactly one
 * gate, every gate input is declared or a constant, and the gates form a DAG.
 */
struct netlist
{
  std::string name;
  std::vector<port> ports;               // module header order
  std::vector<std::string> wires;        // declaration order
  std::vector<gate_instance> gates;      // source order
  std::vector<std::string> opaque_items; // verbatim non-gate statements

  bool operator==( const netlist& ) const = default;

  std::vector<std::string> input_names() const
  {
    std::vector<std::string> names;
    for ( const port& p : ports )
    {
      if ( p.direction == port_direction::input )
      {
        names.push_back( p.name );
      }
    }
    return names;
  }

  std::vector<std::string> output_names() const
  {
    std::vector<std::string> names;
    for ( const port& p : ports )
    {
      if ( p.direction == port_direction::output )
      {
        names.push_back( p.name );
      }
    }
    return names;
  }
};

namespace detail
{

/*! \brief Replaces // and block comments with spaces, preserving offsets and newlines. */
inline std::string strip_comments( std::string_view source )
{
  std::string out( source );
  enum class state
  {
    code,
    line_comment,
    block_comment
  };
  state st = state::code;
  for ( std::size_t i = 0; i < out.size(); ++i )
  {
    const char c = out[i];
    switch ( st )
    {
    case state::code:
      if ( c == '/' && i + 1 < out.size() && out[i + 1] == '/' )
      {
        st = state::line_comment;
        out[i] = ' ';
      }
      else if ( c == '/' && i + 1 < out.size() && out[i + 1] == '*' )
      {
        st = state::block_comment;
        out[i] = ' ';
        out[i + 1] = ' ';
        ++i;
      }
      break;
    case state::line_comment:
      if ( c == '\n' )
      {
        st = state::code;
      }
      else
      {
        out[i] = ' ';
      }
      break;
    case state::block_comment:
      if ( c == '*' && i + 1 < out.size() && out[i + 1] == '/' )
      {
        out[i] = ' ';
        out[i + 1] = ' ';
        ++i;
        st = state::code;
      }
      else if ( c != '\n' )
      {
        out[i] = ' ';
      }
      break;
    }
  }
  return out;
}

struct nl_token
{
  enum class kind
  {
    ident,
    number,
    punct,
    eof
  };
  kind k{ kind::eof };
  std::string text;
  unsigned line{ 0 };
  unsigned col{ 0 };
  std::size_t offset{ 0 };
};

inline bool is_verilog_ident_char( char c )
{
  return is_ident_char( c ) || c == '$';
}

/*! \brief Lexes a comment-stripped source into tokens with positions. */
inline std::vector<nl_token> lex_netlist( std::string_view stripped )
{
  std::vector<nl_token> tokens;
  unsigned line = 1;
  unsigned col = 1;
  std::size_t i = 0;
  const auto advance = [&]( std::size_t by ) {
    for ( std::size_t j = 0; j < by; ++j )
    {
      if ( stripped[i + j] == '\n' )
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
    }
    i += by;
  };
  while ( i < stripped.size() )
  {
    const char c = stripped[i];
    if ( c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v' )
    {
      advance( 1 );
      continue;
    }
    nl_token tok;
    tok.line = line;
    tok.col = col;
    tok.offset = i;
    if ( c == '\\' )
    {
      std::size_t end = i + 1;
      while ( end < stripped.size() && !std::isspace( static_cast<unsigned char>( stripped[end] ) ) )
      {
        ++end;
      }
      tok.k = nl_token::kind::ident;
      tok.text = std::string( stripped.substr( i, end - i ) );
      advance( end - i );
    }
    else if ( is_ident_start( c ) )
    {
      std::size_t end = i;
      while ( end < stripped.size() && is_verilog_ident_char( stripped[end] ) )
      {
        ++end;
      }
      tok.k = nl_token::kind::ident;
      tok.text = std::string( stripped.substr( i, end - i ) );
      advance( end - i );
    }
    else if ( c >= '0' && c <= '9' )
    {
      std::size_t end = i;
      while ( end < stripped.size() && ( stripped[end] >= '0' && stripped[end] <= '9' ) )
      {
        ++end;
      }
      if ( end < stripped.size() && stripped[end] == '\'' )
      {
        ++end;
        if ( end < stripped.size() && ( stripped[end] == 's' || stripped[end] == 'S' ) )
        {
          ++end;
        }
        if ( end < stripped.size() && std::isalpha( static_cast<unsigned char>( stripped[end] ) ) )
        {
          ++end;
        }
        while ( end < stripped.size() && ( std::isalnum( static_cast<unsigned char>( stripped[end] ) ) || stripped[end] == '_' ) )
        {
          ++end;
        }
      }
      tok.k = nl_token::kind::number;
      tok.text = std::string( stripped.substr( i, end - i ) );
      advance( end - i );
    }
    else
    {
      tok.k = nl_token::kind::punct;
      tok.text = std::string( 1, c );
      advance( 1 );
    }
    tokens.push_back( std::move( tok ) );
  }
  nl_token eof;
  eof.k = nl_token::kind::eof;
  eof.line = line;
  eof.col = col;
  eof.offset = stripped.size();
  tokens.push_back( std::move( eof ) );
  return tokens;
}

/*! \brief Lowercase primitive keyword lookup (netlist keywords are case-sensitive). */
inline std::optional<gate_op> gate_keyword( std::string_view text )
{
  for ( gate_op op : all_gate_ops )
  {
    if ( text == verilog_name( op ) )
    {
      return op;
    }
  }
  return std::nullopt;
}

/*! \brief All identifier-shaped words in a piece of raw statement text.
 * Used to find the nets a pass-through statement touches without imposing
 * any grammar on it.
 */
inline std::vector<std::string> scan_identifiers( std::string_view text )
{
  std::vector<std::string> found;
  std::size_t i = 0;
  while ( i < text.size() )
  {
    if ( is_ident_start( text[i] ) )
    {
      std::size_t end = i;
      while ( end < text.size() && is_ident_char( text[end] ) )
      {
        ++end;
      }
      found.emplace_back( text.substr( i, end - i ) );
      i = end;
    }
    else
    {
      ++i;
    }
  }
  return found;
}

class netlist_parser
{
public:
  explicit netlist_parser( std::string_view source )
      : stripped_( strip_comments( source ) ), tokens_( lex_netlist( stripped_ ) )
  {
  }

  netlist run()
  {
    netlist result;
    expect_keyword( "module" );
    result.name = expect_ident( "module name" );
    expect_punct( '(' );
    while ( true )
    {
      header_ports_.push_back( expect_ident( "port name" ) );
      if ( consume_punct( ',' ) )
      {
        continue;
      }
      break;
    }
    expect_punct( ')' );
    expect_punct( ';' );

    bool ended = false;
    while ( !ended )
    {
      const nl_token& tok = peek();
      if ( tok.k == nl_token::kind::eof )
      {
        throw parse_error( "missing 'endmodule'", tok.line, tok.col );
      }
      if ( tok.k == nl_token::kind::ident )
      {
        if ( tok.text == "endmodule" )
        {
          ++idx_;
          ended = true;
          continue;
        }
        if ( tok.text == "input" || tok.text == "output" || tok.text == "wire" )
        {
          parse_declaration( tok.text );
          continue;
        }
        if ( const auto op = gate_keyword( tok.text ) )
        {
          parse_gate( *op );
          continue;
        }
      }
      capture_opaque_line( result );
    }
    if ( peek().k != nl_token::kind::eof )
    {
      if ( peek().k == nl_token::kind::ident && peek().text == "module" )
      {
        throw validation_error( "multiple modules in one source are not supported" );
      }
      throw parse_error( "unexpected text after 'endmodule'", peek().line, peek().col );
    }

    finish( result );
    return result;
  }

private:
  const nl_token& peek() const { return tokens_[idx_]; }

  const nl_token& next()
  {
    const nl_token& tok = tokens_[idx_];
    if ( tok.k != nl_token::kind::eof )
    {
      ++idx_;
    }
    return tok;
  }

  void expect_keyword( std::string_view kw )
  {
    const nl_token& tok = next();
    if ( tok.k != nl_token::kind::ident || tok.text != kw )
    {
      throw parse_error( "expected '" + std::string( kw ) + "'", tok.line, tok.col );
    }
  }

  std::string expect_ident( std::string_view what )
  {
    const nl_token& tok = next();
    if ( tok.k != nl_token::kind::ident )
    {
      throw parse_error( "expected " + std::string( what ), tok.line, tok.col );
    }
    return tok.text;
  }

  void expect_punct( char c )
  {
    const nl_token& tok = next();
    if ( tok.k != nl_token::kind::punct || tok.text[0] != c )
    {
      throw parse_error( std::string( "expected '" ) + c + "'", tok.line, tok.col );
    }
  }

  bool consume_punct( char c )
  {
    if ( peek().k == nl_token::kind::punct && peek().text[0] == c )
    {
      ++idx_;
      return true;
    }
    return false;
  }

  void parse_declaration( const std::string& kw )
  {
    const unsigned decl_line = peek().line;
    ++idx_;
    while ( true )
    {
      const std::string name = expect_ident( kw + " name" );
      if ( kw == "wire" )
      {
        wire_decls_.emplace_back( name, decl_line );
      }
      else
      {
        direction_decls_.emplace_back( name, kw == "input" ? port_direction::input : port_direction::output, decl_line );
      }
      if ( consume_punct( ',' ) )
      {
        continue;
      }
      break;
    }
    expect_punct( ';' );
  }

  void parse_gate( gate_op op )
  {
    const unsigned gate_line = peek().line;
    ++idx_;
    gate_instance gate;
    gate.op = op;
    gate.name = expect_ident( "instance name" );
    expect_punct( '(' );
    gate.output = expect_ident( "output net" );
    expect_punct( ',' );
    while ( true )
    {
      const nl_token& tok = next();
      if ( tok.k == nl_token::kind::ident )
      {
        gate.inputs.push_back( tok.text );
      }
      else if ( tok.k == nl_token::kind::number && is_constant_net( tok.text ) )
      {
        gate.inputs.push_back( tok.text );
      }
      else
      {
        throw parse_error( "expected an input net or 1'b0/1'b1", tok.line, tok.col );
      }
      if ( consume_punct( ',' ) )
      {
        continue;
      }
      break;
    }
    expect_punct( ')' );
    expect_punct( ';' );
    if ( !arity_ok( op, gate.inputs.size() ) )
    {
      throw parse_error( "gate '" + gate.name + "': operator " + verilog_name( op ) + ( is_unary( op ) ? " takes exactly one input" : " takes at least two inputs" ) + " (got " + std::to_string( gate.inputs.size() ) + ")", gate_line );
    }
    gate_lines_.push_back( gate_line );
    gates_.push_back( std::move( gate ) );
  }

  /*! \brief Captures the rest of the current physical line verbatim. */
  void capture_opaque_line( netlist& result )
  {
    const nl_token& tok = peek();
    const unsigned line = tok.line;
    std::size_t end = stripped_.find( '\n', tok.offset );
    if ( end == std::string::npos )
    {
      end = stripped_.size();
    }
    result.opaque_items.emplace_back( trim_view( std::string_view( stripped_ ).substr( tok.offset, end - tok.offset ) ) );
    while ( peek().k != nl_token::kind::eof && peek().line == line )
    {
      ++idx_;
    }
  }

  void finish( netlist& result )
  {
    std::unordered_map<std::string, port_direction> direction_of;
    std::unordered_set<std::string> header_set;
    for ( const std::string& name : header_ports_ )
    {
      if ( !header_set.insert( name ).second )
      {
        throw validation_error( "port '" + name + "' listed twice in the module header" );
      }
    }
    for ( const auto& [name, dir, line] : direction_decls_ )
    {
      if ( !header_set.count( name ) )
      {
        throw validation_error( "'" + name + "' is declared " + ( dir == port_direction::input ? "input" : "output" ) + " but is not listed in the module header (line " + std::to_string( line ) + ")" );
      }
      if ( !direction_of.emplace( name, dir ).second )
      {
        throw validation_error( "port '" + name + "' has more than one direction declaration (line " + std::to_string( line ) + ")" );
      }
    }
    for ( const std::string& name : header_ports_ )
    {
      const auto it = direction_of.find( name );
      if ( it == direction_of.end() )
      {
        throw validation_error( "port '" + name + "' has no input/output declaration" );
      }
      result.ports.push_back( { name, it->second } );
    }
    std::unordered_set<std::string> wire_set;
    for ( const auto& [name, line] : wire_decls_ )
    {
      if ( header_set.count( name ) )
      {
        throw validation_error( "'" + name + "' is declared both as a port and a wire (line " + std::to_string( line ) + ")" );
      }
      if ( !wire_set.insert( name ).second )
      {
        throw validation_error( "wire '" + name + "' declared more than once (line " + std::to_string( line ) + ")" );
      }
      result.wires.push_back( name );
    }

    std::unordered_set<std::string> instance_names;
    std::unordered_map<std::string, std::size_t> driver_of;
    for ( std::size_t g = 0; g < gates_.size(); ++g )
    {
      const gate_instance& gate = gates_[g];
      const unsigned line = gate_lines_[g];
      if ( !instance_names.insert( gate.name ).second )
      {
        throw validation_error( "instance name '" + gate.name + "' is reused (line " + std::to_string( line ) + ")" );
      }
      const bool out_is_wire = wire_set.count( gate.output ) != 0;
      const auto out_dir = direction_of.find( gate.output );
      if ( !out_is_wire && out_dir == direction_of.end() )
      {
        throw validation_error( "gate '" + gate.name + "' drives undeclared net '" + gate.output + "' (line " + std::to_string( line ) + ")" );
      }
      if ( out_dir != direction_of.end() && out_dir->second == port_direction::input )
      {
        throw validation_error( "gate '" + gate.name + "' drives input port '" + gate.output + "' (line " + std::to_string( line ) + ")" );
      }
      if ( !driver_of.emplace( gate.output, g ).second )
      {
        throw validation_error( "net '" + gate.output + "' has multiple drivers" );
      }
      for ( const std::string& in : gate.inputs )
      {
        if ( is_constant_net( in ) )
        {
          continue;
        }
        if ( !wire_set.count( in ) && !direction_of.count( in ) )
        {
          throw validation_error( "gate '" + gate.name + "' reads undeclared net '" + in + "' (line " + std::to_string( line ) + ")" );
        }
      }
    }
    result.gates = std::move( gates_ );

    // acyclicity: reject combinational loops among the parsed gates
    topological_gate_order_impl( result );
  }

public:
  /*! \brief Kahn topological order of the gate list; throws on a cycle. */
  static std::vector<std::size_t> topological_gate_order_impl( const netlist& n )
  {
    std::unordered_map<std::string_view, std::size_t> driver;
    for ( std::size_t g = 0; g < n.gates.size(); ++g )
    {
      driver.emplace( n.gates[g].output, g );
    }
    std::vector<std::vector<std::size_t>> readers( n.gates.size() );
    std::vector<std::size_t> pending( n.gates.size(), 0 );
    for ( std::size_t g = 0; g < n.gates.size(); ++g )
    {
      for ( const std::string& in : n.gates[g].inputs )
      {
        const auto it = driver.find( in );
        if ( it != driver.end() )
        {
          readers[it->second].push_back( g );
          ++pending[g];
        }
      }
    }
    std::vector<std::size_t> order;
    order.reserve( n.gates.size() );
    std::vector<std::size_t> ready;
    for ( std::size_t g = 0; g < n.gates.size(); ++g )
    {
      if ( pending[g] == 0 )
      {
        ready.push_back( g );
      }
    }
    while ( !ready.empty() )
    {
      const std::size_t g = ready.back();
      ready.pop_back();
      order.push_back( g );
      for ( const std::size_t r : readers[g] )
      {
        if ( --pending[r] == 0 )
        {
          ready.push_back( r );
        }
      }
    }
    if ( order.size() != n.gates.size() )
    {
      for ( std::size_t g = 0; g < n.gates.size(); ++g )
      {
        if ( pending[g] != 0 )
        {
          throw validation_error( "combinational cycle through net '" + n.gates[g].output + "'" );
        }
      }
    }
    return order;
  }

private:
  std::string stripped_;
  std::vector<nl_token> tokens_;
  std::size_t idx_{ 0 };
  std::vector<std::string> header_ports_;
  std::vector<std::tuple<std::string, port_direction, unsigned>> direction_decls_;
  std::vector<std::pair<std::string, unsigned>> wire_decls_;
  std::vector<gate_instance> gates_;
  std::vector<unsigned> gate_lines_;
};

} // namespace detail

/*! \brief Parses the supported gate-level Verilog subset.
 *
 * Comments are stripped, recognized statements may span lines, and any
 * statement that is not a module/port/wire/primitive-gate construct is kept
 * verbatim (line-granular) in `opaque_items`.  Semantic rules (declarations,
 * single drivers, acyclicity) are validated after parsing.
 */
inline netlist parse_netlist( std::string_view source )
{
  return detail::netlist_parser( source ).run();
}

/*! \brief Topological order of gate indices; throws on a combinational cycle. */
inline std::vector<std::size_t> topological_gate_order( const netlist& n )
{
  return detail::netlist_parser::topological_gate_order_impl( n );
}

namespace detail
{

/*! \brief Escaped identifiers keep their backslash and need a trailing space. */
inline void emit_id( std::string& out, const std::string& id )
{
  out += id;
  if ( !id.empty() && id.front() == '\\' )
  {
    out += ' ';
  }
}

} // namespace detail

/*! \brief Emits one gate line in the canonical form `op name (out, in, ...);`. */
inline std::string emit_gate( const gate_instance& gate )
{
  std::string out = verilog_name( gate.op );
  out += ' ';
  detail::emit_id( out, gate.name );
  out += " (";
  detail::emit_id( out, gate.output );
  for ( const std::string& in : gate.inputs )
  {
    out += ", ";
    detail::emit_id( out, in );
  }
  out += ");";
  return out;
}

/*! \brief Canonical emission; `parse_netlist(emit_netlist(n)) == n`.
 *
 * Declarations are emitted one per line, gates in order, opaque lines after
 * the gates.  Interleaving positions of opaque statements are not preserved
 * (they carry no combinational meaning for the parsed fabric).
 */
inline std::string emit_netlist( const netlist& n )
{
  std::string out = "module ";
  detail::emit_id( out, n.name );
  out += " (";
  for ( std::size_t i = 0; i < n.ports.size(); ++i )
  {
    if ( i != 0 )
    {
      out += ", ";
    }
    detail::emit_id( out, n.ports[i].name );
  }
  out += ");\n";
  for ( const port& p : n.ports )
  {
    if ( p.direction == port_direction::input )
    {
      out += "input ";
      detail::emit_id( out, p.name );
      out += ";\n";
    }
  }
  for ( const port& p : n.ports )
  {
    if ( p.direction == port_direction::output )
    {
      out += "output ";
      detail::emit_id( out, p.name );
      out += ";\n";
    }
  }
  for ( const std::string& w : n.wires )
  {
    out += "wire ";
    detail::emit_id( out, w );
    out += ";\n";
  }
  for ( const gate_instance& gate : n.gates )
  {
    out += emit_gate( gate );
    out += '\n';
  }
  for ( const std::string& item : n.opaque_items )
  {
    out += item;
    out += '\n';
  }
  out += "endmodule\n";
  return out;
}

/*! \brief Distinct (operator, fan-in) pairs across the given netlists,
 * sorted by operator then fan-in.
 */
inline std::set<gate_type> characterize( std::span<const netlist> netlists )
{
  std::set<gate_type> types;
  for ( const netlist& n : netlists )
  {
    for ( const gate_instance& g : n.gates )
    {
      types.insert( g.type() );
    }
  }
  return types;
}

inline std::set<gate_type> characterize( const netlist& n )
{
  return characterize( std::span<const netlist>( &n, 1 ) );
}

/*! \brief Longest gate count on any source-to-primary-output path.
 *
 * Sources are nets with no parsed driver (primary inputs, constants, nets fed
 * by opaque instances).  0 for a netlist whose outputs are not gate-driven.
 */
inline unsigned critical_path_depth( const netlist& n )
{
  const std::vector<std::size_t> order = topological_gate_order( n );
  std::unordered_map<std::string_view, std::size_t> driver;
  for ( std::size_t g = 0; g < n.gates.size(); ++g )
  {
    driver.emplace( n.gates[g].output, g );
  }
  std::vector<unsigned> depth( n.gates.size(), 0 );
  for ( const std::size_t g : order )
  {
    unsigned longest_fanin = 0;
    for ( const std::string& in : n.gates[g].inputs )
    {
      const auto it = driver.find( in );
      if ( it != driver.end() )
      {
        longest_fanin = std::max( longest_fanin, depth[it->second] );
      }
    }
    depth[g] = longest_fanin + 1;
  }
  unsigned result = 0;
  for ( const port& p : n.ports )
  {
    if ( p.direction == port_direction::output )
    {
      const auto it = driver.find( p.name );
      if ( it != driver.end() )
      {
        result = std::max( result, depth[it->second] );
      }
    }
  }
  return result;
}

/*! \brief Gate-count and depth comparison between an original and a rewrite.
 *
 * Percentages are empty when the original count is zero (undefined rather
 * than infinite).
 */
struct overhead_report
{
  std::size_t original_gates{ 0 };
  std::size_t pirated_gates{ 0 };
  unsigned original_depth{ 0 };
  unsigned pirated_depth{ 0 };
  std::optional<double> gate_overhead_pct;
  std::optional<double> depth_overhead_pct;

  bool operator==( const overhead_report& ) const = default;
};

inline overhead_report compute_overhead( const netlist& original, const netlist& pirated )
{
  overhead_report report;
  report.original_gates = original.gates.size();
  report.pirated_gates = pirated.gates.size();
  report.original_depth = critical_path_depth( original );
  report.pirated_depth = critical_path_depth( pirated );
  if ( report.original_gates != 0 )
  {
    report.gate_overhead_pct = 100.0 * ( static_cast<double>( report.pirated_gates ) - static_cast<double>( report.original_gates ) ) / static_cast<double>( report.original_gates );
  }
  if ( report.original_depth != 0 )
  {
    report.depth_overhead_pct = 100.0 * ( static_cast<double>( report.pirated_depth ) - static_cast<double>( report.original_depth ) ) / static_cast<double>( report.original_depth );
  }
  return report;
}

} // namespace netmorph
