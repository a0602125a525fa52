/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file translate.hpp
  \brief Bridges between gate instances and the Boolean-function format

  Each gate type has a representative circuit (`Y = OP(A1, ..., An)`) that a
  rewrite session works on.  A verified rewrite is spliced back in place of a
  concrete gate instance with `instantiate_transformation`, binding template
  inputs positionally and allocating collision-free names for the internals.
*/

#pragma once

#include "boolexpr.hpp"
#include "common.hpp"
#include "errors.hpp"
#include "netlist.hpp"
#include "ops.hpp"

#include <algorithm>
#include <compare>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace netmorph
{

/*! \brief A non-empty, duplicate-free list of operators a rewrite may use. */
struct operator_set
{
  std::vector<gate_op> ops;

  operator_set() = default;
  operator_set( std::initializer_list<gate_op> list ) : ops( list ) {}

  bool contains( gate_op op ) const
  {
    return std::find( ops.begin(), ops.end(), op ) != ops.end();
  }

  auto operator<=>( const operator_set& ) const = default;
};

/*! \brief Renders "[NAND]" or "[OR, NOT]" in the set's stored order. */
inline std::string to_string( const operator_set& set )
{
  std::string out = "[";
  for ( std::size_t i = 0; i < set.ops.size(); ++i )
  {
    if ( i != 0 )
    {
      out += ", ";
    }
    out += to_string( set.ops[i] );
  }
  out += "]";
  return out;
}

/*! \brief Parses "[NAND, NOT]" / "NAND,NOT" (case-insensitive). */
inline operator_set operator_set_from_string( std::string_view text )
{
  std::string_view body = trim_view( text );
  if ( !body.empty() && body.front() == '[' && body.back() == ']' )
  {
    body = body.substr( 1, body.size() - 2 );
  }
  operator_set set;
  std::size_t begin = 0;
  while ( begin <= body.size() )
  {
    std::size_t comma = body.find( ',', begin );
    if ( comma == std::string_view::npos )
    {
      comma = body.size();
    }
    const std::string_view item = trim_view( body.substr( begin, comma - begin ) );
    if ( !item.empty() )
    {
      const auto op = gate_op_from_string( item );
      if ( !op )
      {
        throw validation_error( "unknown operator '" + std::string( item ) + "' in operator set" );
      }
      if ( !set.contains( *op ) )
      {
        set.ops.push_back( *op );
      }
    }
    begin = comma + 1;
    if ( comma == body.size() )
    {
      break;
    }
  }
  if ( set.ops.empty() )
  {
    throw validation_error( "empty operator set" );
  }
  return set;
}

/*! \brief Template input name for position i (1-based): A1, A2, ... */
inline std::string template_input_name( unsigned i )
{
  return "A" + std::to_string( i );
}

/*! \brief The single-statement circuit `Y = OP(A1, ..., An)` for a gate type. */
inline boolean_circuit representative_circuit( gate_type type )
{
  if ( !arity_ok( type.op, type.fan_in ) )
  {
    throw validation_error( "no representative circuit for " + to_string( type ) + ": invalid fan-in" );
  }
  boolean_circuit circuit;
  assignment stmt;
  stmt.target = "Y";
  stmt.op = type.op;
  for ( unsigned i = 1; i <= type.fan_in; ++i )
  {
    stmt.args.push_back( template_input_name( i ) );
    circuit.inputs.push_back( template_input_name( i ) );
  }
  circuit.statements.push_back( std::move( stmt ) );
  circuit.output = "Y";
  return circuit;
}

/*! \brief Operator sets a rewrite of the given gate type may draw from.
 *
 * The six multi-input operators follow the substitution table (each set
 * excludes the operator itself); NOT and BUF are handled with the two
 * universal single-operator sets, BUF as a double inversion.
 */
inline std::vector<operator_set> allowed_operator_sets( gate_type type )
{
  if ( !arity_ok( type.op, type.fan_in ) )
  {
    throw validation_error( "no operator sets for " + to_string( type ) + ": invalid fan-in" );
  }
  switch ( type.op )
  {
  case gate_op::AND:
    return { { gate_op::NAND }, { gate_op::NOR }, { gate_op::OR, gate_op::NOT } };
  case gate_op::OR:
    return { { gate_op::NAND }, { gate_op::NOR }, { gate_op::AND, gate_op::NOT } };
  case gate_op::NAND:
    return { { gate_op::NOR }, { gate_op::AND, gate_op::NOT }, { gate_op::OR, gate_op::NOT } };
  case gate_op::NOR:
    return { { gate_op::NAND }, { gate_op::AND, gate_op::NOT }, { gate_op::OR, gate_op::NOT } };
  case gate_op::XOR:
    return { { gate_op::NAND }, { gate_op::NOR } };
  case gate_op::XNOR:
    return { { gate_op::NAND }, { gate_op::NOR } };
  case gate_op::NOT:
    return { { gate_op::NAND }, { gate_op::NOR } };
  case gate_op::BUF:
    return { { gate_op::NAND }, { gate_op::NOR } };
  }
  return {};
}

/*! \brief Issues fresh wire/instance names that cannot collide with a netlist.
 *
 * Wires are `llmp_w<k>` and instances `llmp_g<k>` with `k` drawn from one
 * shared counter, so a rewritten netlist is reproducible name-for-name.
 */
class name_allocator
{
public:
  explicit name_allocator( const netlist& n )
  {
    for ( const port& p : n.ports )
    {
      used_.insert( p.name );
    }
    used_.insert( n.wires.begin(), n.wires.end() );
    for ( const gate_instance& g : n.gates )
    {
      used_.insert( g.name );
      used_.insert( g.output );
      used_.insert( g.inputs.begin(), g.inputs.end() );
    }
    // identifiers inside opaque statements are reserved too
    for ( const std::string& item : n.opaque_items )
    {
      for ( std::string& id : detail::scan_identifiers( item ) )
      {
        used_.insert( std::move( id ) );
      }
    }
  }

  std::string fresh_wire() { return fresh( "llmp_w" ); }
  std::string fresh_instance() { return fresh( "llmp_g" ); }

private:
  std::string fresh( const char* prefix )
  {
    while ( true )
    {
      std::string candidate = prefix + std::to_string( counter_++ );
      if ( used_.insert( candidate ).second )
      {
        return candidate;
      }
    }
  }

  std::unordered_set<std::string> used_;
  uint64_t counter_{ 0 };
};

/*! \brief Splices a verified rewrite in place of one gate instance.
 *
 * Template inputs bind positionally (A1 to the gate's first input), the
 * circuit's output binds to the gate's output net, and every other assigned
 * variable becomes a fresh wire (appended to `new_wires`).  Each statement
 * becomes one gate with a fresh instance name; statement order is preserved.
 */
inline std::vector<gate_instance> instantiate_transformation( const boolean_circuit& circuit, const gate_instance& gate, name_allocator& alloc, std::vector<std::string>& new_wires )
{
  std::vector<std::string> expected;
  for ( unsigned i = 1; i <= gate.inputs.size(); ++i )
  {
    expected.push_back( template_input_name( i ) );
  }
  std::vector<std::string> sorted_inputs = circuit.inputs;
  std::vector<std::string> sorted_expected = expected;
  std::sort( sorted_inputs.begin(), sorted_inputs.end() );
  std::sort( sorted_expected.begin(), sorted_expected.end() );
  if ( sorted_inputs != sorted_expected )
  {
    throw validation_error( "transformation inputs {" + join( circuit.inputs, ", " ) + "} do not match gate '" + gate.name + "' with " + std::to_string( gate.inputs.size() ) + " input(s)" );
  }

  std::unordered_map<std::string, std::string> bind;
  for ( std::size_t i = 0; i < expected.size(); ++i )
  {
    bind[expected[i]] = gate.inputs[i];
  }
  bind[circuit.output] = gate.output;

  std::vector<gate_instance> gates;
  gates.reserve( circuit.statements.size() );
  for ( const assignment& stmt : circuit.statements )
  {
    gate_instance out;
    out.op = stmt.op;
    out.name = alloc.fresh_instance();
    auto target_it = bind.find( stmt.target );
    if ( target_it == bind.end() )
    {
      const std::string wire = alloc.fresh_wire();
      new_wires.push_back( wire );
      target_it = bind.emplace( stmt.target, wire ).first;
    }
    out.output = target_it->second;
    for ( const std::string& arg : stmt.args )
    {
      out.inputs.push_back( bind.at( arg ) );
    }
    gates.push_back( std::move( out ) );
  }
  return gates;
}

} // namespace netmorph
