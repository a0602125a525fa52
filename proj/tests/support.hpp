/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file support.hpp
  \brief Shared test helpers and independent reference implementations

  The reference evaluators here are deliberately written differently from
  the library (scalar recursion and fixpoint sweeps instead of packed words
  and topological compilation) so that tests compare two independent
  implementations of the same semantics.
*/

#pragma once

#include <netmorph/netmorph.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmtest
{

inline std::string repo_dir()
{
  return NETMORPH_REPO_DIR;
}

inline std::string cli_path()
{
  return NETMORPH_CLI_PATH;
}

inline std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
  {
    throw std::runtime_error( "test support: cannot open '" + path + "'" );
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file( const std::string& path, const std::string& content )
{
  std::ofstream out( path, std::ios::binary | std::ios::trunc );
  if ( !out )
  {
    throw std::runtime_error( "test support: cannot write '" + path + "'" );
  }
  out << content;
}

inline std::string make_temp_dir()
{
  std::string pattern = "/tmp/netmorph_test_XXXXXX";
  if ( mkdtemp( pattern.data() ) == nullptr )
  {
    throw std::runtime_error( "test support: mkdtemp failed" );
  }
  return pattern;
}

struct command_result
{
  int exit_code{ -1 };
  std::string output; // stdout and stderr interleaved
};

inline command_result run_command( const std::string& command )
{
  command_result result;
  FILE* pipe = popen( ( command + " 2>&1" ).c_str(), "r" );
  if ( pipe == nullptr )
  {
    throw std::runtime_error( "test support: popen failed for: " + command );
  }
  char buffer[4096];
  std::size_t got = 0;
  while ( ( got = fread( buffer, 1, sizeof( buffer ), pipe ) ) > 0 )
  {
    result.output.append( buffer, got );
  }
  const int status = pclose( pipe );
  result.exit_code = ( status >= 0 && WIFEXITED( status ) ) ? WEXITSTATUS( status ) : -1;
  return result;
}

// ---------------------------------------------------------------------------
// reference semantics (independent of the library implementation)
// ---------------------------------------------------------------------------

inline bool ref_gate_eval( netmorph::gate_op op, const std::vector<bool>& args )
{
  std::size_t ones = 0;
  for ( const bool a : args )
  {
    ones += a ? 1 : 0;
  }
  switch ( op )
  {
  case netmorph::gate_op::AND: return ones == args.size();
  case netmorph::gate_op::OR: return ones > 0;
  case netmorph::gate_op::NAND: return ones != args.size();
  case netmorph::gate_op::NOR: return ones == 0;
  case netmorph::gate_op::XOR: return ones % 2 == 1;
  case netmorph::gate_op::XNOR: return ones % 2 == 0;
  case netmorph::gate_op::NOT: return !args.at( 0 );
  case netmorph::gate_op::BUF: return args.at( 0 );
  }
  throw std::runtime_error( "test support: unknown op" );
}

inline bool ref_eval_circuit( const netmorph::boolean_circuit& circuit, const std::map<std::string, bool>& input_values )
{
  std::map<std::string, bool> values = input_values;
  for ( const netmorph::assignment& stmt : circuit.statements )
  {
    std::vector<bool> args;
    for ( const std::string& arg : stmt.args )
    {
      args.push_back( values.at( arg ) );
    }
    values[stmt.target] = ref_gate_eval( stmt.op, args );
  }
  return values.at( circuit.output );
}

/*! \brief Truth string over the circuit's own input order, vector 0 first;
 * bit j of the vector index drives input j.
 */
inline std::string ref_truth_string( const netmorph::boolean_circuit& circuit )
{
  const std::size_t n = circuit.inputs.size();
  std::string out;
  for ( uint64_t index = 0; index < ( uint64_t( 1 ) << n ); ++index )
  {
    std::map<std::string, bool> values;
    for ( std::size_t j = 0; j < n; ++j )
    {
      values[circuit.inputs[j]] = ( ( index >> j ) & 1ull ) != 0;
    }
    out += ref_eval_circuit( circuit, values ) ? '1' : '0';
  }
  return out;
}

/*! \brief Evaluates every gate-driven net of a netlist by sweeping the gate
 * list to a fixpoint (no topological sort involved).  `free_values` must
 * assign every net that no gate drives and that some gate reads or output
 * port exposes.
 */
inline std::map<std::string, bool> ref_netlist_eval( const netmorph::netlist& nl, const std::map<std::string, bool>& free_values )
{
  std::map<std::string, bool> values = free_values;
  values[std::string( netmorph::const_zero )] = false;
  values[std::string( netmorph::const_one )] = true;
  for ( std::size_t sweep = 0; sweep <= nl.gates.size(); ++sweep )
  {
    bool changed = false;
    for ( const netmorph::gate_instance& gate : nl.gates )
    {
      bool ready = true;
      std::vector<bool> args;
      for ( const std::string& in : gate.inputs )
      {
        const auto it = values.find( in );
        if ( it == values.end() )
        {
          ready = false;
          break;
        }
        args.push_back( it->second );
      }
      if ( !ready )
      {
        continue;
      }
      const bool result = ref_gate_eval( gate.op, args );
      const auto it = values.find( gate.output );
      if ( it == values.end() || it->second != result )
      {
        values[gate.output] = result;
        changed = true;
      }
    }
    if ( !changed )
    {
      break;
    }
  }
  return values;
}

} // namespace nmtest
