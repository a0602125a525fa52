/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file llm.hpp
  \brief Chat-style rewrite sessions: prompts, response extraction, backends

  A rewrite session asks a chat backend to re-express a representative circuit
  using a restricted operator set, then feeds check failures back as follow-up
  prompts.  Besides the HTTP backend (see http_backend.hpp) there are two
  local backends: a scripted one replaying canned responses for tests, and an
  oracle one that answers every prompt with a canonical correct rewrite, which
  makes full pipeline runs reproducible without network access.
*/

#pragma once

#include "boolexpr.hpp"
#include "common.hpp"
#include "errors.hpp"
#include "ops.hpp"
#include "translate.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netmorph
{

struct chat_message
{
  std::string role; // "system", "user" or "assistant"
  std::string content;

  bool operator==( const chat_message& ) const = default;
};

/*! \brief Ordered chat history; the first non-system message is from the user. */
using conversation = std::vector<chat_message>;

/*! \brief The three candidate checks, in the order they run. */
enum class check_kind : uint8_t
{
  syntax,
  operators,
  functionality
};

inline constexpr std::string_view to_string( check_kind kind )
{
  switch ( kind )
  {
  case check_kind::syntax: return "syntax";
  case check_kind::operators: return "operators";
  case check_kind::functionality: return "functionality";
  }
  return "?";
}

struct check_failure
{
  check_kind kind{ check_kind::syntax };
  std::string detail;

  bool operator==( const check_failure& ) const = default;
};

/*! \brief Fixed lead-in of the functionality feedback prompt. */
inline constexpr std::string_view functionality_feedback_sentence =
    "This is not correct because the functionality is not the same as the original circuit. "
    "Can you try again? Below is the original circuit:";

namespace detail
{

inline constexpr std::string_view allowed_ops_marker = "only uses the following Boolean operators: ";

} // namespace detail

/*! \brief First prompt of a session: the circuit, the operator restriction,
 * and two parsing-ease instructions (same format, keep the port names).
 */
inline std::string build_initial_prompt( gate_type type, const operator_set& allowed )
{
  const boolean_circuit rep = representative_circuit( type );
  std::string prompt = "Below is a circuit written in a Boolean function format, with one assignment per line:\n\n";
  prompt += emit_boolean_circuit( rep );
  prompt += "\nRewrite the circuit so that it is functionally equivalent to the original circuit but ";
  prompt += detail::allowed_ops_marker;
  prompt += to_string( allowed );
  prompt += ".\n";
  prompt += "Only output the rewritten circuit as assignment lines in the same format, one assignment per line.\n";
  prompt += "Keep the input names " + join( rep.inputs, ", " ) + " and the output name Y.\n";
  return prompt;
}

/*! \brief Follow-up prompt for a failed attempt; always ends with the
 * original circuit.  The functionality variant starts with the fixed
 * sentence above, the other two name the concrete violation.
 */
inline std::string build_feedback_prompt( const check_failure& failure, const std::string& original_circuit_text )
{
  std::string prompt;
  switch ( failure.kind )
  {
  case check_kind::functionality:
    prompt = std::string( functionality_feedback_sentence );
    break;
  case check_kind::syntax:
    prompt = "This is not correct because the response could not be parsed as a circuit in the expected format (" + failure.detail + "). Write one assignment per line, in the form Y = OP(A1, A2). Can you try again? Below is the original circuit:";
    break;
  case check_kind::operators:
    prompt = "This is not correct because the rewritten circuit uses Boolean operators that are not allowed (" + failure.detail + "). Can you try again? Below is the original circuit:";
    break;
  }
  prompt += "\n\n";
  prompt += original_circuit_text;
  return prompt;
}

/*! \brief Keeps only the assignment-shaped lines of a chat response,
 * dropping Markdown fences and prose.  Semantic validation (operator names,
 * arities, references) is the parser's job.
 */
inline std::string extract_circuit_text( std::string_view response )
{
  std::string out;
  for ( std::string_view line : split_lines( response ) )
  {
    const std::string_view t = trim_view( line );
    if ( t.substr( 0, 3 ) == "```" )
    {
      continue;
    }
    if ( detail::looks_like_assignment( t ) )
    {
      out += t;
      out += '\n';
    }
  }
  return out;
}

/*! \brief Chat-completion backend interface. */
class llm_backend
{
public:
  virtual ~llm_backend() = default;

  /*! \brief Returns the assistant reply for the given history.
   * Throws transport_error on session-aborting failures.
   */
  virtual std::string complete( const conversation& history ) = 0;

  virtual std::string id() const = 0;

  /*! \brief True when complete() may be called from several threads. */
  virtual bool concurrent_safe() const { return false; }
};

struct backend_config
{
  std::string kind = "oracle"; // oracle | scripted | http
  std::string endpoint;        // http: base URL up to (not including) /chat/completions
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 60.0;
  unsigned max_retries = 3;     // transport-level retries (http only)
  double retry_backoff_s = 1.0; // doubles after every failed try
  std::string script_path;     // scripted: response file
};

// ---------------------------------------------------------------------------
// canonical transformations (the oracle backend's answer table)
// ---------------------------------------------------------------------------

namespace detail
{

struct circuit_builder
{
  boolean_circuit circuit;
  unsigned next_temp{ 1 };

  std::string temp() { return "N" + std::to_string( next_temp++ ); }

  std::string stmt( std::string target, gate_op op, std::vector<std::string> args )
  {
    circuit.statements.push_back( { target, op, std::move( args ) } );
    return target;
  }
};

inline std::string invert_via( circuit_builder& b, gate_op inverting_op, const std::string& x, std::string target )
{
  return b.stmt( std::move( target ), inverting_op, { x, x } );
}

/*! \brief target = x XOR y using only NAND (4 gates). */
inline std::string xor2_nand( circuit_builder& b, const std::string& x, const std::string& y, std::string target )
{
  const std::string t1 = b.stmt( b.temp(), gate_op::NAND, { x, y } );
  const std::string t2 = b.stmt( b.temp(), gate_op::NAND, { x, t1 } );
  const std::string t3 = b.stmt( b.temp(), gate_op::NAND, { y, t1 } );
  return b.stmt( std::move( target ), gate_op::NAND, { t2, t3 } );
}

/*! \brief target = x XNOR y using only NOR (4 gates). */
inline std::string xnor2_nor( circuit_builder& b, const std::string& x, const std::string& y, std::string target )
{
  const std::string t1 = b.stmt( b.temp(), gate_op::NOR, { x, y } );
  const std::string t2 = b.stmt( b.temp(), gate_op::NOR, { x, t1 } );
  const std::string t3 = b.stmt( b.temp(), gate_op::NOR, { y, t1 } );
  return b.stmt( std::move( target ), gate_op::NOR, { t2, t3 } );
}

/*! \brief target = x XOR y using only NOR (5 gates). */
inline std::string xor2_nor( circuit_builder& b, const std::string& x, const std::string& y, std::string target )
{
  const std::string t4 = xnor2_nor( b, x, y, b.temp() );
  return invert_via( b, gate_op::NOR, t4, std::move( target ) );
}

/*! \brief target = x XNOR y using only NAND (5 gates). */
inline std::string xnor2_nand( circuit_builder& b, const std::string& x, const std::string& y, std::string target )
{
  const std::string t4 = xor2_nand( b, x, y, b.temp() );
  return invert_via( b, gate_op::NAND, t4, std::move( target ) );
}

} // namespace detail

/*! \brief A correct, operator-pure rewrite of the representative circuit of
 * `type` over `allowed`, for every entry of the substitution table and any
 * legal fan-in.  Self-checked before being returned: it parses, stays inside
 * the operator set, and is exhaustively equivalent to the representative.
 */
inline boolean_circuit canonical_transformation( gate_type type, const operator_set& allowed )
{
  const auto sets = allowed_operator_sets( type );
  if ( std::find( sets.begin(), sets.end(), allowed ) == sets.end() )
  {
    throw validation_error( "no canonical transformation for " + to_string( type ) + " over " + to_string( allowed ) );
  }

  detail::circuit_builder b;
  std::vector<std::string> a;
  for ( unsigned i = 1; i <= type.fan_in; ++i )
  {
    a.push_back( template_input_name( i ) );
  }
  const operator_set nand_only{ gate_op::NAND };
  const operator_set nor_only{ gate_op::NOR };
  const operator_set and_not{ gate_op::AND, gate_op::NOT };
  const operator_set or_not{ gate_op::OR, gate_op::NOT };

  const auto invert_all = [&]( gate_op via ) {
    std::vector<std::string> inverted;
    for ( const std::string& x : a )
    {
      inverted.push_back( via == gate_op::NOT ? b.stmt( b.temp(), gate_op::NOT, { x } ) : detail::invert_via( b, via, x, b.temp() ) );
    }
    return inverted;
  };
  const auto parity_fold = [&]( gate_op via, bool complement ) {
    // left fold of two-input XOR blocks; the last block absorbs the complement
    std::string cur = a[0];
    for ( unsigned i = 1; i < type.fan_in; ++i )
    {
      const bool last = i + 1 == type.fan_in;
      const std::string target = last ? "Y" : b.temp();
      if ( last && complement )
      {
        cur = via == gate_op::NAND ? detail::xnor2_nand( b, cur, a[i], target ) : detail::xnor2_nor( b, cur, a[i], target );
      }
      else
      {
        cur = via == gate_op::NAND ? detail::xor2_nand( b, cur, a[i], target ) : detail::xor2_nor( b, cur, a[i], target );
      }
    }
    return cur;
  };

  switch ( type.op )
  {
  case gate_op::AND:
    if ( allowed == nand_only )
    {
      const std::string n1 = b.stmt( b.temp(), gate_op::NAND, a );
      b.stmt( "Y", gate_op::NAND, { n1, n1 } );
    }
    else if ( allowed == nor_only )
    {
      b.stmt( "Y", gate_op::NOR, invert_all( gate_op::NOR ) );
    }
    else
    {
      const std::string t = b.stmt( b.temp(), gate_op::OR, invert_all( gate_op::NOT ) );
      b.stmt( "Y", gate_op::NOT, { t } );
    }
    break;
  case gate_op::OR:
    if ( allowed == nand_only )
    {
      b.stmt( "Y", gate_op::NAND, invert_all( gate_op::NAND ) );
    }
    else if ( allowed == nor_only )
    {
      const std::string n1 = b.stmt( b.temp(), gate_op::NOR, a );
      b.stmt( "Y", gate_op::NOR, { n1, n1 } );
    }
    else
    {
      const std::string t = b.stmt( b.temp(), gate_op::AND, invert_all( gate_op::NOT ) );
      b.stmt( "Y", gate_op::NOT, { t } );
    }
    break;
  case gate_op::NAND:
    if ( allowed == nor_only )
    {
      const std::string t = b.stmt( b.temp(), gate_op::NOR, invert_all( gate_op::NOR ) );
      b.stmt( "Y", gate_op::NOR, { t, t } );
    }
    else if ( allowed == and_not )
    {
      const std::string t = b.stmt( b.temp(), gate_op::AND, a );
      b.stmt( "Y", gate_op::NOT, { t } );
    }
    else
    {
      b.stmt( "Y", gate_op::OR, invert_all( gate_op::NOT ) );
    }
    break;
  case gate_op::NOR:
    if ( allowed == nand_only )
    {
      const std::string t = b.stmt( b.temp(), gate_op::NAND, invert_all( gate_op::NAND ) );
      b.stmt( "Y", gate_op::NAND, { t, t } );
    }
    else if ( allowed == and_not )
    {
      b.stmt( "Y", gate_op::AND, invert_all( gate_op::NOT ) );
    }
    else
    {
      const std::string t = b.stmt( b.temp(), gate_op::OR, a );
      b.stmt( "Y", gate_op::NOT, { t } );
    }
    break;
  case gate_op::XOR:
    parity_fold( allowed == nand_only ? gate_op::NAND : gate_op::NOR, false );
    break;
  case gate_op::XNOR:
    parity_fold( allowed == nand_only ? gate_op::NAND : gate_op::NOR, true );
    break;
  case gate_op::NOT:
    detail::invert_via( b, allowed == nand_only ? gate_op::NAND : gate_op::NOR, a[0], "Y" );
    break;
  case gate_op::BUF:
  {
    const gate_op via = allowed == nand_only ? gate_op::NAND : gate_op::NOR;
    const std::string n1 = detail::invert_via( b, via, a[0], b.temp() );
    detail::invert_via( b, via, n1, "Y" );
    break;
  }
  }

  // normalize through the parser so the result is exactly what a response
  // containing this text would parse to, then re-check all three gates
  const boolean_circuit circuit = parse_boolean_circuit( emit_boolean_circuit( b.circuit ) );
  for ( const gate_op op : operators_used( circuit ) )
  {
    if ( !allowed.contains( op ) )
    {
      throw validation_error( "canonical transformation for " + to_string( type ) + " uses " + std::string( to_string( op ) ) + " outside " + to_string( allowed ) );
    }
  }
  const equivalence_result eq = check_equivalent( circuit, representative_circuit( type ) );
  if ( !eq.equivalent )
  {
    throw validation_error( "canonical transformation for " + to_string( type ) + " over " + to_string( allowed ) + " is wrong: " + eq.reason );
  }
  return circuit;
}

// ---------------------------------------------------------------------------
// backends
// ---------------------------------------------------------------------------

/*! \brief Deterministic backend answering every initial prompt with the
 * canonical transformation for the (gate type, operator set) it encodes.
 * Makes end-to-end runs reproducible and network-free.
 */
class oracle_backend : public llm_backend
{
public:
  std::string complete( const conversation& history ) override
  {
    if ( history.empty() || history.back().role != "user" )
    {
      throw transport_error( "oracle backend: conversation does not end with a user prompt" );
    }
    const std::string& prompt = history.back().content;

    const std::size_t marker = prompt.find( detail::allowed_ops_marker );
    if ( marker == std::string::npos )
    {
      throw transport_error( "oracle backend: prompt does not name an allowed operator set" );
    }
    const std::size_t open = prompt.find( '[', marker );
    const std::size_t close = open == std::string::npos ? std::string::npos : prompt.find( ']', open );
    if ( close == std::string::npos )
    {
      throw transport_error( "oracle backend: malformed operator set in prompt" );
    }
    const operator_set allowed = operator_set_from_string( prompt.substr( open, close - open + 1 ) );

    const std::string circuit_text = extract_circuit_text( prompt );
    if ( circuit_text.empty() )
    {
      throw transport_error( "oracle backend: prompt does not contain a circuit" );
    }
    const boolean_circuit original = parse_boolean_circuit( circuit_text );
    if ( original.statements.size() != 1 )
    {
      throw transport_error( "oracle backend: prompt circuit is not a single-gate representative" );
    }
    const gate_type type{ original.statements[0].op, static_cast<unsigned>( original.statements[0].args.size() ) };
    return emit_boolean_circuit( canonical_transformation( type, allowed ) );
  }

  std::string id() const override { return "oracle"; }
  bool concurrent_safe() const override { return true; }
};

/*! \brief Replays a fixed response sequence; throws once it runs out. */
class scripted_backend : public llm_backend
{
public:
  explicit scripted_backend( std::vector<std::string> responses )
      : responses_( std::move( responses ) )
  {
  }

  /*! \brief Loads responses from a file; responses are separated by lines
   * containing only `---`.
   */
  static scripted_backend from_file( const std::string& path )
  {
    std::ifstream in( path );
    if ( !in )
    {
      throw io_error( "cannot open script file '" + path + "'" );
    }
    std::string text( ( std::istreambuf_iterator<char>( in ) ), std::istreambuf_iterator<char>() );
    std::vector<std::string> responses;
    std::string current;
    for ( std::string_view line : split_lines( text ) )
    {
      if ( trim_view( line ) == "---" )
      {
        responses.push_back( current );
        current.clear();
      }
      else
      {
        current += line;
        current += '\n';
      }
    }
    if ( !trim_view( current ).empty() )
    {
      responses.push_back( current );
    }
    return scripted_backend( std::move( responses ) );
  }

  std::string complete( const conversation& ) override
  {
    if ( next_ >= responses_.size() )
    {
      throw transport_error( "scripted backend: script exhausted after " + std::to_string( responses_.size() ) + " response(s)" );
    }
    return responses_[next_++];
  }

  std::string id() const override { return "scripted"; }

private:
  std::vector<std::string> responses_;
  std::size_t next_{ 0 };
};

// ---------------------------------------------------------------------------
// transcripts
// ---------------------------------------------------------------------------

/*! \brief JSON-lines session log: one record per attempt. */
class transcript_writer
{
public:
  explicit transcript_writer( const std::string& path ) : out_( path, std::ios::trunc )
  {
    if ( !out_ )
    {
      throw io_error( "cannot open transcript file '" + path + "'" );
    }
  }

  void record( unsigned attempt, std::string_view prompt, std::string_view response, std::string_view check, std::string_view failure_detail )
  {
    nlohmann::json entry;
    entry["attempt"] = attempt;
    entry["prompt"] = prompt;
    entry["response"] = response;
    entry["check"] = check;
    entry["failure_detail"] = failure_detail;
    out_ << entry.dump() << '\n';
    out_.flush();
  }

private:
  std::ofstream out_;
};

} // namespace netmorph
