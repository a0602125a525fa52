/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file pipeline.hpp
  \brief End-to-end flow: sessions, dictionary, rewriting, verification, campaigns

  The flow mirrors how the tool is used:

  1. `generate_transformation` runs one feedback-guided chat session that
     produces a verified rewrite of one gate type over one operator set.
  2. `build_dictionary` runs sessions for every gate type a design uses and
     collects the results into a `transformation_dictionary` (persistable as
     JSON, re-verified on load).
  3. `pirate_netlist` rewrites a netlist gate by gate, picking dictionary
     entries according to a `mapping_strategy`.
  4. `verify_equivalence` checks original and rewrite behave identically,
     exhaustively up to a cap and by word-parallel sampling beyond it.
  5. `run_campaign` does all of the above for several strategies and seeds
     and scores every variant against the detector suite; its report is
     byte-identical across runs and thread counts.
*/

#pragma once

#include "boolexpr.hpp"
#include "common.hpp"
#include "detectors.hpp"
#include "errors.hpp"
#include "llm.hpp"
#include "netlist.hpp"
#include "ops.hpp"
#include "translate.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace netmorph
{

// ---------------------------------------------------------------------------
// rewrite sessions
// ---------------------------------------------------------------------------

enum class session_status : uint8_t
{
  success,  // a rewrite passed all three checks
  exhausted,// every attempt failed a check
  aborted   // the backend failed (transport problem), distinct from checks
};

inline constexpr std::string_view to_string( session_status status )
{
  switch ( status )
  {
  case session_status::success: return "success";
  case session_status::exhausted: return "exhausted";
  case session_status::aborted: return "aborted";
  }
  return "?";
}

struct session_config
{
  unsigned max_attempts = 5;
};

struct session_outcome
{
  session_status status{ session_status::aborted };
  std::optional<boolean_circuit> circuit; // set on success
  unsigned attempts_used{ 0 };            // completed attempts
  std::vector<check_failure> failure_history;
  std::string error; // set when aborted
};

namespace detail
{

/*! \brief Runs the three candidate checks in order; empty optional means pass. */
inline std::optional<check_failure> check_candidate( const std::string& response, const operator_set& allowed, const boolean_circuit& reference, boolean_circuit& out_circuit )
{
  boolean_circuit candidate;
  try
  {
    candidate = parse_boolean_circuit( extract_circuit_text( response ) );
  }
  catch ( const parse_error& e )
  {
    return check_failure{ check_kind::syntax, e.what() };
  }

  std::vector<std::string> offenders;
  for ( const gate_op op : operators_used( candidate ) )
  {
    if ( !allowed.contains( op ) )
    {
      offenders.emplace_back( to_string( op ) );
    }
  }
  if ( !offenders.empty() )
  {
    return check_failure{ check_kind::operators, "uses " + join( offenders, ", " ) + "; allowed operators are " + to_string( allowed ) };
  }

  const equivalence_result eq = check_equivalent( candidate, reference );
  if ( !eq.equivalent )
  {
    return check_failure{ check_kind::functionality, eq.reason };
  }
  out_circuit = std::move( candidate );
  return std::nullopt;
}

} // namespace detail

/*! \brief One feedback-guided session: ask for a rewrite of the
 * representative circuit of `type` over `allowed`, re-prompting with
 * check-specific feedback until a candidate passes or attempts run out.
 * On success `attempts_used == 1 + failure_history.size()`.
 */
inline session_outcome generate_transformation( llm_backend& backend, gate_type type, const operator_set& allowed, const session_config& config = {}, transcript_writer* transcript = nullptr )
{
  if ( config.max_attempts == 0 )
  {
    throw config_error( "a session needs at least one attempt" );
  }
  const boolean_circuit reference = representative_circuit( type );
  const std::string original_text = emit_boolean_circuit( reference );

  session_outcome outcome;
  conversation history;
  history.push_back( { "user", build_initial_prompt( type, allowed ) } );

  for ( unsigned attempt = 1; attempt <= config.max_attempts; ++attempt )
  {
    std::string response;
    try
    {
      response = backend.complete( history );
    }
    catch ( const transport_error& e )
    {
      outcome.status = session_status::aborted;
      outcome.attempts_used = attempt - 1;
      outcome.error = e.what();
      if ( transcript != nullptr )
      {
        transcript->record( attempt, history.back().content, "", "aborted", outcome.error );
      }
      return outcome;
    }
    history.push_back( { "assistant", response } );

    boolean_circuit accepted;
    const std::optional<check_failure> failure = detail::check_candidate( response, allowed, reference, accepted );
    if ( transcript != nullptr )
    {
      transcript->record( attempt, history[history.size() - 2].content, response,
                          failure ? std::string( to_string( failure->kind ) ) : std::string( "pass" ),
                          failure ? failure->detail : std::string() );
    }
    if ( !failure )
    {
      outcome.status = session_status::success;
      outcome.circuit = std::move( accepted );
      outcome.attempts_used = attempt;
      return outcome;
    }
    outcome.failure_history.push_back( *failure );
    if ( attempt < config.max_attempts )
    {
      history.push_back( { "user", build_feedback_prompt( *failure, original_text ) } );
    }
  }
  outcome.status = session_status::exhausted;
  outcome.attempts_used = config.max_attempts;
  return outcome;
}

// ---------------------------------------------------------------------------
// transformation dictionary
// ---------------------------------------------------------------------------

struct transformation_provenance
{
  std::string backend;
  unsigned attempts{ 1 };
  std::string timestamp; // ISO-8601 UTC; informational only

  bool operator==( const transformation_provenance& ) const = default;
};

struct transformation_entry
{
  gate_type type{ gate_op::AND, 2 };
  operator_set allowed;
  boolean_circuit circuit;
  transformation_provenance provenance;
};

namespace detail
{

inline std::string utc_timestamp()
{
  const std::time_t now = std::time( nullptr );
  std::tm tm_utc{};
  gmtime_r( &now, &tm_utc );
  char buffer[32];
  std::strftime( buffer, sizeof( buffer ), "%Y-%m-%dT%H:%M:%SZ", &tm_utc );
  return buffer;
}

/*! \brief Checks a dictionary entry's circuit against its own claim. */
inline void verify_entry( const transformation_entry& entry )
{
  for ( const gate_op op : operators_used( entry.circuit ) )
  {
    if ( !entry.allowed.contains( op ) )
    {
      throw validation_error( "dictionary entry for " + to_string( entry.type ) + " over " + to_string( entry.allowed ) + " uses disallowed operator " + std::string( to_string( op ) ) );
    }
  }
  const equivalence_result eq = check_equivalent( entry.circuit, representative_circuit( entry.type ) );
  if ( !eq.equivalent )
  {
    throw validation_error( "dictionary entry for " + to_string( entry.type ) + " over " + to_string( entry.allowed ) + " is not equivalent: " + eq.reason );
  }
}

} // namespace detail

/*! \brief Verified rewrites indexed by (gate type, operator set).
 *
 * Insertion re-verifies every entry, so a dictionary object can only hold
 * correct rewrites no matter where they came from.  Entries are kept in a
 * canonical order, which makes saved files reproducible.
 */
class transformation_dictionary
{
public:
  void insert( transformation_entry entry )
  {
    detail::verify_entry( entry );
    const auto pos = std::lower_bound( entries_.begin(), entries_.end(), entry, entry_less );
    if ( pos != entries_.end() && same_key( *pos, entry ) )
    {
      *pos = std::move( entry );
    }
    else
    {
      entries_.insert( pos, std::move( entry ) );
    }
  }

  const transformation_entry* find( gate_type type, const operator_set& allowed ) const
  {
    transformation_entry probe;
    probe.type = type;
    probe.allowed = allowed;
    const auto pos = std::lower_bound( entries_.begin(), entries_.end(), probe, entry_less );
    if ( pos != entries_.end() && same_key( *pos, probe ) )
    {
      return &*pos;
    }
    return nullptr;
  }

  /*! \brief All entries for one gate type, in canonical operator-set order. */
  std::vector<const transformation_entry*> entries_for( gate_type type ) const
  {
    std::vector<const transformation_entry*> found;
    for ( const operator_set& set : allowed_operator_sets( type ) )
    {
      if ( const transformation_entry* entry = find( type, set ) )
      {
        found.push_back( entry );
      }
    }
    return found;
  }

  const std::vector<transformation_entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  nlohmann::json to_json() const
  {
    nlohmann::json entries = nlohmann::json::array();
    for ( const transformation_entry& entry : entries_ )
    {
      nlohmann::json e;
      e["operator"] = std::string( to_string( entry.type.op ) );
      e["fan_in"] = entry.type.fan_in;
      e["operator_set"] = to_string( entry.allowed );
      e["circuit_text"] = emit_boolean_circuit( entry.circuit );
      e["provenance"] = { { "backend", entry.provenance.backend }, { "attempts", entry.provenance.attempts }, { "timestamp", entry.provenance.timestamp } };
      entries.push_back( std::move( e ) );
    }
    return nlohmann::json{ { "version", 1 }, { "entries", std::move( entries ) } };
  }

  /*! \brief Rebuilds a dictionary from JSON, re-verifying every entry. */
  static transformation_dictionary from_json( const nlohmann::json& j )
  {
    if ( !j.is_object() || !j.contains( "version" ) || j["version"] != 1 )
    {
      throw validation_error( "dictionary JSON must be an object with version 1" );
    }
    if ( !j.contains( "entries" ) || !j["entries"].is_array() )
    {
      throw validation_error( "dictionary JSON has no entries array" );
    }
    transformation_dictionary dict;
    for ( const nlohmann::json& e : j["entries"] )
    {
      for ( const char* field : { "operator", "fan_in", "operator_set", "circuit_text" } )
      {
        if ( !e.contains( field ) )
        {
          throw validation_error( std::string( "dictionary entry lacks field '" ) + field + "'" );
        }
      }
      transformation_entry entry;
      const auto op = gate_op_from_string( e["operator"].get<std::string>() );
      if ( !op )
      {
        throw validation_error( "dictionary entry names unknown operator '" + e["operator"].get<std::string>() + "'" );
      }
      entry.type = gate_type{ *op, e["fan_in"].get<unsigned>() };
      entry.allowed = operator_set_from_string( e["operator_set"].get<std::string>() );
      entry.circuit = parse_boolean_circuit( e["circuit_text"].get<std::string>() );
      if ( e.contains( "provenance" ) && e["provenance"].is_object() )
      {
        const nlohmann::json& p = e["provenance"];
        entry.provenance.backend = p.value( "backend", std::string() );
        entry.provenance.attempts = p.value( "attempts", 1u );
        entry.provenance.timestamp = p.value( "timestamp", std::string() );
      }
      dict.insert( std::move( entry ) ); // insert re-verifies
    }
    return dict;
  }

  void save( const std::string& path ) const
  {
    std::ofstream out( path, std::ios::trunc );
    if ( !out )
    {
      throw io_error( "cannot write dictionary file '" + path + "'" );
    }
    out << to_json().dump( 2 ) << '\n';
  }

  static transformation_dictionary load( const std::string& path )
  {
    std::ifstream in( path );
    if ( !in )
    {
      throw io_error( "cannot open dictionary file '" + path + "'" );
    }
    nlohmann::json j = nlohmann::json::parse( in, nullptr, false );
    if ( j.is_discarded() )
    {
      throw validation_error( "dictionary file '" + path + "' is not valid JSON" );
    }
    return from_json( j );
  }

private:
  static std::tuple<uint8_t, unsigned, const std::vector<gate_op>&> key( const transformation_entry& e )
  {
    return { static_cast<uint8_t>( e.type.op ), e.type.fan_in, e.allowed.ops };
  }
  static bool entry_less( const transformation_entry& a, const transformation_entry& b )
  {
    return key( a ) < key( b );
  }
  static bool same_key( const transformation_entry& a, const transformation_entry& b )
  {
    return key( a ) == key( b );
  }

  std::vector<transformation_entry> entries_;
};

// ---------------------------------------------------------------------------
// dictionary building
// ---------------------------------------------------------------------------

struct dictionary_build_options
{
  unsigned max_attempts = 5;
  unsigned threads = 1;        // honored only if the backend is concurrent-safe
  std::string transcript_dir;  // empty: no transcripts
};

struct session_record
{
  gate_type type{ gate_op::AND, 2 };
  operator_set allowed;
  session_status status{ session_status::aborted };
  unsigned attempts_used{ 0 };
  std::vector<check_failure> failure_history;
  std::string error;
};

struct dictionary_build_result
{
  transformation_dictionary dictionary;
  std::vector<session_record> sessions;

  bool complete() const
  {
    return std::all_of( sessions.begin(), sessions.end(), []( const session_record& s ) { return s.status == session_status::success; } );
  }
};

namespace detail
{

inline std::string session_slug( gate_type type, const operator_set& allowed )
{
  std::string slug = to_lower_copy( std::string( to_string( type.op ) ) ) + std::to_string( type.fan_in );
  slug += "__";
  for ( std::size_t i = 0; i < allowed.ops.size(); ++i )
  {
    if ( i != 0 )
    {
      slug += "_";
    }
    slug += to_lower_copy( std::string( to_string( allowed.ops[i] ) ) );
  }
  return slug;
}

} // namespace detail

/*! \brief Runs one session per (gate type, allowed operator set) pair and
 * collects the verified rewrites.  Sessions run in parallel only when the
 * backend says it is safe; results are assembled in job order either way,
 * so the outcome does not depend on the thread count.
 */
inline dictionary_build_result build_dictionary( llm_backend& backend, const std::set<gate_type>& types, const dictionary_build_options& options = {} )
{
  struct job
  {
    gate_type type;
    operator_set allowed;
  };
  std::vector<job> jobs;
  for ( const gate_type type : types )
  {
    for ( const operator_set& allowed : allowed_operator_sets( type ) )
    {
      jobs.push_back( { type, allowed } );
    }
  }

  std::vector<session_outcome> outcomes( jobs.size() );
  std::vector<std::exception_ptr> errors( jobs.size() );
  const auto run_job = [&]( std::size_t index ) {
    try
    {
      std::optional<transcript_writer> transcript;
      if ( !options.transcript_dir.empty() )
      {
        transcript.emplace( options.transcript_dir + "/session_" + detail::session_slug( jobs[index].type, jobs[index].allowed ) + ".jsonl" );
      }
      outcomes[index] = generate_transformation( backend, jobs[index].type, jobs[index].allowed, { options.max_attempts }, transcript ? &*transcript : nullptr );
    }
    catch ( ... )
    {
      errors[index] = std::current_exception();
    }
  };

  const unsigned thread_count = backend.concurrent_safe() ? std::max( 1u, options.threads ) : 1u;
  if ( thread_count <= 1 || jobs.size() <= 1 )
  {
    for ( std::size_t i = 0; i < jobs.size(); ++i )
    {
      run_job( i );
    }
  }
  else
  {
    std::atomic<std::size_t> next{ 0 };
    std::vector<std::thread> workers;
    for ( unsigned t = 0; t < std::min<std::size_t>( thread_count, jobs.size() ); ++t )
    {
      workers.emplace_back( [&]() {
        for ( std::size_t i = next.fetch_add( 1 ); i < jobs.size(); i = next.fetch_add( 1 ) )
        {
          run_job( i );
        }
      } );
    }
    for ( std::thread& worker : workers )
    {
      worker.join();
    }
  }
  for ( const std::exception_ptr& error : errors )
  {
    if ( error )
    {
      std::rethrow_exception( error );
    }
  }

  dictionary_build_result result;
  for ( std::size_t i = 0; i < jobs.size(); ++i )
  {
    const session_outcome& outcome = outcomes[i];
    session_record record;
    record.type = jobs[i].type;
    record.allowed = jobs[i].allowed;
    record.status = outcome.status;
    record.attempts_used = outcome.attempts_used;
    record.failure_history = outcome.failure_history;
    record.error = outcome.error;
    result.sessions.push_back( std::move( record ) );
    if ( outcome.status == session_status::success )
    {
      transformation_entry entry;
      entry.type = jobs[i].type;
      entry.allowed = jobs[i].allowed;
      entry.circuit = *outcome.circuit;
      entry.provenance = { backend.id(), outcome.attempts_used, detail::utc_timestamp() };
      result.dictionary.insert( std::move( entry ) );
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// mapping strategies and netlist rewriting
// ---------------------------------------------------------------------------

/*! \brief Which operator set to prefer when rewriting each gate. */
enum class mapping_strategy : uint8_t
{
  and_not, // prefer [AND, NOT]
  nand,    // prefer [NAND]
  nor,     // prefer [NOR]
  or_not,  // prefer [OR, NOT]
  random   // draw uniformly per gate instance
};

inline constexpr std::array<mapping_strategy, 5> all_mapping_strategies = {
    mapping_strategy::and_not, mapping_strategy::nand, mapping_strategy::nor,
    mapping_strategy::or_not, mapping_strategy::random };

inline constexpr std::string_view to_string( mapping_strategy strategy )
{
  switch ( strategy )
  {
  case mapping_strategy::and_not: return "and_not";
  case mapping_strategy::nand: return "nand";
  case mapping_strategy::nor: return "nor";
  case mapping_strategy::or_not: return "or_not";
  case mapping_strategy::random: return "random";
  }
  return "?";
}

inline std::optional<mapping_strategy> mapping_strategy_from_string( std::string_view text )
{
  const std::string lower = to_lower_copy( std::string( trim_view( text ) ) );
  for ( const mapping_strategy strategy : all_mapping_strategies )
  {
    if ( lower == to_string( strategy ) )
    {
      return strategy;
    }
  }
  return std::nullopt;
}

/*! \brief The operator set a deterministic strategy reaches for first. */
inline std::optional<operator_set> preferred_operator_set( mapping_strategy strategy )
{
  switch ( strategy )
  {
  case mapping_strategy::and_not: return operator_set{ gate_op::AND, gate_op::NOT };
  case mapping_strategy::nand: return operator_set{ gate_op::NAND };
  case mapping_strategy::nor: return operator_set{ gate_op::NOR };
  case mapping_strategy::or_not: return operator_set{ gate_op::OR, gate_op::NOT };
  case mapping_strategy::random: return std::nullopt;
  }
  return std::nullopt;
}

/*! \brief Picks the dictionary entry for one gate instance: the strategy's
 * preferred operator set when available, otherwise a uniform draw over the
 * available sets (which is all `random` ever does).
 */
inline const transformation_entry& select_transformation( const transformation_dictionary& dictionary, gate_type type, mapping_strategy strategy, std::mt19937_64& rng )
{
  const std::vector<const transformation_entry*> available = dictionary.entries_for( type );
  if ( available.empty() )
  {
    throw validation_error( "dictionary has no transformation for " + to_string( type ) );
  }
  if ( const std::optional<operator_set> preferred = preferred_operator_set( strategy ) )
  {
    for ( const transformation_entry* entry : available )
    {
      if ( entry->allowed == *preferred )
      {
        return *entry;
      }
    }
  }
  return *available[uniform_index( rng, available.size() )];
}

/*! \brief Rewrites every gate of `original` through the dictionary.
 *
 * Ports, wires, pass-through statements and the module name survive
 * unchanged; each gate is replaced by its selected rewrite with fresh
 * internal names.  The result is round-tripped through the parser, so a
 * returned netlist is always well-formed.
 */
inline netlist pirate_netlist( const netlist& original, const transformation_dictionary& dictionary, mapping_strategy strategy, std::mt19937_64& rng )
{
  netlist result;
  result.name = original.name;
  result.ports = original.ports;
  result.wires = original.wires;
  result.opaque_items = original.opaque_items;

  name_allocator alloc( original );
  for ( const gate_instance& gate : original.gates )
  {
    const transformation_entry& entry = select_transformation( dictionary, gate.type(), strategy, rng );
    std::vector<std::string> new_wires;
    std::vector<gate_instance> replacement = instantiate_transformation( entry.circuit, gate, alloc, new_wires );
    result.wires.insert( result.wires.end(), new_wires.begin(), new_wires.end() );
    result.gates.insert( result.gates.end(), replacement.begin(), replacement.end() );
  }
  return parse_netlist( emit_netlist( result ) );
}

inline netlist pirate_netlist( const netlist& original, const transformation_dictionary& dictionary, mapping_strategy strategy, uint64_t seed )
{
  std::mt19937_64 rng( seed );
  return pirate_netlist( original, dictionary, strategy, rng );
}

// ---------------------------------------------------------------------------
// equivalence verification
// ---------------------------------------------------------------------------

struct verify_config
{
  unsigned input_cap = 20;      // exhaustive up to 2^input_cap vectors
  uint64_t sample_count = 10000; // sampled vectors beyond the cap
  uint64_t seed = 0x6e65746d6f727068ull; // sampling seed
};

struct verify_report
{
  bool equivalent{ false };
  std::string reason;
  bool exhaustive{ false };
  uint64_t vectors_checked{ 0 };
};

namespace detail
{

/*! \brief A netlist lowered to an indexed, topologically ordered form that
 * evaluates 64 input vectors per call.
 *
 * Simulation inputs are the input ports (in port order) followed by the
 * sorted *pseudo-inputs*: declared nets that no parsed gate drives but that
 * gates read or output ports expose — the free nets introduced by
 * pass-through statements.  Simulation outputs are the output ports (in
 * port order) followed by the sorted *pseudo-outputs*: gate-driven nets a
 * pass-through statement consumes.  Treating those frees and taps the
 * boundary nets of pass-through cells the same way on both sides of a
 * comparison makes per-cycle equivalence checkable without knowing what the
 * cells do.
 */
class compiled_netlist
{
public:
  explicit compiled_netlist( const netlist& nl )
  {
    const auto net_id = [&]( const std::string& name ) -> int {
      if ( name == const_zero )
      {
        return 0;
      }
      if ( name == const_one )
      {
        return 1;
      }
      const auto [it, inserted] = ids_.emplace( name, next_id_ );
      if ( inserted )
      {
        ++next_id_;
      }
      return it->second;
    };

    std::set<std::string> declared, gate_driven, gate_read, opaque_nets;
    for ( const port& p : nl.ports )
    {
      declared.insert( p.name );
      net_id( p.name );
    }
    for ( const std::string& w : nl.wires )
    {
      declared.insert( w );
      net_id( w );
    }
    for ( const gate_instance& g : nl.gates )
    {
      gate_driven.insert( g.output );
      gate_read.insert( g.inputs.begin(), g.inputs.end() );
    }
    for ( const std::string& item : nl.opaque_items )
    {
      for ( const std::string& id : scan_identifiers( item ) )
      {
        if ( declared.count( id ) != 0 )
        {
          opaque_nets.insert( id );
        }
      }
    }

    std::set<std::string> pseudo_inputs, pseudo_outputs;
    for ( const std::string& net : declared )
    {
      if ( gate_driven.count( net ) != 0 )
      {
        continue;
      }
      if ( gate_read.count( net ) != 0 )
      {
        pseudo_inputs.insert( net );
      }
    }
    for ( const port& p : nl.ports )
    {
      if ( p.direction == port_direction::input )
      {
        inputs_.emplace_back( p.name, net_id( p.name ) );
        pseudo_inputs.erase( p.name );
      }
      else if ( gate_driven.count( p.name ) == 0 )
      {
        pseudo_inputs.insert( p.name ); // undriven output port: free net
      }
    }
    for ( const std::string& net : pseudo_inputs )
    {
      inputs_.emplace_back( net, net_id( net ) );
    }
    for ( const port& p : nl.ports )
    {
      if ( p.direction == port_direction::output )
      {
        outputs_.emplace_back( p.name, net_id( p.name ) );
        pseudo_outputs.erase( p.name );
      }
    }
    for ( const std::string& net : opaque_nets )
    {
      if ( gate_driven.count( net ) != 0 && !is_output_port( nl, net ) )
      {
        pseudo_outputs.insert( net );
      }
    }
    for ( const std::string& net : pseudo_outputs )
    {
      outputs_.emplace_back( net, net_id( net ) );
    }

    for ( const std::size_t index : topological_gate_order( nl ) )
    {
      const gate_instance& g = nl.gates[index];
      compiled_gate cg;
      cg.op = g.op;
      cg.out = net_id( g.output );
      for ( const std::string& in : g.inputs )
      {
        cg.ins.push_back( net_id( in ) );
      }
      gates_.push_back( std::move( cg ) );
    }
  }

  /*! \brief Simulation input names, in binding order. */
  std::vector<std::string> input_names() const { return names_of( inputs_ ); }
  /*! \brief Simulation output names, in binding order. */
  std::vector<std::string> output_names() const { return names_of( outputs_ ); }

  /*! \brief Evaluates 64 vectors at once: one word per input, one per output. */
  std::vector<uint64_t> eval( std::span<const uint64_t> input_words ) const
  {
    if ( input_words.size() != inputs_.size() )
    {
      throw validation_error( "simulation expects " + std::to_string( inputs_.size() ) + " input word(s), got " + std::to_string( input_words.size() ) );
    }
    std::vector<uint64_t> values( static_cast<std::size_t>( next_id_ ), 0 );
    values[1] = ~0ull;
    for ( std::size_t i = 0; i < inputs_.size(); ++i )
    {
      values[static_cast<std::size_t>( inputs_[i].second )] = input_words[i];
    }
    std::vector<uint64_t> args;
    for ( const compiled_gate& g : gates_ )
    {
      args.clear();
      for ( const int in : g.ins )
      {
        args.push_back( values[static_cast<std::size_t>( in )] );
      }
      values[static_cast<std::size_t>( g.out )] = gate_semantics_word( g.op, args );
    }
    std::vector<uint64_t> out;
    out.reserve( outputs_.size() );
    for ( const auto& [name, id] : outputs_ )
    {
      out.push_back( values[static_cast<std::size_t>( id )] );
    }
    return out;
  }

private:
  struct compiled_gate
  {
    gate_op op{ gate_op::AND };
    int out{ 0 };
    std::vector<int> ins;
  };

  static bool is_output_port( const netlist& nl, const std::string& name )
  {
    return std::any_of( nl.ports.begin(), nl.ports.end(), [&]( const port& p ) { return p.direction == port_direction::output && p.name == name; } );
  }

  static std::vector<std::string> names_of( const std::vector<std::pair<std::string, int>>& items )
  {
    std::vector<std::string> names;
    names.reserve( items.size() );
    for ( const auto& [name, id] : items )
    {
      names.push_back( name );
    }
    return names;
  }

  std::unordered_map<std::string, int> ids_;
  int next_id_{ 2 }; // 0 and 1 are the constants
  std::vector<std::pair<std::string, int>> inputs_, outputs_;
  std::vector<compiled_gate> gates_;
};

inline std::string name_set_text( std::vector<std::string> names )
{
  std::sort( names.begin(), names.end() );
  return "{" + join( names, ", " ) + "}";
}

inline std::string vector_assignment_text( const std::vector<std::string>& order, const std::vector<uint64_t>& words, unsigned bit )
{
  std::vector<std::string> parts;
  for ( std::size_t i = 0; i < order.size(); ++i )
  {
    parts.push_back( order[i] + "=" + ( ( words[i] >> bit ) & 1 ? "1" : "0" ) );
  }
  return join( parts, ", " );
}

} // namespace detail

/*! \brief Checks two netlists for identical behavior on their name-matched
 * simulation interface: exhaustively when the input count is at most
 * `input_cap`, by seeded word-parallel sampling otherwise.  A mismatching
 * interface is a non-equivalence verdict, not an error.
 */
inline verify_report verify_equivalence( const netlist& a, const netlist& b, const verify_config& config = {} )
{
  const detail::compiled_netlist ca( a ), cb( b );

  const std::vector<std::string> order = ca.input_names();
  {
    std::vector<std::string> in_a = order, in_b = cb.input_names();
    std::sort( in_a.begin(), in_a.end() );
    std::sort( in_b.begin(), in_b.end() );
    if ( in_a != in_b )
    {
      return { false, "input mismatch: " + detail::name_set_text( in_a ) + " vs " + detail::name_set_text( in_b ), false, 0 };
    }
    std::vector<std::string> out_a = ca.output_names(), out_b = cb.output_names();
    std::sort( out_a.begin(), out_a.end() );
    std::sort( out_b.begin(), out_b.end() );
    if ( out_a != out_b )
    {
      return { false, "output mismatch: " + detail::name_set_text( out_a ) + " vs " + detail::name_set_text( out_b ), false, 0 };
    }
  }

  // position maps from a's canonical orders to b's own orders
  std::unordered_map<std::string, std::size_t> order_pos;
  for ( std::size_t i = 0; i < order.size(); ++i )
  {
    order_pos[order[i]] = i;
  }
  const std::vector<std::string> b_inputs = cb.input_names();
  std::vector<std::size_t> b_input_from_order( b_inputs.size() );
  for ( std::size_t i = 0; i < b_inputs.size(); ++i )
  {
    b_input_from_order[i] = order_pos.at( b_inputs[i] );
  }
  const std::vector<std::string> out_order = ca.output_names();
  const std::vector<std::string> b_outputs = cb.output_names();
  std::unordered_map<std::string, std::size_t> b_out_pos;
  for ( std::size_t i = 0; i < b_outputs.size(); ++i )
  {
    b_out_pos[b_outputs[i]] = i;
  }

  const std::size_t n = order.size();
  std::vector<uint64_t> words_a( n ), words_b( n );
  const auto run_batch = [&]( uint64_t mask, bool sampled, uint64_t base ) -> std::optional<std::string> {
    for ( std::size_t i = 0; i < b_inputs.size(); ++i )
    {
      words_b[i] = words_a[b_input_from_order[i]];
    }
    const std::vector<uint64_t> out_a = ca.eval( words_a );
    const std::vector<uint64_t> out_b = cb.eval( words_b );
    for ( std::size_t o = 0; o < out_order.size(); ++o )
    {
      const uint64_t diff = ( out_a[o] ^ out_b[b_out_pos.at( out_order[o] )] ) & mask;
      if ( diff != 0 )
      {
        const unsigned bit = static_cast<unsigned>( std::countr_zero( diff ) );
        const std::string assignment = detail::vector_assignment_text( order, words_a, bit );
        if ( sampled )
        {
          return "differs on sampled input (" + assignment + ") at output " + out_order[o];
        }
        return "differs on input vector " + std::to_string( base + bit ) + " (" + assignment + ") at output " + out_order[o];
      }
    }
    return std::nullopt;
  };

  verify_report report;
  if ( n <= std::min<std::size_t>( config.input_cap, 63 ) )
  {
    report.exhaustive = true;
    const uint64_t total = uint64_t{ 1 } << n;
    for ( uint64_t base = 0; base < total; base += 64 )
    {
      const uint64_t width = std::min<uint64_t>( 64, total - base );
      for ( std::size_t i = 0; i < n; ++i )
      {
        words_a[i] = detail::input_word( static_cast<unsigned>( i ), base / 64 );
      }
      const uint64_t mask = width == 64 ? ~0ull : ( ( uint64_t{ 1 } << width ) - 1 );
      if ( const auto mismatch = run_batch( mask, false, base ) )
      {
        report.vectors_checked = base + width;
        report.reason = *mismatch;
        return report;
      }
      report.vectors_checked = base + width;
    }
    report.equivalent = true;
    return report;
  }

  std::mt19937_64 rng( config.seed );
  uint64_t remaining = config.sample_count;
  while ( remaining > 0 )
  {
    const uint64_t width = std::min<uint64_t>( 64, remaining );
    for ( std::size_t i = 0; i < n; ++i )
    {
      words_a[i] = rng();
    }
    const uint64_t mask = width == 64 ? ~0ull : ( ( uint64_t{ 1 } << width ) - 1 );
    if ( const auto mismatch = run_batch( mask, true, 0 ) )
    {
      report.vectors_checked += width;
      report.reason = *mismatch;
      return report;
    }
    report.vectors_checked += width;
    remaining -= width;
  }
  report.equivalent = true;
  return report;
}

// ---------------------------------------------------------------------------
// campaigns
// ---------------------------------------------------------------------------

struct campaign_input
{
  std::string name;   // logical name used in the report (no paths)
  std::string source; // raw netlist text as read from disk
};

struct campaign_config
{
  std::vector<mapping_strategy> strategies{ all_mapping_strategies.begin(), all_mapping_strategies.end() };
  unsigned repeats = 5; // variants per (netlist, strategy)
  uint64_t master_seed = 1;
  unsigned threads = 1;
  detector_config detectors{};
  verify_config verify{};
};

struct variant_record
{
  std::string netlist;
  std::string strategy;
  unsigned repeat{ 1 };
  uint64_t seed{ 0 };
  bool equivalent{ false };
  bool exhaustive{ false };
  uint64_t vectors_checked{ 0 };
  std::string verify_reason;
  std::size_t original_gates{ 0 };
  std::size_t variant_gates{ 0 };
  unsigned original_depth{ 0 };
  unsigned variant_depth{ 0 };
  std::optional<double> gate_overhead_pct;
  std::optional<double> depth_overhead_pct;
  std::vector<detector_result> detections;
  bool evaded_all{ false };
  std::string variant_source; // not serialized into the report
};

/*! \brief Derives the per-variant seed from the master seed and the variant
 * coordinates, so every variant is reproducible in isolation.
 */
inline uint64_t derive_variant_seed( uint64_t master_seed, std::string_view netlist_name, mapping_strategy strategy, unsigned repeat )
{
  uint64_t h = fnv1a64( netlist_name );
  h = fnv1a64_byte( 0x1f, h );
  h = fnv1a64( to_string( strategy ), h );
  h = fnv1a64_byte( 0x1f, h );
  h = fnv1a64( std::to_string( repeat ), h );
  return master_seed ^ h;
}

struct campaign_report
{
  campaign_config config;
  std::vector<std::string> netlists;
  std::vector<variant_record> variants;

  /*! \brief Deterministic JSON image: no timestamps, no paths, independent
   * of thread count.
   */
  nlohmann::json to_json() const
  {
    nlohmann::json j;
    nlohmann::json strategies = nlohmann::json::array();
    for ( const mapping_strategy s : config.strategies )
    {
      strategies.push_back( std::string( to_string( s ) ) );
    }
    j["config"] = {
        { "strategies", std::move( strategies ) },
        { "repeats", config.repeats },
        { "master_seed", config.master_seed },
        { "detectors",
          { { "normalize_identifiers", config.detectors.normalize_identifiers },
            { "winnow", { { "k", config.detectors.winnow_k }, { "window", config.detectors.winnow_window }, { "threshold", config.detectors.winnow_threshold } } },
            { "gst", { { "min_match", config.detectors.gst_min_match }, { "threshold", config.detectors.gst_threshold } } },
            { "overlap", { { "min_run", config.detectors.overlap_min_run }, { "threshold", config.detectors.overlap_threshold } } },
            { "wlkernel", { { "iterations", config.detectors.wl_iterations }, { "threshold", config.detectors.wl_threshold } } } } },
        { "verify", { { "input_cap", config.verify.input_cap }, { "sample_count", config.verify.sample_count }, { "seed", config.verify.seed } } } };
    j["netlists"] = netlists;

    nlohmann::json records = nlohmann::json::array();
    std::map<std::string, std::size_t> evaded_by_strategy, variants_by_strategy, flagged_by_detector;
    std::size_t equivalent_count = 0, evaded_count = 0;
    for ( const variant_record& v : variants )
    {
      nlohmann::json r;
      r["netlist"] = v.netlist;
      r["strategy"] = v.strategy;
      r["repeat"] = v.repeat;
      r["seed"] = v.seed;
      r["equivalent"] = v.equivalent;
      r["exhaustive"] = v.exhaustive;
      r["vectors_checked"] = v.vectors_checked;
      if ( !v.verify_reason.empty() )
      {
        r["verify_reason"] = v.verify_reason;
      }
      r["original_gates"] = v.original_gates;
      r["variant_gates"] = v.variant_gates;
      r["original_depth"] = v.original_depth;
      r["variant_depth"] = v.variant_depth;
      r["gate_overhead_pct"] = v.gate_overhead_pct ? nlohmann::json( *v.gate_overhead_pct ) : nlohmann::json();
      r["depth_overhead_pct"] = v.depth_overhead_pct ? nlohmann::json( *v.depth_overhead_pct ) : nlohmann::json();
      nlohmann::json detections = nlohmann::json::array();
      for ( const detector_result& d : v.detections )
      {
        detections.push_back( { { "detector", d.detector }, { "score", d.score }, { "threshold", d.threshold }, { "pirated", d.pirated } } );
        if ( d.pirated )
        {
          ++flagged_by_detector[d.detector];
        }
      }
      r["detections"] = std::move( detections );
      r["evaded_all"] = v.evaded_all;
      records.push_back( std::move( r ) );

      ++variants_by_strategy[v.strategy];
      if ( v.equivalent )
      {
        ++equivalent_count;
      }
      if ( v.evaded_all )
      {
        ++evaded_count;
        ++evaded_by_strategy[v.strategy];
      }
    }
    j["variants"] = std::move( records );

    nlohmann::json per_strategy = nlohmann::json::object();
    for ( const auto& [strategy, count] : variants_by_strategy )
    {
      per_strategy[strategy] = { { "variants", count }, { "evaded_all", evaded_by_strategy[strategy] } };
    }
    nlohmann::json per_detector = nlohmann::json::object();
    for ( const auto& [detector, count] : flagged_by_detector )
    {
      per_detector[detector] = { { "flagged", count } };
    }
    j["summary"] = {
        { "total_variants", variants.size() },
        { "equivalent", equivalent_count },
        { "evaded_all", evaded_count },
        { "per_strategy", std::move( per_strategy ) },
        { "per_detector", std::move( per_detector ) } };
    return j;
  }
};

/*! \brief Generates, verifies and scores all requested variants.
 *
 * Work items are fixed up front and filled into indexed slots, so the
 * report is identical whatever `config.threads` says.
 */
inline campaign_report run_campaign( const std::vector<campaign_input>& inputs, const transformation_dictionary& dictionary, const campaign_config& config = {} )
{
  if ( inputs.empty() )
  {
    throw config_error( "campaign needs at least one netlist" );
  }
  if ( config.strategies.empty() || config.repeats == 0 )
  {
    throw config_error( "campaign needs at least one strategy and one repeat" );
  }

  struct parsed_input
  {
    const campaign_input* input;
    netlist parsed;
    std::size_t gates;
    unsigned depth;
  };
  std::vector<parsed_input> parsed;
  for ( const campaign_input& input : inputs )
  {
    parsed_input p{ &input, parse_netlist( input.source ), 0, 0 };
    p.gates = p.parsed.gates.size();
    p.depth = critical_path_depth( p.parsed );
    parsed.push_back( std::move( p ) );
  }

  struct job
  {
    std::size_t input_index;
    mapping_strategy strategy;
    unsigned repeat;
  };
  std::vector<job> jobs;
  for ( std::size_t i = 0; i < parsed.size(); ++i )
  {
    for ( const mapping_strategy strategy : config.strategies )
    {
      for ( unsigned repeat = 1; repeat <= config.repeats; ++repeat )
      {
        jobs.push_back( { i, strategy, repeat } );
      }
    }
  }

  std::vector<variant_record> records( jobs.size() );
  std::vector<std::exception_ptr> errors( jobs.size() );
  const auto run_job = [&]( std::size_t index ) {
    try
    {
      const job& item = jobs[index];
      const parsed_input& in = parsed[item.input_index];
      variant_record record;
      record.netlist = in.input->name;
      record.strategy = std::string( to_string( item.strategy ) );
      record.repeat = item.repeat;
      record.seed = derive_variant_seed( config.master_seed, in.input->name, item.strategy, item.repeat );

      const netlist variant = pirate_netlist( in.parsed, dictionary, item.strategy, record.seed );
      record.variant_source = emit_netlist( variant );

      const verify_report verdict = verify_equivalence( in.parsed, variant, config.verify );
      record.equivalent = verdict.equivalent;
      record.exhaustive = verdict.exhaustive;
      record.vectors_checked = verdict.vectors_checked;
      record.verify_reason = verdict.reason;

      record.original_gates = in.gates;
      record.variant_gates = variant.gates.size();
      record.original_depth = in.depth;
      record.variant_depth = critical_path_depth( variant );
      const overhead_report overhead = compute_overhead( in.parsed, variant );
      record.gate_overhead_pct = overhead.gate_overhead_pct;
      record.depth_overhead_pct = overhead.depth_overhead_pct;

      record.detections = run_detectors( in.input->source, record.variant_source, config.detectors );
      record.evaded_all = evades_all( record.detections );
      records[index] = std::move( record );
    }
    catch ( ... )
    {
      errors[index] = std::current_exception();
    }
  };

  const unsigned thread_count = std::max( 1u, config.threads );
  if ( thread_count <= 1 || jobs.size() <= 1 )
  {
    for ( std::size_t i = 0; i < jobs.size(); ++i )
    {
      run_job( i );
    }
  }
  else
  {
    std::atomic<std::size_t> next{ 0 };
    std::vector<std::thread> workers;
    for ( unsigned t = 0; t < std::min<std::size_t>( thread_count, jobs.size() ); ++t )
    {
      workers.emplace_back( [&]() {
        for ( std::size_t i = next.fetch_add( 1 ); i < jobs.size(); i = next.fetch_add( 1 ) )
        {
          run_job( i );
        }
      } );
    }
    for ( std::thread& worker : workers )
    {
      worker.join();
    }
  }
  for ( const std::exception_ptr& error : errors )
  {
    if ( error )
    {
      std::rethrow_exception( error );
    }
  }

  campaign_report report;
  report.config = config;
  for ( const parsed_input& p : parsed )
  {
    report.netlists.push_back( p.input->name );
  }
  report.variants = std::move( records );
  return report;
}

} // namespace netmorph
