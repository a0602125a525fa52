/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <netmorph/netmorph.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

using namespace netmorph;

namespace
{

netlist load_benchmark( const std::string& name )
{
  return parse_netlist( nmtest::read_file( nmtest::repo_dir() + "/benchmarks/" + name + ".v" ) );
}

/*! \brief One verified dictionary covering every gate type of every benchmark. */
const transformation_dictionary& benchmark_dictionary()
{
  static const transformation_dictionary dictionary = []() {
    std::set<gate_type> types;
    for ( const char* name : { "c17", "mix60", "parity160", "seqmix", "xor_chain20" } )
    {
      for ( const gate_instance& gate : load_benchmark( name ).gates )
      {
        types.insert( gate.type() );
      }
    }
    oracle_backend backend;
    dictionary_build_result result = build_dictionary( backend, types );
    REQUIRE( result.complete() );
    return std::move( result.dictionary );
  }();
  return dictionary;
}

/*! \brief Scripted answers plus a snapshot of the conversation at every call. */
class snooping_backend final : public llm_backend
{
public:
  explicit snooping_backend( std::vector<std::string> responses ) : responses_( std::move( responses ) ) {}

  std::string complete( const conversation& history ) override
  {
    histories.push_back( history );
    if ( next_ >= responses_.size() )
    {
      throw transport_error( "snooping backend has no response left" );
    }
    return responses_[next_++];
  }

  std::string id() const override
  {
    return "snooping";
  }

  std::vector<conversation> histories;

private:
  std::vector<std::string> responses_;
  std::size_t next_{ 0 };
};

std::vector<nlohmann::json> read_jsonl( const std::string& path )
{
  std::ifstream in( path );
  REQUIRE( in.good() );
  std::vector<nlohmann::json> records;
  std::string line;
  while ( std::getline( in, line ) )
  {
    records.push_back( nlohmann::json::parse( line ) );
  }
  return records;
}

nlohmann::json without_timestamps( nlohmann::json j )
{
  for ( nlohmann::json& entry : j["entries"] )
  {
    if ( entry.contains( "provenance" ) )
    {
      entry["provenance"].erase( "timestamp" );
    }
  }
  return j;
}

/*! \brief Module with `width` inputs i0..i<width-1> and one gate driving y. */
std::string wide_module_text( const std::string& op, unsigned width )
{
  std::string header, decls, args;
  for ( unsigned i = 0; i < width; ++i )
  {
    header += "i" + std::to_string( i ) + ", ";
    decls += ( i == 0 ? "input i0" : ", i" + std::to_string( i ) );
    args += ", i" + std::to_string( i );
  }
  return "module wide (" + header + "y);\n" + decls + ";\noutput y;\n" + op + " g (y" + args + ");\nendmodule\n";
}

} // namespace

// ---------------------------------------------------------------------------
// feedback-guided sessions
// ---------------------------------------------------------------------------

TEST_CASE( "a session accepts the first valid rewrite" )
{
  const gate_type type{ gate_op::AND, 2 };
  const operator_set allowed{ gate_op::NAND };
  scripted_backend backend( { "t1 = NAND(A1, A2)\nY = NAND(t1, t1)\n" } );

  const session_outcome outcome = generate_transformation( backend, type, allowed );
  REQUIRE( outcome.status == session_status::success );
  CHECK( outcome.attempts_used == 1 );
  CHECK( outcome.failure_history.empty() );
  CHECK( outcome.error.empty() );
  REQUIRE( outcome.circuit.has_value() );
  CHECK( nmtest::ref_truth_string( *outcome.circuit ) == nmtest::ref_truth_string( representative_circuit( type ) ) );
  CHECK( outcome.circuit->inputs == representative_circuit( type ).inputs );
}

TEST_CASE( "a session feeds each failure kind back and succeeds on the fourth attempt" )
{
  const gate_type type{ gate_op::AND, 2 };
  const operator_set allowed{ gate_op::NAND };
  snooping_backend backend( {
      "I am sorry, I cannot do that.",        // nothing parseable: syntax
      "Y = OR(A1, A2)\n",                     // parses, but OR is banned: operators
      "Y = NAND(A1, A2)\n",                   // right operators, wrong function
      "t1 = NAND(A1, A2)\nY = NAND(t1, t1)\n" // correct
  } );

  const session_outcome outcome = generate_transformation( backend, type, allowed, { 5 } );
  REQUIRE( outcome.status == session_status::success );
  CHECK( outcome.attempts_used == 4 );
  REQUIRE( outcome.failure_history.size() == 3 );
  CHECK( outcome.attempts_used == 1 + outcome.failure_history.size() );
  CHECK( outcome.failure_history[0].kind == check_kind::syntax );
  CHECK( outcome.failure_history[1].kind == check_kind::operators );
  CHECK( outcome.failure_history[2].kind == check_kind::functionality );
  CHECK( outcome.failure_history[1].detail.find( "OR" ) != std::string::npos );

  // the conversation grows by one assistant answer and one feedback prompt per
  // failed attempt, and every feedback prompt restates the original circuit
  REQUIRE( backend.histories.size() == 4 );
  const std::string original = emit_boolean_circuit( representative_circuit( type ) );
  for ( std::size_t call = 0; call < backend.histories.size(); ++call )
  {
    const conversation& history = backend.histories[call];
    REQUIRE( history.size() == 1 + 2 * call );
    for ( std::size_t i = 0; i < history.size(); ++i )
    {
      CHECK( history[i].role == ( i % 2 == 0 ? "user" : "assistant" ) );
    }
    CHECK( history.back().role == "user" );
    if ( call > 0 )
    {
      CHECK( history.back().content.substr( history.back().content.size() - original.size() - 2 ) == "\n\n" + original );
    }
  }
  CHECK( backend.histories[0][0].content.find( "only uses the following Boolean operators: [NAND]" ) != std::string::npos );
  CHECK( backend.histories[1].back().content.find( "could not be parsed" ) != std::string::npos );
  CHECK( backend.histories[2].back().content.find( "not allowed" ) != std::string::npos );
  CHECK( backend.histories[3].back().content.rfind( functionality_feedback_sentence, 0 ) == 0 );
}

TEST_CASE( "a session that never sees a valid rewrite is exhausted" )
{
  scripted_backend backend( { "no", "still no", "nope" } );
  const session_outcome outcome = generate_transformation( backend, { gate_op::AND, 2 }, { gate_op::NAND }, { 3 } );
  CHECK( outcome.status == session_status::exhausted );
  CHECK( outcome.attempts_used == 3 );
  CHECK( !outcome.circuit.has_value() );
  CHECK( outcome.failure_history.size() == 3 );
}

TEST_CASE( "a backend transport failure aborts the session" )
{
  scripted_backend backend( { "not a circuit" } );
  const session_outcome outcome = generate_transformation( backend, { gate_op::AND, 2 }, { gate_op::NAND }, { 3 } );
  CHECK( outcome.status == session_status::aborted );
  CHECK( outcome.attempts_used == 1 );
  CHECK( outcome.failure_history.size() == 1 );
  CHECK( !outcome.circuit.has_value() );
  CHECK( outcome.error.find( "script exhausted" ) != std::string::npos );
}

TEST_CASE( "a session must be allowed at least one attempt" )
{
  oracle_backend backend;
  CHECK_THROWS_MATCHES( generate_transformation( backend, { gate_op::AND, 2 }, { gate_op::NAND }, { 0 } ),
                        config_error, Catch::Matchers::MessageMatches( Catch::Matchers::ContainsSubstring( "at least one attempt" ) ) );
}

TEST_CASE( "an aborted session leaves a final aborted transcript record" )
{
  const std::string dir = nmtest::make_temp_dir();
  scripted_backend backend( { "not a circuit" } );
  {
    transcript_writer transcript( dir + "/session.jsonl" );
    generate_transformation( backend, { gate_op::AND, 2 }, { gate_op::NAND }, { 3 }, &transcript );
  }
  const std::vector<nlohmann::json> records = read_jsonl( dir + "/session.jsonl" );
  REQUIRE( records.size() == 2 );
  CHECK( records[0]["attempt"] == 1 );
  CHECK( records[0]["check"] == "syntax" );
  CHECK( records[1]["attempt"] == 2 );
  CHECK( records[1]["check"] == "aborted" );
  CHECK( records[1]["response"] == "" );
  CHECK( records[1]["failure_detail"].get<std::string>().find( "script exhausted" ) != std::string::npos );
}

// ---------------------------------------------------------------------------
// dictionary building
// ---------------------------------------------------------------------------

TEST_CASE( "the reference answerer fills every requested dictionary slot on the first attempt" )
{
  oracle_backend backend;
  const dictionary_build_result result = build_dictionary( backend, { { gate_op::NAND, 2 }, { gate_op::NOT, 1 } } );

  REQUIRE( result.sessions.size() == 5 ); // three NAND sets + two NOT sets
  CHECK( result.complete() );
  CHECK( result.dictionary.size() == 5 );
  CHECK( result.sessions[0].type == gate_type{ gate_op::NAND, 2 } );
  CHECK( result.sessions[0].allowed == operator_set{ gate_op::NOR } );
  CHECK( result.sessions[3].type == gate_type{ gate_op::NOT, 1 } );
  CHECK( result.sessions[3].allowed == operator_set{ gate_op::NAND } );
  for ( const session_record& session : result.sessions )
  {
    CHECK( session.status == session_status::success );
    CHECK( session.attempts_used == 1 );
    CHECK( session.failure_history.empty() );
  }

  // entries come back in substitution-table order and carry their provenance
  const std::vector<const transformation_entry*> nand_entries = result.dictionary.entries_for( { gate_op::NAND, 2 } );
  REQUIRE( nand_entries.size() == 3 );
  CHECK( nand_entries[0]->allowed == operator_set{ gate_op::NOR } );
  CHECK( nand_entries[1]->allowed == ( operator_set{ gate_op::AND, gate_op::NOT } ) );
  CHECK( nand_entries[2]->allowed == ( operator_set{ gate_op::OR, gate_op::NOT } ) );
  const std::regex iso8601( R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)" );
  for ( const transformation_entry* entry : nand_entries )
  {
    CHECK( entry->provenance.backend == "oracle" );
    CHECK( entry->provenance.attempts == 1 );
    CHECK( std::regex_match( entry->provenance.timestamp, iso8601 ) );
  }
}

TEST_CASE( "dictionary building writes one transcript per session" )
{
  const std::string dir = nmtest::make_temp_dir();
  oracle_backend backend;
  dictionary_build_options options;
  options.transcript_dir = dir;
  build_dictionary( backend, { { gate_op::NAND, 2 }, { gate_op::NOT, 1 } }, options );

  for ( const char* name : { "session_nand2__nor.jsonl", "session_nand2__and_not.jsonl",
                             "session_nand2__or_not.jsonl", "session_not1__nand.jsonl",
                             "session_not1__nor.jsonl" } )
  {
    const std::vector<nlohmann::json> records = read_jsonl( dir + "/" + name );
    REQUIRE( records.size() == 1 );
    CHECK( records[0]["check"] == "pass" );
  }
}

TEST_CASE( "the dictionary build result does not depend on the thread count" )
{
  const std::set<gate_type> types = { { gate_op::NAND, 2 }, { gate_op::XOR, 2 }, { gate_op::NOT, 1 } };
  oracle_backend backend;
  dictionary_build_options serial, parallel;
  serial.threads = 1;
  parallel.threads = 4;
  const dictionary_build_result a = build_dictionary( backend, types, serial );
  const dictionary_build_result b = build_dictionary( backend, types, parallel );

  REQUIRE( a.sessions.size() == b.sessions.size() );
  for ( std::size_t i = 0; i < a.sessions.size(); ++i )
  {
    CHECK( a.sessions[i].type == b.sessions[i].type );
    CHECK( a.sessions[i].allowed == b.sessions[i].allowed );
    CHECK( a.sessions[i].status == b.sessions[i].status );
  }
  CHECK( without_timestamps( a.dictionary.to_json() ).dump( 2 ) == without_timestamps( b.dictionary.to_json() ).dump( 2 ) );
}

TEST_CASE( "a partially failing build is reported as incomplete" )
{
  // the first NOT session gets a correct answer; the second burns through all
  // of its attempts on unusable answers
  scripted_backend backend( { "Y = NAND(A1, A1)\n", "junk", "junk", "junk" } );
  dictionary_build_options options;
  options.max_attempts = 3;
  const dictionary_build_result result = build_dictionary( backend, { { gate_op::NOT, 1 } }, options );

  REQUIRE( result.sessions.size() == 2 );
  CHECK( result.sessions[0].status == session_status::success );
  CHECK( result.sessions[0].attempts_used == 1 );
  CHECK( result.sessions[1].status == session_status::exhausted );
  CHECK( result.sessions[1].attempts_used == 3 );
  CHECK( !result.complete() );
  CHECK( result.dictionary.size() == 1 );
  CHECK( result.dictionary.find( { gate_op::NOT, 1 }, { gate_op::NOR } ) == nullptr );
}

// ---------------------------------------------------------------------------
// dictionary persistence and validation
// ---------------------------------------------------------------------------

TEST_CASE( "a dictionary survives a save/load round trip" )
{
  oracle_backend backend;
  const transformation_dictionary original = build_dictionary( backend, { { gate_op::NAND, 2 }, { gate_op::NOT, 1 } } ).dictionary;
  const std::string path = nmtest::make_temp_dir() + "/dictionary.json";
  original.save( path );
  const transformation_dictionary loaded = transformation_dictionary::load( path );
  CHECK( loaded.size() == original.size() );
  CHECK( loaded.to_json().dump( 2 ) == original.to_json().dump( 2 ) );
}

TEST_CASE( "loading rejects malformed dictionary files" )
{
  const std::string dir = nmtest::make_temp_dir();
  const auto write_and_load = [&]( const std::string& text ) {
    const std::string path = dir + "/broken.json";
    nmtest::write_file( path, text );
    return transformation_dictionary::load( path );
  };
  using Catch::Matchers::ContainsSubstring;
  using Catch::Matchers::MessageMatches;

  CHECK_THROWS_MATCHES( write_and_load( "not json {" ), validation_error,
                        MessageMatches( ContainsSubstring( "is not valid JSON" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( "[1, 2]" ), validation_error,
                        MessageMatches( ContainsSubstring( "must be an object with version 1" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( R"({"version": 2, "entries": []})" ), validation_error,
                        MessageMatches( ContainsSubstring( "must be an object with version 1" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( R"({"version": 1})" ), validation_error,
                        MessageMatches( ContainsSubstring( "has no entries array" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( R"({"version": 1, "entries": [{}]})" ), validation_error,
                        MessageMatches( ContainsSubstring( "lacks field 'operator'" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( R"({"version": 1, "entries": [{"operator": "NAND", "fan_in": 2, "operator_set": "[NOR]"}]})" ),
                        validation_error, MessageMatches( ContainsSubstring( "lacks field 'circuit_text'" ) ) );
  CHECK_THROWS_MATCHES( write_and_load( R"({"version": 1, "entries": [{"operator": "FOO", "fan_in": 2, "operator_set": "[NOR]", "circuit_text": "Y = NOR(A1, A2)\n"}]})" ),
                        validation_error, MessageMatches( ContainsSubstring( "names unknown operator 'FOO'" ) ) );
  CHECK_THROWS_MATCHES( transformation_dictionary::load( dir + "/missing.json" ), io_error,
                        MessageMatches( ContainsSubstring( "cannot open dictionary file" ) ) );
  CHECK_THROWS_MATCHES( transformation_dictionary().save( dir + "/no_such_dir/dictionary.json" ), io_error,
                        MessageMatches( ContainsSubstring( "cannot write dictionary file" ) ) );
}

TEST_CASE( "the dictionary rejects entries whose circuits do not hold up" )
{
  using Catch::Matchers::ContainsSubstring;
  using Catch::Matchers::MessageMatches;
  transformation_dictionary dictionary;

  transformation_entry smuggled_operator;
  smuggled_operator.type = { gate_op::AND, 2 };
  smuggled_operator.allowed = { gate_op::NAND };
  smuggled_operator.circuit = parse_boolean_circuit( "Y = OR(A1, A2)\n" );
  CHECK_THROWS_MATCHES( dictionary.insert( smuggled_operator ), validation_error,
                        MessageMatches( ContainsSubstring( "uses disallowed operator OR" ) ) );

  transformation_entry wrong_function;
  wrong_function.type = { gate_op::AND, 2 };
  wrong_function.allowed = { gate_op::NAND };
  wrong_function.circuit = parse_boolean_circuit( "Y = NAND(A1, A2)\n" );
  CHECK_THROWS_MATCHES( dictionary.insert( wrong_function ), validation_error,
                        MessageMatches( ContainsSubstring( "is not equivalent:" ) ) );
  CHECK( dictionary.empty() );

  // the same checks guard the JSON path, so a tampered file cannot sneak in
  nlohmann::json j = { { "version", 1 },
                       { "entries", { { { "operator", "AND" }, { "fan_in", 2 }, { "operator_set", "[NAND]" }, { "circuit_text", "Y = NAND(A1, A2)\n" } } } } };
  CHECK_THROWS_MATCHES( transformation_dictionary::from_json( j ), validation_error,
                        MessageMatches( ContainsSubstring( "is not equivalent:" ) ) );
}

TEST_CASE( "inserting the same slot again replaces the stored rewrite" )
{
  transformation_dictionary dictionary;
  transformation_entry entry;
  entry.type = { gate_op::AND, 2 };
  entry.allowed = { gate_op::NAND };
  entry.circuit = parse_boolean_circuit( "t1 = NAND(A1, A2)\nY = NAND(t1, t1)\n" );
  entry.provenance = { "first", 1, "2026-01-01T00:00:00Z" };
  dictionary.insert( entry );
  entry.provenance = { "second", 4, "2026-01-02T00:00:00Z" };
  dictionary.insert( entry );

  REQUIRE( dictionary.size() == 1 );
  const transformation_entry* stored = dictionary.find( { gate_op::AND, 2 }, { gate_op::NAND } );
  REQUIRE( stored != nullptr );
  CHECK( stored->provenance.backend == "second" );
  CHECK( stored->provenance.attempts == 4 );
}

// ---------------------------------------------------------------------------
// mapping strategies
// ---------------------------------------------------------------------------

TEST_CASE( "each mapping strategy prefers its named operator set" )
{
  oracle_backend backend;
  const transformation_dictionary dictionary = build_dictionary( backend, { { gate_op::NAND, 2 } } ).dictionary;
  std::mt19937_64 rng( 1 );

  CHECK( select_transformation( dictionary, { gate_op::NAND, 2 }, mapping_strategy::nor, rng ).allowed == operator_set{ gate_op::NOR } );
  CHECK( select_transformation( dictionary, { gate_op::NAND, 2 }, mapping_strategy::and_not, rng ).allowed == ( operator_set{ gate_op::AND, gate_op::NOT } ) );
  CHECK( select_transformation( dictionary, { gate_op::NAND, 2 }, mapping_strategy::or_not, rng ).allowed == ( operator_set{ gate_op::OR, gate_op::NOT } ) );

  CHECK( preferred_operator_set( mapping_strategy::nand ) == operator_set{ gate_op::NAND } );
  CHECK( !preferred_operator_set( mapping_strategy::random ).has_value() );
  CHECK( mapping_strategy_from_string( "AND_NOT" ) == mapping_strategy::and_not );
  CHECK( mapping_strategy_from_string( "random" ) == mapping_strategy::random );
  CHECK( !mapping_strategy_from_string( "bogus" ).has_value() );
}

TEST_CASE( "strategy fallbacks stay inside the dictionary and follow the seed" )
{
  oracle_backend backend;
  const transformation_dictionary dictionary = build_dictionary( backend, { { gate_op::NAND, 2 }, { gate_op::XOR, 2 } } ).dictionary;

  // no substitution rewrites NAND with NAND, so the nand strategy must fall
  // back to a seeded draw among the three available sets
  std::mt19937_64 first( 7 ), second( 7 );
  for ( int i = 0; i < 20; ++i )
  {
    const transformation_entry& a = select_transformation( dictionary, { gate_op::NAND, 2 }, mapping_strategy::nand, first );
    const transformation_entry& b = select_transformation( dictionary, { gate_op::NAND, 2 }, mapping_strategy::nand, second );
    CHECK( a.allowed == b.allowed );
    CHECK( a.allowed != operator_set{ gate_op::NAND } );
  }

  // the random strategy eventually draws both XOR sets
  std::mt19937_64 rng( 42 );
  std::set<std::string> seen;
  for ( int i = 0; i < 64; ++i )
  {
    seen.insert( to_string( select_transformation( dictionary, { gate_op::XOR, 2 }, mapping_strategy::random, rng ).allowed ) );
  }
  CHECK( seen == std::set<std::string>{ "[NAND]", "[NOR]" } );
}

TEST_CASE( "selecting a rewrite for an uncovered gate type fails loudly" )
{
  transformation_dictionary dictionary;
  std::mt19937_64 rng( 1 );
  CHECK_THROWS_MATCHES( select_transformation( dictionary, { gate_op::NOR, 2 }, mapping_strategy::nand, rng ),
                        validation_error,
                        Catch::Matchers::MessageMatches( Catch::Matchers::ContainsSubstring( "dictionary has no transformation for NOR/2" ) ) );
}

// ---------------------------------------------------------------------------
// netlist rewriting
// ---------------------------------------------------------------------------

TEST_CASE( "every benchmark rewrite under every strategy is functionally equivalent" )
{
  const transformation_dictionary& dictionary = benchmark_dictionary();
  uint64_t seed = 7;
  for ( const char* name : { "c17", "mix60", "parity160", "seqmix", "xor_chain20" } )
  {
    const netlist original = load_benchmark( name );
    for ( const mapping_strategy strategy : all_mapping_strategies )
    {
      INFO( name << " under " << to_string( strategy ) );
      const netlist variant = pirate_netlist( original, dictionary, strategy, seed++ );
      CHECK( variant.name == original.name );
      CHECK( variant.ports == original.ports );
      const verify_report verdict = verify_equivalence( original, variant );
      INFO( verdict.reason );
      REQUIRE( verdict.equivalent );
      CHECK( verdict.vectors_checked > 0 );
    }
  }
}

TEST_CASE( "pass-through statements survive rewriting untouched" )
{
  const netlist original = load_benchmark( "seqmix" );
  const netlist variant = pirate_netlist( original, benchmark_dictionary(), mapping_strategy::nor, 11 );

  CHECK( variant.opaque_items == original.opaque_items );
  CHECK( variant.ports == original.ports );
  for ( const gate_instance& gate : variant.gates )
  {
    CHECK( gate.name.rfind( "llmp_g", 0 ) == 0 );
  }
  const verify_report verdict = verify_equivalence( original, variant );
  INFO( verdict.reason );
  CHECK( verdict.equivalent );
}

TEST_CASE( "the XOR chain rewritten over NAND has the catalogued overhead" )
{
  const netlist original = load_benchmark( "xor_chain20" );
  const netlist variant = pirate_netlist( original, benchmark_dictionary(), mapping_strategy::nand, 3 );

  // each two-input XOR becomes the four-gate NAND form, tripling the gate
  // count; depth goes from one level per stage to three
  CHECK( original.gates.size() == 20 );
  CHECK( variant.gates.size() == 80 );
  CHECK( critical_path_depth( original ) == 20 );
  CHECK( critical_path_depth( variant ) == 60 );
  for ( const gate_instance& gate : variant.gates )
  {
    CHECK( gate.op == gate_op::NAND );
  }
  const overhead_report overhead = compute_overhead( original, variant );
  REQUIRE( overhead.gate_overhead_pct.has_value() );
  REQUIRE( overhead.depth_overhead_pct.has_value() );
  CHECK( *overhead.gate_overhead_pct == Catch::Approx( 300.0 ) );
  CHECK( *overhead.depth_overhead_pct == Catch::Approx( 200.0 ) );
}

TEST_CASE( "rewriting the NAND benchmark over AND and NOT doubles its gates" )
{
  const netlist original = load_benchmark( "c17" );
  const netlist variant = pirate_netlist( original, benchmark_dictionary(), mapping_strategy::and_not, 5 );
  CHECK( original.gates.size() == 6 );
  CHECK( variant.gates.size() == 12 );
  for ( const gate_instance& gate : variant.gates )
  {
    CHECK( ( gate.op == gate_op::AND || gate.op == gate_op::NOT ) );
  }
}

TEST_CASE( "the same seed reproduces a variant byte for byte" )
{
  const netlist original = load_benchmark( "mix60" );
  const transformation_dictionary& dictionary = benchmark_dictionary();
  const std::string first = emit_netlist( pirate_netlist( original, dictionary, mapping_strategy::random, 123 ) );
  const std::string again = emit_netlist( pirate_netlist( original, dictionary, mapping_strategy::random, 123 ) );
  const std::string other = emit_netlist( pirate_netlist( original, dictionary, mapping_strategy::random, 124 ) );
  CHECK( first == again );
  CHECK( first != other );
}

// ---------------------------------------------------------------------------
// equivalence verification
// ---------------------------------------------------------------------------

TEST_CASE( "equivalence mismatches are reported with the exact failing vector" )
{
  const netlist and_gate = parse_netlist( "module m (a, b, y);\ninput a, b;\noutput y;\nand g (y, a, b);\nendmodule\n" );
  const netlist or_gate = parse_netlist( "module m (a, b, y);\ninput a, b;\noutput y;\nor g (y, a, b);\nendmodule\n" );

  const verify_report verdict = verify_equivalence( and_gate, or_gate );
  CHECK( !verdict.equivalent );
  CHECK( verdict.exhaustive );
  CHECK( verdict.vectors_checked == 4 );
  CHECK( verdict.reason == "differs on input vector 1 (a=1, b=0) at output y" );

  const verify_report self = verify_equivalence( and_gate, and_gate );
  CHECK( self.equivalent );
  CHECK( self.exhaustive );
  CHECK( self.vectors_checked == 4 );
  CHECK( self.reason.empty() );
}

TEST_CASE( "interface mismatches are verdicts, not errors" )
{
  const netlist base = parse_netlist( "module m (a, b, y);\ninput a, b;\noutput y;\nand g (y, a, b);\nendmodule\n" );
  const netlist other_input = parse_netlist( "module m (a, c, y);\ninput a, c;\noutput y;\nand g (y, a, c);\nendmodule\n" );
  const netlist other_output = parse_netlist( "module m (a, b, z);\ninput a, b;\noutput z;\nand g (z, a, b);\nendmodule\n" );

  const verify_report inputs = verify_equivalence( base, other_input );
  CHECK( !inputs.equivalent );
  CHECK( !inputs.exhaustive );
  CHECK( inputs.vectors_checked == 0 );
  CHECK( inputs.reason == "input mismatch: {a, b} vs {a, c}" );

  const verify_report outputs = verify_equivalence( base, other_output );
  CHECK( !outputs.equivalent );
  CHECK( outputs.reason == "output mismatch: {y} vs {z}" );
}

TEST_CASE( "a flipped gate feeding a pass-through cell is caught at the boundary" )
{
  const std::string source = nmtest::read_file( nmtest::repo_dir() + "/benchmarks/seqmix.v" );
  std::string flipped = source;
  const std::size_t pos = flipped.find( "xor G2" );
  REQUIRE( pos != std::string::npos );
  flipped.replace( pos, 6, "xnor G2" );

  // d0 only feeds a state cell, yet the per-cycle comparison still sees it:
  // gate-driven nets consumed by pass-through statements are compared like
  // outputs, and the free nets they drive like inputs
  const verify_report verdict = verify_equivalence( parse_netlist( source ), parse_netlist( flipped ) );
  CHECK( !verdict.equivalent );
  CHECK( verdict.exhaustive );
  CHECK( verdict.vectors_checked == 64 );
  CHECK( verdict.reason == "differs on input vector 0 (clk=0, a=0, b=0, c=0, ff0=0, ff1=0) at output d0" );

  const verify_report self = verify_equivalence( parse_netlist( source ), parse_netlist( source ) );
  CHECK( self.equivalent );
  CHECK( self.vectors_checked == 64 ); // 4 input ports plus the 2 state outputs
}

TEST_CASE( "wide interfaces fall back to seeded sampling" )
{
  const netlist or_wide = parse_netlist( wide_module_text( "or", 21 ) );
  const netlist or_copy = parse_netlist( wide_module_text( "or", 21 ) );
  const netlist and_wide = parse_netlist( wide_module_text( "and", 21 ) );

  const verify_report same = verify_equivalence( or_wide, or_copy );
  CHECK( same.equivalent );
  CHECK( !same.exhaustive );
  CHECK( same.vectors_checked == 10000 );

  const verify_report differs = verify_equivalence( or_wide, and_wide );
  CHECK( !differs.equivalent );
  CHECK( !differs.exhaustive );
  CHECK( differs.reason.rfind( "differs on sampled input (", 0 ) == 0 );
  CHECK( differs.reason.find( "at output y" ) != std::string::npos );

  verify_config budget;
  budget.sample_count = 100;
  CHECK( verify_equivalence( or_wide, or_copy, budget ).vectors_checked == 100 );

  // twenty inputs is still within the exhaustive regime by default
  const netlist or_20 = parse_netlist( wide_module_text( "or", 20 ) );
  const netlist or_20_copy = parse_netlist( wide_module_text( "or", 20 ) );
  const verify_report exhaustive = verify_equivalence( or_20, or_20_copy );
  CHECK( exhaustive.exhaustive );
  CHECK( exhaustive.vectors_checked == uint64_t{ 1 } << 20 );
}

// ---------------------------------------------------------------------------
// campaigns
// ---------------------------------------------------------------------------

TEST_CASE( "variant seeds are distinct, reproducible coordinates" )
{
  // the master seed folds in by XOR, so shifting it shifts every seed alike
  const uint64_t base = derive_variant_seed( 0, "c17", mapping_strategy::nand, 3 );
  CHECK( derive_variant_seed( 99, "c17", mapping_strategy::nand, 3 ) == ( 99 ^ base ) );

  std::set<uint64_t> seeds;
  for ( const char* name : { "c17", "xor_chain20" } )
  {
    for ( const mapping_strategy strategy : all_mapping_strategies )
    {
      for ( unsigned repeat = 1; repeat <= 5; ++repeat )
      {
        seeds.insert( derive_variant_seed( 1, name, strategy, repeat ) );
      }
    }
  }
  CHECK( seeds.size() == 50 );

  // the coordinates hash as name, strategy and decimal repeat joined by 0x1f
  uint64_t h = fnv1a64( "c17" );
  h = fnv1a64_byte( 0x1f, h );
  h = fnv1a64( "nand", h );
  h = fnv1a64_byte( 0x1f, h );
  h = fnv1a64( "3", h );
  CHECK( base == h );
}

TEST_CASE( "a campaign scores every variant and its report is deterministic" )
{
  const std::vector<campaign_input> inputs = {
      { "c17", nmtest::read_file( nmtest::repo_dir() + "/benchmarks/c17.v" ) },
      { "xor_chain20", nmtest::read_file( nmtest::repo_dir() + "/benchmarks/xor_chain20.v" ) } };
  campaign_config config;
  config.repeats = 2;
  config.master_seed = 9;

  const campaign_report report = run_campaign( inputs, benchmark_dictionary(), config );
  CHECK( report.netlists == std::vector<std::string>{ "c17", "xor_chain20" } );
  REQUIRE( report.variants.size() == 20 ); // 2 netlists x 5 strategies x 2 repeats

  CHECK( report.variants[0].netlist == "c17" );
  CHECK( report.variants[0].strategy == "and_not" );
  CHECK( report.variants[0].repeat == 1 );
  CHECK( report.variants[1].repeat == 2 );
  CHECK( report.variants[2].strategy == "nand" );
  CHECK( report.variants[10].netlist == "xor_chain20" );

  for ( const variant_record& v : report.variants )
  {
    INFO( v.netlist << " " << v.strategy << " repeat " << v.repeat );
    CHECK( v.seed == derive_variant_seed( 9, v.netlist, *mapping_strategy_from_string( v.strategy ), v.repeat ) );
    CHECK( v.equivalent );
    CHECK( v.exhaustive );
    CHECK( v.vectors_checked == ( v.netlist == "c17" ? 32 : 131072 ) );
    CHECK( v.original_gates == ( v.netlist == "c17" ? 6 : 20 ) );
    CHECK( v.variant_gates > v.original_gates );
    REQUIRE( v.detections.size() == 4 );
    CHECK( v.detections[0].detector == "winnow" );
    CHECK( v.detections[1].detector == "gst" );
    CHECK( v.detections[2].detector == "overlap" );
    CHECK( v.detections[3].detector == "wlkernel" );
    const bool flagged = std::any_of( v.detections.begin(), v.detections.end(),
                                      []( const detector_result& d ) { return d.pirated; } );
    CHECK( v.evaded_all == !flagged );
  }

  // the NAND strategy on the XOR chain has a known exact cost
  const variant_record& nand_chain = report.variants[12];
  CHECK( nand_chain.netlist == "xor_chain20" );
  CHECK( nand_chain.strategy == "nand" );
  CHECK( nand_chain.variant_gates == 80 );
  REQUIRE( nand_chain.gate_overhead_pct.has_value() );
  CHECK( *nand_chain.gate_overhead_pct == Catch::Approx( 300.0 ) );

  // the JSON image carries no timestamps, paths or variant text, so
  // re-running the same campaign reproduces it byte for byte
  const nlohmann::json j = report.to_json();
  CHECK( j["config"]["repeats"] == 2 );
  CHECK( j["config"]["master_seed"] == 9 );
  CHECK( j["config"]["strategies"] == nlohmann::json::array( { "and_not", "nand", "nor", "or_not", "random" } ) );
  CHECK( j["config"]["detectors"]["winnow"]["k"] == 5 );
  CHECK( j["config"]["verify"]["sample_count"] == 10000 );
  CHECK( j["summary"]["total_variants"] == 20 );
  CHECK( j["summary"]["equivalent"] == 20 );
  CHECK( j["summary"]["per_strategy"]["nand"]["variants"] == 4 );
  for ( const nlohmann::json& record : j["variants"] )
  {
    CHECK( !record.contains( "verify_reason" ) ); // only present on failures
    CHECK( !record.contains( "variant_source" ) );
    CHECK( record["gate_overhead_pct"].is_number() );
  }

  std::size_t flagged_winnow = 0;
  for ( const variant_record& v : report.variants )
  {
    flagged_winnow += v.detections[0].pirated ? 1 : 0;
  }
  if ( flagged_winnow > 0 )
  {
    CHECK( j["summary"]["per_detector"]["winnow"]["flagged"] == flagged_winnow );
  }

  const std::string dump = j.dump( 2 );
  CHECK( run_campaign( inputs, benchmark_dictionary(), config ).to_json().dump( 2 ) == dump );
  campaign_config threaded = config;
  threaded.threads = 4;
  CHECK( run_campaign( inputs, benchmark_dictionary(), threaded ).to_json().dump( 2 ) == dump );
}

TEST_CASE( "campaign configuration mistakes are caught up front" )
{
  using Catch::Matchers::ContainsSubstring;
  using Catch::Matchers::MessageMatches;
  const std::vector<campaign_input> inputs = { { "c17", nmtest::read_file( nmtest::repo_dir() + "/benchmarks/c17.v" ) } };

  CHECK_THROWS_MATCHES( run_campaign( {}, benchmark_dictionary(), {} ), config_error,
                        MessageMatches( ContainsSubstring( "at least one netlist" ) ) );
  campaign_config no_strategies;
  no_strategies.strategies.clear();
  CHECK_THROWS_MATCHES( run_campaign( inputs, benchmark_dictionary(), no_strategies ), config_error,
                        MessageMatches( ContainsSubstring( "at least one strategy and one repeat" ) ) );
  campaign_config no_repeats;
  no_repeats.repeats = 0;
  CHECK_THROWS_MATCHES( run_campaign( inputs, benchmark_dictionary(), no_repeats ), config_error,
                        MessageMatches( ContainsSubstring( "at least one strategy and one repeat" ) ) );
}
