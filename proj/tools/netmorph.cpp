/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file netmorph.cpp
  \brief Command-line front end for the whole workflow

  Subcommands: characterize, transform, pirate, detect, campaign, verify.
  Exit codes: 0 success (a negative verdict is still a result), 1 usage or
  configuration error, 2 input error (unreadable or invalid files), 3 backend
  transport failure.
*/

#include <netmorph/http_backend.hpp>
#include <netmorph/netmorph.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace
{

using namespace netmorph;

std::string read_text_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
  {
    throw io_error( "cannot open file '" + path + "'" );
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file( const std::string& path, const std::string& content )
{
  std::ofstream out( path, std::ios::binary | std::ios::trunc );
  if ( !out )
  {
    throw io_error( "cannot write file '" + path + "'" );
  }
  out << content;
}

/*! \brief Logical name of a netlist file: the file name without extension. */
std::string file_stem( const std::string& path )
{
  return std::filesystem::path( path ).stem().string();
}

void make_directories( const std::string& path )
{
  std::error_code ec;
  std::filesystem::create_directories( path, ec );
  if ( ec )
  {
    throw io_error( "cannot create directory '" + path + "': " + ec.message() );
  }
}

std::string format_score( double value )
{
  char buffer[32];
  std::snprintf( buffer, sizeof( buffer ), "%.6f", value );
  return buffer;
}

// ---------------------------------------------------------------------------
// characterize
// ---------------------------------------------------------------------------

struct characterize_options
{
  std::vector<std::string> paths;
};

int run_characterize( const characterize_options& options )
{
  std::map<gate_type, std::size_t> counts;
  for ( const std::string& path : options.paths )
  {
    const netlist nl = parse_netlist( read_text_file( path ) );
    for ( const gate_instance& gate : nl.gates )
    {
      ++counts[gate.type()];
    }
  }
  std::printf( "%-8s %6s %6s\n", "operator", "fan_in", "count" );
  for ( const auto& [type, count] : counts )
  {
    std::printf( "%-8s %6u %6zu\n", std::string( to_string( type.op ) ).c_str(), type.fan_in, count );
  }
  return 0;
}

// ---------------------------------------------------------------------------
// backend configuration shared by transform and campaign
// ---------------------------------------------------------------------------

void print_session_lines( const std::vector<session_record>& sessions )
{
  for ( const session_record& session : sessions )
  {
    std::string line = to_string( session.type ) + " over " + to_string( session.allowed ) + ": " + std::string( to_string( session.status ) ) + " after " + std::to_string( session.attempts_used ) + " attempt(s)";
    if ( !session.error.empty() )
    {
      line += " (" + session.error + ")";
    }
    std::cout << line << '\n';
  }
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

struct transform_options
{
  std::vector<std::string> paths;
  backend_config backend;
  unsigned attempts = 5;
  unsigned threads = 1;
  std::string dictionary_path = "dictionary.json";
  std::string transcript_dir;
};

int run_transform( const transform_options& options )
{
  std::vector<netlist> netlists;
  for ( const std::string& path : options.paths )
  {
    netlists.push_back( parse_netlist( read_text_file( path ) ) );
  }
  const std::set<gate_type> types = characterize( netlists );

  const std::unique_ptr<llm_backend> backend = make_backend( options.backend );
  dictionary_build_options build_options;
  build_options.max_attempts = options.attempts;
  build_options.threads = options.threads;
  if ( !options.transcript_dir.empty() )
  {
    make_directories( options.transcript_dir );
    build_options.transcript_dir = options.transcript_dir;
  }
  const dictionary_build_result result = build_dictionary( *backend, types, build_options );

  print_session_lines( result.sessions );
  result.dictionary.save( options.dictionary_path );
  std::cout << "dictionary: " << result.dictionary.size() << " of " << result.sessions.size() << " rewrites verified -> " << options.dictionary_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// pirate
// ---------------------------------------------------------------------------

struct pirate_options
{
  std::string path;
  std::string dictionary_path;
  std::string strategy = "all";
  unsigned repeats = 5;
  uint64_t master_seed = 1;
  std::string out_dir = ".";
};

int run_pirate( const pirate_options& options )
{
  const std::string name = file_stem( options.path );
  const netlist original = parse_netlist( read_text_file( options.path ) );
  const transformation_dictionary dictionary = transformation_dictionary::load( options.dictionary_path );

  std::vector<mapping_strategy> strategies;
  if ( options.strategy == "all" )
  {
    strategies.assign( all_mapping_strategies.begin(), all_mapping_strategies.end() );
  }
  else if ( const auto strategy = mapping_strategy_from_string( options.strategy ) )
  {
    strategies.push_back( *strategy );
  }
  else
  {
    throw config_error( "unknown strategy '" + options.strategy + "' (expected and_not, nand, nor, or_not, random or all)" );
  }

  make_directories( options.out_dir );
  std::size_t equivalent_count = 0, total = 0;
  for ( const mapping_strategy strategy : strategies )
  {
    for ( unsigned repeat = 1; repeat <= options.repeats; ++repeat )
    {
      const uint64_t seed = derive_variant_seed( options.master_seed, name, strategy, repeat );
      const netlist variant = pirate_netlist( original, dictionary, strategy, seed );
      const std::string file = options.out_dir + "/" + name + "_" + std::string( to_string( strategy ) ) + "_" + std::to_string( repeat ) + ".v";
      write_text_file( file, emit_netlist( variant ) );

      const verify_report verdict = verify_equivalence( original, variant );
      ++total;
      equivalent_count += verdict.equivalent ? 1 : 0;
      std::cout << name << ' ' << to_string( strategy ) << ' ' << repeat << ": "
                << ( verdict.equivalent ? "equivalent" : "NOT equivalent" )
                << " (" << ( verdict.exhaustive ? "exhaustive" : "sampled" ) << ", "
                << verdict.vectors_checked << " vectors) -> " << file << '\n';
      if ( !verdict.equivalent )
      {
        std::cout << "  reason: " << verdict.reason << '\n';
      }
    }
  }
  std::cout << total << " variant(s) written to " << options.out_dir << ", " << equivalent_count << " equivalent\n";
  return 0;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct detect_options
{
  std::string original_path;
  std::string candidate_path;
  std::vector<std::string> detectors;
  detector_config config;
  std::string json_path;
};

int run_detect( const detect_options& options )
{
  const std::set<std::string> known = { "winnow", "gst", "overlap", "wlkernel" };
  std::set<std::string> selected( options.detectors.begin(), options.detectors.end() );
  if ( selected.empty() )
  {
    selected = known;
  }
  for ( const std::string& name : selected )
  {
    if ( known.count( name ) == 0 )
    {
      throw config_error( "unknown detector name '" + name + "' (expected winnow, gst, overlap or wlkernel)" );
    }
  }

  const std::string original = read_text_file( options.original_path );
  const std::string candidate = read_text_file( options.candidate_path );
  const std::vector<detector_result> results = run_detectors( original, candidate, options.config );

  std::printf( "%-9s %9s %10s  %s\n", "detector", "score", "threshold", "verdict" );
  for ( const detector_result& result : results )
  {
    if ( selected.count( result.detector ) == 0 )
    {
      continue;
    }
    std::printf( "%-9s %9s %10s  %s\n", result.detector.c_str(), format_score( result.score ).c_str(),
                 format_score( result.threshold ).c_str(), result.pirated ? "pirated" : "clear" );
  }

  if ( !options.json_path.empty() )
  {
    nlohmann::json detections = nlohmann::json::array();
    for ( const detector_result& result : results )
    {
      if ( selected.count( result.detector ) != 0 )
      {
        detections.push_back( { { "detector", result.detector }, { "score", result.score }, { "threshold", result.threshold }, { "pirated", result.pirated } } );
      }
    }

    // match details for inspection: tile spans and shared selected k-grams
    const std::vector<sim_token> tokens_a = tokenize_for_similarity( original, options.config.normalize_identifiers );
    const std::vector<sim_token> tokens_b = tokenize_for_similarity( candidate, options.config.normalize_identifiers );
    nlohmann::json tiles = nlohmann::json::array();
    for ( const tile& t : greedy_string_tiling( tokens_a, tokens_b, options.config.gst_min_match ) )
    {
      tiles.push_back( { { "a_pos", t.a_pos }, { "b_pos", t.b_pos }, { "length", t.length } } );
    }
    const std::vector<uint64_t> fp_a = winnow_fingerprint( tokens_a, options.config.winnow_k, options.config.winnow_window );
    const std::vector<uint64_t> fp_b = winnow_fingerprint( tokens_b, options.config.winnow_k, options.config.winnow_window );
    const std::set<uint64_t> set_a( fp_a.begin(), fp_a.end() ), set_b( fp_b.begin(), fp_b.end() );
    nlohmann::json shared = nlohmann::json::array();
    for ( const uint64_t hash : set_a )
    {
      if ( set_b.count( hash ) != 0 )
      {
        char buffer[19];
        std::snprintf( buffer, sizeof( buffer ), "0x%016llx", static_cast<unsigned long long>( hash ) );
        shared.push_back( buffer );
      }
    }

    nlohmann::json j;
    j["detections"] = std::move( detections );
    j["details"] = { { "gst_tiles", std::move( tiles ) }, { "shared_fingerprints", std::move( shared ) } };
    write_text_file( options.json_path, j.dump( 2 ) + "\n" );
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct verify_options
{
  std::string path_a;
  std::string path_b;
  verify_config config;
};

int run_verify( const verify_options& options )
{
  const netlist a = parse_netlist( read_text_file( options.path_a ) );
  const netlist b = parse_netlist( read_text_file( options.path_b ) );
  const verify_report report = verify_equivalence( a, b, options.config );

  std::cout << "equivalent: " << ( report.equivalent ? "yes" : "no" ) << '\n';
  std::cout << "mode: " << ( report.exhaustive ? "exhaustive" : "sampled" ) << '\n';
  std::cout << "vectors checked: " << report.vectors_checked << '\n';
  if ( !report.reason.empty() )
  {
    std::cout << "reason: " << report.reason << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// campaign
// ---------------------------------------------------------------------------

struct campaign_options
{
  std::string config_path;
  std::string out_dir;                 // empty: timestamped directory
  std::optional<uint64_t> master_seed; // command-line overrides
  std::optional<unsigned> repeats;
  std::optional<unsigned> threads;
  std::optional<std::string> strategies;
};

/*! \brief Everything a campaign file may configure. */
struct campaign_file
{
  std::vector<std::string> netlist_paths;
  backend_config backend;
  std::string dictionary_path; // set: load instead of building
  unsigned attempts = 5;
  campaign_config run;
};

unsigned get_unsigned( const nlohmann::json& j, const char* key, unsigned fallback )
{
  if ( !j.contains( key ) )
  {
    return fallback;
  }
  if ( !j[key].is_number_unsigned() )
  {
    throw config_error( std::string( "campaign config field '" ) + key + "' must be a non-negative integer" );
  }
  return j[key].get<unsigned>();
}

double get_double( const nlohmann::json& j, const char* key, double fallback )
{
  if ( !j.contains( key ) )
  {
    return fallback;
  }
  if ( !j[key].is_number() )
  {
    throw config_error( std::string( "campaign config field '" ) + key + "' must be a number" );
  }
  return j[key].get<double>();
}

std::string get_string( const nlohmann::json& j, const char* key, const std::string& fallback )
{
  if ( !j.contains( key ) )
  {
    return fallback;
  }
  if ( !j[key].is_string() )
  {
    throw config_error( std::string( "campaign config field '" ) + key + "' must be a string" );
  }
  return j[key].get<std::string>();
}

campaign_file parse_campaign_file( const std::string& path )
{
  const nlohmann::json j = nlohmann::json::parse( read_text_file( path ), nullptr, false );
  if ( j.is_discarded() || !j.is_object() )
  {
    throw validation_error( "campaign config '" + path + "' is not a JSON object" );
  }
  const std::set<std::string> known = { "netlists", "backend", "dictionary", "attempts", "strategies",
                                        "repeats", "master_seed", "threads", "detectors", "verify" };
  for ( const auto& [key, value] : j.items() )
  {
    if ( known.count( key ) == 0 )
    {
      throw config_error( "campaign config has unknown field '" + key + "'" );
    }
  }

  campaign_file file;
  if ( j.contains( "netlists" ) )
  {
    if ( !j["netlists"].is_array() )
    {
      throw config_error( "campaign config field 'netlists' must be an array of paths" );
    }
    for ( const nlohmann::json& entry : j["netlists"] )
    {
      if ( !entry.is_string() )
      {
        throw config_error( "campaign config field 'netlists' must contain only strings" );
      }
      // relative paths resolve against the config file's directory
      const std::filesystem::path p = entry.get<std::string>();
      file.netlist_paths.push_back( p.is_absolute() ? p.string() : ( std::filesystem::path( path ).parent_path() / p ).string() );
    }
  }

  if ( j.contains( "backend" ) )
  {
    const nlohmann::json& b = j["backend"];
    if ( !b.is_object() )
    {
      throw config_error( "campaign config field 'backend' must be an object" );
    }
    file.backend.kind = get_string( b, "kind", file.backend.kind );
    file.backend.endpoint = get_string( b, "endpoint", file.backend.endpoint );
    file.backend.model = get_string( b, "model", file.backend.model );
    file.backend.api_key_env = get_string( b, "api_key_env", file.backend.api_key_env );
    file.backend.script_path = get_string( b, "script_path", file.backend.script_path );
    file.backend.max_retries = get_unsigned( b, "max_retries", file.backend.max_retries );
  }
  file.dictionary_path = get_string( j, "dictionary", "" );
  file.attempts = get_unsigned( j, "attempts", file.attempts );

  if ( j.contains( "strategies" ) )
  {
    if ( !j["strategies"].is_array() )
    {
      throw config_error( "campaign config field 'strategies' must be an array of names" );
    }
    file.run.strategies.clear();
    for ( const nlohmann::json& entry : j["strategies"] )
    {
      const auto strategy = mapping_strategy_from_string( entry.is_string() ? entry.get<std::string>() : "" );
      if ( !strategy )
      {
        throw config_error( "campaign config names unknown strategy " + entry.dump() );
      }
      file.run.strategies.push_back( *strategy );
    }
  }
  file.run.repeats = get_unsigned( j, "repeats", file.run.repeats );
  if ( j.contains( "master_seed" ) )
  {
    if ( !j["master_seed"].is_number_unsigned() )
    {
      throw config_error( "campaign config field 'master_seed' must be a non-negative integer" );
    }
    file.run.master_seed = j["master_seed"].get<uint64_t>();
  }
  file.run.threads = get_unsigned( j, "threads", file.run.threads );

  if ( j.contains( "detectors" ) )
  {
    const nlohmann::json& d = j["detectors"];
    detector_config& c = file.run.detectors;
    if ( d.contains( "normalize_identifiers" ) && !d["normalize_identifiers"].is_boolean() )
    {
      throw config_error( "campaign config field 'normalize_identifiers' must be a boolean" );
    }
    c.normalize_identifiers = d.value( "normalize_identifiers", c.normalize_identifiers );
    if ( d.contains( "winnow" ) )
    {
      c.winnow_k = get_unsigned( d["winnow"], "k", c.winnow_k );
      c.winnow_window = get_unsigned( d["winnow"], "window", c.winnow_window );
      c.winnow_threshold = get_double( d["winnow"], "threshold", c.winnow_threshold );
    }
    if ( d.contains( "gst" ) )
    {
      c.gst_min_match = get_unsigned( d["gst"], "min_match", c.gst_min_match );
      c.gst_threshold = get_double( d["gst"], "threshold", c.gst_threshold );
    }
    if ( d.contains( "overlap" ) )
    {
      c.overlap_min_run = get_unsigned( d["overlap"], "min_run", c.overlap_min_run );
      c.overlap_threshold = get_double( d["overlap"], "threshold", c.overlap_threshold );
    }
    if ( d.contains( "wlkernel" ) )
    {
      c.wl_iterations = get_unsigned( d["wlkernel"], "iterations", c.wl_iterations );
      c.wl_threshold = get_double( d["wlkernel"], "threshold", c.wl_threshold );
    }
  }
  if ( j.contains( "verify" ) )
  {
    file.run.verify.input_cap = get_unsigned( j["verify"], "input_cap", file.run.verify.input_cap );
    if ( j["verify"].contains( "sample_count" ) )
    {
      file.run.verify.sample_count = j["verify"]["sample_count"].get<uint64_t>();
    }
    if ( j["verify"].contains( "seed" ) )
    {
      file.run.verify.seed = j["verify"]["seed"].get<uint64_t>();
    }
  }
  return file;
}

std::string timestamped_run_dir()
{
  const std::time_t now = std::time( nullptr );
  std::tm tm_utc{};
  gmtime_r( &now, &tm_utc );
  char buffer[32];
  std::strftime( buffer, sizeof( buffer ), "%Y%m%d-%H%M%S", &tm_utc );
  return std::string( "runs/campaign-" ) + buffer;
}

void print_best_score_table( const campaign_report& report )
{
  // lowest score per detector over all variants of each netlist: the
  // strongest variant is what a detection bar has to beat
  std::printf( "%-14s %12s %12s %12s %12s %10s %10s\n", "netlist", "best_winnow", "best_gst", "best_overlap", "best_wlkernel", "equivalent", "evaded_all" );
  for ( const std::string& name : report.netlists )
  {
    std::map<std::string, double> best;
    std::size_t equivalent = 0, evaded = 0, total = 0;
    for ( const variant_record& v : report.variants )
    {
      if ( v.netlist != name )
      {
        continue;
      }
      ++total;
      equivalent += v.equivalent ? 1 : 0;
      evaded += v.evaded_all ? 1 : 0;
      for ( const detector_result& d : v.detections )
      {
        const auto it = best.find( d.detector );
        if ( it == best.end() || d.score < it->second )
        {
          best[d.detector] = d.score;
        }
      }
    }
    const auto cell = [&]( const char* detector ) {
      return best.count( detector ) != 0 ? format_score( best[detector] ) : std::string( "-" );
    };
    std::printf( "%-14s %12s %12s %12s %12s %7zu/%-2zu %7zu/%-2zu\n", name.c_str(),
                 cell( "winnow" ).c_str(), cell( "gst" ).c_str(), cell( "overlap" ).c_str(), cell( "wlkernel" ).c_str(),
                 equivalent, total, evaded, total );
  }
}

int run_campaign_command( const campaign_options& options )
{
  campaign_file file = parse_campaign_file( options.config_path );
  if ( options.master_seed )
  {
    file.run.master_seed = *options.master_seed;
  }
  if ( options.repeats )
  {
    file.run.repeats = *options.repeats;
  }
  if ( options.threads )
  {
    file.run.threads = *options.threads;
  }
  if ( options.strategies )
  {
    file.run.strategies.clear();
    std::stringstream stream( *options.strategies );
    std::string item;
    while ( std::getline( stream, item, ',' ) )
    {
      const auto strategy = mapping_strategy_from_string( item );
      if ( !strategy )
      {
        throw config_error( "unknown strategy '" + item + "' (expected and_not, nand, nor, or_not or random)" );
      }
      file.run.strategies.push_back( *strategy );
    }
  }

  const std::string run_dir = options.out_dir.empty() ? timestamped_run_dir() : options.out_dir;
  make_directories( run_dir );
  write_text_file( run_dir + "/config.json", read_text_file( options.config_path ) );

  std::vector<campaign_input> inputs;
  for ( const std::string& path : file.netlist_paths )
  {
    inputs.push_back( { file_stem( path ), read_text_file( path ) } );
  }

  if ( inputs.empty() )
  {
    // an empty netlist list is a valid (empty) campaign
    campaign_report empty;
    empty.config = file.run;
    write_text_file( run_dir + "/report.json", empty.to_json().dump( 2 ) + "\n" );
    std::cout << "campaign: no netlists, empty report -> " << run_dir << "/report.json\n";
    return 0;
  }

  transformation_dictionary dictionary;
  if ( !file.dictionary_path.empty() )
  {
    const std::filesystem::path p = file.dictionary_path;
    const std::string resolved = p.is_absolute() ? p.string() : ( std::filesystem::path( options.config_path ).parent_path() / p ).string();
    dictionary = transformation_dictionary::load( resolved );
  }
  else
  {
    std::vector<netlist> parsed;
    for ( const campaign_input& input : inputs )
    {
      parsed.push_back( parse_netlist( input.source ) );
    }
    const std::unique_ptr<llm_backend> backend = make_backend( file.backend );
    dictionary_build_options build_options;
    build_options.max_attempts = file.attempts;
    build_options.threads = file.run.threads;
    build_options.transcript_dir = run_dir + "/transcripts";
    make_directories( build_options.transcript_dir );
    const dictionary_build_result result = build_dictionary( *backend, characterize( parsed ), build_options );
    print_session_lines( result.sessions );
    std::cout << "dictionary: " << result.dictionary.size() << " of " << result.sessions.size() << " rewrites verified\n";
    dictionary = result.dictionary;
  }
  dictionary.save( run_dir + "/dictionary.json" );

  const campaign_report report = run_campaign( inputs, dictionary, file.run );
  write_text_file( run_dir + "/report.json", report.to_json().dump( 2 ) + "\n" );

  const std::string variants_dir = run_dir + "/variants";
  make_directories( variants_dir );
  for ( const variant_record& v : report.variants )
  {
    write_text_file( variants_dir + "/" + v.netlist + "_" + v.strategy + "_" + std::to_string( v.repeat ) + ".v", v.variant_source );
  }

  std::cout << "campaign: " << report.netlists.size() << " netlist(s), " << file.run.strategies.size() << " strategies x " << file.run.repeats << " repeats = " << report.variants.size() << " variants\n";
  print_best_score_table( report );
  std::cout << "report: " << run_dir << "/report.json\n";
  return 0;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "netmorph: rewrite gate-level netlists and score the results" };
  app.require_subcommand( 1 );
  int rc = 0;

  characterize_options characterize_opts;
  CLI::App* characterize_cmd = app.add_subcommand( "characterize", "List the gate types used by one or more netlists" );
  characterize_cmd->add_option( "paths", characterize_opts.paths, "netlist files" )->required();
  characterize_cmd->callback( [&]() { rc = run_characterize( characterize_opts ); } );

  transform_options transform_opts;
  CLI::App* transform_cmd = app.add_subcommand( "transform", "Generate a verified transformation dictionary for the gate types of the given netlists" );
  transform_cmd->add_option( "paths", transform_opts.paths, "netlist files" )->required();
  transform_cmd->add_option( "--backend", transform_opts.backend.kind, "backend kind: oracle, scripted or http" )->capture_default_str();
  transform_cmd->add_option( "--endpoint", transform_opts.backend.endpoint, "http: base URL of a chat-completions service" );
  transform_cmd->add_option( "--model", transform_opts.backend.model, "http: model name" );
  transform_cmd->add_option( "--api-key-env", transform_opts.backend.api_key_env, "http: environment variable holding the API key" )->capture_default_str();
  transform_cmd->add_option( "--script", transform_opts.backend.script_path, "scripted: response file (responses separated by --- lines)" );
  transform_cmd->add_option( "--attempts", transform_opts.attempts, "attempts per session" )->capture_default_str();
  transform_cmd->add_option( "--threads", transform_opts.threads, "parallel sessions (concurrent-safe backends only)" )->capture_default_str();
  transform_cmd->add_option( "--dictionary", transform_opts.dictionary_path, "output dictionary file" )->capture_default_str();
  transform_cmd->add_option( "--transcripts", transform_opts.transcript_dir, "directory for per-session transcripts" );
  transform_cmd->callback( [&]() { rc = run_transform( transform_opts ); } );

  pirate_options pirate_opts;
  CLI::App* pirate_cmd = app.add_subcommand( "pirate", "Rewrite a netlist through a dictionary and verify each variant" );
  pirate_cmd->add_option( "path", pirate_opts.path, "netlist file" )->required();
  pirate_cmd->add_option( "--dictionary", pirate_opts.dictionary_path, "dictionary file" )->required();
  pirate_cmd->add_option( "--strategy", pirate_opts.strategy, "and_not, nand, nor, or_not, random or all" )->capture_default_str();
  pirate_cmd->add_option( "--repeats", pirate_opts.repeats, "variants per strategy" )->capture_default_str();
  pirate_cmd->add_option( "--master-seed", pirate_opts.master_seed, "seed the per-variant seeds derive from" )->capture_default_str();
  pirate_cmd->add_option( "--out", pirate_opts.out_dir, "output directory" )->capture_default_str();
  pirate_cmd->callback( [&]() { rc = run_pirate( pirate_opts ); } );

  detect_options detect_opts;
  CLI::App* detect_cmd = app.add_subcommand( "detect", "Score a candidate netlist against an original with all detectors" );
  detect_cmd->add_option( "original", detect_opts.original_path, "original netlist file" )->required();
  detect_cmd->add_option( "candidate", detect_opts.candidate_path, "candidate netlist file" )->required();
  detect_cmd->add_option( "--detectors", detect_opts.detectors, "subset to report (winnow, gst, overlap, wlkernel)" )->delimiter( ',' );
  detect_cmd->add_flag( "--no-normalize", [&]( std::size_t ) { detect_opts.config.normalize_identifiers = false; }, "compare identifiers verbatim instead of as a class" );
  detect_cmd->add_option( "--winnow-k", detect_opts.config.winnow_k, "winnowing k-gram size" )->capture_default_str();
  detect_cmd->add_option( "--winnow-window", detect_opts.config.winnow_window, "winnowing window size" )->capture_default_str();
  detect_cmd->add_option( "--winnow-threshold", detect_opts.config.winnow_threshold, "winnowing piracy threshold" )->capture_default_str();
  detect_cmd->add_option( "--gst-min-match", detect_opts.config.gst_min_match, "minimum tile length" )->capture_default_str();
  detect_cmd->add_option( "--gst-threshold", detect_opts.config.gst_threshold, "tiling piracy threshold" )->capture_default_str();
  detect_cmd->add_option( "--overlap-min-run", detect_opts.config.overlap_min_run, "minimum shared run length" )->capture_default_str();
  detect_cmd->add_option( "--overlap-threshold", detect_opts.config.overlap_threshold, "overlap piracy threshold" )->capture_default_str();
  detect_cmd->add_option( "--wl-iterations", detect_opts.config.wl_iterations, "label-refinement iterations" )->capture_default_str();
  detect_cmd->add_option( "--wl-threshold", detect_opts.config.wl_threshold, "graph-kernel piracy threshold" )->capture_default_str();
  detect_cmd->add_option( "--json", detect_opts.json_path, "write scores and match details to a JSON file" );
  detect_cmd->callback( [&]() { rc = run_detect( detect_opts ); } );

  verify_options verify_opts;
  CLI::App* verify_cmd = app.add_subcommand( "verify", "Check two netlists for functional equivalence" );
  verify_cmd->add_option( "a", verify_opts.path_a, "first netlist file" )->required();
  verify_cmd->add_option( "b", verify_opts.path_b, "second netlist file" )->required();
  verify_cmd->add_option( "--input-cap", verify_opts.config.input_cap, "exhaustive up to this many inputs" )->capture_default_str();
  verify_cmd->add_option( "--samples", verify_opts.config.sample_count, "sampled vectors beyond the cap" )->capture_default_str();
  verify_cmd->add_option( "--seed", verify_opts.config.seed, "sampling seed" )->capture_default_str();
  verify_cmd->callback( [&]() { rc = run_verify( verify_opts ); } );

  campaign_options campaign_opts;
  uint64_t master_seed_value = 0;
  unsigned repeats_value = 0, threads_value = 0;
  std::string strategies_value;
  CLI::App* campaign_cmd = app.add_subcommand( "campaign", "Run a configured generate/verify/score campaign into a run directory" );
  campaign_cmd->add_option( "--config", campaign_opts.config_path, "campaign configuration file (JSON)" )->required();
  campaign_cmd->add_option( "--out", campaign_opts.out_dir, "run directory (default: runs/campaign-<UTC timestamp>)" );
  CLI::Option* seed_opt = campaign_cmd->add_option( "--master-seed", master_seed_value, "override the configured master seed" );
  CLI::Option* repeats_opt = campaign_cmd->add_option( "--repeats", repeats_value, "override the configured repeat count" );
  CLI::Option* threads_opt = campaign_cmd->add_option( "--threads", threads_value, "override the configured thread count" );
  CLI::Option* strategies_opt = campaign_cmd->add_option( "--strategies", strategies_value, "override the configured strategies (comma-separated)" );
  campaign_cmd->callback( [&]() {
    if ( seed_opt->count() > 0 )
    {
      campaign_opts.master_seed = master_seed_value;
    }
    if ( repeats_opt->count() > 0 )
    {
      campaign_opts.repeats = repeats_value;
    }
    if ( threads_opt->count() > 0 )
    {
      campaign_opts.threads = threads_value;
    }
    if ( strategies_opt->count() > 0 )
    {
      campaign_opts.strategies = strategies_value;
    }
    rc = run_campaign_command( campaign_opts );
  } );

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::ParseError& e )
  {
    const int code = app.exit( e );
    return code == 0 ? 0 : 1;
  }
  catch ( const netmorph::config_error& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  catch ( const netmorph::transport_error& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  catch ( const std::exception& e )
  {
    // parse, validation and io problems are all input errors
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}
