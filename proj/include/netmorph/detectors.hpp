/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file detectors.hpp
  \brief Similarity detectors a rewritten netlist is evaluated against

  Four detectors, named by mechanism:

  - `winnow`:   winnowed token-gram fingerprints (document-fingerprint style)
  - `gst`:      greedy string tiling over the token streams
  - `overlap`:  share of the original token stream covered by common runs
  - `wlkernel`: Weisfeiler-Lehman subtree kernel on the gate graphs

  The first three work on a shared token stream in which identifiers are
  normalized away by default, so pure renaming does not lower any score.
  Each detector pairs its score with a threshold; a candidate counts as
  detected when score >= threshold, and a rewrite evades the suite when no
  detector fires.
*/

#pragma once

#include "common.hpp"
#include "errors.hpp"
#include "netlist.hpp"
#include "ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace netmorph
{

// ---------------------------------------------------------------------------
// shared tokenizer
// ---------------------------------------------------------------------------

enum class token_class : uint8_t
{
  keyword,    // module, endmodule, input, output, wire
  gate_kw,    // and, or, nand, nor, xor, xnor, not, buf
  identifier, // everything else alphabetic (normalized to "ID" by default)
  number,     // 1'b0, 42, ...
  punct       // single punctuation characters
};

struct sim_token
{
  token_class cls{ token_class::punct };
  std::string lexeme;

  bool operator==( const sim_token& ) const = default;
};

/*! \brief Lexes Verilog source into the detector token stream.
 *
 * Comments are stripped first.  With `normalize_identifiers` every
 * identifier lexeme becomes "ID", which makes the text detectors blind to
 * renaming and sensitive only to structure; keywords, gate names, numbers
 * and punctuation keep their spelling.
 */
inline std::vector<sim_token> tokenize_for_similarity( std::string_view source, bool normalize_identifiers = true )
{
  static const std::unordered_set<std::string> keywords = { "module", "endmodule", "input", "output", "wire" };

  const std::string clean = detail::strip_comments( source );
  std::vector<sim_token> tokens;
  for ( const detail::nl_token& raw : detail::lex_netlist( clean ) )
  {
    switch ( raw.k )
    {
    case detail::nl_token::kind::ident:
      if ( keywords.count( raw.text ) != 0 )
      {
        tokens.push_back( { token_class::keyword, raw.text } );
      }
      else if ( detail::gate_keyword( raw.text ).has_value() )
      {
        tokens.push_back( { token_class::gate_kw, raw.text } );
      }
      else
      {
        tokens.push_back( { token_class::identifier, normalize_identifiers ? std::string( "ID" ) : raw.text } );
      }
      break;
    case detail::nl_token::kind::number:
      tokens.push_back( { token_class::number, raw.text } );
      break;
    case detail::nl_token::kind::punct:
      tokens.push_back( { token_class::punct, raw.text } );
      break;
    case detail::nl_token::kind::eof:
      break;
    }
  }
  return tokens;
}

namespace detail
{

inline uint64_t mix_token( const sim_token& token, uint64_t state )
{
  state = fnv1a64_byte( static_cast<uint8_t>( token.cls ), state );
  state = fnv1a64( token.lexeme, state );
  return fnv1a64_byte( 0xFFu, state );
}

/*! \brief FNV-1a hash of the k tokens starting at `pos`. */
inline uint64_t gram_hash( const std::vector<sim_token>& tokens, std::size_t pos, unsigned k )
{
  uint64_t state = fnv1a64_offset_basis;
  for ( unsigned i = 0; i < k; ++i )
  {
    state = mix_token( tokens[pos + i], state );
  }
  return state;
}

} // namespace detail

// ---------------------------------------------------------------------------
// winnowed fingerprints
// ---------------------------------------------------------------------------

/*! \brief Selected k-gram hashes: the minimum of each length-`window` window
 * of consecutive gram hashes, taking the rightmost minimum on ties.  Streams
 * shorter than k yield an empty fingerprint.
 */
inline std::vector<uint64_t> winnow_fingerprint( const std::vector<sim_token>& tokens, unsigned k, unsigned window )
{
  if ( k == 0 || window == 0 )
  {
    throw config_error( "winnowing requires k > 0 and window > 0" );
  }
  if ( tokens.size() < k )
  {
    return {};
  }
  const std::size_t gram_count = tokens.size() - k + 1;
  std::vector<uint64_t> grams( gram_count );
  for ( std::size_t i = 0; i < gram_count; ++i )
  {
    grams[i] = detail::gram_hash( tokens, i, k );
  }

  std::vector<uint64_t> selected;
  const std::size_t w = std::min<std::size_t>( window, gram_count );
  std::size_t last_pick = gram_count; // sentinel: nothing picked yet
  for ( std::size_t start = 0; start + w <= gram_count; ++start )
  {
    std::size_t best = start;
    for ( std::size_t i = start + 1; i < start + w; ++i )
    {
      if ( grams[i] <= grams[best] ) // rightmost minimum wins ties
      {
        best = i;
      }
    }
    if ( best != last_pick )
    {
      selected.push_back( grams[best] );
      last_pick = best;
    }
  }
  return selected;
}

/*! \brief Fingerprint overlap: |A ∩ B| / max(|A|, |B|) over distinct hashes.
 *
 * When both streams are too short to fingerprint the score degenerates to
 * exact comparison: 1 for identical token streams, 0 otherwise.
 */
inline double winnow_similarity( const std::vector<sim_token>& a, const std::vector<sim_token>& b, unsigned k = 5, unsigned window = 4 )
{
  const std::vector<uint64_t> fp_a = winnow_fingerprint( a, k, window );
  const std::vector<uint64_t> fp_b = winnow_fingerprint( b, k, window );
  const std::unordered_set<uint64_t> set_a( fp_a.begin(), fp_a.end() );
  const std::unordered_set<uint64_t> set_b( fp_b.begin(), fp_b.end() );
  if ( set_a.empty() && set_b.empty() )
  {
    return a == b ? 1.0 : 0.0;
  }
  if ( set_a.empty() || set_b.empty() )
  {
    return 0.0;
  }
  std::size_t common = 0;
  for ( const uint64_t h : set_a )
  {
    common += set_b.count( h );
  }
  return static_cast<double>( common ) / static_cast<double>( std::max( set_a.size(), set_b.size() ) );
}

// ---------------------------------------------------------------------------
// greedy string tiling
// ---------------------------------------------------------------------------

struct tile
{
  std::size_t a_pos{ 0 };
  std::size_t b_pos{ 0 };
  std::size_t length{ 0 };

  bool operator==( const tile& ) const = default;
};

/*! \brief Greedy string tiling: repeatedly finds the longest common run of
 * unmarked tokens (first-found among equals), marks it in both streams, and
 * stops when no run of at least `min_match` tokens is left.
 */
inline std::vector<tile> greedy_string_tiling( const std::vector<sim_token>& a, const std::vector<sim_token>& b, unsigned min_match )
{
  if ( min_match == 0 )
  {
    throw config_error( "greedy string tiling requires min_match > 0" );
  }

  // intern tokens so the hot loops compare integers instead of strings
  std::map<std::pair<token_class, std::string_view>, int> ids;
  const auto intern = [&]( const std::vector<sim_token>& tokens ) {
    std::vector<int> out( tokens.size() );
    for ( std::size_t i = 0; i < tokens.size(); ++i )
    {
      out[i] = ids.emplace( std::pair{ tokens[i].cls, std::string_view( tokens[i].lexeme ) }, static_cast<int>( ids.size() ) ).first->second;
    }
    return out;
  };
  const std::vector<int> ia = intern( a );
  const std::vector<int> ib = intern( b );

  // ascending positions of every token id in b, so each pass only visits
  // equal-token pairs
  std::vector<std::vector<std::size_t>> b_positions( ids.size() );
  for ( std::size_t j = 0; j < ib.size(); ++j )
  {
    b_positions[ib[j]].push_back( j );
  }

  std::vector<bool> marked_a( a.size(), false );
  std::vector<bool> marked_b( b.size(), false );
  std::vector<tile> tiles;

  while ( true )
  {
    std::size_t max_len = min_match - 1;
    std::vector<tile> matches;
    for ( std::size_t i = 0; i < ia.size(); ++i )
    {
      if ( marked_a[i] )
      {
        continue;
      }
      for ( const std::size_t j : b_positions[ia[i]] )
      {
        if ( marked_b[j] )
        {
          continue;
        }
        // skip non-left-maximal starts; the run was or will be found at its start
        if ( i > 0 && j > 0 && !marked_a[i - 1] && !marked_b[j - 1] && ia[i - 1] == ib[j - 1] )
        {
          continue;
        }
        std::size_t len = 0;
        while ( i + len < ia.size() && j + len < ib.size() && !marked_a[i + len] && !marked_b[j + len] && ia[i + len] == ib[j + len] )
        {
          ++len;
        }
        if ( len > max_len )
        {
          max_len = len;
          matches.clear();
        }
        if ( len == max_len && len >= min_match )
        {
          matches.push_back( { i, j, len } );
        }
      }
    }
    if ( matches.empty() )
    {
      break;
    }
    for ( const tile& m : matches )
    {
      bool occluded = false;
      for ( std::size_t t = 0; t < m.length && !occluded; ++t )
      {
        occluded = marked_a[m.a_pos + t] || marked_b[m.b_pos + t];
      }
      if ( occluded )
      {
        continue; // re-found in a later round if a long-enough piece is left
      }
      for ( std::size_t t = 0; t < m.length; ++t )
      {
        marked_a[m.a_pos + t] = true;
        marked_b[m.b_pos + t] = true;
      }
      tiles.push_back( m );
    }
  }
  return tiles;
}

namespace detail
{

inline std::size_t tiled_token_count( const std::vector<tile>& tiles )
{
  std::size_t total = 0;
  for ( const tile& t : tiles )
  {
    total += t.length;
  }
  return total;
}

} // namespace detail

/*! \brief Tiling similarity: 2 * matched / (|a| + |b|); 1 when both streams
 * are empty.
 */
inline double tiling_similarity( const std::vector<sim_token>& a, const std::vector<sim_token>& b, unsigned min_match = 5 )
{
  if ( a.empty() && b.empty() )
  {
    return 1.0;
  }
  const std::size_t matched = detail::tiled_token_count( greedy_string_tiling( a, b, min_match ) );
  return 2.0 * static_cast<double>( matched ) / static_cast<double>( a.size() + b.size() );
}

/*! \brief Coverage of the *original* stream by common runs:
 * matched / |original|; 1 when both streams are empty.
 */
inline double overlap_similarity( const std::vector<sim_token>& original, const std::vector<sim_token>& candidate, unsigned min_run = 4 )
{
  if ( original.empty() )
  {
    return candidate.empty() ? 1.0 : 0.0;
  }
  const std::size_t matched = detail::tiled_token_count( greedy_string_tiling( original, candidate, min_run ) );
  return static_cast<double>( matched ) / static_cast<double>( original.size() );
}

// ---------------------------------------------------------------------------
// Weisfeiler-Lehman subtree kernel on the gate graph
// ---------------------------------------------------------------------------

namespace detail
{

struct wl_graph
{
  std::vector<std::string> labels;       // initial node labels
  std::vector<std::vector<int>> in_adj;  // predecessor node ids
  std::vector<std::vector<int>> out_adj; // successor node ids
};

/*! \brief Directed gate graph: a node per gate (labeled by its operator),
 * per source net (labeled "input" or "const") and per output port (labeled
 * "output"); edges run from driver to consumer.
 */
inline wl_graph build_wl_graph( const netlist& nl )
{
  wl_graph g;
  const auto add_node = [&]( std::string label ) {
    g.labels.push_back( std::move( label ) );
    g.in_adj.emplace_back();
    g.out_adj.emplace_back();
    return static_cast<int>( g.labels.size() ) - 1;
  };
  const auto add_edge = [&]( int from, int to ) {
    g.out_adj[from].push_back( to );
    g.in_adj[to].push_back( from );
  };

  std::unordered_map<std::string, int> driver_of;
  for ( const gate_instance& gate : nl.gates )
  {
    driver_of[gate.output] = add_node( std::string( verilog_name( gate.op ) ) );
  }

  // nets that are consumed but not driven by a parsed gate become sources
  const auto source_node = [&]( const std::string& net ) {
    const auto it = driver_of.find( net );
    if ( it != driver_of.end() )
    {
      return it->second;
    }
    const int node = add_node( is_constant_net( net ) ? "const" : "input" );
    driver_of.emplace( net, node );
    return node;
  };

  for ( std::size_t i = 0; i < nl.gates.size(); ++i )
  {
    for ( const std::string& net : nl.gates[i].inputs )
    {
      add_edge( source_node( net ), static_cast<int>( i ) );
    }
  }
  for ( const port& p : nl.ports )
  {
    if ( p.direction == port_direction::output )
    {
      const int driver = source_node( p.name );
      add_edge( driver, add_node( "output" ) );
    }
  }
  return g;
}

class label_intern
{
public:
  int intern( const std::string& label )
  {
    const auto [it, inserted] = ids_.emplace( label, static_cast<int>( ids_.size() ) );
    (void)inserted;
    return it->second;
  }

private:
  std::unordered_map<std::string, int> ids_;
};

/*! \brief Accumulates the label histogram of iterations 0..T into `features`. */
inline void wl_features( const wl_graph& g, unsigned iterations, label_intern& intern, std::map<int, double>& features )
{
  std::vector<int> current( g.labels.size() );
  for ( std::size_t v = 0; v < g.labels.size(); ++v )
  {
    current[v] = intern.intern( g.labels[v] );
    features[current[v]] += 1.0;
  }
  for ( unsigned round = 0; round < iterations; ++round )
  {
    std::vector<int> next( current.size() );
    for ( std::size_t v = 0; v < current.size(); ++v )
    {
      std::vector<int> in_labels, out_labels;
      for ( const int u : g.in_adj[v] )
      {
        in_labels.push_back( current[u] );
      }
      for ( const int u : g.out_adj[v] )
      {
        out_labels.push_back( current[u] );
      }
      std::sort( in_labels.begin(), in_labels.end() );
      std::sort( out_labels.begin(), out_labels.end() );
      std::string signature = std::to_string( current[v] ) + "<";
      for ( const int l : in_labels )
      {
        signature += std::to_string( l ) + ",";
      }
      signature += ">";
      for ( const int l : out_labels )
      {
        signature += std::to_string( l ) + ",";
      }
      next[v] = intern.intern( signature );
      features[next[v]] += 1.0;
    }
    current = std::move( next );
  }
}

inline double cosine( const std::map<int, double>& a, const std::map<int, double>& b )
{
  if ( a == b )
  {
    return 1.0; // identical feature vectors score exactly one
  }
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for ( const auto& [key, value] : a )
  {
    norm_a += value * value;
    const auto it = b.find( key );
    if ( it != b.end() )
    {
      dot += value * it->second;
    }
  }
  for ( const auto& [key, value] : b )
  {
    norm_b += value * value;
  }
  if ( norm_a == 0.0 || norm_b == 0.0 )
  {
    return 0.0;
  }
  return std::clamp( dot / std::sqrt( norm_a * norm_b ), 0.0, 1.0 );
}

} // namespace detail

/*! \brief Cosine-normalized Weisfeiler-Lehman subtree kernel between the
 * gate graphs of two netlists, using iterations 0..`iterations`.
 */
inline double wl_kernel_similarity( const netlist& a, const netlist& b, unsigned iterations = 3 )
{
  detail::label_intern intern;
  std::map<int, double> features_a, features_b;
  detail::wl_features( detail::build_wl_graph( a ), iterations, intern, features_a );
  detail::wl_features( detail::build_wl_graph( b ), iterations, intern, features_b );
  return detail::cosine( features_a, features_b );
}

// ---------------------------------------------------------------------------
// detector suite
// ---------------------------------------------------------------------------

struct detector_config
{
  bool normalize_identifiers = true;

  unsigned winnow_k = 5;
  unsigned winnow_window = 4;
  double winnow_threshold = 0.2;

  unsigned gst_min_match = 5;
  double gst_threshold = 0.3;

  unsigned overlap_min_run = 4;
  double overlap_threshold = 0.3;

  unsigned wl_iterations = 3;
  double wl_threshold = 0.5;
};

struct detector_result
{
  std::string detector;
  double score{ 0.0 };
  double threshold{ 0.0 };
  bool pirated{ false }; // score >= threshold

  bool operator==( const detector_result& ) const = default;
};

/*! \brief Runs all four detectors on two netlist sources (original first).
 * The token detectors compare the raw texts; the graph kernel compares the
 * parsed netlists.
 */
inline std::vector<detector_result> run_detectors( const std::string& original_source, const std::string& candidate_source, const detector_config& config = {} )
{
  const std::vector<sim_token> tokens_a = tokenize_for_similarity( original_source, config.normalize_identifiers );
  const std::vector<sim_token> tokens_b = tokenize_for_similarity( candidate_source, config.normalize_identifiers );
  const netlist graph_a = parse_netlist( original_source );
  const netlist graph_b = parse_netlist( candidate_source );

  std::vector<detector_result> results;
  const auto add = [&]( std::string name, double score, double threshold ) {
    results.push_back( { std::move( name ), score, threshold, score >= threshold } );
  };
  add( "winnow", winnow_similarity( tokens_a, tokens_b, config.winnow_k, config.winnow_window ), config.winnow_threshold );
  add( "gst", tiling_similarity( tokens_a, tokens_b, config.gst_min_match ), config.gst_threshold );
  add( "overlap", overlap_similarity( tokens_a, tokens_b, config.overlap_min_run ), config.overlap_threshold );
  add( "wlkernel", wl_kernel_similarity( graph_a, graph_b, config.wl_iterations ), config.wl_threshold );
  return results;
}

/*! \brief True when no detector in `results` flagged the candidate. */
inline bool evades_all( const std::vector<detector_result>& results )
{
  return std::none_of( results.begin(), results.end(), []( const detector_result& r ) { return r.pirated; } );
}

} // namespace netmorph
