/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file common.hpp
  \brief Small shared utilities: hashing, stable RNG helpers, string helpers
*/

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace netmorph
{

inline constexpr uint64_t fnv1a64_offset_basis = 14695981039346656037ull;
inline constexpr uint64_t fnv1a64_prime = 1099511628211ull;

inline uint64_t fnv1a64_byte( uint8_t byte, uint64_t state = fnv1a64_offset_basis )
{
  state ^= byte;
  state *= fnv1a64_prime;
  return state;
}

inline uint64_t fnv1a64( std::string_view bytes, uint64_t state = fnv1a64_offset_basis )
{
  for ( unsigned char c : bytes )
  {
    state = fnv1a64_byte( c, state );
  }
  return state;
}

/*! \brief Uniform index in [0, n) with a platform-stable draw sequence.
 *
 * std::uniform_int_distribution is implementation-defined, which would break
 * byte-identical reports across standard libraries; rejection sampling over
 * the raw mt19937_64 stream is stable everywhere.
 */
inline std::size_t uniform_index( std::mt19937_64& rng, std::size_t n )
{
  if ( n <= 1 )
  {
    return 0;
  }
  const uint64_t limit = UINT64_MAX - ( UINT64_MAX % n );
  uint64_t draw = rng();
  while ( draw >= limit )
  {
    draw = rng();
  }
  return static_cast<std::size_t>( draw % n );
}

inline std::string_view trim_view( std::string_view s )
{
  const auto not_space = []( char c ) { return c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != '\f' && c != '\v'; };
  std::size_t b = 0;
  while ( b < s.size() && !not_space( s[b] ) )
  {
    ++b;
  }
  std::size_t e = s.size();
  while ( e > b && !not_space( s[e - 1] ) )
  {
    --e;
  }
  return s.substr( b, e - b );
}

inline std::vector<std::string_view> split_lines( std::string_view text )
{
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while ( begin <= text.size() )
  {
    const std::size_t nl = text.find( '\n', begin );
    if ( nl == std::string_view::npos )
    {
      lines.push_back( text.substr( begin ) );
      break;
    }
    lines.push_back( text.substr( begin, nl - begin ) );
    begin = nl + 1;
  }
  return lines;
}

inline std::string to_lower_copy( std::string_view s )
{
  std::string out( s );
  for ( char& c : out )
  {
    if ( c >= 'A' && c <= 'Z' )
    {
      c = static_cast<char>( c - 'A' + 'a' );
    }
  }
  return out;
}

namespace detail
{

inline bool is_ident_start( char c )
{
  return ( c >= 'a' && c <= 'z' ) || ( c >= 'A' && c <= 'Z' ) || c == '_';
}

inline bool is_ident_char( char c )
{
  return is_ident_start( c ) || ( c >= '0' && c <= '9' );
}

} // namespace detail

template<typename Range>
std::string join( const Range& items, std::string_view sep )
{
  std::string out;
  bool first = true;
  for ( const auto& item : items )
  {
    if ( !first )
    {
      out += sep;
    }
    out += item;
    first = false;
  }
  return out;
}

} // namespace netmorph
