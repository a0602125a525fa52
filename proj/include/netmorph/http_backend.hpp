/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file http_backend.hpp
  \brief Chat backend speaking the OpenAI-compatible /chat/completions protocol

  Kept separate from llm.hpp so that code which never talks to a server does
  not pull in the HTTP client (and, when available, TLS) machinery.
*/

#pragma once

#if __has_include( <openssl/ssl.h> ) && !defined( NETMORPH_NO_TLS )
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include "errors.hpp"
#include "llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

namespace netmorph
{

/*! \brief Talks to any server exposing POST {endpoint}/chat/completions.
 *
 * The API key is read from the environment variable named in the
 * configuration and is never written to disk; leave the variable name empty
 * for servers that need no authentication.  Connection-level failures are
 * retried with exponential backoff; an HTTP error status or a malformed
 * body aborts immediately, since resending the same request would not help.
 */
class http_backend : public llm_backend
{
public:
  explicit http_backend( backend_config config ) : config_( std::move( config ) )
  {
    if ( config_.endpoint.empty() )
    {
      throw config_error( "http backend requires an endpoint URL" );
    }
    split_endpoint( config_.endpoint, base_, path_prefix_ );
    if ( !config_.api_key_env.empty() )
    {
      const char* key = std::getenv( config_.api_key_env.c_str() );
      if ( key == nullptr || *key == '\0' )
      {
        throw config_error( "environment variable '" + config_.api_key_env + "' is not set (expected the API key)" );
      }
      api_key_ = key;
    }
  }

  std::string complete( const conversation& history ) override
  {
    nlohmann::json body;
    body["model"] = config_.model;
    nlohmann::json messages = nlohmann::json::array();
    for ( const chat_message& message : history )
    {
      messages.push_back( { { "role", message.role }, { "content", message.content } } );
    }
    body["messages"] = std::move( messages );
    const std::string payload = body.dump();

    httplib::Client client( base_ );
    client.set_connection_timeout( std::chrono::duration<double>( config_.timeout_s ) );
    client.set_read_timeout( std::chrono::duration<double>( config_.timeout_s ) );
    httplib::Headers headers;
    if ( !api_key_.empty() )
    {
      headers.emplace( "Authorization", "Bearer " + api_key_ );
    }

    httplib::Result result{ nullptr, httplib::Error::Unknown };
    double backoff_s = config_.retry_backoff_s;
    for ( unsigned attempt = 0; attempt <= config_.max_retries; ++attempt )
    {
      if ( attempt > 0 )
      {
        std::this_thread::sleep_for( std::chrono::duration<double>( backoff_s ) );
        backoff_s *= 2.0;
      }
      result = client.Post( path_prefix_ + "/chat/completions", headers, payload, "application/json" );
      if ( result )
      {
        break;
      }
    }
    if ( !result )
    {
      throw transport_error( "connection to " + base_ + " failed after " + std::to_string( config_.max_retries + 1 ) + " attempt(s): " + httplib::to_string( result.error() ) );
    }
    if ( result->status < 200 || result->status >= 300 )
    {
      throw transport_error( "HTTP status " + std::to_string( result->status ) + " from " + base_ + ": " + result->body.substr( 0, 200 ) );
    }
    return parse_reply( result->body );
  }

  std::string id() const override
  {
    return "http:" + ( config_.model.empty() ? base_ : config_.model );
  }

private:
  static void split_endpoint( const std::string& endpoint, std::string& base, std::string& path_prefix )
  {
    const std::size_t scheme = endpoint.find( "://" );
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = endpoint.find( '/', host_start );
    if ( slash == std::string::npos )
    {
      base = endpoint;
      path_prefix.clear();
    }
    else
    {
      base = endpoint.substr( 0, slash );
      path_prefix = endpoint.substr( slash );
      while ( !path_prefix.empty() && path_prefix.back() == '/' )
      {
        path_prefix.pop_back();
      }
    }
  }

  static std::string parse_reply( const std::string& body )
  {
    nlohmann::json reply = nlohmann::json::parse( body, nullptr, false );
    if ( reply.is_discarded() )
    {
      throw transport_error( "response body is not valid JSON: " + body.substr( 0, 200 ) );
    }
    if ( !reply.contains( "choices" ) || !reply["choices"].is_array() || reply["choices"].empty() )
    {
      throw transport_error( "response has no choices: " + body.substr( 0, 200 ) );
    }
    const nlohmann::json& message = reply["choices"][0]["message"];
    if ( !message.contains( "content" ) || !message["content"].is_string() )
    {
      throw transport_error( "response choice has no message content" );
    }
    return message["content"].get<std::string>();
  }

  backend_config config_;
  std::string base_;
  std::string path_prefix_;
  std::string api_key_;
};

/*! \brief Builds the backend named by `config.kind` (oracle, scripted, http). */
inline std::unique_ptr<llm_backend> make_backend( const backend_config& config )
{
  if ( config.kind == "oracle" )
  {
    return std::make_unique<oracle_backend>();
  }
  if ( config.kind == "scripted" )
  {
    if ( config.script_path.empty() )
    {
      throw config_error( "scripted backend requires a script file path" );
    }
    return std::make_unique<scripted_backend>( scripted_backend::from_file( config.script_path ) );
  }
  if ( config.kind == "http" )
  {
    return std::make_unique<http_backend>( config );
  }
  throw config_error( "unknown backend kind '" + config.kind + "' (expected oracle, scripted or http)" );
}

} // namespace netmorph
