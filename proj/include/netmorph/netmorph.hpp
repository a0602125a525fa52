/* netmorph: gate-level netlist rewriting and similarity analysis
 * Distributed under the MIT license (see LICENSE)
 */

/*!
  \file netmorph.hpp
  \brief Umbrella header

  Pulls in everything except the HTTP chat backend; include
  netmorph/http_backend.hpp separately when talking to a live server, so
  that programs which never do stay free of the HTTP client dependency.
*/

#pragma once

#include "boolexpr.hpp"
#include "common.hpp"
#include "detectors.hpp"
#include "errors.hpp"
#include "llm.hpp"
#include "netlist.hpp"
#include "ops.hpp"
#include "pipeline.hpp"
#include "translate.hpp"
