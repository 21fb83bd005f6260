#pragma once

#include <string_view>
#include <vector>

#include "tracemin/contract.hpp"

namespace tracemin {

/**
 * Parse a contract file: one or more 'automaton NAME { ... }' blocks.
 *
 *   automaton library_user {
 *     foreach spawn(client, newClient(C)) key C
 *       attribute stimulus(C, borrowBook(_)) -> C
 *     states s0 s1
 *     bad oops
 *     initial s0
 *     int n = 0
 *     set held
 *     trans s0 -> s1 on receive(C, lend(B)) when !contains(held, B) do add(held, B); n++
 *   }
 *
 * Bad states are implicitly states. Comments start with '#'. Throws
 * ParseError carrying line and column. The result is not validated.
 */
std::vector<ContractAutomaton> parse_contracts(std::string_view text);

/** Parse a single event pattern such as 'receive(C, borrowBook(_))'. */
EventPattern parse_event_pattern(std::string_view text);

}  // namespace tracemin
