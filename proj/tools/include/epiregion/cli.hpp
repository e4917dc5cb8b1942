/*
* Copyright (C) 2026 The epiregion authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPIREGION_CLI_HPP
#define EPIREGION_CLI_HPP

#include <iosfwd>

namespace epiregion
{

/**
 * Entry point of the epiregion tool. Returns the process exit code:
 * 0 on success, 2 for invalid input, 3 for numerical failures.
 * Errors are written to err as a single JSON object.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace epiregion

#endif // EPIREGION_CLI_HPP
