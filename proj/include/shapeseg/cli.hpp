/* Copyright 2026 The shapeseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shapeseg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Runs the command line tool. `args` excludes the program name. Errors are
// reported on `err` as a single line starting with "shapeseg: error[validation]:"
// or "shapeseg: error[io]:".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shapeseg
