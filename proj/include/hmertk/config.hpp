#pragma once

#include <string>

#include "hmertk/editops.hpp"
#include "hmertk/normalize.hpp"

namespace hmertk {

// Normalization config file: UTF-8, '#' comments, INI-style sections.
//
//   [aliases]
//   \le = \leq
//
//   [strip_styles]
//   \textbf
//
//   [remove_tokens]
//   \underline { \quad }
//
//   [vocabulary]
//   \customword
//
// Section contents REPLACE the built-in default for that section; omitted
// sections keep the defaults. Throws ConfigError on malformed lines or alias
// chains longer than one step.
NormalizationConfig load_normalization_config(const std::string& path);

// Injection config file, same syntax:
//
//   [pairs]
//   2 z
//   0 o
//
//   [probabilities]
//   substitute = 0.6
//   delete = 0.2
//   insert = 0.2
//
//   [limits]
//   max_edits = 1
//   confusion_only = false
//
// The seed is not part of the file; it comes from the caller.
editops::InjectionConfig load_injection_config(const std::string& path);

}  // namespace hmertk
