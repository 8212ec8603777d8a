#include "panelist/error.hpp"

namespace panelist {

UnscriptedPromptError::UnscriptedPromptError(const std::string& digest)
    : Error("unscripted prompt (digest " + digest + ")"), digest_(digest) {}

}  // namespace panelist
