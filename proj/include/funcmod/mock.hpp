#pragma once

#include <string>

#include "funcmod/client.hpp"

namespace funcmod {

// Deterministic offline stand-in for a live endpoint. It parses the
// in-context block back out of the prompt text and answers with a nearest-
// neighbor rule: 1-NN for regression (ties: lower x wins) and majority vote
// over the 3 nearest neighbors in numerized feature space for classification.
// Selection prompts get the first k candidates; rules prompts a fixed text.
// Always emits a final "ANSWER: <value>" line.
LlmResponse mock_complete(const std::string& prompt_text);

CompleteFn make_mock_backend();

} // namespace funcmod
