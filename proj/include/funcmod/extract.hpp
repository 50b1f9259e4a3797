#pragma once

#include <string>
#include <vector>

namespace funcmod {

enum class ExpectKind { ClassLabel, Real };

// Outcome of pulling a prediction out of generated text. A failed extraction
// is a value, not an exception: it is recorded and scored as incorrect.
struct Prediction {
    bool ok = false;
    ExpectKind kind = ExpectKind::Real;
    std::string label;   // class prediction
    double value = 0.0;  // real prediction
    std::string failure; // reason when ok == false
};

// Scans for the last "ANSWER: <value>" line; falls back to the last class
// label (word-boundary match) or last standalone number in the text.
Prediction extract(const std::string& raw_text, ExpectKind kind,
                   const std::vector<std::string>& labels = {});

} // namespace funcmod
