#include "funcmod/extract.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "funcmod/errors.hpp"

namespace funcmod {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// last word-boundary occurrence of `word` in `text` (both lowercase)
std::optional<size_t> last_word_pos(const std::string& text, const std::string& word) {
    if (word.empty()) return std::nullopt;
    std::optional<size_t> found;
    size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !word_char(text[pos - 1]);
        size_t end = pos + word.size();
        bool right_ok = end >= text.size() || !word_char(text[end]);
        if (left_ok && right_ok) found = pos;
        ++pos;
    }
    return found;
}

// number token: optional sign, digits, optional fraction, optional exponent
struct NumberMatch {
    size_t pos = 0;
    size_t len = 0;
    double value = 0;
};

std::optional<NumberMatch> last_number(const std::string& text) {
    std::optional<NumberMatch> found;
    size_t i = 0;
    while (i < text.size()) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        if (start > 0 && (text[start - 1] == '+' || text[start - 1] == '-')) {
            // sign belongs to the number unless glued to a word ("x-1")
            if (start < 2 || !word_char(text[start - 2])) --start;
        }
        size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
            ++j;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
        if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
            size_t k = j + 1;
            if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
            if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                ++k;
                while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                j = k;
            }
        }
        // reject digits glued into words ("v2", "4th")
        bool left_ok = start == 0 || !word_char(text[start - 1]);
        bool right_ok = j >= text.size() || !word_char(text[j]);
        if (left_ok && right_ok) {
            double v = 0;
            auto res = std::from_chars(text.data() + start, text.data() + j, v);
            if (res.ec == std::errc()) found = NumberMatch{start, j - start, v};
        }
        i = j;
    }
    return found;
}

Prediction fail(ExpectKind kind, const std::string& why) {
    Prediction p;
    p.ok = false;
    p.kind = kind;
    p.failure = why;
    return p;
}

Prediction class_prediction(const std::string& label) {
    Prediction p;
    p.ok = true;
    p.kind = ExpectKind::ClassLabel;
    p.label = label;
    return p;
}

Prediction real_prediction(double v) {
    Prediction p;
    p.ok = true;
    p.kind = ExpectKind::Real;
    p.value = v;
    return p;
}

std::optional<std::string> match_label(const std::string& fragment,
                                       const std::vector<std::string>& labels) {
    std::string low = lowercase(fragment);
    std::string exact = trim(low);
    std::vector<const std::string*> hits;
    for (const auto& label : labels) {
        std::string ll = lowercase(label);
        if (exact == ll) return label;
        if (last_word_pos(low, ll)) hits.push_back(&label);
    }
    if (hits.size() == 1) return *hits[0];
    return std::nullopt;
}

} // namespace

Prediction extract(const std::string& raw_text, ExpectKind kind,
                   const std::vector<std::string>& labels) {
    if (kind == ExpectKind::ClassLabel && labels.empty())
        throw InvalidInput("class extraction requires the label set");

    std::string low = lowercase(raw_text);
    size_t anchor = low.rfind("answer:");
    if (anchor != std::string::npos) {
        std::string after = raw_text.substr(anchor + 7);
        // keep only the first line after the anchor
        size_t nl = after.find('\n');
        if (nl != std::string::npos) after = after.substr(0, nl);
        after = trim(after);
        if (kind == ExpectKind::ClassLabel) {
            if (auto label = match_label(after, labels)) return class_prediction(*label);
        } else if (auto num = last_number(after)) {
            return real_prediction(num->value);
        }
        // an explicit answer line that does not parse is a failure; guessing
        // from the surrounding prose would risk a silent wrong parse
        return fail(kind, "ANSWER line present but unparseable: '" + after + "'");
    }

    // fallback: last label mention / last standalone number anywhere
    if (kind == ExpectKind::ClassLabel) {
        std::optional<size_t> best_pos;
        std::string best_label;
        for (const auto& label : labels) {
            if (auto pos = last_word_pos(low, lowercase(label))) {
                if (!best_pos || *pos >= *best_pos) {
                    best_pos = *pos;
                    best_label = label;
                }
            }
        }
        if (best_pos) return class_prediction(best_label);
        return fail(kind, "no class label found in the response");
    }
    if (auto num = last_number(raw_text)) return real_prediction(num->value);
    return fail(kind, "no numeric value found in the response");
}

} // namespace funcmod
