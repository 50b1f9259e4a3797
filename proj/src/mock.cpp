#include "funcmod/mock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"

namespace funcmod {

namespace {

struct ParsedExample {
    std::vector<std::string> raw_features; // textual cells, position-aligned
    std::string class_label;               // classification
    double y = 0.0;                        // regression
    bool is_query = false;
};

struct ParsedPrompt {
    std::vector<ParsedExample> examples;
    ParsedExample query;
    bool classification = false;
    bool has_query = false;
};

std::optional<double> try_number(const std::string& s) {
    try {
        return parse_double(s);
    } catch (const InvalidData&) {
        return std::nullopt;
    }
}

// "38 years" -> "38"; categorical values pass through whole
std::string value_head(const std::string& s) {
    size_t sp = s.find(' ');
    if (sp == std::string::npos) return s;
    std::string head = s.substr(0, sp);
    return try_number(head) ? head : s;
}

std::vector<std::string> split_str(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

// Parses one rendered data line (after the "example N, " prefix).
ParsedExample parse_body(const std::string& body, bool is_query) {
    ParsedExample ex;
    ex.is_query = is_query;

    if (body.rfind("features: [", 0) == 0) {
        size_t close = body.find(']');
        if (close == std::string::npos) throw MockParseFailure("unterminated feature bracket");
        std::string inner = body.substr(11, close - 11);
        if (!inner.empty())
            for (const auto& tok : split_str(inner, ", ")) ex.raw_features.push_back(tok);
        std::string tail = body.substr(close + 1);
        if (tail.rfind(", ", 0) == 0) tail = tail.substr(2);
        if (is_query) return ex;
        if (tail.rfind("class ", 0) == 0) {
            ex.class_label = tail.substr(6);
        } else if (tail.rfind("y ", 0) == 0) {
            auto v = try_number(tail.substr(2));
            if (!v) throw MockParseFailure("bad regression target '" + tail + "'");
            ex.y = *v;
        } else {
            throw MockParseFailure("unrecognized target clause '" + tail + "'");
        }
        return ex;
    }

    // "name=value, name=value, ..., <target>" form
    std::vector<std::string> tokens = split_str(body, ", ");
    if (tokens.empty()) throw MockParseFailure("empty data line");
    size_t n_feature_tokens = tokens.size();
    if (!is_query) {
        const std::string& last = tokens.back();
        size_t eq = last.find('=');
        if (eq == std::string::npos) {
            ex.class_label = last; // bare level string
            --n_feature_tokens;
        } else {
            auto v = try_number(value_head(last.substr(eq + 1)));
            if (v) {
                ex.y = *v;
                --n_feature_tokens;
            } else {
                throw MockParseFailure("unrecognized target token '" + last + "'");
            }
        }
    } else {
        // query line ends with "name=?"
        if (tokens.back().size() >= 2 && tokens.back().substr(tokens.back().size() - 2) == "=?")
            --n_feature_tokens;
    }
    for (size_t i = 0; i < n_feature_tokens; ++i) {
        size_t eq = tokens[i].find('=');
        if (eq == std::string::npos)
            throw MockParseFailure("feature token without '=': '" + tokens[i] + "'");
        ex.raw_features.push_back(value_head(tokens[i].substr(eq + 1)));
    }
    return ex;
}

ParsedPrompt parse_prompt(const std::string& text) {
    ParsedPrompt out;
    std::istringstream in(text);
    std::string line;
    bool saw_class = false, saw_reg = false;
    while (std::getline(in, line)) {
        bool example = line.rfind("example ", 0) == 0;
        bool kase = line.rfind("case ", 0) == 0;
        if (!example && !kase) continue;
        size_t prefix = example ? 8 : 5;
        size_t comma = line.find(", ", prefix);
        if (comma == std::string::npos) continue;
        std::string tag = line.substr(prefix, comma - prefix);
        std::string body = line.substr(comma + 2);
        if (tag == "x") {
            out.query = parse_body(body, true);
            out.has_query = true;
        } else if (!tag.empty() &&
                   std::all_of(tag.begin(), tag.end(),
                               [](unsigned char c) { return std::isdigit(c) != 0; })) {
            ParsedExample ex = parse_body(body, false);
            (ex.class_label.empty() ? saw_reg : saw_class) = true;
            out.examples.push_back(std::move(ex));
        }
    }
    if (!out.has_query) throw MockParseFailure("no query line found");
    if (out.examples.empty()) throw MockParseFailure("no in-context examples found");
    if (saw_class && saw_reg) throw MockParseFailure("mixed target forms");
    out.classification = saw_class;
    for (const auto& ex : out.examples)
        if (ex.raw_features.size() != out.query.raw_features.size())
            throw MockParseFailure("inconsistent feature arity across lines");
    return out;
}

// Numerize columns over examples + query: numeric columns min-max to [0,1],
// categorical columns by ordinal position in the sorted level set.
std::vector<std::vector<double>> encode(const ParsedPrompt& p) {
    size_t n = p.examples.size();
    size_t d = p.query.raw_features.size();
    std::vector<std::vector<double>> rows(n + 1, std::vector<double>(d, 0.0));
    for (size_t c = 0; c < d; ++c) {
        std::vector<std::string> cells;
        for (const auto& ex : p.examples) cells.push_back(ex.raw_features[c]);
        cells.push_back(p.query.raw_features[c]);

        bool numeric = true;
        std::vector<double> nums;
        for (const auto& cell : cells) {
            auto v = try_number(cell);
            if (!v) {
                numeric = false;
                break;
            }
            nums.push_back(*v);
        }
        if (numeric) {
            double lo = *std::min_element(nums.begin(), nums.end());
            double hi = *std::max_element(nums.begin(), nums.end());
            for (size_t r = 0; r < cells.size(); ++r)
                rows[r][c] = hi > lo ? (nums[r] - lo) / (hi - lo) : 0.5;
        } else {
            std::vector<std::string> levels = cells;
            std::sort(levels.begin(), levels.end());
            levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
            for (size_t r = 0; r < cells.size(); ++r) {
                size_t idx = static_cast<size_t>(
                    std::lower_bound(levels.begin(), levels.end(), cells[r]) - levels.begin());
                rows[r][c] = levels.size() == 1
                                 ? 1.0
                                 : static_cast<double>(idx) / static_cast<double>(levels.size() - 1);
            }
        }
    }
    return rows;
}

std::string answer_for(const ParsedPrompt& p) {
    auto rows = encode(p);
    size_t n = p.examples.size();
    const auto& q = rows[n];

    std::vector<std::pair<double, size_t>> by_distance;
    for (size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (size_t c = 0; c < q.size(); ++c) {
            double diff = rows[i][c] - q[c];
            d2 += diff * diff;
        }
        by_distance.push_back({d2, i});
    }

    if (!p.classification) {
        // 1-NN; ties go to the lower x (first feature), then the earlier row
        size_t best = 0;
        for (size_t i = 1; i < n; ++i) {
            if (by_distance[i].first < by_distance[best].first) {
                best = i;
            } else if (by_distance[i].first == by_distance[best].first) {
                if (rows[i][0] < rows[best][0]) best = i;
            }
        }
        return format_double(p.examples[best].y);
    }

    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t k = std::min<size_t>(3, n);
    std::map<std::string, size_t> votes;
    for (size_t i = 0; i < k; ++i) ++votes[p.examples[by_distance[i].second].class_label];
    size_t best_votes = 0;
    for (const auto& [label, count] : votes) best_votes = std::max(best_votes, count);
    // among tied labels, the nearest neighbor wins
    for (size_t i = 0; i < k; ++i) {
        const std::string& label = p.examples[by_distance[i].second].class_label;
        if (votes[label] == best_votes) return label;
    }
    return p.examples[by_distance[0].second].class_label;
}

const char* kMockRules =
    "1. Predictions follow the closest matching example in the data.\n"
    "2. Distances are measured over the normalized feature values.\n"
    "3. Ties resolve toward the example listed earlier.\n";

} // namespace

LlmResponse mock_complete(const std::string& prompt_text) {
    LlmResponse response;
    response.attempts = 1;

    if (prompt_text.find("features that are jointly most informative") != std::string::npos) {
        // feature-selection prompt: answer with the first k candidates
        size_t anchor = prompt_text.find("The candidate features are: ");
        size_t kpos = prompt_text.find("choose the ");
        if (anchor == std::string::npos || kpos == std::string::npos)
            throw MockParseFailure("selection prompt missing candidate list");
        size_t end = prompt_text.find(".\n", anchor);
        std::string list = prompt_text.substr(anchor + 28, end - anchor - 28);
        std::vector<std::string> names = split_str(list, "; ");
        size_t k = 0;
        std::istringstream ks(prompt_text.substr(kpos + 11));
        ks >> k;
        if (k == 0 || k > names.size()) throw MockParseFailure("bad k in selection prompt");
        std::string joined;
        for (size_t i = 0; i < k; ++i) {
            if (i > 0) joined += ", ";
            joined += names[i];
        }
        response.raw_text = "Considering the candidates in order.\nANSWER: " + joined;
        return response;
    }

    if (prompt_text.find("list the main rules") != std::string::npos) {
        response.raw_text = kMockRules;
        return response;
    }

    ParsedPrompt parsed = parse_prompt(prompt_text);
    std::string answer = answer_for(parsed);
    response.raw_text = "Comparing the query against the provided examples.\nANSWER: " + answer;
    return response;
}

CompleteFn make_mock_backend() {
    return [](const std::string& prompt) { return mock_complete(prompt); };
}

} // namespace funcmod
