// Controlled-English grammar for behavioral instructions. See
// docs/constraint_grammar.md for the covered patterns.

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "bcnav/constraints.hpp"
#include "bcnav/errors.hpp"

namespace bcnav {
namespace {

using Tokens = std::vector<std::string>;

const std::unordered_set<std::string> kNegations = {
    "not", "don't", "dont", "never", "no", "cannot", "can't", "mustn't", "shouldn't", "won't", "non"};

const std::unordered_set<std::string> kLeft = {"left", "leftmost", "left-hand"};
const std::unordered_set<std::string> kRight = {"right", "rightmost", "right-hand"};
const std::unordered_set<std::string> kMiddle = {"middle", "center", "centre", "centerline", "central"};

const std::unordered_set<std::string> kSlow = {"slow", "slowly", "slower", "cautiously", "carefully", "gently"};
const std::unordered_set<std::string> kFast = {"fast",    "quickly",   "quick",   "faster",
                                               "rapidly", "hurry",     "briskly", "accelerate"};
const std::unordered_set<std::string> kNormal = {"normal", "normally", "moderate", "moderately", "regular", "usual"};

const std::unordered_set<std::string> kNonTraversable = {
    "non-traversable", "untraversable", "impassable", "non-passable", "off-limits", "forbidden",
    "avoid",           "avoiding",      "bypass",     "bypassing",    "circumvent", "circumventing"};
const std::unordered_set<std::string> kTraversable = {"traversable", "passable", "traverse", "traversed",
                                                      "through",     "enter",    "entering"};
const std::unordered_set<std::string> kKeepVerbs = {"keep", "stay"};
const std::unordered_set<std::string> kKeepAway = {"off", "away", "out"};
const std::unordered_set<std::string> kOnVerbs = {"walk", "drive", "stay", "travel", "ride", "move"};
const std::unordered_set<std::string> kOnPreps = {"on", "along", "within", "inside", "in"};

const std::unordered_set<std::string> kClauseBreaks = {"and", "then", "but"};

const std::unordered_set<std::string> kStopwords = {
    // determiners and pronouns
    "the", "a", "an", "its", "their", "this", "that", "these", "those", "your", "my", "our", "his", "her",
    "any", "some", "every", "each", "all", "it", "they", "them", "him", "you", "i", "we", "me", "us",
    "yourself", "itself", "there", "here",
    // prepositions and subordinators
    "on", "to", "of", "in", "at", "near", "by", "around", "through", "past", "from", "with", "into", "onto",
    "across", "along", "beside", "besides", "behind", "next", "over", "under", "off", "out", "away", "up",
    "down", "toward", "towards", "when", "while", "if", "before", "after", "whenever", "as", "than", "via",
    "between", "within", "inside", "outside", "upon", "about", "for", "close", "closer", "nearby",
    // verbs
    "pass", "passing", "passes", "overtake", "overtaking", "keep", "keeping", "go", "going", "goes", "walk",
    "walking", "walks", "move", "moving", "moves", "drive", "driving", "stay", "staying", "avoid", "avoiding",
    "bypass", "bypassing", "enter", "entering", "cross", "crossing", "traverse", "traversing", "traversed",
    "approach", "approaching", "approaches", "head", "heading", "proceed", "proceeding", "turn", "turning",
    "slow", "slowing", "speed", "speeding", "use", "using", "travel", "traveling", "travelling", "navigate",
    "navigating", "get", "getting", "remain", "remaining", "stick", "hold", "ride", "riding", "reach",
    "reaching", "be", "is", "are", "was", "were", "being", "been", "can", "could", "should", "must", "may",
    "might", "will", "would", "do", "does", "did", "please", "let", "make", "sure", "try", "come", "coming",
    "run", "running", "hurry", "accelerate",
    // adverbs and cue words
    "slowly", "quickly", "fast", "quick", "faster", "slower", "rapidly", "carefully", "cautiously", "gently",
    "normally", "moderately", "briskly", "always", "only", "just", "also", "very", "too", "really", "again",
    "now", "left", "right", "middle", "center", "centre", "centerline", "central", "side", "sides", "leftmost",
    "rightmost", "left-hand", "right-hand", "pace", "speed", "velocity", "manner", "traversable",
    "non-traversable", "passable", "impassable", "untraversable", "non-passable", "off-limits", "forbidden",
    "normal", "regular", "usual", "moderate",
    // negation
    "not", "no", "never", "don't", "dont", "cannot", "can't", "mustn't", "shouldn't", "won't", "non"};

bool contains_any(const Tokens& toks, const std::unordered_set<std::string>& set) {
  return std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return set.count(t) > 0; });
}

std::string lowercase_ascii(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    // U+2019 right single quotation mark -> apostrophe.
    if (i + 2 < in.size() && static_cast<unsigned char>(in[i]) == 0xE2 &&
        static_cast<unsigned char>(in[i + 1]) == 0x80 && static_cast<unsigned char>(in[i + 2]) == 0x99) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(in[i]))));
  }
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Splits into sentences of tokens. Words keep inner hyphens and apostrophes.
std::vector<Tokens> tokenize(std::string_view text) {
  const std::string s = lowercase_ascii(text);
  std::vector<Tokens> sentences(1);
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (word.size() > 2 && word.ends_with("'s")) word.resize(word.size() - 2);
    sentences.back().push_back(word);
    word.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool joiner = (c == '-' || c == '\'') && !word.empty() && i + 1 < s.size() && is_word_char(s[i + 1]);
    if (is_word_char(c) || joiner) {
      word.push_back(c);
      continue;
    }
    flush();
    if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') {
      if (!sentences.back().empty()) sentences.emplace_back();
    }
  }
  flush();
  if (sentences.back().empty()) sentences.pop_back();
  return sentences;
}

std::vector<Tokens> split_clauses(const Tokens& sentence) {
  std::vector<Tokens> clauses(1);
  for (const auto& tok : sentence) {
    if (kClauseBreaks.count(tok) > 0) {
      if (!clauses.back().empty()) clauses.emplace_back();
      continue;
    }
    clauses.back().push_back(tok);
  }
  if (clauses.back().empty()) clauses.pop_back();
  return clauses;
}

std::string join(const Tokens& toks, std::size_t from = 0, std::size_t to = std::string::npos) {
  std::string out;
  for (std::size_t i = from; i < std::min(to, toks.size()); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

struct Clause {
  std::string text;
  std::string object;
  Direction direction = Direction::Unset;
  Velocity velocity = Velocity::Unset;
  Traversability traversability = Traversability::Unset;
  std::vector<std::string> problems;

  bool has_cue() const {
    return direction != Direction::Unset || velocity != Velocity::Unset ||
           traversability != Traversability::Unset;
  }
};

Clause analyse(const Tokens& toks) {
  Clause c;
  c.text = join(toks);
  const bool negated = contains_any(toks, kNegations);

  std::set<Direction> dirs;
  if (contains_any(toks, kLeft)) dirs.insert(Direction::Left);
  if (contains_any(toks, kRight)) dirs.insert(Direction::Right);
  if (contains_any(toks, kMiddle)) dirs.insert(Direction::Middle);
  if (dirs.size() > 1) {
    c.problems.push_back("conflicting directions in '" + c.text + "'");
  } else if (dirs.size() == 1) {
    c.direction = *dirs.begin();
  }

  std::set<Velocity> vels;
  if (contains_any(toks, kSlow)) vels.insert(Velocity::Slow);
  if (contains_any(toks, kFast)) vels.insert(Velocity::Fast);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i] == "speed" && toks[i + 1] == "up") vels.insert(Velocity::Fast);
  }
  if (contains_any(toks, kNormal)) vels.insert(Velocity::Normal);
  if (vels.size() > 1) {
    c.problems.push_back("conflicting speeds in '" + c.text + "'");
  } else if (vels.size() == 1) {
    c.velocity = *vels.begin();
  }

  bool non_trav_cue = contains_any(toks, kNonTraversable);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (kKeepVerbs.count(toks[i]) && kKeepAway.count(toks[i + 1])) non_trav_cue = true;
  }
  bool trav_cue = contains_any(toks, kTraversable);
  std::size_t lead = 0;
  while (lead < toks.size() && (kNegations.count(toks[lead]) || toks[lead] == "do" || toks[lead] == "please")) ++lead;
  if (lead + 1 < toks.size() && kOnVerbs.count(toks[lead]) && kOnPreps.count(toks[lead + 1])) trav_cue = true;

  if (non_trav_cue) {
    if (negated && !trav_cue) {
      c.problems.push_back("negated avoidance is not supported in '" + c.text + "'");
    } else {
      c.traversability = Traversability::NonTraversable;
    }
  } else if (trav_cue) {
    c.traversability = negated ? Traversability::NonTraversable : Traversability::Traversable;
  }

  if (negated && c.traversability == Traversability::Unset &&
      (c.direction != Direction::Unset || c.velocity != Velocity::Unset)) {
    c.problems.push_back("negated direction or speed is not supported in '" + c.text + "'");
    c.direction = Direction::Unset;
    c.velocity = Velocity::Unset;
  }

  // Object: the first maximal run of content words.
  std::size_t i = 0;
  while (i < toks.size() && kStopwords.count(toks[i])) ++i;
  std::size_t j = i;
  while (j < toks.size() && !kStopwords.count(toks[j])) ++j;
  c.object = join(toks, i, j);
  return c;
}

bool merge_into(ConstraintTuple& into, const ConstraintTuple& from) {
  if ((into.direction != Direction::Unset && from.direction != Direction::Unset) ||
      (into.velocity != Velocity::Unset && from.velocity != Velocity::Unset) ||
      (into.traversability != Traversability::Unset && from.traversability != Traversability::Unset)) {
    return false;
  }
  if (from.direction != Direction::Unset) into.direction = from.direction;
  if (from.velocity != Velocity::Unset) into.velocity = from.velocity;
  if (from.traversability != Traversability::Unset) into.traversability = from.traversability;
  return true;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

}  // namespace

ParseResult parse_instruction(const Instruction& instr) {
  if (is_blank(instr.text)) throw InputError("instruction text is empty");

  ParseResult result;
  for (const Tokens& sentence : tokenize(instr.text)) {
    std::vector<Clause> clauses;
    for (const Tokens& toks : split_clauses(sentence)) clauses.push_back(analyse(toks));

    // Conjoined clauses share an object when one of them omits it
    // ("pass the car on the left and slow down").
    for (std::size_t k = 0; k < clauses.size(); ++k) {
      if (!clauses[k].object.empty() || !clauses[k].has_cue()) continue;
      for (std::size_t d = 1; d < clauses.size(); ++d) {
        if (k + d < clauses.size() && !clauses[k + d].object.empty()) {
          clauses[k].object = clauses[k + d].object;
          break;
        }
        if (k >= d && !clauses[k - d].object.empty()) {
          clauses[k].object = clauses[k - d].object;
          break;
        }
      }
    }

    std::vector<ConstraintTuple> sentence_tuples;
    for (const Clause& c : clauses) {
      result.diagnostics.insert(result.diagnostics.end(), c.problems.begin(), c.problems.end());
      if (!c.has_cue()) {
        if (c.problems.empty()) result.diagnostics.push_back("no behavioral cue recognized in '" + c.text + "'");
        continue;
      }
      if (c.object.empty()) {
        result.diagnostics.push_back("no object referenced in '" + c.text + "'");
        continue;
      }
      ConstraintTuple t{c.object, c.direction, c.velocity, c.traversability, instr.scope, instr.issued_at};
      auto same = std::find_if(sentence_tuples.begin(), sentence_tuples.end(),
                               [&](const ConstraintTuple& o) { return o.object_label == t.object_label; });
      if (same == sentence_tuples.end() || !merge_into(*same, t)) sentence_tuples.push_back(t);
    }
    result.tuples.insert(result.tuples.end(), sentence_tuples.begin(), sentence_tuples.end());
  }
  if (result.tuples.empty() && result.diagnostics.empty()) {
    result.diagnostics.push_back("no behavioral constraint recognized");
  }
  return result;
}

}  // namespace bcnav
