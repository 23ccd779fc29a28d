#include "latparse/synth.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "latparse/error.hpp"
#include "latparse/random.hpp"

namespace latparse {

namespace {

// No prefix letter (b, h, l, m, w) may appear here.
constexpr std::string_view kStemLetters = "adegiknoprstuyz";

const std::array<std::string, 2> kGenders{"Masc", "Fem"};
const std::array<std::string, 2> kNumbers{"Sing", "Plur"};
const std::array<std::string, 3> kPersons{"1", "2", "3"};

class FormMaker {
 public:
  explicit FormMaker(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    while (true) {
      const std::size_t len = 3 + rng_.index(3);
      std::string form;
      for (std::size_t i = 0; i < len; ++i) form += kStemLetters[rng_.index(kStemLetters.size())];
      if (used_.insert(form).second) return form;
    }
  }

 private:
  Rng rng_;
  std::set<std::string> used_;
};

FeatureList feats(const std::string& gender, const std::string& number, const std::string& person = {}) {
  FeatureList f{{"Gender", gender}, {"Number", number}};
  if (!person.empty()) f.emplace_back("Person", person);
  return f;
}

bool agrees(const SynthWord& a, const SynthWord& b, std::string_view key) {
  return feature_value(a.feats, key) == feature_value(b.feats, key);
}

std::string person_of(const SynthWord& w) {
  const auto p = feature_value(w.feats, "Person");
  return p ? std::string(*p) : std::string("3");
}

}  // namespace

SynthGrammar make_grammar(double ambiguity, std::uint64_t seed, std::size_t stems) {
  if (!(ambiguity >= 0.0 && ambiguity <= 1.0)) throw UsageError("ambiguity must be in [0, 1]");
  if (stems == 0) throw UsageError("synthetic vocabulary needs at least one stem per class");
  SynthGrammar g;
  g.ambiguity = ambiguity;
  g.seed = seed;
  g.vocab_seed = seed;
  FormMaker maker(mix_seed(seed, 0x766f636162ull));

  for (std::size_t i = 0; i < stems; ++i) {
    g.nouns.push_back({maker.next(), "NOUN", feats(kGenders[i % 2], kNumbers[(i / 2) % 2])});
  }
  for (const auto& person : kPersons) {
    for (const auto& gender : kGenders) {
      for (const auto& number : kNumbers) g.pronouns.push_back({maker.next(), "PRON", feats(gender, number, person)});
    }
  }
  const std::size_t per_combo = std::max<std::size_t>(1, stems / 4);
  for (std::size_t k = 0; k < per_combo; ++k) {
    for (const auto& gender : kGenders) {
      for (const auto& number : kNumbers) g.adjectives.push_back({maker.next(), "ADJ", feats(gender, number)});
    }
  }
  const std::size_t verbs_per_combo = std::max<std::size_t>(1, stems / 6);
  for (std::size_t k = 0; k < verbs_per_combo; ++k) {
    for (const auto& person : kPersons) {
      for (const auto& gender : kGenders) {
        for (const auto& number : kNumbers) g.verbs.push_back({maker.next(), "VERB", feats(gender, number, person)});
      }
    }
  }
  g.adpositions = {{"b", "ADP", {}}, {"l", "ADP", {}}, {"m", "ADP", {}}};
  g.article = {"h", "DET", {}};
  g.conjunction = {"w", "CCONJ", {}};
  return g;
}

// ---------------------------------------------------------------------------

namespace {

struct Word {
  const SynthWord* word;
  int head;  // index into the word list, -1 for the root
  std::string deprel;
};

struct Plan {
  std::vector<Word> words;
  std::vector<std::vector<int>> tokens;  // surface order; word indices in order
  std::vector<bool> fused;

  int add(const SynthWord& w, int head, std::string deprel) {
    words.push_back({&w, head, std::move(deprel)});
    return static_cast<int>(words.size()) - 1;
  }
  void token(std::vector<int> ids, bool is_fused) {
    tokens.push_back(std::move(ids));
    fused.push_back(is_fused);
  }
};

template <typename Pred>
const SynthWord& pick(const std::vector<SynthWord>& pool, Rng& rng, Pred ok) {
  std::vector<const SynthWord*> match;
  for (const auto& w : pool) {
    if (ok(w)) match.push_back(&w);
  }
  if (match.empty()) return pool[rng.index(pool.size())];
  return *match[rng.index(match.size())];
}

class SentenceSampler {
 public:
  SentenceSampler(const SynthGrammar& g, Rng& rng) : g_(g), rng_(rng) {}

  Plan sample() {
    plan_ = Plan{};
    const SynthWord* subject = nullptr;
    const bool has_subject = rng_.bernoulli(0.8);
    if (has_subject) {
      subject = rng_.bernoulli(0.3) ? &g_.pronouns[rng_.index(g_.pronouns.size())]
                                    : &g_.nouns[rng_.index(g_.nouns.size())];
    }
    const SynthWord& verb = agreeing_verb(subject);
    const int root = plan_.add(verb, -1, "root");
    if (subject != nullptr) noun_phrase(*subject, root, "nsubj", nullptr, 1);
    plan_.token({root}, false);
    if (rng_.bernoulli(0.7)) noun_phrase(random_noun(), root, "obj", nullptr, 1);
    if (rng_.bernoulli(0.5)) noun_phrase(random_noun(), root, "obl", &random_adp(), 1);
    if (rng_.bernoulli(0.25)) {
      const SynthWord& verb2 = agreeing_verb(subject);
      const int v2 = plan_.add(verb2, root, "conj");
      const int cc = plan_.add(g_.conjunction, v2, "cc");
      if (rng_.bernoulli(g_.ambiguity)) {
        plan_.token({cc, v2}, true);
      } else {
        plan_.token({cc}, false);
        plan_.token({v2}, false);
      }
      if (rng_.bernoulli(0.5)) noun_phrase(random_noun(), v2, "obj", nullptr, 1);
    }
    return std::move(plan_);
  }

 private:
  const SynthWord& random_noun() { return g_.nouns[rng_.index(g_.nouns.size())]; }
  const SynthWord& random_adp() { return g_.adpositions[rng_.index(g_.adpositions.size())]; }

  const SynthWord& agreeing_verb(const SynthWord* subject) {
    if (subject == nullptr) return g_.verbs[rng_.index(g_.verbs.size())];
    const std::string person = person_of(*subject);
    return pick(g_.verbs, rng_, [&](const SynthWord& v) {
      return agrees(v, *subject, "Gender") && agrees(v, *subject, "Number") && person_of(v) == person;
    });
  }

  void noun_phrase(const SynthWord& noun, int head, const std::string& deprel, const SynthWord* adp, int depth) {
    const int n = plan_.add(noun, head, deprel);
    const bool pronoun = noun.upos == "PRON";
    const int c = adp != nullptr ? plan_.add(*adp, n, "case") : -1;
    bool fuse = !pronoun && rng_.bernoulli(g_.ambiguity);
    bool definite = fuse && (c < 0 || rng_.bernoulli(0.5));
    if (c >= 0 && !fuse) plan_.token({c}, false);
    std::vector<int> tok;
    if (c >= 0 && fuse) tok.push_back(c);
    if (definite) tok.push_back(plan_.add(g_.article, n, "det"));
    tok.push_back(n);
    plan_.token(std::move(tok), fuse);

    if (!pronoun && rng_.bernoulli(0.35)) {
      const SynthWord& adj = pick(g_.adjectives, rng_, [&](const SynthWord& a) {
        return agrees(a, noun, "Gender") && agrees(a, noun, "Number");
      });
      const int a = plan_.add(adj, n, "amod");
      if (definite) {
        plan_.token({plan_.add(g_.article, a, "det"), a}, true);
      } else {
        plan_.token({a}, false);
      }
    }
    if (!pronoun && depth > 0 && rng_.bernoulli(0.2)) noun_phrase(random_noun(), n, "nmod", &random_adp(), depth - 1);
  }

  const SynthGrammar& g_;
  Rng& rng_;
  Plan plan_;
};

GoldSentence to_sentence(const Plan& plan, const std::string& sent_id) {
  std::vector<int> out_id(plan.words.size(), 0);
  int next = 1;
  for (const auto& tok : plan.tokens) {
    for (int w : tok) out_id[static_cast<std::size_t>(w)] = next++;
  }
  GoldSentence s;
  s.sent_id = sent_id;
  std::string text;
  for (const auto& tok : plan.tokens) {
    GoldToken gt;
    for (int w : tok) {
      const Word& word = plan.words[static_cast<std::size_t>(w)];
      GoldSegment seg;
      seg.form = word.word->form;
      seg.lemma = word.word->form;
      seg.upos = word.word->upos;
      seg.feats = word.word->feats;
      seg.head = word.head < 0 ? 0 : static_cast<std::size_t>(out_id[static_cast<std::size_t>(word.head)]);
      seg.deprel = word.deprel;
      gt.form += seg.form;
      gt.segments.push_back(std::move(seg));
    }
    if (!text.empty()) text += ' ';
    text += gt.form;
    s.tokens.push_back(std::move(gt));
  }
  s.comments = {"# sent_id = " + sent_id, "# text = " + text};
  return s;
}

/// Splits `surface` at the given sorted boundary offsets.
std::vector<std::string> split_at(const std::string& surface, const std::vector<std::size_t>& cuts) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t c : cuts) {
    pieces.push_back(surface.substr(start, c - start));
    start = c;
  }
  pieces.push_back(surface.substr(start));
  return pieces;
}

void add_surface(Lexicon& lex, const std::vector<const SynthWord*>& parts, std::uint64_t vocab_seed,
                 const std::map<std::string, const SynthWord*>& known) {
  std::string surface;
  Analysis gold;
  std::vector<std::size_t> gold_cuts;
  for (const SynthWord* w : parts) {
    if (!surface.empty()) gold_cuts.push_back(surface.size());
    surface += w->form;
    Segment seg{w->form, w->upos, w->feats};
    gold.segments.push_back(std::move(seg));
  }
  if (parts.size() == 1) {
    lex.add(surface, std::move(gold));
    return;
  }

  // Alternative boundary sets over the first prefix_count + 1 offsets.
  const std::size_t limit = std::min(surface.size() - 1, gold_cuts.size() + 1);
  std::vector<std::vector<std::size_t>> alternatives;
  for (std::size_t mask = 0; mask < (std::size_t{1} << limit); ++mask) {
    std::vector<std::size_t> cuts;
    for (std::size_t k = 0; k < limit; ++k) {
      if (mask & (std::size_t{1} << k)) cuts.push_back(k + 1);
    }
    if (cuts != gold_cuts) alternatives.push_back(std::move(cuts));
  }
  Rng rng(mix_seed(vocab_seed, fnv1a64(surface)));
  rng.shuffle(alternatives);
  const std::size_t count = std::min(alternatives.size(), std::size_t{1} + (rng.bernoulli(0.5) ? 1 : 0));

  std::vector<Analysis> analyses{std::move(gold)};
  for (std::size_t k = 0; k < count; ++k) {
    Analysis a;
    for (auto& piece : split_at(surface, alternatives[k])) {
      Segment seg{piece, {}, {}};
      if (const auto it = known.find(piece); it != known.end()) {
        seg.pos_hint = it->second->upos;
        seg.feats_hint = it->second->feats;
      }
      a.segments.push_back(std::move(seg));
    }
    analyses.push_back(std::move(a));
  }
  rng.shuffle(analyses);
  for (auto& a : analyses) lex.add(surface, std::move(a));
}

}  // namespace

Lexicon grammar_lexicon(const SynthGrammar& g) {
  std::map<std::string, const SynthWord*> known;
  for (const auto* pool : {&g.nouns, &g.pronouns, &g.adjectives, &g.verbs, &g.adpositions}) {
    for (const auto& w : *pool) known.emplace(w.form, &w);
  }
  known.emplace(g.article.form, &g.article);
  known.emplace(g.conjunction.form, &g.conjunction);

  Lexicon lex;
  for (const auto& [form, w] : known) add_surface(lex, {w}, g.vocab_seed, known);
  for (const auto& n : g.nouns) {
    add_surface(lex, {&g.article, &n}, g.vocab_seed, known);
    for (const auto& adp : g.adpositions) {
      add_surface(lex, {&adp, &n}, g.vocab_seed, known);
      add_surface(lex, {&adp, &g.article, &n}, g.vocab_seed, known);
    }
  }
  for (const auto& a : g.adjectives) add_surface(lex, {&g.article, &a}, g.vocab_seed, known);
  for (const auto& v : g.verbs) add_surface(lex, {&g.conjunction, &v}, g.vocab_seed, known);
  return lex;
}

SynthStats corpus_stats(std::span<const GoldSentence> treebank, const Lexicon& lexicon) {
  SynthStats st;
  st.sentences = treebank.size();
  for (const auto& s : treebank) {
    const SentenceLattice lat = build_sentence_lattice(lexicon, s);
    const auto path = find_gold_path(lat, s);
    for (std::size_t j = 0; j < s.tokens.size(); ++j) {
      ++st.tokens;
      st.segments += s.tokens[j].segments.size();
      if (s.tokens[j].segments.size() > 1) ++st.fused_tokens;
      const std::size_t n = lat.tokens[j].analyses.size();
      st.analyses += n;
      if (n > 1) {
        ++st.ambiguous_tokens;
        if (path[j] == 1) ++st.gold_first;
      }
    }
  }
  return st;
}

SynthCorpus generate(const SynthGrammar& grammar, std::size_t n) {
  if (n == 0) throw UsageError("number of synthetic sentences must be positive");
  if (grammar.nouns.empty() || grammar.verbs.empty() || grammar.adjectives.empty() || grammar.pronouns.empty() ||
      grammar.adpositions.empty()) {
    throw UsageError("synthetic grammar has an empty vocabulary class");
  }
  if (grammar.min_tokens < 1 || grammar.min_tokens > grammar.max_tokens) throw UsageError("invalid sentence length bounds");

  SynthCorpus corpus;
  Rng rng(mix_seed(grammar.seed, 0x73656e74ull));
  SentenceSampler sampler(grammar, rng);
  for (std::size_t i = 0; i < n; ++i) {
    Plan plan;
    for (int attempt = 0;; ++attempt) {
      plan = sampler.sample();
      if (plan.tokens.size() >= grammar.min_tokens && plan.tokens.size() <= grammar.max_tokens) break;
      if (attempt > 1000) throw UsageError("cannot sample sentences within the length bounds");
    }
    GoldSentence s = to_sentence(plan, "synth-" + std::to_string(grammar.seed) + "-" + std::to_string(i + 1));
    validate(s);
    corpus.treebank.push_back(std::move(s));
  }
  corpus.lexicon = grammar_lexicon(grammar);
  corpus.stats = corpus_stats(corpus.treebank, corpus.lexicon);
  return corpus;
}

Lexicon drop_gold_analyses(const Lexicon& lexicon, std::span<const GoldSentence> treebank, double fraction,
                           std::uint64_t seed) {
  std::map<std::string, Analysis> candidates;
  for (const auto& s : treebank) {
    for (const auto& t : s.tokens) {
      const auto* listed = lexicon.find(t.form);
      if (listed != nullptr && listed->size() > 1) candidates.emplace(t.form, gold_analysis(t));
    }
  }
  std::vector<std::string> forms;
  for (const auto& [form, a] : candidates) forms.push_back(form);
  Rng rng(seed);
  rng.shuffle(forms);
  const auto drop = static_cast<std::size_t>(fraction * static_cast<double>(forms.size()) + 0.5);
  Lexicon out = lexicon;
  for (std::size_t k = 0; k < std::min(drop, forms.size()); ++k) out.remove(forms[k], candidates.at(forms[k]));
  return out;
}

}  // namespace latparse
