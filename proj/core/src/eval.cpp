#include "latparse/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

#include "latparse/error.hpp"

namespace latparse {

std::string_view eval_task_name(EvalTask task) {
  switch (task) {
    case EvalTask::Seg: return "seg";
    case EvalTask::Pos: return "pos";
    case EvalTask::Dep: return "dep";
  }
  return "?";
}

PRF PRF::from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
  PRF r;
  r.matched = matched;
  r.predicted = predicted;
  r.gold = gold;
  r.precision = predicted ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
  r.recall = gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

PRF& PRF::operator+=(const PRF& other) {
  *this = from_counts(matched + other.matched, predicted + other.predicted, gold + other.gold);
  return *this;
}

TokenItems eval_items(const GoldSentence& sentence, EvalTask task, DepStrictness strictness) {
  const auto segments = sentence.segments();
  const auto seg_tokens = sentence.segment_tokens();
  TokenItems items(sentence.tokens.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const GoldSegment& seg = *segments[s];
    std::string item = seg.form;
    if (task == EvalTask::Pos) {
      item += '\t' + seg.upos;
    } else if (task == EvalTask::Dep) {
      item += '\t' + seg.deprel + '\t';
      if (seg.head == 0) {
        item += "ROOT";
      } else {
        item += segments.at(seg.head - 1)->form;
      }
      if (strictness == DepStrictness::FormDistance) {
        const long offset = seg.head == 0 ? 0L
                                          : static_cast<long>(seg_tokens[seg.head - 1]) -
                                                static_cast<long>(seg_tokens[s]);
        item += '\t' + std::to_string(offset);
      }
    }
    items[seg_tokens[s] - 1].push_back(std::move(item));
  }
  return items;
}

PRF aligned_multiset_f1(const TokenItems& gold, const TokenItems& predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("token count mismatch: gold has " + std::to_string(gold.size()) + ", prediction has " +
                    std::to_string(predicted.size()));
  }
  std::size_t matched = 0, n_pred = 0, n_gold = 0;
  for (std::size_t j = 0; j < gold.size(); ++j) {
    std::vector<std::string> g = gold[j];
    std::vector<std::string> p = predicted[j];
    std::sort(g.begin(), g.end());
    std::sort(p.begin(), p.end());
    std::size_t a = 0, b = 0;
    while (a < g.size() && b < p.size()) {
      if (g[a] == p[b]) {
        ++matched, ++a, ++b;
      } else if (g[a] < p[b]) {
        ++a;
      } else {
        ++b;
      }
    }
    n_gold += g.size();
    n_pred += p.size();
  }
  return PRF::from_counts(matched, n_pred, n_gold);
}

namespace {

void check_alignment(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("sentence count mismatch: gold has " + std::to_string(gold.size()) + ", prediction has " +
                    std::to_string(predicted.size()));
  }
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s].tokens;
    const auto& p = predicted[s].tokens;
    const std::string where = "sentence " + std::to_string(s + 1) + " ('" + gold[s].sent_id + "')";
    if (g.size() != p.size()) {
      throw DataError(where + ": token count mismatch, gold " + std::to_string(g.size()) + ", prediction " +
                      std::to_string(p.size()));
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].form != p[j].form) {
        throw DataError(where + ": token " + std::to_string(j + 1) + " is '" + g[j].form + "' in gold but '" +
                        p[j].form + "' in prediction");
      }
    }
  }
}

}  // namespace

PRF aligned_multiset_f1(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted, EvalTask task,
                        DepStrictness strictness) {
  check_alignment(gold, predicted);
  PRF total;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    total += aligned_multiset_f1(eval_items(gold[s], task, strictness), eval_items(predicted[s], task, strictness));
  }
  return total;
}

ErrorBreakdown error_breakdown(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted) {
  check_alignment(gold, predicted);
  ErrorBreakdown out;
  out.total.label = "total";
  std::map<std::string, ErrorRow> rows;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto gs = gold[s].segments();
    const auto ps = predicted[s].segments();
    bool same = gold[s].segment_tokens() == predicted[s].segment_tokens() && gs.size() == ps.size();
    for (std::size_t k = 0; same && k < gs.size(); ++k) same = gs[k]->form == ps[k]->form;
    if (!same) {
      ++out.skipped_sentences;
      continue;
    }
    ++out.compared_sentences;
    for (std::size_t k = 0; k < gs.size(); ++k) {
      ErrorRow& row = rows[gs[k]->deprel];
      row.label = gs[k]->deprel;
      ++row.arcs;
      ++out.total.arcs;
      const bool head_wrong = gs[k]->head != ps[k]->head;
      const bool label_wrong = gs[k]->deprel != ps[k]->deprel;
      if (head_wrong && label_wrong) {
        ++row.head_and_label;
        ++out.total.head_and_label;
      } else if (head_wrong) {
        ++row.head_only;
        ++out.total.head_only;
      } else if (label_wrong) {
        ++row.label_only;
        ++out.total.label_only;
      }
    }
  }
  for (auto& [label, row] : rows) out.rows.push_back(std::move(row));
  return out;
}

const PRF& EvalReport::get(EvalTask task) const {
  switch (task) {
    case EvalTask::Seg: return seg;
    case EvalTask::Pos: return pos;
    case EvalTask::Dep: return dep;
  }
  return seg;
}

EvalReport evaluate(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted,
                    DepStrictness strictness) {
  return {aligned_multiset_f1(gold, predicted, EvalTask::Seg, strictness),
          aligned_multiset_f1(gold, predicted, EvalTask::Pos, strictness),
          aligned_multiset_f1(gold, predicted, EvalTask::Dep, strictness)};
}

RunReport summarize(std::vector<EvalReport> runs) {
  if (runs.empty()) throw DataError("no runs to summarize");
  RunReport report;
  report.runs = std::move(runs);
  const double n = static_cast<double>(report.runs.size());
  const auto mean_of = [&](PRF EvalReport::*field) {
    PRF m;
    for (const auto& r : report.runs) {
      const PRF& p = r.*field;
      m.matched += p.matched;
      m.predicted += p.predicted;
      m.gold += p.gold;
      m.precision += p.precision;
      m.recall += p.recall;
      m.f1 += p.f1;
    }
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
  };
  report.mean.seg = mean_of(&EvalReport::seg);
  report.mean.pos = mean_of(&EvalReport::pos);
  report.mean.dep = mean_of(&EvalReport::dep);
  return report;
}

RunReport evaluate_run(std::span<const GoldSentence> gold, const std::vector<std::vector<GoldSentence>>& runs,
                       DepStrictness strictness) {
  std::vector<EvalReport> reports;
  for (const auto& run : runs) reports.push_back(evaluate(gold, run, strictness));
  return summarize(std::move(reports));
}

namespace {

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void table_row(std::ostream& out, const std::string& name, const EvalReport& r) {
  out << name;
  for (std::size_t pad = name.size(); pad < 8; ++pad) out << ' ';
  for (EvalTask t : kEvalTasks) {
    const PRF& p = r.get(t);
    out << "  " << fixed(100 * p.precision, 2) << ' ' << fixed(100 * p.recall, 2) << ' ' << fixed(100 * p.f1, 2);
  }
  out << '\n';
}

void kv_lines(std::ostream& out, const std::string& prefix, const EvalReport& r) {
  for (EvalTask t : kEvalTasks) {
    const PRF& p = r.get(t);
    const std::string key = prefix + "." + std::string(eval_task_name(t));
    out << key << ".precision=" << fixed(p.precision, 6) << '\n'
        << key << ".recall=" << fixed(p.recall, 6) << '\n'
        << key << ".f1=" << fixed(p.f1, 6) << '\n';
  }
}

}  // namespace

void write_report(std::ostream& out, const RunReport& report) {
  out << "run       SEG P/R/F1            POS P/R/F1            DEP P/R/F1\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) table_row(out, "run" + std::to_string(i + 1), report.runs[i]);
  table_row(out, "mean", report.mean);
  out << '\n' << "runs=" << report.runs.size() << '\n';
  for (std::size_t i = 0; i < report.runs.size(); ++i) kv_lines(out, "run" + std::to_string(i + 1), report.runs[i]);
  kv_lines(out, "mean", report.mean);
}

void write_breakdown(std::ostream& out, const ErrorBreakdown& b) {
  const auto pct = [](std::size_t part, std::size_t whole) {
    return whole ? fixed(100.0 * static_cast<double>(part) / static_cast<double>(whole), 1) : std::string("0.0");
  };
  out << "label            arcs  head-only       label-only      head+label\n";
  const auto line = [&](const ErrorRow& r) {
    std::string name = r.label;
    name.resize(std::max<std::size_t>(name.size(), 15), ' ');
    out << name << ' ' << r.arcs << "  " << r.head_only << " (" << pct(r.head_only, r.errors()) << "%)  "
        << r.label_only << " (" << pct(r.label_only, r.errors()) << "%)  " << r.head_and_label << " ("
        << pct(r.head_and_label, r.errors()) << "%)\n";
  };
  for (const auto& r : b.rows) line(r);
  line(b.total);
  out << "compared_sentences=" << b.compared_sentences << '\n'
      << "skipped_sentences=" << b.skipped_sentences << '\n'
      << "errors.head_only=" << b.total.head_only << '\n'
      << "errors.label_only=" << b.total.label_only << '\n'
      << "errors.head_and_label=" << b.total.head_and_label << '\n';
}

}  // namespace latparse
