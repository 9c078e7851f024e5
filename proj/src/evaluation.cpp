#include "aspectmill/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "aspectmill/error.hpp"

namespace aspectmill {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts count_label(const std::vector<bool>& gold, const std::vector<bool>& predicted) {
  if (gold.size() != predicted.size())
    throw ValidationError("gold and predicted label lists differ in length (" + std::to_string(gold.size()) + " vs " +
                          std::to_string(predicted.size()) + ")");
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && predicted[i]) ++c.tp;
    else if (predicted[i]) ++c.fp;
    else if (gold[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionCounts count_label(const std::set<std::size_t>& gold, const std::set<std::size_t>& predicted,
                            std::size_t sentences) {
  std::vector<bool> g(sentences, false), p(sentences, false);
  for (auto i : gold) {
    if (i >= sentences) throw ValidationError("gold index outside the sentence list");
    g[i] = true;
  }
  for (auto i : predicted) {
    if (i >= sentences) throw ValidationError("predicted index outside the sentence list");
    p[i] = true;
  }
  return count_label(g, p);
}

double f1_from(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

Prf prf(const ConfusionCounts& c) {
  Prf out;
  if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (out.precision && out.recall) out.f1 = f1_from(*out.precision, *out.recall);
  return out;
}

Averaged macro_average(std::span<const Prf> per_label) {
  Averaged avg;
  if (per_label.empty()) return avg;
  for (const auto& m : per_label) {
    avg.precision += m.precision.value_or(0.0);
    avg.recall += m.recall.value_or(0.0);
    avg.f1 += m.f1.value_or(0.0);
    if (!m.fully_defined()) ++avg.undefined;
  }
  const auto n = static_cast<double>(per_label.size());
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  return avg;
}

Averaged micro_average(std::span<const ConfusionCounts> per_label) {
  ConfusionCounts pooled;
  for (const auto& c : per_label) pooled += c;
  auto m = prf(pooled);
  Averaged avg;
  avg.precision = m.precision.value_or(0.0);
  avg.recall = m.recall.value_or(0.0);
  avg.f1 = m.f1.value_or(0.0);
  avg.undefined = m.fully_defined() ? 0 : 1;
  return avg;
}

std::string_view to_string(LabelGroup group) {
  switch (group) {
    case LabelGroup::Categories: return "categories";
    case LabelGroup::InferredCategories: return "inferred-categories";
    case LabelGroup::Aspects: return "aspects";
    case LabelGroup::Polarity: return "polarity";
  }
  return "?";
}

namespace {

MetricsReport make_report(LabelGroup group, ScoringUnit unit, const std::vector<std::string>& names,
                          const std::vector<std::vector<bool>>& gold, const std::vector<std::vector<bool>>& pred) {
  MetricsReport report;
  report.group = group;
  report.unit = unit;
  std::vector<Prf> metrics;
  std::vector<ConfusionCounts> counts;
  for (std::size_t l = 0; l < names.size(); ++l) {
    auto c = count_label(gold[l], pred[l]);
    auto m = prf(c);
    report.labels.push_back({names[l], c, m});
    metrics.push_back(m);
    counts.push_back(c);
  }
  report.macro = macro_average(metrics);
  report.micro = micro_average(counts);
  return report;
}

struct PolarityFlags {
  bool positive = false, negative = false, neutral = false, polar = false;
};

PolarityFlags flags_of(Polarity p) {
  PolarityFlags f;
  f.positive = p == Polarity::Positive || p == Polarity::Mixed;
  f.negative = p == Polarity::Negative || p == Polarity::Mixed;
  f.neutral = p == Polarity::Neutral;
  f.polar = !f.neutral;
  return f;
}

void push_flags(std::vector<std::vector<bool>>& cols, const PolarityFlags& f) {
  cols[0].push_back(f.positive);
  cols[1].push_back(f.negative);
  cols[2].push_back(f.neutral);
  cols[3].push_back(f.polar);
}

}  // namespace

std::vector<MetricsReport> evaluate_predictions(const AnnotatedCorpus& gold, const EvaluationInput& input) {
  if (!gold.taxonomy) throw Error("corpus without taxonomy");
  const auto& taxonomy = *gold.taxonomy;
  const auto targets = build_targets(gold);
  if (targets.size() != input.predictions.size())
    throw ValidationError("prediction count " + std::to_string(input.predictions.size()) +
                          " does not match sentence count " + std::to_string(targets.size()));

  std::vector<std::string> cat_names;
  for (const auto& c : taxonomy.categories()) cat_names.push_back(c.name);
  const auto& aspect_names = taxonomy.aspects();

  std::vector<std::vector<bool>> cat_gold(cat_names.size()), cat_pred(cat_names.size()), inf_pred(cat_names.size());
  std::vector<std::vector<bool>> asp_gold(aspect_names.size()), asp_pred(aspect_names.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& p = input.predictions[i];
    const auto inferred = infer_categories(p.aspects, taxonomy);
    for (std::size_t c = 0; c < cat_names.size(); ++c) {
      cat_gold[c].push_back(targets[i].categories[c]);
      cat_pred[c].push_back(p.categories.count(cat_names[c]) > 0);
      inf_pred[c].push_back(inferred.count(cat_names[c]) > 0);
    }
    for (std::size_t a = 0; a < aspect_names.size(); ++a) {
      asp_gold[a].push_back(targets[i].aspects[a]);
      asp_pred[a].push_back(p.aspects.count(aspect_names[a]) > 0);
    }
  }

  std::vector<MetricsReport> reports;
  reports.push_back(make_report(LabelGroup::Categories, ScoringUnit::Sentence, cat_names, cat_gold, cat_pred));
  if (input.include_inferred_categories)
    reports.push_back(
        make_report(LabelGroup::InferredCategories, ScoringUnit::Sentence, cat_names, cat_gold, inf_pred));
  reports.push_back(make_report(LabelGroup::Aspects, ScoringUnit::Sentence, aspect_names, asp_gold, asp_pred));

  const std::vector<std::string> pol_names(std::begin(kPolarityLabels), std::end(kPolarityLabels));
  std::vector<std::vector<bool>> pol_gold(4), pol_pred(4);
  if (input.gold_aspect_polarities) {
    const auto& pairs = *input.gold_aspect_polarities;
    if (pairs.size() != targets.size()) throw ValidationError("aspect polarity list does not match sentence count");
    std::size_t i = 0;
    gold.for_each_sentence([&](const Review&, const Sentence& s) {
      for (const auto& a : s.annotations) {
        auto it = pairs[i].find(a.aspect);
        if (it == pairs[i].end())
          throw ValidationError("missing aspect polarity prediction for '" + a.aspect + "'");
        push_flags(pol_gold, flags_of(a.polarity()));
        push_flags(pol_pred, flags_of(it->second));
      }
      ++i;
    });
    reports.push_back(make_report(LabelGroup::Polarity, ScoringUnit::SentenceAspect, pol_names, pol_gold, pol_pred));
  } else {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& t = targets[i];
      push_flags(pol_gold, PolarityFlags{t.positive, t.negative, !t.polar, t.polar});
      const auto* label = std::get_if<Polarity>(&input.predictions[i].polarity);
      if (!label) throw ValidationError("sentence-level evaluation needs sentence-level polarity predictions");
      push_flags(pol_pred, flags_of(*label));
    }
    reports.push_back(make_report(LabelGroup::Polarity, ScoringUnit::Sentence, pol_names, pol_gold, pol_pred));
  }
  return reports;
}

std::vector<MetricsReport> evaluate_bundle(const ModelBundle& bundle, const AnnotatedCorpus& test) {
  if (!bundle.taxonomy || !test.taxonomy || !(*bundle.taxonomy == *test.taxonomy))
    throw ValidationError("bundle and test corpus use different taxonomies");
  EvaluationInput input;
  input.include_inferred_categories = bundle.architecture != Architecture::Flat;
  const bool specific = bundle.architecture == Architecture::AspectPolarity;
  if (specific) input.gold_aspect_polarities.emplace();
  test.for_each_sentence([&](const Review&, const Sentence& s) {
    auto tokens = tokenize(s.text);
    input.predictions.push_back(predict(bundle, std::span<const std::string>(tokens)));
    if (specific) {
      AspectPolarities pairs;
      for (const auto& a : s.annotations) pairs.emplace(a.aspect, aspect_polarity(bundle, tokens, a.aspect));
      input.gold_aspect_polarities->push_back(std::move(pairs));
    }
  });
  return evaluate_predictions(test, input);
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string pct(const std::optional<double>& v) { return v ? pct(*v) : std::string("n/a"); }

std::string_view row_title(LabelGroup group) {
  switch (group) {
    case LabelGroup::Categories: return "Categories";
    case LabelGroup::InferredCategories: return "Categ. (Infer.)";
    case LabelGroup::Aspects: return "Aspects";
    case LabelGroup::Polarity: return "Polarity";
  }
  return "?";
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string format_machine(const std::vector<MetricsReport>& reports, Architecture arch) {
  using nlohmann::ordered_json;
  ordered_json root;
  root["architecture"] = to_string(arch);
  auto list = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json jr;
    jr["group"] = to_string(r.group);
    jr["unit"] = r.unit == ScoringUnit::Sentence ? "sentence" : "sentence-aspect";
    for (auto [name, avg] : {std::pair{"macro", &r.macro}, std::pair{"micro", &r.micro}}) {
      jr[name] = {{"precision", avg->precision}, {"recall", avg->recall}, {"f1", avg->f1},
                  {"undefined", avg->undefined}};
    }
    jr["warnings"] = r.warnings();
    auto labels = ordered_json::array();
    for (const auto& l : r.labels) {
      ordered_json jl;
      jl["label"] = l.label;
      jl["tp"] = l.counts.tp;
      jl["fp"] = l.counts.fp;
      jl["fn"] = l.counts.fn;
      jl["tn"] = l.counts.tn;
      jl["precision"] = optional_json(l.metrics.precision);
      jl["recall"] = optional_json(l.metrics.recall);
      jl["f1"] = optional_json(l.metrics.f1);
      labels.push_back(std::move(jl));
    }
    jr["labels"] = std::move(labels);
    list.push_back(std::move(jr));
  }
  root["reports"] = std::move(list);
  return root.dump(2) + "\n";
}

std::string format_table(const std::vector<MetricsReport>& reports, Architecture arch) {
  std::ostringstream out;
  std::size_t warnings = 0;
  out << "# architecture: " << to_string(arch) << '\n';
  out << "Type\tMacro-P\tMacro-R\tMacro-F\tMicro-P\tMicro-R\tMicro-F\n";
  for (const auto& r : reports) {
    warnings += r.warnings();
    if (r.group == LabelGroup::Polarity) continue;
    out << row_title(r.group) << '\t' << pct(r.macro.precision) << '\t' << pct(r.macro.recall) << '\t'
        << pct(r.macro.f1) << '\t' << pct(r.micro.precision) << '\t' << pct(r.micro.recall) << '\t'
        << pct(r.micro.f1) << '\n';
  }
  for (const auto& r : reports) {
    if (r.group != LabelGroup::Polarity) continue;
    out << '\n'
        << (r.unit == ScoringUnit::Sentence ? "Polarity (Agnostic)" : "Polarity (Specific)") << "\tP\tR\tF\n";
    for (const auto& l : r.labels)
      out << l.label << '\t' << pct(l.metrics.precision) << '\t' << pct(l.metrics.recall) << '\t'
          << pct(l.metrics.f1) << '\n';
  }
  for (const auto& r : reports) {
    out << '\n' << "Per-label " << to_string(r.group) << "\tTP\tFP\tFN\tTN\tP\tR\tF\n";
    for (const auto& l : r.labels)
      out << l.label << '\t' << l.counts.tp << '\t' << l.counts.fp << '\t' << l.counts.fn << '\t' << l.counts.tn
          << '\t' << pct(l.metrics.precision) << '\t' << pct(l.metrics.recall) << '\t' << pct(l.metrics.f1) << '\n';
  }
  out << "\nundefined metrics (counted as 0 in averages): " << warnings << '\n';
  return std::move(out).str();
}

}  // namespace

std::string format_reports(const std::vector<MetricsReport>& reports, Architecture arch, ReportFormat format) {
  return format == ReportFormat::Machine ? format_machine(reports, arch) : format_table(reports, arch);
}

}  // namespace aspectmill
