#include "xrauthor/agents/parse.hpp"

#include <map>

namespace xrauthor::agents {

using nlohmann::json;

namespace {

class FieldReader {
 public:
  FieldReader(const json& obj, std::string path, std::vector<std::string>& problems)
      : obj_(obj), path_(std::move(path)), problems_(problems) {}

  std::string string(const char* key, bool required = true) {
    const auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) {
      if (required) problems_.push_back(at(key) + ": is required");
      return {};
    }
    if (!it->is_string()) {
      problems_.push_back(at(key) + ": must be a string");
      return {};
    }
    return it->get<std::string>();
  }

  std::vector<std::string> strings(const char* key, bool required = true) {
    std::vector<std::string> out;
    const auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) {
      if (required) problems_.push_back(at(key) + ": is required");
      return out;
    }
    if (!it->is_array()) {
      problems_.push_back(at(key) + ": must be an array of strings");
      return out;
    }
    for (size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        problems_.push_back(at(key) + "[" + std::to_string(i) + "]: must be a string");
        continue;
      }
      out.push_back((*it)[i].get<std::string>());
    }
    return out;
  }

  std::optional<bool> boolean(const char* key, bool required = true) {
    const auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) {
      if (required) problems_.push_back(at(key) + ": is required");
      return std::nullopt;
    }
    if (!it->is_boolean()) {
      problems_.push_back(at(key) + ": must be a boolean");
      return std::nullopt;
    }
    return it->get<bool>();
  }

  const json* array(const char* key, bool required = true) {
    const auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) {
      if (required) problems_.push_back(at(key) + ": is required");
      return nullptr;
    }
    if (!it->is_array()) {
      problems_.push_back(at(key) + ": must be an array");
      return nullptr;
    }
    return &*it;
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& problems_;
};

std::string index_path(const char* name, size_t i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

template <class T>
Parsed<T> finish(T value, std::vector<std::string> problems, std::vector<std::string> invariant_problems,
                 std::vector<std::string> warnings = {}) {
  Parsed<T> out;
  out.warnings = std::move(warnings);
  problems.insert(problems.end(), invariant_problems.begin(), invariant_problems.end());
  if (problems.empty()) {
    out.value = std::move(value);
  } else {
    out.problems = std::move(problems);
  }
  return out;
}

}  // namespace

Parsed<ContentSpec> parse_content_spec(const json& j, GradeBand grade_band) {
  std::vector<std::string> problems;
  if (!j.is_object()) return {std::nullopt, {"reply must be a JSON object"}, {}};
  FieldReader r(j, "", problems);
  ContentSpec spec;
  spec.grade_band = grade_band;
  spec.core_concept = r.string("core_concept");
  spec.learning_objectives = r.strings("learning_objectives");
  spec.required_visual_features = r.strings("required_visual_features");
  spec.complexity_notes = r.string("complexity_notes", false);
  spec.refined_prompt = r.string("refined_prompt");
  spec.labeling_requirements = r.strings("labeling_requirements", false);
  if (!problems.empty()) return {std::nullopt, problems, {}};
  auto invariant_problems = xrauthor::problems(spec);
  return finish(std::move(spec), {}, std::move(invariant_problems));
}

Parsed<SafetyVerdict> parse_safety_verdict(const json& j, ReviewedInputs inputs) {
  std::vector<std::string> problems;
  if (!j.is_object()) return {std::nullopt, {"reply must be a JSON object"}, {}};
  SafetyVerdict verdict;
  verdict.reviewed_inputs = inputs;

  auto read_criterion = [&](const json& entry, const std::string& path, std::optional<std::string> key_override) {
    if (!entry.is_object()) {
      problems.push_back(path + ": must be an object");
      return;
    }
    FieldReader r(entry, path, problems);
    const auto key_name = key_override ? *key_override : r.string("key");
    const auto pass = r.boolean("pass");
    CriterionResult result;
    result.rationale = r.string("rationale");
    result.feedback = r.string("feedback", false);
    if (key_name.empty()) return;
    const auto key = parse_criterion(key_name);
    if (!key) {
      problems.push_back(path + ".key: unknown criterion \"" + key_name + "\"");
      return;
    }
    if (!pass) return;
    result.key = *key;
    result.pass = *pass;
    verdict.criteria.push_back(std::move(result));
  };

  const auto criteria = j.find("criteria");
  if (criteria == j.end()) {
    problems.push_back("criteria: is required");
  } else if (criteria->is_array()) {
    for (size_t i = 0; i < criteria->size(); ++i) read_criterion((*criteria)[i], index_path("criteria", i), std::nullopt);
  } else if (criteria->is_object()) {
    for (const auto& [name, entry] : criteria->items()) read_criterion(entry, "criteria." + name, name);
  } else {
    problems.push_back("criteria: must be an array of five objects");
  }

  FieldReader r(j, "", problems);
  const auto approved = r.boolean("approved", false);
  verdict.revision_feedback = r.string("revision_feedback", false);
  if (!problems.empty()) return {std::nullopt, problems, {}};

  bool all_pass = true;
  for (const auto& c : verdict.criteria) all_pass = all_pass && c.pass;
  verdict.approved = approved.value_or(all_pass);
  if (verdict.approved && all_pass) verdict.revision_feedback.clear();
  auto invariant_problems = xrauthor::problems(verdict);
  return finish(std::move(verdict), {}, std::move(invariant_problems));
}

Parsed<TutorPack> parse_tutor_pack(const json& j, const std::set<std::string>& grounding_urls) {
  std::vector<std::string> problems;
  std::vector<std::string> warnings;
  if (!j.is_object()) return {std::nullopt, {"reply must be a JSON object"}, {}};
  FieldReader r(j, "", problems);
  TutorPack pack;
  pack.overview = r.string("overview");

  if (const auto* annotations = r.array("annotations")) {
    for (size_t i = 0; i < annotations->size(); ++i) {
      const auto path = index_path("annotations", i);
      const auto& entry = (*annotations)[i];
      if (!entry.is_object()) {
        problems.push_back(path + ": must be an object");
        continue;
      }
      FieldReader a(entry, path, problems);
      Annotation annotation;
      annotation.label = a.string("label");
      annotation.body = a.string("body", false);
      const auto anchor = entry.find("anchor");
      if (anchor == entry.end() || anchor->is_null() ||
          (anchor->is_string() && anchor->get<std::string>() == "unanchored")) {
        annotation.anchor.reset();
      } else if (anchor->is_array() && anchor->size() == 3 && (*anchor)[0].is_number() && (*anchor)[1].is_number() &&
                 (*anchor)[2].is_number()) {
        annotation.anchor = Vec3{(*anchor)[0].get<double>(), (*anchor)[1].get<double>(), (*anchor)[2].get<double>()};
      } else {
        problems.push_back(path + ".anchor: must be [x, y, z] or \"unanchored\"");
      }
      pack.annotations.push_back(std::move(annotation));
    }
  }

  if (const auto* vocabulary = r.array("vocabulary")) {
    for (size_t i = 0; i < vocabulary->size(); ++i) {
      const auto path = index_path("vocabulary", i);
      if (!(*vocabulary)[i].is_object()) {
        problems.push_back(path + ": must be an object");
        continue;
      }
      FieldReader v((*vocabulary)[i], path, problems);
      pack.vocabulary.push_back(VocabularyTerm{v.string("term"), v.string("definition")});
    }
  }

  if (const auto* quiz = r.array("quiz")) {
    for (size_t i = 0; i < quiz->size(); ++i) {
      const auto path = index_path("quiz", i);
      const auto& entry = (*quiz)[i];
      if (!entry.is_object()) {
        problems.push_back(path + ": must be an object");
        continue;
      }
      FieldReader q(entry, path, problems);
      QuizQuestion question;
      question.stem = q.string("stem");
      question.choices = q.strings("choices");
      question.explanation = q.string("explanation", false);
      const auto index = entry.find("correct_index");
      if (index == entry.end() || !index->is_number_integer()) {
        problems.push_back(path + ".correct_index: must be an integer");
      } else {
        question.correct_index = index->get<int>();
      }
      pack.quiz.push_back(std::move(question));
    }
  }

  if (const auto* readings = r.array("readings", false)) {
    for (size_t i = 0; i < readings->size(); ++i) {
      const auto path = index_path("readings", i);
      if (!(*readings)[i].is_object()) {
        problems.push_back(path + ": must be an object");
        continue;
      }
      FieldReader rd((*readings)[i], path, problems);
      Reading reading{rd.string("title", false), rd.string("url"), rd.string("snippet", false)};
      if (!grounding_urls.count(reading.url)) {
        warnings.push_back("dropped reading not found in search results: " + reading.url);
        continue;
      }
      pack.readings.push_back(std::move(reading));
    }
  }

  if (!problems.empty()) return {std::nullopt, problems, warnings};
  auto invariant_problems = xrauthor::problems(pack);
  return finish(std::move(pack), {}, std::move(invariant_problems), std::move(warnings));
}

}  // namespace xrauthor::agents
