#include "xrauthor/common/types.hpp"

#include <cmath>
#include <set>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"

namespace xrauthor {

using nlohmann::json;

std::string to_string(GradeBand band) {
  switch (band) {
    case GradeBand::K2: return "K-2";
    case GradeBand::G3_5: return "3-5";
    case GradeBand::G6_8: return "6-8";
    case GradeBand::G9_12: return "9-12";
  }
  return "?";
}

std::optional<GradeBand> parse_grade_band(std::string_view s) {
  if (s == "K-2") return GradeBand::K2;
  if (s == "3-5") return GradeBand::G3_5;
  if (s == "6-8") return GradeBand::G6_8;
  if (s == "9-12") return GradeBand::G9_12;
  return std::nullopt;
}

void validate(const AuthoringRequest& request) {
  std::map<std::string, std::string> fields;
  if (text::trim(request.prompt_text).empty()) fields["prompt_text"] = "must not be empty";
  if (request.max_safety_attempts < 1) fields["max_safety_attempts"] = "must be at least 1";
  if (!fields.empty()) throw ValidationError(std::move(fields));
}

AuthoringRequest parse_authoring_request(const json& body) {
  if (!body.is_object()) throw ValidationError("body", "must be a JSON object");
  std::map<std::string, std::string> fields;
  AuthoringRequest request;

  auto string_field = [&](const char* name, std::string& out, bool required) {
    auto it = body.find(name);
    if (it == body.end()) {
      if (required) fields[name] = "is required";
      return;
    }
    if (!it->is_string()) {
      fields[name] = "must be a string";
      return;
    }
    out = it->get<std::string>();
  };

  string_field("prompt_text", request.prompt_text, true);
  string_field("subject", request.subject, false);
  string_field("topic", request.topic, false);

  if (auto it = body.find("grade_band"); it == body.end()) {
    fields["grade_band"] = "is required";
  } else if (!it->is_string() || !parse_grade_band(it->get<std::string>())) {
    fields["grade_band"] = "must be one of K-2, 3-5, 6-8, 9-12";
  } else {
    request.grade_band = *parse_grade_band(it->get<std::string>());
  }

  if (auto it = body.find("require_approval"); it != body.end()) {
    if (it->is_boolean()) {
      request.require_approval = it->get<bool>();
    } else {
      fields["require_approval"] = "must be a boolean";
    }
  }
  if (auto it = body.find("max_safety_attempts"); it != body.end()) {
    if (it->is_number_integer()) {
      request.max_safety_attempts = it->get<int>();
    } else {
      fields["max_safety_attempts"] = "must be an integer";
    }
  }

  if (!fields.count("prompt_text") && text::trim(request.prompt_text).empty()) {
    fields["prompt_text"] = "must not be empty";
  }
  if (!fields.count("max_safety_attempts") && request.max_safety_attempts < 1) {
    fields["max_safety_attempts"] = "must be at least 1";
  }
  if (!fields.empty()) throw ValidationError(std::move(fields));
  return request;
}

namespace {

void check_string_list(const std::vector<std::string>& items, const std::string& path, size_t min, size_t max,
                       std::vector<std::string>& out) {
  if (items.size() < min || items.size() > max) {
    out.push_back(path + ": expected " + std::to_string(min) + " to " + std::to_string(max) + " items, got " +
                  std::to_string(items.size()));
  }
  for (size_t i = 0; i < items.size(); ++i) {
    if (text::trim(items[i]).empty()) out.push_back(path + "[" + std::to_string(i) + "]: must not be empty");
  }
}

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::vector<std::string> problems(const ContentSpec& spec) {
  std::vector<std::string> out;
  if (text::trim(spec.core_concept).empty()) out.push_back("core_concept: must not be empty");
  check_string_list(spec.learning_objectives, "learning_objectives", 1, 6, out);
  check_string_list(spec.required_visual_features, "required_visual_features", 1, 12, out);
  check_string_list(spec.labeling_requirements, "labeling_requirements", 0, 12, out);
  if (text::trim(spec.refined_prompt).empty()) {
    out.push_back("refined_prompt: must not be empty");
  } else {
    for (const auto& feature : spec.required_visual_features) {
      if (!text::trim(feature).empty() && !text::contains_folded(spec.refined_prompt, text::trim(feature))) {
        out.push_back("refined_prompt: does not mention required visual feature \"" + feature + "\"");
      }
    }
  }
  return out;
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::AgeAppropriateness: return "age_appropriateness";
    case Criterion::FactualAccuracy: return "factual_accuracy";
    case Criterion::NoDisturbingImagery: return "no_disturbing_imagery";
    case Criterion::NoBias: return "no_bias";
    case Criterion::EducationalValue: return "educational_value";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view s) {
  for (Criterion c : kAllCriteria) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string criterion_label(Criterion c) {
  switch (c) {
    case Criterion::AgeAppropriateness: return "Age appropriateness";
    case Criterion::FactualAccuracy: return "Factual accuracy";
    case Criterion::NoDisturbingImagery: return "No disturbing imagery";
    case Criterion::NoBias: return "No bias";
    case Criterion::EducationalValue: return "Educational value";
  }
  return "?";
}

std::vector<const CriterionResult*> SafetyVerdict::failing() const {
  std::vector<const CriterionResult*> out;
  for (const auto& c : criteria) {
    if (!c.pass) out.push_back(&c);
  }
  return out;
}

std::vector<std::string> problems(const SafetyVerdict& verdict) {
  std::vector<std::string> out;
  if (verdict.criteria.size() != kAllCriteria.size()) {
    out.push_back("criteria: expected exactly 5 entries, got " + std::to_string(verdict.criteria.size()));
  }
  std::set<Criterion> seen;
  bool all_pass = true;
  for (size_t i = 0; i < verdict.criteria.size(); ++i) {
    const auto& c = verdict.criteria[i];
    if (!seen.insert(c.key).second) out.push_back("criteria: duplicate key " + to_string(c.key));
    if (text::trim(c.rationale).empty()) out.push_back("criteria[" + std::to_string(i) + "].rationale: must not be empty");
    all_pass = all_pass && c.pass;
  }
  for (Criterion c : kAllCriteria) {
    if (!seen.count(c)) out.push_back("criteria: missing key " + to_string(c));
  }
  if (verdict.approved != all_pass) out.push_back("approved: must be true exactly when every criterion passes");
  const bool has_feedback = !text::trim(verdict.revision_feedback).empty();
  if (!verdict.approved && !has_feedback) out.push_back("revision_feedback: required when not approved");
  if (verdict.approved && has_feedback) out.push_back("revision_feedback: must be empty when approved");
  return out;
}

std::vector<std::string> problems(const QuizQuestion& q, const std::string& path) {
  std::vector<std::string> out;
  if (text::trim(q.stem).empty()) out.push_back(path + ".stem: must not be empty");
  if (q.choices.size() < 2 || q.choices.size() > 5) {
    out.push_back(path + ".choices: expected 2 to 5 choices, got " + std::to_string(q.choices.size()));
  }
  std::set<std::string> distinct(q.choices.begin(), q.choices.end());
  if (distinct.size() != q.choices.size()) out.push_back(path + ".choices: must be pairwise distinct");
  if (q.correct_index < 0 || static_cast<size_t>(q.correct_index) >= q.choices.size()) {
    out.push_back(path + ".correct_index: " + std::to_string(q.correct_index) + " is out of range for " +
                  std::to_string(q.choices.size()) + " choices");
  }
  return out;
}

std::vector<std::string> problems(const TutorPack& pack) {
  std::vector<std::string> out;
  auto count = [&](size_t n, const char* name, size_t min, size_t max) {
    if (n < min || n > max) {
      out.push_back(std::string(name) + ": expected " + std::to_string(min) + " to " + std::to_string(max) +
                    " items, got " + std::to_string(n));
    }
  };
  count(pack.annotations.size(), "annotations", 1, 20);
  count(pack.vocabulary.size(), "vocabulary", 1, 20);
  count(pack.quiz.size(), "quiz", 1, 10);
  count(pack.readings.size(), "readings", 0, 10);
  for (size_t i = 0; i < pack.annotations.size(); ++i) {
    const auto& a = pack.annotations[i];
    const std::string path = "annotations[" + std::to_string(i) + "]";
    if (text::trim(a.label).empty()) out.push_back(path + ".label: must not be empty");
    if (a.anchor && !(in_unit_interval(a.anchor->x) && in_unit_interval(a.anchor->y) && in_unit_interval(a.anchor->z))) {
      out.push_back(path + ".anchor: coordinates must lie in [0,1]");
    }
  }
  for (size_t i = 0; i < pack.vocabulary.size(); ++i) {
    if (text::trim(pack.vocabulary[i].term).empty()) {
      out.push_back("vocabulary[" + std::to_string(i) + "].term: must not be empty");
    }
  }
  for (size_t i = 0; i < pack.quiz.size(); ++i) {
    auto qp = problems(pack.quiz[i], "quiz[" + std::to_string(i) + "]");
    out.insert(out.end(), qp.begin(), qp.end());
  }
  for (size_t i = 0; i < pack.readings.size(); ++i) {
    if (!text::is_well_formed_url(pack.readings[i].url)) {
      out.push_back("readings[" + std::to_string(i) + "].url: not a well-formed url: " + pack.readings[i].url);
    }
  }
  return out;
}

std::vector<std::string> problems(const AssetMeta& meta) {
  std::vector<std::string> out;
  if (meta.gltf_version != 2) out.push_back("gltf_version: must be 2");
  if (meta.byte_length <= 20) out.push_back("byte_length: must exceed 20");
  if (meta.mesh_count < 1) out.push_back("mesh_count: must be at least 1");
  const auto& b = meta.bounding_box;
  if (b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z) {
    out.push_back("bounding_box: min must not exceed max");
  }
  if (meta.sha256.size() != 64) out.push_back("sha256: expected 64 hex characters");
  return out;
}

// ---- json ----

void to_json(json& j, GradeBand b) { j = to_string(b); }

void from_json(const json& j, GradeBand& b) {
  auto parsed = parse_grade_band(j.get<std::string>());
  if (!parsed) throw std::invalid_argument("unknown grade band: " + j.get<std::string>());
  b = *parsed;
}

void to_json(json& j, const AuthoringRequest& r) {
  j = json{{"prompt_text", r.prompt_text},           {"grade_band", r.grade_band},
           {"subject", r.subject},                   {"topic", r.topic},
           {"require_approval", r.require_approval}, {"max_safety_attempts", r.max_safety_attempts}};
}

void from_json(const json& j, AuthoringRequest& r) {
  j.at("prompt_text").get_to(r.prompt_text);
  j.at("grade_band").get_to(r.grade_band);
  j.at("subject").get_to(r.subject);
  j.at("topic").get_to(r.topic);
  j.at("require_approval").get_to(r.require_approval);
  j.at("max_safety_attempts").get_to(r.max_safety_attempts);
}

void to_json(json& j, const ContentSpec& s) {
  j = json{{"core_concept", s.core_concept},
           {"grade_band", s.grade_band},
           {"learning_objectives", s.learning_objectives},
           {"required_visual_features", s.required_visual_features},
           {"complexity_notes", s.complexity_notes},
           {"refined_prompt", s.refined_prompt},
           {"labeling_requirements", s.labeling_requirements}};
}

void from_json(const json& j, ContentSpec& s) {
  j.at("core_concept").get_to(s.core_concept);
  j.at("grade_band").get_to(s.grade_band);
  j.at("learning_objectives").get_to(s.learning_objectives);
  j.at("required_visual_features").get_to(s.required_visual_features);
  j.at("complexity_notes").get_to(s.complexity_notes);
  j.at("refined_prompt").get_to(s.refined_prompt);
  j.at("labeling_requirements").get_to(s.labeling_requirements);
}

void to_json(json& j, Criterion c) { j = to_string(c); }

void from_json(const json& j, Criterion& c) {
  auto parsed = parse_criterion(j.get<std::string>());
  if (!parsed) throw std::invalid_argument("unknown criterion: " + j.get<std::string>());
  c = *parsed;
}

void to_json(json& j, const CriterionResult& c) {
  j = json{{"key", c.key}, {"pass", c.pass}, {"rationale", c.rationale}, {"feedback", c.feedback}};
}

void from_json(const json& j, CriterionResult& c) {
  j.at("key").get_to(c.key);
  j.at("pass").get_to(c.pass);
  j.at("rationale").get_to(c.rationale);
  c.feedback = j.value("feedback", std::string{});
}

void to_json(json& j, const SafetyVerdict& v) {
  j = json{{"criteria", v.criteria},
           {"approved", v.approved},
           {"revision_feedback", v.revision_feedback},
           {"reviewed_inputs", v.reviewed_inputs == ReviewedInputs::TextAndImage ? "TextAndImage" : "TextOnly"}};
}

void from_json(const json& j, SafetyVerdict& v) {
  j.at("criteria").get_to(v.criteria);
  j.at("approved").get_to(v.approved);
  j.at("revision_feedback").get_to(v.revision_feedback);
  const auto inputs = j.at("reviewed_inputs").get<std::string>();
  if (inputs == "TextAndImage") {
    v.reviewed_inputs = ReviewedInputs::TextAndImage;
  } else if (inputs == "TextOnly") {
    v.reviewed_inputs = ReviewedInputs::TextOnly;
  } else {
    throw std::invalid_argument("unknown reviewed_inputs: " + inputs);
  }
}

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }

void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x, y, z]");
  v = Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(json& j, const Annotation& a) {
  j = json{{"label", a.label}, {"body", a.body}};
  if (a.anchor) {
    j["anchor"] = *a.anchor;
  } else {
    j["anchor"] = "unanchored";
  }
}

void from_json(const json& j, Annotation& a) {
  j.at("label").get_to(a.label);
  j.at("body").get_to(a.body);
  const auto& anchor = j.at("anchor");
  if (anchor.is_string()) {
    if (anchor.get<std::string>() != "unanchored") throw std::invalid_argument("bad anchor");
    a.anchor.reset();
  } else {
    a.anchor = anchor.get<Vec3>();
  }
}

void to_json(json& j, const VocabularyTerm& v) { j = json{{"term", v.term}, {"definition", v.definition}}; }

void from_json(const json& j, VocabularyTerm& v) {
  j.at("term").get_to(v.term);
  j.at("definition").get_to(v.definition);
}

void to_json(json& j, const QuizQuestion& q) {
  j = json{{"stem", q.stem}, {"choices", q.choices}, {"correct_index", q.correct_index}, {"explanation", q.explanation}};
}

void from_json(const json& j, QuizQuestion& q) {
  j.at("stem").get_to(q.stem);
  j.at("choices").get_to(q.choices);
  j.at("correct_index").get_to(q.correct_index);
  j.at("explanation").get_to(q.explanation);
}

void to_json(json& j, const Reading& r) { j = json{{"title", r.title}, {"url", r.url}, {"snippet", r.snippet}}; }

void from_json(const json& j, Reading& r) {
  j.at("title").get_to(r.title);
  j.at("url").get_to(r.url);
  j.at("snippet").get_to(r.snippet);
}

void to_json(json& j, const TutorPack& t) {
  j = json{{"overview", t.overview},
           {"annotations", t.annotations},
           {"vocabulary", t.vocabulary},
           {"quiz", t.quiz},
           {"readings", t.readings}};
}

void from_json(const json& j, TutorPack& t) {
  j.at("overview").get_to(t.overview);
  j.at("annotations").get_to(t.annotations);
  j.at("vocabulary").get_to(t.vocabulary);
  j.at("quiz").get_to(t.quiz);
  j.at("readings").get_to(t.readings);
}

void to_json(json& j, const BoundingBox& b) { j = json{{"min", b.min}, {"max", b.max}}; }

void from_json(const json& j, BoundingBox& b) {
  j.at("min").get_to(b.min);
  j.at("max").get_to(b.max);
}

void to_json(json& j, const AssetMeta& m) {
  j = json{{"byte_length", m.byte_length},
           {"gltf_version", m.gltf_version},
           {"mesh_count", m.mesh_count},
           {"triangle_count", m.triangle_count},
           {"bounding_box", m.bounding_box},
           {"source", m.source == AssetSource::Generated ? "Generated" : "Imported"},
           {"sha256", m.sha256}};
}

void from_json(const json& j, AssetMeta& m) {
  j.at("byte_length").get_to(m.byte_length);
  j.at("gltf_version").get_to(m.gltf_version);
  j.at("mesh_count").get_to(m.mesh_count);
  j.at("triangle_count").get_to(m.triangle_count);
  j.at("bounding_box").get_to(m.bounding_box);
  const auto source = j.at("source").get<std::string>();
  if (source == "Generated") {
    m.source = AssetSource::Generated;
  } else if (source == "Imported") {
    m.source = AssetSource::Imported;
  } else {
    throw std::invalid_argument("unknown asset source: " + source);
  }
  j.at("sha256").get_to(m.sha256);
}

}  // namespace xrauthor
