#pragma once

// Domain records shared by the agents, the bundle writer and the pipeline.
// Every record has value semantics, a `problems()` check returning the list of
// violated invariants (empty means valid) and strict nlohmann/json mappings
// used for persistence. Lenient parsing of model output lives in agents/.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace xrauthor {

enum class GradeBand { K2, G3_5, G6_8, G9_12 };

std::string to_string(GradeBand band);
std::optional<GradeBand> parse_grade_band(std::string_view s);

struct AuthoringRequest {
  std::string prompt_text;
  GradeBand grade_band = GradeBand::G6_8;
  std::string subject;
  std::string topic;
  bool require_approval = true;
  int max_safety_attempts = 3;

  bool operator==(const AuthoringRequest&) const = default;
};

// Throws ValidationError naming each offending field.
void validate(const AuthoringRequest& request);

// Builds a request from an API body. Missing optional fields take defaults;
// every problem is reported at once through ValidationError.
AuthoringRequest parse_authoring_request(const nlohmann::json& body);

struct ContentSpec {
  std::string core_concept;
  GradeBand grade_band = GradeBand::G6_8;
  std::vector<std::string> learning_objectives;
  std::vector<std::string> required_visual_features;
  std::string complexity_notes;
  std::string refined_prompt;
  std::vector<std::string> labeling_requirements;

  bool operator==(const ContentSpec&) const = default;
};

std::vector<std::string> problems(const ContentSpec& spec);

enum class Criterion { AgeAppropriateness, FactualAccuracy, NoDisturbingImagery, NoBias, EducationalValue };

inline constexpr std::array<Criterion, 5> kAllCriteria = {
    Criterion::AgeAppropriateness, Criterion::FactualAccuracy, Criterion::NoDisturbingImagery, Criterion::NoBias,
    Criterion::EducationalValue};

std::string to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view s);
// Human-readable label, e.g. "No disturbing imagery".
std::string criterion_label(Criterion c);

struct CriterionResult {
  Criterion key = Criterion::AgeAppropriateness;
  bool pass = false;
  std::string rationale;
  // Corrective instruction for the next generation attempt; may be empty on pass.
  std::string feedback;

  bool operator==(const CriterionResult&) const = default;
};

enum class ReviewedInputs { TextOnly, TextAndImage };

struct SafetyVerdict {
  std::vector<CriterionResult> criteria;
  bool approved = false;
  std::string revision_feedback;
  ReviewedInputs reviewed_inputs = ReviewedInputs::TextOnly;

  bool operator==(const SafetyVerdict&) const = default;

  std::vector<const CriterionResult*> failing() const;
};

std::vector<std::string> problems(const SafetyVerdict& verdict);

struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

struct Annotation {
  std::string label;
  std::string body;
  // Unit-normalized against the asset bounding box; nullopt means "unanchored".
  std::optional<Vec3> anchor;

  bool operator==(const Annotation&) const = default;
};

struct VocabularyTerm {
  std::string term;
  std::string definition;
  bool operator==(const VocabularyTerm&) const = default;
};

struct QuizQuestion {
  std::string stem;
  std::vector<std::string> choices;
  int correct_index = 0;
  std::string explanation;

  bool operator==(const QuizQuestion&) const = default;
};

struct Reading {
  std::string title;
  std::string url;
  std::string snippet;
  bool operator==(const Reading&) const = default;
};

struct TutorPack {
  std::string overview;
  std::vector<Annotation> annotations;
  std::vector<VocabularyTerm> vocabulary;
  std::vector<QuizQuestion> quiz;
  std::vector<Reading> readings;

  bool operator==(const TutorPack&) const = default;
};

std::vector<std::string> problems(const QuizQuestion& q, const std::string& path = "quiz");
std::vector<std::string> problems(const TutorPack& pack);

enum class AssetSource { Generated, Imported };

struct BoundingBox {
  Vec3 min;
  Vec3 max;
  bool operator==(const BoundingBox&) const = default;
};

struct AssetMeta {
  std::uint64_t byte_length = 0;
  int gltf_version = 2;
  int mesh_count = 0;
  std::uint64_t triangle_count = 0;
  BoundingBox bounding_box;
  AssetSource source = AssetSource::Generated;
  std::string sha256;

  bool operator==(const AssetMeta&) const = default;
};

std::vector<std::string> problems(const AssetMeta& meta);

void to_json(nlohmann::json& j, GradeBand b);
void from_json(const nlohmann::json& j, GradeBand& b);
void to_json(nlohmann::json& j, const AuthoringRequest& r);
void from_json(const nlohmann::json& j, AuthoringRequest& r);
void to_json(nlohmann::json& j, const ContentSpec& s);
void from_json(const nlohmann::json& j, ContentSpec& s);
void to_json(nlohmann::json& j, Criterion c);
void from_json(const nlohmann::json& j, Criterion& c);
void to_json(nlohmann::json& j, const CriterionResult& c);
void from_json(const nlohmann::json& j, CriterionResult& c);
void to_json(nlohmann::json& j, const SafetyVerdict& v);
void from_json(const nlohmann::json& j, SafetyVerdict& v);
void to_json(nlohmann::json& j, const Vec3& v);
void from_json(const nlohmann::json& j, Vec3& v);
void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);
void to_json(nlohmann::json& j, const VocabularyTerm& v);
void from_json(const nlohmann::json& j, VocabularyTerm& v);
void to_json(nlohmann::json& j, const QuizQuestion& q);
void from_json(const nlohmann::json& j, QuizQuestion& q);
void to_json(nlohmann::json& j, const Reading& r);
void from_json(const nlohmann::json& j, Reading& r);
void to_json(nlohmann::json& j, const TutorPack& t);
void from_json(const nlohmann::json& j, TutorPack& t);
void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);
void to_json(nlohmann::json& j, const AssetMeta& m);
void from_json(const nlohmann::json& j, AssetMeta& m);

}  // namespace xrauthor
