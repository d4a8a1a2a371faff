#include <doctest.h>

#include <set>

#include "xrauthor/common/sha256.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/common/time.hpp"

using namespace xrauthor;

TEST_CASE("trim and case folding") {
  CHECK(text::trim("  a b \n\t") == "a b");
  CHECK(text::trim("   ").empty());
  CHECK(text::contains_folded("The Left Atrium", "left atrium"));
  CHECK_FALSE(text::contains_folded("left", "left atrium"));
}

TEST_CASE("url well-formedness") {
  CHECK(text::is_well_formed_url("https://example.org/a?b=c"));
  CHECK(text::is_well_formed_url("http://localhost:8080/x"));
  CHECK_FALSE(text::is_well_formed_url("example.org"));
  CHECK_FALSE(text::is_well_formed_url("https://"));
  CHECK_FALSE(text::is_well_formed_url("not a url"));
}

TEST_CASE("slugify") {
  CHECK(text::slugify("human heart anatomy grade 6-8") == "human-heart-anatomy-grade-6-8");
  CHECK(text::slugify("  Photosynthesis!! (K-2) ") == "photosynthesis-k-2");
}

TEST_CASE("redaction removes every occurrence of each secret") {
  const auto out = text::redact("key sk-abc and again sk-abc, other tv-123", {"sk-abc", "tv-123", ""});
  CHECK(out.find("sk-abc") == std::string::npos);
  CHECK(out.find("tv-123") == std::string::npos);
  CHECK(out.find("[REDACTED]") != std::string::npos);
}

TEST_CASE("sha256 known answers") {
  // FIPS 180-2 test vectors.
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("timestamps format and parse") {
  const auto t = parse_timestamp("2025-03-04T05:06:07.089Z");
  CHECK(format_timestamp(t) == "2025-03-04T05:06:07.089Z");
  CHECK_THROWS(parse_timestamp("2025-03-04 05:06:07"));
  CHECK_THROWS(parse_timestamp("2025-03-04T05:06:07.089Zjunk"));
}

TEST_CASE("stepped clock advances per read") {
  SteppedClock clock(parse_timestamp("2025-01-01T00:00:00.000Z"), std::chrono::milliseconds(5));
  const auto a = clock.now();
  const auto b = clock.now();
  CHECK(b - a == std::chrono::milliseconds(5));
}

TEST_CASE("seeded ids are reproducible and distinct") {
  SeededIdSource a(1), b(1), c(2);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_id();
    CHECK(x == b.next_id());
    CHECK(x.size() == 32);
    CHECK(x.find_first_not_of("0123456789abcdef") == std::string::npos);
    seen.insert(x);
  }
  CHECK(seen.size() == 100);
  CHECK(SeededIdSource(1).next_id() != c.next_id());
  RandomIdSource r;
  CHECK(r.next_id() != r.next_id());
}
