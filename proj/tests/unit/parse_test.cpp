#include "revr/parse.hpp"

#include <random>

#include <gtest/gtest.h>

#include "revr/text.hpp"

namespace revr {
namespace {

RelationSchema rc_schema() {
  return RelationSchema(Task::kRc, {{"treatment-for", true, false},
                                    {"Product-Producer", true, false},
                                    {"associated-with", false, false},
                                    {"Other", false, true}});
}

RelationSchema te_schema() {
  return RelationSchema(Task::kTe, {{"risk-factor-of", true, false}, {"associated-with", false, false}},
                        {"drug", "symptom", "disease"});
}

TEST(ExtractFinalAnswer, ThinkThenAnswer) {
  auto a = extract_final_answer("<think>reasoning</think><answer>treatment-for(e2,e1)</answer>");
  ASSERT_TRUE(a);
  EXPECT_EQ(a.value(), "treatment-for(e2,e1)");
}

TEST(ExtractFinalAnswer, LastPairWins) {
  auto a = extract_final_answer("<answer>A(e1,e2)</answer> text <answer>B(e2,e1)</answer>");
  ASSERT_TRUE(a);
  EXPECT_EQ(a.value(), "B(e2,e1)");
}

TEST(ExtractFinalAnswer, Failures) {
  EXPECT_EQ(extract_final_answer("no tags at all").failure(), ParseFailure::kNoAnswerTag);
  EXPECT_EQ(extract_final_answer("").failure(), ParseFailure::kNoAnswerTag);
  EXPECT_EQ(extract_final_answer("</answer>").failure(), ParseFailure::kNoAnswerTag);
  EXPECT_EQ(extract_final_answer("<answer>x").failure(), ParseFailure::kUnclosedTag);
  EXPECT_EQ(extract_final_answer("<answer>x</answer><answer>y").failure(), ParseFailure::kUnclosedTag);
}

TEST(ExtractFinalAnswer, ThinkTagsIgnored) {
  auto a = extract_final_answer("<think><think></think><answer>X</answer> stray </think> <think>");
  ASSERT_TRUE(a);
  EXPECT_EQ(a.value(), "X");
  EXPECT_EQ(extract_final_answer("<answer></answer>").value(), "");
}

TEST(ExtractFinalAnswer, InsensitiveToTagFreeTextProperty) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abc <>/()e12,think\n";
  auto random_text = [&] {
    std::string s;
    for (int i = 0, n = static_cast<int>(rng() % 30); i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  auto tag_free = [&] {
    for (;;) {
      auto s = random_text();
      if (s.find('<') == std::string::npos) return s;
    }
  };
  const std::vector<std::string> pieces = {"<answer>", "</answer>", "<think>", "</think>", "x", "B(e2,e1)"};
  for (int iter = 0; iter < 5000; ++iter) {
    std::string core;
    for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) core += pieces[rng() % pieces.size()];
    const auto base = extract_final_answer(core);
    const auto wrapped = extract_final_answer(tag_free() + core + tag_free());
    ASSERT_EQ(base.ok(), wrapped.ok()) << core;
    if (base.ok()) {
      EXPECT_EQ(base.value(), wrapped.value());
    } else {
      EXPECT_EQ(base.failure(), wrapped.failure());
    }
  }
}

TEST(ParseRc, Examples) {
  const auto schema = rc_schema();
  auto a = parse_rc_answer("treatment-for(e2,e1)", schema);
  ASSERT_TRUE(a);
  EXPECT_EQ(a.value(), (RelationLabel{"treatment-for", Direction::kE2ToE1}));

  auto b = parse_rc_answer(" Product-Producer( e1 , e2 ) ", schema);
  ASSERT_TRUE(b);
  EXPECT_EQ(b.value(), (RelationLabel{"Product-Producer", Direction::kE1ToE2}));

  EXPECT_EQ(parse_rc_answer("treatment-for(e1,e1)", schema).failure(), ParseFailure::kBadGrammar);
}

TEST(ParseRc, CaseInsensitiveCanonical) {
  auto a = parse_rc_answer("PRODUCT-producer(e2,e1)", rc_schema());
  ASSERT_TRUE(a);
  EXPECT_EQ(a.value().relation, "Product-Producer");
}

TEST(ParseRc, DirectionlessForms) {
  const auto schema = rc_schema();
  EXPECT_EQ(parse_rc_answer("Other", schema).value(), (RelationLabel{"Other", Direction::kNone}));
  EXPECT_EQ(parse_rc_answer(" other ", schema).value(), (RelationLabel{"Other", Direction::kNone}));
  EXPECT_EQ(parse_rc_answer("Other(e2,e1)", schema).value(), (RelationLabel{"Other", Direction::kNone}));
  EXPECT_EQ(parse_rc_answer("treatment-for", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("flies-with", schema).failure(), ParseFailure::kUnknownRelation);
}

TEST(ParseRc, Failures) {
  const auto schema = rc_schema();
  EXPECT_EQ(parse_rc_answer("flies-with(e1,e2)", schema).failure(), ParseFailure::kUnknownRelation);
  EXPECT_EQ(parse_rc_answer("", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("(e1,e2)", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(e1,e2", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(e1,e2) extra", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(e1;e2)", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(e3,e1)", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(Counseling, depression)", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_rc_answer("treatment-for(e1,e2)(e1,e2)", schema).failure(), ParseFailure::kBadGrammar);
}

TEST(ParseRc, RoundTripProperty) {
  const auto schema = rc_schema();
  for (const auto& rel : schema.relations()) {
    for (auto dir : {Direction::kE1ToE2, Direction::kE2ToE1}) {
      RelationLabel label{rel.name, rel.directionless_form ? Direction::kNone : dir};
      auto text = serialize_rc_answer(label, schema);
      auto back = parse_rc_answer(text, schema);
      ASSERT_TRUE(back) << text;
      EXPECT_EQ(back.value(), label) << text;
    }
  }
}

TEST(ParseRc, FuzzAcceptedAnswersRoundTrip) {
  const auto schema = rc_schema();
  std::mt19937_64 rng(3);
  const std::vector<std::string> atoms = {"treatment-for", "Other", "associated-with", "(", ")", ",", "e1", "e2",
                                          " ", "\t", "x", "TREATMENT-FOR", "e", "1", "2", "-"};
  std::size_t accepted = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    std::string s;
    for (int i = 0, n = static_cast<int>(rng() % 9); i < n; ++i) s += atoms[rng() % atoms.size()];
    auto parsed = parse_rc_answer(s, schema);
    if (!parsed) continue;
    ++accepted;
    auto again = parse_rc_answer(serialize_rc_answer(parsed.value(), schema), schema);
    ASSERT_TRUE(again) << s;
    EXPECT_EQ(again.value(), parsed.value()) << s;
  }
  EXPECT_GT(accepted, 0u);
}

TEST(ParseTe, Example) {
  auto t = parse_te_answer("[[Olanzapine:drug, risk-factor-of, weight gain:symptom]]", te_schema());
  ASSERT_TRUE(t);
  ASSERT_EQ(t.value().size(), 1u);
  EXPECT_EQ(t.value()[0], (Triplet{"Olanzapine", "drug", "risk-factor-of", "weight gain", "symptom"}));
}

TEST(ParseTe, EmptyList) {
  auto t = parse_te_answer("[]", te_schema());
  ASSERT_TRUE(t);
  EXPECT_TRUE(t.value().empty());
  EXPECT_TRUE(parse_te_answer(" [ ] ", te_schema()));
  EXPECT_TRUE(parse_te_response("<answer>[]</answer>", te_schema()).response.format_ok);
}

TEST(ParseTe, Failures) {
  const auto schema = te_schema();
  EXPECT_EQ(parse_te_answer("[[a:drug, risk-factor-of]]", schema).failure(), ParseFailure::kBadTripletShape);
  EXPECT_EQ(parse_te_answer("[[a, risk-factor-of, b:drug]]", schema).failure(), ParseFailure::kBadTripletShape);
  EXPECT_EQ(parse_te_answer("[[a:drug, cures, b:drug]]", schema).failure(), ParseFailure::kUnknownRelation);
  EXPECT_EQ(parse_te_answer("[[a:gene, risk-factor-of, b:drug]]", schema).failure(), ParseFailure::kUnknownEntityType);
  EXPECT_EQ(parse_te_answer("a:drug, risk-factor-of, b:drug", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_te_answer("[[a:drug, risk-factor-of, b:drug]", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_te_answer("[[a:drug, risk-factor-of, b:drug]] x", schema).failure(), ParseFailure::kBadGrammar);
  EXPECT_EQ(parse_te_answer("[[ :drug, risk-factor-of, b:drug]]", schema).failure(), ParseFailure::kBadTripletShape);
}

TEST(ParseTe, CanonicalCasingAndVerbatimSurfaces) {
  auto t = parse_te_answer("[[  The  Drug X :DRUG, Risk-Factor-Of, a:b:Symptom ]]", te_schema());
  ASSERT_TRUE(t);
  EXPECT_EQ(t.value()[0], (Triplet{"The  Drug X", "drug", "risk-factor-of", "a:b", "symptom"}));
}

TEST(ParseTe, RoundTripProperty) {
  const auto schema = te_schema();
  std::mt19937_64 rng(5);
  const std::string alphabet = "abcXYZ 09-:'.";
  auto surface = [&] {
    for (;;) {
      std::string s;
      for (int i = 0, n = 1 + static_cast<int>(rng() % 12); i < n; ++i) s += alphabet[rng() % alphabet.size()];
      if (std::string(trim(s)) == s && !s.empty()) return s;
    }
  };
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<Triplet> triplets;
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
      const auto& types = schema.entity_types();
      triplets.push_back({surface(), types[rng() % types.size()], schema.relations()[rng() % 2].name, surface(),
                          types[rng() % types.size()]});
    }
    auto text = serialize_te_answer(triplets);
    auto back = parse_te_answer(text, schema);
    ASSERT_TRUE(back) << text;
    EXPECT_EQ(back.value(), triplets) << text;
  }
}

TEST(ParseResponse, FormatOkIffNoFailure) {
  const auto schema = rc_schema();
  auto ok = parse_rc_response("<answer>treatment-for(e1,e2)</answer>", schema);
  EXPECT_TRUE(ok.response.format_ok);
  EXPECT_FALSE(ok.response.failure);
  EXPECT_TRUE(ok.label);
  auto bad = parse_rc_response("<answer>nope(e1,e2)</answer>", schema);
  EXPECT_FALSE(bad.response.format_ok);
  EXPECT_EQ(bad.response.failure, ParseFailure::kUnknownRelation);
  EXPECT_EQ(bad.response.answer_text, "nope(e1,e2)");
  auto none = parse_rc_response("plain", schema);
  EXPECT_FALSE(none.response.answer_text);
  EXPECT_EQ(none.response.failure, ParseFailure::kNoAnswerTag);
}

TEST(NormalizeLabel, SymmetricRelationsLoseDirection) {
  const auto schema = rc_schema();
  EXPECT_EQ(normalize_label({"associated-with", Direction::kE2ToE1}, schema).direction, Direction::kNone);
  EXPECT_EQ(normalize_label({"treatment-for", Direction::kE2ToE1}, schema).direction, Direction::kE2ToE1);
}

}  // namespace
}  // namespace revr
