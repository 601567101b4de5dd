#include "revr/corpus.hpp"

#include <gtest/gtest.h>

#include "revr/io.hpp"
#include "temp_dir.hpp"

namespace revr {
namespace {

using testing::TempDir;

RelationSchema mdkg() {
  return RelationSchema(Task::kRc, {{"treatment-for", true, false},
                                    {"associated-with", false, false},
                                    {"hyponym-of", true, false}});
}

RelationSchema mdkg_te() {
  return RelationSchema(Task::kTe, {{"risk-factor-of", true, false}}, {"drug", "symptom"});
}

TagErrorKind tag_error_of(std::string_view text, EntityTag* tag = nullptr) {
  try {
    extract_entity_spans(text);
  } catch (const TagError& e) {
    if (tag != nullptr) *tag = e.tag();
    return e.kind();
  }
  ADD_FAILURE() << "no TagError for " << text;
  return TagErrorKind::kMissingTag;
}

TEST(EntitySpans, ExampleSentence) {
  auto s = extract_entity_spans(
      "Many <e1>Counseling interventions</e1> can be effective in preventing <e2>perinatal depression</e2>.");
  EXPECT_EQ(s.e1, "Counseling interventions");
  EXPECT_EQ(s.e2, "perinatal depression");
}

TEST(EntitySpans, TagOrderIrrelevant) {
  auto s = extract_entity_spans("<e2>b</e2> before <e1>a</e1>");
  EXPECT_EQ(s.e1, "a");
  EXPECT_EQ(s.e2, "b");
}

TEST(EntitySpans, ErrorsAreDistinguished) {
  EntityTag tag = EntityTag::kE1;
  EXPECT_EQ(tag_error_of("<e1>a</e1> only", &tag), TagErrorKind::kMissingTag);
  EXPECT_EQ(tag, EntityTag::kE2);
  EXPECT_EQ(tag_error_of("<e1>a</e1> <e1>c</e1> <e2>b</e2>"), TagErrorKind::kDuplicateTag);
  EXPECT_EQ(tag_error_of("</e1>a<e1> <e2>b</e2>"), TagErrorKind::kCrossedNesting);
  EXPECT_EQ(tag_error_of("<e1>a <e2>b</e1> c</e2>"), TagErrorKind::kCrossedNesting);
  EXPECT_EQ(tag_error_of("<e1>a <e2>b</e2></e1>"), TagErrorKind::kCrossedNesting);
  EXPECT_EQ(tag_error_of("<e1> </e1> <e2>b</e2>", &tag), TagErrorKind::kEmptySpan);
  EXPECT_EQ(tag, EntityTag::kE1);
  EXPECT_EQ(tag_error_of("no tags"), TagErrorKind::kMissingTag);
}

TEST(Prompt, RcTemplateContainsInstructionAndSlots) {
  const auto tmpl = rc_prompt_template();
  EXPECT_NE(tmpl.find("{Annotation guide}"), std::string_view::npos);
  EXPECT_NE(tmpl.find("{Sentence}"), std::string_view::npos);
  EXPECT_NE(tmpl.find("<answer> Product-Producer(e1,e2) </answer>"), std::string_view::npos);
}

TEST(Prompt, RcRenderSubstitutesVerbatim) {
  AnnotationGuide guide{"treatment-for(X, Y): X treats Y.\n", ""};
  auto s = TaggedSentence::rc("<e1>Counseling interventions</e1> prevent <e2>perinatal depression</e2>.");
  auto p = render_rc_prompt(guide, s);
  EXPECT_NE(p.text.find(guide.relation_guide), std::string::npos);
  EXPECT_NE(p.text.find(s.text), std::string::npos);
  EXPECT_EQ(p.text.find("{Sentence}"), std::string::npos);
  EXPECT_EQ(p.text.find("{Annotation guide}"), std::string::npos);
  EXPECT_NE(p.text.find("<answer> Product-Producer(e1,e2) </answer>"), std::string::npos);
  EXPECT_EQ(render_rc_prompt(guide, s).text, p.text);
}

TEST(Prompt, SlotTextInsideValuesIsNotExpanded) {
  AnnotationGuide guide{"mentions {Sentence} literally", ""};
  auto s = TaggedSentence::rc("<e1>a</e1> {Annotation guide} <e2>b</e2>");
  auto p = render_rc_prompt(guide, s);
  EXPECT_NE(p.text.find("mentions {Sentence} literally"), std::string::npos);
  EXPECT_NE(p.text.find("<e1>a</e1> {Annotation guide} <e2>b</e2>"), std::string::npos);
}

TEST(Prompt, RcTemplateRendersToTemplateLength) {
  AnnotationGuide guide{"G", ""};
  auto s = TaggedSentence::rc("<e1>a</e1><e2>b</e2>");
  const auto tmpl = rc_prompt_template();
  const auto expected = tmpl.size() - std::string_view("{Annotation guide}").size() -
                        std::string_view("{Sentence}").size() + guide.relation_guide.size() + s.text.size();
  EXPECT_EQ(render_rc_prompt(guide, s).text.size(), expected);
}

TEST(Prompt, TeRender) {
  AnnotationGuide guide{"REL-GUIDE", "ENT-GUIDE"};
  auto s = TaggedSentence::plain("Olanzapine causes weight gain.");
  auto p = render_te_prompt(guide, s);
  EXPECT_NE(p.text.find("REL-GUIDE"), std::string::npos);
  EXPECT_NE(p.text.find("ENT-GUIDE"), std::string::npos);
  EXPECT_NE(p.text.find(s.text), std::string::npos);
  EXPECT_NE(p.text.find("list of triplets"), std::string::npos);
  EXPECT_EQ(p.text.find("{Annotation guide"), std::string::npos);
  EXPECT_EQ(render_te_prompt(guide, s).text, p.text);
}

TEST(Prompt, TemplatesMatchResourceFiles) {
  const std::filesystem::path root = REVR_SOURCE_DIR;
  EXPECT_EQ(rc_prompt_template(), read_file(root / "resources/prompts/rc_prompt_v1.txt"));
  EXPECT_EQ(te_prompt_template(), read_file(root / "resources/prompts/te_prompt_v1.txt"));
}

TEST(RcDataset, LoadsLabel) {
  TempDir dir;
  auto path = dir.write("d.jsonl",
                        R"j({"id": "a", "sentence": "x <e1>a</e1> y <e2>b</e2> z", "label": "treatment-for(e1,e2)"})j"
                        "\n\n"
                        R"j({"id": "b", "sentence": "<e1>a</e1> <e2>b</e2>", "label": "Hyponym-Of(e2,e1)"})j"
                        "\n");
  auto data = load_rc_dataset(path, mdkg());
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].gold, (RelationLabel{"treatment-for", Direction::kE1ToE2}));
  EXPECT_EQ(data[0].sentence.e1, "a");
  EXPECT_EQ(data[0].line, 1u);
  EXPECT_EQ(data[1].gold, (RelationLabel{"hyponym-of", Direction::kE2ToE1}));
  EXPECT_EQ(data[1].line, 3u);
}

DatasetError dataset_error(const std::string& contents, bool te = false) {
  TempDir dir;
  auto path = dir.write("d.jsonl", contents);
  try {
    if (te) {
      load_te_dataset(path, mdkg_te());
    } else {
      load_rc_dataset(path, mdkg());
    }
  } catch (const DatasetError& e) {
    return e;
  }
  ADD_FAILURE() << "no DatasetError";
  return DatasetError(DatasetErrorKind::kMalformedLine, 0, "");
}

TEST(RcDataset, Errors) {
  const std::string ok = R"j({"id": "a", "sentence": "<e1>a</e1> <e2>b</e2>", "label": "treatment-for(e1,e2)"})j";
  auto e = dataset_error(ok + "\n" + R"j({"id": "b", "sentence": "<e1>a</e1> <e2>b</e2>", "label": "flies-with(e1,e2)"})j");
  EXPECT_EQ(e.kind(), DatasetErrorKind::kUnknownRelation);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(std::string(e.what()).rfind("line 2: ", 0), 0u);

  EXPECT_EQ(dataset_error("{broken\n").kind(), DatasetErrorKind::kMalformedLine);
  EXPECT_EQ(dataset_error("[1, 2]\n").kind(), DatasetErrorKind::kMalformedLine);
  EXPECT_EQ(dataset_error(R"j({"id": "a", "sentence": "<e1>a</e1>", "label": "treatment-for(e1,e2)"})j").kind(),
            DatasetErrorKind::kTagViolation);
  EXPECT_EQ(dataset_error(R"j({"id": "a", "sentence": "<e1>a</e1> <e2>b</e2>", "label": "treatment-for(e1,e1)"})j").kind(),
            DatasetErrorKind::kMalformedLine);
  EXPECT_EQ(dataset_error(ok + "\n" + ok + "\n").kind(), DatasetErrorKind::kDuplicateId);
  EXPECT_EQ(dataset_error(R"j({"sentence": "<e1>a</e1> <e2>b</e2>", "label": "treatment-for(e1,e2)"})j").kind(),
            DatasetErrorKind::kMalformedLine);
}

TEST(TeDataset, LoadsTriplets) {
  TempDir dir;
  auto path = dir.write("d.jsonl",
                        R"j({"id": "t", "sentence": "Olanzapine causes weight gain.", "triplets": [["Olanzapine", "drug", "risk-factor-of", "weight gain", "symptom"]]})j"
                        "\n"
                        R"j({"id": "u", "sentence": "Nothing here.", "triplets": []})j"
                        "\n");
  auto data = load_te_dataset(path, mdkg_te());
  ASSERT_EQ(data.size(), 2u);
  ASSERT_EQ(data[0].gold.size(), 1u);
  EXPECT_EQ(data[0].gold[0], (Triplet{"Olanzapine", "drug", "risk-factor-of", "weight gain", "symptom"}));
  EXPECT_TRUE(data[1].gold.empty());
}

TEST(TeDataset, Errors) {
  EXPECT_EQ(dataset_error(R"j({"id": "t", "sentence": "s", "triplets": [["a", "drug", "cures", "b", "symptom"]]})j", true).kind(),
            DatasetErrorKind::kUnknownRelation);
  EXPECT_EQ(dataset_error(R"j({"id": "t", "sentence": "s", "triplets": [["a", "gene", "risk-factor-of", "b", "symptom"]]})j", true).kind(),
            DatasetErrorKind::kUnknownEntityType);
  EXPECT_EQ(dataset_error(R"j({"id": "t", "sentence": "s", "triplets": [["a", "drug", "risk-factor-of"]]})j", true).kind(),
            DatasetErrorKind::kMalformedLine);
  EXPECT_EQ(dataset_error(R"j({"id": "t", "sentence": "s"})j", true).kind(), DatasetErrorKind::kMalformedLine);
}

TEST(RcDataset, OrderPreservingAndIdempotent) {
  const std::filesystem::path fixtures = REVR_FIXTURE_DIR;
  auto schema = load_schema(fixtures / "mini_rc/schema.json");
  auto a = load_rc_dataset(fixtures / "mini_rc/gold.jsonl", schema);
  auto b = load_rc_dataset(fixtures / "mini_rc/gold.jsonl", schema);
  ASSERT_EQ(a.size(), 20u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].gold, b[i].gold);
    EXPECT_EQ(a[i].line, i + 1);
    EXPECT_NO_THROW(extract_entity_spans(a[i].sentence.text));
  }
  EXPECT_EQ(a.front().id, "g01");
  EXPECT_EQ(a.back().id, "g20");
}

}  // namespace
}  // namespace revr
