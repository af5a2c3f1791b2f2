// Copyright 2026 The Corefens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "corefens/corpus.h"
#include "corefens/errors.h"

namespace corefens {
namespace {

constexpr char kNested[] =
    "#begin document (d1); part 000\n"
    "d1\t0\t0\tThe\t(0\n"
    "d1\t0\t1\tcat\t0)\n"
    "d1\t0\t2\tsaw\t-\n"
    "d1\t0\t3\tits\t(0)|(1\n"
    "d1\t0\t4\ttail\t1)\n"
    "#end document\n";

TEST_CASE("ParseConll reads nested and single-token spans") {
  const Corpus corpus = ParseConll(kNested);
  REQUIRE(corpus.size() == 1);
  const Document &doc = corpus.documents[0];
  CHECK(doc.id == "d1");
  CHECK(doc.size() == 5);
  CHECK(doc.tokens[3].text == "its");
  REQUIRE(doc.gold_clusters.size() == 2);
  CHECK(doc.gold_clusters[0].spans ==
        std::vector<MentionSpan>{{0, 1}, {3, 3}});
  CHECK(doc.gold_clusters[1].spans == std::vector<MentionSpan>{{3, 4}});
}

TEST_CASE("EmitConll round-trips") {
  const Corpus corpus = ParseConll(kNested);
  const std::string text = EmitConll(corpus);
  CHECK(text == kNested);
  CHECK(ParseConll(text).documents == corpus.documents);
}

TEST_CASE("Column layouts pick the word column") {
  const Corpus three = ParseConll(
      "#begin document (a); part 000\n0 Hello (0)\n1 there -\n#end document\n");
  CHECK(three.documents[0].tokens[0].text == "Hello");
  const Corpus two = ParseConll(
      "#begin document (b); part 000\nHi (0)\nyou (0)\n#end document\n");
  CHECK(two.documents[0].tokens[1].text == "you");
  CHECK(two.documents[0].gold_clusters[0].spans.size() == 2);
}

TEST_CASE("Non-zero parts get distinct ids") {
  const Corpus corpus = ParseConll(
      "#begin document (x); part 000\nx 0 0 a -\n#end document\n"
      "#begin document (x); part 001\nx 1 0 b -\n#end document\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.documents[1].id == "x/part_001");
}

TEST_CASE("Malformed CoNLL throws ParseError") {
  CHECK_THROWS_AS(ParseConll("d 0 0 a -\n"), ParseError);
  CHECK_THROWS_AS(ParseConll("#begin document (d); part 000\nd 0 0 a (0\n"
                             "#end document\n"),
                  ParseError);
  CHECK_THROWS_AS(ParseConll("#begin document (d); part 000\nd 0 0 a 0)\n"
                             "#end document\n"),
                  ParseError);
  CHECK_THROWS_AS(ParseConll("#begin document (d); part 000\nd 0 0 a -\n"),
                  ParseError);
  CHECK_THROWS_AS(
      ParseConll("#begin document (d); part 000\nd 0 0 a -\n#end document\n"
                 "#begin document (d); part 000\nd 0 0 a -\n#end document\n"),
      ParseError);
}

TEST_CASE("Document::Make validates clusters") {
  const std::vector<std::string> words = {"a", "b", "c"};
  CHECK_THROWS_AS(Document::Make("d", words, {Cluster{{{0, 3}}}}), DataError);
  CHECK_THROWS_AS(Document::Make("d", words, {Cluster{{}}}), DataError);
  CHECK_THROWS_AS(
      Document::Make("d", words, {Cluster{{{0, 0}}}, Cluster{{{0, 0}}}}),
      DataError);
  const Document doc = Document::Make(
      "d", words, {Cluster{{{2, 2}}}, Cluster{{{1, 1}, {0, 0}}}});
  CHECK(doc.gold_clusters[0].spans == std::vector<MentionSpan>{{0, 0}, {1, 1}});
}

TEST_CASE("WithoutSingletons and ClusterIndex") {
  const Clustering clusters = {Cluster{{{0, 0}, {2, 2}}}, Cluster{{{1, 1}}}};
  CHECK(WithoutSingletons(clusters).size() == 1);
  const auto index = ClusterIndex(clusters);
  CHECK(index.at({2, 2}) == 0);
  CHECK(index.at({1, 1}) == 1);
}

TEST_CASE("Synthetic generator is deterministic and well formed") {
  SyntheticConfig config;
  const Corpus a = GenerateSynthetic(config, 42);
  const Corpus b = GenerateSynthetic(config, 42);
  const Corpus c = GenerateSynthetic(config, 43);
  CHECK(a.documents == b.documents);
  CHECK_FALSE(a.documents == c.documents);
  REQUIRE(a.size() == static_cast<size_t>(config.num_docs));
  for (const Document &doc : a.documents) {
    CHECK(doc.size() == config.doc_len);
    CHECK(doc.language == config.language);
    CHECK(doc.gold_clusters.size() == static_cast<size_t>(config.num_entities));
  }
  CHECK(ParseConll(EmitConll(a)).documents.size() == a.size());
}

TEST_CASE("Synthetic filler prefix changes only the filler vocabulary") {
  SyntheticConfig config;
  config.filler_prefix = "v";
  const Corpus corpus = GenerateSynthetic(config, 1);
  for (const Document &doc : corpus.documents) {
    for (const Token &t : doc.tokens) {
      const bool name = t.text.starts_with("Nom") || t.text.starts_with("Fam");
      if (!name) CHECK(t.text.starts_with("v"));
    }
  }
}

TEST_CASE("Synthetic singletons") {
  SyntheticConfig config;
  config.singleton_fraction = 1.0;
  const Corpus corpus = GenerateSynthetic(config, 3);
  for (const Document &doc : corpus.documents) {
    CHECK(WithoutSingletons(doc.gold_clusters).empty());
  }
}

TEST_CASE("Synthetic generator rejects impossible configs") {
  SyntheticConfig config;
  config.doc_len = 5;
  CHECK_THROWS_AS(GenerateSynthetic(config, 1), ConfigError);
}

TEST_CASE("GenerateSyntheticSplits sizes and independence") {
  const SyntheticSplits splits =
      GenerateSyntheticSplits(SyntheticConfig{}, 4, 2, 3, 9);
  CHECK(splits.train.size() == 4);
  CHECK(splits.dev.size() == 2);
  CHECK(splits.test.size() == 3);
  CHECK(splits.dev.split == Split::kDev);
  CHECK(splits.train.documents[0].id != splits.test.documents[0].id);
  const SyntheticSplits again =
      GenerateSyntheticSplits(SyntheticConfig{}, 4, 2, 3, 9);
  CHECK(again.test.documents == splits.test.documents);
}

}  // namespace
}  // namespace corefens
