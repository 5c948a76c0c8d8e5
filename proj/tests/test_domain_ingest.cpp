#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "exprkg/domain_ingest.hpp"
#include "exprkg/rdf_store.hpp"

using namespace exprkg;

namespace {

OntologySource obo(const std::string& s) {
    std::istringstream in(s);
    return parse_obo(in);
}

AnnotationSource gaf(const std::string& s) {
    std::istringstream in(s);
    return parse_gaf(in);
}

InteractionSource links(const std::string& s, int min_score) {
    std::istringstream in(s);
    return parse_string_links(in, min_score);
}

std::string gaf_row(const std::string& protein, const std::string& qualifier, const std::string& go) {
    return "UniProtKB\t" + protein + "\t" + protein + "\t" + qualifier + "\t" + go + "\tPMID:1\tIEA\t\tF\t\t\tprotein\ttaxon:9606\t20240101\tX\n";
}

} // namespace

TEST(Obo, TermWithParent) {
    auto o = obo("[Term]\nid: GO:0000001\nname: root\n\n[Term]\nid: GO:0000002\nis_a: GO:0000001 ! root\n");
    ASSERT_EQ(o.terms.size(), 2u);
    EXPECT_EQ(o.terms[1].id, "GO:0000002");
    ASSERT_EQ(o.terms[1].parents.size(), 1u);
    EXPECT_EQ(o.terms[1].parents[0], "GO:0000001");
    EXPECT_EQ(o.dropped_parents, 0u);
}

TEST(Obo, ObsoleteStanzaSkipped) {
    auto o = obo("[Term]\nid: GO:0000001\n\n[Term]\nid: GO:0000009\nis_obsolete: true\n");
    EXPECT_EQ(o.terms.size(), 1u);
    EXPECT_EQ(o.obsolete_skipped, 1u);
}

TEST(Obo, RelationshipBecomesTypedRelation) {
    auto o = obo("[Term]\nid: GO:0000001\n\n[Term]\nid: GO:0000003\nrelationship: part_of GO:0000001 ! root\n");
    ASSERT_EQ(o.terms[1].relations.size(), 1u);
    EXPECT_EQ(o.terms[1].relations[0].first, "part_of");
    EXPECT_EQ(o.terms[1].relations[0].second, "GO:0000001");
}

TEST(Obo, UnresolvedParentDroppedAndCounted) {
    auto o = obo("[Term]\nid: GO:0000002\nis_a: GO:0000077\n");
    EXPECT_TRUE(o.terms[0].parents.empty());
    EXPECT_EQ(o.dropped_parents, 1u);
}

TEST(Obo, TypedefStanzasIgnored) {
    auto o = obo("format-version: 1.2\n[Typedef]\nid: part_of\nname: part of\n[Term]\nid: GO:1\n");
    ASSERT_EQ(o.terms.size(), 1u);
    EXPECT_EQ(o.terms[0].id, "GO:1");
}

TEST(Obo, MissingIdIsParseErrorWithLine) {
    try {
        obo("[Term]\nid: GO:1\n\n[Term]\nname: nameless\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Gaf, ValidRowCommentAndNot) {
    auto a = gaf("!gaf-version: 2.2\n" + gaf_row("P12345", "enables", "GO:0000001") +
                 gaf_row("P99999", "NOT|enables", "GO:0000001"));
    ASSERT_EQ(a.records.size(), 1u);
    EXPECT_EQ(a.records[0].protein, "P12345");
    EXPECT_EQ(a.records[0].go_id, "GO:0000001");
    EXPECT_EQ(a.records[0].qualifier, "enables");
    EXPECT_EQ(a.negated_skipped, 1u);
}

TEST(Gaf, ShortRowIsParseError) {
    try {
        gaf("!c\nUniProtKB\tP1\tP1\tenables\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(StringLinks, ThresholdFilter) {
    std::string rows = "p1 p2 900\np1 p3 400\n";
    EXPECT_EQ(links(rows, 700).records.size(), 1u);
    EXPECT_EQ(links(rows, 700).below_threshold, 1u);
    EXPECT_EQ(links(rows, 0).records.size(), 2u);
}

TEST(StringLinks, HeaderSkipped) {
    std::string rows = "p1 p2 900\np1 p3 400\np2 p4 750\n";
    auto without = links(rows, 0);
    auto with = links("protein1 protein2 combined_score\n" + rows, 0);
    ASSERT_EQ(with.records.size(), without.records.size());
    for (std::size_t i = 0; i < with.records.size(); ++i) {
        EXPECT_EQ(with.records[i].protein_a, without.records[i].protein_a);
        EXPECT_EQ(with.records[i].score, without.records[i].score);
    }
}

TEST(StringLinks, NonIntegerScoreOnDataRowIsError) {
    try {
        links("p1 p2 900\np1 p3 high\n", 0);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(IdMapping, MultiMapAndPartial) {
    std::istringstream in("g1\tp1\ng1\tp2\ng2\tp3\n");
    auto m = parse_id_mapping(in);
    ASSERT_NE(m.find("g1"), nullptr);
    EXPECT_EQ(*m.find("g1"), (std::vector<std::string>{"p1", "p2"}));
    EXPECT_EQ(m.find("G1"), nullptr);  // case-sensitive
    EXPECT_EQ(m.find("g9"), nullptr);
}

TEST(IdMapping, EmptyFileAndBadRows) {
    std::istringstream empty("");
    EXPECT_TRUE(parse_id_mapping(empty).empty());
    std::istringstream three("g1\tp1\textra\n");
    EXPECT_THROW(parse_id_mapping(three), ParseError);
    std::istringstream blank_col("g1\t\n");
    EXPECT_THROW(parse_id_mapping(blank_col), ParseError);
}

TEST(DomainTriples, TermWithParentGivesTwoTriples) {
    auto o = obo("[Term]\nid: GO:0000001\n[Term]\nid: GO:0000002\nis_a: GO:0000001\n");
    OntologySource one;
    one.terms.push_back(o.terms[1]);
    auto ts = domain_triples(one, {}, {}, Namespace{});
    ASSERT_EQ(ts.size(), 2u);
    EXPECT_EQ(ts[0].predicate, Namespace::rdf_type());
    EXPECT_EQ(ts[1].predicate, Namespace::subclass_of());
    EXPECT_EQ(std::get<Iri>(ts[1].object).text, "http://purl.obolibrary.org/obo/GO_0000001");
}

TEST(DomainTriples, InteractionIsSymmetricAndTyped) {
    InteractionSource is;
    is.records.push_back({"pa", "pb", 900});
    auto ts = domain_triples({}, {}, is, Namespace{});
    Graph g;
    std::size_t interacts = 0, types = 0;
    for (const auto& t : ts) {
        if (!g.insert(t)) continue;
        if (t.predicate == Namespace{}.interacts_with()) ++interacts;
        if (t.predicate == Namespace::rdf_type()) ++types;
    }
    EXPECT_EQ(interacts, 2u);
    EXPECT_EQ(types, 2u);
}

TEST(DomainTriples, EmptySources) { EXPECT_TRUE(domain_triples({}, {}, {}, Namespace{}).empty()); }

TEST(DomainTriples, CountFormulaAndSymmetryOnRandomSources) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 10; ++round) {
        std::uniform_int_distribution<int> small(0, 4);
        std::ostringstream o;
        int n_terms = 3 + small(rng), n_parents = 0, n_rel = 0;
        for (int t = 0; t < n_terms; ++t) {
            o << "[Term]\nid: GO:" << t << "\n";
            for (int p = 0; p < t && p < small(rng); ++p, ++n_parents) o << "is_a: GO:" << p << "\n";
            if (t > 0 && small(rng) == 0) {
                o << "relationship: part_of GO:0\n";
                ++n_rel;
            }
        }
        auto onto = obo(o.str());
        ASSERT_EQ(onto.dropped_parents, 0u);

        std::string g;
        int n_ann = small(rng) + 1;
        for (int a = 0; a < n_ann; ++a) g += gaf_row("P" + std::to_string(a % 3), "enables", "GO:0");
        auto ann = gaf(g);

        std::string l;
        int n_int = small(rng);
        for (int i = 0; i < n_int; ++i) l += "P" + std::to_string(i) + " Q" + std::to_string(i) + " 800\n";
        auto inter = links(l, 700);

        auto ts = domain_triples(onto, ann, inter, Namespace{});
        EXPECT_EQ(ts.size(), static_cast<std::size_t>(n_terms + n_parents + n_rel + 2 * n_ann + 4 * n_int));

        Graph graph;
        for (const auto& t : ts) graph.insert(t);
        const Iri iw = Namespace{}.interacts_with();
        for (const auto& t : graph.triples())
            if (t.predicate == iw) {
                EXPECT_TRUE(graph.contains({t.object, iw, t.subject}));
            }
    }
}
