import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import levenshtein_matrix
from semtype.embeddings import EmbeddingStore, cosine, load_embeddings
from semtype.errors import ParseError
from semtype.headers import match_header, semantic_match, syntactic_match
from semtype.textnorm import levenshtein, normalize_name


class TestLoadEmbeddings:
    def test_two_rows(self):
        store = load_embeddings(b"a 1 0\nb 0 1\n")
        assert store.dimension == 2
        assert len(store.vectors) == 2

    def test_inconsistent_dimension_names_token(self):
        with pytest.raises(ParseError, match="b"):
            load_embeddings(b"a 1 0\nb 0 1 1\n")

    def test_header_line(self):
        store = load_embeddings(b"2 2\na 1 0\nb 0 1\n")
        assert store.dimension == 2
        assert len(store.vectors) == 2

    def test_empty_file(self):
        with pytest.raises(ParseError):
            load_embeddings(b"")

    def test_absent_token_is_none(self):
        store = load_embeddings(b"a 1 0\n")
        assert store.vector("zzz") is None


class TestSyntactic:
    def test_exact_match_scores_one(self, tiny_ontology):
        pred = syntactic_match("Salary", tiny_ontology)
        assert pred.scores["salary"] == 1.0

    def test_synonym_exact_match(self, tiny_ontology):
        pred = syntactic_match("wage", tiny_ontology)
        assert pred.scores["salary"] == 1.0

    def test_empty_header_empty_scores(self, tiny_ontology):
        assert syntactic_match("", tiny_ontology).scores == {}

    def test_fuzzy_score_from_dp_oracle(self, tiny_ontology):
        # derived with the full-matrix DP oracle: dist("salaries","salary") = 3
        dist = levenshtein_matrix("salaries", "salary")
        assert dist == 3
        expected = 1 - dist / len("salaries")
        pred = syntactic_match("salaries", tiny_ontology)
        assert pred.scores["salary"] == pytest.approx(expected)

    def test_below_floor_dropped(self, tiny_ontology):
        pred = syntactic_match("qqqqqq", tiny_ontology)
        assert pred.scores == {}

    def test_unknown_not_matched(self, tiny_ontology):
        pred = syntactic_match("unknown", tiny_ontology)
        assert "unknown" not in pred.scores

    @given(st.text(max_size=20))
    def test_invariant_under_normalization(self, header):
        from semtype.ontology import load_ontology

        ontology = load_ontology(b"version\t1\nsalary\tsalary\t-\twage\n")
        a = syntactic_match(header, ontology).scores
        b = syntactic_match(normalize_name(header), ontology).scores
        assert a == b

    @given(st.text(max_size=12), st.text(max_size=12))
    def test_levenshtein_matches_matrix_oracle(self, a, b):
        assert levenshtein(a, b) == levenshtein_matrix(a, b)


class TestSemantic:
    def test_identical_token_cosine_one(self, tiny_ontology, tiny_embeddings):
        pred = semantic_match("salary", tiny_ontology, tiny_embeddings)
        assert pred.scores["salary"] == pytest.approx(1.0)

    def test_hand_computed_cosines(self, tiny_ontology, tiny_embeddings):
        # income=(1,1) vs salary=(2,2) -> 1.0; vs date=(1,-1) -> 0 (clamped)
        pred = semantic_match("income", tiny_ontology, tiny_embeddings)
        assert pred.scores["salary"] == pytest.approx(1.0)
        assert "date" not in pred.scores

    def test_orthogonal_vectors_score_zero(self):
        store = EmbeddingStore(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})
        assert cosine(store.vector("a"), store.vector("b")) == 0.0

    def test_oov_header_empty(self, tiny_ontology, tiny_embeddings):
        pred = semantic_match("zzz", tiny_ontology, tiny_embeddings)
        assert pred.scores == {}

    def test_scale_invariance(self, tiny_ontology):
        small = EmbeddingStore(
            2, {"income": np.array([1.0, 1.0]), "salary": np.array([2.0, 2.0])}
        )
        big = EmbeddingStore(
            2, {"income": np.array([10.0, 10.0]), "salary": np.array([0.2, 0.2])}
        )
        a = semantic_match("income", tiny_ontology, small).scores
        b = semantic_match("income", tiny_ontology, big).scores
        assert a == pytest.approx(b)


class TestCombined:
    def test_exact_short_circuits_semantic(self, tiny_ontology):
        # embeddings that would disagree are never consulted on exact match
        store = EmbeddingStore(
            2, {"salary": np.array([1.0, 0.0]), "date": np.array([1.0, 0.0])}
        )
        pred = match_header("salary", tiny_ontology, store)
        assert pred.scores["salary"] == 1.0
        assert "date" not in pred.scores

    def test_max_of_both_signals(self, tiny_ontology):
        # syntactic("salaries","salary") = 0.625; semantic = 1.0 -> max wins
        store = EmbeddingStore(
            2, {"salaries": np.array([1.0, 1.0]), "salary": np.array([2.0, 2.0])}
        )
        pred = match_header("salaries", tiny_ontology, store)
        assert pred.scores["salary"] == pytest.approx(1.0)

    def test_no_signal_empty(self, tiny_ontology, tiny_embeddings):
        pred = match_header("zzzzz", tiny_ontology, tiny_embeddings)
        assert pred.scores == {}

    def test_all_confidences_in_unit_interval(self, tiny_ontology, tiny_embeddings):
        for header in ("salary", "salaries", "income", "cty", "date of birth"):
            pred = match_header(header, tiny_ontology, tiny_embeddings)
            assert all(0.0 <= c <= 1.0 for c in pred.scores.values())
