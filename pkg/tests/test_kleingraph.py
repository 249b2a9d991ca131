import pytest

from kleinsig.kleingraph import (
    COLOR_CLASH,
    NOT_TRIVALENT,
    Edge,
    GraphError,
    KleinGraph,
    ParseError,
    bicolor_subgraph,
    canonical_pair,
    format_graph,
    is_three_hamiltonian,
    parse_graph,
    third_color,
    validate_klein,
    vertex_connected_sum,
)

from conftest import fixture_text

FIXTURE_GRAPHS = ["theta.kg", "k4.kg", "pentagon.kg", "k33.kg"]


def theta():
    return parse_graph(fixture_text("theta.kg"))


class TestColors:
    def test_pair_canonicalization(self):
        assert canonical_pair("a", "b") == "ab"
        assert canonical_pair("b", "a") == "ab"
        assert canonical_pair("ac") == "ca"
        assert third_color("a", "b") == "c"
        assert third_color("c", "a") == "b"

    def test_bad_pair(self):
        with pytest.raises(ValueError):
            canonical_pair("a", "a")


class TestValidate:
    def test_theta_valid(self):
        g = theta()
        assert len(g.vertices) == 2 and len(g.edges) == 3

    def test_repeated_color_rejected(self):
        with pytest.raises(GraphError) as ei:
            validate_klein(["v", "w", "x"], [
                ("e1", "v", "w", "a"), ("e2", "v", "w", "a"), ("e3", "v", "x", "b"),
                ("e4", "w", "x", "b"), ("e5", "x", "x", "c"),
            ])
        kinds = {kind for kind, _ in ei.value.violations}
        assert COLOR_CLASH in kinds

    def test_non_trivalent_rejected(self):
        with pytest.raises(GraphError) as ei:
            validate_klein(["v", "w"], [("e1", "v", "w", "a")])
        assert (NOT_TRIVALENT, "v") in ei.value.violations

    def test_loop_rejected_as_color_clash(self):
        # a loop puts the same color twice at its vertex
        with pytest.raises(GraphError) as ei:
            validate_klein(["v", "w"], [
                ("e1", "v", "v", "a"), ("e2", "v", "w", "b"),
                ("e3", "w", "w", "c"), ("e4", "w", "v", "a"),
            ])
        assert any(kind == COLOR_CLASH for kind, _ in ei.value.violations)

    def test_empty_graph_valid_and_hamiltonian(self):
        g = validate_klein([], [])
        assert is_three_hamiltonian(g)

    @pytest.mark.parametrize("name", FIXTURE_GRAPHS)
    def test_fixture_corpus_validates(self, name):
        g = parse_graph(fixture_text(name))
        assert len(g.edges) == 3 * len(g.vertices) // 2
        assert len(g.vertices) % 2 == 0


class TestThreeHamiltonian:
    @pytest.mark.parametrize("name", FIXTURE_GRAPHS)
    def test_fixture_corpus_is_three_hamiltonian(self, name):
        assert is_three_hamiltonian(parse_graph(fixture_text(name)))

    def test_disjoint_union_of_thetas_fails(self):
        g = validate_klein(
            ["u", "v", "x", "y"],
            [("e1", "u", "v", "a"), ("e2", "u", "v", "b"), ("e3", "u", "v", "c"),
             ("f1", "x", "y", "a"), ("f2", "x", "y", "b"), ("f3", "x", "y", "c")],
        )
        assert not is_three_hamiltonian(g)


class TestBicolorSubgraph:
    def test_theta_pair_is_single_two_cycle(self):
        sub = bicolor_subgraph(theta(), "a", "b")
        assert len(sub.edges) == 2
        assert sub.component_count() == 1

    def test_symmetric_in_pair_order(self):
        g = theta()
        assert bicolor_subgraph(g, "a", "b") == bicolor_subgraph(g, "b", "a")

    def test_k4_pair_is_one_four_cycle(self):
        g = parse_graph(fixture_text("k4.kg"))
        for pair in ("ab", "bc", "ca"):
            sub = bicolor_subgraph(g, pair[0], pair[1])
            assert len(sub.edges) == 4
            assert sub.component_count() == 1

    @pytest.mark.parametrize("name", FIXTURE_GRAPHS)
    def test_all_degrees_two(self, name):
        g = parse_graph(fixture_text(name))
        for pair in ("ab", "bc", "ca"):
            sub = bicolor_subgraph(g, pair[0], pair[1])
            for v in sub.vertices:
                deg = sum((e.v1 == v) + (e.v2 == v) for e in sub.edges)
                assert deg == 2


class TestConnectedSum:
    def test_theta_theta_is_theta_shaped(self):
        g = vertex_connected_sum(theta(), "v", theta(), "u")
        assert len(g.vertices) == 2
        assert len(g.edges) == 3
        assert {e.color for e in g.edges} == {"a", "b", "c"}
        assert is_three_hamiltonian(g)

    def test_sum_with_theta_preserves_adjacency(self):
        k4 = parse_graph(fixture_text("k4.kg"))
        g = vertex_connected_sum(k4, "p1", theta(), "u")
        # p1 is replaced by theta's other vertex, wired to p1's old neighbors
        assert len(g.vertices) == 4
        assert len(g.edges) == 6
        new_v = next(v for v in g.vertices if v not in k4.vertices)
        colors_at = sorted(e.color for e in g.edges_at(new_v))
        assert colors_at == ["a", "b", "c"]
        neighbors = set()
        for e in g.edges_at(new_v):
            neighbors.add(e.v1 if e.v2 == new_v else e.v2)
        assert neighbors == {"p2", "p3", "p4"}

    @pytest.mark.parametrize("name", FIXTURE_GRAPHS)
    def test_sum_preserves_three_hamiltonicity(self, name):
        g1 = parse_graph(fixture_text(name))
        g2 = theta()
        s = vertex_connected_sum(g1, g1.vertices[0], g2, "u")
        assert is_three_hamiltonian(s) == (
            is_three_hamiltonian(g1) and is_three_hamiltonian(g2)
        )

    def test_sum_of_hamiltonian_and_split_graph(self):
        split = validate_klein(
            ["u", "v", "x", "y"],
            [("e1", "u", "v", "a"), ("e2", "u", "v", "b"), ("e3", "u", "v", "c"),
             ("f1", "x", "y", "a"), ("f2", "x", "y", "b"), ("f3", "x", "y", "c")],
        )
        s = vertex_connected_sum(theta(), "u", split, "x")
        assert not is_three_hamiltonian(s)


class TestParsing:
    def test_round_trip(self):
        g = theta()
        assert parse_graph(format_graph(g)) == g

    def test_bad_line(self):
        with pytest.raises(ParseError):
            parse_graph("vertex u\nnot a line\n")

    def test_bad_color(self):
        with pytest.raises(ValueError):
            parse_graph("vertex u\nvertex v\nedge e u v color=d\n")
