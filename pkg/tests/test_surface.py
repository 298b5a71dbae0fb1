from itertools import combinations

import numpy as np
import pytest

from cpflow import (InputError, Prescription, SurfaceComplex, build_complex,
                    degree, edge_neighborhood, fixtures, validate)


@pytest.fixture
def tetra():
    return fixtures.tetrahedron()


class TestFixtures:
    @pytest.mark.parametrize("make,chi", [
        (fixtures.tetrahedron, 2),
        (fixtures.bigon, 2),
        (fixtures.cube_graph, 2),
        (fixtures.torus_grid, 0),
        (lambda: fixtures.necklace(4), 2),
        (lambda: fixtures.prism(4), 2),
        (lambda: fixtures.bipyramid(5), 2),
    ])
    def test_valid_with_expected_characteristic(self, make, chi):
        c = make()
        assert validate(c) == []
        assert c.euler_characteristic == chi

    @pytest.mark.parametrize("make", [
        fixtures.tetrahedron, fixtures.bigon, fixtures.cube_graph,
        fixtures.torus_grid, lambda: fixtures.necklace(5),
        lambda: fixtures.prism(3), lambda: fixtures.bipyramid(3),
    ])
    def test_handshake(self, make):
        c = make()
        assert int(np.sum(c.degrees)) == 2 * c.n_edges


class TestValidate:
    def test_loop_rejected(self):
        c = SurfaceComplex(2, ((0, 0), (0, 1), (0, 1)),
                           ((0, 1), (1, 2), (0, 2)),
                           np.full(3, np.pi / 2))
        problems = validate(c)
        assert any("loop" in p for p in problems)

    def test_triple_covered_edge(self, tetra):
        faces = tetra.faces[:-1] + ((0, 0, 3, 1),)
        c = SurfaceComplex(4, tetra.edges, faces, tetra.phi)
        problems = validate(c)
        assert any("covered 3 times" in p for p in problems)

    def test_uncovered_edge(self, tetra):
        c = SurfaceComplex(4, tetra.edges, tetra.faces[:2], tetra.phi)
        assert any("covered" in p for p in validate(c))

    @pytest.mark.parametrize("bad", [0.0, -0.5, np.pi / 2 + 1e-12, np.nan])
    def test_angle_out_of_range(self, tetra, bad):
        phi = tetra.phi.copy()
        phi[2] = bad
        c = SurfaceComplex(4, tetra.edges, tetra.faces, phi)
        assert any("intersection angle" in p for p in validate(c))

    def test_disconnected(self):
        # two disjoint bigons in one complex
        c = SurfaceComplex(4, ((0, 1), (0, 1), (2, 3), (2, 3)),
                           ((0, 1), (0, 1), (2, 3), (2, 3)),
                           np.full(4, np.pi / 2))
        problems = validate(c)
        assert any("not connected" in p for p in problems)
        assert any("Euler characteristic" in p for p in problems)  # chi = 4

    def test_violations_cached_and_empty_for_valid(self, tetra):
        assert tetra.violations == ()
        assert tetra.is_valid


class TestQueries:
    def test_edge_neighborhood_empty(self, tetra):
        assert edge_neighborhood(tetra, []) == set()

    def test_edge_neighborhood_all(self, tetra):
        assert edge_neighborhood(tetra, range(4)) == set(range(6))

    def test_edge_neighborhood_single(self, tetra):
        assert edge_neighborhood(tetra, [0]) == {0, 1, 2}
        assert len(edge_neighborhood(tetra, [0])) == 3

    def test_edge_neighborhood_unknown_vertex(self, tetra):
        with pytest.raises(InputError):
            edge_neighborhood(tetra, [7])

    def test_union_compatibility(self, tetra):
        subsets = []
        for k in range(5):
            subsets.extend(frozenset(s) for s in combinations(range(4), k))
        for a in subsets:
            for b in subsets:
                assert (edge_neighborhood(tetra, a) | edge_neighborhood(tetra, b)
                        == edge_neighborhood(tetra, a | b))

    def test_degrees(self, tetra):
        assert all(degree(tetra, v) == 3 for v in range(4))
        big = fixtures.bigon()
        assert degree(big, 0) == degree(big, 1) == 2

    def test_parallel_edge_bumps_degree(self, tetra):
        edges = tetra.edges + ((0, 1),)
        faces = tetra.faces  # coverage now wrong, but degrees don't care
        c = SurfaceComplex(4, edges, faces, np.full(7, 1.0))
        assert degree(c, 0) == degree(tetra, 0) + 1
        assert degree(c, 1) == degree(tetra, 1) + 1
        assert degree(c, 2) == degree(tetra, 2)

    def test_degree_unknown_vertex(self, tetra):
        with pytest.raises(InputError):
            degree(tetra, -1)


class TestConstruction:
    def test_build_complex_round(self):
        c = build_complex(
            ["a", "b"],
            [("a", "b", np.pi / 2), ("a", "b", np.pi / 3)],
            [["e0", "e1"], ["e0", "e1"]],
        )
        ref = fixtures.bigon(phi=np.array([np.pi / 2, np.pi / 3]))
        assert c.edges == ref.edges and c.faces == ref.faces
        assert np.all(c.phi == ref.phi)
        assert c.vertex_names == ("a", "b")
        assert validate(c) == []

    def test_duplicate_vertex_name(self):
        with pytest.raises(InputError):
            build_complex(["a", "a"], [], [])

    def test_unknown_endpoint(self):
        with pytest.raises(InputError):
            build_complex(["a", "b"], [("a", "c", 1.0)], [])

    def test_unknown_face_edge(self):
        with pytest.raises(InputError):
            build_complex(["a", "b"], [("a", "b", 1.0)], [["nope"]])

    def test_phi_writes_blocked(self):
        c = fixtures.tetrahedron()
        with pytest.raises(ValueError):
            c.phi[0] = 1.0

    def test_structural_equality(self):
        a = fixtures.tetrahedron()
        b = fixtures.tetrahedron()
        assert a == b and hash(a) == hash(b)
        c = fixtures.tetrahedron(phi=1.0)
        assert a != c

    def test_prescription_validation(self):
        with pytest.raises(InputError):
            Prescription(np.array([1.0, 0.0]))
        with pytest.raises(InputError):
            Prescription(np.array([1.0, -2.0]))
        with pytest.raises(InputError):
            Prescription(np.array([1.0, np.inf]))
        p = Prescription(np.array([1.0, 2.0]))
        assert len(p) == 2
