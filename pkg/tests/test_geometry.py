from fractions import Fraction

import pytest

from errors import ArgumentOutOfRange, EmptyInput, PointNotOnBoundary, PointOutsidePolyhedron, UnsupportedDimension
from geometry import GeometryManager, ValidPair


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_single_vertex_polyhedron():
    polyhedron = GeometryManager.build_polyhedron([(4, 4, 4)])
    assert polyhedron.vertices == (F(4, 4, 4),)
    assert {(f.normal, f.offset) for f in polyhedron.facets} == {((1, 0, 0), 4), ((0, 1, 0), 4), ((0, 0, 1), 4)}
    assert polyhedron.contains(F(5, 4, 9))
    assert not polyhedron.contains(F(3, 9, 9))


def test_two_axis_phase_in_three_variables():
    polyhedron = GeometryManager.build_polyhedron([(4, 0, 0), (0, 4, 0)])
    assert [f for f in polyhedron.facets if f.offset != 0] == [ValidPair((1, 1, 0), Fraction(4))]
    assert polyhedron.contains(F(2, 2, 0))
    assert not polyhedron.contains(F(1, 2, 7))


def test_support_value_is_the_minimum_over_vertices():
    polyhedron = GeometryManager.build_polyhedron([(2, 0), (0, 3)])
    assert polyhedron.support_value((3, 2)) == 6
    assert polyhedron.support_value((1, 1)) == 2
    assert polyhedron.support_value((1, 0)) == 0


def test_face_lattice_of_a_segment_diagram():
    polyhedron = GeometryManager.build_polyhedron([(2, 0), (0, 2)])
    # whole, two vertices, the compact edge and the two unbounded facets
    assert len(polyhedron.faces) == 6
    compact = polyhedron.compact_faces()
    assert sorted(face.dim for face in compact) == [0, 0, 1]
    edge = next(face for face in compact if face.dim == 1)
    assert edge.defining_pair() == ValidPair((1, 1), Fraction(2))
    assert polyhedron.whole.is_whole()


def test_redundant_generators_are_not_vertices():
    polyhedron = GeometryManager.build_polyhedron([(2, 0), (0, 2), (1, 1), (3, 3)])
    assert set(polyhedron.vertices) == {F(2, 0), F(0, 2)}


def test_smallest_face():
    polyhedron = GeometryManager.build_polyhedron([(4, 0)])
    facet = GeometryManager.smallest_face(polyhedron, (4, 3))
    assert facet.dim == 1 and not facet.compact
    vertex = GeometryManager.smallest_face(polyhedron, (4, 0))
    assert vertex.dim == 0 and vertex.compact
    with pytest.raises(PointNotOnBoundary):
        GeometryManager.smallest_face(polyhedron, (5, 1))
    with pytest.raises(PointOutsidePolyhedron):
        GeometryManager.smallest_face(polyhedron, (3, 0))


def test_scale_translate_keeps_the_face_lattice():
    polyhedron = GeometryManager.build_polyhedron([(2, 0), (0, 2)])
    moved = GeometryManager.scale_translate(polyhedron, Fraction(1, 2), (1, 1))
    assert set(moved.vertices) == {F(Fraction(3, 2), Fraction(1, 2)), F(Fraction(1, 2), Fraction(3, 2))}
    assert len(moved.faces) == len(polyhedron.faces)
    assert moved == GeometryManager.build_polyhedron(moved.vertices)
    with pytest.raises(ArgumentOutOfRange):
        GeometryManager.scale_translate(polyhedron, 0)


def test_fourier_motzkin_with_strict_inequalities():
    one = (Fraction(1),)
    minus = (Fraction(-1),)
    assert GeometryManager.fm_feasible([(one, Fraction(0), '>='), (minus, Fraction(0), '>=')], 1)
    assert not GeometryManager.fm_feasible([(one, Fraction(0), '>'), (minus, Fraction(0), '>=')], 1)
    assert not GeometryManager.fm_feasible([(one, Fraction(1), '='), (minus, Fraction(0), '>')], 1)
    rows = [((Fraction(1), Fraction(1)), Fraction(2), '='), ((Fraction(1), Fraction(0)), Fraction(1), '>')]
    assert GeometryManager.fm_feasible(rows, 2)
    assert not GeometryManager.fm_feasible(rows + [((Fraction(0), Fraction(1)), Fraction(1), '>')], 2)


def test_relative_interior_intersection():
    polyhedron = GeometryManager.build_polyhedron([(2, 0), (0, 2)])
    edge = next(face for face in polyhedron.compact_faces() if face.dim == 1)
    diagonal = GeometryManager.build_polyhedron([(1, 1)])
    assert GeometryManager.relint_intersects(edge, diagonal)
    far = GeometryManager.build_polyhedron([(3, 3)])
    assert not GeometryManager.relint_intersects(edge, far)
    assert not GeometryManager.relint_intersects(edge, None)


def test_hull_contains():
    generators = [(2, 0), (0, 2)]
    assert GeometryManager.hull_contains(generators, (1, 1))
    assert GeometryManager.hull_contains(generators, (5, 0))
    assert not GeometryManager.hull_contains(generators, (1, Fraction(1, 2)))


def test_membership_agrees_with_the_hull_test(rng):
    for _ in range(20):
        n = rng.choice([2, 3])
        generators = [tuple(rng.randint(0, 6) for _ in range(n)) for _ in range(rng.randint(1, 5))]
        polyhedron = GeometryManager.build_polyhedron(generators)
        for _ in range(5):
            point = tuple(Fraction(rng.randint(0, 16), 2) for _ in range(n))
            assert polyhedron.contains(point) == GeometryManager.hull_contains(generators, point)


def test_bad_inputs():
    with pytest.raises(EmptyInput):
        GeometryManager.build_polyhedron([])
    with pytest.raises(UnsupportedDimension):
        GeometryManager.build_polyhedron([(1, 1, 1, 1, 1)])
