from fractions import Fraction

import numpy as np
import pytest

import config
from conftest import poly, random_polynomial
from errors import ArgumentOutOfRange, ConeNotCompatible, FanNotCompatible, NotUnimodular, UnimodularizationBudgetExceeded
from fan_manager import Cone, Fan, FanManager
from power_data import NewtonManager


def polyhedron(n, terms):
    return NewtonManager.newton_polyhedron(poly(n, terms))


def test_normal_fan_of_a_sum_of_squares():
    fan = FanManager.normal_fan(polyhedron(2, {(2, 0): 1, (0, 2): 1}))
    assert fan.rays == [(0, 1), (1, 0), (1, 1)]
    assert [cone.rays for cone in fan.cones] == [((0, 1), (1, 1)), ((1, 0), (1, 1))]
    assert fan.is_unimodular


def test_resolution_of_a_cusp_is_unimodular_and_refines_the_normal_fan():
    target = polyhedron(2, {(2, 0): 1, (0, 3): 1})
    normal = FanManager.normal_fan(target)
    assert (3, 2) in normal.rays
    assert not normal.is_unimodular
    fan = FanManager.resolution_fan(target)
    assert fan.is_unimodular
    assert FanManager.refines(fan, normal)
    FanManager.require_compatible(fan, target)
    assert {(1, 1), (2, 1), (3, 2)} <= set(fan.rays)


def test_resolution_in_three_variables():
    target = polyhedron(3, {(2, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1})
    fan = FanManager.resolution_fan(target)
    assert fan.is_unimodular
    FanManager.require_compatible(fan, target)
    assert FanManager.refines(fan, FanManager.normal_fan(target))


def test_common_refinement_keeps_the_rays_of_both_fans():
    first = FanManager.normal_fan(polyhedron(2, {(2, 0): 1, (0, 2): 1}))
    second = FanManager.normal_fan(polyhedron(2, {(4, 0): 1, (0, 1): 1}))
    refined = FanManager.common_refinement([first, second])
    assert set(first.rays) | set(second.rays) <= set(refined.rays)
    assert FanManager.refines(refined, first) and FanManager.refines(refined, second)


def test_pulling_triangulation_of_a_trapezoid_cone():
    # first and last rays in the global order are adjacent corners
    rays = [(0, 0, 1), (3, 0, 1), (2, 1, 1), (1, 1, 1)]
    rows = [(0, 1, 0), (-1, -1, 3), (0, -1, 1), (1, -1, 0)]
    fan = Fan(3, (Cone.from_rays(rays, rows),))
    forward = FanManager.triangulate(fan)
    backward = FanManager.triangulate(fan, reverse_order=True)
    assert len(forward.cones) == len(backward.cones) == 2
    assert all(cone.is_simplicial for cone in forward.cones + backward.cones)
    assert {c.rays for c in forward.cones} != {c.rays for c in backward.cones}
    assert ((0, 0, 1), (1, 1, 1), (2, 1, 1)) in {c.rays for c in forward.cones}
    assert ((1, 1, 1), (2, 1, 1), (3, 0, 1)) in {c.rays for c in backward.cones}


def test_stellar_subdivision_of_the_orthant():
    fan = FanManager.stellar_subdivide(FanManager.trivial_fan(2), (2, 2))
    assert [cone.rays for cone in fan.cones] == [((0, 1), (1, 1)), ((1, 0), (1, 1))]


def test_parallelepiped_point():
    cone = Cone.from_rays([(1, 0), (1, 2)])
    assert cone.determinant == 2
    assert FanManager.parallelepiped_point(cone) == (1, 1)
    assert FanManager.parallelepiped_point(Cone.from_rays([(1, 0, 0), (0, 1, 0), (1, 1, 2)])) == (1, 1, 1)


def test_stellar_steps_make_a_three_dimensional_cone_unimodular():
    fan = Fan(3, (Cone.from_rays([(1, 0, 0), (0, 1, 0), (1, 1, 2)]),))
    result = FanManager.simplicialize_unimodular(fan)
    assert result.is_unimodular
    assert FanManager.refines(result, fan)
    assert (1, 1, 1) in result.rays


def test_subdivision_budget(monkeypatch):
    monkeypatch.setattr(config, "UNIMODULAR_SUBDIVISION_CAP", 0)
    fan = Fan(3, (Cone.from_rays([(1, 0, 0), (0, 1, 0), (1, 1, 2)]),))
    with pytest.raises(UnimodularizationBudgetExceeded) as info:
        FanManager.simplicialize_unimodular(fan)
    assert info.value.partial_fan is not None
    assert not info.value.partial_fan.is_unimodular


def test_chart_map_and_cofactor():
    cone = Cone.from_rays([(1, 0), (1, 1)])
    chart = FanManager.chart(cone)
    assert chart.jacobian_exponents == (0, 1)
    assert chart.sign == 1
    np.testing.assert_allclose(chart.map_points([[2.0, 3.0]]), [[6.0, 3.0]])
    f = poly(2, {(2, 0): 1, (0, 2): 1})
    assert chart.monomial_exponents(f) == (0, 2)
    assert chart.cofactor(f).coefficients == {(2, 0): 1, (0, 0): 1}
    assert chart.vanishing_coordinates([0]) == [0]


def test_chart_needs_a_unimodular_cone():
    with pytest.raises(NotUnimodular):
        FanManager.chart(Cone.from_rays([(1, 0), (1, 2)]))


def test_trivial_fan_is_not_compatible_with_a_sum_of_squares():
    target = polyhedron(2, {(2, 0): 1, (0, 2): 1})
    with pytest.raises(FanNotCompatible):
        FanManager.require_compatible(FanManager.trivial_fan(2), target)
    with pytest.raises(ConeNotCompatible):
        FanManager.face_cone_maps(target, FanManager.trivial_fan(2).cones[0])


def test_face_cone_correspondence():
    target = polyhedron(2, {(2, 0): 1, (0, 2): 1})
    cone = Cone.from_rays([(0, 1), (1, 1)])
    maps = FanManager.face_cone_maps(target, cone)
    vertex = maps.gamma_of([0, 1])
    assert vertex.vertex_points == [(Fraction(2), Fraction(0))]
    assert maps.index_set(vertex) == frozenset({0, 1})
    assert maps.gamma_of([]) == target.whole
    assert FanManager.compactness_criterion([0, 1], cone, target)
    assert not FanManager.compactness_criterion([0], cone, target)


def test_covering_check():
    fan = FanManager.normal_fan(polyhedron(2, {(2, 0): 1, (0, 2): 1}))
    rays = [(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)]
    assert FanManager.covering_check(fan, rays)
    half = Fan(2, fan.cones[:1])
    assert not FanManager.covering_check(half, rays)


def test_alternate_subdivision_is_a_different_unimodular_refinement():
    fan = FanManager.normal_fan(polyhedron(2, {(2, 0): 1, (0, 2): 1}))
    other = FanManager.alternate_subdivision(fan)
    assert other.is_unimodular
    assert len(other.cones) == 3
    assert (1, 2) in other.rays
    assert FanManager.refines(other, fan)


def test_random_resolutions_are_unimodular_and_compatible(rng):
    for _ in range(8):
        n = rng.choice([2, 3])
        target = NewtonManager.newton_polyhedron(random_polynomial(rng, n, max_terms=4, max_exp=5))
        fan = FanManager.resolution_fan(target)
        assert fan.is_unimodular
        FanManager.require_compatible(fan, target)


def test_common_refinement_needs_a_fan():
    with pytest.raises(ArgumentOutOfRange):
        FanManager.common_refinement([])


@pytest.mark.slow
def test_random_resolutions_cover_the_orthant(rng):
    for _ in range(5):
        n = rng.choice([2, 3])
        target = NewtonManager.newton_polyhedron(random_polynomial(rng, n))
        fan = FanManager.resolution_fan(target)
        assert FanManager.refines(fan, FanManager.normal_fan(target))
        rays = []
        while len(rays) < 10 ** 4:
            a = tuple(rng.randint(0, 30) for _ in range(n))
            if any(a):
                rays.append(a)
        assert FanManager.covering_check(fan, rays)
