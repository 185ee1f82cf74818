"""Tests for truncated Witt rings and the higher-level display action."""

import itertools
import json
import random

import pytest

from zipstrata.ffield import get_field, mat_inv, mat_mul, smallest_irreducible
from zipstrata.grouplab import TooLarge, gl_points, make_zip_datum, zip_group_points
from zipstrata.witt import (
    DisplayGroupElement,
    GaloisRing,
    GaloisRingElement,
    NotInGroup,
    SingularZ,
    check_reduction,
    display_action,
    display_group_points,
    display_orbit_partition,
    frobenius,
    frobenius_inv,
    identity_display,
    iota,
    make_ring,
    orbit_census_level,
    residue_matrix,
    ring_matrix,
    rmat_identity,
    rmat_is_invertible,
    rmat_mul,
    sigma_mu,
    verschiebung,
)

Z4 = make_ring(2, 1, 2)
GR16 = make_ring(2, 2, 2)
GR81 = make_ring(3, 2, 2)


def scalar_display(ring, a, b, c, d):
    blocks = [((ring.from_int(v),),) for v in (a, b, c, d)]
    return DisplayGroupElement(ring, 2, 1, *blocks)


# ---------------------------------------------------------------------------
# ring construction
# ---------------------------------------------------------------------------


def test_level_two_base_ring_is_the_integers_mod_four():
    assert (Z4.size, Z4.char, Z4.d, Z4.modulus) == (4, 4, 1, (0, 1))
    assert len(list(Z4.elements())) == 4
    assert (Z4.from_int(2) + Z4.from_int(2)).coeffs == (0,)
    assert (Z4.from_int(3) * Z4.from_int(3)).coeffs == (1,)
    assert Z4.element((5,)).coeffs == (1,)
    assert Z4.from_int(3) ** -1 == Z4.from_int(3)


def test_level_one_base_ring_is_the_prime_field():
    r = make_ring(2, 1, 1)
    assert r.size == 2 and r.char == 2
    assert sorted(e.coeffs for e in r.elements()) == [(0,), (1,)]


def test_quadratic_residue_ring_at_level_two_has_eighty_one_elements():
    assert GR81.size == 81
    assert GR81.modulus == (1, 0, 1)
    assert GR81.residue_field.order == 9
    assert sum(1 for _ in GR81.elements()) == 81


def test_cubic_modulus_lift_differs_from_its_literal_reduction():
    ring = make_ring(2, 3, 2)
    assert ring.modulus == (3, 1, 2, 1)
    assert tuple(v % 2 for v in ring.modulus) == smallest_irreducible(2, 3)
    gen = ring.element((0, 1, 0))
    assert gen ** (2**3) == gen


def test_make_ring_validates_its_parameters():
    with pytest.raises(ValueError, match="not prime"):
        make_ring(4, 1, 2)
    with pytest.raises(ValueError, match="positive"):
        make_ring(2, 0, 2)
    with pytest.raises(ValueError, match="positive"):
        make_ring(2, 1, 0)


def test_ring_constructor_validates_the_modulus():
    with pytest.raises(ValueError, match="not prime"):
        GaloisRing(4, 1, 2, (0, 1))
    with pytest.raises(ValueError, match="irreducible"):
        GaloisRing(2, 2, 1, (0, 0, 1))
    with pytest.raises(ValueError, match="monic of degree d"):
        GaloisRing(2, 1, 2, (0, 0, 1))
    with pytest.raises(ValueError, match="reduced modulo"):
        GaloisRing(2, 2, 2, (5, 1, 1))
    with pytest.raises(ValueError, match="Teichmueller"):
        GaloisRing(2, 3, 2, (1, 1, 0, 1))


def test_value_equal_rings_interoperate_with_the_cached_one():
    direct = GaloisRing(2, 1, 2, (0, 1))
    assert direct == Z4 and direct is not Z4
    assert (direct.from_int(3) * Z4.from_int(3)).coeffs == (1,)
    assert make_ring(2, 1, 2) is Z4


def test_units_are_exactly_the_elements_with_unit_residue():
    units = [e for e in GR16.elements() if e.is_unit]
    assert len(units) == 12
    for e in GR16.elements():
        assert e.is_unit == (e.residue() != 0)
    with pytest.raises(ZeroDivisionError):
        GR16.element((2, 2)).inverse()


def test_inverse_lifts_the_residue_field_inverse_exactly():
    for ring in (GR16, GR81):
        for e in ring.units():
            assert e * e.inverse() == ring.one


def test_residue_map_is_a_ring_homomorphism_onto_the_field_encoding():
    ff = get_field(2, 2)
    els = list(GR16.elements())
    for a in els:
        for b in els:
            assert (a * b).residue() == ff.mul(a.residue(), b.residue())
            assert (a + b).residue() == ff.add(a.residue(), b.residue())


def test_element_coefficients_are_validated():
    with pytest.raises(ValueError, match="too many"):
        Z4.element((1, 2))
    with pytest.raises(ValueError, match="length d"):
        GaloisRingElement(GR16, (1,))


# ---------------------------------------------------------------------------
# Frobenius and Verschiebung
# ---------------------------------------------------------------------------


def test_frobenius_is_trivial_at_degree_one_and_verschiebung_scales_by_p():
    for e in Z4.elements():
        assert frobenius(e) == e
    assert verschiebung(Z4.one).coeffs == (2,)
    els = list(Z4.elements())
    for a in els:
        for b in els:
            assert verschiebung(a + b) == verschiebung(a) + verschiebung(b)


def test_frobenius_squares_to_the_identity_on_the_sixteen_element_ring():
    gen = GR16.element((0, 1))
    assert frobenius(gen) != gen
    for e in GR16.elements():
        assert frobenius(frobenius(e)) == e
    fixed = [e for e in GR16.elements() if frobenius(e) == e]
    assert sorted(f.coeffs for f in fixed) == [(0, 0), (1, 0), (2, 0), (3, 0)]


def test_frobenius_is_a_ring_automorphism():
    for ring in (GR16, GR81):
        els = list(ring.elements())
        for a in els:
            for b in els:
                assert frobenius(a * b) == frobenius(a) * frobenius(b)
                assert frobenius(a + b) == frobenius(a) + frobenius(b)


def test_frobenius_and_verschiebung_compose_to_multiplication_by_p():
    shapes = [
        (2, 1, 1), (2, 1, 2), (2, 1, 3), (2, 2, 1), (2, 2, 2), (2, 3, 2),
        (3, 1, 2), (3, 2, 2), (5, 1, 3), (7, 2, 1), (2, 5, 2), (13, 1, 2),
    ]
    for p, d, m in shapes:
        ring = make_ring(p, d, m)
        for e in ring.elements():
            assert frobenius(verschiebung(e)) == e * p
            assert verschiebung(frobenius(e)) == e * p
            assert frobenius(frobenius_inv(e)) == e
            assert frobenius_inv(frobenius(e)) == e
            s = e
            for _ in range(d):
                s = frobenius(s)
            assert s == e


# ---------------------------------------------------------------------------
# the display group
# ---------------------------------------------------------------------------


def test_identity_display_maps_to_identity_matrices_under_both_block_maps():
    ident = identity_display(Z4, 2, 1)
    assert iota(ident) == rmat_identity(Z4, 2)
    assert sigma_mu(ident) == rmat_identity(Z4, 2)


def test_display_constructor_rejects_non_unit_diagonal_blocks():
    with pytest.raises(NotInGroup, match="invertible modulo p"):
        scalar_display(Z4, 2, 0, 0, 1)
    with pytest.raises(NotInGroup, match="invertible modulo p"):
        scalar_display(Z4, 1, 0, 0, 2)
    with pytest.raises(ValueError, match="must be 1 by 1"):
        DisplayGroupElement(
            Z4, 2, 1, ((Z4.one, Z4.one),), ((Z4.zero,),), ((Z4.zero,),), ((Z4.one,),)
        )
    with pytest.raises(ValueError, match="entries in the ring"):
        DisplayGroupElement(Z4, 2, 1, ((1,),), ((Z4.zero,),), ((Z4.zero,),), ((Z4.one,),))


def test_level_one_block_maps_are_the_zip_group_pair():
    ring = make_ring(2, 1, 1)
    for g in display_group_points(ring, 2, 1):
        assert iota(g)[0][1] == ring.zero
        assert sigma_mu(g)[1][0] == ring.zero
        assert sigma_mu(g)[0][0] == g.A[0][0]
        assert sigma_mu(g)[0][1] == g.B_pre[0][0]
        assert sigma_mu(g)[1][1] == g.D[0][0]


def test_block_maps_are_group_homomorphisms_on_the_full_level_two_group():
    group = display_group_points(Z4, 2, 1)
    assert len(group) == 64
    for a in group:
        for b in group:
            ab = a * b
            assert rmat_mul(Z4, iota(a), iota(b)) == iota(ab)
            assert rmat_mul(Z4, sigma_mu(a), sigma_mu(b)) == sigma_mu(ab)


def test_block_map_fibers_collapse_exactly_the_top_power_of_p():
    group = display_group_points(Z4, 2, 1)
    ident = rmat_identity(Z4, 2)
    iota_kernel = [g for g in group if iota(g) == ident]
    assert sorted(g.B_pre[0][0].coeffs for g in iota_kernel) == [(0,), (2,)]
    assert all(
        (g.A, g.C, g.D) == (((Z4.one,),), ((Z4.zero,),), ((Z4.one,),))
        for g in iota_kernel
    )
    sigma_kernel = [g for g in group if sigma_mu(g) == ident]
    assert sorted(g.C[0][0].coeffs for g in sigma_kernel) == [(0,), (2,)]
    joint = [g for g in iota_kernel if sigma_mu(g) == ident]
    assert len(joint) == 1


def test_display_multiplication_is_associative_with_identity():
    group = display_group_points(Z4, 2, 1)
    ident = identity_display(Z4, 2, 1)
    rng = random.Random(11)
    for _ in range(100):
        a, b, c = rng.choice(group), rng.choice(group), rng.choice(group)
        assert (a * b) * c == a * (b * c)
        assert a * ident == a and ident * a == a


def test_display_action_satisfies_the_left_action_axioms():
    group = display_group_points(Z4, 2, 1)
    ident = identity_display(Z4, 2, 1)
    invertibles = [
        (flat[0:2], flat[2:4])
        for flat in itertools.product(Z4.elements(), repeat=4)
    ]
    invertibles = [z for z in invertibles if rmat_is_invertible(Z4, z)]
    assert len(invertibles) == 96
    for z in invertibles:
        assert display_action(ident, z) == z
    rng = random.Random(13)
    for _ in range(150):
        a, b = rng.choice(group), rng.choice(group)
        z = rng.choice(invertibles)
        assert display_action(a * b, z) == display_action(a, display_action(b, z))


def test_display_action_rejects_singular_and_misshapen_input():
    ident = identity_display(Z4, 2, 1)
    with pytest.raises(SingularZ, match="singular modulo p"):
        display_action(ident, ring_matrix(Z4, ((2, 0), (0, 1))))
    with pytest.raises(ValueError, match="n by n"):
        display_action(ident, ring_matrix(Z4, ((1,),)))


def test_display_laws_hold_over_the_nine_element_base_ring():
    ring = make_ring(3, 1, 2)
    group = display_group_points(ring, 2, 1)
    assert len(group) == 2916
    invertibles = [
        (flat[0:2], flat[2:4])
        for flat in itertools.product(ring.elements(), repeat=4)
    ]
    invertibles = [z for z in invertibles if rmat_is_invertible(ring, z)]
    assert len(invertibles) == 3888
    ident = identity_display(ring, 2, 1)
    rng = random.Random(17)
    for _ in range(120):
        a, b = rng.choice(group), rng.choice(group)
        ab = a * b
        assert rmat_mul(ring, iota(a), iota(b)) == iota(ab)
        assert rmat_mul(ring, sigma_mu(a), sigma_mu(b)) == sigma_mu(ab)
        z = rng.choice(invertibles)
        assert display_action(ab, z) == display_action(a, display_action(b, z))
    for _ in range(60):
        z = rng.choice(invertibles)
        assert display_action(ident, z) == z


# ---------------------------------------------------------------------------
# orbits, census, reduction
# ---------------------------------------------------------------------------


def test_orbit_of_the_identity_at_level_one_is_the_big_cell():
    ring = make_ring(2, 1, 1)
    partition = display_orbit_partition(ring, 2, 1)
    assert [len(o) for o in partition] == [2, 4]
    ident = rmat_identity(ring, 2)
    orbit = next(o for o in partition if ident in o)
    as_ints = sorted(residue_matrix(ring, z) for z in orbit)
    assert as_ints == [
        ((1, 0), (0, 1)),
        ((1, 0), (1, 1)),
        ((1, 1), (0, 1)),
        ((1, 1), (1, 0)),
    ]


def test_level_two_census_partitions_the_ninety_six_invertibles():
    census = orbit_census_level(2, 2, 1, 2)
    assert census.ext == 2
    assert census.group_order == 96
    assert [r.size for r in census.orbits] == [8, 8, 8, 8, 16, 16, 16, 16]
    assert [r.stabilizer_order for r in census.orbits] == [8, 8, 8, 8, 4, 4, 4, 4]
    assert all(r.size * r.stabilizer_order == 64 for r in census.orbits)
    assert all(r.cell is None for r in census.orbits)
    partition = display_orbit_partition(Z4, 2, 1)
    union = set().union(*partition)
    assert len(union) == 96 and sum(len(o) for o in partition) == 96


def test_level_one_census_matches_the_familiar_zip_sizes():
    census = orbit_census_level(2, 2, 1, 1)
    assert census.group_order == 6
    assert [r.size for r in census.orbits] == [2, 4]


def zip_partition(n, field, simple_indices):
    datum = make_zip_datum(n, field, simple_indices)
    acting = [
        (pp, mat_inv(field, p)) for pp, p in zip_group_points(datum, 1)
    ]
    remaining = set(gl_points(n, field))
    parts = []
    while remaining:
        seed = min(remaining)
        orbit = frozenset(
            mat_mul(field, mat_mul(field, pp, seed), pinv) for pp, pinv in acting
        )
        remaining -= orbit
        parts.append(orbit)
    return set(parts)


def witt_partition_as_residues(p, d, n, d_block):
    ring = make_ring(p, d, 1)
    return set(
        frozenset(residue_matrix(ring, z) for z in orbit)
        for orbit in display_orbit_partition(ring, n, d_block)
    )


def test_level_one_orbit_partition_equals_the_zip_group_partition():
    assert witt_partition_as_residues(2, 1, 2, 1) == zip_partition(2, get_field(2, 1), ())
    assert witt_partition_as_residues(3, 1, 2, 1) == zip_partition(2, get_field(3, 1), ())
    assert witt_partition_as_residues(2, 1, 3, 1) == zip_partition(3, get_field(2, 1), (2,))
    assert witt_partition_as_residues(2, 1, 3, 2) == zip_partition(3, get_field(2, 1), (1,))


def test_every_level_two_orbit_reduces_into_a_single_level_one_orbit():
    report = check_reduction(2, 2, 1, 2)
    assert report == {
        "params": {"n": 2, "p": 2, "d": 1, "m": 2, "d_block": 1},
        "orbits_m": 8,
        "orbits_1": 2,
        "violations": [],
    }
    json.dumps(report)


def test_reduction_is_clean_over_the_nine_element_base_ring():
    report = check_reduction(2, 3, 1, 2)
    assert report["orbits_m"] == 54
    assert report["orbits_1"] == 6
    assert report["violations"] == []


def test_reduction_at_level_one_is_trivially_clean():
    report = check_reduction(2, 2, 1, 1)
    assert report["orbits_m"] == report["orbits_1"] == 2
    assert report["violations"] == []


def test_census_guard_refuses_oversized_spaces():
    with pytest.raises(TooLarge, match=str(2**36)):
        orbit_census_level(3, 2, 1, 4)
    with pytest.raises(TooLarge, match="matrix space"):
        check_reduction(3, 2, 1, 4)
    with pytest.raises(TooLarge, match="display group"):
        display_group_points(GR81, 3, 1)
