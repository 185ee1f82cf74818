"""Tests for the twisted stratum order, purity reports and serialisation."""

import json

import pytest

from zipstrata.coxeter import (
    bruhat_leq,
    create_weyl,
    diagram_automorphisms,
    element_from_word,
    longest_element,
    min_coset_reps,
    parabolic_order,
    word_string,
)
from zipstrata.zipdatum import (
    PsiMismatch,
    ZipCombinatorics,
    boundary_maximal,
    build_zip,
    closure,
    dim_parabolic,
    export_poset,
    galois_quotient,
    import_poset,
    purity_check,
    purity_check_poset,
    stratum_dimension,
    stratum_poset,
    twisted_leq,
    zip_from_cocharacter,
)


# ---------------------------------------------------------------------------
# datum construction
# ---------------------------------------------------------------------------


def test_rank_two_twist_rejects_mismatched_target():
    W = create_weyl("A", 2)
    with pytest.raises(PsiMismatch):
        build_zip(W, {1}, {1})


def test_rank_two_twist_accepts_matching_target_and_computes_theta0():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    assert z.theta0.reduced_word() == (1, 2)
    assert word_string(z.psi(W.simple_reflection(1))) == "s2"


def test_build_rejects_mismatched_sizes_of_i_and_j():
    W = create_weyl("A", 3)
    with pytest.raises(PsiMismatch):
        build_zip(W, {1}, {1, 3})


def test_cocharacter_datum_flips_node_across_the_diagram():
    W = create_weyl("A", 3)
    z = zip_from_cocharacter(W, {1})
    assert sorted(z.J.indices) == [3]


def test_cocharacter_datum_swaps_fork_nodes_in_triality_free_even_orthogonal():
    # conjugation by the longest element exchanges the fork nodes here
    D3 = create_weyl("D", 3)
    assert sorted(zip_from_cocharacter(D3, {2}).J.indices) == [3]
    assert sorted(zip_from_cocharacter(D3, {3}).J.indices) == [2]
    assert sorted(zip_from_cocharacter(D3, {1}).J.indices) == [1]


def test_cocharacter_datum_always_builds_for_every_subset_and_twist():
    for family, rank in [("A", 3), ("B", 3), ("C", 3), ("D", 3)]:
        W = create_weyl(family, rank)
        subsets = [
            frozenset(s)
            for mask in range(1 << rank)
            for s in [[i + 1 for i in range(rank) if mask >> i & 1]]
        ]
        for delta in diagram_automorphisms(W):
            for I in subsets:
                zip_from_cocharacter(W, I, delta)


def test_central_torus_flag_rejected_outside_type_a():
    W = create_weyl("B", 2)
    with pytest.raises(ValueError):
        build_zip(W, set(), set(), gl_center=True)


# ---------------------------------------------------------------------------
# the twisted order
# ---------------------------------------------------------------------------


def test_twisted_order_with_trivial_levi_is_bruhat_order():
    for family, rank in [("A", 2), ("B", 2), ("A", 3)]:
        W = create_weyl(family, rank)
        z = build_zip(W, set(), set())
        for v in W.elements():
            for w in W.elements():
                assert twisted_leq(z, v, w) == bruhat_leq(v, w)


def test_twisted_order_on_projective_plane_datum_is_a_chain():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    p = stratum_poset(z)
    assert [word_string(w) for w in p.carrier] == ["e", "s2", "s2*s1"]
    assert p.leq == (
        (True, True, True),
        (False, True, True),
        (False, False, True),
    )
    assert p.covers == ((0, 1), (1, 2))


def test_twisted_order_rejects_labels_with_left_descents_in_i():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    s1 = W.simple_reflection(1)
    with pytest.raises(ValueError):
        twisted_leq(z, s1, s1)


def test_twisted_order_rejects_elements_of_other_groups():
    z = build_zip(create_weyl("A", 2), {1}, {2})
    other = create_weyl("A", 3).identity()
    with pytest.raises(ValueError):
        twisted_leq(z, other, other)


def test_poset_carrier_matches_minimal_coset_representatives():
    for family, rank, I in [("A", 3, {1}), ("B", 2, {2}), ("C", 3, {1, 3}), ("D", 3, {1})]:
        W = create_weyl(family, rank)
        z = zip_from_cocharacter(W, I)
        p = stratum_poset(z)
        assert p.carrier == min_coset_reps(W, I)
        assert len(p.carrier) == W.order // parabolic_order(W, I)


def test_poset_has_unique_bottom_and_top():
    for family, rank, I in [("A", 3, {2}), ("B", 3, {1, 2}), ("D", 4, {1, 3, 4})]:
        W = create_weyl(family, rank)
        z = zip_from_cocharacter(W, I)
        p = stratum_poset(z)
        bottom = [k for k in range(len(p.carrier)) if all(not p.leq[i][k] for i in range(len(p.carrier)) if i != k)]
        top = [k for k in range(len(p.carrier)) if all(not p.leq[k][j] for j in range(len(p.carrier)) if j != k)]
        assert bottom == [0] and p.carrier[0].is_identity
        assert len(top) == 1
        assert p.length_of[top[0]] == max(p.length_of)


# ---------------------------------------------------------------------------
# dimensions
# ---------------------------------------------------------------------------


def test_two_by_two_matrix_group_stratum_dimensions():
    W = create_weyl("A", 1)
    z = build_zip(W, set(), set(), gl_center=True)
    p = stratum_poset(z)
    assert dim_parabolic(z) == 3
    assert p.dim_of == (3, 4)


def test_dimension_spread_equals_longest_length_for_borel_datum():
    for family, rank in [("A", 3), ("B", 2), ("C", 3), ("D", 4)]:
        W = create_weyl(family, rank)
        z = build_zip(W, set(), set())
        p = stratum_poset(z)
        assert max(p.dim_of) - min(p.dim_of) == longest_element(W).length


def test_stratum_dimension_agrees_with_poset_entries():
    W = create_weyl("B", 3)
    z = zip_from_cocharacter(W, {1, 3})
    p = stratum_poset(z)
    for k, w in enumerate(p.carrier):
        assert stratum_dimension(z, w) == p.dim_of[k]


def test_top_stratum_dimension_is_the_full_group_dimension():
    # open stratum: dim P + l(longest rep) = dim G for a cocharacter datum
    for family, rank, I in [("A", 3, {1}), ("B", 3, {2, 3}), ("D", 4, {1, 2})]:
        W = create_weyl(family, rank)
        z = zip_from_cocharacter(W, I)
        p = stratum_poset(z)
        dim_g = W.rank + 2 * W.positive_root_count
        assert max(p.dim_of) == dim_g


# ---------------------------------------------------------------------------
# closure, boundary, purity
# ---------------------------------------------------------------------------


def test_closure_and_boundary_on_the_rank_two_chain():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    p = stratum_poset(z)
    top = p.carrier[2]
    assert closure(z, top) == frozenset(p.carrier)
    assert boundary_maximal(z, top) == frozenset({p.carrier[1]})
    assert boundary_maximal(z, p.carrier[0]) == frozenset()


def test_purity_holds_across_small_cocharacter_data():
    for family, rank in [("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("D", 3)]:
        W = create_weyl(family, rank)
        subsets = [
            frozenset(s)
            for mask in range(1 << rank)
            for s in [[i + 1 for i in range(rank) if mask >> i & 1]]
        ]
        for I in subsets:
            z = zip_from_cocharacter(W, I)
            report = purity_check(z)
            assert report.passed, (family, rank, sorted(I), report.violations[:3])
            assert report.strata_checked == len(stratum_poset(z).carrier)


def test_purity_detects_a_corrupted_cover_file():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    text = export_poset(stratum_poset(z), "json")
    obj = json.loads(text)
    obj["covers"] = [[0, 2]]
    corrupted = import_poset(json.dumps(obj))
    report = purity_check_poset(corrupted)
    assert not report.passed
    assert report.violations[0].length - report.violations[0].boundary_length == 2


# ---------------------------------------------------------------------------
# Galois quotients
# ---------------------------------------------------------------------------


def test_galois_quotient_by_diagram_flip_has_short_orbits():
    W = create_weyl("A", 3)
    z = build_zip(W, set(), set())
    flip = dict(zip([1, 2, 3], [3, 2, 1]))
    from zipstrata.coxeter import apply_diagram_automorphism

    q = galois_quotient(z, lambda w: apply_diagram_automorphism(flip, w))
    assert all(len(orb) in (1, 2) for orb in q.orbits)
    assert sum(len(orb) for orb in q.orbits) == W.order
    for a in range(len(q.orbits)):
        for b in range(len(q.orbits)):
            if a != b:
                assert not (q.induced_leq[a][b] and q.induced_leq[b][a])


def test_galois_quotient_by_identity_is_the_poset_itself():
    W = create_weyl("B", 2)
    z = zip_from_cocharacter(W, {1})
    p = stratum_poset(z)
    q = galois_quotient(z, {w: w for w in p.carrier})
    assert q.orbits == tuple((w,) for w in p.carrier)
    assert q.induced_leq == p.leq


def test_galois_quotient_rejects_order_incompatible_permutations():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    p = stratum_poset(z)
    swap = {p.carrier[0]: p.carrier[2], p.carrier[2]: p.carrier[0], p.carrier[1]: p.carrier[1]}
    with pytest.raises(ValueError):
        galois_quotient(z, swap)


def test_galois_quotient_rejects_non_permutations():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    p = stratum_poset(z)
    with pytest.raises(ValueError):
        galois_quotient(z, {w: p.carrier[0] for w in p.carrier})


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def test_json_export_is_byte_deterministic_and_round_trips():
    W = create_weyl("B", 2)
    z = zip_from_cocharacter(W, {2})
    p = stratum_poset(z)
    first = export_poset(p, "json")
    second = export_poset(p, "json")
    assert first == second
    assert first.endswith("\n")
    back = import_poset(first)
    assert back == p
    assert export_poset(back, "json") == first


def test_dot_export_lists_every_stratum_with_length_and_dimension():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    dot = export_poset(stratum_poset(z), "dot")
    assert dot == export_poset(stratum_poset(z), "dot")
    assert 'n0 [label="e | 0 | 6"];' in dot
    assert 'n1 [label="s2 | 1 | 7"];' in dot
    assert 'n2 [label="s2*s1 | 2 | 8"];' in dot
    assert "n0 -> n1;" in dot and "n1 -> n2;" in dot
    assert dot.startswith("digraph strata {")


def test_unknown_export_format_is_rejected():
    W = create_weyl("A", 2)
    z = build_zip(W, {1}, {2})
    with pytest.raises(ValueError):
        export_poset(stratum_poset(z), "yaml")


# ---------------------------------------------------------------------------
# the large polarised surface example
# ---------------------------------------------------------------------------


def test_large_hodge_shape_carrier_has_462_strata_with_order_omitted():
    W = create_weyl("A", 21)
    z = zip_from_cocharacter(W, set(range(2, 21)), gl_center=True)
    assert z.J == z.I
    p = stratum_poset(z)
    assert len(p.carrier) == 462
    assert not p.order_complete
    assert p.leq is None and p.covers == ()
    assert dim_parabolic(z) == 443
    assert min(p.dim_of) == 443 and max(p.dim_of) == 484
    assert max(p.length_of) == 41
    text = export_poset(p, "json")
    assert '"order":"omitted:levi-too-large"' in text
    assert json.loads(text)["covers"] == []
    dot = export_poset(p, "dot")
    assert "->" not in dot
    with pytest.raises(ValueError):
        purity_check(z)
    with pytest.raises(ValueError):
        closure(z, p.carrier[0])


def test_import_of_omitted_order_round_trips():
    W = create_weyl("A", 21)
    z = zip_from_cocharacter(W, set(range(2, 21)), gl_center=True)
    p = stratum_poset(z)
    text = export_poset(p, "json")
    back = import_poset(text)
    assert back == p
    assert export_poset(back, "json") == text
