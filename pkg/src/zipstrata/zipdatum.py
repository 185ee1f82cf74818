"""Combinatorics of zip strata: twisted partial orders on coset representatives.

A zip datum at this level is a Weyl group together with two subsets I, J of
simple indices, a diagram automorphism delta, and the distinguished twisting
element theta0.  Strata are indexed by the minimal coset representatives of
W_I \\ W and carry the partial order

    w' <= w  iff  u * w' * psi(u)**-1 is Bruhat-below w for some u in W_I,

where psi = int(theta0) o delta identifies W_I with W_J.  The module builds
the full poset when the Levi group W_I is small enough to scan and otherwise
marks the order as omitted while still exposing the carrier and dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .coxeter import (
    ParabolicType,
    WeylElement,
    WeylGroup,
    apply_diagram_automorphism,
    bruhat_leq,
    has_left_descent_in,
    longest_element,
    longest_element_parabolic,
    min_coset_reps,
    min_double_coset_rep,
    parabolic_elements,
    parabolic_order,
    simple_index_of,
    validate_diagram_automorphism,
    word_string,
)

LEVI_ENUMERATION_GUARD = 40_320

ORDER_COMPLETE = "complete"
ORDER_OMITTED = "omitted:levi-too-large"


class PsiMismatch(ValueError):
    """The twist does not carry the simple reflections of I onto those of J."""


@dataclass(frozen=True)
class ZipCombinatorics:
    """Weyl-group shadow of an algebraic zip datum."""

    group: WeylGroup
    I: ParabolicType
    J: ParabolicType
    delta: tuple[int, ...]
    theta0: WeylElement
    gl_center: bool = False

    def delta_image(self, w: WeylElement) -> WeylElement:
        return apply_diagram_automorphism(self.delta, w)

    def psi(self, w: WeylElement) -> WeylElement:
        """The twist w -> theta0 * delta(w) * theta0**-1."""
        return self.theta0 * self.delta_image(w) * self.theta0.inverse()

    def psi_index(self, i: int) -> int:
        j = simple_index_of(self.psi(self.group.simple_reflection(i)))
        assert j is not None
        return j


def build_zip(
    group: WeylGroup,
    I: "ParabolicType | Iterable[int]",
    J: "ParabolicType | Iterable[int]",
    delta: "Mapping[int, int] | Sequence[int] | None" = None,
    gl_center: bool = False,
) -> ZipCombinatorics:
    """Assemble a zip datum, or raise PsiMismatch when the twist cannot match I to J.

    theta0 is the minimal element of the double coset W_J w0 W_{delta(I)}; the
    twist psi = int(theta0) o delta must send each simple reflection of I to a
    simple reflection of J, bijectively.
    """
    I = ParabolicType.of(I)
    J = ParabolicType.of(J)
    I.validate(group)
    J.validate(group)
    images = validate_diagram_automorphism(group, delta)
    if gl_center and group.family != "A":
        raise ValueError("the central torus flag only makes sense for type A")
    delta_I = ParabolicType.of(images[i - 1] for i in I)
    theta0 = min_double_coset_rep(group, J, longest_element(group), delta_I)
    datum = ZipCombinatorics(group, I, J, images, theta0, gl_center)
    seen: set[int] = set()
    for i in I:
        j = simple_index_of(datum.psi(group.simple_reflection(i)))
        if j is None or j not in J or j in seen:
            raise PsiMismatch(
                f"twist sends s{i} outside the simple reflections of J={sorted(J.indices)}"
            )
        seen.add(j)
    if len(seen) != len(J):
        raise PsiMismatch("twist does not cover J")
    return datum


def zip_from_cocharacter(
    group: WeylGroup,
    I: "ParabolicType | Iterable[int]",
    delta: "Mapping[int, int] | Sequence[int] | None" = None,
    gl_center: bool = False,
) -> ZipCombinatorics:
    """The datum attached to a cocharacter: J is forced to w0 delta(I) w0."""
    I = ParabolicType.of(I)
    I.validate(group)
    images = validate_diagram_automorphism(group, delta)
    w0 = longest_element(group)
    J = set()
    for i in I:
        t = w0 * group.simple_reflection(images[i - 1]) * w0
        j = simple_index_of(t)
        assert j is not None
        J.add(j)
    return build_zip(group, I, J, images, gl_center)


# ---------------------------------------------------------------------------
# the twisted order
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _twist_pairs(z: ZipCombinatorics) -> tuple[tuple[WeylElement, WeylElement], ...]:
    levi = parabolic_elements(z.group, z.I)
    return tuple((u, z.psi(u).inverse()) for u in levi)


def _require_carrier_element(z: ZipCombinatorics, w: WeylElement) -> None:
    if w.group != z.group:
        raise ValueError("element does not belong to the datum's group")
    if has_left_descent_in(w, z.I):
        raise ValueError(f"{w!r} is not a minimal coset representative for I")


def twisted_leq(z: ZipCombinatorics, w_prime: WeylElement, w: WeylElement) -> bool:
    """Twisted order on the stratum labels, by exhaustive scan of W_I."""
    _require_carrier_element(z, w_prime)
    _require_carrier_element(z, w)
    if parabolic_order(z.group, z.I) > LEVI_ENUMERATION_GUARD:
        raise ValueError("Levi group too large to scan; the order is not available")
    return any(bruhat_leq(u * w_prime * pu_inv, w) for u, pu_inv in _twist_pairs(z))


@dataclass(frozen=True)
class StratumPoset:
    """Stratum labels with lengths, dimensions and (when available) the order."""

    zip_data: ZipCombinatorics
    carrier: tuple[WeylElement, ...]
    leq: Optional[tuple[tuple[bool, ...], ...]]
    length_of: tuple[int, ...]
    dim_of: tuple[int, ...]
    covers: tuple[tuple[int, int], ...]
    order_complete: bool

    def index_of(self, w: WeylElement) -> int:
        try:
            return self.carrier.index(w)
        except ValueError:
            raise ValueError(f"{w!r} is not a stratum label of this datum") from None

    def _need_order(self) -> None:
        if not self.order_complete:
            raise ValueError("the order was omitted for this datum (Levi too large)")

    def leq_elements(self, w_prime: WeylElement, w: WeylElement) -> bool:
        self._need_order()
        assert self.leq is not None
        return self.leq[self.index_of(w_prime)][self.index_of(w)]


def dim_parabolic(z: ZipCombinatorics) -> int:
    """Dimension of the parabolic attached to I (torus + all positives + Levi part)."""
    group = z.group
    torus = group.rank + (1 if z.gl_center else 0)
    levi_length = longest_element_parabolic(group, z.I).length
    return torus + group.positive_root_count + levi_length


def stratum_dimension(z: ZipCombinatorics, w: WeylElement) -> int:
    _require_carrier_element(z, w)
    return dim_parabolic(z) + w.length


@lru_cache(maxsize=None)
def stratum_poset(z: ZipCombinatorics) -> StratumPoset:
    """Build the poset of stratum labels; heavy Levi groups get the order omitted."""
    carrier = min_coset_reps(z.group, z.I)
    lengths = tuple(w.length for w in carrier)
    base = dim_parabolic(z)
    dims = tuple(base + l for l in lengths)
    if parabolic_order(z.group, z.I) > LEVI_ENUMERATION_GUARD:
        return StratumPoset(z, carrier, None, lengths, dims, (), False)
    pairs = _twist_pairs(z)
    n = len(carrier)
    rows: list[tuple[bool, ...]] = []
    for wp in carrier:
        translates = [u * wp * pu_inv for u, pu_inv in pairs]
        rows.append(tuple(any(bruhat_leq(t, w) for t in translates) for w in carrier))
    leq = tuple(rows)
    _validate_order(carrier, lengths, leq)
    covers = _covers_from_leq(leq)
    return StratumPoset(z, carrier, leq, lengths, dims, covers, True)


def _validate_order(
    carrier: tuple[WeylElement, ...],
    lengths: tuple[int, ...],
    leq: tuple[tuple[bool, ...], ...],
) -> None:
    n = len(carrier)
    below = [0] * n
    for j in range(n):
        mask = 0
        for i in range(n):
            if leq[i][j]:
                mask |= 1 << i
        below[j] = mask
    for i in range(n):
        assert leq[i][i], "order must be reflexive"
        for j in range(n):
            if leq[i][j]:
                if i != j:
                    assert not leq[j][i], "order must be antisymmetric"
                    assert lengths[i] < lengths[j], "order must refine length"
                assert below[i] & ~below[j] == 0, "order must be transitive"
    minima = [j for j in range(n) if below[j] == 1 << j]
    maxima = [i for i in range(n) if all(not leq[i][j] for j in range(n) if j != i)]
    assert len(minima) == 1, "twisted order must have a unique minimum"
    assert len(maxima) == 1, "twisted order must have a unique maximum"


def _covers_from_leq(leq: tuple[tuple[bool, ...], ...]) -> tuple[tuple[int, int], ...]:
    n = len(leq)
    strict = []
    for j in range(n):
        mask = 0
        for i in range(n):
            if leq[i][j] and i != j:
                mask |= 1 << i
        strict.append(mask)
    covers = []
    for j in range(n):
        dominated = 0
        m = strict[j]
        while m:
            low = m & -m
            dominated |= strict[low.bit_length() - 1]
            m ^= low
        keep = strict[j] & ~dominated
        while keep:
            low = keep & -keep
            covers.append((low.bit_length() - 1, j))
            keep ^= low
    return tuple(sorted(covers))


def closure(z: ZipCombinatorics, w: WeylElement) -> frozenset[WeylElement]:
    """All stratum labels weakly below w in the twisted order."""
    poset = stratum_poset(z)
    poset._need_order()
    assert poset.leq is not None
    j = poset.index_of(w)
    return frozenset(poset.carrier[i] for i in range(len(poset.carrier)) if poset.leq[i][j])


def boundary_maximal(z: ZipCombinatorics, w: WeylElement) -> frozenset[WeylElement]:
    """Maximal elements of the boundary closure(w) - {w}."""
    poset = stratum_poset(z)
    poset._need_order()
    assert poset.leq is not None
    j = poset.index_of(w)
    boundary = [i for i in range(len(poset.carrier)) if poset.leq[i][j] and i != j]
    out = [
        i
        for i in boundary
        if not any(poset.leq[i][k] for k in boundary if k != i)
    ]
    return frozenset(poset.carrier[i] for i in out)


# ---------------------------------------------------------------------------
# purity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PurityViolation:
    stratum: tuple[int, ...]
    boundary_stratum: tuple[int, ...]
    length: int
    boundary_length: int


@dataclass(frozen=True)
class PurityReport:
    passed: bool
    violations: tuple[PurityViolation, ...]
    strata_checked: int


def _purity_from_relation(
    lengths: Sequence[int],
    leq: Sequence[Sequence[bool]],
    words: Sequence[tuple[int, ...]],
) -> PurityReport:
    n = len(lengths)
    violations = []
    for j in range(n):
        boundary = [i for i in range(n) if leq[i][j] and i != j]
        for i in boundary:
            if any(leq[i][k] for k in boundary if k != i):
                continue
            if lengths[j] - lengths[i] != 1:
                violations.append(
                    PurityViolation(words[j], words[i], lengths[j], lengths[i])
                )
    return PurityReport(not violations, tuple(violations), n)


def purity_check(z: ZipCombinatorics) -> PurityReport:
    """Check that every maximal boundary stratum drops the length by exactly one."""
    poset = stratum_poset(z)
    poset._need_order()
    assert poset.leq is not None
    words = [w.reduced_word() for w in poset.carrier]
    return _purity_from_relation(poset.length_of, poset.leq, words)


def purity_check_poset(poset: StratumPoset) -> PurityReport:
    """Purity on an explicit poset, e.g. one replayed from a file."""
    poset._need_order()
    assert poset.leq is not None
    words = [w.reduced_word() for w in poset.carrier]
    return _purity_from_relation(poset.length_of, poset.leq, words)


# ---------------------------------------------------------------------------
# Galois quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaloisQuotient:
    orbits: tuple[tuple[WeylElement, ...], ...]
    induced_leq: tuple[tuple[bool, ...], ...]


def galois_quotient(
    z: ZipCombinatorics,
    frobenius_action: "Mapping[WeylElement, WeylElement] | Callable[[WeylElement], WeylElement]",
) -> GaloisQuotient:
    """Quotient of the stratum poset by a compatible permutation of the labels.

    The action must permute the carrier and preserve the twisted order in both
    directions; the induced relation on orbits is checked to be antisymmetric.
    """
    poset = stratum_poset(z)
    poset._need_order()
    assert poset.leq is not None
    carrier = poset.carrier
    if callable(frobenius_action) and not isinstance(frobenius_action, Mapping):
        act = {w: frobenius_action(w) for w in carrier}
    else:
        act = dict(frobenius_action)
    if sorted(act, key=lambda w: w.window) != sorted(carrier, key=lambda w: w.window):
        raise ValueError("action must be defined exactly on the stratum labels")
    if sorted((v.window for v in act.values())) != sorted(w.window for w in carrier):
        raise ValueError("action must permute the stratum labels")
    index = {w: k for k, w in enumerate(carrier)}
    perm = [index[act[w]] for w in carrier]
    for i in range(len(carrier)):
        for j in range(len(carrier)):
            if poset.leq[i][j] != poset.leq[perm[i]][perm[j]]:
                raise ValueError("action does not preserve the twisted order")
    seen = set()
    orbits: list[tuple[WeylElement, ...]] = []
    for start in range(len(carrier)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        cur = perm[start]
        while cur != start:
            cyc.append(cur)
            seen.add(cur)
            cur = perm[cur]
        anchor = min(range(len(cyc)), key=lambda t: (poset.length_of[cyc[t]], carrier[cyc[t]].window))
        cyc = cyc[anchor:] + cyc[:anchor]
        orbits.append(tuple(carrier[i] for i in cyc))
    orbits.sort(key=lambda orb: (orb[0].length, orb[0].window))
    induced = []
    for oa in orbits:
        row = []
        for ob in orbits:
            row.append(
                any(poset.leq[index[a]][index[b]] for a in oa for b in ob)
            )
        induced.append(tuple(row))
    for a in range(len(orbits)):
        for b in range(len(orbits)):
            if a != b and induced[a][b] and induced[b][a]:
                raise ValueError("induced relation on orbits is not antisymmetric")
    return GaloisQuotient(tuple(orbits), tuple(induced))


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def export_poset(poset: StratumPoset, fmt: str) -> str:
    """Serialise a poset; output is byte deterministic for a given input."""
    fmt = fmt.lower()
    if fmt == "json":
        return _export_json(poset)
    if fmt == "dot":
        return _export_dot(poset)
    raise ValueError(f"unknown export format {fmt!r}")


def _export_json(poset: StratumPoset) -> str:
    z = poset.zip_data
    obj = {
        "group": {
            "family": z.group.family,
            "rank": z.group.rank,
            "gl_center": z.gl_center,
        },
        "I": sorted(z.I.indices),
        "J": sorted(z.J.indices),
        "delta": list(z.delta),
        "order": ORDER_COMPLETE if poset.order_complete else ORDER_OMITTED,
        "strata": [
            {
                "word": list(w.reduced_word()),
                "length": poset.length_of[k],
                "dim": poset.dim_of[k],
            }
            for k, w in enumerate(poset.carrier)
        ],
        "covers": [list(c) for c in poset.covers],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _export_dot(poset: StratumPoset) -> str:
    lines = ["digraph strata {", "  rankdir=BT;"]
    for k, w in enumerate(poset.carrier):
        label = f"{word_string(w)} | {poset.length_of[k]} | {poset.dim_of[k]}"
        lines.append(f'  n{k} [label="{label}"];')
    for i, j in poset.covers:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def import_poset(text: str) -> StratumPoset:
    """Rebuild a poset from its JSON export; the order is the closure of the covers."""
    obj = json.loads(text)
    group = WeylGroup(obj["group"]["family"], obj["group"]["rank"])
    z = build_zip(
        group,
        obj["I"],
        obj["J"],
        tuple(obj["delta"]),
        gl_center=obj["group"]["gl_center"],
    )
    from .coxeter import element_from_word

    carrier = tuple(element_from_word(group, s["word"]) for s in obj["strata"])
    lengths = tuple(int(s["length"]) for s in obj["strata"])
    dims = tuple(int(s["dim"]) for s in obj["strata"])
    covers = tuple((int(a), int(b)) for a, b in obj["covers"])
    if obj.get("order") != ORDER_COMPLETE:
        return StratumPoset(z, carrier, None, lengths, dims, (), False)
    n = len(carrier)
    reach = [1 << j for j in range(n)]
    changed = True
    while changed:
        changed = False
        for a, b in covers:
            if reach[a] | reach[b] != reach[b]:
                reach[b] |= reach[a]
                changed = True
    leq = tuple(
        tuple(bool(reach[j] >> i & 1) for j in range(n)) for i in range(n)
    )
    return StratumPoset(z, carrier, leq, lengths, dims, covers, True)
