"""The three permutation-encoding tournament families and their decoding.

In the tournament for kind ``R`` and permutation sigma on ``n`` points,
``x_i = i`` and ``y_j = n + j``; X and Y are chains in index order and
``y_j -> x_i`` exactly when ``i R sigma^-1(j)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

from .chain_order import ChainQuasiOrder, chain_quasi_order
from .errors import NotAChain, NotInImage, SizeLimitError, TooSmall, WrongEnumeration
from .fo_logic import (
    Atom,
    Eq,
    Interpretation,
    Not,
    apply_interpretation_with_map,
    conj,
    disj,
    exists,
    forall,
    implies,
    rename,
)
from .graph import (
    OrientedGraph,
    Tournament,
    automorphism_count,
    build_graph,
    canonical_form,
    chain_order,
    find_induced_copy,
    mask_of,
    members,
)
from .matrix import Matrix, MatrixClassKind, build_M
from .permutation import Permutation, all_permutations
from .structure import BinaryStructure, from_graph

ENUMERATE_MAX_M = 4


class ObstructionKind(str, enum.Enum):
    EQ = "="
    LE = "<="
    GE = ">="

    @classmethod
    def parse(cls, text: str) -> ObstructionKind:
        aliases = {"eq": "=", "le": "<=", "ge": ">=", "≤": "<=", "≥": ">="}
        return cls(aliases.get(text, text))

    def relation(self, i: int, j: int) -> bool:
        if self is ObstructionKind.EQ:
            return i == j
        if self is ObstructionKind.LE:
            return i <= j
        return i >= j


@dataclass(frozen=True)
class RoleMap:
    """``x[i - 1]`` is the vertex of ``x_i``, ``y[j - 1]`` that of ``y_j``."""

    n: int
    x: tuple[int, ...]
    y: tuple[int, ...]


def build_F(r: ObstructionKind | str, sigma: Permutation) -> tuple[Tournament, RoleMap]:
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    n = sigma.n
    inv = sigma.inverse()
    arcs = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            arcs.append((i, j))
            arcs.append((n + i, n + j))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if r.relation(i, inv(j)):
                arcs.append((n + j, i))
            else:
                arcs.append((i, n + j))
    t = build_graph(2 * n, arcs, "tournament")
    return t, RoleMap(n, tuple(range(1, n + 1)), tuple(range(n + 1, 2 * n + 1)))


def extend_sigma(r: ObstructionKind | str, sigma: Permutation) -> Permutation:
    """Add one point so that the encoding identifies X and Y on its own."""
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    n = sigma.n
    if n < 2:
        raise TooSmall("the extension needs at least two points")
    if r is ObstructionKind.EQ:
        return Permutation(sigma.image + (n + 1,))
    return Permutation((n + 1,) + sigma.image)


def restrict_extension(r: ObstructionKind, ext: Permutation) -> Permutation:
    """Inverse of :func:`extend_sigma` (checks the added point)."""
    m = ext.n
    if r is ObstructionKind.EQ:
        if ext(m) != m:
            raise NotInImage("extension point is not fixed at the end")
        return Permutation(ext.image[:-1])
    if ext(1) != m:
        raise NotInImage("extension point is not at the front")
    return Permutation(ext.image[1:])


def anchor_candidates(r: ObstructionKind | str, t: OrientedGraph) -> list[int]:
    """Vertices of out-degree 1 (kinds = and <=) or in-degree 1 (kind >=)."""
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    if r is ObstructionKind.GE:
        return [v for v in t.vertices if t.in_degree(v) == 1]
    return [v for v in t.vertices if t.out_degree(v) == 1]


def _locate_x(r: ObstructionKind, t: OrientedGraph) -> tuple[int, int]:
    """(mask of X, the extra y vertex)."""
    cands = anchor_candidates(r, t)
    if r is ObstructionKind.GE:
        if len(cands) == 2:
            a, b = cands
            if t.has_arc(a, b):
                cands = [a]
            elif t.has_arc(b, a):
                cands = [b]
        if len(cands) != 1:
            raise NotInImage(f"expected one in-degree-1 anchor, found {len(cands)}")
        x1 = cands[0]
        ystar = members(t.inn[x1])[0]
        return t.out[ystar], ystar
    if len(cands) != 1:
        raise NotInImage(f"expected one out-degree-1 anchor, found {len(cands)}")
    ystar = cands[0]
    xa = members(t.out[ystar])[0]
    if r is ObstructionKind.EQ:
        return (t.inn[xa] | (1 << xa)) & ~(1 << ystar), ystar
    return t.out[xa] | (1 << xa), ystar


def decode_roles(r: ObstructionKind | str, t: OrientedGraph) -> tuple[Permutation, RoleMap]:
    """Recover the extended permutation and the role of every vertex."""
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    if t.n % 2 or t.n < 6 or not t.is_tournament():
        raise NotInImage("needs a tournament on an even number (at least 6) of vertices")
    m = t.n // 2
    xmask, _ = _locate_x(r, t)
    if xmask.bit_count() != m:
        raise NotInImage("anchor does not split the vertices in half")
    ymask = t.all & ~xmask
    try:
        xs = chain_order(t, xmask)
        ys = chain_order(t, ymask)
    except NotAChain as exc:
        raise NotInImage(f"X or Y is not a chain: {exc}") from None
    inv = []
    for y in ys:
        back = t.out[y] & xmask
        if r is ObstructionKind.EQ:
            if back.bit_count() != 1:
                raise NotInImage("Y to X arcs are not a matching")
            inv.append(xs.index(members(back)[0]) + 1)
        elif r is ObstructionKind.LE:
            inv.append(m - (t.inn[y] & xmask).bit_count())
        else:
            inv.append((t.inn[y] & xmask).bit_count() + 1)
    try:
        ext = Permutation(tuple(inv)).inverse()
    except ValueError:
        raise NotInImage("Y to X arcs do not encode a permutation") from None
    # every arc must agree with the rebuilt encoding under this labelling
    ref, _ = build_F(r, ext)
    label = {i + 1: v for i, v in enumerate(xs)}
    label.update({m + j + 1: v for j, v in enumerate(ys)})
    for u in range(1, 2 * m + 1):
        for w in members(ref.out[u]):
            if not t.has_arc(label[u], label[w]):
                raise NotInImage("arcs disagree with the decoded encoding")
    return ext, RoleMap(m, tuple(xs), tuple(ys))


def decode_F(r: ObstructionKind | str, t: OrientedGraph) -> Permutation:
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    ext, _ = decode_roles(r, t)
    return restrict_extension(r, ext)


# the decoding as an FO interpretation


def _outdeg1(v: str) -> object:
    return exists("z1", conj(Atom("arc", v, "z1"), forall("w1", implies(Atom("arc", v, "w1"), Eq("w1", "z1")))))


def _indeg1(v: str) -> object:
    return exists("z2", conj(Atom("arc", "z2", v), forall("w2", implies(Atom("arc", "w2", v), Eq("w2", "z2")))))


def _membership_formulas(r: ObstructionKind):
    """(formula for 'v is the extra y', formula for 'v is in X'), free variable v."""
    if r is ObstructionKind.GE:
        x1 = conj(_indeg1("a"), forall("b", implies(conj(_indeg1("b"), Not(Eq("a", "b"))), Atom("arc", "a", "b"))))
        ystar = exists("a", conj(x1, Atom("arc", "v", "a")))
        in_x = exists("c", conj(rename(ystar, {"v": "c"}), Atom("arc", "c", "v")))
        return ystar, in_x
    ystar = _outdeg1("v")
    ys_c = rename(ystar, {"v": "c"})
    if r is ObstructionKind.EQ:
        in_x = exists(
            ("c", "d"),
            conj(ys_c, Atom("arc", "c", "d"), disj(Eq("v", "d"), conj(Atom("arc", "v", "d"), Not(Eq("v", "c"))))),
        )
    else:
        in_x = exists(("c", "d"), conj(ys_c, Atom("arc", "c", "d"), disj(Eq("v", "d"), Atom("arc", "d", "v"))))
    return ystar, in_x


def phi_interpretation(r: ObstructionKind | str) -> Interpretation:
    """Domain Y minus the extra vertex; ``ord1`` is the order Y inherits from
    X (matching or inclusion), ``ord2`` the arc order inside Y."""
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    ystar, in_x = _membership_formulas(r)
    dom = conj(Not(rename(in_x, {"v": "x"})), Not(rename(ystar, {"v": "x"})))
    inx_p = rename(in_x, {"v": "p"})
    if r is ObstructionKind.EQ:
        inx_q = rename(in_x, {"v": "q"})
        ord1 = exists(
            ("p", "q"),
            conj(inx_p, inx_q, Atom("arc", "x", "p"), Atom("arc", "y", "q"), Atom("arc", "p", "q")),
        )
    elif r is ObstructionKind.LE:
        ord1 = exists("p", conj(inx_p, Atom("arc", "p", "x"), Not(Atom("arc", "p", "y"))))
    else:
        ord1 = exists("p", conj(inx_p, Atom("arc", "p", "y"), Not(Atom("arc", "p", "x"))))
    return Interpretation(dom, (("ord1", ord1), ("ord2", Atom("arc", "x", "y"))))


def biorder_structure(sigma: Permutation) -> BinaryStructure:
    """``O_sigma``: ``ord1`` natural, ``ord2`` by sigma value."""
    n = sigma.n
    o1 = [0] * (n + 1)
    o2 = [0] * (n + 1)
    for i in range(1, n + 1):
        o1[i] = mask_of(range(i + 1, n + 1))
        o2[i] = mask_of(j for j in range(1, n + 1) if sigma(i) < sigma(j))
    return BinaryStructure(n, ("ord1", "ord2"), (tuple(o1), tuple(o2)))


def biorder_to_permutation(s: BinaryStructure) -> Permutation:
    """Read sigma off a structure with two strict total orders ``ord1``, ``ord2``."""
    n = s.n
    o1, o2 = s.relation("ord1"), s.relation("ord2")
    by1 = sorted(range(1, n + 1), key=lambda v: -o1[v].bit_count())
    rank2 = {v: n - o2[v].bit_count() for v in range(1, n + 1)}
    perm = Permutation(tuple(rank2[v] for v in by1))
    if biorder_structure(perm).rels != tuple(
        tuple(_relabel_table(tbl, by1)) for tbl in (o1, o2)
    ):
        raise NotInImage("relations are not two total orders")
    return perm


def _relabel_table(table: Sequence[int], by1: Sequence[int]) -> list[int]:
    pos = {v: i for i, v in enumerate(by1, 1)}
    out = [0] * (len(by1) + 1)
    for v in by1:
        out[pos[v]] = mask_of(pos[w] for w in members(table[v]))
    return out


def interpret_F(r: ObstructionKind | str, t: OrientedGraph) -> Permutation:
    """Decode by evaluating the FO interpretation (slow, independent of :func:`decode_F`)."""
    out, _ = apply_interpretation_with_map(phi_interpretation(r), from_graph(t))
    return biorder_to_permutation(out)


# chain-order representations


@dataclass(frozen=True)
class ChainOrderRepresentation:
    a: tuple[int, ...]
    b: tuple[int, ...]
    chain_a: tuple[int, ...]
    orient_a: str
    chain_b: tuple[int, ...]
    orient_b: str
    kind: MatrixClassKind
    sigma: Permutation


@dataclass(frozen=True)
class RepViolation:
    reason: str
    detail: str = ""


def representation_matrix(g: OrientedGraph, rep: ChainOrderRepresentation) -> tuple[Matrix, ChainQuasiOrder, ChainQuasiOrder]:
    qa = chain_quasi_order(g, rep.chain_a, rep.orient_a)
    qb = chain_quasi_order(g, rep.chain_b, rep.orient_b)
    rows = sorted(rep.a, key=qa.class_of)
    cols = sorted(rep.b, key=qb.class_of)
    m = Matrix.of([[int(g.has_arc(u, v)) for v in cols] for u in rows], 2)
    return m, qa, qb


def verify_chain_representation(rep: ChainOrderRepresentation, g: OrientedGraph) -> RepViolation | None:
    """None when A, B are disjoint, each totally ordered by its quasi-order,
    and the A-versus-B adjacency matrix is the claimed encoding."""
    if set(rep.a) & set(rep.b):
        return RepViolation("not-disjoint")
    try:
        m, qa, qb = representation_matrix(g, rep)
    except (NotAChain, WrongEnumeration) as exc:
        return RepViolation("chain", str(exc))
    for s, q in ((rep.a, qa), (rep.b, qb)):
        classes = [q.class_of(v) for v in s]
        if len(set(classes)) != len(classes):
            return RepViolation("not-totally-ordered")
    if len(rep.a) != rep.sigma.n or len(rep.b) != rep.sigma.n:
        return RepViolation("matrix", "size differs from the permutation")
    want = build_M(rep.kind, rep.sigma)
    if m.entries != want.entries:
        bad = next(
            (r, c) for r in range(m.rows) for c in range(m.cols) if m.entries[r][c] != want.entries[r][c]
        )
        return RepViolation("matrix", f"first mismatch at row {bad[0] + 1}, column {bad[1] + 1}")
    return None


def standard_representation(r: ObstructionKind | str, sigma: Permutation, rows: str = "Y") -> ChainOrderRepresentation:
    """X and Y of ``build_F(r, sigma)`` with their own chains.

    Rows Y give the class named after ``r`` on sigma^-1. Rows X only work
    for kind =, where the matrix is the != encoding of sigma.
    """
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    _, roles = build_F(r, sigma)
    if rows == "Y":
        kind = {
            ObstructionKind.EQ: MatrixClassKind.EQ,
            ObstructionKind.LE: MatrixClassKind.LE_R,
            ObstructionKind.GE: MatrixClassKind.GE_R,
        }[r]
        return ChainOrderRepresentation(roles.y, roles.x, roles.y, "+", roles.x, "+", kind, sigma.inverse())
    if rows != "X" or r is not ObstructionKind.EQ:
        raise ValueError("rows X are a matrix class only for kind =")
    return ChainOrderRepresentation(roles.x, roles.y, roles.x, "+", roles.y, "+", MatrixClassKind.NE, sigma)


# per-instance constructions


def disjointify_division(
    order: Sequence[int],
    row_parts: Sequence[Sequence[int]],
    col_parts: Sequence[Sequence[int]],
) -> tuple[list[list[int]], list[list[int]], str]:
    """From 2k row and 2k column intervals keep k of each, all pairwise disjoint,
    every kept row part on one side of every kept column part.

    Returns (rows, cols, "rows-first" or "cols-first").
    """
    if len(row_parts) != len(col_parts) or len(row_parts) % 2:
        raise ValueError("need 2k row parts and 2k column parts")
    k = len(row_parts) // 2
    pos = {v: i for i, v in enumerate(order)}

    def lo(p):
        return min(pos[v] for v in p)

    def hi(p):
        return max(pos[v] for v in p)

    if k == 0:
        return [], [], "rows-first"
    if hi(row_parts[k - 1]) < lo(col_parts[k]):
        rows, cols, how = row_parts[:k], col_parts[k:], "rows-first"
    elif hi(col_parts[k - 1]) < lo(row_parts[k]):
        rows, cols, how = row_parts[k:], col_parts[:k], "cols-first"
    else:
        raise ValueError("neither choice separates the families; are they partitions of the order?")
    return [list(p) for p in rows], [list(p) for p in cols], how


def separated(order: Sequence[int], rows, cols) -> bool:
    """Every row part entirely before every column part, or the reverse."""
    pos = {v: i for i, v in enumerate(order)}
    rs = [pos[v] for p in rows for v in p]
    cs = [pos[v] for p in cols for v in p]
    if not rs or not cs:
        return True
    return max(rs) < min(cs) or max(cs) < min(rs)


# enumeration


@dataclass(frozen=True)
class FamilyCount:
    m: int
    members: int
    count_distinct: int
    all_rigid: bool
    labelled: int  # (2m+2)! * m! when the generators are distinct and rigid

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "members": self.members,
            "count_distinct": self.count_distinct,
            "all_rigid": self.all_rigid,
            "labelled": self.labelled,
        }


def generators(r: ObstructionKind | str, m: int) -> Iterable[tuple[Permutation, Tournament]]:
    r = ObstructionKind.parse(r) if isinstance(r, str) else r
    for sigma in all_permutations(m):
        t, _ = build_F(r, extend_sigma(r, sigma))
        yield sigma, t


def enumerate_family(r: ObstructionKind | str, m_max: int, cap: int = ENUMERATE_MAX_M) -> list[FamilyCount]:
    """Canonical forms and automorphism counts of the generators for ``2 <= m <= m_max``."""
    if m_max > cap:
        raise SizeLimitError("enumerate_family", m_max, cap)
    out = []
    for m in range(2, m_max + 1):
        forms = set()
        rigid = True
        count = 0
        for _, t in generators(r, m):
            count += 1
            forms.add(canonical_form(t))
            if automorphism_count(t) != 1:
                rigid = False
        ok = rigid and len(forms) == count
        labelled = factorial(2 * m + 2) * count if ok else 0
        out.append(FamilyCount(m, count, len(forms), rigid, labelled))
    return out


def contains_member(host_kind: ObstructionKind | str, pattern: OrientedGraph, max_host_m: int) -> bool:
    """Does some plain generator ``build_F(host_kind, tau)``, ``|tau| <= max_host_m``,
    contain ``pattern`` as an induced subtournament?"""
    r = ObstructionKind.parse(host_kind) if isinstance(host_kind, str) else host_kind
    for p in range(1, max_host_m + 1):
        if 2 * p < pattern.n:
            continue
        for tau in all_permutations(p):
            host, _ = build_F(r, tau)
            if find_induced_copy(host, pattern) is not None:
                return True
    return False


def non_containment_witness(
    host_kind: ObstructionKind | str, pattern_kind: ObstructionKind | str, max_m: int, max_host_m: int
) -> Permutation | None:
    """Some sigma (``|sigma| <= max_m``) whose extended ``pattern_kind`` generator
    is absent from every ``host_kind`` generator up to ``max_host_m``."""
    for m in range(2, max_m + 1):
        for sigma, t in generators(pattern_kind, m):
            if not contains_member(host_kind, t, max_host_m):
                return sigma
    return None


__all__ = [
    "ChainOrderRepresentation",
    "FamilyCount",
    "ObstructionKind",
    "RepViolation",
    "RoleMap",
    "anchor_candidates",
    "biorder_structure",
    "biorder_to_permutation",
    "build_F",
    "contains_member",
    "decode_F",
    "decode_roles",
    "disjointify_division",
    "enumerate_family",
    "extend_sigma",
    "interpret_F",
    "non_containment_witness",
    "phi_interpretation",
    "separated",
    "standard_representation",
    "verify_chain_representation",
]
