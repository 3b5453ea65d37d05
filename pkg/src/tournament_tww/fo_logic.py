"""First-order logic over binary relational structures.

Formulas are small frozen dataclasses with an s-expression surface syntax::

    (exists (x) (forall (y) (or (arc y x) (= y x))))

Evaluation is the textbook recursion over all assignments. Each quantified
subformula caches its value per assignment of its free variables, which
changes nothing semantically but keeps nested definitions (as used by the
interpretations below) polynomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Sequence

from .errors import FreeVariable, ParseError, UnknownSymbol
from .graph import OrientedGraph
from .permutation import order_type
from .structure import BinaryStructure, from_graph


class Formula:
    __slots__ = ()

    def free(self) -> frozenset[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        return to_sexp(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def free(self):
        return frozenset()


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    a: str
    b: str

    def free(self):
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Eq(Formula):
    a: str
    b: str

    def free(self):
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def free(self):
        return self.body.free()


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def free(self):
        return frozenset().union(*(p.free() for p in self.parts))


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def free(self):
        return frozenset().union(*(p.free() for p in self.parts))


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[str, ...]
    body: Formula

    def free(self):
        return self.body.free() - set(self.vars)


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple[str, ...]
    body: Formula

    def free(self):
        return self.body.free() - set(self.vars)


TRUE = Const(True)
FALSE = Const(False)


def conj(*parts: Formula) -> Formula:
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def exists(vs: str | Sequence[str], body: Formula) -> Formula:
    vs = (vs,) if isinstance(vs, str) else tuple(vs)
    return Exists(vs, body) if vs else body


def forall(vs: str | Sequence[str], body: Formula) -> Formula:
    vs = (vs,) if isinstance(vs, str) else tuple(vs)
    return Forall(vs, body) if vs else body


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Substitute free variables (bound ones are left alone)."""
    if isinstance(f, Const):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, mapping.get(f.a, f.a), mapping.get(f.b, f.b))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.a, f.a), mapping.get(f.b, f.b))
    if isinstance(f, Not):
        return Not(rename(f.body, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename(p, mapping) for p in f.parts))
    inner = {k: v for k, v in mapping.items() if k not in f.vars}
    if set(inner.values()) & set(f.vars):
        raise ValueError("substitution would capture a bound variable")
    return type(f)(f.vars, rename(f.body, inner))


# s-expressions

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str):
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        line += text.count("\n", pos, m.end())
        pos = m.end()
        tok = m.group(1) or m.group(2) or m.group(3)
        yield tok, line
    if text[pos:].strip():
        raise ParseError(f"unexpected text {text[pos:pos + 10]!r}", line)


def _read(tokens: list, i: int):
    tok, line = tokens[i]
    if tok == "(":
        out = []
        i += 1
        while True:
            if i >= len(tokens):
                raise ParseError("unbalanced parenthesis", line)
            if tokens[i][0] == ")":
                return (out, line), i + 1
            item, i = _read(tokens, i)
            out.append(item)
    if tok == ")":
        raise ParseError("unexpected ')'", line)
    return (tok, line), i + 1


def _build(node, bound: frozenset[str]) -> Formula:
    val, line = node
    if isinstance(val, str):
        if val == "true":
            return TRUE
        if val == "false":
            return FALSE
        raise ParseError(f"bare symbol {val!r}", line)
    if not val:
        raise ParseError("empty list", line)
    head, _ = val[0]
    if not isinstance(head, str):
        raise ParseError("operator expected", line)
    args = val[1:]

    def var(n):
        name, ln = n
        if not isinstance(name, str):
            raise ParseError("variable expected", ln)
        if name not in bound:
            raise FreeVariable(f"line {ln}: variable {name!r} is not bound")
        return name

    if head in ("exists", "forall"):
        if len(args) != 2 or isinstance(args[0][0], str):
            raise ParseError(f"{head} takes a variable list and a body", line)
        vs = tuple(v for v, _ in args[0][0])
        if not vs or not all(isinstance(v, str) for v in vs):
            raise ParseError("bad variable list", line)
        body = _build(args[1], bound | set(vs))
        return (Exists if head == "exists" else Forall)(vs, body)
    if head == "not":
        if len(args) != 1:
            raise ParseError("not takes one argument", line)
        return Not(_build(args[0], bound))
    if head in ("and", "or"):
        if not args:
            return TRUE if head == "and" else FALSE
        parts = tuple(_build(a, bound) for a in args)
        return (And if head == "and" else Or)(parts)
    if head == "implies":
        if len(args) != 2:
            raise ParseError("implies takes two arguments", line)
        return implies(_build(args[0], bound), _build(args[1], bound))
    if head == "=":
        if len(args) != 2:
            raise ParseError("= takes two variables", line)
        return Eq(var(args[0]), var(args[1]))
    if len(args) != 2:
        raise ParseError(f"relation {head!r} must be binary", line)
    return Atom(head, var(args[0]), var(args[1]))


def parse(text: str, free: Sequence[str] = ()) -> Formula:
    """Parse one formula; variables must be bound or listed in ``free``."""
    tokens = list(_tokens(text))
    if not tokens:
        raise ParseError("empty formula", 1)
    node, i = _read(tokens, 0)
    if i != len(tokens):
        raise ParseError("trailing input after formula", tokens[i][1])
    return _build(node, frozenset(free))


def to_sexp(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"({f.rel} {f.a} {f.b})"
    if isinstance(f, Eq):
        return f"(= {f.a} {f.b})"
    if isinstance(f, Not):
        return f"(not {to_sexp(f.body)})"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return f"({op} " + " ".join(to_sexp(p) for p in f.parts) + ")"
    op = "exists" if isinstance(f, Exists) else "forall"
    return f"({op} ({' '.join(f.vars)}) {to_sexp(f.body)})"


# evaluation

Env = dict


def _compile(f: Formula, s: BinaryStructure) -> Callable[[Env], bool]:
    if isinstance(f, Const):
        v = f.value
        return lambda env: v
    if isinstance(f, Atom):
        if f.rel not in s.names:
            raise UnknownSymbol(f"relation {f.rel!r} not in signature {list(s.names)}")
        table, a, b = s.relation(f.rel), f.a, f.b
        return lambda env: bool((table[env[a]] >> env[b]) & 1)
    if isinstance(f, Eq):
        a, b = f.a, f.b
        return lambda env: env[a] == env[b]
    if isinstance(f, Not):
        inner = _compile(f.body, s)
        return lambda env: not inner(env)
    if isinstance(f, And):
        parts = [_compile(p, s) for p in f.parts]
        return lambda env: all(p(env) for p in parts)
    if isinstance(f, Or):
        parts = [_compile(p, s) for p in f.parts]
        return lambda env: any(p(env) for p in parts)
    body = _compile(f.body, s)
    vs = f.vars
    keys = tuple(sorted(f.free()))
    domain = range(1, s.n + 1)
    want = isinstance(f, Exists)
    memo: dict[tuple, bool] = {}

    def quant(env: Env) -> bool:
        key = tuple(env[k] for k in keys)
        hit = memo.get(key)
        if hit is not None:
            return hit
        saved = [env.get(v) for v in vs]
        result = not want
        for values in product(domain, repeat=len(vs)):
            for v, x in zip(vs, values):
                env[v] = x
            if body(env) == want:
                result = want
                break
        for v, old in zip(vs, saved):
            if old is None:
                env.pop(v, None)
            else:
                env[v] = old
        memo[key] = result
        return result

    return quant


def evaluate(s: BinaryStructure, f: Formula, env: Mapping[str, int] | None = None) -> bool:
    env = dict(env or {})
    missing = f.free() - set(env)
    if missing:
        raise FreeVariable(f"unassigned free variables {sorted(missing)}")
    return _compile(f, s)(env)


def model_check(s: BinaryStructure | OrientedGraph, f: Formula) -> bool:
    """``s |= f`` for a sentence ``f``."""
    if isinstance(s, OrientedGraph):
        s = from_graph(s)
    if f.free():
        raise FreeVariable(f"not a sentence; free variables {sorted(f.free())}")
    return _compile(f, s)({})


# the problem formulas


def ds_formula(k: int, reflexive: bool = True) -> Formula:
    """Some ``k`` vertices such that every vertex points to one of them
    (or is one of them, with ``reflexive``)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    xs = [f"x{i}" for i in range(1, k + 1)]
    cover = []
    for x in xs:
        cover.append(Atom("arc", "y", x))
        if reflexive:
            cover.append(Eq("y", x))
    return exists(xs, forall("y", disj(*cover)))


def fvs_formula(k: int) -> Formula:
    """Some ``k`` vertices meeting every directed triangle."""
    if k < 0:
        raise ValueError("k must be non-negative")
    xs = [f"x{i}" for i in range(1, k + 1)]
    hit = [Eq(v, x) for v in ("u", "v", "w") for x in xs]
    triangle = conj(Atom("arc", "u", "v"), Atom("arc", "v", "w"), Atom("arc", "w", "u"))
    return exists(xs, forall(("u", "v", "w"), disj(*hit, Not(triangle))))


# interpretations


@dataclass(frozen=True)
class Interpretation:
    """``domain`` has free variable ``x``; each relation formula has free ``x, y``."""

    domain: Formula
    relations: tuple[tuple[str, Formula], ...]

    def __post_init__(self):
        if not self.domain.free() <= {"x"}:
            raise FreeVariable("domain formula may only use x free")
        for name, f in self.relations:
            if not f.free() <= {"x", "y"}:
                raise FreeVariable(f"formula for {name} may only use x, y free")


def apply_interpretation_with_map(phi: Interpretation, s: BinaryStructure) -> tuple[BinaryStructure, list[int]]:
    """Output structure and the kept input vertices (new vertex ``i`` is ``kept[i - 1]``)."""
    dom = _compile(phi.domain, s)
    kept = [v for v in range(1, s.n + 1) if dom({"x": v})]
    index = {v: i for i, v in enumerate(kept, 1)}
    names, rels = [], []
    for name, f in phi.relations:
        fn = _compile(f, s)
        table = [0] * (len(kept) + 1)
        for u in kept:
            m = 0
            for v in kept:
                if fn({"x": u, "y": v}):
                    m |= 1 << index[v]
            table[index[u]] = m
        names.append(name)
        rels.append(tuple(table))
    return BinaryStructure(len(kept), tuple(names), tuple(rels)), kept


def apply_interpretation(phi: Interpretation, s: BinaryStructure) -> BinaryStructure:
    return apply_interpretation_with_map(phi, s)[0]


def identity_interpretation(names: Sequence[str]) -> Interpretation:
    return Interpretation(TRUE, tuple((n, Atom(n, "x", "y")) for n in names))


def square_interpretation(rel: str = "E") -> Interpretation:
    """Pairs at distance one or two (distinct endpoints, so no loops)."""
    near = disj(Atom(rel, "x", "y"), exists("z", conj(Atom(rel, "x", "z"), Atom(rel, "z", "y"))))
    return Interpretation(TRUE, ((rel, conj(Not(Eq("x", "y")), near)),))


# order dependence

OUTCOMES = ("order1", "reverse-order1", "order2", "reverse-order2")


@dataclass(frozen=True)
class OrderDependenceWitness:
    eta: dict
    outcome: str


def classify_biordered_tournament(
    t: OrientedGraph, o1: Sequence[int], o2: Sequence[int]
) -> OrderDependenceWitness | None:
    """If arc direction is a function of the two order types, return that
    function and which order (or reverse) it coincides with; else None."""
    n = t.n
    p1 = {v: i for i, v in enumerate(o1)}
    p2 = {v: i for i, v in enumerate(o2)}
    eta: dict[tuple[int, int], int] = {}
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u == v:
                continue
            key = (order_type(p1[u], p1[v]), order_type(p2[u], p2[v]))
            if eta.setdefault(key, int(t.has_arc(u, v))) != int(t.has_arc(u, v)):
                return None
    if n >= 2 and not t.is_tournament():
        return None
    rules = {
        "order1": lambda a, b: int(a == 1),
        "reverse-order1": lambda a, b: int(a == -1),
        "order2": lambda a, b: int(b == 1),
        "reverse-order2": lambda a, b: int(b == -1),
    }
    for name in OUTCOMES:
        if all(rules[name](*key) == val for key, val in eta.items()):
            return OrderDependenceWitness(eta, name)
    return None


# brute-force oracles for the problem formulas


def min_dominating_set(g: OrientedGraph, reflexive: bool = True) -> int:
    """Smallest D with every vertex pointing into D (or in D when reflexive)."""
    from itertools import combinations

    n = g.n
    full = (1 << (n + 1)) - 2
    for size in range(1, n + 1):
        for d in combinations(range(1, n + 1), size):
            covered = 0
            for x in d:
                covered |= g.inn[x]
                if reflexive:
                    covered |= 1 << x
            if covered == full:
                return size
    return n + 1  # only for irreflexive domination with a sink-free failure


def min_triangle_hitting_set(g: OrientedGraph) -> int:
    from itertools import combinations

    n = g.n
    tris = [
        (u, v, w)
        for u in range(1, n + 1)
        for v in range(1, n + 1)
        for w in range(1, n + 1)
        if g.has_arc(u, v) and g.has_arc(v, w) and g.has_arc(w, u)
    ]
    if not tris:
        return 0
    for size in range(1, n + 1):
        for d in combinations(range(1, n + 1), size):
            ds = set(d)
            if all(ds & set(t) for t in tris):
                return size
    return n
