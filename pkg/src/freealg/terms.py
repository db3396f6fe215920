"""Well-sorted terms over a signature: hash-consed construction, parsing,
the height-style length function, substitution, and generator profiles.

Terms are interned per signature: two structurally equal terms are the
same object, so identity comparison and dict keys are cheap everywhere
downstream.  The intern table is guarded by a lock; node ids are stable
once issued.
"""

from __future__ import annotations

import itertools
import threading
import weakref
from dataclasses import dataclass

from . import sexpr
from .sexpr import Atom, SList
from .signature import ActionSplit, Op, Signature, SignatureError


class TermError(Exception):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        loc = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{loc}{msg}")
        self.msg = msg


class SortError(TermError):
    pass


class UnboundVariable(TermError):
    pass


@dataclass(frozen=True)
class SortedVar:
    name: str
    sort: int


class Term:
    """Either a variable or an operation applied to child terms.

    Sort and length are fixed at construction: variables and constants have
    length 0, an application has length 1 + max over child lengths.
    """

    __slots__ = ("uid", "op", "var", "children", "sort", "length", "_key", "__weakref__")

    def __init__(self, uid, op, var, children, sort, length):
        self.uid = uid
        self.op = op
        self.var = var
        self.children = children
        self.sort = sort
        self.length = length
        self._key = None

    def is_var(self) -> bool:
        return self.var is not None

    def __repr__(self) -> str:
        return term_to_text(self)

    def __hash__(self) -> int:
        return self.uid

    def __eq__(self, other) -> bool:
        return self is other


class TermArena:
    """Per-signature intern table for terms."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self._lock = threading.Lock()
        self._vars: dict[tuple[str, int], Term] = {}
        self._apps: dict[tuple, Term] = {}
        self._next = 0

    def _fresh(self, op, var, children, sort, length) -> Term:
        t = Term(self._next, op, var, children, sort, length)
        self._next += 1
        return t

    def var(self, v: SortedVar) -> Term:
        key = (v.name, v.sort)
        with self._lock:
            t = self._vars.get(key)
            if t is None:
                t = self._fresh(None, v, (), v.sort, 0)
                self._vars[key] = t
            return t

    def apply(self, op: Op, children: tuple[Term, ...]) -> Term:
        if len(children) != op.arity:
            raise SortError(f"operation '{op.name}' expects {op.arity} arguments, got {len(children)}")
        for i, (c, want) in enumerate(zip(children, op.arg_sorts)):
            if c.sort != want:
                raise SortError(
                    f"argument {i + 1} of '{op.name}' has sort "
                    f"'{self.sig.sorts[c.sort].name}', expected '{self.sig.sorts[want].name}'"
                )
        key = (op.id,) + tuple(c.uid for c in children)
        with self._lock:
            t = self._apps.get(key)
            if t is None:
                length = 0 if op.arity == 0 else 1 + max(c.length for c in children)
                t = self._fresh(op, None, children, op.result_sort, length)
                self._apps[key] = t
            return t


_ARENAS: "weakref.WeakKeyDictionary[Signature, TermArena]" = weakref.WeakKeyDictionary()
_ARENA_LOCK = threading.Lock()


def arena_of(sig: Signature) -> TermArena:
    with _ARENA_LOCK:
        a = _ARENAS.get(sig)
        if a is None:
            a = TermArena(sig)
            _ARENAS[sig] = a
        return a


class GeneratorProfile:
    """Per-sort ordered lists of sorted variables; names unique overall."""

    def __init__(self, sig: Signature, by_sort: dict[int, tuple[SortedVar, ...]]):
        self.sig = sig
        self.by_sort = {s.id: tuple(by_sort.get(s.id, ())) for s in sig.sorts}
        seen: set[str] = set()
        for s in sig.sorts:
            for v in self.by_sort[s.id]:
                if v.sort != s.id:
                    raise TermError(f"variable '{v.name}' listed under the wrong sort")
                if v.name in seen:
                    raise TermError(f"duplicate variable name '{v.name}'")
                seen.add(v.name)
        self._by_name = {v.name: v for vs in self.by_sort.values() for v in vs}

    @classmethod
    def from_counts(cls, sig: Signature, counts: dict[str, int] | None = None, **kw) -> "GeneratorProfile":
        counts = dict(counts or {})
        counts.update(kw)
        by_sort: dict[int, tuple[SortedVar, ...]] = {}
        one_sorted = len(sig.sorts) == 1
        for name, n in counts.items():
            s = sig.sort_named(name)
            if n < 0:
                raise TermError(f"negative generator count for sort '{name}'")
            prefix = "x" if one_sorted else name
            by_sort[s.id] = tuple(SortedVar(f"{prefix}{k + 1}", s.id) for k in range(n))
        return cls(sig, by_sort)

    @classmethod
    def of_vars(cls, sig: Signature, vs) -> "GeneratorProfile":
        by_sort: dict[int, list[SortedVar]] = {}
        for v in vs:
            by_sort.setdefault(v.sort, []).append(v)
        return cls(sig, {k: tuple(v) for k, v in by_sort.items()})

    def variables(self) -> tuple[SortedVar, ...]:
        return tuple(v for s in self.sig.sorts for v in self.by_sort[s.id])

    def lookup(self, name: str) -> SortedVar | None:
        return self._by_name.get(name)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.by_sort[s.id]) for s in self.sig.sorts)

    def count_of(self, sort: int) -> int:
        return len(self.by_sort[sort])

    def describe(self) -> str:
        return ",".join(
            f"{s.name}={len(self.by_sort[s.id])}" for s in self.sig.sorts
        )

    def __repr__(self) -> str:
        return f"GeneratorProfile({self.describe()})"


def term_profile_iso(x: GeneratorProfile, y: GeneratorProfile, sig: Signature) -> bool:
    """Whether the term algebras on the two profiles are isomorphic.

    For a shared signature this holds exactly when the per-sort generator
    counts agree.
    """
    if x.sig is not sig or y.sig is not sig:
        raise TermError("profiles must be over the given signature")
    return x.counts() == y.counts()


@dataclass(frozen=True)
class Identity:
    """A pair of same-sort terms together with their declared variables."""

    vars: GeneratorProfile
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.lhs.sort != self.rhs.sort:
            raise SortError("identity sides have different sorts")
        declared = set(self.vars.variables())
        for side in (self.lhs, self.rhs):
            for v in free_vars(side):
                if v not in declared:
                    raise UnboundVariable(f"variable '{v.name}' not declared in the identity")

    def __repr__(self) -> str:
        return f"(= {term_to_text(self.lhs)} {term_to_text(self.rhs)})"


def free_vars(t: Term):
    seen: list[SortedVar] = []
    found: set[SortedVar] = set()

    def walk(u: Term):
        if u.is_var():
            if u.var not in found:
                found.add(u.var)
                seen.append(u.var)
        else:
            for c in u.children:
                walk(c)

    walk(t)
    return tuple(seen)


def term_length(t: Term) -> int:
    return t.length


def term_key(t: Term):
    """Canonical ordering key: (length, kind, symbol, children)."""
    if t._key is None:
        if t.is_var():
            t._key = (0, 0, t.var.sort, t.var.name)
        else:
            t._key = (t.length, 1, t.op.id, tuple(term_key(c) for c in t.children))
    return t._key


def term_to_text(t: Term) -> str:
    if t.is_var():
        return t.var.name
    if not t.children:
        return f"({t.op.name})"
    return "(" + t.op.name + " " + " ".join(term_to_text(c) for c in t.children) + ")"


def parse_term(text_or_form, sig: Signature, vars: GeneratorProfile) -> Term:
    """Parse ``var-name | (op-name term*)`` into a well-sorted term."""
    form = sexpr.parse_one(text_or_form) if isinstance(text_or_form, str) else text_or_form
    arena = arena_of(sig)

    def build(f) -> Term:
        if isinstance(f, Atom):
            v = vars.lookup(f.text)
            if v is None:
                raise UnboundVariable(f"unbound variable '{f.text}'", f.line, f.col)
            return arena.var(v)
        assert isinstance(f, SList)
        if len(f) == 0 or not isinstance(f[0], Atom):
            raise TermError("expected (op-name term*)", f.line, f.col)
        name = f[0].text
        try:
            op = sig.op_named(name)
        except SignatureError:
            raise TermError(f"unknown operation '{name}'", f[0].line, f[0].col) from None
        children = tuple(build(c) for c in f.items[1:])
        try:
            return arena.apply(op, children)
        except SortError as e:
            raise SortError(e.msg, f.line, f.col) from None

    return build(form)


def substitute(t: Term, mapping: dict[SortedVar, Term], arena: TermArena) -> Term:
    """Homomorphic extension of a variable assignment into a term algebra."""
    if t.is_var():
        try:
            return mapping[t.var]
        except KeyError:
            raise UnboundVariable(f"no image for variable '{t.var.name}'") from None
    if not t.children:
        return arena.apply(t.op, ())
    return arena.apply(t.op, tuple(substitute(c, mapping, arena) for c in t.children))


def extend_assignment(vars: GeneratorProfile, images: dict, target):
    """Unique homomorphic extension of a sort-respecting generator map.

    ``target`` is a finite algebra; the returned callable evaluates any term
    over ``vars``.  Raises SortViolation/MissingSort from the finalg module
    when an image lies outside its carrier.
    """
    from .finalg import Evaluator

    return Evaluator(vars, images, target)


def is_sort1_pure(t: Term, split: ActionSplit) -> bool:
    """Whether a term uses only first-class ops and first-sort variables.

    In an action-separated signature this coincides with the term having
    the first sort.
    """
    ops1 = {o.id for o in split.ops1}

    def walk(u: Term) -> bool:
        if u.is_var():
            return u.var.sort == split.sort1
        if u.op.id not in ops1:
            return False
        return all(walk(c) for c in u.children)

    return walk(t)


def enumerate_terms(sig: Signature, vars: GeneratorProfile, max_length: int, cap: int | None = None):
    """All well-sorted terms of length <= max_length, grouped level by level."""
    arena = arena_of(sig)
    terms: list[Term] = [arena.var(v) for v in vars.variables()]
    terms += [arena.apply(o, ()) for o in sig.constants()]
    seen = set(terms)
    frontier_max = 0
    while frontier_max < max_length:
        by_sort: dict[int, list[Term]] = {}
        for t in terms:
            by_sort.setdefault(t.sort, []).append(t)
        new: list[Term] = []
        for op in sig.ops:
            if op.arity == 0:
                continue
            pools = [by_sort.get(s, []) for s in op.arg_sorts]
            for tup in itertools.product(*pools):
                if max(c.length for c in tup) != frontier_max:
                    continue
                t = arena.apply(op, tup)
                if t not in seen:
                    seen.add(t)
                    new.append(t)
                    if cap is not None and len(terms) + len(new) > cap:
                        return terms + new
        if not new:
            break
        terms += new
        frontier_max += 1
    return terms


def alpha_key(ident: Identity):
    """Structure of an identity with variables numbered by first occurrence.

    Two identities get the same key exactly when one is a variable renaming
    of the other (ignoring declared-but-unused variables).
    """
    numbering: dict[SortedVar, int] = {}

    def walk(t: Term):
        if t.is_var():
            if t.var not in numbering:
                numbering[t.var] = len(numbering)
            return ("v", t.var.sort, numbering[t.var])
        return ("o", t.op.name, tuple(walk(c) for c in t.children))

    return (walk(ident.lhs), walk(ident.rhs))


def transport_identity(ident: Identity, target: Signature) -> Identity:
    """Rebuild an identity in another signature, matching sorts/ops by name."""
    src = ident.vars.sig
    arena = arena_of(target)
    var_map = {
        v: SortedVar(v.name, target.sort_named(src.sorts[v.sort].name).id)
        for v in ident.vars.variables()
    }

    def walk(t: Term) -> Term:
        if t.is_var():
            return arena.var(var_map[t.var])
        op = target.op_named(t.op.name)
        return arena.apply(op, tuple(walk(c) for c in t.children))

    profile = GeneratorProfile.of_vars(target, [var_map[v] for v in ident.vars.variables()])
    return Identity(profile, walk(ident.lhs), walk(ident.rhs))
