"""Finite many-sorted algebras as explicit operation tables.

Carrier elements of sort s are the integers 0..size-1.  Tables are total
maps from argument tuples to results and are checked at construction.
Empty carriers are legal; identity satisfaction over them is vacuous.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .signature import ActionSplit, Signature
from .terms import GeneratorProfile, Identity, SortedVar, Term, free_vars


class AlgebraError(Exception):
    pass


class SortViolation(AlgebraError):
    pass


class MissingSort(AlgebraError):
    pass


class EmptyCarrier(AlgebraError):
    pass


class NotACongruence(AlgebraError):
    def __init__(self, op_name: str, tuples):
        super().__init__(f"partition is not compatible with '{op_name}' at {tuples}")
        self.op_name = op_name
        self.tuples = tuples


class FiniteAlgebra:
    def __init__(self, sig: Signature, sizes: tuple[int, ...], tables: dict[int, dict[tuple, int]]):
        self.sig = sig
        self.sizes = tuple(sizes)
        self.tables = tables
        self._validate()

    def _validate(self):
        if len(self.sizes) != len(self.sig.sorts):
            raise AlgebraError("one carrier size per sort required")
        if any(n < 0 for n in self.sizes):
            raise AlgebraError("negative carrier size")
        for op in self.sig.ops:
            table = self.tables.get(op.id)
            if table is None:
                raise AlgebraError(f"missing table for operation '{op.name}'")
            domain = 1
            for s in op.arg_sorts:
                domain *= self.sizes[s]
            if len(table) != domain:
                raise AlgebraError(
                    f"table for '{op.name}' has {len(table)} entries, expected {domain}"
                )
            limit = self.sizes[op.result_sort]
            for args, res in table.items():
                if len(args) != op.arity or any(
                    not (0 <= a < self.sizes[s]) for a, s in zip(args, op.arg_sorts)
                ):
                    raise AlgebraError(f"table for '{op.name}' has a bad key {args}")
                if not (0 <= res < limit):
                    raise AlgebraError(f"table for '{op.name}' maps {args} outside the carrier")

    @classmethod
    def make(cls, sig: Signature, sizes: dict[str, int], tables: dict[str, object]) -> "FiniteAlgebra":
        """Build from names; each table is a dict, a nested list, or a callable."""
        size_vec = [0] * len(sig.sorts)
        for name, n in sizes.items():
            size_vec[sig.sort_named(name).id] = n
        out: dict[int, dict[tuple, int]] = {}
        for op in sig.ops:
            spec = tables.get(op.name)
            if spec is None:
                raise AlgebraError(f"missing table for operation '{op.name}'")
            table: dict[tuple, int] = {}
            pools = [range(size_vec[s]) for s in op.arg_sorts]
            for args in itertools.product(*pools):
                if callable(spec):
                    table[args] = spec(*args)
                elif isinstance(spec, dict):
                    table[args] = spec[args]
                else:
                    cell = spec
                    for a in args:
                        cell = cell[a]
                    table[args] = cell
            out[op.id] = table
        return cls(sig, tuple(size_vec), out)

    def total_size(self) -> int:
        return sum(self.sizes)

    def elements(self, sort: int) -> range:
        return range(self.sizes[sort])

    def apply(self, op_id: int, args: tuple) -> int:
        return self.tables[op_id][args]

    def to_json_dict(self, reps: dict[str, list[str]] | None = None) -> dict:
        tables = {}
        for op in self.sig.ops:
            tables[op.name] = [
                {"args": list(k), "result": v} for k, v in sorted(self.tables[op.id].items())
            ]
        out = {
            "carriers": {s.name: self.sizes[s.id] for s in self.sig.sorts},
            "tables": tables,
        }
        if reps is not None:
            out["representatives"] = reps
        return out

    @classmethod
    def from_json_dict(cls, sig: Signature, data: dict) -> "FiniteAlgebra":
        sizes = [0] * len(sig.sorts)
        for name, n in data.get("carriers", {}).items():
            sizes[sig.sort_named(name).id] = int(n)
        tables: dict[int, dict[tuple, int]] = {}
        for op in sig.ops:
            entries = data.get("tables", {}).get(op.name)
            if entries is None:
                raise AlgebraError(f"missing table for operation '{op.name}'")
            tables[op.id] = {tuple(e["args"]): int(e["result"]) for e in entries}
        return cls(sig, tuple(sizes), tables)

    def __repr__(self) -> str:
        return f"FiniteAlgebra({'+'.join(map(str, self.sizes))})"


def one_element_algebra(sig: Signature) -> FiniteAlgebra:
    """The algebra with a single element per sort; satisfies every identity."""
    tables = {}
    for op in sig.ops:
        keys = itertools.product(*[range(1)] * op.arity)
        tables[op.id] = {tuple(k): 0 for k in keys}
    return FiniteAlgebra(sig, tuple(1 for _ in sig.sorts), tables)


def eval_term(alg: FiniteAlgebra, t: Term, asg: dict[SortedVar, int]) -> int:
    if t.is_var():
        if t.var not in asg:
            if alg.sizes[t.var.sort] == 0:
                raise EmptyCarrier(f"sort '{alg.sig.sorts[t.var.sort].name}' has no elements")
            raise AlgebraError(f"variable '{t.var.name}' has no assigned value")
        return asg[t.var]
    args = tuple(eval_term(alg, c, asg) for c in t.children)
    return alg.tables[t.op.id][args]


class Evaluator:
    """Homomorphic extension of a generator assignment into a finite algebra.

    Agrees with the assignment on variables and commutes with every
    operation; memoized over the hash-consed term nodes.
    """

    def __init__(self, vars: GeneratorProfile, images: dict[SortedVar, int], target: FiniteAlgebra):
        self.target = target
        self.images = dict(images)
        for v in vars.variables():
            if target.sizes[v.sort] == 0:
                raise MissingSort(
                    f"target has an empty carrier for sort '{target.sig.sorts[v.sort].name}'"
                )
            if v not in self.images:
                raise SortViolation(f"no image for generator '{v.name}'")
            img = self.images[v]
            if not (0 <= img < target.sizes[v.sort]):
                raise SortViolation(
                    f"image of '{v.name}' is not an element of sort "
                    f"'{target.sig.sorts[v.sort].name}'"
                )
        self._memo: dict[Term, int] = {}

    def __call__(self, t: Term) -> int:
        memo = self._memo
        got = memo.get(t)
        if got is not None:
            return got
        if t.is_var():
            val = self.images[t.var]
        else:
            val = self.target.tables[t.op.id][tuple(self(c) for c in t.children)]
        memo[t] = val
        return val


@dataclass(frozen=True)
class Counterexample:
    identity: Identity
    assignment: dict
    lhs_value: int
    rhs_value: int

    def describe(self) -> str:
        asg = ", ".join(f"{v.name}={e}" for v, e in self.assignment.items())
        return f"{self.identity!r} fails at [{asg}]: {self.lhs_value} != {self.rhs_value}"


def all_assignments(alg: FiniteAlgebra, vars: GeneratorProfile):
    """Sort-respecting assignments in lexicographic order over the profile."""
    vs = vars.variables()
    pools = [range(alg.sizes[v.sort]) for v in vs]
    for combo in itertools.product(*pools):
        yield dict(zip(vs, combo))


def satisfies_identity(alg: FiniteAlgebra, ident: Identity):
    """True, or the lexicographically first failing assignment.

    Vacuously true when a declared variable's sort has an empty carrier.
    """
    for asg in all_assignments(alg, ident.vars):
        l = eval_term(alg, ident.lhs, asg)
        r = eval_term(alg, ident.rhs, asg)
        if l != r:
            return Counterexample(ident, asg, l, r)
    return True


def satisfies_all(alg: FiniteAlgebra, axioms):
    """Conjunction over axioms in order; accepts a VarietyDef or an iterable."""
    axioms = getattr(axioms, "axioms", axioms)
    for ident in axioms:
        verdict = satisfies_identity(alg, ident)
        if verdict is not True:
            return verdict
    return True


class MorphismTable:
    """Per-sort element maps; sort-preserving by construction."""

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra, maps: tuple[tuple[int, ...], ...]):
        self.source = source
        self.target = target
        self.maps = tuple(tuple(m) for m in maps)
        for s in source.sig.sorts:
            if len(self.maps[s.id]) != source.sizes[s.id]:
                raise AlgebraError(f"map for sort '{s.name}' has the wrong length")
            if any(not (0 <= v < target.sizes[s.id]) for v in self.maps[s.id]):
                raise SortViolation(f"map for sort '{s.name}' leaves the target carrier")

    @classmethod
    def identity(cls, alg: FiniteAlgebra) -> "MorphismTable":
        return cls(alg, alg, tuple(tuple(range(n)) for n in alg.sizes))

    def __call__(self, sort: int, elem: int) -> int:
        return self.maps[sort][elem]

    def commutes(self):
        """None if hom on every table entry, else (op, args) of a violation."""
        for op in self.source.sig.ops:
            for args, res in self.source.tables[op.id].items():
                mapped = tuple(self.maps[s][a] for a, s in zip(args, op.arg_sorts))
                if self.target.tables[op.id][mapped] != self.maps[op.result_sort][res]:
                    return (op, args)
        return None

    def is_homomorphism(self) -> bool:
        return self.commutes() is None

    def is_bijective(self) -> bool:
        return all(
            len(set(m)) == len(m) == self.target.sizes[i] for i, m in enumerate(self.maps)
        )

    def is_surjective(self) -> bool:
        return all(
            set(m) == set(range(self.target.sizes[i])) for i, m in enumerate(self.maps)
        )

    def after(self, inner: "MorphismTable") -> "MorphismTable":
        """Composition self . inner (apply inner first)."""
        if inner.target is not self.source:
            raise AlgebraError("morphisms are not composable")
        maps = tuple(
            tuple(self.maps[s][v] for v in inner.maps[s]) for s in range(len(inner.maps))
        )
        return MorphismTable(inner.source, self.target, maps)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MorphismTable)
            and self.source is other.source
            and self.target is other.target
            and self.maps == other.maps
        )

    def __hash__(self):
        return hash(self.maps)

    def to_json_dict(self) -> dict:
        return {
            s.name: list(self.maps[s.id]) for s in self.source.sig.sorts
        }

    def __repr__(self) -> str:
        return f"MorphismTable({self.maps})"


class CongruenceTable:
    """Per-sort partition of a finite algebra's carriers.

    blocks[s][e] is the block index of element e of sort s; block indices
    are dense 0..nblocks-1 per sort.
    """

    def __init__(self, alg: FiniteAlgebra, blocks: tuple[tuple[int, ...], ...]):
        self.alg = alg
        self.blocks = tuple(tuple(b) for b in blocks)
        self.nblocks = []
        for s in alg.sig.sorts:
            col = self.blocks[s.id]
            if len(col) != alg.sizes[s.id]:
                raise AlgebraError(f"partition for sort '{s.name}' has the wrong length")
            k = len(set(col))
            if col and (min(col) != 0 or max(col) != k - 1):
                raise AlgebraError(f"block indices for sort '{s.name}' are not dense")
            self.nblocks.append(k)

    @classmethod
    def identity(cls, alg: FiniteAlgebra) -> "CongruenceTable":
        return cls(alg, tuple(tuple(range(n)) for n in alg.sizes))

    @classmethod
    def full(cls, alg: FiniteAlgebra) -> "CongruenceTable":
        return cls(alg, tuple(tuple(0 for _ in range(n)) for n in alg.sizes))

    @classmethod
    def kernel(cls, phi: MorphismTable) -> "CongruenceTable":
        blocks = []
        for s, m in enumerate(phi.maps):
            relabel: dict[int, int] = {}
            col = []
            for v in m:
                if v not in relabel:
                    relabel[v] = len(relabel)
                col.append(relabel[v])
            blocks.append(tuple(col))
        return cls(phi.source, tuple(blocks))

    def related(self, sort: int, a: int, b: int) -> bool:
        return self.blocks[sort][a] == self.blocks[sort][b]

    def violation(self):
        """None if compatible with every op, else (op, arg tuple pair)."""
        for op in self.alg.sig.ops:
            seen: dict[tuple, tuple] = {}
            for args, res in self.alg.tables[op.id].items():
                key = tuple(self.blocks[s][a] for a, s in zip(args, op.arg_sorts))
                prev = seen.get(key)
                if prev is None:
                    seen[key] = (args, res)
                elif self.blocks[op.result_sort][prev[1]] != self.blocks[op.result_sort][res]:
                    return (op, (prev[0], args))
        return None


def quotient(alg: FiniteAlgebra, cong: CongruenceTable):
    """Quotient algebra plus the natural projection onto it."""
    if cong.alg is not alg:
        raise AlgebraError("congruence belongs to a different algebra")
    bad = cong.violation()
    if bad is not None:
        raise NotACongruence(bad[0].name, bad[1])
    sizes = tuple(cong.nblocks)
    tables: dict[int, dict[tuple, int]] = {}
    for op in alg.sig.ops:
        table: dict[tuple, int] = {}
        for args, res in alg.tables[op.id].items():
            key = tuple(cong.blocks[s][a] for a, s in zip(args, op.arg_sorts))
            table[key] = cong.blocks[op.result_sort][res]
        tables[op.id] = table
    q = FiniteAlgebra(alg.sig, sizes, tables)
    proj = MorphismTable(alg, q, cong.blocks)
    return q, proj


def _colors(alg: FiniteAlgebra, rounds: int = 2):
    """Cheap per-element invariants: iterated op-neighborhood refinement."""
    colors = [tuple(s for _ in range(alg.sizes[s])) for s in range(len(alg.sizes))]
    colors = [list(c) for c in colors]
    for _ in range(rounds):
        sigs: list[list] = [[(colors[s][e],) for e in range(alg.sizes[s])] for s in range(len(alg.sizes))]
        for op in alg.sig.ops:
            buckets: list[dict[int, list]] = [dict() for _ in range(op.arity)]
            for args, res in alg.tables[op.id].items():
                for pos, a in enumerate(args):
                    others = tuple(
                        colors[op.arg_sorts[j]][v] for j, v in enumerate(args) if j != pos
                    )
                    buckets[pos].setdefault(a, []).append((others, colors[op.result_sort][res]))
            for pos in range(op.arity):
                s = op.arg_sorts[pos]
                for e in range(alg.sizes[s]):
                    entry = tuple(sorted(buckets[pos].get(e, [])))
                    sigs[s][e] = sigs[s][e] + ((op.id, pos, entry),)
        for s in range(len(alg.sizes)):
            relabel: dict = {}
            for e in range(alg.sizes[s]):
                key = sigs[s][e]
                if key not in relabel:
                    relabel[key] = len(relabel)
                colors[s][e] = (s, relabel[key])
    return colors


def find_isomorphism(a: FiniteAlgebra, b: FiniteAlgebra):
    """First sort-respecting bijective homomorphism under canonical order.

    Pruning: per-sort carrier sizes, then per-element invariant colors,
    then backtracking with on-the-fly table checks.
    """
    if a.sig is not b.sig and not a.sig.same_shape(b.sig):
        raise AlgebraError("isomorphism search needs a shared signature")
    if a.sizes != b.sizes:
        return None
    ca = _colors(a)
    cb = _colors(b)
    for s in range(len(a.sizes)):
        if sorted(ca[s]) != sorted(cb[s]):
            return None

    order = [(s, e) for s in range(len(a.sizes)) for e in range(a.sizes[s])]
    maps: list[list[int]] = [[-1] * n for n in a.sizes]
    used: list[set[int]] = [set() for _ in a.sizes]

    ops_by_sort: dict[int, list] = {s: [] for s in range(len(a.sizes))}
    for op in a.sig.ops:
        for s in set(op.arg_sorts) | {op.result_sort}:
            ops_by_sort[s].append(op)

    def consistent(s: int, e: int) -> bool:
        # Check every table entry that mentions e once all its participants
        # are mapped; each entry is fully checked when its last participant
        # gets placed.
        for op in ops_by_sort[s]:
            for args, res in a.tables[op.id].items():
                touches = (op.result_sort == s and res == e) or any(
                    t == s and x == e for x, t in zip(args, op.arg_sorts)
                )
                if not touches:
                    continue
                mapped = []
                ok = True
                for x, t in zip(args, op.arg_sorts):
                    v = maps[t][x]
                    if v < 0:
                        ok = False
                        break
                    mapped.append(v)
                mr = maps[op.result_sort][res]
                if not ok or mr < 0:
                    continue
                if b.tables[op.id][tuple(mapped)] != mr:
                    return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(order):
            return True
        s, e = order[i]
        for cand in range(b.sizes[s]):
            if cand in used[s] or cb[s][cand] != ca[s][e]:
                continue
            maps[s][e] = cand
            used[s].add(cand)
            if consistent(s, e) and backtrack(i + 1):
                return True
            maps[s][e] = -1
            used[s].remove(cand)
        return False

    if not backtrack(0):
        return None
    table = MorphismTable(a, b, tuple(tuple(m) for m in maps))
    assert table.is_homomorphism() and table.is_bijective()
    return table


def assemble_trivial_action(
    full_sig: Signature,
    split: ActionSplit,
    h1: FiniteAlgebra,
    h2: FiniteAlgebra,
    s_var: SortedVar,
    s_term: Term,
) -> FiniteAlgebra:
    """Combine one-sorted algebras for the two parts with the action
    h1 o h2 = s(h2); the result is an algebra of the full signature."""
    if s_term.sort != 0 or any(v != s_var for v in free_vars(s_term)):
        raise SortViolation("the action term must be a second-part term in the single declared variable")
    sizes = [0, 0]
    sizes[split.sort1] = h1.sizes[0]
    sizes[split.sort2] = h2.sizes[0]
    tables: dict[int, dict[tuple, int]] = {}
    for ops, side in ((split.ops1, h1), (split.ops2, h2)):
        for op in ops:
            sub_op = side.sig.op_named(op.name)
            tables[op.id] = dict(side.tables[sub_op.id])
    act_table: dict[tuple, int] = {}
    for j in range(h2.sizes[0]):
        val = eval_term(h2, s_term, {s_var: j})
        for i in range(h1.sizes[0]):
            act_table[(i, j)] = val
    tables[split.action.id] = act_table
    return FiniteAlgebra(full_sig, tuple(sizes), tables)
