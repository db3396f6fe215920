import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from freealg.corpus import load_entry_variety
from freealg.finalg import FiniteAlgebra
from freealg.signature import Signature
from freealg.terms import GeneratorProfile, Identity, SortedVar, parse_term


def make_variety(sorts, ops, name, axiom_specs):
    """axiom_specs: [ ([(var, sort), ...], lhs_text, rhs_text), ... ]"""
    from freealg.egraph import VarietyDef

    sig = Signature.make(sorts, ops)
    return VarietyDef(sig, name, tuple(make_axioms(sig, axiom_specs)))


def make_axioms(sig, axiom_specs):
    out = []
    for vars_spec, l, r in axiom_specs:
        prof = GeneratorProfile.of_vars(
            sig, [SortedVar(n, sig.sort_named(s).id) for n, s in vars_spec]
        )
        out.append(Identity(prof, parse_term(l, sig, prof), parse_term(r, sig, prof)))
    return out


GROUP_AXIOMS = [
    ([("x", "elem"), ("y", "elem"), ("z", "elem")], "(mul (mul x y) z)", "(mul x (mul y z))"),
    ([("x", "elem")], "(mul (e) x)", "x"),
    ([("x", "elem")], "(mul x (e))", "x"),
    ([("x", "elem")], "(mul x (inv x))", "(e)"),
    ([("x", "elem")], "(mul (inv x) x)", "(e)"),
]

GROUP_OPS = [("mul", ["elem", "elem"], "elem"), ("inv", ["elem"], "elem"), ("e", [], "elem")]


@pytest.fixture(scope="session")
def boolean_groups():
    return load_entry_variety("boolean-groups")


@pytest.fixture(scope="session")
def comm_idem():
    return load_entry_variety("comm-idem-semigroups")


@pytest.fixture(scope="session")
def left_zero():
    return load_entry_variety("left-zero")


@pytest.fixture(scope="session")
def sets_variety():
    return load_entry_variety("sets")


@pytest.fixture(scope="session")
def graphs_variety():
    return load_entry_variety("graphs")


@pytest.fixture(scope="session")
def action_sig():
    return Signature.make(
        ["s", "el"],
        [("mul", ["s", "s"], "s"), ("act", ["s", "el"], "el")],
    )


def cyclic_group(sig, n):
    return FiniteAlgebra.make(
        sig,
        {"elem": n},
        {"mul": lambda x, y: (x + y) % n, "inv": lambda x: (-x) % n, "e": lambda: 0},
    )


def klein_four(sig, relabel=None):
    relabel = relabel or (0, 1, 2, 3)
    inv = {v: k for k, v in enumerate(relabel)}
    return FiniteAlgebra.make(
        sig,
        {"elem": 4},
        {
            "mul": lambda x, y: relabel[inv[x] ^ inv[y]],
            "inv": lambda x: x,
            "e": lambda: relabel[0],
        },
    )
