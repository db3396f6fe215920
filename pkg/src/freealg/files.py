"""Text formats: variety files, certificate files, and algebra JSON.

A variety document is two top-level forms::

    (signature (sort NAME)... (op NAME (ARGSORT...) RESULTSORT)...)
    (variety NAME (axiom ((VAR SORT)...) (= TERM TERM))...)

A certificate document is one form naming the route::

    (certificate empty-theory)
    (certificate fujiwara (rank N) AXIOM...)
    (certificate per-sort (sort NAME (rank N) AXIOM...)...)
    (certificate action-split (s-term (VAR) TERM)
        (sort1-witness (rank N) AXIOM...)
        (sort2-axioms (rank N) AXIOM...)
        (sample-h1 PATH)?)

Terms follow ``term := var-name | (op-name term*)``; constants are written
as zero-argument applications.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import sexpr
from .certify import (
    ActionSplitCert,
    CertificateError,
    EmptyTheoryCert,
    FujiwaraCert,
    PerSortCert,
    PerSortWitness,
)
from .egraph import VarietyDef
from .finalg import FiniteAlgebra
from .sexpr import Atom, SList
from .signature import (
    NotActionSeparable,
    Signature,
    SignatureError,
    classify_action_signature,
    restrict_to_part,
    validate_signature,
)
from .terms import GeneratorProfile, Identity, SortedVar, parse_term, term_to_text


def parse_axiom(form, sig: Signature) -> Identity:
    ax = sexpr.expect_list(form, "axiom")
    if len(ax) != 3 or not isinstance(ax[1], SList):
        raise sexpr.SexprError("axiom needs a variable list and an equation", ax.line, ax.col)
    vs: list[SortedVar] = []
    for decl in ax[1]:
        if not isinstance(decl, SList) or len(decl) != 2:
            raise sexpr.SexprError("variable declarations look like (name sort)", ax.line, ax.col)
        vname = sexpr.atom_text(decl[0], "variable name")
        sname = sexpr.atom_text(decl[1], "sort name")
        try:
            sort = sig.sort_named(sname)
        except SignatureError:
            raise sexpr.SexprError(f"unknown sort '{sname}'", decl.line, decl.col) from None
        vs.append(SortedVar(vname, sort.id))
    profile = GeneratorProfile.of_vars(sig, vs)
    eq = ax[2]
    if not isinstance(eq, SList) or len(eq) != 3 or sexpr.head(eq) != "=":
        raise sexpr.SexprError("expected (= term term)", getattr(eq, "line", ax.line), getattr(eq, "col", ax.col))
    lhs = parse_term(eq[1], sig, profile)
    rhs = parse_term(eq[2], sig, profile)
    return Identity(profile, lhs, rhs)


def parse_variety_document(text: str) -> VarietyDef:
    forms = sexpr.parse_all(text)
    if len(forms) != 2:
        raise sexpr.SexprError(
            "a variety document has a (signature ...) and a (variety ...) form", 1, 0
        )
    sig = validate_signature(forms[0])
    var_form = sexpr.expect_list(forms[1], "variety")
    if len(var_form) < 2:
        raise sexpr.SexprError("variety form needs a name", var_form.line, var_form.col)
    name = sexpr.atom_text(var_form[1], "variety name")
    axioms = tuple(parse_axiom(f, sig) for f in var_form.items[2:])
    return VarietyDef(sig, name, axioms)


def load_variety(path) -> VarietyDef:
    return parse_variety_document(Path(path).read_text())


def serialize_axiom(ident: Identity) -> str:
    decls = " ".join(
        f"({v.name} {ident.vars.sig.sorts[v.sort].name})" for v in ident.vars.variables()
    )
    return f"(axiom ({decls}) (= {term_to_text(ident.lhs)} {term_to_text(ident.rhs)}))"


def serialize_variety(v: VarietyDef) -> str:
    lines = [v.sig.to_sexpr_text(), f"(variety {v.name}"]
    for ax in v.axioms:
        lines.append("  " + serialize_axiom(ax))
    return "\n".join(lines) + ")\n"


def _parse_rank(forms, where: str) -> int:
    ranks = [f for f in forms if sexpr.head(f) == "rank"]
    if len(ranks) != 1 or len(ranks[0]) != 2:
        raise CertificateError(f"{where} needs exactly one (rank N)")
    try:
        return int(sexpr.atom_text(ranks[0][1], "rank"))
    except ValueError:
        raise CertificateError(f"{where}: rank must be an integer") from None


def parse_certificate_document(text: str, variety: VarietyDef, base_dir=None):
    form = sexpr.parse_one(text)
    cert = sexpr.expect_list(form, "certificate")
    if len(cert) < 2:
        raise CertificateError("certificate form needs a route name")
    route = sexpr.atom_text(cert[1], "route name")
    body = cert.items[2:]
    if route == "empty-theory":
        if body:
            raise CertificateError("empty-theory certificates take no parameters")
        return EmptyTheoryCert()
    if route == "fujiwara":
        rank = _parse_rank(body, "fujiwara certificate")
        axioms = tuple(parse_axiom(f, variety.sig) for f in body if sexpr.head(f) == "axiom")
        return FujiwaraCert(extra_axioms=axioms, rank=rank)
    if route == "per-sort":
        witnesses: dict[str, PerSortWitness] = {}
        for f in body:
            entry = sexpr.expect_list(f, "sort")
            if len(entry) < 2:
                raise CertificateError("per-sort entries look like (sort NAME (rank N) axioms...)")
            sname = sexpr.atom_text(entry[1], "sort name")
            rank = _parse_rank(entry.items[2:], f"per-sort witness for '{sname}'")
            axioms = tuple(
                parse_axiom(g, variety.sig) for g in entry.items[2:] if sexpr.head(g) == "axiom"
            )
            witnesses[sname] = PerSortWitness(extra_axioms=axioms, rank=rank)
        if not witnesses:
            raise CertificateError("per-sort certificate declares no witnesses")
        return PerSortCert(witnesses=witnesses)
    if route == "action-split":
        split = classify_action_signature(variety.sig)
        if isinstance(split, NotActionSeparable):
            raise CertificateError(f"signature is not action-separated: {split.reason}")
        sub1, _ = restrict_to_part(variety.sig, split, 1)
        sub2, _ = restrict_to_part(variety.sig, split, 2)
        s_var = s_term = None
        w1 = w2 = None
        rank1 = rank2 = None
        sample = None
        for f in body:
            kind = sexpr.head(f)
            if kind == "s-term":
                if len(f) != 3 or not isinstance(f[1], SList) or len(f[1]) != 1:
                    raise CertificateError("s-term looks like (s-term (VAR) TERM)")
                vname = sexpr.atom_text(f[1][0], "action variable")
                s_var = SortedVar(vname, 0)
                prof = GeneratorProfile.of_vars(sub2, [s_var])
                s_term = parse_term(f[2], sub2, prof)
            elif kind == "sort1-witness":
                rank1 = _parse_rank(f.items[1:], "sort1-witness")
                w1 = tuple(parse_axiom(g, sub1) for g in f.items[1:] if sexpr.head(g) == "axiom")
            elif kind == "sort2-axioms":
                rank2 = _parse_rank(f.items[1:], "sort2-axioms")
                w2 = tuple(parse_axiom(g, sub2) for g in f.items[1:] if sexpr.head(g) == "axiom")
            elif kind == "sample-h1":
                rel = sexpr.atom_text(f[1], "sample path")
                path = Path(base_dir or ".") / rel
                sample = load_algebra_json(path, sub1)
            else:
                raise CertificateError(f"unknown action-split section '{kind}'")
        if s_var is None or s_term is None:
            raise CertificateError("action-split certificates need an (s-term ...) section")
        if w1 is None or w2 is None:
            raise CertificateError(
                "action-split certificates need sort1-witness and sort2-axioms sections"
            )
        return ActionSplitCert(
            s_var=s_var,
            s_term=s_term,
            sort1_axioms=w1,
            sort1_rank=rank1,
            sort2_axioms=w2,
            sort2_rank=rank2,
            sample_h1=sample,
        )
    raise CertificateError(
        f"unknown certificate route '{route}' "
        "(expected empty-theory, fujiwara, per-sort, or action-split)"
    )


def load_certificate(path, variety: VarietyDef):
    p = Path(path)
    return parse_certificate_document(p.read_text(), variety, base_dir=p.parent)


def load_algebra_json(path, sig: Signature) -> FiniteAlgebra:
    data = json.loads(Path(path).read_text())
    return FiniteAlgebra.from_json_dict(sig, data)


def parse_profile_spec(spec: str, sig: Signature) -> GeneratorProfile:
    """Profile syntax: 'elem=3' or 'sort1=2,sort2=1'; omitted sorts get 0."""
    counts: dict[str, int] = {}
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise SignatureError(f"bad profile component '{chunk}', expected SORT=COUNT")
        name, _, num = chunk.partition("=")
        try:
            counts[name.strip()] = int(num)
        except ValueError:
            raise SignatureError(f"bad generator count in '{chunk}'") from None
    for name in counts:
        sig.sort_named(name)  # raises UnknownSort for typos
    return GeneratorProfile.from_counts(sig, counts)
