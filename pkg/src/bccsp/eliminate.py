"""Constructive elimination of the parallel operator.

Every closed term is provably equal, in each axiom system that carries an
expansion law, to a term built without parallel composition. The rewriting
here performs that elimination by structural descent: innermost parallel
nodes first, one case split per node, then the smaller parallel nodes the
split leaves behind. With `emit_proof` the same pass records a proof script
that replays under the chosen system, deriving on the fly whatever case law
the system does not carry natively.

Each case analysis is tied to the most discriminating system of its family
and reused by the coarser ones:

  RS family (E_RS):              RSP1 / RSP2 / EL2 by duplicate heads
  CS family (E_CS, E_S):         EL1 / CSP2 / CSP1 by summand counts
  RT family (E_RT, E_FT, E_R, E_F): FP on a duplicate head, else EL2
  CT family (E_CT, E_T):         EL1 / CTP by summand counts

The synchronising systems run the same analyses with ELC1/ELC1t in place of
EL1 and ELC2 in place of EL2.
"""

from __future__ import annotations

from .axioms import AxiomSystem, Equation, build_system, canonical_system_name
from .derivations import derivation_hook
from .proofs import ProofBuilder, TermTrace
from .semantics import TransitionMode
from .terms import (
    Nil,
    Par,
    Prefix,
    Sum,
    Term,
    free_vars,
    render,
    size,
    strip_nil,
    substitute,
    subterm_at,
    sum_of,
    summands,
)

__all__ = ["eliminate", "par_free", "family_of"]

_FAMILY = {
    "RS": "RS",
    "CS": "CS",
    "S": "CS",
    "RT": "RT",
    "FT": "RT",
    "R": "RT",
    "F": "RT",
    "CT": "CT",
    "T": "CT",
}


def family_of(system_name: str) -> str:
    """The case-analysis family a system's elimination runs on."""
    name = canonical_system_name(system_name)
    kind = name[4:] if name.startswith("E^c_") else name[2:]
    fam = _FAMILY.get(kind)
    if fam is None:
        raise ValueError(
            f"{name} has no expansion law; elimination needs one of the E_X systems"
        )
    return fam


def _innermost_par(t: Term, path: tuple = ()):
    """Path of the leftmost innermost parallel node, None if there is none."""
    if isinstance(t, Prefix):
        return _innermost_par(t.body, path + (0,))
    if isinstance(t, (Par, Sum)):
        got = _innermost_par(t.left, path + (0,))
        if got is None:
            got = _innermost_par(t.right, path + (1,))
        if got is None and isinstance(t, Par):
            got = path
        return got
    return None


def par_free(t: Term) -> bool:
    return _innermost_par(t) is None


class _Context:
    def __init__(self, system: AxiomSystem, shapes: AxiomSystem, builder, family: str):
        self.system = system
        self.shapes = shapes
        self.builder = builder
        self.family = family
        self.alphabet = system.alphabet
        self.sync = system.mode is TransitionMode.CCS_SYNC
        labels = (
            system.alphabet.transition_labels() if self.sync else system.alphabet.actions
        )
        self._order = {a: i for i, a in enumerate(labels)}

    def eq(self, axiom_id: str) -> Equation:
        got = self.system.by_id.get(axiom_id)
        if got is not None:
            return got
        return self.shapes.by_id[axiom_id]

    def head_order(self, action: str) -> int:
        return self._order[action]


def eliminate(term: Term, system, alphabet=None, emit_proof: bool = False):
    """Rewrite a closed term into one without the parallel operator.

    `system` is an axiom system name or a built AxiomSystem; giving a name
    requires `alphabet`. Returns (result, script); the script is None unless
    `emit_proof` is set, and otherwise proves term = result with steps that
    replay under the given system.
    """
    if isinstance(system, AxiomSystem):
        sys_ = system
    else:
        if alphabet is None:
            raise ValueError("an alphabet is needed when the system is given by name")
        sys_ = build_system(system, alphabet)
    if free_vars(term):
        raise ValueError("only closed terms can be freed of the parallel operator")
    fam = family_of(sys_.name)
    ref = ("E^c_" if sys_.mode is TransitionMode.CCS_SYNC else "E_") + fam
    shapes = sys_ if sys_.name == ref else build_system(ref, sys_.alphabet)
    builder = (
        ProofBuilder(sys_, derive=derivation_hook(sys_.name)) if emit_proof else None
    )
    ctx = _Context(sys_, shapes, builder, fam)
    tr = TermTrace(term, builder)
    _drive(ctx, tr, None)
    if not emit_proof:
        return tr.term, None
    idx = tr.proof_index()
    if idx is None:
        idx = builder.refl(term)
    return tr.term, builder.script(term, tr.term, idx)


def _drive(ctx: _Context, tr: TermTrace, bound):
    """Eliminate every parallel node under the trace, innermost first. Each
    node handled must be strictly smaller (0 factors and summands aside) than
    the node whose case split produced it."""
    while True:
        path = _innermost_par(tr.term)
        if path is None:
            return
        node = subterm_at(tr.term, path)
        measure = size(strip_nil(node))
        if bound is not None and measure >= bound:
            raise AssertionError(
                f"elimination failed to shrink at {render(node)} (measure {measure}, "
                f"parent {bound})"
            )
        sub = TermTrace(node, ctx.builder)
        _case(ctx, sub)
        _drive(ctx, sub, measure)
        tr.splice(path, sub)


def _case(ctx: _Context, tr: TermTrace):
    """One case split at the root of the trace, a parallel node whose two
    children are free of parallel composition."""
    node = tr.term
    ps, qs = summands(node.left), summands(node.right)
    for s in ps + qs:
        if not isinstance(s, Prefix):
            raise AssertionError(f"unexpected summand {render(s)} in {render(node)}")
    if not qs:
        left = sum_of(ps)
        tr.ac_to(Par(left, Nil()))
        tr.rewrite_axiom((), ctx.eq("P0"), {"x": left})
        return
    if not ps:
        right = sum_of(qs)
        tr.ac_to(Par(Nil(), right))
        tr.rewrite_axiom((), ctx.eq("P1"), {"x": Nil(), "y": right})
        tr.rewrite_axiom((), ctx.eq("P0"), {"x": right})
        return
    _CASES[ctx.family](ctx, tr, ps, qs)


def _flip(ctx: _Context, tr: TermTrace, ps: list, qs: list) -> tuple:
    left, right = sum_of(ps), sum_of(qs)
    tr.ac_to(Par(left, right))
    tr.rewrite_axiom((), ctx.eq("P1"), {"x": left, "y": right})
    return qs, ps


def _first_dup(ss: list):
    """Index of the first adjacent pair of summands with the same initial
    action; sorting by rendered text keeps equal actions adjacent."""
    for i in range(len(ss) - 1):
        if ss[i].action == ss[i + 1].action:
            return i
    return None


def _rest(ss: list, i: int) -> Term:
    return sum_of(ss[:i] + ss[i + 2 :])


def _row_id(heads) -> str:
    return "{" + ",".join(heads) + "}"


def _apply(ctx: _Context, tr: TermTrace, axiom_id: str, sigma: dict):
    eq = ctx.eq(axiom_id)
    tr.ac_to(substitute(eq.lhs, sigma))
    tr.rewrite_axiom((), eq, sigma)


def _distinct_row(ctx: _Context, ss: list, stem: str) -> tuple:
    """Heads and substitution for a side whose initial actions are pairwise
    distinct, in the order the expansion law lists them."""
    ordered = sorted(ss, key=lambda s: ctx.head_order(s.action))
    heads = tuple(s.action for s in ordered)
    sigma = {f"{stem}{i + 1}": s.body for i, s in enumerate(ordered)}
    return heads, sigma


def _apply_expansion(ctx: _Context, tr: TermTrace, ps: list, qs: list):
    hl, sigma = _distinct_row(ctx, ps, "x")
    hr, sr = _distinct_row(ctx, qs, "y")
    sigma.update(sr)
    stem = "ELC2" if ctx.sync else "EL2"
    _apply(ctx, tr, f"{stem}[{_row_id(hl)};{_row_id(hr)}]", sigma)


def _apply_pair(ctx: _Context, tr: TermTrace, sp: Prefix, sq: Prefix):
    a, b = sp.action, sq.action
    sigma = {"x": sp.body, "y": sq.body}
    if not ctx.sync:
        _apply(ctx, tr, f"EL1[{a},{b}]", sigma)
        return
    alph = ctx.alphabet
    compl = a != alph.tau and b != alph.tau and alph.complement(a) == b
    _apply(ctx, tr, f"{'ELC1t' if compl else 'ELC1'}[{a},{b}]", sigma)


def _case_rs(ctx: _Context, tr: TermTrace, ps: list, qs: list):
    if len(ps) > 1 and (
        len(qs) == 1 or (_first_dup(ps) is not None and _first_dup(qs) is None)
    ):
        ps, qs = _flip(ctx, tr, ps, qs)
    dp, dq = _first_dup(ps), _first_dup(qs)
    if dp is not None and dq is not None:
        sigma = {
            "x": ps[dp].body,
            "y": ps[dp + 1].body,
            "u": _rest(ps, dp),
            "z": qs[dq].body,
            "w": qs[dq + 1].body,
            "v": _rest(qs, dq),
        }
        _apply(ctx, tr, f"RSP1[{ps[dp].action},{qs[dq].action}]", sigma)
    elif dq is not None:
        heads, sigma = _distinct_row(ctx, ps, "x")
        sigma.update({"y": qs[dq].body, "z": qs[dq + 1].body, "w": _rest(qs, dq)})
        _apply(ctx, tr, f"RSP2[{_row_id(heads)};{qs[dq].action}]", sigma)
    else:
        _apply_expansion(ctx, tr, ps, qs)


def _case_cs(ctx: _Context, tr: TermTrace, ps: list, qs: list):
    if len(ps) > 1 and len(qs) == 1:
        ps, qs = _flip(ctx, tr, ps, qs)
    if len(ps) == 1 and len(qs) == 1:
        _apply_pair(ctx, tr, ps[0], qs[0])
    elif len(ps) == 1:
        sigma = {
            "x": ps[0].body,
            "y": qs[0].body,
            "z": qs[1].body,
            "w": sum_of(qs[2:]),
        }
        _apply(
            ctx, tr, f"CSP2[{ps[0].action},{qs[0].action},{qs[1].action}]", sigma
        )
    else:
        sigma = {
            "x": ps[0].body,
            "y": ps[1].body,
            "u": sum_of(ps[2:]),
            "z": qs[0].body,
            "w": qs[1].body,
            "v": sum_of(qs[2:]),
        }
        _apply(
            ctx,
            tr,
            f"CSP1[{ps[0].action},{ps[1].action},{qs[0].action},{qs[1].action}]",
            sigma,
        )


def _case_rt(ctx: _Context, tr: TermTrace, ps: list, qs: list):
    if _first_dup(ps) is None and _first_dup(qs) is not None:
        ps, qs = _flip(ctx, tr, ps, qs)
    dp = _first_dup(ps)
    if dp is not None:
        sigma = {
            "x": ps[dp].body,
            "y": ps[dp + 1].body,
            "w": _rest(ps, dp),
            "z": sum_of(qs),
        }
        _apply(ctx, tr, f"FP[{ps[dp].action}]", sigma)
    else:
        _apply_expansion(ctx, tr, ps, qs)


def _case_ct(ctx: _Context, tr: TermTrace, ps: list, qs: list):
    if len(ps) == 1 and len(qs) > 1:
        ps, qs = _flip(ctx, tr, ps, qs)
    if len(ps) == 1:
        _apply_pair(ctx, tr, ps[0], qs[0])
    else:
        sigma = {
            "x": ps[0].body,
            "y": ps[1].body,
            "w": sum_of(ps[2:]),
            "z": sum_of(qs),
        }
        _apply(ctx, tr, f"CTP[{ps[0].action},{ps[1].action}]", sigma)


_CASES = {"RS": _case_rs, "CS": _case_cs, "RT": _case_rt, "CT": _case_ct}
