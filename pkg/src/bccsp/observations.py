"""Observation sets for the decorated-trace semantics.

Each function maps a term to the set of observations of one shape:

- failure pairs: (trace, refused set)
- ready pairs: (trace, exact menu after the trace)
- failure traces: alternating refusal sets and actions, X0 a1 X1 ... an Xn
- ready traces: the same shape with exact menus in place of refusal sets
- possible futures: (trace, trace set of the reached state)

Traces are tuples of labels, action sets are frozensets. Alternating
sequences are encoded as odd-length tuples whose even positions hold sets.
Refusal sets range over subsets of the transition labels of the given
alphabet, so failure pairs and failure traces need the alphabet; the others
do not depend on it.
"""

from __future__ import annotations

import json

from .semantics import TransitionMode, initials, multi_derivatives, traces, transitions
from .terms import Alphabet, Term

__all__ = [
    "OBSERVATION_KINDS",
    "failure_pairs",
    "ready_pairs",
    "failure_traces",
    "ready_traces",
    "possible_futures",
    "observation_set",
    "observations_json",
]

OBSERVATION_KINDS = ("F", "R", "FT", "RT", "PF")


def _subsets(xs):
    xs = tuple(xs)
    n = len(xs)
    for mask in range(1 << n):
        yield frozenset(x for i, x in enumerate(xs) if mask >> i & 1)


def _labels(alphabet: Alphabet) -> tuple:
    if alphabet is None:
        raise ValueError("refusal sets need an alphabet")
    return alphabet.transition_labels()


def failure_pairs(t, alphabet, mode=TransitionMode.INTERLEAVING):
    labels = _labels(alphabet)
    out = set()
    for seq, q in multi_derivatives(t, mode, alphabet):
        menu = initials(q, mode, alphabet)
        for x in _subsets(a for a in labels if a not in menu):
            out.add((seq, x))
    return frozenset(out)


def ready_pairs(t, alphabet=None, mode=TransitionMode.INTERLEAVING):
    return frozenset(
        (seq, initials(q, mode, alphabet)) for seq, q in multi_derivatives(t, mode, alphabet)
    )


def failure_traces(t, alphabet, mode=TransitionMode.INTERLEAVING):
    labels = _labels(alphabet)
    memo_key = ("obsFT", alphabet, mode)
    c = t.cache()
    got = c.get(memo_key)
    if got is not None:
        return got
    menu = initials(t, mode, alphabet)
    refusals = tuple(_subsets(a for a in labels if a not in menu))
    acc = {(x,) for x in refusals}
    for a, u in transitions(t, mode, alphabet):
        for rest in failure_traces(u, alphabet, mode):
            for x in refusals:
                acc.add((x, a) + rest)
    out = frozenset(acc)
    c[memo_key] = out
    return out


def ready_traces(t, alphabet=None, mode=TransitionMode.INTERLEAVING):
    memo_key = ("obsRT", alphabet, mode)
    c = t.cache()
    got = c.get(memo_key)
    if got is not None:
        return got
    menu = initials(t, mode, alphabet)
    acc = {(menu,)}
    for a, u in transitions(t, mode, alphabet):
        for rest in ready_traces(u, alphabet, mode):
            acc.add((menu, a) + rest)
    out = frozenset(acc)
    c[memo_key] = out
    return out


def possible_futures(t, alphabet=None, mode=TransitionMode.INTERLEAVING):
    return frozenset(
        (seq, traces(q, mode, alphabet)) for seq, q in multi_derivatives(t, mode, alphabet)
    )


def observation_set(t: Term, kind: str, alphabet=None, mode=TransitionMode.INTERLEAVING):
    if kind == "F":
        return failure_pairs(t, alphabet, mode)
    if kind == "R":
        return ready_pairs(t, alphabet, mode)
    if kind == "FT":
        return failure_traces(t, alphabet, mode)
    if kind == "RT":
        return ready_traces(t, alphabet, mode)
    if kind == "PF":
        return possible_futures(t, alphabet, mode)
    raise ValueError(f"unknown observation kind {kind!r}")


def _encode(x):
    if isinstance(x, frozenset):
        return sorted(_encode(y) for y in x)
    if isinstance(x, tuple):
        return [_encode(y) for y in x]
    return x


def observations_json(kind: str, obs) -> str:
    """Canonical JSON for an observation set: nested sets become sorted lists."""
    return json.dumps({"kind": kind, "observations": sorted(_encode(o) for o in obs)}, indent=2)
