"""Equational proof scripts: representation, checking, and construction.

A proof script is a straight-line sequence of steps, each concluding an
equation between terms. Steps refer to earlier steps by index. The rules are
reflexivity, symmetry, transitivity, substitution, congruence for prefix,
choice and parallel, and axiom introduction. An axiom step optionally
carries a substitution and a context: with a context it concludes
host = host-with-the-instantiated-axiom-applied-at-path, which packages the
usual cut through the congruence rules into one checkable step.

`check_proof` recomputes every conclusion and accepts only if the last one
is the stated goal, both sides syntactically identical.

`ProofBuilder` grows scripts programmatically. Its `ac` method proves any
two terms equal that have the same normal form under commutativity,
associativity, idempotence and the 0 unit law of choice, by rewriting both
sides to that normal form and replaying the second half backwards. This is
the workhorse gluing the shape of a term to the shape an axiom wants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axioms import AxiomSystem, Equation
from .terms import (
    Nil,
    Par,
    Prefix,
    Sum,
    Term,
    parse,
    render,
    replace_at,
    substitute,
    subterm_at,
)

__all__ = [
    "Step",
    "ProofScript",
    "Accepted",
    "Rejected",
    "ProofError",
    "AcMismatch",
    "check_proof",
    "replay_conclusions",
    "ProofBuilder",
    "TermTrace",
    "canon",
    "script_to_json",
    "script_from_json",
]


class ProofError(ValueError):
    pass


class AcMismatch(ProofError):
    """The two terms differ beyond commutativity, associativity, idempotence
    and units of choice."""


@dataclass(frozen=True)
class Step:
    rule: str
    term: Term | None = None
    of: tuple = ()
    subst: tuple = ()  # sorted pairs (variable name, Term)
    action: str | None = None
    axiom_id: str | None = None
    direction: str = "lr"
    host: Term | None = None
    path: tuple | None = None


@dataclass(frozen=True)
class ProofScript:
    lhs: Term
    rhs: Term
    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Accepted:
    steps: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Rejected:
    step: int  # index of the offending step, or -1 for a goal mismatch
    reason: str

    def __bool__(self) -> bool:
        return False


def _subst_map(pairs) -> dict:
    return {n: t for n, t in pairs}


def _step_conclusion(step: Step, conclusions, system: AxiomSystem) -> tuple:
    """The equation (lhs, rhs) a step concludes, or a ProofError."""

    def premise(i):
        if not isinstance(i, int) or not 0 <= i < len(conclusions):
            raise ProofError(f"premise index {i!r} out of range")
        return conclusions[i]

    r = step.rule
    if r == "refl":
        if step.term is None:
            raise ProofError("refl needs a term")
        return (step.term, step.term)
    if r == "sym":
        (l, rr) = premise(step.of[0])
        return (rr, l)
    if r == "trans":
        if len(step.of) < 2:
            raise ProofError("trans needs at least two premises")
        l0, cur = premise(step.of[0])
        for i in step.of[1:]:
            l, rr = premise(i)
            if l is not cur:
                raise ProofError(
                    f"trans chain broken: {render(cur)} is not {render(l)}"
                )
            cur = rr
        return (l0, cur)
    if r == "subst":
        l, rr = premise(step.of[0])
        m = _subst_map(step.subst)
        return (substitute(l, m), substitute(rr, m))
    if r == "cong_prefix":
        if not step.action:
            raise ProofError("cong_prefix needs an action")
        l, rr = premise(step.of[0])
        return (Prefix(step.action, l), Prefix(step.action, rr))
    if r == "cong_sum":
        l1, r1 = premise(step.of[0])
        l2, r2 = premise(step.of[1])
        return (Sum(l1, l2), Sum(r1, r2))
    if r == "cong_par":
        l1, r1 = premise(step.of[0])
        l2, r2 = premise(step.of[1])
        return (Par(l1, l2), Par(r1, r2))
    if r == "axiom":
        ax = system.by_id.get(step.axiom_id)
        if ax is None:
            raise ProofError(f"axiom {step.axiom_id!r} is not in system {system.name}")
        m = _subst_map(step.subst)
        src, dst = substitute(ax.lhs, m), substitute(ax.rhs, m)
        if step.direction == "rl":
            src, dst = dst, src
        elif step.direction != "lr":
            raise ProofError(f"direction must be lr or rl, got {step.direction!r}")
        if step.host is None:
            return (src, dst)
        try:
            at = subterm_at(step.host, step.path)
        except IndexError as e:
            raise ProofError(str(e))
        if at is not src:
            raise ProofError(
                f"context mismatch: host has {render(at)} at {list(step.path)}, "
                f"axiom instance rewrites {render(src)}"
            )
        return (step.host, replace_at(step.host, step.path, dst))
    raise ProofError(f"unknown rule {r!r}")


def check_proof(script: ProofScript, system: AxiomSystem):
    """Replay a script against an axiom system. Every step must check and the
    last conclusion must be the script's goal equation, syntactically."""
    conclusions = []
    for i, step in enumerate(script.steps):
        try:
            conclusions.append(_step_conclusion(step, conclusions, system))
        except (ValueError, TypeError, KeyError, IndexError) as e:
            return Rejected(i, str(e))
    if not conclusions:
        if script.lhs is script.rhs:
            return Accepted(0)
        return Rejected(-1, "empty script for a non-trivial goal")
    l, r = conclusions[-1]
    if l is not script.lhs or r is not script.rhs:
        return Rejected(
            -1,
            f"final conclusion {render(l)} = {render(r)} is not the goal "
            f"{render(script.lhs)} = {render(script.rhs)}",
        )
    return Accepted(len(script.steps))


def replay_conclusions(script: ProofScript, system: AxiomSystem) -> list:
    """The (lhs, rhs) pair concluded by every step, in order. Raises
    ProofError at the first step that does not check."""
    conclusions: list = []
    for step in script.steps:
        conclusions.append(_step_conclusion(step, conclusions, system))
    return conclusions


# ---------------------------------------------------------------------------
# Normal form under the choice laws


def _is_nil(t: Term) -> bool:
    return isinstance(t, Nil)


def _flat_leaves(t: Term) -> list:
    out = []

    def walk(u):
        if isinstance(u, Sum):
            walk(u.left)
            walk(u.right)
        else:
            out.append(u)

    walk(t)
    return out


def canon(t: Term) -> Term:
    """Normal form modulo A0, A1, A2, A3: sums are flattened, the summands
    normalised, 0 summands dropped, duplicates removed, and the rest sorted
    and re-associated to the left. No laws of parallel are used."""
    c = t.cache()
    got = c.get("canon")
    if got is not None:
        return got
    if isinstance(t, Prefix):
        out = Prefix(t.action, canon(t.body))
    elif isinstance(t, Par):
        out = Par(canon(t.left), canon(t.right))
    elif isinstance(t, Sum):
        leaves = [canon(u) for u in _flat_leaves(t)]
        keep = []
        for u in sorted((u for u in leaves if not _is_nil(u)), key=render):
            if not keep or keep[-1] is not u:
                keep.append(u)
        if not keep:
            out = Nil()
        else:
            out = keep[0]
            for u in keep[1:]:
                out = Sum(out, u)
    else:
        out = t
    c["canon"] = out
    return out


def _axiom_shapes():
    from .terms import Var

    x, y, z = Var("x"), Var("y"), Var("z")
    return {
        "A0": (Sum(x, Nil()), x),
        "A1": (Sum(x, y), Sum(y, x)),
        "A2": (Sum(Sum(x, y), z), Sum(x, Sum(y, z))),
        "A3": (Sum(x, x), x),
    }


_A_SHAPES = _axiom_shapes()


class _AcPlan:
    """A record of A0-A3 rewrites driving a term to its canon."""

    def __init__(self, t: Term):
        self.start = t
        self.term = t
        self.ops = []  # (axiom id, subst pairs, path, direction)

    def apply(self, axid, sigma: dict, path: tuple, direction: str):
        lhs, rhs = _A_SHAPES[axid]
        src, dst = substitute(lhs, sigma), substitute(rhs, sigma)
        if direction == "rl":
            src, dst = dst, src
        at = subterm_at(self.term, path)
        if at is not src:
            raise AssertionError(
                f"normalisation bug: {axid} {direction} expects {render(src)} "
                f"at {list(path)}, found {render(at)}"
            )
        self.ops.append((axid, tuple(sorted(sigma.items())), path, direction))
        self.term = replace_at(self.term, path, dst)


def _comb_leaves(t: Term, base: tuple) -> list:
    """Paths and terms of the summand leaves of a left-associated sum."""
    node = subterm_at(t, base)
    if not isinstance(node, Sum):
        return [(base, node)]
    rights = []
    p = base
    while isinstance(node, Sum):
        rights.append((p + (1,), node.right))
        p = p + (0,)
        node = subterm_at(t, p)
    rights.append((p, node))
    return rights[::-1]


def _plan_sum(plan: _AcPlan, base: tuple):
    # Left-comb the + spine: while some spine node has a Sum right child,
    # rotate it left with A2 applied right to left.
    while True:
        target = None
        stack = [base]
        while stack:
            p = stack.pop()
            node = subterm_at(plan.term, p)
            if not isinstance(node, Sum):
                continue
            if isinstance(node.right, Sum):
                target = p
                break
            stack.append(p + (0,))
        if target is None:
            break
        node = subterm_at(plan.term, target)
        plan.apply(
            "A2",
            {"x": node.left, "y": node.right.left, "z": node.right.right},
            target,
            "rl",
        )

    # Normalise the leaves in place; the comb's shape is stable under this.
    for lp, _leaf in _comb_leaves(plan.term, base):
        _plan_at(plan, lp)

    def key(u):
        return (_is_nil(u), render(u))

    # Bubble the leaves into sorted order with A1, shuttling via A2.
    while True:
        leaves = _comb_leaves(plan.term, base)
        n = len(leaves)
        swapped = False
        for i in range(n - 1):
            if key(leaves[i][1]) > key(leaves[i + 1][1]):
                s_i, s_j = leaves[i][1], leaves[i + 1][1]
                if i == 0:
                    p0 = base + (0,) * (n - 2)
                    plan.apply("A1", {"x": s_i, "y": s_j}, p0, "lr")
                else:
                    p = base + (0,) * (n - 2 - i)
                    c = subterm_at(plan.term, p + (0, 0))
                    plan.apply("A2", {"x": c, "y": s_i, "z": s_j}, p, "lr")
                    plan.apply("A1", {"x": s_i, "y": s_j}, p + (1,), "lr")
                    plan.apply("A2", {"x": c, "y": s_j, "z": s_i}, p, "rl")
                swapped = True
                break
        if not swapped:
            break

    # Merge adjacent duplicates with A3.
    while True:
        leaves = _comb_leaves(plan.term, base)
        n = len(leaves)
        hit = None
        for i in range(n - 1):
            if leaves[i][1] is leaves[i + 1][1]:
                hit = i
                break
        if hit is None:
            break
        s = leaves[hit][1]
        if hit == 0:
            plan.apply("A3", {"x": s}, base + (0,) * (n - 2), "lr")
        else:
            p = base + (0,) * (n - 2 - hit)
            c = subterm_at(plan.term, p + (0, 0))
            plan.apply("A2", {"x": c, "y": s, "z": s}, p, "lr")
            plan.apply("A3", {"x": s}, p + (1,), "lr")

    # Drop trailing 0 summands with A0.
    while True:
        node = subterm_at(plan.term, base)
        if not isinstance(node, Sum) or not _is_nil(node.right):
            break
        plan.apply("A0", {"x": node.left}, base, "lr")


def _plan_at(plan: _AcPlan, base: tuple):
    node = subterm_at(plan.term, base)
    if isinstance(node, Prefix):
        _plan_at(plan, base + (0,))
    elif isinstance(node, Par):
        _plan_at(plan, base + (0,))
        _plan_at(plan, base + (1,))
    elif isinstance(node, Sum):
        _plan_sum(plan, base)


def _plan_to_canon(t: Term) -> _AcPlan:
    plan = _AcPlan(t)
    _plan_at(plan, ())
    want = canon(t)
    if plan.term is not want:
        raise AssertionError(
            f"normalisation bug: planned {render(plan.term)}, canon is {render(want)}"
        )
    return plan


# ---------------------------------------------------------------------------
# Script construction


class ProofBuilder:
    """Accumulates proof steps against a fixed axiom system.

    `derive` is an optional hook called as derive(builder, axiom_id) for
    axiom ids that are *not* in the system; it must return the index of a
    step proving that schema equation from what the system has (or None if
    it cannot). `axiom` and `rewrite` fall back to it, so case analyses
    written against a larger axiom vocabulary run unchanged over a smaller
    system.
    """

    def __init__(self, system: AxiomSystem, derive=None):
        self.system = system
        self.steps: list = []
        self.conclusions: list = []
        self._memo: dict = {}
        self.derive = derive
        self._derived: dict = {}

    def _add(self, step: Step) -> int:
        got = self._memo.get(step)
        if got is not None:
            return got
        concl = _step_conclusion(step, self.conclusions, self.system)
        self.steps.append(step)
        self.conclusions.append(concl)
        idx = len(self.steps) - 1
        self._memo[step] = idx
        return idx

    def conclusion(self, idx: int) -> tuple:
        return self.conclusions[idx]

    def refl(self, t: Term) -> int:
        return self._add(Step("refl", term=t))

    def sym(self, idx: int) -> int:
        l, r = self.conclusions[idx]
        if l is r:
            return idx
        return self._add(Step("sym", of=(idx,)))

    def trans(self, indexes) -> int:
        useful = [i for i in indexes if self.conclusions[i][0] is not self.conclusions[i][1]]
        if not useful:
            return self.refl(self.conclusions[indexes[0]][0])
        if len(useful) == 1:
            return useful[0]
        return self._add(Step("trans", of=tuple(useful)))

    def subst(self, idx: int, sigma: dict) -> int:
        if not sigma:
            return idx
        return self._add(Step("subst", of=(idx,), subst=tuple(sorted(sigma.items()))))

    def axiom(self, axiom_id: str, sigma: dict | None = None, direction: str = "lr") -> int:
        """The axiom instance as a root equation (no context)."""
        sigma = sigma or {}
        if axiom_id in self.system.by_id:
            return self._add(
                Step(
                    "axiom",
                    axiom_id=axiom_id,
                    subst=tuple(sorted(sigma.items())),
                    direction=direction,
                )
            )
        idx = self._derive(axiom_id)
        idx = self.subst(idx, sigma)
        if direction == "rl":
            idx = self.sym(idx)
        return idx

    def _derive(self, axiom_id: str) -> int:
        got = self._derived.get(axiom_id)
        if got is not None:
            return got
        idx = self.derive(self, axiom_id) if self.derive is not None else None
        if idx is None:
            raise ProofError(
                f"axiom {axiom_id!r} is neither in {self.system.name} nor derivable here"
            )
        self._derived[axiom_id] = idx
        return idx

    def embed(self, host: Term, path: tuple, idx: int) -> int:
        """From a proof of l = r with host@path being l, conclude
        host = host[path -> r] through congruence steps."""
        l, _r = self.conclusions[idx]
        if subterm_at(host, path) is not l:
            raise ProofError("embed: the equation's left side is not at the path")
        cur = idx
        for k in range(len(path) - 1, -1, -1):
            parent = subterm_at(host, path[:k])
            i = path[k]
            if isinstance(parent, Prefix):
                cur = self._add(Step("cong_prefix", of=(cur,), action=parent.action))
            elif isinstance(parent, Sum):
                sib = self.refl(parent.right if i == 0 else parent.left)
                of = (cur, sib) if i == 0 else (sib, cur)
                cur = self._add(Step("cong_sum", of=of))
            elif isinstance(parent, Par):
                sib = self.refl(parent.right if i == 0 else parent.left)
                of = (cur, sib) if i == 0 else (sib, cur)
                cur = self._add(Step("cong_par", of=of))
            else:
                raise ProofError("embed: path walks through a leaf")
        return cur

    def rewrite(self, host: Term, path: tuple, axiom_id: str, sigma: dict, direction: str = "lr") -> tuple:
        """Apply one axiom instance at a position. Returns (new term, index of
        the step proving host = new term)."""
        if axiom_id in self.system.by_id:
            step = Step(
                "axiom",
                axiom_id=axiom_id,
                subst=tuple(sorted(sigma.items())),
                direction=direction,
                host=host,
                path=tuple(path),
            )
            idx = self._add(step)
            return self.conclusions[idx][1], idx
        base = self.axiom(axiom_id, sigma, direction)
        idx = self.embed(host, tuple(path), base)
        return self.conclusions[idx][1], idx

    def rewrite_with(self, host: Term, path: tuple, idx: int, direction: str = "lr") -> tuple:
        """Apply an already proven equation at a position."""
        if direction == "rl":
            idx = self.sym(idx)
        idx2 = self.embed(host, tuple(path), idx)
        return self.conclusions[idx2][1], idx2

    def ac(self, t: Term, u: Term) -> int:
        """Prove t = u using only A0-A3, at any positions."""
        if t is u:
            return self.refl(t)
        if canon(t) is not canon(u):
            raise AcMismatch(f"{render(t)} and {render(u)} differ beyond the choice laws")
        chain = []
        cur = t
        for axid, pairs, path, direction in _plan_to_canon(t).ops:
            cur, idx = self.rewrite(cur, path, axid, dict(pairs), direction)
            chain.append(idx)
        back = _plan_to_canon(u).ops
        for axid, pairs, path, direction in reversed(back):
            flipped = "rl" if direction == "lr" else "lr"
            cur, idx = self.rewrite(cur, path, axid, dict(pairs), flipped)
            chain.append(idx)
        if cur is not u:
            raise AssertionError("ac replay did not land on the target")
        if not chain:
            return self.refl(t)
        return self.trans(chain)

    def script(self, lhs: Term, rhs: Term, final_idx: int) -> ProofScript:
        l, r = self.conclusions[final_idx]
        if l is not lhs or r is not rhs:
            raise ProofError("script goal does not match the final conclusion")
        return ProofScript(lhs, rhs, tuple(self.steps))


class TermTrace:
    """A term being rewritten, with an optional running proof that the
    original equals the current form. With no builder attached the same
    rewrite API just applies the rewrites, which keeps one code path for
    plain and proof-emitting callers."""

    def __init__(self, start: Term, builder: ProofBuilder | None):
        self.start = start
        self.term = start
        self.builder = builder
        self._chain: list = []

    def rewrite(self, path, axiom_id, sigma, direction="lr"):
        if self.builder is not None:
            new, idx = self.builder.rewrite(self.term, path, axiom_id, sigma, direction)
            self._chain.append(idx)
            self.term = new
            return
        sys_eq = None
        if axiom_id in _A_SHAPES:
            sys_eq = _A_SHAPES[axiom_id]
        else:
            raise ProofError(
                "plain rewriting only knows the choice laws; use ac/set_term"
            )
        lhs, rhs = sys_eq
        src, dst = substitute(lhs, sigma), substitute(rhs, sigma)
        if direction == "rl":
            src, dst = dst, src
        if subterm_at(self.term, tuple(path)) is not src:
            raise ProofError("rewrite does not match")
        self.term = replace_at(self.term, tuple(path), dst)

    def rewrite_axiom(self, path, equation: Equation, sigma, direction="lr"):
        """Apply a concrete equation at a position, proof-free path included."""
        if self.builder is not None:
            new, idx = self.builder.rewrite(self.term, path, equation.id, sigma, direction)
            self._chain.append(idx)
            self.term = new
            return
        src, dst = substitute(equation.lhs, sigma), substitute(equation.rhs, sigma)
        if direction == "rl":
            src, dst = dst, src
        if subterm_at(self.term, tuple(path)) is not src:
            raise ProofError(
                f"{equation.id} does not match at {list(path)}: "
                f"have {render(subterm_at(self.term, tuple(path)))}, want {render(src)}"
            )
        self.term = replace_at(self.term, tuple(path), dst)

    def ac_to(self, target: Term):
        if self.term is target:
            return
        if self.builder is not None:
            idx = self.builder.ac(self.term, target)
            self._chain.append(idx)
        else:
            if canon(self.term) is not canon(target):
                raise AcMismatch(
                    f"{render(self.term)} vs {render(target)}: not equal under choice laws"
                )
        self.term = target

    def splice(self, path, other: "TermTrace"):
        """Replace the subterm at path, known to be other.start, by
        other.term, absorbing other's proof chain."""
        if subterm_at(self.term, tuple(path)) is not other.start:
            raise ProofError("splice target mismatch")
        if self.builder is not None:
            if other._chain:
                sub_idx = self.builder.trans(other._chain)
                new, idx = self.builder.rewrite_with(self.term, tuple(path), sub_idx)
                self._chain.append(idx)
                self.term = new
                return
        self.term = replace_at(self.term, tuple(path), other.term)

    def proof_index(self):
        if self.builder is None or not self._chain:
            return None
        return self.builder.trans(self._chain)


# ---------------------------------------------------------------------------
# JSON round-tripping


def _step_to_json(step: Step) -> dict:
    d: dict = {"rule": step.rule}
    if step.term is not None:
        d["term"] = render(step.term)
    if step.of:
        d["of"] = list(step.of)
    if step.subst:
        d["subst"] = {n: render(t) for n, t in step.subst}
    if step.action is not None:
        d["action"] = step.action
    if step.axiom_id is not None:
        d["axiom"] = step.axiom_id
        d["dir"] = step.direction
    if step.host is not None:
        d["host"] = render(step.host)
        d["path"] = list(step.path)
    return d


def _step_from_json(d: dict, alphabet) -> Step:
    return Step(
        rule=d["rule"],
        term=parse(d["term"], alphabet) if "term" in d else None,
        of=tuple(d.get("of", ())),
        subst=tuple(sorted((n, parse(s, alphabet)) for n, s in d.get("subst", {}).items())),
        action=d.get("action"),
        axiom_id=d.get("axiom"),
        direction=d.get("dir", "lr"),
        host=parse(d["host"], alphabet) if "host" in d else None,
        path=tuple(d["path"]) if "path" in d else None,
    )


def script_to_json(script: ProofScript, system_name: str | None = None) -> dict:
    d = {
        "goal": {"lhs": render(script.lhs), "rhs": render(script.rhs)},
        "steps": [_step_to_json(s) for s in script.steps],
    }
    if system_name:
        d["system"] = system_name
    return d


def script_from_json(d: dict, alphabet) -> ProofScript:
    return ProofScript(
        lhs=parse(d["goal"]["lhs"], alphabet),
        rhs=parse(d["goal"]["rhs"], alphabet),
        steps=tuple(_step_from_json(s, alphabet) for s in d["steps"]),
    )
