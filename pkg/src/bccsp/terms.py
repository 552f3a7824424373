"""Term syntax for finite processes: 0, variables, action prefix, choice, parallel.

Terms are immutable and hash-consed. Building the same shape twice yields the
same object, so syntactic equality is identity and terms can be used as dict
keys at no cost. Per-node analysis results (metrics, free variables, rendered
text, transition sets) are cached on the node itself and die with it.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

__all__ = [
    "Term",
    "Nil",
    "Var",
    "Prefix",
    "Sum",
    "Par",
    "Alphabet",
    "make_alphabet",
    "ParseError",
    "parse",
    "render",
    "size",
    "depth",
    "norm",
    "free_vars",
    "actions_of",
    "substitute",
    "summands",
    "sum_of",
    "is_nil_term",
    "strip_nil",
    "subterm_at",
    "replace_at",
    "vars_at_distance",
    "all_terms",
]

_pool: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()


class Term:
    """Base class. Do not instantiate directly."""

    __slots__ = ("__weakref__", "_cache")

    def cache(self) -> dict:
        c = self._cache
        if c is None:
            c = {}
            object.__setattr__(self, "_cache", c)
        return c

    def __repr__(self) -> str:
        return render(self)

    # Identity equality and hash, inherited from object: hash-consing makes
    # structural equality coincide with identity.


def _intern(cls, key, init):
    t = _pool.get(key)
    if t is not None:
        return t
    t = object.__new__(cls)
    object.__setattr__(t, "_cache", None)
    init(t)
    # setdefault keeps the first instance if two threads race here
    return _pool.setdefault(key, t)


class Nil(Term):
    """The deadlocked process 0."""

    __slots__ = ()

    def __new__(cls):
        return _intern(cls, ("0",), lambda t: None)


class Var(Term):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        if not name or not isinstance(name, str):
            raise ValueError("variable name must be a non-empty string")

        def init(t):
            object.__setattr__(t, "name", name)

        return _intern(cls, ("v", name), init)


class Prefix(Term):
    __slots__ = ("action", "body")

    def __new__(cls, action: str, body: Term):
        if not action or not isinstance(action, str):
            raise ValueError("action must be a non-empty string")
        if not isinstance(body, Term):
            raise TypeError("prefix body must be a Term")

        def init(t):
            object.__setattr__(t, "action", action)
            object.__setattr__(t, "body", body)

        return _intern(cls, ("p", action, body), init)


class Sum(Term):
    __slots__ = ("left", "right")

    def __new__(cls, left: Term, right: Term):
        if not isinstance(left, Term) or not isinstance(right, Term):
            raise TypeError("sum arguments must be Terms")

        def init(t):
            object.__setattr__(t, "left", left)
            object.__setattr__(t, "right", right)

        return _intern(cls, ("+", left, right), init)


class Par(Term):
    __slots__ = ("left", "right")

    def __new__(cls, left: Term, right: Term):
        if not isinstance(left, Term) or not isinstance(right, Term):
            raise TypeError("par arguments must be Terms")

        def init(t):
            object.__setattr__(t, "left", left)
            object.__setattr__(t, "right", right)

        return _intern(cls, ("|", left, right), init)


# ---------------------------------------------------------------------------
# Alphabets


@dataclass(frozen=True)
class Alphabet:
    """A finite, non-empty action set.

    In sync mode the set is closed under a complementation bijection and a
    distinguished silent action (outside the set proper) is available for
    communication results.
    """

    actions: tuple[str, ...]
    sync_mode: bool = False
    complements: tuple[tuple[str, str], ...] = ()
    tau: str | None = None

    def __post_init__(self):
        if not self.actions:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("alphabet has duplicate actions")
        if self.sync_mode:
            if self.tau is None:
                raise ValueError("sync alphabet needs a silent action name")
            if self.tau in self.actions:
                raise ValueError("the silent action cannot be an alphabet member")
            comp = dict(self.complements)
            if set(comp) != set(self.actions):
                raise ValueError("complement map must cover the whole alphabet")
            for a, b in comp.items():
                if a == b:
                    raise ValueError("an action cannot be its own complement")
                if comp.get(b) != a:
                    raise ValueError("complement map must be an involution")
        else:
            if self.complements or self.tau is not None:
                raise ValueError("complements and tau require sync mode")

    def complement(self, a: str) -> str:
        for x, y in self.complements:
            if x == a:
                return y
        raise KeyError(a)

    def transition_labels(self) -> tuple[str, ...]:
        """All labels a transition can carry: the actions, plus tau in sync mode."""
        if self.sync_mode:
            return self.actions + (self.tau,)
        return self.actions

    def has_action(self, a: str) -> bool:
        return a in self.actions or (self.sync_mode and a == self.tau)


def make_alphabet(names, sync: bool = False) -> Alphabet:
    """Build an alphabet from base action names.

    Plain mode: the actions are the names as given. Sync mode: every base name
    n contributes the pair n, n' with each the complement of the other, and
    "tau" is the silent action.
    """
    names = tuple(names)
    if sync:
        actions = []
        comp = []
        for n in names:
            if n.endswith("'"):
                raise ValueError("base names must not carry a complement mark")
            if n == "tau":
                raise ValueError("'tau' is reserved for the silent action")
            actions.extend((n, n + "'"))
            comp.extend(((n, n + "'"), (n + "'", n)))
        return Alphabet(tuple(actions), True, tuple(comp), "tau")
    return Alphabet(names)


# ---------------------------------------------------------------------------
# Parsing

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.pos = 0

    def error(self, message: str):
        raise ParseError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s: str) -> bool:
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def ident(self) -> str:
        start = self.pos
        if self.peek() not in _IDENT_START:
            self.error("expected an identifier")
        while self.peek() in _IDENT_CONT:
            self.pos += 1
        while self.peek() == "'":
            self.pos += 1
        return self.text[start : self.pos]

    def parse_sum(self) -> Term:
        t = self.parse_par()
        while True:
            self.skip_ws()
            if self.eat("+"):
                self.skip_ws()
                t = Sum(t, self.parse_par())
            else:
                return t

    def parse_par(self) -> Term:
        t = self.parse_item()
        while True:
            self.skip_ws()
            if self.eat("||"):
                self.skip_ws()
                t = Par(t, self.parse_item())
            elif self.peek() == "|":
                self.error("parallel composition is written '||'")
            else:
                return t

    def parse_item(self) -> Term:
        self.skip_ws()
        c = self.peek()
        if c == "0":
            self.pos += 1
            return Nil()
        if c == "(":
            self.pos += 1
            t = self.parse_sum()
            self.skip_ws()
            if not self.eat(")"):
                self.error("expected ')'")
            return t
        if c in _IDENT_START:
            at = self.pos
            name = self.ident()
            if name == self.alphabet.tau and self.alphabet.sync_mode:
                pass  # silent action, handled as an action below
            elif name == "tau" and not self.alphabet.sync_mode:
                self.pos = at
                self.error("'tau' is only an action in sync mode")
            if self.alphabet.has_action(name):
                if self.eat("."):
                    return Prefix(name, self.parse_item())
                return Prefix(name, Nil())  # bare action shorthand
            if self.peek() == ".":
                self.pos = at
                self.error(f"unknown action {name!r}")
            if "'" in name:
                self.pos = at
                self.error(f"unknown action {name!r}")
            return Var(name)
        self.error("expected a term")


def parse(text: str, alphabet: Alphabet) -> Term:
    p = _Parser(text, alphabet)
    p.skip_ws()
    t = p.parse_sum()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing input")
    return t


# ---------------------------------------------------------------------------
# Rendering

# precedence: prefix body needs parens around + and ||; || needs parens
# around +; + never needs parens


def render(t: Term) -> str:
    c = t.cache()
    r = c.get("render")
    if r is None:
        r = _render(t)
        c["render"] = r
    return r


def _render(t: Term) -> str:
    if isinstance(t, Nil):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Prefix):
        body = render(t.body)
        if isinstance(t.body, (Sum, Par)):
            body = f"({body})"
        return f"{t.action}.{body}"
    if isinstance(t, Sum):
        left = render(t.left)
        right = render(t.right)
        if isinstance(t.right, Sum):
            right = f"({right})"
        return f"{left} + {right}"
    if isinstance(t, Par):
        left = render(t.left)
        right = render(t.right)
        if isinstance(t.left, Sum):
            left = f"({left})"
        if isinstance(t.right, (Sum, Par)):
            right = f"({right})"
        return f"{left} || {right}"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Metrics


def _metrics(t: Term) -> tuple[int, int, int]:
    """(size, depth, norm) computed once per node."""
    c = t.cache()
    m = c.get("metrics")
    if m is None:
        if isinstance(t, (Nil, Var)):
            m = (1, 0, 0)
        elif isinstance(t, Prefix):
            s, d, n = _metrics(t.body)
            m = (s + 1, d + 1, n + 1)
        elif isinstance(t, Sum):
            ls, ld, ln = _metrics(t.left)
            rs, rd, rn = _metrics(t.right)
            m = (ls + rs + 1, max(ld, rd), min(ln, rn))
        else:
            ls, ld, rn_ = _metrics(t.left)
            rs, rd, nn = _metrics(t.right)
            m = (ls + rs + 1, ld + rd, rn_ + nn)
        c["metrics"] = m
    return m


def size(t: Term) -> int:
    """Number of operator occurrences, counting 0 and variables."""
    return _metrics(t)[0]


def depth(t: Term) -> int:
    """Length of a longest action sequence the term can perform."""
    return _metrics(t)[1]


def norm(t: Term) -> int:
    """Length of a shortest complete action sequence."""
    return _metrics(t)[2]


def free_vars(t: Term) -> frozenset:
    c = t.cache()
    fv = c.get("fv")
    if fv is None:
        if isinstance(t, Var):
            fv = frozenset((t.name,))
        elif isinstance(t, Nil):
            fv = frozenset()
        elif isinstance(t, Prefix):
            fv = free_vars(t.body)
        else:
            fv = free_vars(t.left) | free_vars(t.right)
        c["fv"] = fv
    return fv


def actions_of(t: Term) -> frozenset:
    """All action names occurring in prefixes of t."""
    c = t.cache()
    acts = c.get("acts")
    if acts is None:
        if isinstance(t, (Nil, Var)):
            acts = frozenset()
        elif isinstance(t, Prefix):
            acts = actions_of(t.body) | {t.action}
        else:
            acts = actions_of(t.left) | actions_of(t.right)
        c["acts"] = acts
    return acts


# ---------------------------------------------------------------------------
# Substitution


def substitute(t: Term, mapping: dict) -> Term:
    """Simultaneously replace variables by terms. Keys are variable names."""
    if not mapping:
        return t
    keys = frozenset(mapping)
    memo = {}

    def go(u: Term) -> Term:
        if not (free_vars(u) & keys):
            return u
        r = memo.get(u)
        if r is not None:
            return r
        if isinstance(u, Var):
            r = mapping[u.name]
            if not isinstance(r, Term):
                raise TypeError("substitution values must be Terms")
        elif isinstance(u, Prefix):
            r = Prefix(u.action, go(u.body))
        elif isinstance(u, Sum):
            r = Sum(go(u.left), go(u.right))
        else:
            r = Par(go(u.left), go(u.right))
        memo[u] = r
        return r

    return go(t)


# ---------------------------------------------------------------------------
# Sum-of-summands views


def summands(t: Term) -> list:
    """The summand list of t, read modulo associativity and commutativity of
    + with syntactic 0 summands dropped.

    Nested sums are flattened, leaves sorted by their rendered text, and
    duplicates kept. No returned term has Sum at the head. The list is empty
    exactly when t is a 0, or a sum tree all of whose leaves are 0.
    """
    leaves = []

    def walk(u):
        if isinstance(u, Sum):
            walk(u.left)
            walk(u.right)
        elif not isinstance(u, Nil):
            leaves.append(u)

    walk(t)
    leaves.sort(key=render)
    return leaves


def sum_of(ts) -> Term:
    """Left-associated sum of the given terms; 0 for the empty list."""
    ts = list(ts)
    if not ts:
        return Nil()
    acc = ts[0]
    for u in ts[1:]:
        acc = Sum(acc, u)
    return acc


# ---------------------------------------------------------------------------
# 0 factors and summands


def is_nil_term(t: Term) -> bool:
    """True for terms built from 0 with + and || only (no prefix, no variable).

    These are exactly the terms with no transitions and no variables, and they
    are all equal to 0 in every semantics considered here.
    """
    if isinstance(t, Nil):
        return True
    if isinstance(t, (Sum, Par)):
        return is_nil_term(t.left) and is_nil_term(t.right)
    return False


def strip_nil(t: Term) -> Term:
    """Remove redundant 0 summands and 0 factors, recursively.

    The result has no subterm u + v or u || v with u or v a pure 0 term,
    unless the whole term collapses to 0. Prefix bodies are rewritten too.
    """
    c = t.cache()
    r = c.get("strip")
    if r is None:
        if isinstance(t, (Nil, Var)):
            r = t
        elif isinstance(t, Prefix):
            r = Prefix(t.action, strip_nil(t.body))
        elif isinstance(t, Sum):
            if is_nil_term(t.left):
                r = strip_nil(t.right)
            elif is_nil_term(t.right):
                r = strip_nil(t.left)
            else:
                r = Sum(strip_nil(t.left), strip_nil(t.right))
        else:
            if is_nil_term(t.left):
                r = strip_nil(t.right)
            elif is_nil_term(t.right):
                r = strip_nil(t.left)
            else:
                r = Par(strip_nil(t.left), strip_nil(t.right))
        c["strip"] = r
    return r


# ---------------------------------------------------------------------------
# Positions


def subterm_at(t: Term, path) -> Term:
    """The subterm at a root-relative path of child indices.

    Prefix has one child (index 0, the body); Sum and Par have children 0
    and 1.
    """
    for i in path:
        if isinstance(t, Prefix):
            if i != 0:
                raise IndexError(f"prefix has only child 0, got {i}")
            t = t.body
        elif isinstance(t, (Sum, Par)):
            if i == 0:
                t = t.left
            elif i == 1:
                t = t.right
            else:
                raise IndexError(f"binary node has children 0 and 1, got {i}")
        else:
            raise IndexError("path descends below a leaf")
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Prefix):
        if i != 0:
            raise IndexError(f"prefix has only child 0, got {i}")
        return Prefix(t.action, replace_at(t.body, rest, new))
    if isinstance(t, Sum):
        if i == 0:
            return Sum(replace_at(t.left, rest, new), t.right)
        if i == 1:
            return Sum(t.left, replace_at(t.right, rest, new))
    if isinstance(t, Par):
        if i == 0:
            return Par(replace_at(t.left, rest, new), t.right)
        if i == 1:
            return Par(t.left, replace_at(t.right, rest, new))
    raise IndexError("path does not address a position in the term")


def vars_at_distance(t: Term, k: int, alphabet=None, mode=None) -> frozenset:
    """Variables occurring in some derivative reachable in exactly k steps."""
    from . import semantics

    if mode is None:
        mode = semantics.TransitionMode.INTERLEAVING
    frontier = {t}
    for _ in range(k):
        step = set()
        for u in frontier:
            for _a, v in semantics.transitions(u, mode=mode, alphabet=alphabet):
                step.add(v)
        frontier = step
        if not frontier:
            break
    out = frozenset()
    for u in frontier:
        out |= free_vars(u)
    return out


def all_terms(alphabet, max_size: int, variables=()) -> tuple:
    """Every term of size at most max_size over the alphabet's transition
    labels and the given variable names, ordered by size then rendering.

    Size counts every operator occurrence including 0, so the smallest terms
    have size 1. Interning guarantees the result has no structural repeats.
    """
    labels = alphabet.transition_labels() if alphabet.sync_mode else alphabet.actions
    by_size: list = [[] for _ in range(max_size + 1)]
    if max_size >= 1:
        by_size[1].append(Nil())
        by_size[1].extend(Var(v) for v in variables)
    for s in range(2, max_size + 1):
        layer = by_size[s]
        for body in by_size[s - 1]:
            layer.extend(Prefix(a, body) for a in labels)
        for ls in range(1, s - 1):
            for left in by_size[ls]:
                for right in by_size[s - 1 - ls]:
                    layer.append(Sum(left, right))
                    layer.append(Par(left, right))
    out = []
    for s in range(1, max_size + 1):
        out.extend(sorted(by_size[s], key=render))
    return tuple(out)
