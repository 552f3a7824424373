"""Finite algebras over the term signature.

A finite model interprets 0, the unary action prefixes, + and || as tables
over a carrier {0..n-1}. Equations are checked by brute quantification over
valuations, which is what makes the models usable as independence proofs: a
model satisfying every axiom of a system while refuting a goal equation shows
the goal is not derivable from the system.

`search_model` looks for such a model by backtracking over table cells in
three layers: the + cells, then the prefix cells, then the || cells. On
entering a layer, the equations whose deepest operator lives there are ground
over all valuations and partially evaluated against the tables already fixed;
identical residual constraints are merged, which collapses the n^k raw
instances of the wide schemas into a few hundred distinct constraints. Within
a layer the constraints are watched: each suspends on the first unassigned
cell its evaluation needs and is re-run when that cell is filled. A constraint
whose one side is a single free cell and whose other side has become a value
forces that cell, so the expansion laws propagate most of the || table instead
of leaving it to enumeration. Symmetry is broken by fixing the zero element
and introducing carrier elements in first-use order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources

from .axioms import Equation
from .terms import Nil, Par, Prefix, Sum, Term, Var, free_vars, render

__all__ = [
    "FiniteModel",
    "SearchResult",
    "fixture_model",
    "independence_report",
    "search_model",
]


@dataclass(frozen=True)
class FiniteModel:
    """Operation tables over the carrier {0..carrier-1}. Well-formedness is
    validated here; whether any algebraic law holds is always checked, never
    assumed."""

    carrier: int
    zero: int
    prefix: dict
    plus: tuple
    par: tuple

    def __post_init__(self):
        n = self.carrier
        if n <= 0:
            raise ValueError("carrier must be positive")
        if not 0 <= self.zero < n:
            raise ValueError("zero element out of range")
        object.__setattr__(self, "prefix", {a: tuple(t) for a, t in self.prefix.items()})
        object.__setattr__(self, "plus", tuple(tuple(r) for r in self.plus))
        object.__setattr__(self, "par", tuple(tuple(r) for r in self.par))
        for a, t in self.prefix.items():
            if len(t) != n or any(not 0 <= v < n for v in t):
                raise ValueError(f"bad prefix table for {a!r}")
        for name, tab in (("plus", self.plus), ("par", self.par)):
            if len(tab) != n or any(
                len(row) != n or any(not 0 <= v < n for v in row) for row in tab
            ):
                raise ValueError(f"bad {name} table")

    def eval(self, t: Term, valuation: dict) -> int:
        """Homomorphic evaluation of a term under a variable valuation."""
        if isinstance(t, Nil):
            return self.zero
        if isinstance(t, Var):
            try:
                return valuation[t.name]
            except KeyError:
                raise ValueError(f"valuation misses variable {t.name}") from None
        if isinstance(t, Prefix):
            try:
                row = self.prefix[t.action]
            except KeyError:
                raise ValueError(f"model has no table for action {t.action!r}") from None
            return row[self.eval(t.body, valuation)]
        if isinstance(t, Sum):
            return self.plus[self.eval(t.left, valuation)][self.eval(t.right, valuation)]
        return self.par[self.eval(t.left, valuation)][self.eval(t.right, valuation)]

    def holds(self, eq: Equation) -> bool:
        """Whether the equation holds under every valuation."""
        return self.counter_valuation(eq) is None

    def counter_valuation(self, eq: Equation):
        """The first valuation, in lexicographic order over the sorted
        variables, where the two sides evaluate differently. None if the
        equation holds."""
        names = eq.vars
        prog = _compile_pair(eq, names)
        for values in itertools.product(range(self.carrier), repeat=len(names)):
            l, r = _run_total(prog, values, self)
            if l != r:
                return dict(zip(names, values))
        return None

    def to_json(self) -> dict:
        return {
            "carrier": self.carrier,
            "zero": self.zero,
            "prefix": {a: list(t) for a, t in sorted(self.prefix.items())},
            "plus": [list(r) for r in self.plus],
            "par": [list(r) for r in self.par],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteModel":
        return cls(
            carrier=data["carrier"],
            zero=data["zero"],
            prefix=data["prefix"],
            plus=data["plus"],
            par=data["par"],
        )


def fixture_model(name: str) -> FiniteModel:
    """A model shipped with the package, by file stem (e.g. "table6")."""
    path = resources.files(__package__) / "data" / f"{name}.json"
    return FiniteModel.from_json(json.loads(path.read_text()))


# ---------------------------------------------------------------------------
# Compiled equation programs
#
# An equation becomes one postfix program computing both sides; running it
# leaves the two values on the stack. Opcodes: (0, var position), (1,) zero,
# (2, action), (3,) plus, (4,) par.


def _compile_term(t: Term, pos: dict, out: list):
    if isinstance(t, Nil):
        out.append((1,))
    elif isinstance(t, Var):
        out.append((0, pos[t.name]))
    elif isinstance(t, Prefix):
        _compile_term(t.body, pos, out)
        out.append((2, t.action))
    elif isinstance(t, Sum):
        _compile_term(t.left, pos, out)
        _compile_term(t.right, pos, out)
        out.append((3,))
    else:
        _compile_term(t.left, pos, out)
        _compile_term(t.right, pos, out)
        out.append((4,))


def _compile_pair(eq: Equation, names) -> tuple:
    pos = {n: i for i, n in enumerate(names)}
    out: list = []
    _compile_term(eq.lhs, pos, out)
    _compile_term(eq.rhs, pos, out)
    return tuple(out)


def _run_total(prog, values, m: FiniteModel):
    stack: list = []
    push = stack.append
    for op in prog:
        tag = op[0]
        if tag == 0:
            push(values[op[1]])
        elif tag == 1:
            push(m.zero)
        elif tag == 2:
            stack[-1] = m.prefix[op[1]][stack[-1]]
        elif tag == 3:
            y = stack.pop()
            stack[-1] = m.plus[stack[-1]][y]
        else:
            y = stack.pop()
            stack[-1] = m.par[stack[-1]][y]
    return stack[0], stack[1]


# ---------------------------------------------------------------------------
# Reports


def independence_report(m: FiniteModel, system, goal: Equation) -> dict:
    """Exhaustively check every equation of the system against the model and
    the goal against the model. The interesting outcome is all_axioms_hold
    with refuted goal: the goal is then underivable from the system."""
    axioms = []
    failures = []
    for eq in system:
        cv = m.counter_valuation(eq)
        axioms.append(
            {
                "id": eq.id,
                "valuations": m.carrier ** len(eq.vars),
                "holds": cv is None,
            }
        )
        if cv is not None:
            failures.append({"id": eq.id, "valuation": cv})
    gv = m.counter_valuation(goal)
    goal_entry = {
        "id": goal.id,
        "lhs": render(goal.lhs),
        "rhs": render(goal.rhs),
        "refuted": gv is not None,
    }
    if gv is not None:
        goal_entry["counter_valuation"] = gv
        goal_entry["lhs_value"] = m.eval(goal.lhs, gv)
        goal_entry["rhs_value"] = m.eval(goal.rhs, gv)
    name = getattr(system, "name", None)
    return {
        "carrier": m.carrier,
        "system": name if name is not None else f"{len(axioms)} equations",
        "all_axioms_hold": not failures,
        "axiom_failures": failures,
        "axioms": axioms,
        "goal": goal_entry,
        "independent": not failures and gv is not None,
    }


# ---------------------------------------------------------------------------
# Search


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "none" | "budget"
    model: FiniteModel | None
    nodes: int
    carrier: int | None = None

    def __bool__(self) -> bool:
        return self.status == "found"


class _Budget(Exception):
    pass


def _structural_laws(equations) -> tuple:
    """Split off the unit, commutativity and idempotence laws that the search
    builds into the tables instead of checking instance by instance."""
    flags = {
        "plus_unit": False,
        "plus_comm": False,
        "plus_idem": False,
        "par_unit": False,
        "par_comm": False,
    }
    kept = []
    for eq in equations:
        got = None
        for u, v in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
            if isinstance(u, Sum) and isinstance(u.left, Var):
                if isinstance(u.right, Nil) and v is u.left:
                    got = "plus_unit"
                elif u.right is u.left and v is u.left:
                    got = "plus_idem"
                elif (
                    isinstance(u.right, Var)
                    and u.right is not u.left
                    and isinstance(v, Sum)
                    and v.left is u.right
                    and v.right is u.left
                ):
                    got = "plus_comm"
            elif isinstance(u, Par) and isinstance(u.left, Var):
                if isinstance(u.right, Nil) and v is u.left:
                    got = "par_unit"
                elif (
                    isinstance(u.right, Var)
                    and u.right is not u.left
                    and isinstance(v, Par)
                    and v.left is u.right
                    and v.right is u.left
                ):
                    got = "par_comm"
            if got:
                break
        if got:
            flags[got] = True
        else:
            kept.append(eq)
    return flags, kept


def _contains_op(t: Term, cls) -> bool:
    if isinstance(t, cls):
        return True
    if isinstance(t, Prefix):
        return _contains_op(t.body, cls)
    if isinstance(t, (Sum, Par)):
        return _contains_op(t.left, cls) or _contains_op(t.right, cls)
    return False


_LAYER_OPS = (Sum, Prefix, Par)


def _equation_layer(eq: Equation) -> int:
    """Index of the deepest table an equation reads: 0 for +, 1 for the
    prefixes, 2 for ||. The search fills tables in that order, so an equation
    becomes ground exactly when its layer is entered."""
    for layer in (2, 1):
        cls = _LAYER_OPS[layer]
        if _contains_op(eq.lhs, cls) or _contains_op(eq.rhs, cls):
            return layer
    return 0


def _split_term(t: Term, cls, atoms: list, index: dict):
    """Split a term into maximal subterms free of the layer operator (the
    atoms, which evaluate to carrier values before the layer is entered) and
    the operator structure above them. Structure nodes mirror the program
    opcodes: (0, atom), (2, action, sub), (3, l, r) for +, (4, l, r) for ||."""
    if not _contains_op(t, cls):
        k = index.get(t)
        if k is None:
            k = len(atoms)
            index[t] = k
            atoms.append(t)
        return (0, k)
    if isinstance(t, Prefix):
        return (2, t.action, _split_term(t.body, cls, atoms, index))
    l = _split_term(t.left, cls, atoms, index)
    r = _split_term(t.right, cls, atoms, index)
    return (3 if isinstance(t, Sum) else 4, l, r)


def _struct_prog(s, out: list):
    """Flatten a structure tree to postfix so folding it is a loop."""
    tag = s[0]
    if tag == 0:
        out.append((0, s[1]))
    elif tag == 2:
        _struct_prog(s[2], out)
        out.append((2, s[1]))
    else:
        _struct_prog(s[1], out)
        _struct_prog(s[2], out)
        out.append((tag,))


class _EqPlan:
    """Grounding plan for one equation: programs for its atoms, the structure
    trees of both sides, and the variables grouped into blocks that share no
    atom, so each block is enumerated once instead of jointly."""

    __slots__ = (
        "vars",
        "atom_terms",
        "atom_progs",
        "lhs_prog",
        "rhs_prog",
        "skey",
        "comps",
        "is_goal",
    )

    def __init__(self, eq: Equation, layer: int, is_goal: bool):
        self.vars = eq.vars
        self.is_goal = is_goal
        pos = {name: i for i, name in enumerate(self.vars)}
        atoms: list = []
        index: dict = {}
        cls = _LAYER_OPS[layer]
        lhs_struct = _split_term(eq.lhs, cls, atoms, index)
        rhs_struct = _split_term(eq.rhs, cls, atoms, index)
        self.skey = (lhs_struct, rhs_struct)
        side: list = []
        _struct_prog(lhs_struct, side)
        self.lhs_prog = tuple(side)
        side = []
        _struct_prog(rhs_struct, side)
        self.rhs_prog = tuple(side)
        self.atom_terms = atoms
        self.atom_progs = []
        atom_vars = []
        for t in atoms:
            prog: list = []
            _compile_term(t, pos, prog)
            self.atom_progs.append(tuple(prog))
            atom_vars.append(sorted(pos[v] for v in free_vars(t)))

        parent = list(range(len(self.vars)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for vs in atom_vars:
            for other in vs[1:]:
                parent[find(other)] = find(vs[0])
        groups: dict = {}
        for k, vs in enumerate(atom_vars):
            root = find(vs[0]) if vs else -1
            groups.setdefault(root, []).append(k)
        self.comps = []
        for root in sorted(groups):
            if root < 0:
                positions: tuple = ()
            else:
                positions = tuple(
                    i for i in range(len(self.vars)) if find(i) == root
                )
            self.comps.append((positions, tuple(groups[root])))


class _Frame:
    """Residual constraints of one layer plus their watch state."""

    __slots__ = (
        "progL",
        "progR",
        "bareL",
        "bareR",
        "is_goal",
        "state",
        "watch",
        "watchlists",
        "watching",
        "violated",
        "static_violated",
    )

    def __init__(self):
        self.progL: list = []
        self.progR: list = []
        self.bareL: list = []
        self.bareR: list = []
        self.is_goal: list = []
        self.state: list = []
        self.watch: list = []
        self.watchlists: dict = {}
        self.watching = 0
        self.violated = 0
        self.static_violated = 0


class _LayeredSearch:
    """One carrier size worth of layered backtracking over table cells.

    Cells are assigned in layer order: free + cells, prefix cells, free ||
    cells. Entering a layer grounds that layer's equations against the tables
    already fixed and merges duplicate residual constraints; a constraint
    then waits on the first unassigned cell its evaluation hits. A constraint
    whose one side is a single free cell doubles as a propagator: when its
    other side completes, the cell is forced instead of enumerated.
    """

    WATCHING, HOLDS, VIOLATED = 0, 1, 2

    def __init__(self, n: int, actions, axioms, goal: Equation, flags: dict):
        self.n = n
        self.actions = tuple(actions)
        self.flags = flags

        self.plus_m = [[None] * n for _ in range(n)]
        self.par_m = [[None] * n for _ in range(n)]
        self.pre_m = {a: [None] * n for a in self.actions}
        if flags["plus_idem"]:
            for i in range(n):
                self.plus_m[i][i] = i
        if flags["plus_unit"]:
            for i in range(n):
                self.plus_m[i][0] = i
            if flags["plus_comm"]:
                for j in range(n):
                    self.plus_m[0][j] = j
        if flags["par_unit"]:
            for i in range(n):
                self.par_m[i][0] = i
            if flags["par_comm"]:
                for j in range(n):
                    self.par_m[0][j] = j

        cells = []
        self.layer_start = [0, 0, 0]
        self.cell_plus = [[-1] * n for _ in range(n)]
        self.cell_par = [[-1] * n for _ in range(n)]
        self.cell_pre = {a: [-1] * n for a in self.actions}
        for i in range(n):
            for j in range(i, n) if flags["plus_comm"] else range(n):
                if self.plus_m[i][j] is None:
                    idx = len(cells)
                    cells.append((3, i, j))
                    self.cell_plus[i][j] = idx
                    if flags["plus_comm"]:
                        self.cell_plus[j][i] = idx
        self.layer_start[1] = len(cells)
        for a in self.actions:
            for e in range(n):
                idx = len(cells)
                cells.append((2, a, e))
                self.cell_pre[a][e] = idx
        self.layer_start[2] = len(cells)
        for i in range(n):
            for j in range(i, n) if flags["par_comm"] else range(n):
                if self.par_m[i][j] is None:
                    idx = len(cells)
                    cells.append((4, i, j))
                    self.cell_par[i][j] = idx
                    if flags["par_comm"]:
                        self.cell_par[j][i] = idx
        self.cells = cells
        self.total_cells = len(cells)
        # Flat mirror of the open cells, so propagation reads skip the
        # table decode.
        self.val = [None] * len(cells)

        # Cumulative max element index mentioned by cell coordinates, for
        # first-use value ordering.
        self.static_max = []
        cur = 0
        for cell in cells:
            coords = (cell[2],) if cell[0] == 2 else (cell[1], cell[2])
            cur = max(cur, *coords)
            self.static_max.append(cur)

        self.layer_eqs: tuple = ([], [], [])
        for eq in axioms:
            layer = _equation_layer(eq)
            self.layer_eqs[layer].append(_EqPlan(eq, layer, False))
        self.goal_layer = _equation_layer(goal)
        self.layer_eqs[self.goal_layer].append(
            _EqPlan(goal, self.goal_layer, True)
        )
        skeys: dict = {}
        for plans in self.layer_eqs:
            # Narrow equations first: when a layer is contradictory, the
            # cheap ones usually expose it before the wide schemas are
            # ground at all.
            plans.sort(key=lambda p: len(p.vars))
            for plan in plans:
                plan.skey = skeys.setdefault(plan.skey, len(skeys))

        self.frames: list = []
        self.goal_frame = None
        self.next_layer = 0
        self.trail: list = []  # ([cells written], [(frame, ci, state, cell)], dyn)
        self.dyn_cur = 0
        self.nodes = 0
        self._slot_vecs: dict = {}

    # -- tables --------------------------------------------------------

    def _write(self, cell_idx: int, v):
        self.val[cell_idx] = v
        kind, x, y = self.cells[cell_idx]
        if kind == 2:
            self.pre_m[x][y] = v
        elif kind == 3:
            self.plus_m[x][y] = v
            if self.flags["plus_comm"]:
                self.plus_m[y][x] = v
        else:
            self.par_m[x][y] = v
            if self.flags["par_comm"]:
                self.par_m[y][x] = v

    # -- grounding -----------------------------------------------------

    def _eval_atom(self, prog, values) -> int:
        """Atoms only read tables of completed layers, so this never hits an
        unassigned cell."""
        stack: list = []
        push = stack.append
        for op in prog:
            tag = op[0]
            if tag == 0:
                push(values[op[1]])
            elif tag == 1:
                push(0)
            elif tag == 2:
                stack[-1] = self.pre_m[op[1]][stack[-1]]
            elif tag == 3:
                y = stack.pop()
                stack[-1] = self.plus_m[stack[-1]][y]
            else:
                y = stack.pop()
                stack[-1] = self.par_m[stack[-1]][y]
        return stack[0]

    def _slot_vec(self, k: int, slot: int):
        """Value of variable `slot` at each point of the k-dimensional
        valuation grid, flattened row-major."""
        got = self._slot_vecs.get((k, slot))
        if got is None:
            n = self.n
            stride = n ** (k - 1 - slot)
            got = [(i // stride) % n for i in range(n**k)]
            self._slot_vecs[(k, slot)] = got
        return got

    def _term_vec(self, t: Term, slots: dict, memo: dict):
        """Evaluate an atom over the whole valuation grid at once."""
        got = memo.get(t)
        if got is not None:
            return got
        if isinstance(t, Var):
            v = slots[t.name]
        elif isinstance(t, Nil):
            v = [0] * len(next(iter(slots.values())))
        elif isinstance(t, Prefix):
            row = self.pre_m[t.action]
            v = [row[x] for x in self._term_vec(t.body, slots, memo)]
        elif isinstance(t, Sum):
            pm = self.plus_m
            v = [
                pm[x][y]
                for x, y in zip(
                    self._term_vec(t.left, slots, memo),
                    self._term_vec(t.right, slots, memo),
                )
            ]
        else:
            qm = self.par_m
            v = [
                qm[x][y]
                for x, y in zip(
                    self._term_vec(t.left, slots, memo),
                    self._term_vec(t.right, slots, memo),
                )
            ]
        memo[t] = v
        return v

    def _fold(self, sprog, atom_vals, cons, cons_list) -> int:
        """Partially evaluate a postfix structure program. Carrier values come
        back as -(v+1); anything still touching a free cell becomes a
        hash-consed node id >= 0, so identical residues are shared and
        compared by id."""
        f = self.flags
        plus_idem = f["plus_idem"]
        plus_unit = f["plus_unit"]
        plus_comm = f["plus_comm"]
        par_unit = f["par_unit"]
        par_comm = f["par_comm"]
        pre_m, plus_m, par_m = self.pre_m, self.plus_m, self.par_m
        stack: list = []
        push = stack.append
        for op in sprog:
            tag = op[0]
            if tag == 0:
                push(-atom_vals[op[1]] - 1)
                continue
            if tag == 2:
                e = stack[-1]
                if e < 0:
                    v = pre_m[op[1]][-e - 1]
                    if v is not None:
                        stack[-1] = -v - 1
                        continue
                node = (2, op[1], e)
            elif tag == 3:
                r = stack.pop()
                l = stack[-1]
                if l < 0 and r < 0:
                    v = plus_m[-l - 1][-r - 1]
                    if v is not None:
                        stack[-1] = -v - 1
                        continue
                if plus_idem and l == r:
                    continue
                if plus_unit:
                    if r == -1:
                        continue
                    if l == -1 and plus_comm:
                        stack[-1] = r
                        continue
                if plus_comm and r < l:
                    l, r = r, l
                node = (3, l, r)
            else:
                r = stack.pop()
                l = stack[-1]
                if l < 0 and r < 0:
                    v = par_m[-l - 1][-r - 1]
                    if v is not None:
                        stack[-1] = -v - 1
                        continue
                if par_unit:
                    if r == -1:
                        continue
                    if l == -1 and par_comm:
                        stack[-1] = r
                        continue
                if par_comm and r < l:
                    l, r = r, l
                node = (4, l, r)
            got = cons.get(node)
            if got is None:
                cons[node] = got = len(cons_list)
                cons_list.append(node)
            stack[-1] = got
        return stack[0]

    def _emit(self, e: int, cons_list, out: list):
        if e < 0:
            out.append((5, -e - 1))
            return
        node = cons_list[e]
        if node[0] == 2:
            self._emit(node[2], cons_list, out)
            out.append((2, node[1]))
        else:
            self._emit(node[1], cons_list, out)
            self._emit(node[2], cons_list, out)
            out.append((node[0],))

    def _emit_prog(self, e: int, cons_list, progs: dict):
        got = progs.get(e)
        if got is None:
            out: list = []
            self._emit(e, cons_list, out)
            progs[e] = got = tuple(out)
        return got

    def _bare_cell(self, e: int, cons_list) -> int:
        """Cell index when the residue is exactly one free cell, else -1."""
        if e < 0:
            return -1
        node = cons_list[e]
        if node[0] == 2:
            if node[2] < 0:
                return self.cell_pre[node[1]][-node[2] - 1]
            return -1
        if node[1] < 0 and node[2] < 0:
            x, y = -node[1] - 1, -node[2] - 1
            table = self.cell_plus if node[0] == 3 else self.cell_par
            return table[x][y]
        return -1

    def _arm(self, frame, lid, rid, is_goal, cons_list, progs, queue) -> bool:
        """Store one residual constraint unless it is already decided.
        False means a statically violated axiom: the layer is contradictory."""
        ci = len(frame.progL)
        frame.progL.append(self._emit_prog(lid, cons_list, progs))
        frame.progR.append(self._emit_prog(rid, cons_list, progs))
        frame.bareL.append(self._bare_cell(lid, cons_list))
        frame.bareR.append(self._bare_cell(rid, cons_list))
        frame.is_goal.append(is_goal)
        frame.state.append(self.WATCHING)
        frame.watch.append(-1)
        st, wcell = self._eval_constraint(frame, ci, queue)
        if st == self.WATCHING:
            frame.watch[ci] = wcell
            lst = frame.watchlists.get(wcell)
            if lst is None:
                frame.watchlists[wcell] = [ci]
            else:
                lst.append(ci)
            if is_goal:
                frame.watching += 1
            return True
        for lst in (
            frame.progL,
            frame.progR,
            frame.bareL,
            frame.bareR,
            frame.is_goal,
            frame.state,
            frame.watch,
        ):
            lst.pop()
        if st == self.HOLDS:
            return True
        if is_goal:
            frame.static_violated += 1
            return True
        return False

    def _compile(self, layer: int):
        """Ground this layer's equations against the tables fixed so far,
        merge duplicate residual constraints, and run the initial round of
        forced assignments. None when the layer is already contradictory."""
        frame = _Frame()
        self.frames.append(frame)
        if layer == self.goal_layer:
            self.goal_frame = frame
        cons: dict = {}
        cons_list: list = []
        progs: dict = {}
        cache: dict = {}
        seen = set()
        entry_cells: list = []
        touched: list = []
        self.trail.append((entry_cells, touched, self.dyn_cur))
        dead = False
        for plan in self.layer_eqs[layer]:
            comp_sets = []
            for positions, atom_ids in plan.comps:
                k = len(positions)
                if k == 0:
                    tup = tuple(
                        self._eval_atom(plan.atom_progs[ai], ()) for ai in atom_ids
                    )
                    comp_sets.append((atom_ids, [tup]))
                    continue
                slots = {
                    plan.vars[p]: self._slot_vec(k, slot)
                    for slot, p in enumerate(positions)
                }
                memo: dict = {}
                vecs = [
                    self._term_vec(plan.atom_terms[ai], slots, memo)
                    for ai in atom_ids
                ]
                comp_sets.append((atom_ids, sorted(set(zip(*vecs)))))
            atom_vals = [0] * len(plan.atom_progs)
            queue: list = []
            for cross in itertools.product(*(s for _, s in comp_sets)):
                for (atom_ids, _), tup in zip(comp_sets, cross):
                    for ai, v in zip(atom_ids, tup):
                        atom_vals[ai] = v
                key = (plan.skey, tuple(atom_vals))
                pair = cache.get(key)
                if pair is None:
                    lid = self._fold(plan.lhs_prog, atom_vals, cons, cons_list)
                    rid = self._fold(plan.rhs_prog, atom_vals, cons, cons_list)
                    cache[key] = pair = (lid, rid)
                lid, rid = pair
                if lid == rid:
                    continue
                if lid < 0 and rid < 0:
                    if plan.is_goal:
                        frame.static_violated += 1
                        continue
                    dead = True
                    break
                ck = (lid, rid, plan.is_goal) if lid <= rid else (rid, lid, plan.is_goal)
                if ck in seen:
                    continue
                seen.add(ck)
                if not self._arm(frame, lid, rid, plan.is_goal, cons_list, progs, queue):
                    dead = True
                    break
            # Propagate between plans: a contradiction among the narrow
            # equations kills the frame before the wide ones are ground.
            # Cells assigned here stay until the frame is popped, so folds
            # of later plans may safely read them.
            if dead or not self._propagate(queue, entry_cells, touched):
                dead = True
                break
        if dead or not self._goal_alive():
            self._undo()
            self.frames.pop()
            if frame is self.goal_frame:
                self.goal_frame = None
            return None
        return frame

    # -- propagation ---------------------------------------------------

    def _exec(self, prog) -> int:
        """Run one side of a residual constraint. Returns the value, or
        -(cell+1) when evaluation needs the unassigned cell."""
        plus_m, par_m, pre_m = self.plus_m, self.par_m, self.pre_m
        stack: list = []
        push = stack.append
        for op in prog:
            tag = op[0]
            if tag == 5:
                push(op[1])
            elif tag == 3:
                y = stack.pop()
                x = stack[-1]
                v = plus_m[x][y]
                if v is None:
                    return -self.cell_plus[x][y] - 1
                stack[-1] = v
            elif tag == 4:
                y = stack.pop()
                x = stack[-1]
                v = par_m[x][y]
                if v is None:
                    return -self.cell_par[x][y] - 1
                stack[-1] = v
            else:
                x = stack[-1]
                v = pre_m[op[1]][x]
                if v is None:
                    return -self.cell_pre[op[1]][x] - 1
                stack[-1] = v
        return stack[0]

    def _eval_constraint(self, frame, ci: int, queue: list):
        """Evaluate one constraint; queues a forced assignment when one side
        is ground and the other is a single free cell. Single-cell sides are
        read straight off the value array."""
        val = self.val
        bl = frame.bareL[ci]
        if bl >= 0:
            v = val[bl]
            rl = -bl - 1 if v is None else v
        else:
            rl = self._exec(frame.progL[ci])
        if rl >= 0:
            br = frame.bareR[ci]
            if br >= 0:
                rr = val[br]
                if rr is None:
                    queue.append((br, rl))
                    return self.WATCHING, br
            else:
                rr = self._exec(frame.progR[ci])
                if rr < 0:
                    cell = -rr - 1
                    return self.WATCHING, cell
            return (self.HOLDS if rl == rr else self.VIOLATED), -1
        cell = -rl - 1
        if bl == cell:
            br = frame.bareR[ci]
            if br >= 0:
                rr = val[br]
                if rr is None:
                    return self.WATCHING, br
            else:
                rr = self._exec(frame.progR[ci])
                if rr < 0:
                    return self.WATCHING, -rr - 1
            queue.append((cell, rr))
            return self.WATCHING, cell
        return self.WATCHING, cell

    def _propagate(self, queue: list, entry_cells: list, touched: list) -> bool:
        """Write queued cells and re-run their watchers until the queue is
        empty. False on a conflicting force or a violated axiom constraint."""
        W, V = self.WATCHING, self.VIOLATED
        while queue:
            cell, v = queue.pop()
            cur = self.val[cell]
            if cur is not None:
                if cur != v:
                    return False
                continue
            self._write(cell, v)
            entry_cells.append(cell)
            if v > self.dyn_cur:
                self.dyn_cur = v
            frame = self.frames[-1]
            wl = frame.watchlists.pop(cell, None)
            if not wl:
                continue
            done = set()
            for pos, ci in enumerate(wl):
                if frame.watch[ci] != cell or ci in done:
                    continue
                done.add(ci)
                old_state = frame.state[ci]
                st, wcell = self._eval_constraint(frame, ci, queue)
                goal = frame.is_goal[ci]
                if goal:
                    if old_state == W:
                        frame.watching -= 1
                    elif old_state == V:
                        frame.violated -= 1
                    if st == W:
                        frame.watching += 1
                    elif st == V:
                        frame.violated += 1
                frame.state[ci] = st
                tgt = wcell if st == W else cell
                frame.watch[ci] = tgt
                lst = frame.watchlists.get(tgt)
                if lst is None:
                    frame.watchlists[tgt] = [ci]
                else:
                    lst.append(ci)
                touched.append((frame, ci, old_state, cell))
                if st == V and not goal:
                    rest = [cj for cj in wl[pos + 1 :] if cj not in done]
                    if rest:
                        lst = frame.watchlists.get(cell)
                        if lst is None:
                            frame.watchlists[cell] = rest
                        else:
                            lst.extend(rest)
                    return False
        return True

    def _goal_alive(self) -> bool:
        gf = self.goal_frame
        if gf is None:
            return True
        return gf.static_violated > 0 or gf.violated > 0 or gf.watching > 0

    def _assign_entry(self, cell: int, v: int) -> bool:
        entry_cells: list = []
        touched: list = []
        self.trail.append((entry_cells, touched, self.dyn_cur))
        if not self._propagate([(cell, v)], entry_cells, touched):
            return False
        return self._goal_alive()

    def _undo(self):
        entry_cells, touched, prev_dyn = self.trail.pop()
        W, V = self.WATCHING, self.VIOLATED
        for frame, ci, old_state, cell in reversed(touched):
            st = frame.state[ci]
            if frame.is_goal[ci]:
                if st == W:
                    frame.watching -= 1
                elif st == V:
                    frame.violated -= 1
                if old_state == W:
                    frame.watching += 1
                elif old_state == V:
                    frame.violated += 1
            frame.state[ci] = old_state
            frame.watch[ci] = cell
            lst = frame.watchlists.get(cell)
            if lst is None:
                frame.watchlists[cell] = [ci]
            else:
                lst.append(ci)
        for cell in reversed(entry_cells):
            self._write(cell, None)
        self.dyn_cur = prev_dyn

    # -- driver --------------------------------------------------------

    def run(self, budget, node_offset: int):
        """Depth-first over the cells. Returns the model or None; raises
        _Budget when the decision cap is hit."""
        return self._run(0, budget, node_offset)

    def _run(self, k: int, budget, node_offset: int):
        if self.next_layer < 3 and self.layer_start[self.next_layer] == k:
            layer = self.next_layer
            frame = self._compile(layer)
            if frame is None:
                return None
            self.next_layer = layer + 1
            got = self._run(k, budget, node_offset)
            self.next_layer = layer
            if got is not None:
                return got
            self._undo()
            self.frames.pop()
            if frame is self.goal_frame:
                self.goal_frame = None
            return None
        if k == self.total_cells:
            gf = self.goal_frame
            return self._to_model() if gf.static_violated + gf.violated > 0 else None
        if self.val[k] is not None:
            return self._run(k + 1, budget, node_offset)
        vmax = min(self.n - 1, max(self.static_max[k], self.dyn_cur) + 1)
        for v in range(vmax + 1):
            self.nodes += 1
            if budget is not None and node_offset + self.nodes > budget:
                raise _Budget
            if self._assign_entry(k, v):
                got = self._run(k + 1, budget, node_offset)
                if got is not None:
                    return got
            self._undo()
        return None

    def _to_model(self) -> FiniteModel:
        return FiniteModel(
            carrier=self.n,
            zero=0,
            prefix={a: tuple(t) for a, t in self.pre_m.items()},
            plus=tuple(tuple(r) for r in self.plus_m),
            par=tuple(tuple(r) for r in self.par_m),
        )


def search_model(
    alphabet,
    max_carrier: int,
    system,
    goal: Equation,
    budget: int | None = 5_000_000,
    min_carrier: int = 1,
) -> SearchResult:
    """Search carrier sizes min_carrier..max_carrier for a model of every
    equation in the system that refutes the goal. The budget caps the total
    number of decision points tried, for reproducibility; running out of it
    is reported as "budget", exhausting all sizes as "none"."""
    if not 1 <= min_carrier <= max_carrier:
        raise ValueError("need 1 <= min_carrier <= max_carrier")
    equations = list(system)
    actions = (
        alphabet.transition_labels() if alphabet.sync_mode else alphabet.actions
    )
    flags, kept = _structural_laws(equations)
    nodes = 0
    for n in range(min_carrier, max_carrier + 1):
        search = _LayeredSearch(n, actions, kept, goal, flags)
        try:
            got = search.run(budget, nodes)
        except _Budget:
            return SearchResult("budget", None, budget, None)
        nodes += search.nodes
        if got is not None:
            report = independence_report(got, equations, goal)
            if not report["independent"]:
                raise AssertionError("search returned a model its own check rejects")
            return SearchResult("found", got, nodes, n)
    return SearchResult("none", None, nodes, None)
