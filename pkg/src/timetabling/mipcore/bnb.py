"""Exact depth-first branch-and-bound for pure integer programs.

The search keeps integer bounds for every variable and propagates linear
constraints by activity bounds. The objective is treated as one more row whose
upper limit is the incumbent cutoff, so bounding is just propagation. Branching
prefers set-partitioning rows (``sum x = 1`` over binaries): one child per
member, ordered by the objective bound each child yields when probed.

Symmetry: groups of rows that can be swapped wholesale (identical sections
with their tied twins, say) are detected once. Branching keeps one child per
set of interchangeable units, and a transposition table skips nodes that are
images of nodes already searched.

Independent blocks of variables, i.e. blocks that only share the objective, are
solved one after the other and their optima added. Everything runs single
threaded in a fixed order, so repeated runs visit the same nodes and report the
same incumbent sequence.
"""

from __future__ import annotations

import math
import time
from collections.abc import Mapping
from dataclasses import dataclass

from .model import FEAS_TOL, INT_TOL, Model, ModelError, Sense, SolveResult, VarKind, evaluate

_MEMO_CAP = 400_000


class UnsupportedModelError(ModelError):
    pass


@dataclass
class Limits:
    max_nodes: int | None = None
    max_seconds: float | None = None


class _Budget:
    def __init__(self, limits: Limits):
        self.max_nodes = limits.max_nodes
        self.deadline = (time.perf_counter() + limits.max_seconds
                         if limits.max_seconds is not None else None)
        self.nodes = 0
        self.hit = False

    def tick(self) -> bool:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            self.hit = True
        elif self.deadline is not None and (self.nodes & 63) == 0 \
                and time.perf_counter() > self.deadline:
            self.hit = True
        return self.hit


class _Problem:
    """Index-based view: rows are ``lo <= sum a_j x_j <= hi``."""

    def __init__(self, lb, ub, cost, rows, const=0.0, priority=None):
        self.n = len(lb)
        self.priority = list(priority) if priority is not None else [0] * self.n
        self.lb0 = list(lb)
        self.ub0 = list(ub)
        self.cost = list(cost)
        self.rows = rows  # list of (idx list, coef list, lo, hi)
        self.const = const

    @classmethod
    def from_model(cls, model: Model) -> tuple["_Problem", list[str]]:
        names = list(model.variables)
        pos = {v: i for i, v in enumerate(names)}
        lb, ub = [], []
        for var in model.variables.values():
            if var.kind is VarKind.CONTINUOUS:
                raise UnsupportedModelError(f"continuous variable {var.name!r} not supported")
            if not (math.isfinite(var.lower) and math.isfinite(var.upper)):
                raise UnsupportedModelError(f"variable {var.name!r} needs finite bounds")
            lb.append(math.ceil(var.lower - INT_TOL))
            ub.append(math.floor(var.upper + INT_TOL))
        rows = []
        for con in model.constraints:
            idx = [pos[v] for _, v in con.terms]
            coef = [c for c, _ in con.terms]
            lo = con.rhs if con.sense in (Sense.GE, Sense.EQ) else -math.inf
            hi = con.rhs if con.sense in (Sense.LE, Sense.EQ) else math.inf
            rows.append((idx, coef, lo, hi))
        cost = [model.objective.get(v, 0.0) for v in names]
        prio = [var.priority for var in model.variables.values()]
        return cls(lb, ub, cost, rows, priority=prio), names

    def restrict(self, keep: list[int], lb: list[int], ub: list[int]) -> "_Problem":
        """Sub-problem over ``keep``; every other variable is fixed at ``lb``."""
        local = {j: k for k, j in enumerate(keep)}
        rows = []
        for idx, coef, lo, hi in self.rows:
            sub_i, sub_c, shift = [], [], 0.0
            for j, a in zip(idx, coef):
                if j in local:
                    sub_i.append(local[j])
                    sub_c.append(a)
                else:
                    shift += a * lb[j]
            if sub_i:
                rows.append((sub_i, sub_c, lo - shift, hi - shift))
        return _Problem([lb[j] for j in keep], [ub[j] for j in keep],
                        [self.cost[j] for j in keep], rows,
                        priority=[self.priority[j] for j in keep])


class _Search:
    def __init__(self, prob: _Problem, budget: _Budget):
        self.p = prob
        self.budget = budget
        n = prob.n
        self.lb = list(prob.lb0)
        self.ub = list(prob.ub0)
        self.trail: list[tuple[int, int, int]] = []

        self.r_idx = [r[0] for r in prob.rows]
        self.r_coef = [r[1] for r in prob.rows]
        self.r_lo = [r[2] for r in prob.rows]
        self.r_hi = [r[3] for r in prob.rows]
        # the objective is the last row; its upper limit is the incumbent cutoff
        obj_idx = [j for j in range(n) if prob.cost[j] != 0]
        self.r_idx.append(obj_idx)
        self.r_coef.append([prob.cost[j] for j in obj_idx])
        self.r_lo.append(-math.inf)
        self.r_hi.append(math.inf)
        self.obj_row = len(self.r_idx) - 1
        m = len(self.r_idx)

        self.var_rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for i in range(m):
            for j, a in zip(self.r_idx[i], self.r_coef[i]):
                self.var_rows[j].append((i, a))
        self.minact = [0.0] * m
        self.maxact = [0.0] * m
        self.range_cap = [0.0] * m
        for i in range(m):
            lo_a = hi_a = cap = 0.0
            for j, a in zip(self.r_idx[i], self.r_coef[i]):
                if a > 0:
                    lo_a += a * self.lb[j]; hi_a += a * self.ub[j]
                else:
                    lo_a += a * self.ub[j]; hi_a += a * self.lb[j]
                cap = max(cap, abs(a) * (self.ub[j] - self.lb[j]))
            self.minact[i], self.maxact[i], self.range_cap[i] = lo_a, hi_a, cap
        self.n_free = sum(1 for j in range(n) if self.lb[j] < self.ub[j])

        self.integral_obj = all(float(c).is_integer() for c in prob.cost)
        self.step = 1.0 if self.integral_obj else FEAS_TOL

        # set-partitioning rows and branching priorities
        binary = [self.lb[j] >= 0 and self.ub[j] <= 1 for j in range(n)]
        self.gub_rows = [i for i in range(m - 1)
                         if self.r_lo[i] == 1 and self.r_hi[i] == 1 and len(self.r_idx[i]) > 1
                         and all(a == 1 for a in self.r_coef[i])
                         and all(binary[j] for j in self.r_idx[i])]
        weight = [0.0] * n
        degree = [0] * n
        for i in range(m - 1):
            for j, a in zip(self.r_idx[i], self.r_coef[i]):
                weight[j] = max(weight[j], abs(a))
                degree[j] += 1
        prio = prob.priority
        self.var_order = sorted(range(n), key=lambda j: (-prio[j], -weight[j], -degree[j], j))
        self.weight = weight
        self._find_interchangeable_rows()

        self.best_obj: float | None = None
        self.best_x: list[int] | None = None
        self.incumbents: list[float] = []
        self.root_bound = -math.inf

    def _find_interchangeable_rows(self) -> None:
        """Group row units that a variable permutation can swap without changing the model.

        A unit is a single row, or a set of non-partitioning rows chained together
        by two-term rows (a capacity row, its tied twin and the tie rows between
        them).  Units ``U`` and ``V`` qualify when their variables pair up
        one-to-one with equal cost, original bounds and identical membership in
        rows outside the unit, the rows inside map onto each other, and no
        variable of one touches a row of the other.  Swapping such units is an
        automorphism of the problem.
        """
        m = len(self.r_idx) - 1
        gub = set(self.gub_rows)
        parent = list(range(m))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(m):
            if len(self.r_idx[i]) != 2 or i in gub:
                continue
            for j in self.r_idx[i]:
                for r, _ in self.var_rows[j]:
                    if r != self.obj_row and r not in gub:
                        parent[find(r)] = find(i)
        units: dict[int, list[int]] = {}
        for i in range(m):
            units.setdefault(find(i), []).append(i)

        colour: dict[tuple, int] = {}

        def intern(k):
            return colour.setdefault(k, len(colour))

        sig_of_unit: dict[tuple, list[int]] = {}
        order_of_unit: dict[int, list[int]] = {}
        vars_of_unit: dict[int, set[int]] = {}
        rows_of_unit: dict[int, list[int]] = {}
        for u, rows in units.items():
            inside = set(rows)
            cols = sorted({j for i in rows for j in self.r_idx[i]})
            key = {}
            for j in cols:
                others = tuple(sorted((r, c) for r, c in self.var_rows[j]
                                      if r not in inside and r != self.obj_row))
                key[j] = intern((self.p.cost[j], self.lb[j], self.ub[j], others))
            # refine with the shape of the rows inside the unit
            for _ in range(3):
                if len(set(key.values())) == len(cols):
                    break
                shape = {i: (self.r_lo[i], self.r_hi[i],
                             tuple(sorted((key[j], a) for j, a in zip(self.r_idx[i], self.r_coef[i]))))
                         for i in rows}
                key = {j: intern((key[j], tuple(sorted((shape[r], c) for r, c in self.var_rows[j]
                                                       if r in inside))))
                       for j in cols}
            keyed = sorted((key[j], j) for j in cols)
            keys = [k for k, _ in keyed]
            if len(set(keys)) != len(keys):
                continue
            pos = {j: q for q, (_, j) in enumerate(keyed)}
            row_sig = tuple(sorted(
                (self.r_lo[i], self.r_hi[i],
                 tuple(sorted((pos[j], a) for j, a in zip(self.r_idx[i], self.r_coef[i]))))
                for i in rows))
            sig_of_unit.setdefault((tuple(keys), row_sig), []).append(u)
            rows_of_unit[u] = sorted(rows, key=lambda i: (
                self.r_lo[i], self.r_hi[i],
                sorted((pos[j], a) for j, a in zip(self.r_idx[i], self.r_coef[i]))))
            order_of_unit[u] = [j for _, j in keyed]
            vars_of_unit[u] = set(cols)
        self.sym_row: dict[int, tuple[int, int, int]] = {}  # var -> (class, position, unit)
        self.sym_order: dict[int, list[int]] = {}
        self.sym_rows: dict[int, list[int]] = {}
        self.sym_units: list[list[int]] = []
        cls_id = 0
        for members in sig_of_unit.values():
            if len(members) < 2:
                continue
            owner = {i: u for u in members for i in units[u]}
            ok = all(owner.get(r, u) == u
                     for u in members for j in vars_of_unit[u] for r, _ in self.var_rows[j])
            if not ok:
                continue
            for u in members:
                self.sym_order[u] = order_of_unit[u]
                self.sym_rows[u] = rows_of_unit[u]
                for q, j in enumerate(order_of_unit[u]):
                    self.sym_row[j] = (cls_id, q, u)
            cls_id += 1
            self.sym_units.append(list(members))
        self.sym_rest = [j for j in range(len(self.lb)) if j not in self.sym_row]
        self.unit_of = [-1] * len(self.lb)
        for j, (_, _, u) in self.sym_row.items():
            self.unit_of[j] = u
        self.unit_cache: dict[int, tuple | None] = {u: None for u in self.sym_order}
        self.memo: set[tuple] = set()

    def _unit_state(self, u: int) -> tuple:
        hit = self.unit_cache[u]
        if hit is not None:
            return hit
        lb, ub = self.lb, self.ub
        free = tuple((lb[k], ub[k]) if lb[k] < ub[k] else () for k in self.sym_order[u])
        load = tuple(round(sum(a * lb[k] for k, a in zip(self.r_idx[i], self.r_coef[i])
                               if lb[k] == ub[k]), 9)
                     for i in self.sym_rows[u])
        self.unit_cache[u] = (free, load)
        return free, load

    def _seen_before(self) -> bool:
        """Transposition check: was an image of this node under unit swaps searched already?

        Nodes are only revisited after their first visit finished (depth-first
        order, and an ancestor always has fewer fixings), so a repeat cannot hold
        anything better than the incumbent.
        """
        if not self.sym_units:
            return False
        lb, ub = self.lb, self.ub
        key = (tuple(lb[j] for j in self.sym_rest), tuple(ub[j] for j in self.sym_rest),
               tuple(tuple(sorted(self._unit_state(u) for u in units))
                     for units in self.sym_units))
        if key in self.memo:
            return True
        if len(self.memo) >= _MEMO_CAP:
            self.memo.clear()
        self.memo.add(key)
        return False

    def _drop_symmetric(self, members: list[int]) -> list[int]:
        """Keep one member per set of children that are images of each other.

        Two units of a class are interchangeable at a node when their free
        variables line up with equal bounds and the fixed variables load each of
        their rows by the same amount: swapping the free parts then maps one
        child subproblem onto the other.
        """
        if not self.sym_row:
            return members
        seen, out = set(), []
        for j in members:
            hit = self.sym_row.get(j)
            if hit is None:
                out.append(j)
                continue
            cls, pos, u = hit
            state = (cls, pos) + self._unit_state(u)
            if state not in seen:
                seen.add(state)
                out.append(j)
        return out

    # -- bound bookkeeping -------------------------------------------------

    def _set(self, j: int, nlb: int, nub: int, queue: list[int], queued: list[bool]) -> None:
        olb, oub = self.lb[j], self.ub[j]
        self.trail.append((j, olb, oub))
        if olb < oub and nlb == nub:
            self.n_free -= 1
        self.lb[j], self.ub[j] = nlb, nub
        if self.unit_of[j] >= 0:
            self.unit_cache[self.unit_of[j]] = None
        dl, du = nlb - olb, nub - oub
        minact, maxact = self.minact, self.maxact
        for i, a in self.var_rows[j]:
            if a > 0:
                minact[i] += a * dl
                maxact[i] += a * du
            else:
                minact[i] += a * du
                maxact[i] += a * dl
            if not queued[i]:
                queued[i] = True
                queue.append(i)

    def undo(self, mark: int) -> None:
        trail, minact, maxact = self.trail, self.minact, self.maxact
        while len(trail) > mark:
            j, olb, oub = trail.pop()
            clb, cub = self.lb[j], self.ub[j]
            if clb == cub and olb < oub:
                self.n_free += 1
            if self.unit_of[j] >= 0:
                self.unit_cache[self.unit_of[j]] = None
            dl, du = olb - clb, oub - cub
            for i, a in self.var_rows[j]:
                if a > 0:
                    minact[i] += a * dl
                    maxact[i] += a * du
                else:
                    minact[i] += a * du
                    maxact[i] += a * dl
            self.lb[j], self.ub[j] = olb, oub

    def apply(self, changes: list[tuple[int, int, int]], every_row: bool = False) -> bool:
        """Impose bound changes ``(var, lb, ub)`` and propagate; False on conflict."""
        m = len(self.r_idx)
        if every_row:
            queue, queued = list(range(m)), [True] * m
        else:
            queued = [False] * m
            queue = [self.obj_row]
            queued[self.obj_row] = True
        for j, nlb, nub in changes:
            nlb, nub = max(nlb, self.lb[j]), min(nub, self.ub[j])
            if nlb > nub:
                return False
            if (nlb, nub) != (self.lb[j], self.ub[j]):
                self._set(j, nlb, nub, queue, queued)
        return self._propagate(queue, queued)

    def _propagate(self, queue: list[int], queued: list[bool]) -> bool:
        lb, ub = self.lb, self.ub
        minact, maxact = self.minact, self.maxact
        r_lo, r_hi = self.r_lo, self.r_hi
        tol = 1e-7
        head = 0
        while head < len(queue):
            i = queue[head]
            head += 1
            queued[i] = False
            lo, hi = r_lo[i], r_hi[i]
            if minact[i] > hi + tol or maxact[i] < lo - tol:
                return False
            s_hi = hi - minact[i]
            s_lo = maxact[i] - lo
            cap = self.range_cap[i]
            if s_hi >= cap and s_lo >= cap:
                continue
            for j, a in zip(self.r_idx[i], self.r_coef[i]):
                lj, uj = lb[j], ub[j]
                if lj == uj:
                    continue
                nl, nu = lj, uj
                if a > 0:
                    if s_hi < a * (uj - lj):
                        nu = lj + math.floor(s_hi / a + tol)
                    if s_lo < a * (uj - lj):
                        nl = uj - math.floor(s_lo / a + tol)
                else:
                    if s_hi < -a * (uj - lj):
                        nl = uj - math.floor(s_hi / -a + tol)
                    if s_lo < -a * (uj - lj):
                        nu = lj + math.floor(s_lo / -a + tol)
                if nl > lj or nu < uj:
                    if nl > nu:
                        return False
                    self._set(j, nl, nu, queue, queued)
                    s_hi = hi - minact[i]
                    s_lo = maxact[i] - lo
        return True

    # -- search ------------------------------------------------------------

    def bound(self) -> float:
        return self.minact[self.obj_row]

    def _record(self, x: list[int] | None = None) -> None:
        x = list(self.lb) if x is None else x
        for idx, coef, lo, hi in self.p.rows:
            act = sum(a * x[j] for j, a in zip(idx, coef))
            if act < lo - FEAS_TOL or act > hi + FEAS_TOL:
                return
        obj = sum(c * v for c, v in zip(self.p.cost, x))
        if self.best_obj is not None and obj > self.best_obj - self.step + 1e-7:
            return
        self.best_obj, self.best_x = obj, x
        self.incumbents.append(obj + self.p.const)
        self.r_hi[self.obj_row] = obj - self.step + (0.5 if self.integral_obj else 0.0)

    def seed(self, x: list[int]) -> None:
        """Offer a known feasible point as the first incumbent."""
        if all(l <= v <= u for l, v, u in zip(self.lb, x, self.ub)):
            self._record(list(x))

    def _branches(self) -> list[list[tuple[int, int, int]]]:
        lb, ub = self.lb, self.ub
        prio = self.p.priority
        top = next((prio[j] for j in self.var_order if lb[j] < ub[j]), None)
        best, best_key = None, None
        for i in self.gub_rows:
            free = [j for j in self.r_idx[i] if lb[j] < ub[j]]
            if len(free) < 2 or any(lb[j] == 1 for j in self.r_idx[i]):
                continue
            if max(prio[j] for j in free) < top:
                continue
            key = (-max(self.weight[j] for j in free), len(free), i)
            if best_key is None or key < best_key:
                best, best_key = free, key
        if best is not None:
            return [[(j, 1, 1)] for j in self._drop_symmetric(best)]
        for j in self.var_order:
            if lb[j] < ub[j]:
                if ub[j] - lb[j] == 1:
                    return [[(j, lb[j], lb[j])], [(j, ub[j], ub[j])]]
                return [[(j, lb[j], lb[j])], [(j, lb[j] + 1, ub[j])]]
        return []

    def _ordered(self, branches):
        scored = []
        for k, ch in enumerate(branches):
            mark = len(self.trail)
            ok = self.apply(ch)
            b = self.bound() if ok else math.inf
            self.undo(mark)
            if ok:
                dist = 0.0
                j, l, u = ch[0]
                if self.p.priority[j] > 0:
                    # decision variables: try switching them on first
                    dist = -l
                scored.append((b, dist, k, ch))
        scored.sort(key=lambda t: t[:3])
        return [ch for *_, ch in scored]

    def start(self) -> str | None:
        """Root processing; returns a final outcome or None when search is needed."""
        if not self.apply([], every_row=True):
            return "infeasible" if self.best_x is None else "done"
        self.root_bound = self.bound()
        if self.n_free == 0:
            self._record()
            return "done"
        self.stack = [(len(self.trail), iter(self._ordered(self._branches())))]
        return None

    def resume(self, until_incumbent: bool = False) -> str:
        """Continue the depth-first search.

        Returns ``"done"`` when the tree is exhausted, ``"limit"`` when the budget
        runs out and ``"paused"`` after the first incumbent if ``until_incumbent``.
        """
        stack = self.stack
        while stack:
            if until_incumbent and self.best_x is not None:
                return "paused"
            mark, children = stack[-1]
            child = next(children, None)
            self.undo(mark)
            if child is None:
                stack.pop()
                continue
            if self.budget.hit:
                stack.append((mark, iter([child])))  # keep it for a later resume
                return "limit"
            if not self.apply(child):
                continue
            if self.budget.tick():
                self.undo(mark)
                stack.append((mark, iter([child])))
                return "limit"
            if self.n_free == 0:
                self._record()
                continue
            if self._seen_before():
                continue
            branches = self._ordered(self._branches())
            if branches:
                stack.append((len(self.trail), iter(branches)))
        return "done"

    def run(self) -> str:
        return self.start() or self.resume()


def _components(prob: _Problem, lb: list[int], ub: list[int]) -> list[list[int]]:
    parent = list(range(prob.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for idx, _, _, _ in prob.rows:
        free = [j for j in idx if lb[j] < ub[j]]
        for j in free[1:]:
            ra, rb = find(free[0]), find(j)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for j in range(prob.n):
        if lb[j] < ub[j]:
            groups.setdefault(find(j), []).append(j)
    return [groups[k] for k in sorted(groups)]


def _block_key(sub: _Problem) -> tuple:
    return (tuple(sub.lb0), tuple(sub.ub0), tuple(sub.cost), tuple(sub.priority),
            tuple((tuple(i), tuple(c), lo, hi) for i, c, lo, hi in sub.rows))


class _Cached:
    """Stand-in for a block search whose optimum is already known."""

    def __init__(self, best_x: list[int], best_obj: float):
        self.best_x, self.best_obj = best_x, best_obj
        self.incumbents: list[float] = []
        self.root_bound = best_obj


def solve_exact(model: Model, limits: Limits | None = None, *, max_nodes: int | None = None,
                max_seconds: float | None = None,
                decompose: bool = True, cache: dict | None = None,
                start: Mapping[str, float] | None = None) -> SolveResult:
    """Solve a pure integer minimisation model to proven optimality.

    Parameters
    ----------
    model : Model
        Binary and bounded integer variables only.
    limits : Limits, optional
        Node and wall-clock limits; ``max_nodes``/``max_seconds`` override it.
    decompose : bool
        Solve blocks that share only the objective separately.
    cache : dict, optional
        Proven block optima from earlier calls, keyed by the block's exact
        data.  Sequences of nearly identical models (one per subgroup
        iteration) then only search the blocks that changed.
    start : mapping, optional
        A feasible assignment used as the first incumbent.

    Raises
    ------
    ValueError
        If ``start`` violates the model.

    Returns
    -------
    SolveResult
        ``optimal`` (gap 0), ``infeasible``, or ``limit`` with the best
        incumbent (if any) and a conservative gap to the root bound.
    """
    limits = limits or Limits()
    if max_nodes is not None or max_seconds is not None:
        limits = Limits(max_nodes if max_nodes is not None else limits.max_nodes,
                        max_seconds if max_seconds is not None else limits.max_seconds)
    prob, names = _Problem.from_model(model)
    if start is not None:
        check = evaluate(model, start)
        if not check.feasible:
            raise ValueError(f"start point violates {len(check.violated)} condition(s), "
                             f"e.g. {check.violated[0]}")
    budget = _Budget(limits)
    if any(l > u for l, u in zip(prob.lb0, prob.ub0)):
        return SolveResult("infeasible", proof_gap=0.0)

    root = _Search(prob, budget)
    if not root.apply([], every_row=True):
        return SolveResult("infeasible", proof_gap=0.0, nodes=budget.nodes)
    lb, ub = list(root.lb), list(root.ub)
    blocks = _components(prob, lb, ub) if decompose else [[j for j in range(prob.n) if lb[j] < ub[j]]]
    if not decompose and not blocks[0]:
        blocks = []

    values = list(lb)
    total = sum(c * v for c, v in zip(prob.cost, lb) if c)
    subs = [prob.restrict(block, lb, ub) for block in blocks]
    keys = [_block_key(sub) for sub in subs] if cache is not None else [None] * len(subs)
    searches = [_Cached(*cache[key]) if key in (cache or {}) else _Search(sub, budget)
                for sub, key in zip(subs, keys)]
    if start is not None:
        for block, search in zip(blocks, searches):
            if isinstance(search, _Search):
                search.seed([int(round(start[names[j]])) for j in block])
    outcomes = []
    # first an incumbent for every block, then the optimality proofs
    for search in searches:
        if isinstance(search, _Cached):
            outcomes.append("done")
            continue
        out = search.start()
        if out is None:
            out = search.resume(until_incumbent=True)
        outcomes.append(out)
        if out in ("infeasible", "done") and search.best_x is None:
            return SolveResult("infeasible", proof_gap=0.0, nodes=budget.nodes,
                               incumbents=[v for s_ in searches for v in s_.incumbents])
    for k, search in enumerate(searches):
        if outcomes[k] == "paused":
            outcomes[k] = search.resume()
            if outcomes[k] == "done" and search.best_x is None:
                return SolveResult("infeasible", proof_gap=0.0, nodes=budget.nodes)

    if cache is not None:
        for key, search, out in zip(keys, searches, outcomes):
            if out == "done" and search.best_x is not None and not isinstance(search, _Cached):
                cache[key] = (list(search.best_x), search.best_obj)

    status, gap, missing = "optimal", 0.0, False
    incumbents = [v for s_ in searches for v in s_.incumbents]
    for block, search, out in zip(blocks, searches, outcomes):
        if out in ("limit", "paused"):
            status = "limit"
            if search.best_x is None:
                missing = True
                continue
            gap += search.best_obj - search.root_bound
        for k, j in enumerate(block):
            values[j] = search.best_x[k]
        total += search.best_obj

    if not blocks:
        # everything fixed by propagation; confirm the rows hold
        for idx, coef, lo, hi in prob.rows:
            act = sum(a * values[j] for j, a in zip(idx, coef))
            if act < lo - FEAS_TOL or act > hi + FEAS_TOL:
                return SolveResult("infeasible", proof_gap=0.0, nodes=budget.nodes)
    if missing:
        return SolveResult("limit", nodes=budget.nodes, incumbents=incumbents,
                           message="limit reached before a feasible solution was found")
    assignment = {name: float(values[k]) for k, name in enumerate(names)}
    objective = model.objective_value(assignment)
    return SolveResult(status, objective, assignment, 0.0 if status == "optimal" else gap,
                       budget.nodes, incumbents)
