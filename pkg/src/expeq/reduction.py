"""Reduction of all-parabolic exponential equations to abelian systems.

After every parabolic base is conjugated into its factor, the left-hand side
is a cyclic word whose letters are constant syllables and variable letters
``c^x`` with ``c`` in a factor.  Maximal same-factor runs ("components") are
grouped into regions: a region is a set of components of one factor whose
product, read around the region, is trivial.  In a free product the internal
sides of regions carry only the trivial label, so a region plan is a
non-crossing partial partition of the components and each region yields one
linear row over its factor.  The faces between regions contain no variables
and become exact word-problem checks.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import geometry
from .abelian import AbelianElement, DiophantineSystem, Row
from .freeprod import FreeProductElement, Syllable, format_element, invert, multiply, normalize

INF = math.inf


class ReductionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# annotated words


@dataclass(frozen=True)
class ConstantSyllable:
    syllable: Syllable

    @property
    def factor(self) -> int:
        return self.syllable.factor


@dataclass(frozen=True)
class VariableLetter:
    variable: str
    base: AbelianElement
    factor: int


Letter = Union[ConstantSyllable, VariableLetter]


@dataclass
class AnnotatedWord:
    """Letters of ``A_1 c_1^x_1 ... A_n c_n^x_n`` read as a cyclic word.

    Evaluating the letters in order gives the original left-hand side exactly;
    ``free`` lists variables whose base was trivial.
    """

    spec: object
    letters: tuple
    free: tuple = ()

    def variables(self) -> tuple:
        return tuple(l.variable for l in self.letters if isinstance(l, VariableLetter))

    def evaluate(self, assignment) -> FreeProductElement:
        out = []
        for l in self.letters:
            if isinstance(l, ConstantSyllable):
                out.append(l.syllable)
            else:
                out.append(Syllable(l.factor, assignment[l.variable] * l.base))
        return normalize(self.spec, out)


def _require_parabolic(eq):
    types = []
    for t in eq.terms:
        ty = geometry.classify(t.base)
        if ty.is_loxodromic:
            raise ReductionError(f"base {t.base} of {t.variable} is loxodromic")
        types.append(ty)
    return types


def parabolic_rewrite(eq) -> AnnotatedWord:
    """Conjugate every parabolic base into its factor and absorb conjugators.

    ``g_i = h_i c_i h_i^-1`` gives constants ``h_(i-1)^-1 a_i h_i``; the last
    ``h_n^-1`` stays at the end so the word equals the left-hand side for every
    assignment.
    """
    spec = eq.spec
    types = _require_parabolic(eq)
    letters, free = [], []
    pending = spec.identity()  # constant waiting to be written
    for t, ty in zip(eq.terms, types):
        pending = multiply(pending, t.coefficient)
        if ty.is_trivial:
            free.append(t.variable)
            continue
        h = ty.witness
        pending = multiply(pending, h)
        letters.extend(ConstantSyllable(s) for s in pending.syllables)
        letters.append(VariableLetter(t.variable, ty.value, ty.factor))
        pending = invert(h)
    letters.extend(ConstantSyllable(s) for s in pending.syllables)
    return AnnotatedWord(spec, tuple(letters), tuple(free))


def relative_metric(factor: int, h: AbelianElement) -> float:
    """Relative distance from 1 to ``h`` inside factor ``factor``.

    No path outside the factor can join 1 to a nontrivial factor element in a
    free product, so the distance is 0 or infinite.
    """
    return 0 if h.is_identity() else INF


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Component:
    factor: int
    constant: AbelianElement
    variables: tuple = ()  # ((variable, base), ...)

    @property
    def special(self) -> bool:
        return bool(self.variables)


@dataclass
class ComponentDecomposition:
    spec: object
    components: tuple
    free: tuple = ()

    def __len__(self):
        return len(self.components)

    def specials(self) -> list:
        return [i for i, c in enumerate(self.components) if c.special]


def _merge(a: Component, b: Component) -> Component:
    return Component(a.factor, a.constant + b.constant, a.variables + b.variables)


def _push(stack: list, c: Component) -> None:
    while True:
        if not c.special and c.constant.is_identity():
            return
        if stack and stack[-1].factor == c.factor:
            c = _merge(stack.pop(), c)
            continue
        stack.append(c)
        return


def decompose(word: AnnotatedWord) -> ComponentDecomposition:
    """Split the cyclic word into maximal same-factor runs.

    The word is rotated to start at its first variable letter (a conjugation),
    identity runs are dropped and the two ends are merged when they share a
    factor.
    """
    letters = list(word.letters)
    first = next((i for i, l in enumerate(letters) if isinstance(l, VariableLetter)), 0)
    letters = letters[first:] + letters[:first]
    spec = word.spec
    stack: list = []
    for l in letters:
        if isinstance(l, VariableLetter):
            c = Component(l.factor, spec.signature(l.factor).identity(), ((l.variable, l.base),))
        else:
            c = Component(l.factor, l.syllable.value)
        _push(stack, c)
    # close the cycle
    while len(stack) >= 2 and stack[0].factor == stack[-1].factor:
        merged = _merge(stack.pop(), stack[0])
        stack.pop(0)
        if merged.special or not merged.constant.is_identity():
            stack.insert(0, merged)
    return ComponentDecomposition(spec, tuple(stack), word.free)


# ---------------------------------------------------------------------------
# region plans


@dataclass(frozen=True)
class RegionPlan:
    """Blocks of component indices (increasing) and one side label per block gap.

    ``labels[b][i]`` labels the internal side following member ``i`` of block ``b``.
    """

    blocks: tuple
    labels: tuple

    def block_of(self) -> dict:
        return {m: b for b, blk in enumerate(self.blocks) for m in blk}


def trivial_side_labels(dec: ComponentDecomposition) -> dict:
    spec = dec.spec
    return {f: (spec.signature(f).identity(),) for f in range(len(spec.factors))}


def _gap_has_special(prefix, m: int, p: int, q: int) -> bool:
    """Whether the cyclic open interval ``(p, q)`` holds a special component."""
    if p < q:
        return prefix[q] - prefix[p + 1] > 0
    return prefix[m] - prefix[p + 1] + prefix[q] > 0


def _crosses(x: tuple, y: tuple) -> bool:
    """Whether blocks ``x`` and ``y`` (sorted, disjoint) cross in the cyclic order."""
    lo, hi = x[0], x[-1]
    # y must sit inside one gap of x
    gaps = set()
    for j in y:
        if j < lo or j > hi:
            gaps.add(len(x))
        else:
            gaps.add(sum(1 for i in x if i < j))
    return len(gaps) > 1


def enumerate_region_plans(
    dec: ComponentDecomposition, side_labels: dict = None, prune: bool = False
) -> Iterator[RegionPlan]:
    """Yield every complete non-crossing plan in a fixed order.

    Each block lies in one factor and holds at least one special component;
    every special component is covered; plain components may join a block or
    stay outside.  Blocks are generated around the lowest uncovered special
    component, so each plan appears once.  With ``prune`` a plan is dropped
    when some block gap with trivial label contains no special component,
    since the face inside it is then a nonempty reduced word.
    """
    comps = dec.components
    m = len(comps)
    if side_labels is None:
        side_labels = trivial_side_labels(dec)
    prefix = [0]
    for c in comps:
        prefix.append(prefix[-1] + c.special)
    specials = [i for i, c in enumerate(comps) if c.special]
    nspec = len(specials)
    # with pruning a block of k > 1 members needs k further specials in its gaps
    max_size = m if not prune or m == 1 else max(1, nspec - 1)
    trivial = {f: all(l.is_identity() for l in labs) for f, labs in side_labels.items()}

    def gaps_ok(blk) -> bool:
        if not prune or m == 1:
            return True
        if not trivial[comps[blk[0]].factor]:
            return True  # checked per label choice below
        k = len(blk)
        return all(_gap_has_special(prefix, m, blk[i], blk[(i + 1) % k]) for i in range(k))

    def blocks_for(anchor, used, chosen):
        f = comps[anchor].factor
        pool = [j for j in range(m) if j != anchor and j not in used and comps[j].factor == f]
        for size in range(0, max_size):
            for extra in itertools.combinations(pool, size):
                blk = tuple(sorted((anchor,) + extra))
                if any(_crosses(blk, other) for other in chosen):
                    continue
                if gaps_ok(blk):
                    yield blk

    def plans(used, chosen):
        anchor = next((i for i in specials if i not in used), None)
        if anchor is None:
            yield tuple(sorted(chosen))
            return
        for blk in blocks_for(anchor, used, chosen):
            yield from plans(used | set(blk), chosen + [blk])

    for blocks in plans(frozenset(), []):
        choices = [itertools.product(side_labels[comps[b[0]].factor], repeat=len(b)) for b in blocks]
        for labels in itertools.product(*choices):
            if prune and m > 1:
                bad = False
                for b, lab in zip(blocks, labels):
                    for i, l in enumerate(lab):
                        q = b[(i + 1) % len(b)]
                        if l.is_identity() and not _gap_has_special(prefix, m, b[i], q):
                            bad = True
                if bad:
                    continue
            yield RegionPlan(tuple(blocks), tuple(labels))


# ---------------------------------------------------------------------------
# branches


@dataclass
class Branch:
    """One disjunct: peripheral rows per factor and variable-free words that must be 1."""

    spec: object
    rows: tuple  # ((factor, Row), ...)
    checks: tuple  # FreeProductElement, ...
    plan: Optional[RegionPlan] = None
    free: tuple = ()

    def variable_map(self) -> dict:
        out = {}
        for idx, (_, row) in enumerate(self.rows):
            for var, _ in row.terms:
                out[var] = idx
        return out

    def checks_pass(self) -> bool:
        return all(c.is_identity() for c in self.checks)

    def systems(self) -> dict:
        """Rows grouped into one system per factor."""
        groups: dict = {}
        for f, row in self.rows:
            groups.setdefault(f, []).append(row)
        return {f: DiophantineSystem(self.spec.signature(f), rows) for f, rows in sorted(groups.items())}

    def key(self):
        rows = tuple(
            (f, r.constant.coords, tuple((v, c.coords) for v, c in r.terms)) for f, r in self.rows
        )
        return rows, tuple(c.syllables for c in self.checks)

    def to_json(self) -> dict:
        spec = self.spec
        rows = []
        for f, row in self.rows:
            rows.append(
                {
                    "factor": spec.factor_name(f),
                    "constant": list(row.constant.coords),
                    "terms": [{"variable": v, "coefficient": list(c.coords)} for v, c in row.terms],
                }
            )
        return {
            "peripheral_rows": rows,
            "trivial_checks": [format_element(c) for c in self.checks],
            "variable_map": self.variable_map(),
        }


@dataclass
class DisjunctionPhi:
    branches: list = field(default_factory=list)
    free: tuple = ()
    explored: int = 0  # plans examined before face checks

    def to_json(self) -> dict:
        return {
            "branches": [b.to_json() for b in self.branches],
            "free_variables": list(self.free),
            "plans_examined": self.explored,
        }


def plan_to_system(plan: RegionPlan, dec: ComponentDecomposition) -> Branch:
    """Rows for the regions and face words for everything outside them.

    Faces are the cycles of the map sending an outside component to its
    successor and a block member to the successor of the previous member of
    its block; crossing the side into a face reads the inverse side label.
    """
    comps = dec.components
    m = len(comps)
    spec = dec.spec
    rows = []
    for blk, labels in zip(plan.blocks, plan.labels):
        f = comps[blk[0]].factor
        const = spec.signature(f).identity()
        terms = []
        for j, lab in zip(blk, labels):
            const = const + comps[j].constant + lab
            terms.extend(comps[j].variables)
        rows.append((f, Row(const, tuple(terms))))

    where = {}
    for b, blk in enumerate(plan.blocks):
        for i, j in enumerate(blk):
            prev = i - 1 if i else len(blk) - 1
            where[j] = (blk[prev], plan.labels[b][prev])

    checks = []
    seen = [False] * m
    for start in range(m):
        if seen[start]:
            continue
        letters, pos, has_plain = [], start, False
        while not seen[pos]:
            seen[pos] = True
            if pos in where:
                prev, lab = where[pos]
                if not lab.is_identity():
                    letters.append(Syllable(comps[pos].factor, -lab))
                pos = (prev + 1) % m
            else:
                has_plain = True
                letters.append(Syllable(comps[pos].factor, comps[pos].constant))
                pos = (pos + 1) % m
        if has_plain or letters:
            checks.append(normalize(spec, letters))
    return Branch(spec, tuple(rows), tuple(checks), plan, dec.free)


def reduce(eq, side_labels: dict = None) -> DisjunctionPhi:
    """Finite disjunction of abelian systems equisolvable with ``eq``.

    Branches with a failing face check are removed and duplicates merged.
    """
    word = parabolic_rewrite(eq)
    dec = decompose(word)
    phi = DisjunctionPhi(free=dec.free)
    if not dec.components:
        phi.branches.append(Branch(dec.spec, (), (), None, dec.free))
        return phi
    seen = set()
    for plan in enumerate_region_plans(dec, side_labels, prune=True):
        phi.explored += 1
        br = plan_to_system(plan, dec)
        if not br.checks_pass():
            continue
        k = br.key()
        if k in seen:
            continue
        seen.add(k)
        phi.branches.append(br)
    return phi
