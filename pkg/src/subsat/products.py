"""Ideals, filters, reduced products, and coherent-system embeddings.

Filters are stored extensionally as families of subsets of the index
family; this stays tractable because index families here have at most a
few dozen members.  Reduced products materialize choice functions and
quotient them by union-find over the filter-agreement relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .structures import (
    ESCAPES,
    CapExceededError,
    Structure,
    StructureFormatError,
    induced_fragment,
    induced_substructure,
)

DEFAULT_PRODUCT_CAP = 1_000_000


def _set_label(s: frozenset) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def _family_order(family: Iterable[frozenset]) -> list[frozenset]:
    return sorted(family, key=lambda s: (len(s), sorted(s)))


def _powerset(items) -> Iterable[frozenset]:
    items = sorted(items)
    for k in range(len(items) + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


@dataclass(frozen=True)
class IndexIdeal:
    """An ideal of subsets of a base universe, covering it."""

    universe: frozenset
    sets: frozenset

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(int(x) for x in self.universe))
        object.__setattr__(
            self, "sets", frozenset(frozenset(int(x) for x in s) for s in self.sets)
        )


@dataclass(frozen=True)
class IndexFilter:
    """A filter over an index family, stored as an explicit family of subsets."""

    family: frozenset
    sets: frozenset

    def __post_init__(self):
        object.__setattr__(
            self, "family", frozenset(frozenset(int(x) for x in s) for s in self.family)
        )
        object.__setattr__(
            self,
            "sets",
            frozenset(frozenset(frozenset(int(x) for x in s) for s in member)
                      for member in self.sets),
        )


def powerset_ideal(universe: Iterable[int]) -> IndexIdeal:
    universe = frozenset(universe)
    return IndexIdeal(universe, frozenset(_powerset(universe)))


def validate_ideal(ideal: IndexIdeal) -> list[str]:
    """Violations of: downward closure, union closure, covering the universe."""
    violations = []
    sets = ideal.sets
    union = frozenset().union(*sets) if sets else frozenset()
    if union != ideal.universe:
        violations.append(
            f"union of members is {_set_label(union)}, not the universe "
            f"{_set_label(ideal.universe)}"
        )
    for s in _family_order(sets):
        for x in sorted(s):
            if s - {x} not in sets:
                violations.append(
                    f"not downward closed: {_set_label(s)} present but "
                    f"{_set_label(s - {x})} missing"
                )
    for a, b in itertools.combinations(_family_order(sets), 2):
        if a | b not in sets:
            violations.append(
                f"not union closed: {_set_label(a)} | {_set_label(b)} missing"
            )
    return violations


def validate_filter(filt: IndexFilter) -> list[str]:
    """Violations of: nonemptiness, upward closure, intersection closure, properness."""
    violations = []
    members = filt.sets
    if not members:
        violations.append("filter is empty")
        return violations
    family = filt.family
    for member in members:
        if not member <= family:
            violations.append("filter member contains sets outside the index family")
    if frozenset() in members:
        violations.append("filter contains the empty set (not proper)")
    member_list = sorted(members, key=lambda m: (len(m), sorted(map(sorted, m))))
    for member in member_list:
        for extra in family - member:
            if member | {extra} not in members:
                violations.append(
                    f"not upward closed: adding {_set_label(extra)} to a member "
                    "leaves the filter"
                )
    for a, b in itertools.combinations(member_list, 2):
        if a & b not in members:
            violations.append("not closed under pairwise intersection")
    return violations


def upper_cone_filter(ideal_or_family) -> IndexFilter:
    """The filter over the index family generated by upper cones of (I, subset).

    Members are exactly the subsets of I containing some cone
    {j in I : j >= i}; defined whenever I is directed, which valid ideals
    always are.
    """
    if isinstance(ideal_or_family, IndexIdeal):
        family = frozenset(ideal_or_family.sets)
    else:
        family = frozenset(frozenset(s) for s in ideal_or_family)
    ordered = _family_order(family)
    for a, b in itertools.combinations(ordered, 2):
        if not any(a | b <= c for c in family):
            raise ValueError(
                f"index family is not directed: no upper bound for "
                f"{_set_label(a)} and {_set_label(b)}"
            )
    cones = [frozenset(j for j in family if i <= j) for i in ordered]
    members = frozenset(
        member for member in _powerset(family) if any(c <= member for c in cones)
    )
    return IndexFilter(family, members)


def principal_filter(family: Iterable[frozenset], at: frozenset) -> IndexFilter:
    """The principal ultrafilter {S : at in S} over the family."""
    family = frozenset(frozenset(s) for s in family)
    at = frozenset(at)
    if at not in family:
        raise ValueError("principal element must belong to the index family")
    members = frozenset(m for m in _powerset(family) if at in m)
    return IndexFilter(family, members)


def extend_filter(filt: IndexFilter, extra) -> Optional[IndexFilter]:
    """The filter generated by the given filter and one extra set, or None if improper."""
    extra = frozenset(frozenset(s) for s in extra)
    if not extra <= filt.family:
        raise ValueError("extension set must be a subset of the index family")
    generated = {m & extra for m in filt.sets} | set(filt.sets)
    if frozenset() in generated:
        return None
    members = set()
    for base in generated:
        for member in _powerset(filt.family):
            if base <= member:
                members.add(member)
    return IndexFilter(filt.family, frozenset(members))


# --- reduced products --------------------------------------------------------


@dataclass
class ReducedProduct:
    """Quotient of a direct product of structures by filter agreement.

    ``index_family`` fixes the coordinate order; ``choice_functions`` are
    all elements of the direct product; ``classes`` groups their indices;
    ``structure`` is the quotient with universe {0..#classes-1}.
    """

    index_family: tuple
    components: tuple
    filter: IndexFilter
    structure: Structure
    classes: tuple
    choice_functions: tuple
    _class_of: dict = field(repr=False, default_factory=dict)

    def class_of_function(self, cf: tuple) -> int:
        return self._class_of[tuple(cf)]


def reduced_product(
    components: Mapping[frozenset, Structure],
    filt: IndexFilter,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> ReducedProduct:
    """Construct the reduced product of ``components`` modulo ``filt``.

    Components are indexed by the filter's family; all components must
    share a signature.  Predicates hold on classes iff the agreement set
    of componentwise truth belongs to the filter.
    """
    components = {frozenset(k): v for k, v in components.items()}
    if frozenset(components) != filt.family:
        raise ValueError("components must be indexed exactly by the filter's family")
    order = _family_order(filt.family)
    comps = [components[i] for i in order]
    if not comps:
        raise ValueError("empty index family")
    sig = comps[0].signature
    if any(c.signature != sig for c in comps):
        raise ValueError("components must share one signature")
    total = 1
    for c in comps:
        total *= c.size
        if total > cap:
            raise CapExceededError(total, cap)
    if total == 0:
        raise ValueError("components must be nonempty")

    cfs = list(itertools.product(*[range(c.size) for c in comps]))
    m = len(cfs)
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    filter_sets = filt.sets
    for a in range(m):
        for b in range(a + 1, m):
            if find(a) == find(b):
                continue
            agreement = frozenset(
                order[k] for k in range(len(order)) if cfs[a][k] == cfs[b][k]
            )
            if agreement in filter_sets:
                parent[find(b)] = find(a)

    groups: dict[int, list[int]] = {}
    for idx in range(m):
        groups.setdefault(find(idx), []).append(idx)
    classes = tuple(tuple(groups[root]) for root in sorted(groups, key=lambda r: min(groups[r])))
    class_of = {}
    for cid, members in enumerate(classes):
        for idx in members:
            class_of[cfs[idx]] = cid

    size = len(classes)
    reps = [cfs[members[0]] for members in classes]

    preds = {}
    for name, arity in sig.predicates:
        holds = set()
        for args in itertools.product(range(size), repeat=arity):
            agreement = frozenset(
                order[k]
                for k in range(len(order))
                if tuple(reps[a][k] for a in args) in comps[k].predicates[name]
            )
            if agreement in filter_sets:
                holds.add(args)
        preds[name] = frozenset(holds)

    funcs = {}
    for name, arity in sig.functions:
        table = {}
        for args in itertools.product(range(size), repeat=arity):
            image = tuple(
                comps[k].functions[name][tuple(reps[a][k] for a in args)]
                for k in range(len(order))
            )
            table[args] = class_of[image]
        funcs[name] = table

    consts = {}
    for name in sig.constants:
        image = tuple(c.constants[name] for c in comps)
        consts[name] = class_of[image]

    structure = Structure(sig, size, preds, funcs, consts)
    return ReducedProduct(
        tuple(order), tuple(comps), filt, structure, classes, tuple(cfs), class_of
    )


def check_product_well_definedness(rp: ReducedProduct, swaps: int, rng) -> list[str]:
    """Predicate truth must not depend on class representatives.

    Performs random representative swaps and recomputes the agreement-set
    test; any deviation from the product's tables is reported.
    """
    violations = []
    sig = rp.structure.signature
    order = rp.index_family
    size = rp.structure.size
    if not sig.predicates:
        return violations
    for _ in range(swaps):
        name, arity = sig.predicates[rng.randrange(len(sig.predicates))]
        args = tuple(rng.randrange(size) for _ in range(arity))
        picks = [
            rp.choice_functions[rp.classes[a][rng.randrange(len(rp.classes[a]))]]
            for a in args
        ]
        agreement = frozenset(
            order[k]
            for k in range(len(order))
            if tuple(p[k] for p in picks) in rp.components[k].predicates[name]
        )
        recomputed = agreement in rp.filter.sets
        stored = args in rp.structure.predicates[name]
        if recomputed != stored:
            violations.append(
                f"{name}{args}: representative swap flips truth "
                f"({stored} -> {recomputed})"
            )
    return violations


# --- coherent systems --------------------------------------------------------


@dataclass
class CoherentSystem:
    """Component structures indexed by subsets of a parent's universe.

    For each index set i, ``injections[i]`` embeds i into the universe of
    ``components[i]``; coherence means the fragments of the parent and of
    the component given by i coincide under that injection.
    """

    parent: Structure
    components: dict
    injections: dict

    def __post_init__(self):
        self.components = {frozenset(k): v for k, v in self.components.items()}
        self.injections = {
            frozenset(k): {int(a): int(b) for a, b in dict(v).items()}
            for k, v in self.injections.items()
        }

    @property
    def index_family(self) -> frozenset:
        return frozenset(self.components)


def induced_system(parent: Structure, family: Iterable[frozenset],
                   empty_component: Optional[Structure] = None) -> CoherentSystem:
    """Coherent system whose components are the induced substructures.

    Every nonempty index set must be a submodel carrier of the parent.
    The empty index gets a one-point default component (all predicates
    empty, functions identity) unless one is supplied.
    """
    components = {}
    injections = {}
    for i in family:
        i = frozenset(i)
        if not i:
            if empty_component is None:
                sig = parent.signature
                empty_component = Structure(
                    sig,
                    1,
                    {name: frozenset() for name, _ in sig.predicates},
                    {
                        name: {t: 0 for t in itertools.product(range(1), repeat=arity)}
                        for name, arity in sig.functions
                    },
                    {name: 0 for name in sig.constants},
                )
            components[i] = empty_component
            injections[i] = {}
            continue
        components[i] = induced_substructure(parent, i)
        injections[i] = {e: rank for rank, e in enumerate(sorted(i))}
    return CoherentSystem(parent, components, injections)


def coherence_check(system: CoherentSystem) -> list[str]:
    """Violations of the coherence conditions, each naming the offending index."""
    violations = []
    parent = system.parent
    for i in _family_order(system.index_family):
        label = _set_label(i)
        comp = system.components[i]
        inj = system.injections[i]
        if set(inj) != set(i):
            violations.append(f"i={label}: injection not defined exactly on i")
            continue
        values = list(inj.values())
        if len(set(values)) != len(values):
            violations.append(f"i={label}: injection is not injective")
            continue
        if not all(0 <= v < comp.size for v in values):
            violations.append(f"i={label}: injection leaves the component universe")
            continue
        frag_parent = induced_fragment(parent, i)
        image = frozenset(values)
        frag_comp = induced_fragment(comp, image)
        for name, arity in parent.signature.predicates:
            for t in itertools.product(sorted(i), repeat=arity):
                here = t in frag_parent.predicates[name]
                there = tuple(inj[x] for x in t) in frag_comp.predicates[name]
                if here != there:
                    violations.append(f"i={label}: fragments disagree on {name}{t}")
        for name, arity in parent.signature.functions:
            for t in itertools.product(sorted(i), repeat=arity):
                pv = frag_parent.functions[name][t]
                cv = frag_comp.functions[name][tuple(inj[x] for x in t)]
                if (pv is ESCAPES) != (cv is ESCAPES):
                    violations.append(
                        f"i={label}: ESCAPES patterns differ at {name}{t}"
                    )
                elif pv is not ESCAPES and inj[pv] != cv:
                    violations.append(f"i={label}: fragments disagree at {name}{t}")
        for name in parent.signature.constants:
            pv = frag_parent.constants[name]
            cv = frag_comp.constants[name]
            if (pv is ESCAPES) != (cv is ESCAPES):
                violations.append(
                    f"i={label}: constant {name} inside/outside mismatch"
                )
            elif pv is not ESCAPES and inj[pv] != cv:
                violations.append(f"i={label}: constant {name} maps differently")
    return violations


@dataclass
class EmbeddingReport:
    """Canonical-map verification: injectivity, atoms, functions, constants."""

    mapping: tuple
    product: ReducedProduct
    injective: bool
    predicates_ok: bool
    functions_ok: bool
    constants_ok: bool
    violations: tuple

    @property
    def passed(self) -> bool:
        return (
            self.injective
            and self.predicates_ok
            and self.functions_ok
            and self.constants_ok
        )


def canonical_embedding(
    system: CoherentSystem,
    filt: IndexFilter,
    b: Optional[Mapping[frozenset, int]] = None,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> EmbeddingReport:
    """Map each parent element a to the class of its canonical choice function.

    The choice function sends index i to the image of a when a is in i and
    to a fixed fallback element of the component otherwise.  Requires a
    coherent system and a filter extending the upper-cone filter; the
    report verifies injectivity and atomic preservation both ways.
    """
    family = system.index_family
    if filt.family != family:
        raise ValueError("filter family must match the system's index family")
    covered = frozenset().union(*family) if family else frozenset()
    if covered != frozenset(range(system.parent.size)):
        raise ValueError("index family must cover the parent universe")
    problems = coherence_check(system)
    if problems:
        raise ValueError("system is not coherent: " + "; ".join(problems[:3]))
    for i in _family_order(family):
        if system.components[i].size < 1:
            raise ValueError(f"component at {_set_label(i)} is empty")
    cone = upper_cone_filter(family)
    if not cone.sets <= filt.sets:
        raise ValueError("filter does not extend the upper-cone filter")

    fallback = {frozenset(k): int(v) for k, v in (b or {}).items()}
    for i in family:
        fallback.setdefault(i, 0)
        if not 0 <= fallback[i] < system.components[i].size:
            raise ValueError(f"fallback element out of range at {_set_label(i)}")

    rp = reduced_product(system.components, filt, cap=cap)
    order = rp.index_family
    parent = system.parent

    mapping = []
    for a in range(parent.size):
        cf = tuple(
            system.injections[i][a] if a in i else fallback[i] for i in order
        )
        mapping.append(rp.class_of_function(cf))
    mapping = tuple(mapping)

    violations = []
    injective = len(set(mapping)) == parent.size
    if not injective:
        violations.append("canonical map is not injective")

    predicates_ok = True
    for name, arity in parent.signature.predicates:
        rel_a = parent.predicates[name]
        rel_b = rp.structure.predicates[name]
        for t in itertools.product(range(parent.size), repeat=arity):
            if (t in rel_a) != (tuple(mapping[x] for x in t) in rel_b):
                predicates_ok = False
                violations.append(f"atom {name}{t} not preserved and reflected")

    functions_ok = True
    for name, arity in parent.signature.functions:
        for t in itertools.product(range(parent.size), repeat=arity):
            lhs = mapping[parent.functions[name][t]]
            rhs = rp.structure.functions[name][tuple(mapping[x] for x in t)]
            if lhs != rhs:
                functions_ok = False
                violations.append(f"function {name}{t} does not commute")

    constants_ok = True
    for name in parent.signature.constants:
        if mapping[parent.constants[name]] != rp.structure.constants[name]:
            constants_ok = False
            violations.append(f"constant {name} not preserved")

    return EmbeddingReport(
        mapping, rp, injective, predicates_ok, functions_ok, constants_ok,
        tuple(violations),
    )


# --- ideal/filter text format -------------------------------------------------
#
# "ideal" block: one member per line as whitespace-separated integers, the
# keyword "empty" for the empty set, terminated by "end".  "filter" block:
# one member of the filter per line, given as indices into the ideal block's
# members (0-based, in file order), terminated by "end".


def parse_ideal_file(text: str) -> tuple[IndexIdeal, Optional[IndexFilter], list]:
    """Parse an ideal and optional filter; returns the ideal's member order too."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped.split()))
    pos = 0
    if not lines or lines[0][1] != ["ideal"]:
        raise StructureFormatError("expected 'ideal' block", lines[0][0] if lines else 1)
    pos = 1
    members: list[frozenset] = []
    while pos < len(lines) and lines[pos][1] != ["end"]:
        lineno, toks = lines[pos]
        if toks == ["empty"]:
            members.append(frozenset())
        else:
            try:
                members.append(frozenset(int(t) for t in toks))
            except ValueError:
                raise StructureFormatError("ideal members are integer lists", lineno)
        pos += 1
    if pos >= len(lines):
        raise StructureFormatError("ideal block not terminated by 'end'", lines[-1][0])
    pos += 1
    universe = frozenset().union(*members) if members else frozenset()
    ideal = IndexIdeal(universe, frozenset(members))

    filt = None
    if pos < len(lines):
        lineno, toks = lines[pos]
        if toks != ["filter"]:
            raise StructureFormatError("expected 'filter' block", lineno)
        pos += 1
        filter_members = []
        while pos < len(lines) and lines[pos][1] != ["end"]:
            lineno, toks = lines[pos]
            try:
                indices = [int(t) for t in toks]
            except ValueError:
                raise StructureFormatError(
                    "filter members are lists of ideal-member indices", lineno
                )
            if any(ix < 0 or ix >= len(members) for ix in indices):
                raise StructureFormatError("filter index out of range", lineno)
            filter_members.append(frozenset(members[ix] for ix in indices))
            pos += 1
        if pos >= len(lines):
            raise StructureFormatError("filter block not terminated by 'end'", lines[-1][0])
        pos += 1
        filt = IndexFilter(frozenset(members), frozenset(filter_members))
    if pos < len(lines):
        raise StructureFormatError("trailing content after blocks", lines[pos][0])
    return ideal, filt, members


def render_ideal_file(ideal: IndexIdeal, filt: Optional[IndexFilter] = None) -> str:
    members = _family_order(ideal.sets)
    out = ["ideal"]
    for m in members:
        out.append("empty" if not m else " ".join(str(x) for x in sorted(m)))
    out.append("end")
    if filt is not None:
        index = {m: i for i, m in enumerate(members)}
        out.append("filter")
        for member in sorted(filt.sets, key=lambda m: sorted(index[s] for s in m)):
            out.append(" ".join(str(index[s]) for s in sorted(member, key=lambda s: index[s])))
        out.append("end")
    return "\n".join(out) + "\n"
