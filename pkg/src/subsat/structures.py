"""Finite signatures, structures, fragments, and isomorphism machinery.

Universes are always initial segments {0..n-1}.  Structures are built
permissively and checked by ``validate_structure`` (violations are data,
not exceptions).  Fragments record function values that leave the carrier
with the ``ESCAPES`` marker, which is what lets a one-point fragment
distinguish "fixed point inside" from "value leaves the carrier".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

DEFAULT_ENUMERATION_CAP = 5_000_000


class CapExceededError(RuntimeError):
    """Raised when an enumeration would exceed its configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"enumeration of {count} labelled structures exceeds the cap of {cap}"
        )
        self.count = count
        self.cap = cap


class StructureFormatError(ValueError):
    """Parse error in the structure/ideal/filter text formats."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.message = message
        super().__init__(message if line is None else f"line {line}: {message}")


class _Escapes:
    """Singleton marker: a function/constant value outside a fragment's carrier."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ESCAPES"

    def __reduce__(self):
        return (_Escapes, ())


ESCAPES = _Escapes()


@dataclass(frozen=True)
class Signature:
    """Predicate/function/constant symbols with arities.

    Constants are listed separately from functions; symbol names must be
    pairwise distinct and relation/function arities positive.
    """

    predicates: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "predicates", tuple((str(n), int(a)) for n, a in self.predicates)
        )
        object.__setattr__(
            self, "functions", tuple((str(n), int(a)) for n, a in self.functions)
        )
        object.__setattr__(self, "constants", tuple(str(n) for n in self.constants))
        names = (
            [n for n, _ in self.predicates]
            + [n for n, _ in self.functions]
            + list(self.constants)
        )
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be pairwise distinct")
        for name, arity in self.predicates + self.functions:
            if arity < 1:
                raise ValueError(f"arity of {name} must be a positive integer")

    @property
    def is_predicate_only(self) -> bool:
        return not self.functions and not self.constants

    def predicate_arity(self, name: str) -> Optional[int]:
        for n, a in self.predicates:
            if n == name:
                return a
        return None

    def function_arity(self, name: str) -> Optional[int]:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def has_constant(self, name: str) -> bool:
        return name in self.constants

    def symbol_names(self) -> set[str]:
        return (
            {n for n, _ in self.predicates}
            | {n for n, _ in self.functions}
            | set(self.constants)
        )


def _normalize_predicates(sig: Signature, given) -> dict:
    preds = {}
    for name, tuples in (given or {}).items():
        preds[name] = frozenset(tuple(int(x) for x in t) for t in tuples)
    for name, _ in sig.predicates:
        preds.setdefault(name, frozenset())
    return preds


def _normalize_functions(sig: Signature, given) -> dict:
    funcs = {}
    for name, table in (given or {}).items():
        funcs[name] = {
            tuple(int(x) for x in k): int(v) for k, v in dict(table).items()
        }
    for name, _ in sig.functions:
        funcs.setdefault(name, {})
    return funcs


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite model: universe {0..size-1} with total interpretations.

    Construction is permissive; use ``validate_structure`` to obtain the
    list of invariant violations.
    """

    signature: Signature
    size: int
    predicates: Mapping[str, frozenset] = None
    functions: Mapping[str, Mapping[tuple, int]] = None
    constants: Mapping[str, int] = None

    def __post_init__(self):
        object.__setattr__(
            self, "predicates", _normalize_predicates(self.signature, self.predicates)
        )
        object.__setattr__(
            self, "functions", _normalize_functions(self.signature, self.functions)
        )
        object.__setattr__(
            self,
            "constants",
            {str(n): int(v) for n, v in dict(self.constants or {}).items()},
        )

    def key(self):
        sig = self.signature
        return (
            self.size,
            tuple(
                tuple(sorted(self.predicates.get(n, frozenset())))
                for n, _ in sig.predicates
            ),
            tuple(
                tuple(sorted(self.functions.get(n, {}).items()))
                for n, _ in sig.functions
            ),
            tuple(self.constants.get(n) for n in sig.constants),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Structure)
            and self.signature == other.signature
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.signature, self.key()))

    def __repr__(self):
        return f"Structure(size={self.size}, key={self.key()!r})"


@dataclass(frozen=True, eq=False)
class Fragment:
    """A partial submodel: carrier subset with inherited interpretations.

    Function and constant values outside the carrier are recorded as
    ``ESCAPES``.  The empty carrier is allowed as data but never counts
    as a submodel.
    """

    signature: Signature
    parent_size: int
    carrier: frozenset
    predicates: Mapping[str, frozenset] = None
    functions: Mapping[str, Mapping[tuple, object]] = None
    constants: Mapping[str, object] = None

    def __post_init__(self):
        object.__setattr__(self, "carrier", frozenset(int(x) for x in self.carrier))
        object.__setattr__(
            self, "predicates", _normalize_predicates(self.signature, self.predicates)
        )
        funcs = {}
        for name, table in (self.functions or {}).items():
            funcs[name] = {
                tuple(int(x) for x in k): (v if v is ESCAPES else int(v))
                for k, v in dict(table).items()
            }
        for name, _ in self.signature.functions:
            funcs.setdefault(name, {})
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(
            self,
            "constants",
            {
                str(n): (v if v is ESCAPES else int(v))
                for n, v in dict(self.constants or {}).items()
            },
        )

    @property
    def has_escapes(self) -> bool:
        for table in self.functions.values():
            if any(v is ESCAPES for v in table.values()):
                return True
        return any(v is ESCAPES for v in self.constants.values())

    def key(self):
        sig = self.signature

        def enc(v):
            return -1 if v is ESCAPES else v

        return (
            tuple(sorted(self.carrier)),
            tuple(
                tuple(sorted(self.predicates.get(n, frozenset())))
                for n, _ in sig.predicates
            ),
            tuple(
                tuple(sorted((k, enc(v)) for k, v in self.functions.get(n, {}).items()))
                for n, _ in sig.functions
            ),
            tuple(enc(self.constants.get(n)) for n in sig.constants),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Fragment)
            and self.signature == other.signature
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.signature, self.key()))

    def __repr__(self):
        return f"Fragment(carrier={sorted(self.carrier)}, key={self.key()!r})"


@dataclass(frozen=True)
class GeneratedSubmodel:
    """Carrier of a generated submodel plus its renamed copy on {0..m-1}."""

    carrier: tuple[int, ...]
    structure: Structure


def validate_structure(sig: Signature, s: Structure) -> list[str]:
    """Return the list of invariant violations of ``s`` against ``sig``.

    Empty list iff ``s`` is a well-formed structure for ``sig``.
    """
    violations = []
    if s.signature != sig:
        violations.append("structure signature differs from the given signature")
    n = s.size
    if n < 1:
        violations.append("universe must be nonempty")

    def in_range(x):
        return isinstance(x, int) and 0 <= x < n

    declared_preds = dict(sig.predicates)
    for name, tuples in s.predicates.items():
        if name not in declared_preds:
            violations.append(f"unknown predicate {name}")
            continue
        arity = declared_preds[name]
        for t in sorted(tuples):
            if len(t) != arity:
                violations.append(f"{name} tuple {t} has wrong arity")
            elif not all(in_range(x) for x in t):
                violations.append(f"{name} tuple {t} out of range")

    declared_funcs = dict(sig.functions)
    for name, table in s.functions.items():
        if name not in declared_funcs:
            violations.append(f"unknown function {name}")
            continue
        arity = declared_funcs[name]
        for t in itertools.product(range(n), repeat=arity):
            if t not in table:
                violations.append(f"{name} not total at {t}")
        for t, v in sorted(table.items()):
            if len(t) != arity or not all(in_range(x) for x in t):
                violations.append(f"{name} argument tuple {t} out of range")
            elif not in_range(v):
                violations.append(f"{name}{t} value {v} out of range")

    for name in sig.constants:
        if name not in s.constants:
            violations.append(f"constant {name} uninterpreted")
        elif not in_range(s.constants[name]):
            violations.append(f"constant {name} value out of range")
    for name in s.constants:
        if name not in sig.constants:
            violations.append(f"unknown constant {name}")
    return violations


def induced_fragment(s: Structure, carrier: Iterable[int]) -> Fragment:
    """The fragment of ``s`` on ``carrier``: inherited predicates, partial functions.

    A function value is recorded iff it lies inside the carrier, else ESCAPES.
    """
    carrier = frozenset(int(x) for x in carrier)
    if not all(0 <= x < s.size for x in carrier):
        raise ValueError(f"carrier {sorted(carrier)} not within universe of size {s.size}")
    elems = sorted(carrier)
    preds = {
        name: frozenset(t for t in s.predicates[name] if all(x in carrier for x in t))
        for name, _ in s.signature.predicates
    }
    funcs = {}
    for name, arity in s.signature.functions:
        table = {}
        for t in itertools.product(elems, repeat=arity):
            v = s.functions[name][t]
            table[t] = v if v in carrier else ESCAPES
        funcs[name] = table
    consts = {}
    for name in s.signature.constants:
        v = s.constants[name]
        consts[name] = v if v in carrier else ESCAPES
    return Fragment(s.signature, s.size, carrier, preds, funcs, consts)


def is_submodel_carrier(s: Structure, carrier: Iterable[int]) -> bool:
    """True iff carrier is nonempty, contains all constants, and is closed under functions."""
    carrier = frozenset(carrier)
    if not carrier:
        return False
    if not all(v in carrier for v in s.constants.values()):
        return False
    elems = sorted(carrier)
    for name, arity in s.signature.functions:
        table = s.functions[name]
        for t in itertools.product(elems, repeat=arity):
            if table[t] not in carrier:
                return False
    return True


def induced_substructure(s: Structure, carrier: Iterable[int]) -> Structure:
    """The substructure on a submodel carrier, renamed onto {0..m-1}.

    The renaming is order-preserving on the carrier.
    """
    carrier = frozenset(carrier)
    if not is_submodel_carrier(s, carrier):
        raise ValueError(f"carrier {sorted(carrier)} is not a submodel carrier")
    elems = sorted(carrier)
    index = {e: i for i, e in enumerate(elems)}
    preds = {
        name: frozenset(
            tuple(index[x] for x in t)
            for t in s.predicates[name]
            if all(x in carrier for x in t)
        )
        for name, _ in s.signature.predicates
    }
    funcs = {
        name: {
            tuple(index[x] for x in t): index[s.functions[name][t]]
            for t in itertools.product(elems, repeat=arity)
        }
        for name, arity in s.signature.functions
    }
    consts = {name: index[s.constants[name]] for name in s.signature.constants}
    return Structure(s.signature, len(elems), preds, funcs, consts)


def generated_carrier(s: Structure, seed: Iterable[int]) -> frozenset:
    """Least superset of seed (plus all constants) closed under all functions."""
    current = set(int(x) for x in seed)
    current.update(s.constants.values())
    if not current:
        raise ValueError("empty seed with a constant-free signature generates nothing")
    if not all(0 <= x < s.size for x in current):
        raise ValueError("seed element out of range")
    while True:
        added = set()
        elems = sorted(current)
        for name, arity in s.signature.functions:
            table = s.functions[name]
            for t in itertools.product(elems, repeat=arity):
                v = table[t]
                if v not in current:
                    added.add(v)
        if not added:
            return frozenset(current)
        current |= added


def generated_submodel(s: Structure, seed: Iterable[int]) -> GeneratedSubmodel:
    """The submodel generated by ``seed``: witness carrier plus renamed structure."""
    carrier = generated_carrier(s, seed)
    return GeneratedSubmodel(tuple(sorted(carrier)), induced_substructure(s, carrier))


def enumerate_submodels(
    s: Structure, max_card: Optional[int] = None
) -> Iterator[frozenset]:
    """Yield every submodel carrier of ``s``, smallest first.

    Carriers are the nonempty subsets containing all constants and closed
    under all functions; order is by size, then lexicographic.
    """
    n = s.size
    upper = n if max_card is None else min(max_card, n)
    const_values = frozenset(s.constants.values())
    for k in range(1, upper + 1):
        for combo in itertools.combinations(range(n), k):
            carrier = frozenset(combo)
            if const_values <= carrier and is_submodel_carrier(s, carrier):
                yield carrier


def labelled_structure_count(sig: Signature, n: int) -> int:
    count = 1
    for _, arity in sig.predicates:
        count *= 2 ** (n**arity)
    for _, arity in sig.functions:
        count *= n ** (n**arity)
    count *= n ** len(sig.constants)
    return count


def _structure_from_indices(sig: Signature, n: int, indices: tuple[int, ...]) -> Structure:
    preds = {}
    funcs = {}
    consts = {}
    pos = 0
    for name, arity in sig.predicates:
        mask = indices[pos]
        pos += 1
        tuples = []
        for rank, t in enumerate(itertools.product(range(n), repeat=arity)):
            if mask >> rank & 1:
                tuples.append(t)
        preds[name] = frozenset(tuples)
    for name, arity in sig.functions:
        code = indices[pos]
        pos += 1
        table = {}
        for t in reversed(list(itertools.product(range(n), repeat=arity))):
            code, v = divmod(code, n)
            table[t] = v
        funcs[name] = table
    for name in sig.constants:
        consts[name] = indices[pos]
        pos += 1
    return Structure(sig, n, preds, funcs, consts)


def _labelled_structures(sig: Signature, n: int) -> Iterator[Structure]:
    spaces = []
    for _, arity in sig.predicates:
        spaces.append(range(2 ** (n**arity)))
    for _, arity in sig.functions:
        spaces.append(range(n ** (n**arity)))
    for _ in sig.constants:
        spaces.append(range(n))
    for combo in itertools.product(*spaces):
        yield _structure_from_indices(sig, n, combo)


def _encode_permuted(s: Structure, perm: tuple[int, ...]):
    """Encoding of the relabelling of ``s`` along ``perm`` (element i -> perm[i])."""
    n = s.size
    inverse = [0] * n
    for i, p in enumerate(perm):
        inverse[p] = i
    parts = []
    for name, arity in s.signature.predicates:
        rel = s.predicates[name]
        mask = 0
        for rank, t in enumerate(itertools.product(range(n), repeat=arity)):
            if tuple(inverse[x] for x in t) in rel:
                mask |= 1 << rank
        parts.append(mask)
    for name, arity in s.signature.functions:
        table = s.functions[name]
        values = tuple(
            perm[table[tuple(inverse[x] for x in t)]]
            for t in itertools.product(range(n), repeat=arity)
        )
        parts.append(values)
    for name in s.signature.constants:
        parts.append(perm[s.constants[name]])
    return tuple(parts)


def canonical_key(s: Structure):
    """Minimal encoding of ``s`` over all permutations of its universe.

    Two structures are isomorphic iff their canonical keys coincide.
    """
    best = None
    for perm in itertools.permutations(range(s.size)):
        enc = _encode_permuted(s, perm)
        if best is None or enc < best:
            best = enc
    return (s.size, best)


def _predicate_only_bit_layout(sig: Signature, n: int):
    """Bit spans for packing all predicate interpretations into one mask.

    Later symbols occupy lower bits so that ascending masks coincide with
    the labelled enumeration order (which varies later symbols fastest).
    """
    widths = [n**arity for _, arity in sig.predicates]
    offsets = []
    below = 0
    for w in reversed(widths):
        offsets.append(below)
        below += w
    offsets.reverse()
    return widths, offsets, below


def _predicate_only_iso_masks(sig: Signature, n: int):
    """Representative packed bitmasks, one per isomorphism class.

    Predicate-only signatures with at most 25 total tuple bits.  Takes the
    minimum of each mask over all universe permutations with numpy;
    representatives are the first labelled structure of each class, in
    ascending mask order (identical to the generic path).
    """
    import numpy as np

    widths, offsets, total_bits = _predicate_only_bit_layout(sig, n)
    masks = np.arange(2**total_bits, dtype=np.int64)
    canon = masks.copy()
    tuple_spaces = [
        list(itertools.product(range(n), repeat=arity)) for _, arity in sig.predicates
    ]
    ranks = [{t: r for r, t in enumerate(space)} for space in tuple_spaces]
    for perm in itertools.permutations(range(n)):
        inverse = [0] * n
        for i, p in enumerate(perm):
            inverse[p] = i
        permuted = np.zeros_like(masks)
        for sym, space in enumerate(tuple_spaces):
            offset = offsets[sym]
            rank = ranks[sym]
            for dst, t in enumerate(space):
                src = offset + rank[tuple(inverse[x] for x in t)]
                permuted |= (masks >> src & 1) << (offset + dst)
        np.minimum(canon, permuted, out=canon)
    _, first = np.unique(canon, return_index=True)
    return sorted(int(i) for i in first)


def _unpack_predicate_mask(sig: Signature, n: int, mask: int) -> tuple[int, ...]:
    widths, offsets, _total = _predicate_only_bit_layout(sig, n)
    return tuple(
        (mask >> offset) & ((1 << width) - 1)
        for width, offset in zip(widths, offsets)
    )


def enumerate_structures(
    sig: Signature,
    n: int,
    up_to_iso: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Structure]:
    """Yield all labelled structures of size ``n``, or one per isomorphism class.

    Deterministic order: labelled structures ascend in their per-symbol
    encoding; with ``up_to_iso`` each class is represented by its first
    labelled member.  Refuses with :class:`CapExceededError` when the
    labelled count exceeds ``cap``.
    """
    if n < 1:
        raise ValueError("structure size must be >= 1")
    count = labelled_structure_count(sig, n)
    if count > cap:
        raise CapExceededError(count, cap)
    if not up_to_iso:
        yield from _labelled_structures(sig, n)
        return
    if (
        sig.predicates
        and not sig.functions
        and not sig.constants
        and sum(n**arity for _, arity in sig.predicates) <= 25
    ):
        for mask in _predicate_only_iso_masks(sig, n):
            yield _structure_from_indices(sig, n, _unpack_predicate_mask(sig, n, mask))
        return
    seen = set()
    for s in _labelled_structures(sig, n):
        key = canonical_key(s)
        if key not in seen:
            seen.add(key)
            yield s


def _fragment_view(x: Union[Structure, Fragment]):
    """Uniform (carrier, predicates, functions, constants) view for iso search."""
    if isinstance(x, Structure):
        carrier = frozenset(range(x.size))
        funcs = {name: dict(table) for name, table in x.functions.items()}
        return x.signature, carrier, x.predicates, funcs, dict(x.constants)
    return x.signature, x.carrier, x.predicates, x.functions, dict(x.constants)


def check_isomorphism(
    a: Union[Structure, Fragment], b: Union[Structure, Fragment], mapping: Mapping[int, int]
) -> bool:
    """Verify that ``mapping`` is an isomorphism from ``a`` onto ``b``.

    For fragments the ESCAPES pattern must be preserved as well.
    """
    sig_a, car_a, preds_a, funcs_a, consts_a = _fragment_view(a)
    sig_b, car_b, preds_b, funcs_b, consts_b = _fragment_view(b)
    if sig_a != sig_b:
        return False
    if set(mapping.keys()) != set(car_a):
        return False
    if set(mapping.values()) != set(car_b) or len(set(mapping.values())) != len(mapping):
        return False
    for name, arity in sig_a.predicates:
        rel_a, rel_b = preds_a[name], preds_b[name]
        for t in itertools.product(sorted(car_a), repeat=arity):
            if (t in rel_a) != (tuple(mapping[x] for x in t) in rel_b):
                return False
    for name, arity in sig_a.functions:
        ta, tb = funcs_a[name], funcs_b[name]
        for t in itertools.product(sorted(car_a), repeat=arity):
            va = ta.get(t, ESCAPES)
            vb = tb.get(tuple(mapping[x] for x in t), ESCAPES)
            if va is ESCAPES or vb is ESCAPES:
                if not (va is ESCAPES and vb is ESCAPES):
                    return False
            elif mapping[va] != vb:
                return False
    for name in sig_a.constants:
        va = consts_a.get(name, ESCAPES)
        vb = consts_b.get(name, ESCAPES)
        if va is ESCAPES or vb is ESCAPES:
            if not (va is ESCAPES and vb is ESCAPES):
                return False
        elif mapping[va] != vb:
            return False
    return True


def _element_profile(sig, carrier, preds, funcs, consts, x):
    parts = []
    for name, arity in sig.predicates:
        rel = preds[name]
        for pos in range(arity):
            parts.append(sum(1 for t in rel if t[pos] == x))
    for name, arity in sig.functions:
        table = funcs[name]
        parts.append(sum(1 for v in table.values() if v == x))
        parts.append(sum(1 for t, v in table.items() if x in t and v is ESCAPES))
        parts.append(1 if table.get((x,) * arity, None) == x else 0)
    for name in sig.constants:
        v = consts.get(name, ESCAPES)
        parts.append(1 if v == x else 0)
    return tuple(parts)


def find_isomorphism(
    a: Union[Structure, Fragment], b: Union[Structure, Fragment]
) -> Optional[dict]:
    """Search for an isomorphism from ``a`` onto ``b``; None if there is none.

    Backtracking over carrier bijections with element-profile pruning;
    the returned map satisfies :func:`check_isomorphism`.
    """
    sig_a, car_a, preds_a, funcs_a, consts_a = _fragment_view(a)
    sig_b, car_b, preds_b, funcs_b, consts_b = _fragment_view(b)
    if sig_a != sig_b:
        raise ValueError("signature mismatch")
    if len(car_a) != len(car_b):
        return None
    prof_a = {x: _element_profile(sig_a, car_a, preds_a, funcs_a, consts_a, x) for x in car_a}
    prof_b = {y: _element_profile(sig_b, car_b, preds_b, funcs_b, consts_b, y) for y in car_b}
    if sorted(prof_a.values()) != sorted(prof_b.values()):
        return None
    domain = sorted(car_a)
    targets = sorted(car_b)
    mapping: dict = {}
    used: set = set()

    def consistent(x, y):
        assigned = set(mapping) | {x}
        trial = dict(mapping)
        trial[x] = y
        for name, arity in sig_a.predicates:
            rel_a, rel_b = preds_a[name], preds_b[name]
            for t in itertools.product(sorted(assigned), repeat=arity):
                if x not in t:
                    continue
                if (t in rel_a) != (tuple(trial[z] for z in t) in rel_b):
                    return False
        for name, arity in sig_a.functions:
            ta, tb = funcs_a[name], funcs_b[name]
            for t in itertools.product(sorted(assigned), repeat=arity):
                va = ta.get(t, ESCAPES)
                vb = tb.get(tuple(trial[z] for z in t), ESCAPES)
                if (va is ESCAPES) != (vb is ESCAPES):
                    return False
                if va is not ESCAPES:
                    if va in trial:
                        if trial[va] != vb:
                            return False
                    elif vb in trial.values():
                        return False
        for name in sig_a.constants:
            va = consts_a.get(name, ESCAPES)
            vb = consts_b.get(name, ESCAPES)
            if (va is ESCAPES) != (vb is ESCAPES):
                return False
            if va is not ESCAPES and va in trial and trial[va] != vb:
                return False
        return True

    def backtrack(i):
        if i == len(domain):
            return check_isomorphism(a, b, mapping)
        x = domain[i]
        for y in targets:
            if y in used or prof_a[x] != prof_b[y]:
                continue
            if not consistent(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if backtrack(i + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    if backtrack(0):
        return dict(mapping)
    return None


def fragment_occurs(f: Fragment, s: Structure) -> list[dict]:
    """All embeddings of fragment ``f`` into ``s``.

    An embedding is an injective map from the carrier of ``f`` into the
    universe of ``s`` under which the induced fragment of ``s`` on the
    image matches ``f``, including the ESCAPES pattern.
    """
    if f.signature != s.signature:
        raise ValueError("signature mismatch")
    domain = sorted(f.carrier)
    k = len(domain)
    if k == 0:
        return [{}]
    out = []
    for image in itertools.permutations(range(s.size), k):
        mapping = dict(zip(domain, image))
        if _occurrence_ok(f, s, mapping):
            out.append(mapping)
    return out


def _occurrence_ok(f: Fragment, s: Structure, mapping: dict) -> bool:
    image = set(mapping.values())
    domain = sorted(mapping)
    for name, arity in f.signature.predicates:
        rel_f, rel_s = f.predicates[name], s.predicates[name]
        for t in itertools.product(domain, repeat=arity):
            if (t in rel_f) != (tuple(mapping[x] for x in t) in rel_s):
                return False
    for name, arity in f.signature.functions:
        table_f, table_s = f.functions[name], s.functions[name]
        for t in itertools.product(domain, repeat=arity):
            fv = table_f.get(t, ESCAPES)
            sv = table_s[tuple(mapping[x] for x in t)]
            if fv is ESCAPES:
                if sv in image:
                    return False
            elif sv != mapping[fv]:
                return False
    for name in f.signature.constants:
        fv = f.constants.get(name, ESCAPES)
        sv = s.constants[name]
        if fv is ESCAPES:
            if sv in image:
                return False
        elif sv != mapping[fv]:
            return False
    return True


# --- text format -----------------------------------------------------------
#
# file   := sig-block struct-block+
# sig    := "signature" NL ("predicate" NAME ARITY | "function" NAME ARITY |
#           "constant" NAME)* "end"
# struct := "structure" NAME NL "universe" N NL (PRED ints | FUNC ints "->" int |
#           CONST int)* "end"
# '#' starts a comment; tokens are whitespace-separated.


def _tokenize_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_structures(text: str) -> tuple[Signature, dict[str, Structure]]:
    """Parse the structure text format into a signature and named structures."""
    lines = list(_tokenize_lines(text))
    pos = 0

    def error(msg, lineno=None):
        raise StructureFormatError(msg, lineno)

    if not lines or lines[0][1] != ["signature"]:
        error("expected 'signature' block", lines[0][0] if lines else 1)
    pos = 1
    predicates, functions, constants = [], [], []
    while pos < len(lines):
        lineno, toks = lines[pos]
        if toks == ["end"]:
            pos += 1
            break
        kind = toks[0]
        if kind == "predicate" and len(toks) == 3:
            predicates.append((toks[1], int(toks[2])))
        elif kind == "function" and len(toks) == 3:
            functions.append((toks[1], int(toks[2])))
        elif kind == "constant" and len(toks) == 2:
            constants.append(toks[1])
        else:
            error(f"bad signature entry: {' '.join(toks)}", lineno)
        pos += 1
    else:
        error("signature block not terminated by 'end'", lines[-1][0])
    try:
        sig = Signature(tuple(predicates), tuple(functions), tuple(constants))
    except ValueError as exc:
        error(str(exc), lines[0][0])

    pred_arity = dict(sig.predicates)
    func_arity = dict(sig.functions)
    structures: dict[str, Structure] = {}
    while pos < len(lines):
        lineno, toks = lines[pos]
        if len(toks) != 2 or toks[0] != "structure":
            error("expected 'structure NAME'", lineno)
        name = toks[1]
        if name in structures:
            error(f"duplicate structure name {name}", lineno)
        pos += 1
        if pos >= len(lines) or lines[pos][1][0] != "universe" or len(lines[pos][1]) != 2:
            error("expected 'universe N'", lines[pos][0] if pos < len(lines) else lineno)
        try:
            size = int(lines[pos][1][1])
        except ValueError:
            error("universe size must be an integer", lines[pos][0])
        pos += 1
        preds: dict = {p: set() for p in pred_arity}
        funcs: dict = {f: {} for f in func_arity}
        consts: dict = {}
        closed = False
        while pos < len(lines):
            lineno, toks = lines[pos]
            if toks == ["end"]:
                pos += 1
                closed = True
                break
            sym = toks[0]
            try:
                if sym in pred_arity:
                    args = [int(x) for x in toks[1:]]
                    if len(args) != pred_arity[sym]:
                        error(f"{sym} expects {pred_arity[sym]} arguments", lineno)
                    preds[sym].add(tuple(args))
                elif sym in func_arity:
                    if "->" not in toks:
                        error(f"function entry for {sym} needs '->'", lineno)
                    arrow = toks.index("->")
                    args = [int(x) for x in toks[1:arrow]]
                    rest = toks[arrow + 1 :]
                    if len(args) != func_arity[sym] or len(rest) != 1:
                        error(f"{sym} expects {func_arity[sym]} arguments and one value", lineno)
                    key = tuple(args)
                    value = int(rest[0])
                    if key in funcs[sym] and funcs[sym][key] != value:
                        error(f"conflicting entries for {sym}{key}", lineno)
                    funcs[sym][key] = value
                elif sig.has_constant(sym):
                    if len(toks) != 2:
                        error(f"constant {sym} expects one value", lineno)
                    consts[sym] = int(toks[1])
                else:
                    error(f"unknown symbol {sym}", lineno)
            except ValueError as exc:
                error(f"bad integer in entry: {exc}", lineno)
            pos += 1
        if not closed:
            error(f"structure {name} not terminated by 'end'", lines[-1][0])
        structures[name] = Structure(sig, size, preds, funcs, consts)
    if not structures:
        error("expected at least one structure block", lines[-1][0])
    return sig, structures


def render_structures(sig: Signature, structures: Mapping[str, Structure]) -> str:
    """Render a signature and named structures in the text format."""
    out = ["signature"]
    for name, arity in sig.predicates:
        out.append(f"predicate {name} {arity}")
    for name, arity in sig.functions:
        out.append(f"function {name} {arity}")
    for name in sig.constants:
        out.append(f"constant {name}")
    out.append("end")
    for sname, s in structures.items():
        out.append(f"structure {sname}")
        out.append(f"universe {s.size}")
        for name, _ in sig.predicates:
            for t in sorted(s.predicates.get(name, frozenset())):
                out.append(f"{name} " + " ".join(str(x) for x in t))
        for name, _ in sig.functions:
            for t, v in sorted(s.functions.get(name, {}).items()):
                out.append(f"{name} " + " ".join(str(x) for x in t) + f" -> {v}")
        for name in sig.constants:
            if name in s.constants:
                out.append(f"{name} {s.constants[name]}")
        out.append("end")
    return "\n".join(out) + "\n"
