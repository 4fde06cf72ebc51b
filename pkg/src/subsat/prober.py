"""Brute-force semantic probes: equivalence, preservation, witness bounds, demos.

Verdicts carry re-checkable counterexamples, never summaries.  All sweeps
run in deterministic enumeration order so reports are reproducible
byte-for-byte; the structure stream may be partitioned across workers
because results are merged in submission order.

Witness-bound searches over one-predicate signatures use a vectorized
mask sieve (no structure materialization), which is what makes size-5
sweeps feasible; it is cross-checked against the generic path in the
test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Union

from .logic import (
    Eq,
    ExistsSet,
    Forall,
    Exists,
    Atom,
    Formula,
    Var,
    constant_names,
    evaluate_eso,
    evaluate_fo,
    render_formula,
    subformulas,
)
from .structures import (
    DEFAULT_ENUMERATION_CAP,
    CapExceededError,
    Signature,
    Structure,
    enumerate_structures,
    enumerate_submodels,
    fragment_occurs,
    induced_fragment,
    induced_substructure,
    labelled_structure_count,
    render_structures,
    _labelled_structures,
    _structure_from_indices,
)
from .theta import theta_bounded_semantic, theta_semantic

_SIEVE_CHUNK = 1 << 20
_SIEVE_MAX_BITS = 25


@dataclass(frozen=True)
class ProbeConfig:
    """Search ceilings: structure size, witness size, generated-model cap.

    ``lambda_max`` defaults to min(3, n_max) and ``nu`` to
    max(lambda_max, 4); the invariants 1 <= lambda_max <= n_max <= and
    nu >= lambda_max are enforced.
    """

    signature: Signature
    n_max: int = 4
    lambda_max: Optional[int] = None
    nu: Optional[int] = None
    mode: str = "submodel"
    cap: int = DEFAULT_ENUMERATION_CAP
    workers: int = 1

    def __post_init__(self):
        if self.lambda_max is None:
            object.__setattr__(self, "lambda_max", min(3, self.n_max))
        if self.nu is None:
            object.__setattr__(self, "nu", max(self.lambda_max, 4))
        if not 1 <= self.lambda_max <= self.n_max:
            raise ValueError("need 1 <= lambda_max <= n_max")
        if self.nu < self.lambda_max:
            raise ValueError("generated-model cap nu must be >= lambda_max")
        if self.mode not in ("submodel", "fragment"):
            raise ValueError("mode must be 'submodel' or 'fragment'")


# --- sentence-like things -----------------------------------------------------


@dataclass(frozen=True)
class ThetaOf:
    """Pseudo-sentence: 'some submodel satisfies the formula'."""

    formula: Formula


@dataclass(frozen=True)
class BoundedThetaOf:
    """Pseudo-sentence: 'some submodel generated by <= bound elements satisfies it'."""

    formula: Formula
    bound: int


SentenceLike = Union[Formula, ThetaOf, BoundedThetaOf, Callable[[Structure], bool]]


def evaluate_sentence_like(item: SentenceLike, s: Structure) -> bool:
    if isinstance(item, ThetaOf):
        return theta_semantic(s, item.formula).truth
    if isinstance(item, BoundedThetaOf):
        return theta_bounded_semantic(s, item.formula, item.bound).truth
    if callable(item) and not _is_formula(item):
        return bool(item(s))
    if any(isinstance(g, ExistsSet) for g in subformulas(item)):
        return evaluate_eso(s, item)
    return evaluate_fo(s, item)


def _is_formula(item) -> bool:
    return hasattr(item, "__dataclass_fields__") and not isinstance(
        item, (ThetaOf, BoundedThetaOf)
    )


def describe_sentence_like(item: SentenceLike) -> str:
    if isinstance(item, ThetaOf):
        return f"theta[{render_formula(item.formula)}]"
    if isinstance(item, BoundedThetaOf):
        return f"theta<={item.bound}[{render_formula(item.formula)}]"
    if callable(item) and not _is_formula(item):
        return getattr(item, "__name__", "<callable>")
    return render_formula(item)


def _pair_eval(s: Structure, left: SentenceLike, right: SentenceLike):
    return evaluate_sentence_like(left, s), evaluate_sentence_like(right, s)


def _picklable(item: SentenceLike) -> bool:
    return not (callable(item) and not _is_formula(item))


def _parallel_map(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 64:
        return [fn(x) for x in items]
    import multiprocessing

    with multiprocessing.Pool(workers) as pool:
        chunk = max(1, len(items) // (workers * 4))
        return pool.map(fn, items, chunksize=chunk)


# --- equivalence oracle ---------------------------------------------------------


@dataclass
class EquivalenceVerdict:
    equal: bool
    counterexample: Optional[Structure]
    left_truth: Optional[bool]
    right_truth: Optional[bool]
    checked: int
    n_max: int


def equivalence_oracle(
    left: SentenceLike, right: SentenceLike, cfg: ProbeConfig
) -> EquivalenceVerdict:
    """First structure (up to isomorphism, sizes ascending) where truth differs.

    ``left``/``right`` may be formulas, theta wrappers, or arbitrary
    structure predicates.
    """
    checked = 0
    use_workers = cfg.workers > 1 and _picklable(left) and _picklable(right)
    for n in range(1, cfg.n_max + 1):
        structures = list(enumerate_structures(cfg.signature, n, up_to_iso=True, cap=cfg.cap))
        if use_workers:
            results = iter(
                _parallel_map(
                    partial(_pair_eval, left=left, right=right), structures, cfg.workers
                )
            )
        else:
            results = (_pair_eval(s, left, right) for s in structures)
        for s, (lt, rt) in zip(structures, results):
            checked += 1
            if lt != rt:
                return EquivalenceVerdict(False, s, lt, rt, checked, cfg.n_max)
    return EquivalenceVerdict(True, None, None, None, checked, cfg.n_max)


# --- preservation under extensions ----------------------------------------------


@dataclass
class PreservationVerdict:
    preserved: bool
    counterexample: Optional[tuple]  # (carrier, substructure, structure)
    checked: int
    n_max: int
    target: str


def preservation_under_extensions(
    phi: Formula, cfg: ProbeConfig, apply_theta: bool = True
) -> PreservationVerdict:
    """Check that the target holds in a structure whenever it holds in a submodel.

    By default the target is the submodel check of ``phi`` (which the
    theory guarantees); with ``apply_theta=False`` the raw sentence is
    tested instead, where counterexamples are expected.
    """
    target: SentenceLike = ThetaOf(phi) if apply_theta else phi
    checked = 0
    for n in range(1, cfg.n_max + 1):
        for s in enumerate_structures(cfg.signature, n, up_to_iso=True, cap=cfg.cap):
            holds_in_s = evaluate_sentence_like(target, s)
            for carrier in enumerate_submodels(s):
                checked += 1
                if len(carrier) == s.size:
                    continue
                sub = induced_substructure(s, carrier)
                if evaluate_sentence_like(target, sub) and not holds_in_s:
                    return PreservationVerdict(
                        False, (carrier, sub, s), checked, cfg.n_max,
                        describe_sentence_like(target),
                    )
    return PreservationVerdict(True, None, checked, cfg.n_max, describe_sentence_like(target))


# --- witness-bound search ---------------------------------------------------------


@dataclass
class ProbeVerdict:
    outcome: str  # "WITNESS_BOUND_FOUND" | "NO_BOUND_UP_TO"
    bound: Optional[int]
    n_max: int
    lambda_max: int
    mode: str
    counterexamples: tuple = ()  # pairs (lambda, structure)
    stats: dict = field(default_factory=dict)


def _sieve_applicable(sig: Signature, n: int) -> bool:
    return (
        len(sig.predicates) == 1
        and not sig.functions
        and not sig.constants
        and n ** sig.predicates[0][1] <= _SIEVE_MAX_BITS
    )


def _mask_truth_table(phi: Formula, sig: Signature, k: int):
    """Truth of ``phi`` on every labelled size-k structure, indexed by mask.

    Evaluates one representative per isomorphism class and spreads the
    value over the class via the canonical-mask array.
    """
    import numpy as np

    arity = sig.predicates[0][1]
    m = k**arity
    tuples = list(itertools.product(range(k), repeat=arity))
    rank = {t: r for r, t in enumerate(tuples)}
    masks = np.arange(2**m, dtype=np.int64)
    canon = masks.copy()
    for perm in itertools.permutations(range(k)):
        inverse = [0] * k
        for i, p in enumerate(perm):
            inverse[p] = i
        permuted = np.zeros_like(masks)
        for dst, t in enumerate(tuples):
            src = rank[tuple(inverse[x] for x in t)]
            permuted |= (masks >> src & 1) << dst
        np.minimum(canon, permuted, out=canon)
    reps, inverse_idx = np.unique(canon, return_inverse=True)
    rep_truth = np.fromiter(
        (
            evaluate_fo(_structure_from_indices(sig, k, (int(mask),)), phi)
            for mask in reps
        ),
        dtype=bool,
        count=len(reps),
    )
    return rep_truth[inverse_idx]


def _sieve_first_counterexample(
    phi: Formula, sig: Signature, n: int, lam: int, tables: dict
) -> tuple[Optional[Structure], int]:
    """First labelled size-n structure satisfying phi with no phi-submodel of
    size <= lam, by vectorized small-witness filtering; returns (hit, scanned)."""
    import numpy as np

    arity = sig.predicates[0][1]
    tuples = list(itertools.product(range(n), repeat=arity))
    rank = {t: r for r, t in enumerate(tuples)}
    subset_specs = []
    for k in range(1, min(lam, n) + 1):
        if k not in tables:
            tables[k] = _mask_truth_table(phi, sig, k)
        for combo in itertools.combinations(range(n), k):
            spec = [
                rank[t] for t in itertools.product(combo, repeat=arity)
            ]  # local rank is the position in this list
            subset_specs.append((k, spec))
    total = 2 ** (n**arity)
    scanned = 0
    for start in range(0, total, _SIEVE_CHUNK):
        stop = min(start + _SIEVE_CHUNK, total)
        masks = np.arange(start, stop, dtype=np.int64)
        has_witness = np.zeros(len(masks), dtype=bool)
        for k, spec in subset_specs:
            submask = np.zeros(len(masks), dtype=np.int64)
            for local, src in enumerate(spec):
                submask |= (masks >> src & 1) << local
            has_witness |= tables[k][submask]
        candidates = masks[~has_witness]
        scanned = stop
        for mask in candidates.tolist():
            s = _structure_from_indices(sig, n, (int(mask),))
            if evaluate_fo(s, phi):
                return s, scanned
    return None, scanned


def _generic_first_counterexample(
    phi: Formula, sig: Signature, n: int, lam: int, cap: int
) -> tuple[Optional[Structure], int]:
    count = labelled_structure_count(sig, n)
    if count > cap:
        raise CapExceededError(count, cap)
    scanned = 0
    for s in _labelled_structures(sig, n):
        scanned += 1
        if not evaluate_fo(s, phi):
            continue
        if not any(
            evaluate_fo(induced_substructure(s, c), phi)
            for c in enumerate_submodels(s, max_card=lam)
        ):
            return s, scanned
    return None, scanned


def _first_submodel_counterexample(
    phi: Formula, cfg: ProbeConfig, lam: int, tables: dict
) -> tuple[Optional[Structure], int]:
    """First structure of size in (lam, n_max] that satisfies phi but has no
    phi-submodel of size <= lam.  Sizes <= lam are their own witnesses."""
    scanned = 0
    for n in range(lam + 1, cfg.n_max + 1):
        if _sieve_applicable(cfg.signature, n):
            hit, done = _sieve_first_counterexample(phi, cfg.signature, n, lam, tables)
        else:
            hit, done = _generic_first_counterexample(phi, cfg.signature, n, lam, cfg.cap)
        scanned += done
        if hit is not None:
            return hit, scanned
    return None, scanned


def _renamed_fragment_key(frag):
    order = {e: i for i, e in enumerate(sorted(frag.carrier))}
    from .structures import ESCAPES

    def enc(v):
        return -1 if v is ESCAPES else order[v]

    sig = frag.signature
    return (
        len(frag.carrier),
        tuple(
            tuple(sorted(tuple(order[x] for x in t) for t in frag.predicates[name]))
            for name, _ in sig.predicates
        ),
        tuple(
            tuple(
                sorted(
                    (tuple(order[x] for x in t), enc(v))
                    for t, v in frag.functions[name].items()
                )
            )
            for name, _ in sig.functions
        ),
        tuple(
            (-1 if frag.constants[name] is ESCAPES else order[frag.constants[name]])
            for name in sig.constants
        ),
    )


def witness_bound_search(phi: Formula, cfg: ProbeConfig) -> ProbeVerdict:
    """Smallest witness size that certifies the submodel check, or counterexamples.

    submodel mode: the smallest lambda <= lambda_max such that every
    phi-model up to n_max has a phi-submodel of size <= lambda.  fragment
    mode: the smallest lambda such that every phi-model has a fragment of
    size <= lambda whose every occurrence (up to n_max) lies in a
    structure satisfying the submodel check; fragment verdicts are
    relative to n_max.  NO_BOUND verdicts carry one counterexample per
    lambda, sizes strictly increasing.
    """
    if cfg.mode == "submodel":
        return _witness_bound_submodel(phi, cfg)
    return _witness_bound_fragment(phi, cfg)


def _witness_bound_submodel(phi: Formula, cfg: ProbeConfig) -> ProbeVerdict:
    tables: dict = {}
    family = []
    scanned_total = 0
    for lam in range(1, cfg.lambda_max + 1):
        hit, scanned = _first_submodel_counterexample(phi, cfg, lam, tables)
        scanned_total += scanned
        if hit is None:
            return ProbeVerdict(
                "WITNESS_BOUND_FOUND",
                lam,
                cfg.n_max,
                cfg.lambda_max,
                cfg.mode,
                tuple(family),
                {"structures_scanned": scanned_total},
            )
        family.append((lam, hit))
    return ProbeVerdict(
        "NO_BOUND_UP_TO",
        None,
        cfg.n_max,
        cfg.lambda_max,
        cfg.mode,
        tuple(family),
        {"structures_scanned": scanned_total},
    )


def _witness_bound_fragment(phi: Formula, cfg: ProbeConfig) -> ProbeVerdict:
    by_size = {
        n: list(enumerate_structures(cfg.signature, n, up_to_iso=True, cap=cfg.cap))
        for n in range(1, cfg.n_max + 1)
    }
    all_structures = [s for n in sorted(by_size) for s in by_size[n]]
    theta_truth = [theta_semantic(s, phi).truth for s in all_structures]
    models = [s for s in all_structures if evaluate_fo(s, phi)]
    certified: dict = {}

    def fragment_certifies(frag) -> bool:
        key = _renamed_fragment_key(frag)
        if key not in certified:
            ok = True
            for s, truth in zip(all_structures, theta_truth):
                if truth:
                    continue
                if fragment_occurs(frag, s):
                    ok = False
                    break
            certified[key] = ok
        return certified[key]

    family = []
    for lam in range(1, cfg.lambda_max + 1):
        counterexample = None
        for s in models:
            found = False
            for k in range(1, min(lam, s.size) + 1):
                for combo in itertools.combinations(range(s.size), k):
                    if fragment_certifies(induced_fragment(s, combo)):
                        found = True
                        break
                if found:
                    break
            if not found:
                counterexample = s
                break
        if counterexample is None:
            return ProbeVerdict(
                "WITNESS_BOUND_FOUND",
                lam,
                cfg.n_max,
                cfg.lambda_max,
                cfg.mode,
                tuple(family),
                {"models_checked": len(models)},
            )
        family.append((lam, counterexample))
    return ProbeVerdict(
        "NO_BOUND_UP_TO",
        None,
        cfg.n_max,
        cfg.lambda_max,
        cfg.mode,
        tuple(family),
        {"models_checked": len(models)},
    )


# --- demos ---------------------------------------------------------------------


def has_directed_cycle(s: Structure, predicate: str) -> bool:
    """Independent cycle oracle: iterative three-color DFS over the edge set."""
    edges = {}
    for t in s.predicates[predicate]:
        edges.setdefault(t[0], []).append(t[1])
    color = {v: 0 for v in range(s.size)}
    for root in range(s.size):
        if color[root]:
            continue
        stack = [(root, iter(sorted(edges.get(root, ()))))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return True
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(edges.get(nxt, ())))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


@dataclass
class WellfoundednessReport:
    sentence: str
    structures_checked: int
    cyclic_count: int
    mismatches: tuple
    n_max: int

    @property
    def passed(self) -> bool:
        return not self.mismatches


def wellfoundedness_demo(cfg: ProbeConfig) -> WellfoundednessReport:
    """The submodel check of 'every element has a predecessor' detects cycles.

    Sweeps all structures up to n_max and compares against an independent
    graph-theoretic cycle search; on finite structures the two agree
    everywhere.
    """
    sig = cfg.signature
    if len(sig.predicates) != 1 or sig.predicates[0][1] != 2 or sig.functions or sig.constants:
        raise ValueError("demo needs a signature with exactly one binary predicate")
    name = sig.predicates[0][0]
    phi = Forall("x", Exists("y", Atom(name, (Var("y"), Var("x")))))
    checked = 0
    cyclic = 0
    mismatches = []
    for n in range(1, cfg.n_max + 1):
        for s in enumerate_structures(sig, n, up_to_iso=True, cap=cfg.cap):
            checked += 1
            t = theta_semantic(s, phi).truth
            c = has_directed_cycle(s, name)
            if c:
                cyclic += 1
            if t != c:
                mismatches.append(s)
    return WellfoundednessReport(
        render_formula(phi), checked, cyclic, tuple(mismatches), cfg.n_max
    )


@dataclass
class ConstantBlindnessReport:
    constant_count: int
    psi: str
    named_constants: tuple
    agree_on_psi: bool
    theta_in_a: bool
    theta_in_b: bool
    distinguishing_constant: str
    structure_a: Structure
    structure_b: Structure

    @property
    def theta_differs(self) -> bool:
        return self.theta_in_a != self.theta_in_b


def constant_blindness_demo(k: int, psi: Formula) -> ConstantBlindnessReport:
    """Two structures agreeing on any sentence naming < k constants can still
    disagree on the single-point-submodel check.

    Builds the two-point structures where all constants (resp. only the
    constants named in psi) sit on the first point.  The disagreement on
    the submodel check of 'everything is equal' requires psi to name at
    least one constant; the report records the facts either way.
    """
    if k < 1:
        raise ValueError("need at least one constant symbol")
    sig = Signature(constants=tuple(f"c{i}" for i in range(k)))
    named = tuple(sorted(constant_names(psi)))
    unknown = [c for c in named if not sig.has_constant(c)]
    if unknown:
        raise ValueError(f"psi names symbols outside the signature: {unknown}")
    if len(named) >= k:
        raise ValueError("psi must name fewer constants than the signature has")
    a = Structure(sig, 2, constants={c: 0 for c in sig.constants})
    b = Structure(
        sig, 2, constants={c: 0 if c in named else 1 for c in sig.constants}
    )
    phi = Forall("x", Forall("y", Eq(Var("x"), Var("y"))))
    psi_in_a = evaluate_fo(a, psi)
    psi_in_b = evaluate_fo(b, psi)
    theta_a = theta_semantic(a, phi).truth
    theta_b = theta_semantic(b, phi).truth
    distinguishing = next(c for c in sig.constants if c not in named)
    return ConstantBlindnessReport(
        k,
        render_formula(psi),
        named,
        psi_in_a == psi_in_b,
        theta_a,
        theta_b,
        distinguishing,
        a,
        b,
    )


# --- report rendering -------------------------------------------------------------


def render_probe_report(verdict) -> str:
    """Plain-text sections plus a machine-readable summary line."""
    lines = []
    if isinstance(verdict, ProbeVerdict):
        lines.append("verdict:")
        if verdict.outcome == "WITNESS_BOUND_FOUND":
            lines.append(f"  witness bound lambda={verdict.bound} suffices up to n_max={verdict.n_max}")
        else:
            lines.append(
                f"  no witness bound up to lambda_max={verdict.lambda_max} "
                f"for structures up to n_max={verdict.n_max}"
            )
        if verdict.mode == "fragment":
            lines.append("  (fragment-mode verdicts are relative to n_max)")
        lines.append("parameters:")
        lines.append(f"  n_max={verdict.n_max} lambda_max={verdict.lambda_max} mode={verdict.mode}")
        for key in sorted(verdict.stats):
            lines.append(f"  {key}={verdict.stats[key]}")
        if verdict.counterexamples:
            lines.append("counterexamples:")
            sig = verdict.counterexamples[0][1].signature
            named = {
                f"counterexample_lambda_{lam}": s for lam, s in verdict.counterexamples
            }
            for raw in render_structures(sig, named).splitlines():
                lines.append("  " + raw)
        bound = verdict.bound if verdict.bound is not None else "none"
        lines.append(
            f"VERDICT lambda={bound} n_max={verdict.n_max} mode={verdict.mode} "
            f"outcome={verdict.outcome}"
        )
    elif isinstance(verdict, EquivalenceVerdict):
        lines.append("verdict:")
        lines.append(
            "  equal up to n_max" if verdict.equal else "  counterexample found"
        )
        lines.append("parameters:")
        lines.append(f"  n_max={verdict.n_max} structures_checked={verdict.checked}")
        if verdict.counterexample is not None:
            lines.append("counterexamples:")
            sig = verdict.counterexample.signature
            text = render_structures(sig, {"counterexample": verdict.counterexample})
            for raw in text.splitlines():
                lines.append("  " + raw)
            lines.append(f"  left={verdict.left_truth} right={verdict.right_truth}")
        lines.append(
            f"VERDICT equal={'yes' if verdict.equal else 'no'} n_max={verdict.n_max} "
            f"checked={verdict.checked}"
        )
    elif isinstance(verdict, PreservationVerdict):
        lines.append("verdict:")
        lines.append(
            "  preserved under extensions up to n_max"
            if verdict.preserved
            else "  extension-preservation fails"
        )
        lines.append("parameters:")
        lines.append(
            f"  n_max={verdict.n_max} target={verdict.target} pairs_checked={verdict.checked}"
        )
        if verdict.counterexample is not None:
            carrier, sub, s = verdict.counterexample
            lines.append("counterexamples:")
            lines.append(f"  carrier {{{','.join(str(x) for x in sorted(carrier))}}}")
            text = render_structures(s.signature, {"substructure": sub, "structure": s})
            for raw in text.splitlines():
                lines.append("  " + raw)
        lines.append(
            f"VERDICT preserved={'yes' if verdict.preserved else 'no'} n_max={verdict.n_max}"
        )
    elif isinstance(verdict, WellfoundednessReport):
        lines.append("verdict:")
        lines.append(
            "  submodel check of the no-minimal-element sentence matches cycle detection"
            if verdict.passed
            else "  MISMATCH between submodel check and cycle detection"
        )
        lines.append("parameters:")
        lines.append(f"  sentence={verdict.sentence}")
        lines.append(
            f"  n_max={verdict.n_max} structures_checked={verdict.structures_checked} "
            f"cyclic={verdict.cyclic_count} "
            f"acyclic={verdict.structures_checked - verdict.cyclic_count}"
        )
        if verdict.mismatches:
            lines.append("counterexamples:")
            sig = verdict.mismatches[0].signature
            named = {f"mismatch_{i}": s for i, s in enumerate(verdict.mismatches)}
            for raw in render_structures(sig, named).splitlines():
                lines.append("  " + raw)
        lines.append(
            f"VERDICT agree={'yes' if verdict.passed else 'no'} n_max={verdict.n_max} "
            f"checked={verdict.structures_checked}"
        )
    elif isinstance(verdict, ConstantBlindnessReport):
        lines.append("verdict:")
        if verdict.theta_differs and verdict.agree_on_psi:
            lines.append(
                "  structures agree on psi yet differ on the single-point-submodel check"
            )
        else:
            lines.append("  demo inconclusive for this psi")
        lines.append("parameters:")
        lines.append(f"  constants={verdict.constant_count} psi={verdict.psi}")
        lines.append(
            f"  named={','.join(verdict.named_constants) if verdict.named_constants else '-'} "
            f"distinguishing={verdict.distinguishing_constant}"
        )
        lines.append(
            f"  psi_agrees={verdict.agree_on_psi} theta_A={verdict.theta_in_a} "
            f"theta_B={verdict.theta_in_b}"
        )
        sig = verdict.structure_a.signature
        lines.append("structures:")
        for raw in render_structures(
            sig, {"A": verdict.structure_a, "B": verdict.structure_b}
        ).splitlines():
            lines.append("  " + raw)
        lines.append(
            f"VERDICT differs={'yes' if verdict.theta_differs else 'no'} "
            f"agree_on_psi={'yes' if verdict.agree_on_psi else 'no'}"
        )
    else:
        raise TypeError(f"no report renderer for {type(verdict).__name__}")
    return "\n".join(lines) + "\n"
