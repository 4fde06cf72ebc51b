"""The submodel operator: semantics, bounded variant, and syntactic translations.

``theta_semantic`` decides "some submodel satisfies the sentence" by
enumerating carriers; ``theta_bounded_semantic`` restricts to submodels
generated by small seeds.  The three translations express the same
content syntactically: a monadic existential second-order sentence, an
existential first-order sentence for predicate-only signatures, and a
diagram disjunction for functional signatures (sound always, complete
up to a generated-submodel size cap).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .logic import (
    FALSE,
    TRUE,
    Atom,
    Const,
    Eq,
    Exists,
    ExistsSet,
    Forall,
    Formula,
    Func,
    Implies,
    Not,
    SetAtom,
    Term,
    Var,
    evaluate_fo,
    free_set_variables,
    free_variables,
    fresh_set_variable,
    fresh_variables,
    is_first_order,
    make_and,
    make_or,
    relativize_to_set_variable,
    relativize_to_variables,
    render_formula,
    substitute_constant,
)
from .structures import (
    DEFAULT_ENUMERATION_CAP,
    Signature,
    Structure,
    canonical_key,
    enumerate_structures,
    enumerate_submodels,
    generated_carrier,
    induced_substructure,
)


@dataclass(frozen=True)
class ThetaReport:
    """Outcome of a semantic check: truth, first witness carrier, work done."""

    truth: bool
    witness: Optional[frozenset]
    inspected: int


def _require_fo_sentence(phi: Formula):
    if not is_first_order(phi):
        raise ValueError("expected a first-order sentence")
    if free_variables(phi) or free_set_variables(phi):
        raise ValueError(f"open formula: {render_formula(phi)}")


def theta_semantic(s: Structure, phi: Formula) -> ThetaReport:
    """Does some submodel of ``s`` satisfy ``phi``?

    The witness is the first carrier in deterministic order (size, then
    lexicographic).
    """
    _require_fo_sentence(phi)
    inspected = 0
    for carrier in enumerate_submodels(s):
        inspected += 1
        if evaluate_fo(induced_substructure(s, carrier), phi):
            return ThetaReport(True, carrier, inspected)
    return ThetaReport(False, None, inspected)


def theta_bounded_semantic(s: Structure, phi: Formula, bound: int) -> ThetaReport:
    """Does some submodel generated by at most ``bound`` elements satisfy ``phi``?"""
    _require_fo_sentence(phi)
    if bound < 0 or (bound == 0 and not s.signature.constants):
        raise ValueError("bound must be >= 1 (0 is allowed only with constants)")
    seen = set()
    inspected = 0
    start = 0 if s.signature.constants else 1
    for k in range(start, bound + 1):
        for seed in itertools.combinations(range(s.size), k):
            carrier = generated_carrier(s, seed)
            if carrier in seen:
                continue
            seen.add(carrier)
            inspected += 1
            if evaluate_fo(induced_substructure(s, carrier), phi):
                return ThetaReport(True, carrier, inspected)
    return ThetaReport(False, None, inspected)


def theta_to_eso(phi: Formula, sig: Signature) -> Formula:
    """Monadic existential second-order sentence equivalent to the submodel check.

    Shape: existsSet X. (nonempty & closed-under-each-function &
    contains-each-constant & relativization of phi to X).
    """
    _require_fo_sentence(phi)
    set_var = fresh_set_variable(phi)
    nonempty_var = fresh_variables(phi, 1)[0]
    conjuncts = [Exists(nonempty_var, SetAtom(set_var, Var(nonempty_var)))]
    for name, arity in sig.functions:
        args = fresh_variables(phi, arity)
        closed = Implies(
            make_and(SetAtom(set_var, Var(v)) for v in args),
            SetAtom(set_var, Func(name, tuple(Var(v) for v in args))),
        )
        for v in reversed(args):
            closed = Forall(v, closed)
        conjuncts.append(closed)
    for name in sig.constants:
        conjuncts.append(SetAtom(set_var, Const(name)))
    conjuncts.append(relativize_to_set_variable(phi, set_var))
    return ExistsSet(set_var, make_and(conjuncts))


def theta_bounded_to_existential_predicate(
    phi: Formula, bound: int, sig: Optional[Signature] = None
) -> Formula:
    """Existential first-order sentence equivalent to the bounded submodel check.

    Predicate-only signatures only: prefixes ``bound`` fresh existential
    variables over the quantifier-eliminated relativization of ``phi``.
    """
    _require_fo_sentence(phi)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if sig is not None and (sig.functions or sig.constants):
        raise ValueError("functional signature: use the diagram-based translation")
    variables = fresh_variables(phi, bound)
    matrix = relativize_to_variables(phi, variables)
    sentence = matrix
    for v in reversed(variables):
        sentence = Exists(v, sentence)
    return sentence


@dataclass(frozen=True)
class FunctionalTranslation:
    """Existential diagram disjunction plus its completeness certificate.

    The sentence implies the bounded submodel check on every structure;
    equivalence holds exactly on structures all of whose submodels
    generated by at most ``bound`` elements have at most ``size_cap``
    elements.  ``disjuncts`` is the number of generated-model diagrams.
    """

    sentence: Formula
    bound: int
    size_cap: int
    disjuncts: int


def _generator_constant_names(sig: Signature, count: int) -> list[str]:
    taken = sig.symbol_names()
    names = []
    i = 0
    while len(names) < count:
        name = f"g{i}"
        if name not in taken:
            names.append(name)
        i += 1
    return names


def _representative_terms(s: Structure, generators: Sequence[int], gen_names) -> dict:
    """Breadth-first representative closed terms, shortest first.

    Depth-0 terms are the generator markers (in order) and the original
    constants (in signature order); deeper terms apply function symbols in
    signature order to already-represented elements, argument tuples in
    ascending element order.
    """
    reps: dict[int, Term] = {}
    for name, e in zip(gen_names, generators):
        reps.setdefault(e, Const(name))
    for cname in s.signature.constants:
        reps.setdefault(s.constants[cname], Const(cname))
    while len(reps) < s.size:
        added = {}
        elems = sorted(reps)
        for fname, arity in s.signature.functions:
            table = s.functions[fname]
            for args in itertools.product(elems, repeat=arity):
                value = table[args]
                if value not in reps and value not in added:
                    added[value] = Func(fname, tuple(reps[a] for a in args))
        if not added:
            raise ValueError("structure is not generated by the given elements")
        reps.update(added)
    return reps


@dataclass(frozen=True)
class DiagramSentence:
    """Atomic diagram of a generated model over representative closed terms."""

    generator_count: int
    representatives: tuple  # term for element 0, 1, ...
    literals: tuple  # atomic and negated atomic formulas


def atomic_diagram(
    s: Structure, generators: Sequence[int], gen_names: Sequence[str]
) -> DiagramSentence:
    """Diagram literals characterizing ``s`` (with marked generators) up to isomorphism.

    Contains equations anchoring each marker and constant to its
    representative, all function entries over representatives, all
    predicate facts and their negations, and pairwise disequalities.
    Syntactically trivial equations (t = t) are dropped.
    """
    reps = _representative_terms(s, generators, gen_names)
    literals = []
    for name, e in zip(gen_names, generators):
        if reps[e] != Const(name):
            literals.append(Eq(Const(name), reps[e]))
    for cname in s.signature.constants:
        if reps[s.constants[cname]] != Const(cname):
            literals.append(Eq(Const(cname), reps[s.constants[cname]]))
    for fname, arity in s.signature.functions:
        table = s.functions[fname]
        for args in itertools.product(range(s.size), repeat=arity):
            lhs = Func(fname, tuple(reps[a] for a in args))
            rhs = reps[table[args]]
            if lhs != rhs:
                literals.append(Eq(lhs, rhs))
    for pname, arity in s.signature.predicates:
        rel = s.predicates[pname]
        for args in itertools.product(range(s.size), repeat=arity):
            atom = Atom(pname, tuple(reps[a] for a in args))
            literals.append(atom if args in rel else Not(atom))
    for i, j in itertools.combinations(range(s.size), 2):
        literals.append(Not(Eq(reps[i], reps[j])))
    return DiagramSentence(
        len(generators), tuple(reps[i] for i in range(s.size)), tuple(literals)
    )


def enumerate_generated_models(
    sig: Signature,
    bound: int,
    size_cap: int,
    satisfying: Optional[Callable[[Structure], bool]] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterable[tuple[Structure, tuple[int, ...]]]:
    """All (structure, generators) generated by ``bound`` marked elements, up to
    marked isomorphism, sizes up to ``size_cap``, optionally filtered."""
    gen_names = _generator_constant_names(sig, bound)
    marked_sig = Signature(sig.predicates, sig.functions, sig.constants + tuple(gen_names))
    seen = set()
    for size in range(1, size_cap + 1):
        for s in enumerate_structures(sig, size, cap=cap):
            if satisfying is not None and not satisfying(s):
                continue
            for generators in itertools.product(range(size), repeat=bound):
                if len(generated_carrier(s, generators)) != size:
                    continue
                marked = Structure(
                    marked_sig,
                    size,
                    s.predicates,
                    s.functions,
                    dict(s.constants) | dict(zip(gen_names, generators)),
                )
                key = canonical_key(marked)
                if key in seen:
                    continue
                seen.add(key)
                yield s, generators


def theta_bounded_to_existential_functional(
    phi: Formula,
    sig: Signature,
    bound: int,
    size_cap: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> FunctionalTranslation:
    """Existential sentence for the bounded submodel check over functional signatures.

    Enumerates, up to isomorphism, the models generated by ``bound``
    marked elements with at most ``size_cap`` elements that satisfy
    ``phi``; each contributes the conjunction of its atomic diagram, with
    generator markers replaced by the prefixed variables.
    """
    _require_fo_sentence(phi)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if size_cap < bound:
        raise ValueError("size cap must be at least the generator bound")
    gen_names = _generator_constant_names(sig, bound)
    variables = fresh_variables(phi, bound)
    disjuncts = []
    for s, generators in enumerate_generated_models(
        sig, bound, size_cap, satisfying=lambda t: evaluate_fo(t, phi), cap=cap
    ):
        diagram = atomic_diagram(s, generators, gen_names)
        body = make_and(diagram.literals)
        for gname, v in zip(gen_names, variables):
            body = substitute_constant(body, gname, Var(v))
        disjuncts.append(body)
    sentence = make_or(disjuncts)
    for v in reversed(variables):
        sentence = Exists(v, sentence)
    return FunctionalTranslation(sentence, bound, size_cap, len(disjuncts))


# --- modal-law suite ---------------------------------------------------------


@dataclass
class LawResult:
    law: str
    holds: bool
    counterexample: Optional[tuple[Structure, str]] = None
    strictness_witness: Optional[Structure] = None
    note: str = ""


@dataclass
class ModalLawReport:
    results: list[LawResult]

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.results)

    def result(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)


def _theta_truth(s: Structure, phi: Formula) -> bool:
    return theta_semantic(s, phi).truth


def _theta_theta_truth(s: Structure, phi: Formula) -> bool:
    # evaluated by nesting: some submodel whose own submodel satisfies phi
    for carrier in enumerate_submodels(s):
        if theta_semantic(induced_substructure(s, carrier), phi).truth:
            return True
    return False


def modal_laws_check(
    phi: Formula, psi: Formula, structures: Iterable[Structure]
) -> ModalLawReport:
    """Check the possibility-operator laws of the submodel operator on a corpus.

    Laws (i)-(iii) and (v)-(vii) are checked per structure; (iv) is the
    rule form: if phi -> psi holds on the corpus closed under submodels,
    then theta(phi) -> theta(psi) must hold there too.  One-directional
    laws also record a strictness witness when the corpus exhibits one.
    """
    structures = list(structures)
    results = {
        name: LawResult(name, True)
        for name in ["i", "ii", "iii", "iv", "v-and", "v-or", "vi", "vii"]
    }

    closure = []
    closure_keys = set()
    for s in structures:
        for carrier in enumerate_submodels(s):
            sub = induced_substructure(s, carrier)
            key = canonical_key(sub)
            if key not in closure_keys:
                closure_keys.add(key)
                closure.append(sub)

    for s in structures:
        if results["i"].holds:
            if not _theta_truth(s, TRUE) or _theta_truth(s, FALSE):
                results["i"] = LawResult("i", False, (s, "theta(true)/theta(false)"))
        if results["ii"].holds:
            if evaluate_fo(s, phi) and not _theta_truth(s, phi):
                results["ii"] = LawResult("ii", False, (s, "phi holds, theta(phi) fails"))
        if results["iii"].holds:
            if _theta_theta_truth(s, phi) != _theta_truth(s, phi):
                results["iii"] = LawResult("iii", False, (s, "theta(theta(phi)) != theta(phi)"))
        if results["v-and"].holds:
            both = make_and((phi, psi))
            if _theta_truth(s, both) and not (
                _theta_truth(s, phi) and _theta_truth(s, psi)
            ):
                results["v-and"] = LawResult(
                    "v-and", False, (s, "theta(phi&psi) without theta(phi)&theta(psi)")
                )
        if results["v-or"].holds:
            either = make_or((phi, psi))
            if _theta_truth(s, either) != (_theta_truth(s, phi) or _theta_truth(s, psi)):
                results["v-or"] = LawResult(
                    "v-or", False, (s, "theta(phi|psi) != theta(phi)|theta(psi)")
                )
        if results["vi"].holds:
            if not _theta_truth(s, phi) and evaluate_fo(s, phi):
                results["vi"] = LawResult("vi", False, (s, "not theta(phi) but phi"))
            elif not evaluate_fo(s, phi) and not _theta_truth(s, Not(phi)):
                results["vi"] = LawResult("vi", False, (s, "not phi but not theta(!phi)"))
        if results["vii"].holds:
            premise = any(
                not theta_semantic(induced_substructure(s, c), phi).truth
                for c in enumerate_submodels(s)
            )
            if premise and not _theta_truth(s, Not(phi)):
                results["vii"] = LawResult(
                    "vii", False, (s, "theta(!theta(phi)) without theta(!phi)")
                )

    implication = Implies(phi, psi)
    premise_holds = all(evaluate_fo(s, implication) for s in closure)
    if premise_holds:
        for s in closure:
            if _theta_truth(s, phi) and not _theta_truth(s, psi):
                results["iv"] = LawResult(
                    "iv", False, (s, "phi->psi valid on closure, theta monotonicity fails")
                )
                break
        results["iv"].note = "premise holds on corpus closure"
    else:
        results["iv"].note = "vacuous: phi->psi fails somewhere on the corpus closure"

    # strictness witnesses for the one-directional laws
    for s in structures:
        r = results["v-and"]
        if r.holds and r.strictness_witness is None:
            if (
                _theta_truth(s, phi)
                and _theta_truth(s, psi)
                and not _theta_truth(s, make_and((phi, psi)))
            ):
                r.strictness_witness = s
        r = results["vi"]
        if r.holds and r.strictness_witness is None:
            if not evaluate_fo(s, phi) and _theta_truth(s, phi):
                r.strictness_witness = s
        r = results["vii"]
        if r.holds and r.strictness_witness is None:
            premise = any(
                not theta_semantic(induced_substructure(s, c), phi).truth
                for c in enumerate_submodels(s)
            )
            if _theta_truth(s, Not(phi)) and not premise:
                r.strictness_witness = s

    order = ["i", "ii", "iii", "iv", "v-and", "v-or", "vi", "vii"]
    return ModalLawReport([results[name] for name in order])
