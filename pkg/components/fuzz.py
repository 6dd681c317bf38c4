"""Searching for reduction cycles from instances of left-hand sides.

A reported witness is a real reduction sequence, so it refutes termination. Finding nothing
proves nothing.
"""
import logging
import random
from collections import deque
from dataclasses import dataclass
from typing import Any, Deque, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from components.const import (
    DEFAULT_FUZZ_DEPTH,
    DEFAULT_FUZZ_MAX_NODES,
    DEFAULT_FUZZ_SEEDS,
    FUZZ_TERM_DEPTH,
)
from components.rewrite import Reduct, reduce_step, substitute
from components.signature import Signature
from components.syntax import (
    TYPE,
    RuleDecl,
    Sym,
    Term,
    alpha_key,
    apply_spine,
    free_vars,
    head_symbol,
    print_term,
    telescope,
)

logger = logging.getLogger(__name__)


@dataclass
class FuzzWitness:
    """A reduction sequence whose last term is α-equivalent to an earlier one.

    Args:
        start_term: The instantiated left-hand side the search started from
        trace: The reduction steps, in order
        cycle_start: Index into :attr:`terms` of the term the sequence returns to
    """

    start_term: Term
    trace: List[Reduct]
    cycle_start: int

    @property
    def terms(self) -> List[Term]:
        return [self.start_term] + [step.term for step in self.trace]

    @property
    def cycle_length(self) -> int:
        return len(self.trace) - self.cycle_start

    def describe(self, infix: Optional[Mapping[str, str]] = None) -> str:
        chain = " -> ".join(print_term(term, infix) for term in self.terms)
        return f"{chain} (cycle of length {self.cycle_length})"

    def to_json(self, infix: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
        return {
            "start": print_term(self.start_term, infix),
            "steps": [
                {
                    "term": print_term(step.term, infix),
                    "kind": step.kind,
                    "rule": step.rule_index,
                    "position": list(step.position),
                }
                for step in self.trace
            ],
            "cycle_start": self.cycle_start,
            "cycle_length": self.cycle_length,
        }


class _TermGenerator:
    """Builds closed constructor terms of a requested type, or fresh constants."""

    def __init__(self, signature: Signature, rng: random.Random) -> None:
        self.signature = signature
        self.rng = rng
        self.fresh_count = 0
        # type head -> undefined symbols building objects of that type
        self.constructors: Dict[str, List[str]] = {}
        for info in signature:
            if info.defined or info.sort_of_theta != TYPE:
                continue
            head = head_symbol(telescope(info.theta)[1])
            if head is not None:
                self.constructors.setdefault(head, []).append(info.name)

    def fresh(self) -> Term:
        while True:
            self.fresh_count += 1
            name = f"c{self.fresh_count}"
            if name not in self.signature:
                return Sym(name)

    def generate(self, wanted: Optional[Term], depth: int) -> Term:
        head = head_symbol(wanted) if wanted is not None else None
        options = self.constructors.get(head, []) if head else []
        if depth <= 0:
            options = [name for name in options if self.signature.arity(name) == 0]
        if not options:
            return self.fresh()
        name = self.rng.choice(options)
        binders, _ = telescope(self.signature.theta(name))
        instantiation: Dict[str, Term] = {}
        args = []
        for binder, domain in binders:
            arg = self.generate(substitute(domain, instantiation), depth - 1)
            instantiation[binder] = arg
            args.append(arg)
        return apply_spine(Sym(name), args)


def _start_terms(
    rules: Sequence[RuleDecl],
    generator: _TermGenerator,
    environments: Mapping[int, Sequence[Tuple[str, Term]]],
) -> List[Term]:
    starts = []
    for index, rule in enumerate(rules):
        types = dict(environments.get(index, ()))
        sigma: Dict[str, Term] = {}
        for name in sorted(free_vars(rule.lhs)):
            wanted = types.get(name)
            sigma[name] = generator.generate(
                substitute(wanted, sigma) if wanted is not None else None, FUZZ_TERM_DEPTH
            )
        starts.append(substitute(rule.lhs, sigma))
    return starts


class _Node:
    __slots__ = ("term", "key", "parent", "step", "depth")

    def __init__(
        self,
        term: Term,
        key: Hashable,
        parent: Optional["_Node"],
        step: Optional[Reduct],
        depth: int,
    ) -> None:
        self.term = term
        self.key = key
        self.parent = parent
        self.step = step
        self.depth = depth

    def path(self) -> List["_Node"]:
        nodes = []
        node: Optional[_Node] = self
        while node is not None:
            nodes.append(node)
            node = node.parent
        return nodes[::-1]


def _connecting_steps(
    edges: Mapping[Hashable, List[Tuple[Reduct, Hashable]]], source: Hashable, target: Hashable
) -> Optional[List[Reduct]]:
    """Steps along already explored reductions from ``source`` to ``target``, if any."""
    previous: Dict[Hashable, Optional[Tuple[Hashable, Reduct]]] = {source: None}
    queue: Deque[Hashable] = deque([source])
    while queue:
        key = queue.popleft()
        if key == target:
            steps: List[Reduct] = []
            while (back := previous[key]) is not None:
                key, step = back
                steps.append(step)
            return steps[::-1]
        for step, reached in edges.get(key, []):
            if reached not in previous:
                previous[reached] = (key, step)
                queue.append(reached)
    return None


def _search(
    start: Term, rules: Sequence[RuleDecl], depth: int, max_nodes: int
) -> Optional[FuzzWitness]:
    root = _Node(start, alpha_key(start), None, None, 0)
    # first node reaching each term, and every reduction explored so far
    nodes: Dict[Hashable, _Node] = {root.key: root}
    edges: Dict[Hashable, List[Tuple[Reduct, Hashable]]] = {}
    queue: Deque[_Node] = deque([root])
    explored = 0
    while queue and explored < max_nodes:
        node = queue.popleft()
        explored += 1
        if node.depth >= depth:
            continue
        for step in reduce_step(node.term, rules):
            key = alpha_key(step.term)
            edges.setdefault(node.key, []).append((step, key))
            if key not in nodes:
                nodes[key] = _Node(step.term, key, node, step, node.depth + 1)
                queue.append(nodes[key])
                continue
            back = _connecting_steps(edges, key, node.key)
            if back is not None:
                again = nodes[key]
                trace = [each.step for each in again.path()[1:]] + back + [step]
                return FuzzWitness(start, trace, again.depth)  # type: ignore[arg-type]
    return None


def fuzz_nontermination(
    rules: Sequence[RuleDecl],
    signature: Signature,
    seeds: int = DEFAULT_FUZZ_SEEDS,
    depth: int = DEFAULT_FUZZ_DEPTH,
    max_nodes: int = DEFAULT_FUZZ_MAX_NODES,
    environments: Optional[Mapping[int, Sequence[Tuple[str, Term]]]] = None,
) -> Optional[FuzzWitness]:
    """Explores reductions breadth-first from instantiated left-hand sides.

    Args:
        rules: The rewrite rules
        signature: Used to pick constructors for pattern variables
        seeds: Number of random instantiation rounds, seeded ``0``, ``1``, …
        depth: Longest reduction sequence explored
        max_nodes: Terms explored per start term
        environments: Optional. Pattern variable types per rule index. Without them every
            pattern variable becomes a fresh constant.

    Returns:
        The first witness found, or :obj:`None`.
    """
    seen = set()
    for seed in range(seeds):
        generator = _TermGenerator(signature, random.Random(seed))
        for start in _start_terms(rules, generator, environments or {}):
            key = alpha_key(start)
            if key in seen:
                continue
            seen.add(key)
            witness = _search(start, rules, depth, max_nodes)
            if witness is not None:
                logger.warning(
                    "Found a reduction cycle of length %d from %s",
                    witness.cycle_length,
                    signature.show(start),
                )
                return witness
    logger.info("No reduction cycle found with %d seeds", seeds)
    return None
