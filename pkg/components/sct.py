"""Size-change matrices over {-1, 0, ∞}, the call graph and its transitive closure."""
import enum
import logging
from collections import deque
from typing import Deque, Dict, Iterable, List, Sequence, Set, Tuple, Union

import numpy as np

from components.deppairs import DependencyPair
from components.outcomes import LoopEntry, SCTOutcome
from components.signature import Signature
from components.syntax import Sym, Term, alpha_eq, free_vars, spine
from components.util import format_entry

logger = logging.getLogger(__name__)

DECREASE = -1.0
KEEP = 0.0
UNKNOWN = np.inf

Entry = Union[int, float, str]


class SCMatrix:
    """An immutable size-change matrix, hashable so that edge sets detect their fixpoint.

    Args:
        data: The entries, each one of ``-1``, ``0`` and ``inf`` (``"inf"`` is accepted too)
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, data: Union[np.ndarray, Sequence[Sequence[Entry]]]) -> None:
        if not isinstance(data, np.ndarray):
            data = np.array(
                [[np.inf if entry == "inf" else entry for entry in row] for row in data],
                dtype=float,
            )
        array = np.array(data, dtype=float, ndmin=2) + 0.0  # drops -0.0
        if array.ndim != 2:
            raise ValueError("size-change matrices are two-dimensional")
        if not np.isin(array, (DECREASE, KEEP, UNKNOWN)).all():
            raise ValueError(f"entries must be -1, 0 or inf, got {array.tolist()}")
        array.setflags(write=False)
        self._data = array
        self._hash = hash((array.shape, array.tobytes()))

    @classmethod
    def unknown(cls, rows: int, cols: int) -> "SCMatrix":
        return cls(np.full((rows, cols), np.inf))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape  # type: ignore[return-value]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SCMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __hash__(self) -> int:
        return self._hash

    def __getitem__(self, index: Tuple[int, int]) -> float:
        return float(self._data[index])

    def __matmul__(self, other: "SCMatrix") -> "SCMatrix":
        return compose(self, other)

    def sort_key(self) -> Tuple[Tuple[int, int], Tuple[float, ...]]:
        return self.shape, tuple(self._data.ravel().tolist())

    def is_idempotent(self) -> bool:
        return self.shape[0] == self.shape[1] and compose(self, self) == self

    def has_decreasing_diagonal(self) -> bool:
        return bool((np.diagonal(self._data) == DECREASE).any())

    def without(self, rows: Iterable[int] = (), cols: Iterable[int] = ()) -> "SCMatrix":
        data = np.delete(self._data, list(rows), axis=0)
        return SCMatrix(np.delete(data, list(cols), axis=1))

    def to_json(self) -> List[List[Union[int, str]]]:
        return [
            ["inf" if entry == np.inf else int(entry) for entry in row]
            for row in self._data.tolist()
        ]

    def __str__(self) -> str:
        rows = (", ".join(format_entry(entry) for entry in row) for row in self._data.tolist())
        return "[" + ", ".join(f"[{row}]" for row in rows) + "]"

    def __repr__(self) -> str:
        return f"SCMatrix({self})"


def compose(left: SCMatrix, right: SCMatrix) -> SCMatrix:
    """Min-plus product, with sums clamped at -1."""
    if left.shape[1] != right.shape[0]:
        raise ValueError(f"cannot compose {left.shape} with {right.shape}")
    sums = left.data[:, :, None] + right.data[None, :, :]
    product = sums.min(axis=1, initial=np.inf)
    return SCMatrix(np.maximum(product, DECREASE))


class Comparison(enum.Enum):
    STRICT = "strict"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def subterm_ge(larger: Term, smaller: Term) -> Comparison:
    """Compares by the subterm relation that only steps from ``f t1 … tn`` to some ``ti``."""
    if alpha_eq(larger, smaller):
        return Comparison.EQUAL
    pending = [larger]
    while pending:
        head, args = spine(pending.pop())
        if not isinstance(head, Sym):
            continue
        for arg in args:
            if alpha_eq(arg, smaller):
                return Comparison.STRICT
            pending.append(arg)
    return Comparison.INCOMPARABLE


_ENTRY = {Comparison.STRICT: DECREASE, Comparison.EQUAL: KEEP, Comparison.INCOMPARABLE: UNKNOWN}


def build_matrix(pair: DependencyPair, signature: Signature) -> SCMatrix:
    rows, cols = signature.arity(pair.lhs_head), signature.arity(pair.rhs_head)
    data = np.full((rows, cols), np.inf)
    for i, lhs_arg in enumerate(pair.lhs_args[:rows]):
        for j, rhs_arg in enumerate(pair.rhs_args[:cols]):
            if free_vars(rhs_arg) & pair.bound:
                continue
            data[i, j] = _ENTRY[subterm_ge(lhs_arg, rhs_arg)]
    return SCMatrix(data)


Edge = Tuple[str, str]


class CallGraph:
    """Defined symbols with matrix-labelled edges.

    Args:
        nodes: The defined symbols in declaration order
        edges: Maps ``(f, g)`` to the set of matrices on that edge
        labels: Maps ``(f, g)`` and a matrix to the pairs it was built from
    """

    def __init__(
        self,
        nodes: Sequence[str],
        edges: Dict[Edge, Set[SCMatrix]],
        labels: Dict[Edge, Dict[SCMatrix, List[str]]],
    ) -> None:
        self.nodes = list(nodes)
        self.edges = edges
        self.labels = labels

    def matrices(self, source: str, target: str) -> List[SCMatrix]:
        return sorted(self.edges.get((source, target), ()), key=SCMatrix.sort_key)

    def pair_labels(self, source: str, target: str, matrix: SCMatrix) -> List[str]:
        return self.labels.get((source, target), {}).get(matrix, [])

    def sorted_edges(self) -> List[Tuple[str, str, SCMatrix]]:
        order = {name: index for index, name in enumerate(self.nodes)}
        ordered = sorted(self.edges, key=lambda edge: (order[edge[0]], order[edge[1]]))
        return [
            (source, target, matrix)
            for source, target in ordered
            for matrix in self.matrices(source, target)
        ]

    def __len__(self) -> int:
        return sum(len(matrices) for matrices in self.edges.values())


def build_call_graph(
    pairs: Sequence[DependencyPair], matrices: Sequence[SCMatrix], signature: Signature
) -> CallGraph:
    edges: Dict[Edge, Set[SCMatrix]] = {}
    labels: Dict[Edge, Dict[SCMatrix, List[str]]] = {}
    for pair, matrix in zip(pairs, matrices):
        edge = (pair.lhs_head, pair.rhs_head)
        edges.setdefault(edge, set()).add(matrix)
        labels.setdefault(edge, {}).setdefault(matrix, []).append(pair.label)
    return CallGraph(signature.defined_symbols, edges, labels)


class _Closure:
    def __init__(self, graph: CallGraph) -> None:
        self.logger = logging.getLogger(self.__class__.__qualname__)
        self.graph = graph
        self.edges: Dict[Edge, Set[SCMatrix]] = {
            edge: set(matrices) for edge, matrices in graph.edges.items()
        }
        self.successors: Dict[str, Set[str]] = {}
        self.predecessors: Dict[str, Set[str]] = {}
        for source, target in self.edges:
            self.successors.setdefault(source, set()).add(target)
            self.predecessors.setdefault(target, set()).add(source)

    def _add(self, edge: Edge, matrix: SCMatrix, worklist: Deque[Tuple[Edge, SCMatrix]]) -> None:
        known = self.edges.setdefault(edge, set())
        if matrix not in known:
            known.add(matrix)
            self.successors.setdefault(edge[0], set()).add(edge[1])
            self.predecessors.setdefault(edge[1], set()).add(edge[0])
            worklist.append((edge, matrix))

    def run(self) -> CallGraph:
        worklist: Deque[Tuple[Edge, SCMatrix]] = deque(
            (edge, matrix) for edge, matrices in self.edges.items() for matrix in matrices
        )
        rounds = 0
        while worklist:
            rounds += 1
            (source, middle), matrix = worklist.popleft()
            for target in sorted(self.successors.get(middle, ())):
                for other in list(self.edges[(middle, target)]):
                    self._add((source, target), compose(matrix, other), worklist)
            for origin in sorted(self.predecessors.get(source, ())):
                for other in list(self.edges[(origin, source)]):
                    self._add((origin, middle), compose(other, matrix), worklist)
        self.logger.debug("Closure reached its fixpoint after %d steps", rounds)
        return CallGraph(self.graph.nodes, self.edges, self.graph.labels)


def transitive_closure(graph: CallGraph) -> CallGraph:
    return _Closure(graph).run()


def loop_inventory(closed: CallGraph) -> List[LoopEntry]:
    entries = []
    for symbol in closed.nodes:
        for matrix in closed.matrices(symbol, symbol):
            entries.append(
                LoopEntry(
                    symbol=symbol,
                    matrix=matrix,
                    idempotent=matrix.is_idempotent(),
                    decreasing=matrix.has_decreasing_diagonal(),
                    labels=closed.pair_labels(symbol, symbol, matrix),
                )
            )
    return entries


def check_sct(closed: CallGraph) -> SCTOutcome:
    failures = [entry for entry in loop_inventory(closed) if entry.violation]
    for entry in failures:
        logger.debug("Loop %s on %s is idempotent without decrease", entry.matrix, entry.symbol)
    return SCTOutcome(failures)
