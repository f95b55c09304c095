"""Graph parsing and cost-matrix construction.

Two on-disk formats are supported: plain edge lists (lines ``u v``, ``#``
comments, optional ``n <count>`` header) and TU-style flat-file datasets
(``DS_A.txt``/``DS_graph_indicator.txt`` plus optional label and attribute
files).  Cost matrices are dense float64 and come in two flavours:
shortest-path hop distances and the complement of adjacency.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path
from scipy.spatial.distance import cdist


class GraphParseError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


class DatasetError(ValueError):
    """Raised when a TU dataset directory is missing files or inconsistent."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph with optional node features and class label.

    Nodes are 0-indexed.  ``edges`` holds unordered pairs ``(u, v)`` with
    ``u < v``; self-loops and duplicates are rejected.  ``features`` is an
    ``(n, d)`` float array when present.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    features: np.ndarray | None = None
    label: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"node count must be nonnegative, got {self.n}")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if self.features is not None:
            feats = np.asarray(self.features, dtype=np.float64)
            if feats.ndim != 2 or feats.shape[0] != self.n:
                raise ValueError(
                    f"features must be (n, d) with n={self.n}, got {feats.shape}"
                )
            feats = feats.copy()
            feats.setflags(write=False)
            object.__setattr__(self, "features", feats)

    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix."""
        A = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            A[u, v] = 1.0
            A[v, u] = 1.0
        return A

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.float64)
        for u, v in self.edges:
            deg[u] += 1.0
            deg[v] += 1.0
        return deg


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric intra-graph cost matrix.

    ``mode`` is ``"distance"`` (zero diagonal, nonnegative entries) or
    ``"similarity"`` (no sign constraint).  Entries are float64; symmetry is
    required to 1e-12.  Tiny violations of the distance-mode constraints
    (below 1e-12, i.e. round-off) are snapped to exact values.
    """

    entries: np.ndarray
    mode: str = "distance"

    def __post_init__(self):
        E = np.asarray(self.entries, dtype=np.float64)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {E.shape}")
        if not np.all(np.isfinite(E)):
            raise ValueError("cost matrix has non-finite entries")
        if E.size and np.max(np.abs(E - E.T)) > 1e-12:
            raise ValueError("cost matrix is not symmetric to 1e-12")
        if self.mode not in ("distance", "similarity"):
            raise ValueError(f"unknown mode {self.mode!r}")
        E = (E + E.T) / 2.0
        if self.mode == "distance":
            if E.size and np.min(E) < -1e-12:
                raise ValueError("distance-mode cost matrix has negative entries")
            if E.size and np.max(np.abs(np.diag(E))) > 1e-12:
                raise ValueError("distance-mode cost matrix has nonzero diagonal")
            np.clip(E, 0.0, None, out=E)
            np.fill_diagonal(E, 0.0)
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FeatureDistance:
    """Pairwise squared Euclidean distances between two feature sets."""

    entries: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.entries, dtype=np.float64)
        if E.ndim != 2:
            raise ValueError(f"feature distance must be a matrix, got {E.shape}")
        if E.size and np.min(E) < -1e-12:
            raise ValueError("feature distances must be nonnegative")
        E = np.clip(E, 0.0, None)
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def parse_edge_list(text: str) -> Graph:
    """Parse an edge-list document into a graph.

    Each non-comment line is ``u v`` with nonnegative integers; ``#`` starts
    a comment.  An optional header ``n <count>`` (before any edge) fixes the
    node count; otherwise it is the largest index plus one.  Empty input
    yields the empty graph.
    """
    edges: set[tuple[int, int]] = set()
    header_n: int | None = None
    max_idx = -1
    seen_edge = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if seen_edge or header_n is not None:
                raise GraphParseError(f"line {lineno}: misplaced header {raw!r}")
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphParseError(f"line {lineno}: malformed header {raw!r}")
            header_n = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphParseError(f"line {lineno}: non-integer endpoint in {raw!r}") from exc
        if u < 0 or v < 0:
            raise GraphParseError(f"line {lineno}: negative node index in {raw!r}")
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop at node {u}")
        seen_edge = True
        max_idx = max(max_idx, u, v)
        edges.add((min(u, v), max(u, v)))
    n = header_n if header_n is not None else max_idx + 1
    if header_n is not None and max_idx >= header_n:
        raise GraphParseError(
            f"edge endpoint {max_idx} out of range for declared n={header_n}"
        )
    return Graph(n=n, edges=frozenset(edges))


def read_edge_list(path) -> Graph:
    """Read and parse an edge-list file."""
    return parse_edge_list(Path(path).read_text())


def _read_int_lines(path: Path) -> np.ndarray:
    values = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if line:
            values.append(int(line))
    return np.asarray(values, dtype=np.int64)


def parse_tu_dataset(directory) -> list[Graph]:
    """Load a TU-style flat-file dataset as a list of graphs.

    Mandatory files are ``<DS>_A.txt`` (comma-separated 1-indexed edge
    pairs) and ``<DS>_graph_indicator.txt`` (graph id per node).  Optional:
    ``<DS>_graph_labels.txt``, ``<DS>_node_labels.txt`` (one-hot encoded
    into features) and ``<DS>_node_attributes.txt`` (taken verbatim; when
    both are present the attribute columns come first).
    """
    d = Path(directory)
    if not d.is_dir():
        raise DatasetError(f"not a directory: {d}")
    a_files = sorted(d.glob("*_A.txt"))
    if not a_files:
        raise DatasetError(f"missing <DS>_A.txt in {d}")
    prefix = a_files[0].name[: -len("_A.txt")]

    def fpath(suffix: str) -> Path:
        return d / f"{prefix}_{suffix}.txt"

    ind_path = fpath("graph_indicator")
    if not ind_path.exists():
        raise DatasetError(f"missing {ind_path.name} in {d}")
    indicator = _read_int_lines(ind_path)
    total_nodes = len(indicator)
    if total_nodes == 0:
        raise DatasetError("empty graph indicator")
    n_graphs = int(indicator.max())
    if indicator.min() < 1:
        raise DatasetError("graph indicator ids must be 1-indexed")

    # global 1-indexed node id -> (graph index, local 0-indexed node id)
    local_idx = np.zeros(total_nodes, dtype=np.int64)
    sizes = np.zeros(n_graphs, dtype=np.int64)
    for node, gid in enumerate(indicator):
        local_idx[node] = sizes[gid - 1]
        sizes[gid - 1] += 1

    edge_sets: list[set[tuple[int, int]]] = [set() for _ in range(n_graphs)]
    for lineno, raw in enumerate(fpath("A").read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DatasetError(f"{prefix}_A.txt line {lineno}: expected 'u, v'")
        u, v = int(parts[0]), int(parts[1])
        if not (1 <= u <= total_nodes and 1 <= v <= total_nodes):
            raise DatasetError(f"{prefix}_A.txt line {lineno}: node id out of range")
        gu, gv = indicator[u - 1], indicator[v - 1]
        if gu != gv:
            raise DatasetError(
                f"{prefix}_A.txt line {lineno}: edge ({u}, {v}) crosses graph boundary"
            )
        if u == v:
            raise DatasetError(f"{prefix}_A.txt line {lineno}: self-loop at node {u}")
        lu, lv = int(local_idx[u - 1]), int(local_idx[v - 1])
        edge_sets[gu - 1].add((min(lu, lv), max(lu, lv)))

    feature_blocks: list[np.ndarray] = []
    attr_path = fpath("node_attributes")
    if attr_path.exists():
        rows = []
        for raw in attr_path.read_text().splitlines():
            line = raw.strip()
            if line:
                rows.append([float(x) for x in line.split(",")])
        attrs = np.asarray(rows, dtype=np.float64)
        if attrs.shape[0] != total_nodes:
            raise DatasetError(
                f"{attr_path.name} has {attrs.shape[0]} rows, expected {total_nodes}"
            )
        feature_blocks.append(attrs)
    label_path = fpath("node_labels")
    if label_path.exists():
        node_labels = _read_int_lines(label_path)
        if len(node_labels) != total_nodes:
            raise DatasetError(
                f"{label_path.name} has {len(node_labels)} rows, expected {total_nodes}"
            )
        classes = np.unique(node_labels)
        onehot = (node_labels[:, None] == classes[None, :]).astype(np.float64)
        feature_blocks.append(onehot)
    features = np.hstack(feature_blocks) if feature_blocks else None

    glabel_path = fpath("graph_labels")
    graph_labels: np.ndarray | None = None
    if glabel_path.exists():
        graph_labels = _read_int_lines(glabel_path)
        if len(graph_labels) != n_graphs:
            raise DatasetError(
                f"{glabel_path.name} has {len(graph_labels)} rows, expected {n_graphs}"
            )

    graphs = []
    node_of_graph = [np.flatnonzero(indicator == gid) for gid in range(1, n_graphs + 1)]
    for g in range(n_graphs):
        feats = features[node_of_graph[g]] if features is not None else None
        label = int(graph_labels[g]) if graph_labels is not None else None
        graphs.append(
            Graph(n=int(sizes[g]), edges=frozenset(edge_sets[g]), features=feats, label=label)
        )
    return graphs


def load_points_csv(path) -> np.ndarray:
    """Load a point cloud from CSV, one comma-separated coordinate row per node."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if line:
            rows.append([float(x) for x in line.split(",")])
    if not rows:
        raise GraphParseError(f"empty point file {path}")
    return np.asarray(rows, dtype=np.float64)


def shortest_path_cost(g: Graph, disconnected_value: float | None = None) -> CostMatrix:
    """All-pairs unweighted (BFS hop) distances as a cost matrix.

    Unreachable pairs get ``disconnected_value`` (default: the graph order
    ``n``, a finite value larger than any achievable hop distance).
    """
    if g.n < 1:
        raise ValueError("shortest_path_cost requires n >= 1")
    if disconnected_value is None:
        disconnected_value = float(g.n)
    if g.n == 1:
        return CostMatrix(np.zeros((1, 1)), mode="distance")
    rows, cols = [], []
    for u, v in g.edges:
        rows += [u, v]
        cols += [v, u]
    adj = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n)
    )
    D = _csgraph_shortest_path(adj, method="D", unweighted=True, directed=False)
    D[~np.isfinite(D)] = float(disconnected_value)
    return CostMatrix(D, mode="distance")


def adjacency_complement_cost(g: Graph) -> CostMatrix:
    """Cost matrix ``1 - A`` off-diagonal with a zero diagonal."""
    if g.n < 1:
        raise ValueError("adjacency_complement_cost requires n >= 1")
    E = 1.0 - g.adjacency()
    np.fill_diagonal(E, 0.0)
    return CostMatrix(E, mode="distance")


def feature_distance(gx: Graph, gy: Graph) -> FeatureDistance:
    """Squared Euclidean distances between the two graphs' feature rows."""
    if gx.features is None or gy.features is None:
        raise ValueError("both graphs must carry features")
    if gx.features.shape[1] != gy.features.shape[1]:
        raise ValueError(
            f"feature dimension mismatch: {gx.features.shape[1]} vs {gy.features.shape[1]}"
        )
    M = cdist(gx.features, gy.features, metric="sqeuclidean")
    return FeatureDistance(M)


def degree_features(g: Graph) -> Graph:
    """Copy of the graph with node degrees as a single feature column."""
    return Graph(
        n=g.n,
        edges=g.edges,
        features=g.degrees().reshape(-1, 1),
        label=g.label,
    )
