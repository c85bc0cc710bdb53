"""Memory schemas and sequence matching.

A memory schema is a forest of schema nodes: the roots form an implicit
sequel chain in declaration order, every other node hangs under exactly one
parent edge.  Matching a schema against an event corpus picks a subsequence
of roots and an equally long subsequence of corpus events (the anchors),
splits the corpus into blocks around the anchors, and covers every
remaining event with a node of the anchoring root's tree, all under one
consistent substitution.  Schema nodes nothing matched must at least have
all their variables pinned down.

understand() extends this to an ordered list of schemas over one corpus:
the corpus is cut into contiguous segments, one per schema, and declared
cross-schema sequel links carry truth from one segment's instance to the
next.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .matching import confirm_unmatched, match_event, merge
from .memory import (
    EventEdge,
    GoalSupport,
    MemoryState,
    SchemaInstance,
    run_fixpoint_group,
)
from .model import (
    EMPTY_SUBSTITUTION,
    CorpusDocument,
    EventExpression,
    PreconditionError,
    SchemaEdge,
    Substitution,
    identical,
    variables_of,
)

ORACLE_MAX_EVENTS = 8
ORACLE_MAX_NODES = 8


# ---------------------------------------------------------------------------
# Schema structure


@dataclass(frozen=True, eq=False)
class MemorySchema:
    """A named forest of schema nodes with labeled edges and fs links.

    `edges` holds only the declared edges, in document order; the sequel
    chain over `roots` is synthesized on demand so that rendering a parsed
    schema reproduces the source.
    """

    name: str
    roots: tuple[str, ...]
    nodes: Mapping[str, EventExpression]
    edges: tuple[SchemaEdge, ...]
    fs_links: Mapping[str, str]

    def root_chain_edges(self) -> tuple[SchemaEdge, ...]:
        declared = {(e.source, e.label, e.target, e.test) for e in self.edges}
        chain = []
        for a, b in zip(self.roots, self.roots[1:]):
            if (a, "sequel", b, False) not in declared:
                chain.append(SchemaEdge(a, "sequel", b))
        return tuple(chain)

    def all_edges(self) -> tuple[SchemaEdge, ...]:
        """Declared edges plus the synthesized root sequel chain."""
        return self.edges + self.root_chain_edges()

    def tree_edges(self) -> tuple[SchemaEdge, ...]:
        """Edges that give a node its tree parent (targets are never roots)."""
        root_set = set(self.roots)
        return tuple(e for e in self.edges if e.target not in root_set)

    def parent_of(self, node_id: str) -> Optional[str]:
        for e in self.tree_edges():
            if e.target == node_id:
                return e.source
        return None

    def root_of(self, node_id: str) -> Optional[str]:
        """The root whose tree contains the node; None when orphaned."""
        root_set = set(self.roots)
        seen = set()
        current = node_id
        while current not in root_set:
            if current in seen:
                return None
            seen.add(current)
            parent = self.parent_of(current)
            if parent is None:
                return None
            current = parent
        return current

    def tree_of(self, root_id: str) -> tuple[str, ...]:
        """Node ids of the tree under a root, in document order, root first."""
        members = [root_id]
        for node_id in self.nodes:
            if node_id != root_id and self.root_of(node_id) == root_id:
                members.append(node_id)
        return tuple(members)

    def __eq__(self, other: object) -> bool:
        """Strict structural equality, node order and slot order included."""
        if not isinstance(other, MemorySchema):
            return NotImplemented
        if self.name != other.name or self.roots != other.roots:
            return False
        if list(self.nodes) != list(other.nodes):
            return False
        if any(not identical(self.nodes[k], other.nodes[k]) for k in self.nodes):
            return False
        if self.edges != other.edges:
            return False
        return list(self.fs_links.items()) == list(other.fs_links.items())

    def __hash__(self) -> int:
        return hash((self.name, self.roots))


@dataclass(frozen=True)
class CrossLink:
    """A declared sequel link from one schema's root to another's."""

    from_schema: str
    from_node: str
    to_schema: str
    to_node: str

    def arrow(self) -> str:
        return "%s.%s -sequel-> %s.%s" % (
            self.from_schema, self.from_node, self.to_schema, self.to_node,
        )


@dataclass(frozen=True, eq=False)
class SchemaDocument:
    """An ordered list of memory schemas plus declared cross-schema links."""

    schemas: tuple[MemorySchema, ...]
    links: tuple[CrossLink, ...] = ()
    source: str = "<schemas>"

    def by_name(self, name: str) -> MemorySchema:
        for mp in self.schemas:
            if mp.name == name:
                return mp
        raise KeyError(name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SchemaDocument):
            return NotImplemented
        return self.schemas == other.schemas and self.links == other.links

    def __hash__(self) -> int:
        return hash(tuple(mp.name for mp in self.schemas))


def validate_memory_schema(mp: MemorySchema) -> list[str]:
    """Structural diagnostics; an empty list means the schema is well formed."""
    diags: list[str] = []
    root_set = set(mp.roots)
    if not mp.roots:
        diags.append("schema %s: no roots declared" % mp.name)
    dup_roots = [r for r, n in _counts(mp.roots).items() if n > 1]
    for r in sorted(dup_roots):
        diags.append("schema %s: root %s listed twice" % (mp.name, r))
    for r in mp.roots:
        if r not in mp.nodes:
            diags.append("schema %s: root %s is not a node" % (mp.name, r))
    for e in mp.edges:
        for end in (e.source, e.target):
            if end not in mp.nodes:
                diags.append("schema %s: edge %s uses unknown node %s"
                             % (mp.name, e.arrow(), end))
    for src, dst in mp.fs_links.items():
        for end in (src, dst):
            if end not in mp.nodes:
                diags.append("schema %s: fs link %s = %s uses unknown node %s"
                             % (mp.name, src, dst, end))
    seen_edges = set()
    for e in mp.edges:
        quad = (e.source, e.label, e.target, e.test)
        if quad in seen_edges:
            diags.append("schema %s: duplicate edge %s" % (mp.name, e.arrow()))
        seen_edges.add(quad)
    consecutive = set(zip(mp.roots, mp.roots[1:]))
    for e in mp.edges:
        if e.target in root_set and e.source in mp.nodes and e.target in mp.nodes:
            # Restating a consecutive root pair's sequel edge is harmless.
            if not (e.label == "sequel" and not e.test
                    and (e.source, e.target) in consecutive):
                diags.append("schema %s: edge %s makes a root a child"
                             % (mp.name, e.arrow()))
    parents: dict[str, list[str]] = {}
    for e in mp.tree_edges():
        if e.source in mp.nodes and e.target in mp.nodes:
            parents.setdefault(e.target, []).append(e.source)
    for node_id in mp.nodes:
        if node_id in root_set:
            continue
        count = len(parents.get(node_id, []))
        if count == 0:
            diags.append("schema %s: node %s has no tree parent" % (mp.name, node_id))
        elif count > 1:
            diags.append("schema %s: node %s has %d tree parents"
                         % (mp.name, node_id, count))
        elif mp.root_of(node_id) is None:
            diags.append("schema %s: node %s is unreachable from any root"
                         % (mp.name, node_id))
    for e in mp.edges:
        if e.label == "goal" and e.test and e.source in mp.nodes:
            if resolve_goal_support(mp, e) is None:
                diags.append(
                    "schema %s: goal edge %s has no sequel chain ending in an fs link"
                    % (mp.name, e.arrow()))
    return diags


def _counts(items: Iterable[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for item in items:
        out[item] = out.get(item, 0) + 1
    return out


def resolve_goal_support(mp: MemorySchema, edge: SchemaEdge) -> Optional[GoalSupport]:
    """Find the support chain for one goal-"$" edge.

    Breadth-first along plain sequel edges from the edge source; the first
    node reached that carries an fs link ends the chain, so the chain is as
    short as possible (ties broken toward smaller node ids).
    """
    successors: dict[str, list[str]] = {}
    for e in mp.all_edges():
        if e.label == "sequel" and not e.test:
            successors.setdefault(e.source, []).append(e.target)
    for outs in successors.values():
        outs.sort()
    queue: list[tuple[str, ...]] = [(edge.source,)]
    visited = {edge.source}
    while queue:
        path = queue.pop(0)
        last = path[-1]
        if last in mp.fs_links:
            return GoalSupport(
                source=edge.source,
                target=edge.target,
                chain=path,
                final_state=mp.fs_links[last],
            )
        for nxt in successors.get(last, []):
            if nxt not in visited:
                visited.add(nxt)
                queue.append(path + (nxt,))
    return None


def resolve_goal_supports(mp: MemorySchema) -> tuple[GoalSupport, ...]:
    """Supports for every resolvable goal-"$" edge, in sorted edge order."""
    found = []
    for e in sorted(mp.all_edges(), key=lambda e: (e.source, e.target, e.label)):
        if e.label == "goal" and e.test:
            sup = resolve_goal_support(mp, e)
            if sup is not None:
                found.append(sup)
    return tuple(found)


# ---------------------------------------------------------------------------
# Block partitioning


@dataclass(frozen=True)
class BlockPartition:
    """Corpus positions split into blocks around the anchors (all 1-based)."""

    anchors: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]


def partition_blocks(corpus_length: int, anchors: Sequence[int]) -> BlockPartition:
    """Split positions 1..corpus_length into one block per anchor.

    Every non-anchor position between anchor i and anchor i+1 joins block i
    (the left anchor's block); positions before the first anchor join block
    1 and positions after the last join the final block.
    """
    anchors = tuple(anchors)
    if corpus_length < 1:
        raise PreconditionError("corpus_length must be at least 1")
    if not anchors:
        raise PreconditionError("at least one anchor is required")
    if list(anchors) != sorted(set(anchors)):
        raise PreconditionError("anchors must be strictly increasing")
    if anchors[0] < 1 or anchors[-1] > corpus_length:
        raise PreconditionError("anchor positions out of range")
    blocks = []
    for i, a in enumerate(anchors):
        start = 1 if i == 0 else a
        end = corpus_length if i == len(anchors) - 1 else anchors[i + 1] - 1
        blocks.append(tuple(range(start, end + 1)))
    return BlockPartition(anchors=anchors, blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# Sequence matching


@dataclass(frozen=True)
class MatchResult:
    """One admissible way a schema covers a corpus.

    anchors pair chosen roots with chosen events in order; node_map covers
    every other corpus event with a tree node; unmatched nodes were
    confirmed through the substitution instead of an event.
    """

    schema_name: str
    chain_length: int
    anchors: tuple[tuple[str, str, int], ...]  # (root id, event id, position)
    node_map: tuple[tuple[str, str], ...]      # (node id, event id), sorted
    unmatched: frozenset[str]
    substitution: Substitution
    supports: tuple[GoalSupport, ...]

    def node_events(self) -> dict[str, str]:
        mapping = {root: ev for root, ev, _ in self.anchors}
        mapping.update(dict(self.node_map))
        return mapping

    def anchor_positions(self) -> tuple[int, ...]:
        return tuple(pos for _, _, pos in self.anchors)


def build_instance(mp: MemorySchema, result: MatchResult) -> SchemaInstance:
    return SchemaInstance(mp.name, mp.all_edges(), result.node_events())


def match_sequence(
    mp: MemorySchema, corpus: CorpusDocument, state: MemoryState
) -> Optional[MatchResult]:
    """Best admissible match of one schema against the whole corpus.

    The chain length l is maximized; ties prefer the lexicographically
    smallest anchor position vector, then the smallest root index vector.
    Returns None when no admissible match exists.
    """
    return _search(mp, corpus, state, first_root_licensed=False)


def _search(
    mp: MemorySchema,
    corpus: CorpusDocument,
    state: MemoryState,
    first_root_licensed: bool,
) -> Optional[MatchResult]:
    n = len(corpus)
    k = len(mp.roots)
    if n == 0 or k == 0:
        return None
    # A goal-"$" edge without a support chain can never satisfy condition
    # checks, whatever the candidate; bail out before searching.
    for e in mp.all_edges():
        if e.label == "goal" and e.test and resolve_goal_support(mp, e) is None:
            return None
    supports = resolve_goal_supports(mp)
    trees = {root: mp.tree_of(root) for root in mp.roots}
    for l in range(min(n, k), 0, -1):
        for anchor_pos in itertools.combinations(range(1, n + 1), l):
            for root_idx in itertools.combinations(range(k), l):
                result = _try_candidate(
                    mp, corpus, state, root_idx, anchor_pos,
                    trees, supports, first_root_licensed,
                )
                if result is not None:
                    return result
    return None


def _try_candidate(
    mp: MemorySchema,
    corpus: CorpusDocument,
    state: MemoryState,
    root_idx: tuple[int, ...],
    anchor_pos: tuple[int, ...],
    trees: Mapping[str, tuple[str, ...]],
    supports: tuple[GoalSupport, ...],
    first_root_licensed: bool,
) -> Optional[MatchResult]:
    n = len(corpus)
    chosen_roots = [mp.roots[i] for i in root_idx]
    subst = EMPTY_SUBSTITUTION
    for root, pos in zip(chosen_roots, anchor_pos):
        outcome = match_event(mp.nodes[root], corpus.events[pos - 1])
        if not outcome:
            return None
        merged = merge(subst, outcome.substitution)
        if not merged:
            return None
        subst = merged.substitution
    # The first root's anchor must already be held true (unless an incoming
    # declared link from an already-true root is about to make it true).
    if root_idx[0] == 0 and not first_root_licensed:
        first_ev = corpus.events[anchor_pos[0] - 1].id
        if not state.query(first_ev):
            return None
    blocks = partition_blocks(n, anchor_pos).blocks
    tasks: list[tuple[int, tuple[str, ...]]] = []
    for i, block in enumerate(blocks):
        tree_nodes = tuple(nd for nd in trees[chosen_roots[i]] if nd != chosen_roots[i])
        for pos in block:
            if pos != anchor_pos[i]:
                tasks.append((pos, tree_nodes))
    anchor_events = {root: corpus.events[pos - 1].id
                     for root, pos in zip(chosen_roots, anchor_pos)}
    return _assign(mp, corpus, state, tasks, 0, {}, set(), subst,
                   chosen_roots, anchor_pos, anchor_events, supports)


def _assign(
    mp: MemorySchema,
    corpus: CorpusDocument,
    state: MemoryState,
    tasks: Sequence[tuple[int, tuple[str, ...]]],
    index: int,
    node_map: dict[str, str],
    used: set[str],
    subst: Substitution,
    chosen_roots: Sequence[str],
    anchor_pos: tuple[int, ...],
    anchor_events: Mapping[str, str],
    supports: tuple[GoalSupport, ...],
) -> Optional[MatchResult]:
    """Backtracking assignment of block events to tree nodes.

    The remaining admissibility checks live in the leaf because they depend
    on the completed substitution.
    """
    if index == len(tasks):
        return _finish(mp, corpus, state, node_map, subst,
                       chosen_roots, anchor_pos, anchor_events, supports)
    pos, candidates = tasks[index]
    ev = corpus.events[pos - 1]
    for node_id in candidates:
        if node_id in used:
            continue
        outcome = match_event(mp.nodes[node_id], ev)
        if not outcome:
            continue
        merged = merge(subst, outcome.substitution)
        if not merged:
            continue
        node_map[node_id] = ev.id
        used.add(node_id)
        result = _assign(mp, corpus, state, tasks, index + 1, node_map, used,
                         merged.substitution, chosen_roots, anchor_pos,
                         anchor_events, supports)
        if result is not None:
            return result
        del node_map[node_id]
        used.remove(node_id)
    return None


def _finish(
    mp: MemorySchema,
    corpus: CorpusDocument,
    state: MemoryState,
    node_map: Mapping[str, str],
    subst: Substitution,
    chosen_roots: Sequence[str],
    anchor_pos: tuple[int, ...],
    anchor_events: Mapping[str, str],
    supports: tuple[GoalSupport, ...],
) -> Optional[MatchResult]:
    matched = set(chosen_roots) | set(node_map)
    unmatched = [nd for nd in mp.nodes if nd not in matched]
    if not confirm_unmatched([mp.nodes[nd] for nd in unmatched], subst):
        return None
    mapping = dict(anchor_events)
    mapping.update(node_map)
    # "$" edges whose endpoints both matched events state conditions on the
    # current memory, not consequences: pre needs its target already true.
    for e in mp.all_edges():
        if not e.test or e.label != "pre":
            continue
        src_ev = mapping.get(e.source)
        dst_ev = mapping.get(e.target)
        if src_ev is not None and dst_ev is not None and not state.query(dst_ev):
            return None
    return MatchResult(
        schema_name=mp.name,
        chain_length=len(chosen_roots),
        anchors=tuple(
            (root, anchor_events[root], pos)
            for root, pos in zip(chosen_roots, anchor_pos)
        ),
        node_map=tuple(sorted(node_map.items())),
        unmatched=frozenset(unmatched),
        substitution=subst,
        supports=supports,
    )


def oracle_match_sequence(
    mp: MemorySchema, corpus: CorpusDocument, state: MemoryState
) -> list[MatchResult]:
    """Every admissible match, by plain exhaustive enumeration.

    Deliberately unoptimized; the size guard keeps it honest.
    """
    n = len(corpus)
    k = len(mp.roots)
    if n > ORACLE_MAX_EVENTS:
        raise PreconditionError("oracle handles at most %d events" % ORACLE_MAX_EVENTS)
    if len(mp.nodes) > ORACLE_MAX_NODES:
        raise PreconditionError("oracle handles at most %d nodes" % ORACLE_MAX_NODES)
    results: list[MatchResult] = []
    if n == 0 or k == 0:
        return results
    if any(e.label == "goal" and e.test and resolve_goal_support(mp, e) is None
           for e in mp.all_edges()):
        return results
    supports = resolve_goal_supports(mp)
    for l in range(1, min(n, k) + 1):
        for anchor_pos in itertools.combinations(range(1, n + 1), l):
            for root_idx in itertools.combinations(range(k), l):
                results.extend(
                    _oracle_candidates(mp, corpus, state, root_idx, anchor_pos, supports)
                )
    return results


def _oracle_candidates(
    mp: MemorySchema,
    corpus: CorpusDocument,
    state: MemoryState,
    root_idx: tuple[int, ...],
    anchor_pos: tuple[int, ...],
    supports: tuple[GoalSupport, ...],
) -> list[MatchResult]:
    n = len(corpus)
    chosen_roots = [mp.roots[i] for i in root_idx]
    base = EMPTY_SUBSTITUTION
    for root, pos in zip(chosen_roots, anchor_pos):
        outcome = match_event(mp.nodes[root], corpus.events[pos - 1])
        if not outcome:
            return []
        merged = merge(base, outcome.substitution)
        if not merged:
            return []
        base = merged.substitution
    if root_idx[0] == 0 and not state.query(corpus.events[anchor_pos[0] - 1].id):
        return []
    blocks = partition_blocks(n, anchor_pos).blocks
    block_events: list[list[int]] = []
    block_nodes: list[tuple[str, ...]] = []
    for i, block in enumerate(blocks):
        block_events.append([p for p in block if p != anchor_pos[i]])
        tree = mp.tree_of(chosen_roots[i])
        block_nodes.append(tuple(nd for nd in tree if nd != chosen_roots[i]))
    assignments: list[list[tuple[str, str]]] = [[]]
    for events, nodes in zip(block_events, block_nodes):
        extended = []
        for chosen in itertools.permutations(nodes, len(events)):
            pairs = [(nd, corpus.events[p - 1].id) for nd, p in zip(chosen, events)]
            for prefix in assignments:
                extended.append(prefix + pairs)
        assignments = extended
        if not assignments:
            return []
    out = []
    anchor_events = {root: corpus.events[pos - 1].id
                     for root, pos in zip(chosen_roots, anchor_pos)}
    for assignment in assignments:
        subst = base
        ok = True
        for node_id, ev_id in assignment:
            outcome = match_event(mp.nodes[node_id], corpus.by_id(ev_id))
            if not outcome:
                ok = False
                break
            merged = merge(subst, outcome.substitution)
            if not merged:
                ok = False
                break
            subst = merged.substitution
        if not ok:
            continue
        node_map = dict(assignment)
        matched = set(chosen_roots) | set(node_map)
        unmatched = [nd for nd in mp.nodes if nd not in matched]
        if not confirm_unmatched([mp.nodes[nd] for nd in unmatched], subst):
            continue
        mapping = dict(anchor_events)
        mapping.update(node_map)
        ok = True
        for e in mp.all_edges():
            if e.test and e.label == "pre":
                src_ev = mapping.get(e.source)
                dst_ev = mapping.get(e.target)
                if src_ev is not None and dst_ev is not None and not state.query(dst_ev):
                    ok = False
                    break
        if not ok:
            continue
        out.append(MatchResult(
            schema_name=mp.name,
            chain_length=len(chosen_roots),
            anchors=tuple(
                (root, anchor_events[root], pos)
                for root, pos in zip(chosen_roots, anchor_pos)
            ),
            node_map=tuple(sorted(node_map.items())),
            unmatched=frozenset(unmatched),
            substitution=subst,
            supports=supports,
        ))
    return out


# ---------------------------------------------------------------------------
# Understanding


@dataclass(frozen=True)
class Segment:
    """One contiguous corpus slice claimed by one schema."""

    schema_name: str
    start: int
    end: int
    event_ids: tuple[str, ...]


@dataclass(frozen=True)
class UnderstandingReport:
    verdict: str  # "understandable" | "not-understandable"
    chain_length: int
    anchor_chain: tuple[str, ...]
    segments: tuple[Segment, ...]
    results: tuple[MatchResult, ...]
    state: MemoryState
    diagnostics: tuple[str, ...]

    @property
    def understandable(self) -> bool:
        return self.verdict == "understandable"


class SegmentationFailure(Exception):
    """No way to cut the corpus let every schema match its segment."""

    def __init__(self, matched: int, total: int, diagnostics: Sequence[str]) -> None:
        self.matched = matched
        self.total = total
        self.diagnostics = tuple(diagnostics)
        super().__init__(
            "segmentation failed: best attempt matched %d of %d schemas"
            % (matched, total))


def check_understandable(
    state: MemoryState,
    corpus: CorpusDocument,
    results: Sequence[MatchResult],
    segments: Sequence[Segment] = (),
) -> UnderstandingReport:
    """Final verdict: all events held true plus a confirmed sequel chain.

    The chain is the longest forward run of corpus events whose consecutive
    pairs carry confirmed sequel edges; a chain of one does not count.
    """
    ids = corpus.event_ids()
    n = len(ids)
    pairs = {(a, b) for (a, lbl, b) in state.confirmed if lbl == "sequel"}
    # Longest chain starting at each position, scanning right to left.
    length_from = [1] * n
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            if (ids[i], ids[j]) in pairs and 1 + length_from[j] > length_from[i]:
                length_from[i] = 1 + length_from[j]
    best = max(length_from, default=0)
    chain: tuple[str, ...] = ()
    if best >= 2:
        chain_list = []
        current = length_from.index(best)
        chain_list.append(ids[current])
        remaining = best - 1
        while remaining:
            for j in range(current + 1, n):
                if (ids[current], ids[j]) in pairs and length_from[j] == remaining:
                    chain_list.append(ids[j])
                    current = j
                    remaining -= 1
                    break
        chain = tuple(chain_list)
    diagnostics = []
    missing = [i for i in ids if i not in state.truths]
    for ev_id in missing:
        diagnostics.append("event %s is not held true" % ev_id)
    if best < 2:
        diagnostics.append("no confirmed sequel chain longer than one event")
    verdict = "understandable" if not missing and best >= 2 else "not-understandable"
    return UnderstandingReport(
        verdict=verdict,
        chain_length=best,
        anchor_chain=chain,
        segments=tuple(segments),
        results=tuple(results),
        state=state,
        diagnostics=tuple(diagnostics),
    )


def understand(
    doc: SchemaDocument,
    corpus: CorpusDocument,
    assertions: Sequence[str] = (),
    trace: Optional[list[str]] = None,
) -> UnderstandingReport:
    """Match every schema to a contiguous corpus segment and grow memory.

    Cut points are searched smallest-first; within one attempt the schemas
    are matched left to right, running the rules to fixpoint after each
    segment so truths earned by earlier segments (and carried over declared
    cross-schema sequel links) are visible to later match conditions.
    """
    schemas = doc.schemas
    m = len(schemas)
    n = len(corpus)
    if m == 0:
        raise SegmentationFailure(0, 0, ("schema document declares no schemas",))
    best_matched = -1
    best_diags: tuple[str, ...] = ()
    for cuts in itertools.combinations(range(1, n), m - 1):
        bounds = (0,) + cuts + (n,)
        state = MemoryState.for_corpus(corpus)
        for ev_id in assertions:
            state.assert_true(ev_id)
        attempt_trace: list[str] = []
        parts: list[tuple[SchemaInstance, tuple[GoalSupport, ...]]] = []
        event_edges: list[EventEdge] = []
        results: list[MatchResult] = []
        segments: list[Segment] = []
        diags: list[str] = []
        ok = True
        for i, mp in enumerate(schemas):
            start, end = bounds[i], bounds[i + 1]
            seg_corpus = CorpusDocument(corpus.events[start:end], corpus.source)
            licensed = _link_license(doc, schemas, i, results, state)
            result = _search(mp, seg_corpus, state, licensed)
            if result is None:
                diags.append(
                    "schema %s found no admissible match over events %s"
                    % (mp.name, ", ".join(seg_corpus.event_ids()) or "<none>"))
                ok = False
                break
            result = _rebase(result, start)
            if i > 0:
                new_edges = _link_event_edges(doc, schemas[i - 1], results[-1],
                                              mp, result)
                if not new_edges:
                    diags.append(
                        "no declared sequel link carries %s into %s"
                        % (schemas[i - 1].name, mp.name))
                    ok = False
                    break
                event_edges.extend(new_edges)
            results.append(result)
            segments.append(Segment(
                schema_name=mp.name,
                start=start + 1,
                end=end,
                event_ids=seg_corpus.event_ids(),
            ))
            parts.append((build_instance(mp, result), result.supports))
            run_fixpoint_group(state, parts, event_edges, attempt_trace)
        if ok:
            if trace is not None:
                trace.extend(attempt_trace)
            return check_understandable(state, corpus, results, segments)
        if len(results) > best_matched:
            best_matched = len(results)
            best_diags = tuple(diags)
    raise SegmentationFailure(max(best_matched, 0), m, best_diags)


def _rebase(result: MatchResult, offset: int) -> MatchResult:
    if offset == 0:
        return result
    return replace(result, anchors=tuple(
        (root, ev, pos + offset) for root, ev, pos in result.anchors
    ))


def _link_license(
    doc: SchemaDocument,
    schemas: Sequence[MemorySchema],
    index: int,
    results: Sequence[MatchResult],
    state: MemoryState,
) -> bool:
    """Whether an incoming declared link can satisfy the first-root condition.

    True when the previous schema matched one of its roots to an event that
    is already true, and a declared link carries that root into this
    schema's first root: the propagation rule would fire immediately, so
    the match may proceed as if the anchor were already true.
    """
    if index == 0 or not results:
        return False
    prev_schema = schemas[index - 1]
    prev_result = results[index - 1]
    current = schemas[index]
    prev_map = prev_result.node_events()
    for link in doc.links:
        if link.from_schema != prev_schema.name or link.to_schema != current.name:
            continue
        if not current.roots or link.to_node != current.roots[0]:
            continue
        source_ev = prev_map.get(link.from_node)
        if source_ev is not None and state.query(source_ev):
            return True
    return False


def _link_event_edges(
    doc: SchemaDocument,
    prev_schema: MemorySchema,
    prev_result: MatchResult,
    cur_schema: MemorySchema,
    cur_result: MatchResult,
) -> list[EventEdge]:
    edges = []
    prev_map = prev_result.node_events()
    cur_map = cur_result.node_events()
    for link in doc.links:
        if link.from_schema != prev_schema.name or link.to_schema != cur_schema.name:
            continue
        src_ev = prev_map.get(link.from_node)
        dst_ev = cur_map.get(link.to_node)
        if src_ev is not None and dst_ev is not None:
            edges.append(EventEdge(src_ev, "sequel", dst_ev, link.arrow()))
    return edges
