"""Window-transition graph learned from executed traces."""

from __future__ import annotations

import threading
from collections import deque

from .appmodel import CLICK, Event, Trace


class GuiGraph:
    """Observed ``(from_window, event, to_window)`` transitions.

    Recording is a set union, so it is idempotent and order independent;
    edges are never removed.
    """

    def __init__(self, edges=()):
        self._edges: set = set()
        self._lock = threading.Lock()
        for edge in edges:
            self.add_edge(*edge)

    def add_edge(self, src: str, event: Event, dst: str) -> None:
        with self._lock:
            self._edges.add((src, event, dst))

    def record_trace(self, trace: Trace) -> "GuiGraph":
        """Insert every executed window switch, and every executed click as a self-loop.

        Fills that stay on their window are left out: their inputs are mostly
        random and a self-loop never shortens a repair path.
        """
        new = set()
        for k, event in enumerate(trace.executed_events):
            src, dst = trace.states[k].window_id, trace.states[k + 1].window_id
            if src != dst or event.action == CLICK:
                new.add((src, event, dst))
        with self._lock:
            self._edges |= new
        return self

    @property
    def edges(self) -> frozenset:
        with self._lock:
            return frozenset(self._edges)

    @property
    def nodes(self) -> frozenset:
        out = set()
        for src, _, dst in self.edges:
            out.update((src, dst))
        return frozenset(out)

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, GuiGraph) and self.edges == other.edges

    def copy(self) -> "GuiGraph":
        return GuiGraph(self.edges)

    def find_path(self, src: str, dst: str) -> list[Event] | None:
        """Shortest event sequence from ``src`` to ``dst`` by hop count.

        Ties resolve towards lexicographically smaller (window, xpath); returns
        ``None`` when ``dst`` is unreachable.
        """
        if src == dst:
            return []
        adj: dict = {}
        for a, e, b in self.edges:
            adj.setdefault(a, []).append((b, e))
        for out in adj.values():
            out.sort(key=lambda be: (be[0], be[1].sort_key()))
        parent = {src: None}
        queue = deque([src])
        while queue:
            node = queue.popleft()
            for nxt, event in adj.get(node, ()):
                if nxt in parent:
                    continue
                parent[nxt] = (node, event)
                if nxt == dst:
                    path = []
                    cur = dst
                    while parent[cur] is not None:
                        prev, ev = parent[cur]
                        path.append(ev)
                        cur = prev
                    return path[::-1]
                queue.append(nxt)
        return None

    def dump(self) -> str:
        lines = []
        for src, e, dst in sorted(self.edges, key=lambda t: (t[0], t[2], t[1].sort_key())):
            line = f"{src} -> {dst} : {e.action} {e.target_xpath}"
            if e.input_text is not None:
                line += f" {e.input_text}"
            lines.append(line)
        return "\n".join(lines) + ("\n" if lines else "")
