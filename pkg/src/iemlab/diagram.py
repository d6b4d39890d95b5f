"""Combinatorial moves on permutation pairs and their class diagrams.

Each admissible pair admits two moves.  The move of type eps keeps row eps
fixed and reinserts the last letter of the other row just after the position
of row-eps's last letter.  Arrows of the resulting directed graph carry two
candidate labels:

``winner``
    the last letter of row eps at the source (the letter whose interval is
    larger when the move is realized by induction);

``first``
    the letter at the first slot of row eps at the source.

The first-slot letters never change under either move (the letter at rank 1
keeps rank 1 in every case of the move), so for d >= 3 the ``first`` labels of
a path take only two values and can never exhaust the alphabet.  Acceleration
logic therefore defaults to ``winner`` labels; diagram rendering defaults to
``first`` labels.  Every consumer records which convention it used.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import PermutationPair
from .errors import NotAdmissible

CONVENTIONS = ("winner", "first")


def arrow_name(pair: PermutationPair, eps: int, convention: str) -> str:
    if convention == "winner":
        return pair.last_letter(eps)
    if convention == "first":
        return pair.first_letter(eps)
    raise ValueError(f"unknown name convention {convention!r}")


def rauzy_move(pair: PermutationPair, eps: int) -> PermutationPair:
    """Apply the type-eps move; the source must be admissible.

    With a_eps the last letter of row eps and a_other the last letter of the
    other row, the other row is rewritten so that a_other lands immediately
    after a_eps's position in it; letters at or before that position keep
    their ranks, later letters shift right by one.
    """
    pair.require_admissible()
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    a_eps = pair.last_letter(eps)
    a_other = pair.last_letter(1 - eps)
    if a_eps == a_other:
        raise NotAdmissible("rows end with the same letter", pair=str(pair))
    moved = pair.bottom if eps == 0 else pair.top
    fixed_rank_of_winner = (
        pair.rank(1, a_eps) if eps == 0 else pair.rank(0, a_eps)
    )
    # rank of the winner in the row being rewritten
    cut = fixed_rank_of_winner
    d = pair.d
    new_ranks = []
    for letter, rank in zip(pair.alphabet, moved):
        if letter == a_other:
            new_ranks.append(cut + 1)
        elif rank <= cut:
            new_ranks.append(rank)
        elif rank < d:
            new_ranks.append(rank + 1)
        else:  # pragma: no cover - a_other is the only rank-d letter
            raise AssertionError("two letters at the last rank")
    if eps == 0:
        result = PermutationPair(pair.alphabet, pair.top, tuple(new_ranks))
    else:
        result = PermutationPair(pair.alphabet, tuple(new_ranks), pair.bottom)
    return result.require_admissible()


@dataclass(frozen=True)
class RauzyArrow:
    source: PermutationPair
    eps: int
    target: PermutationPair
    winner: str
    first: str

    def name(self, convention: str) -> str:
        return self.winner if convention == "winner" else self.first


class RauzyDiagram:
    """The full class of a pair under both moves, with labeled arrows."""

    def __init__(self, start: PermutationPair):
        start.require_admissible()
        self.start = start
        order = [start]
        index = {start: 0}
        arrows: list[RauzyArrow] = []
        head = 0
        while head < len(order):
            src = order[head]
            head += 1
            for eps in (0, 1):
                dst = rauzy_move(src, eps)
                if dst not in index:
                    index[dst] = len(order)
                    order.append(dst)
                arrows.append(
                    RauzyArrow(
                        src,
                        eps,
                        dst,
                        winner=arrow_name(src, eps, "winner"),
                        first=arrow_name(src, eps, "first"),
                    )
                )
        self.vertices: tuple[PermutationPair, ...] = tuple(order)
        self.arrows: tuple[RauzyArrow, ...] = tuple(arrows)
        self._index = index

    def __len__(self):
        return len(self.vertices)

    def index_of(self, pair: PermutationPair) -> int:
        return self._index[pair]

    def is_strongly_connected(self) -> bool:
        n = len(self.vertices)
        fwd = [[] for _ in range(n)]
        bwd = [[] for _ in range(n)]
        for a in self.arrows:
            i, j = self._index[a.source], self._index[a.target]
            fwd[i].append(j)
            bwd[j].append(i)

        def reach(adj):
            seen = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            return len(seen) == n

        return reach(fwd) and reach(bwd)

    def to_json(self, convention: str = "first") -> dict:
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown name convention {convention!r}")
        return {
            "convention": convention,
            "start": 0,
            "vertices": [
                {"top": list(v.order(0)), "bottom": list(v.order(1))}
                for v in self.vertices
            ],
            "arrows": [
                {
                    "src": self._index[a.source],
                    "eps": a.eps,
                    "name": a.name(convention),
                    "dst": self._index[a.target],
                }
                for a in self.arrows
            ],
        }

    def to_dot(self, convention: str = "first") -> str:
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown name convention {convention!r}")
        lines = ["digraph rauzy {", "  rankdir=LR;"]
        for i, v in enumerate(self.vertices):
            label = " ".join(v.order(0)) + "\\n" + " ".join(v.order(1))
            lines.append(f'  v{i} [label="{label}" shape=box];')
        for a in self.arrows:
            i, j = self._index[a.source], self._index[a.target]
            lines.append(f'  v{i} -> v{j} [label="{a.eps}:{a.name(convention)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
