"""Small-world contact graph and the email interactions that raise
energy-saving awareness.

The graph is a Watts-Strogatz construction: a ring lattice of even
degree k whose forward edges are each rewired with probability beta.
Rewiring preserves the edge count, so |E| = n*k/2 always.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .occupants import STEREOTYPE_PARAMS, AgentState, OccupantAgent

# An agent's p_email is interpreted as expected emails per office day of
# this many minutes (at contact_rate 1).
EMAIL_BASE_MINUTES = 480

AWARENESS_CAP = 100.0


@dataclass(frozen=True)
class SocialNetwork:
    n: int
    k: int
    beta: float
    edges: frozenset[tuple[int, int]]  # (lo, hi) pairs
    neighbors: tuple[tuple[int, ...], ...]  # sorted adjacency per node

    def degree(self, node: int) -> int:
        return len(self.neighbors[node])


@dataclass(frozen=True, slots=True)
class ContactEvent:
    sender_id: int
    receiver_id: int
    minute: int


def build_small_world(n: int, k: int, beta: float, rng) -> SocialNetwork:
    """Watts-Strogatz graph over nodes 0..n-1.

    Requires n > k >= 2 with k even and beta in [0, 1]. Each forward
    lattice edge (i, i+j) is rewired to a uniformly chosen non-neighbor
    with probability beta; if a node is already connected to everyone
    the edge is kept, so the edge count is exactly n*k/2 either way.
    """
    if k < 2 or k % 2 != 0:
        raise ValidationError(f"small-world degree k must be even and >= 2, got {k}")
    if n <= k:
        raise ValidationError(f"small-world needs n > k, got n={n}, k={k}")
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"rewiring probability must be in [0, 1], got {beta}")

    adjacency: list[set[int]] = [set() for _ in range(n)]
    half = k // 2
    for i in range(n):
        for j in range(1, half + 1):
            other = (i + j) % n
            adjacency[i].add(other)
            adjacency[other].add(i)

    for j in range(1, half + 1):
        for i in range(n):
            target = (i + j) % n
            if target not in adjacency[i]:
                continue  # already rewired away
            if rng.random() >= beta:
                continue
            if len(adjacency[i]) >= n - 1:
                continue  # connected to everyone; nothing valid to rewire to
            while True:
                candidate = rng.randrange(n)
                if candidate != i and candidate not in adjacency[i]:
                    break
            adjacency[i].remove(target)
            adjacency[target].remove(i)
            adjacency[i].add(candidate)
            adjacency[candidate].add(i)

    edges = frozenset(
        (i, j) for i in range(n) for j in adjacency[i] if i < j
    )
    assert 2 * len(edges) == n * k, "rewiring must preserve the edge count"
    return SocialNetwork(
        n=n,
        k=k,
        beta=beta,
        edges=edges,
        neighbors=tuple(tuple(sorted(adjacency[i])) for i in range(n)),
    )


def contact_step(
    network: SocialNetwork,
    agents: list[OccupantAgent],
    contact_rate: float,
    awareness_delta: float,
    minute: int,
    rng,
    senders: list[OccupantAgent] | None = None,
) -> list[ContactEvent]:
    """One minute of email traffic.

    Each agent currently in its own office sends, with probability
    contact_rate * p_email / 480 (clamped to 1), one email to a uniform
    network neighbor; the receiver's awareness rises by awareness_delta,
    capped at 100. Agents are visited in id order and updates apply
    immediately, keeping runs reproducible.

    ``agents`` must be indexable by agent id. ``senders`` may restrict
    the scan to a pre-filtered id-ordered subset (the in-office check
    still applies); by default every agent is scanned.
    """
    if contact_rate <= 0.0:
        return []
    events: list[ContactEvent] = []
    scale = contact_rate / EMAIL_BASE_MINUTES
    in_office = AgentState.IN_OWN_OFFICE
    for agent in agents if senders is None else senders:
        if agent.state is not in_office:
            continue
        p_send = STEREOTYPE_PARAMS[agent.stereotype].p_email * scale
        if rng.random() >= p_send:
            continue
        nbrs = network.neighbors[agent.id]
        if not nbrs:
            continue
        receiver_id = nbrs[rng.randrange(len(nbrs))]
        receiver = agents[receiver_id]
        receiver.awareness = min(AWARENESS_CAP, receiver.awareness + awareness_delta)
        events.append(ContactEvent(agent.id, receiver_id, minute))
    return events
