from dataclasses import dataclass, field
from typing import Dict, List, Optional

from models.message import ActorId


@dataclass
class RoundTraffic:
    """
    Bytes sent and received per actor during one round
    """
    round: int
    bytes_sent: Dict[ActorId, int] = field(default_factory=dict)
    bytes_received: Dict[ActorId, int] = field(default_factory=dict)

    @property
    def bytes_down(self) -> int:
        """Bytes sent by the server"""
        return sum(v for actor, v in self.bytes_sent.items() if actor.is_server)

    @property
    def bytes_up(self) -> int:
        """Bytes sent by clients"""
        return sum(v for actor, v in self.bytes_sent.items() if not actor.is_server)

    def total_sent(self) -> int:
        return sum(self.bytes_sent.values())

    def total_received(self) -> int:
        return sum(self.bytes_received.values())

    def copy(self) -> "RoundTraffic":
        return RoundTraffic(self.round, dict(self.bytes_sent), dict(self.bytes_received))


@dataclass
class TrafficLog:
    """
    Snapshot of channel traffic: one entry per round plus totals
    """
    per_round: List[RoundTraffic] = field(default_factory=list)

    @staticmethod
    def _merge(tag: int, entries: List[RoundTraffic]) -> RoundTraffic:
        merged = RoundTraffic(round=tag)
        for entry in entries:
            for actor, v in entry.bytes_sent.items():
                merged.bytes_sent[actor] = merged.bytes_sent.get(actor, 0) + v
            for actor, v in entry.bytes_received.items():
                merged.bytes_received[actor] = merged.bytes_received.get(actor, 0) + v
        return merged

    @property
    def totals(self) -> RoundTraffic:
        """
        Counters aggregated over every round (round tag -1)
        """
        return self._merge(-1, self.per_round)

    def for_round(self, round_number: int) -> RoundTraffic:
        """
        Counters of one round; an all-zero entry when nothing was exchanged
        """
        for entry in self.per_round:
            if entry.round == round_number:
                return entry
        return RoundTraffic(round=round_number)

    def between(self, after: Optional[int], through: int) -> RoundTraffic:
        """
        Counters summed over rounds `after < t <= through`, tagged `through`.
        `after=None` starts from the first recorded round.
        """
        return self._merge(through, [
            e for e in self.per_round if (after is None or e.round > after) and e.round <= through
        ])

    def total_bytes(self) -> int:
        return self.totals.total_sent()
