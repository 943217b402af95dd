import logging
import threading
from collections import deque
from typing import Deque, Dict, Iterable, List, Optional

from models.message import ActorId, Message, Payload, PayloadKind
from models.traffic_log import RoundTraffic, TrafficLog
from services.error_service import NoMessageError, UnregisteredActorError

logger = logging.getLogger(__name__)


class Channel:
    """
    Simulated communication medium between server and clients.

    Every payload exchange goes through send/receive/broadcast and is
    metered per round. Operations are serialized by a lock, so clients
    training on worker threads can share one channel.
    """

    def __init__(self, actors: Optional[Iterable[ActorId]] = None):
        """
        Initialize the channel, optionally registering actors up front
        """
        self.mailboxes: Dict[ActorId, Deque[Message]] = {}
        self._lock = threading.RLock()
        self._round = 0
        self._traffic: Dict[int, RoundTraffic] = {}
        for actor in actors or []:
            self.register(actor)

    # -- membership -------------------------------------------------------------

    def register(self, actor: ActorId):
        with self._lock:
            if actor not in self.mailboxes:
                self.mailboxes[actor] = deque()
                logger.debug(f"Registered {actor} on channel")

    def begin_round(self, round_number: int):
        """
        Start bucketing traffic under `round_number`
        """
        with self._lock:
            self._round = int(round_number)

    # -- exchange ---------------------------------------------------------------

    def _bucket(self) -> RoundTraffic:
        if self._round not in self._traffic:
            self._traffic[self._round] = RoundTraffic(round=self._round)
        return self._traffic[self._round]

    def _mailbox(self, actor: ActorId) -> Deque[Message]:
        try:
            return self.mailboxes[actor]
        except KeyError:
            raise UnregisteredActorError(f"{actor} is not registered on the channel") from None

    def send(self, message: Message):
        """
        Enqueue a message in the receiver's mailbox and meter it
        """
        with self._lock:
            mailbox = self._mailbox(message.receiver)
            mailbox.append(message)
            bucket = self._bucket()
            bucket.bytes_sent[message.sender] = bucket.bytes_sent.get(message.sender, 0) + message.size_bytes
        logger.debug(f"{message.sender} -> {message.receiver}: {message.kind.value} ({message.size_bytes} bytes)")

    def send_payload(self, kind: PayloadKind, payload: Payload, sender: ActorId, receiver: ActorId) -> Message:
        message = Message.create(kind, payload, sender, receiver)
        self.send(message)
        return message

    def receive(self, actor: ActorId, sender: Optional[ActorId] = None,
                kind: Optional[PayloadKind] = None) -> Message:
        """
        Remove and return the first message for `actor`, optionally filtered
        by sender and payload kind
        """
        with self._lock:
            mailbox = self._mailbox(actor)
            for position, message in enumerate(mailbox):
                if sender is not None and message.sender != sender:
                    continue
                if kind is not None and message.kind != kind:
                    continue
                del mailbox[position]
                bucket = self._bucket()
                bucket.bytes_received[actor] = bucket.bytes_received.get(actor, 0) + message.size_bytes
                return message

        wanted = []
        if sender is not None:
            wanted.append(f"from {sender}")
        if kind is not None:
            wanted.append(f"of kind {kind.value}")
        raise NoMessageError(f"no message for {actor} {' '.join(wanted)}".rstrip())

    def broadcast(self, kind: PayloadKind, payload: Payload, sender: ActorId,
                  recipients: List[ActorId]) -> List[Message]:
        """
        Send one independent copy per recipient; each copy is metered
        """
        if not recipients:
            raise ValueError("broadcast needs at least one recipient")
        with self._lock:
            for recipient in recipients:
                self._mailbox(recipient)
            return [self.send_payload(kind, payload, sender, recipient) for recipient in recipients]

    # -- accounting -------------------------------------------------------------

    def pending(self, actor: Optional[ActorId] = None) -> int:
        """
        Number of messages waiting (for one actor, or overall)
        """
        with self._lock:
            if actor is not None:
                return len(self._mailbox(actor))
            return sum(len(m) for m in self.mailboxes.values())

    def pending_bytes(self) -> int:
        with self._lock:
            return sum(msg.size_bytes for mailbox in self.mailboxes.values() for msg in mailbox)

    def traffic_report(self) -> TrafficLog:
        """
        Snapshot of per-round counters; does not mutate the channel
        """
        with self._lock:
            return TrafficLog(per_round=[self._traffic[r].copy() for r in sorted(self._traffic)])
