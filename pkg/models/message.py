from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Union

from models.model_params import ModelParams

HEADER_BYTES = 64
BYTES_PER_ELEMENT = 8


class ActorKind(str, Enum):
    SERVER = "server"
    CLIENT = "client"


class PayloadKind(str, Enum):
    MODEL = "model"
    CONTROL = "control"
    SIGNAL = "signal"


@dataclass(frozen=True)
class ActorId:
    """
    A participant of the federation: the server, or client number `index`
    """
    kind: ActorKind
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind == ActorKind.SERVER and self.index is not None:
            raise ValueError("The server has no index")
        if self.kind == ActorKind.CLIENT and (self.index is None or self.index < 0):
            raise ValueError("Client actors need a non-negative index")

    @classmethod
    def server(cls) -> "ActorId":
        return cls(ActorKind.SERVER)

    @classmethod
    def client(cls, index: int) -> "ActorId":
        return cls(ActorKind.CLIENT, int(index))

    @property
    def is_server(self) -> bool:
        return self.kind == ActorKind.SERVER

    def sort_key(self):
        return (0, -1) if self.is_server else (1, self.index)

    def __str__(self) -> str:
        return "server" if self.is_server else f"client-{self.index}"


Payload = Union[ModelParams, str]


def payload_size(kind: PayloadKind, payload: Any) -> int:
    """
    Serialized size: 8 bytes per tensor element plus a 64-byte header
    """
    elements = payload.num_elements() if isinstance(payload, ModelParams) else 0
    return elements * BYTES_PER_ELEMENT + HEADER_BYTES


@dataclass(frozen=True)
class Message:
    """
    Everything that crosses the channel.

    `payload` is a ModelParams for MODEL and CONTROL messages and a tag
    string for SIGNAL messages.
    """
    kind: PayloadKind
    payload: Payload
    sender: ActorId
    receiver: ActorId
    size_bytes: int

    @classmethod
    def create(cls, kind: PayloadKind, payload: Payload, sender: ActorId, receiver: ActorId) -> "Message":
        if kind == PayloadKind.SIGNAL:
            if not isinstance(payload, str):
                raise ValueError("Signal payloads are string tags")
            body = payload
        else:
            if not isinstance(payload, ModelParams):
                raise ValueError(f"{kind.value} payloads must be ModelParams")
            # deep copy + read-only arrays: later sender-side mutation cannot leak
            body = payload.frozen_copy()
        return cls(kind, body, sender, receiver, payload_size(kind, body))
