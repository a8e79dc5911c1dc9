"""
Trames du protocole de service.

Une trame est composée de:

- la longueur du reste de la trame sur 4 octets big-endian;
- un octet de type de message;
- un identifiant de corrélation de 16 octets;
- le corps, encodé selon le type (voir ``service/WIRE_FORMAT.md``).

Chaque requête reçoit exactement une réponse portant le même identifiant.
"""

import logging
import secrets
import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import BinaryIO, Optional

from models.errors import MalformedMessage

logger = logging.getLogger(__name__)

LENGTH_BYTES = 4
KIND_BYTES = 1
CORRELATION_BYTES = 16
HEADER_BYTES = KIND_BYTES + CORRELATION_BYTES
# Au-delà, la trame est refusée
MAX_FRAME_BYTES = 64 * 1024 * 1024

_LENGTH = struct.Struct(">I")


class MessageKind(IntEnum):
    """Types de messages (valeur de l'octet de type)."""

    TSA_REQUEST = 1
    TSA_RESPONSE = 2
    NA_INIT = 3
    NA_RENEW = 4
    NA_MIGRATE = 5
    NA_RESPONSE = 6
    INFO_QUERY = 7
    INFO_RESPONSE = 8
    STORE_PUT = 9
    STORE_GET = 10
    STORE_RESPONSE = 11
    ERROR = 12

    @property
    def is_request(self) -> bool:
        return self in REQUEST_KINDS

    @property
    def response_kind(self) -> "MessageKind":
        """Type de la réponse attendue pour une requête."""
        try:
            return RESPONSE_KINDS[self]
        except KeyError:
            raise MalformedMessage(f"{self.name} n'est pas une requête") from None

    @staticmethod
    def from_byte(value: int) -> "MessageKind":
        try:
            return MessageKind(value)
        except ValueError:
            raise MalformedMessage(f"Type de message inconnu: {value}") from None


RESPONSE_KINDS = {
    MessageKind.TSA_REQUEST: MessageKind.TSA_RESPONSE,
    MessageKind.NA_INIT: MessageKind.NA_RESPONSE,
    MessageKind.NA_RENEW: MessageKind.NA_RESPONSE,
    MessageKind.NA_MIGRATE: MessageKind.NA_RESPONSE,
    MessageKind.INFO_QUERY: MessageKind.INFO_RESPONSE,
    MessageKind.STORE_PUT: MessageKind.STORE_RESPONSE,
    MessageKind.STORE_GET: MessageKind.STORE_RESPONSE,
}
REQUEST_KINDS = frozenset(RESPONSE_KINDS)


def new_correlation_id() -> bytes:
    return secrets.token_bytes(CORRELATION_BYTES)


@dataclass(frozen=True)
class ServiceMessage:
    """
    Message échangé avec un service.

    Attributes:
        kind (MessageKind): Type du message
        correlation_id (bytes): Identifiant de corrélation (16 octets)
        body (bytes): Corps encodé
    """

    kind: MessageKind
    correlation_id: bytes = field(repr=False)
    body: bytes = field(default=b"", repr=False)

    def __post_init__(self):
        if len(self.correlation_id) != CORRELATION_BYTES:
            raise MalformedMessage(
                f"Identifiant de corrélation de {len(self.correlation_id)} octets "
                f"(attendu: {CORRELATION_BYTES})"
            )

    @staticmethod
    def request(kind: MessageKind, body: bytes) -> "ServiceMessage":
        """Nouvelle requête avec un identifiant de corrélation aléatoire."""
        if not kind.is_request:
            raise MalformedMessage(f"{kind.name} n'est pas une requête")
        return ServiceMessage(kind, new_correlation_id(), body)

    def reply(self, body: bytes) -> "ServiceMessage":
        """Réponse à cette requête."""
        return ServiceMessage(self.kind.response_kind, self.correlation_id, body)

    def error(self, body: bytes) -> "ServiceMessage":
        return ServiceMessage(MessageKind.ERROR, self.correlation_id, body)

    def encode(self) -> bytes:
        """Trame complète, préfixe de longueur compris."""
        size = HEADER_BYTES + len(self.body)
        return _LENGTH.pack(size) + bytes([int(self.kind)]) + self.correlation_id + self.body

    @staticmethod
    def decode(frame: bytes) -> "ServiceMessage":
        """
        Décode une trame complète.

        Raises:
            MalformedMessage: Trame tronquée, longueur incohérente ou type inconnu
        """
        if len(frame) < LENGTH_BYTES + HEADER_BYTES:
            raise MalformedMessage(f"Trame tronquée: {len(frame)} octets")
        (size,) = _LENGTH.unpack_from(frame)
        if size != len(frame) - LENGTH_BYTES:
            raise MalformedMessage(
                f"Longueur annoncée {size}, reçue {len(frame) - LENGTH_BYTES}")
        return ServiceMessage._from_payload(frame[LENGTH_BYTES:])

    @staticmethod
    def _from_payload(payload: bytes) -> "ServiceMessage":
        if len(payload) < HEADER_BYTES:
            raise MalformedMessage(f"En-tête tronqué: {len(payload)} octets")
        kind = MessageKind.from_byte(payload[0])
        return ServiceMessage(kind, payload[KIND_BYTES:HEADER_BYTES], payload[HEADER_BYTES:])

    def __str__(self) -> str:
        return f"{self.kind.name}[{self.correlation_id.hex()[:8]}] ({len(self.body)} octets)"


def _read_exactly(stream: BinaryIO, size: int) -> bytes:
    chunks = []
    remaining = size
    while remaining:
        chunk = stream.read(remaining)
        if not chunk:
            break
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_message(stream: BinaryIO) -> Optional[ServiceMessage]:
    """
    Lit une trame sur un flux.

    Returns:
        Optional[ServiceMessage]: Le message, ou None si le flux est fermé
        avant le début d'une trame

    Raises:
        MalformedMessage: Trame incomplète ou trop grande
    """
    prefix = _read_exactly(stream, LENGTH_BYTES)
    if not prefix:
        return None
    if len(prefix) < LENGTH_BYTES:
        raise MalformedMessage("Préfixe de longueur tronqué")
    (size,) = _LENGTH.unpack(prefix)
    if size > MAX_FRAME_BYTES:
        raise MalformedMessage(f"Trame trop grande: {size} octets")
    payload = _read_exactly(stream, size)
    if len(payload) != size:
        raise MalformedMessage(f"Trame tronquée: {len(payload)}/{size} octets")
    return ServiceMessage._from_payload(payload)


def write_message(stream: BinaryIO, message: ServiceMessage):
    stream.write(message.encode())
    stream.flush()
