"""
Clients des services.

Les fournisseurs distants implémentent la même interface ``Attester`` que
la TSA et la NA locales: les structures de preuve fonctionnent sans
modification avec ``--endpoint hôte:port``. Deux transports sont
disponibles: TCP et boucle locale (trames encodées puis décodées en
mémoire, sans socket).
"""

import logging
import socket
import threading
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

from core.attestation import Attester
from core.security_inventory import PrimitiveLike, as_primitive
from models.attestation import Attestation, AttestRequest, IssuerKind, VerificationData
from models.certificate import Certificate
from models.document import InputData
from models.encoding import text
from models.errors import MalformedMessage, ServiceError, error_class_for_code
from models.evidence import EvidenceRecord
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant

from . import codec
from .codec import InfoQuery
from .protocol import MessageKind, ServiceMessage, read_message, write_message
from .server import ServiceHost, parse_address

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0


class Transport(ABC):
    """Échange une requête contre une réponse."""

    @abstractmethod
    def exchange(self, message: ServiceMessage) -> ServiceMessage:
        """Envoie une requête et attend sa réponse."""

    def close(self):
        pass


class LoopbackTransport(Transport):
    """
    Transport en mémoire vers un ``ServiceHost``.

    Les messages passent par leur encodage en trame dans les deux sens.
    """

    def __init__(self, host: ServiceHost, endpoint: str):
        self.host = host
        self.endpoint = endpoint

    def exchange(self, message: ServiceMessage) -> ServiceMessage:
        request = ServiceMessage.decode(message.encode())
        response = self.host.dispatch(self.endpoint, request)
        return ServiceMessage.decode(response.encode())

    def __str__(self) -> str:
        return f"loopback:{self.endpoint}"


class SocketTransport(Transport):
    """
    Transport TCP vers un point d'accès ``hôte:port``.

    La connexion est ouverte à la première requête puis réutilisée.
    """

    def __init__(self, address: str, timeout: float = DEFAULT_TIMEOUT):
        self.address = address
        self.timeout = timeout
        self._target = parse_address(address)
        self._sock: Optional[socket.socket] = None
        self._stream = None
        self._lock = threading.Lock()

    def _connect(self):
        try:
            self._sock = socket.create_connection(self._target, timeout=self.timeout)
        except OSError as exc:
            raise ServiceError(f"Connexion impossible à {self.address}: {exc}") from exc
        self._stream = self._sock.makefile('rwb')
        logger.debug("Connecté à %s", self.address)

    def exchange(self, message: ServiceMessage) -> ServiceMessage:
        with self._lock:
            if self._sock is None:
                self._connect()
            try:
                write_message(self._stream, message)
                response = read_message(self._stream)
            except OSError as exc:
                self.close()
                raise ServiceError(f"Échange interrompu avec {self.address}: {exc}") from exc
            if response is None:
                self.close()
                raise ServiceError(f"Connexion fermée par {self.address}")
            return response

    def close(self):
        if self._stream is not None:
            self._stream.close()
            self._stream = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __str__(self) -> str:
        return self.address


class ServiceClient:
    """
    Client générique: requête, contrôle de la réponse et remontée des
    erreurs distantes.

    Attributes:
        transport (Transport): Transport utilisé
    """

    def __init__(self, transport: Transport):
        self.transport = transport

    def call(self, kind: MessageKind, body: bytes) -> bytes:
        """
        Envoie une requête et renvoie le corps de la réponse.

        Raises:
            MopsError: L'exception locale correspondant au code d'erreur
                distant, ``ServiceError`` pour un code inconnu
            MalformedMessage: Réponse d'un autre type ou d'un autre
                identifiant que la requête
        """
        request = ServiceMessage.request(kind, body)
        response = self.transport.exchange(request)
        if response.kind is MessageKind.ERROR:
            raise_remote_error(response)
        if response.correlation_id != request.correlation_id:
            raise MalformedMessage(f"Réponse {response} à une autre requête que {request}")
        if response.kind is not kind.response_kind:
            raise MalformedMessage(f"Réponse {response.kind.name} à une requête {kind.name}")
        return response.body

    def close(self):
        self.transport.close()


def raise_remote_error(response: ServiceMessage):
    """Lève l'exception locale correspondant à un message ``error``."""
    code, message = codec.decode_error(response.body)
    cls = error_class_for_code(code)
    logger.debug("Erreur distante %s: %s", code, message)
    if cls is None or cls is ServiceError:
        raise ServiceError(message, remote_code=code)
    raise cls(message)


# =============================================================================
# Fournisseurs distants
# =============================================================================

class _RemoteAttester(Attester, ServiceClient):

    def verification_data(self, attestation: Attestation, at: TimeInstant) -> VerificationData:
        body = codec.encode_info_query(InfoQuery.VERIFICATION_DATA, attestation.encode(), at.encode())
        return codec.decode_verification_data(self.call(MessageKind.INFO_QUERY, body))

    def __str__(self) -> str:
        return f"{self.kind.name}@{self.transport}"


class RemoteTsa(_RemoteAttester):
    """TSA distante."""

    kind = IssuerKind.TSA

    def attest(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        body = codec.encode_attest_request(request, clock)
        return codec.decode_attestation(self.call(MessageKind.TSA_REQUEST, body))


class RemoteNa(_RemoteAttester):
    """Autorité notariale distante."""

    kind = IssuerKind.NA

    def attest(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        renewal = request.na_extras is not None and request.na_extras.is_renewal
        kind = MessageKind.NA_RENEW if renewal else MessageKind.NA_INIT
        body = codec.encode_attest_request(request, clock)
        return codec.decode_attestation(self.call(kind, body))

    def migrate(self, source: EvidenceRecord, docs: Sequence[InputData], clock: TimeInstant,
                hash_fn: Optional[HashFunctionId] = None, batch: bool = False) -> List[EvidenceRecord]:
        """
        Fait migrer une preuve vers des NAW par l'autorité, qui vérifie
        elle-même la preuve d'origine.

        Raises:
            MigrationRefused: Si la preuve d'origine est invalide
            NotaryAbort: Si la NA refuse d'attester
        """
        body = codec.encode_migration(source, docs, clock, hash_fn, batch)
        return codec.decode_records(self.call(MessageKind.NA_MIGRATE, body))


class RemoteInformationService(ServiceClient):
    """Service d'information distant (inventaire et données de vérification)."""

    def secure_at(self, primitive: PrimitiveLike, at: TimeInstant) -> bool:
        return self._secure(primitive, at)[0]

    def secure_until(self, primitive: PrimitiveLike, at: Optional[TimeInstant] = None) -> TimeInstant:
        return self._secure(primitive, at or TimeInstant(0))[1]

    def _secure(self, primitive: PrimitiveLike, at: TimeInstant):
        name = as_primitive(primitive).name
        body = codec.encode_info_query(InfoQuery.SECURE_AT, text(name), at.encode())
        return codec.decode_secure_answer(self.call(MessageKind.INFO_QUERY, body))

    def validity_estimate(self, attestation: Attestation, issuer_cert: Certificate) -> TimeInstant:
        body = codec.encode_info_query(InfoQuery.VALIDITY_ESTIMATE, attestation.encode(),
                                       codec.encode_chain(issuer_cert.chain()))
        return TimeInstant.decode(self.call(MessageKind.INFO_QUERY, body))

    def verification_data(self, attestation: Attestation, at: TimeInstant) -> VerificationData:
        body = codec.encode_info_query(InfoQuery.VERIFICATION_DATA, attestation.encode(), at.encode())
        return codec.decode_verification_data(self.call(MessageKind.INFO_QUERY, body))


class RemoteStorage(ServiceClient):
    """Service de stockage distant."""

    def put(self, data: bytes) -> str:
        return codec.decode_handle(self.call(MessageKind.STORE_PUT, data))

    def get(self, handle: str) -> bytes:
        return self.call(MessageKind.STORE_GET, codec.encode_handle(handle))


def remote_attester(kind: IssuerKind, transport: Transport) -> Attester:
    """TSA ou NA distante selon la technique d'attestation."""
    if kind is IssuerKind.NA:
        return RemoteNa(transport)
    return RemoteTsa(transport)


def connect(address: str, kind: IssuerKind = IssuerKind.TSA) -> Attester:
    """Fournisseur distant sur ``hôte:port``."""
    return remote_attester(kind, SocketTransport(address))
