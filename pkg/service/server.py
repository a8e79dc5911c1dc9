"""
Hôte des services: TSA, autorité notariale, service d'information et
stockage derrière des points d'accès nommés.

``ServiceHost.dispatch`` traite un message en mémoire; ``ServiceServer``
expose un point d'accès sur une socket TCP (une connexion peut enchaîner
plusieurs requêtes). Toute ``MopsError`` levée par un fournisseur devient
un message ``error`` portant le code stable de l'exception.
"""

import logging
import socketserver
import threading
from typing import Callable, Dict, Optional, Tuple

from core.attestation import NotarialAuthority, TimestampAuthority, collect_verification_data
from core.crypto_core import FixturePki
from core.migration import na_attest_migrate
from core.security_inventory import SecurityInventory, default_lenstra_inventory, validity_estimate
from models.errors import MalformedMessage, MopsError, UnknownEndpoint
from models.time_instant import TimeInstant

from . import codec
from .codec import InfoQuery
from .protocol import CORRELATION_BYTES, MessageKind, ServiceMessage, read_message, write_message
from .storage import LocalFolderStorage

logger = logging.getLogger(__name__)

TSA_ENDPOINT = "tsa"
NA_ENDPOINT = "na"
INFO_ENDPOINT = "info"
STORAGE_ENDPOINT = "storage"
ENDPOINTS = (TSA_ENDPOINT, NA_ENDPOINT, INFO_ENDPOINT, STORAGE_ENDPOINT)

# Types de requêtes acceptés par point d'accès
ACCEPTED_KINDS = {
    TSA_ENDPOINT: {MessageKind.TSA_REQUEST, MessageKind.INFO_QUERY},
    NA_ENDPOINT: {MessageKind.NA_INIT, MessageKind.NA_RENEW, MessageKind.NA_MIGRATE, MessageKind.INFO_QUERY},
    INFO_ENDPOINT: {MessageKind.INFO_QUERY},
    STORAGE_ENDPOINT: {MessageKind.STORE_PUT, MessageKind.STORE_GET},
}


def parse_address(address: str) -> Tuple[str, int]:
    """
    Analyse une adresse ``hôte:port``.

    Raises:
        ValueError: Si l'adresse est mal formée
    """
    host, sep, port = address.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise ValueError(f"Adresse de service invalide: {address!r} (attendu: hôte:port)")
    return host, int(port)


class ServiceHost:
    """
    Fournisseurs exposés par les points d'accès.

    Chaque point d'accès traite ses requêtes une par une (verrou dédié);
    des points d'accès différents travaillent en parallèle.

    Attributes:
        pki (FixturePki): PKI des fournisseurs
        inventory (SecurityInventory): Inventaire du service d'information
        tsa (TimestampAuthority): Autorité d'horodatage
        na (NotarialAuthority): Autorité notariale
        storage (LocalFolderStorage): Stockage
    """

    def __init__(self, pki: Optional[FixturePki] = None, inventory: Optional[SecurityInventory] = None,
                 storage_dir: str = "storage", seed: int = 1, start: Optional[TimeInstant] = None):
        self.pki = pki or FixturePki(seed, start)
        self.inventory = inventory or default_lenstra_inventory()
        self.tsa = TimestampAuthority(self.pki)
        self.na = NotarialAuthority(self.pki, self.inventory)
        self.storage = LocalFolderStorage(storage_dir)
        self._locks = {endpoint: threading.Lock() for endpoint in ENDPOINTS}
        self._handlers: Dict[MessageKind, Callable[[str, ServiceMessage], bytes]] = {
            MessageKind.TSA_REQUEST: self._tsa_request,
            MessageKind.NA_INIT: self._na_init,
            MessageKind.NA_RENEW: self._na_renew,
            MessageKind.NA_MIGRATE: self._na_migrate,
            MessageKind.INFO_QUERY: self._info_query,
            MessageKind.STORE_PUT: self._store_put,
            MessageKind.STORE_GET: self._store_get,
        }

    def dispatch(self, endpoint: str, message: ServiceMessage) -> ServiceMessage:
        """
        Traite une requête et renvoie exactement une réponse de même
        identifiant de corrélation.

        Args:
            endpoint (str): ``tsa``, ``na``, ``info`` ou ``storage``
            message (ServiceMessage): Requête

        Returns:
            ServiceMessage: Réponse ou message ``error``

        Raises:
            UnknownEndpoint: Si le point d'accès n'existe pas
        """
        if endpoint not in ACCEPTED_KINDS:
            raise UnknownEndpoint(f"Point d'accès inconnu: {endpoint!r}")
        logger.debug("%s: %s", endpoint, message)
        try:
            if message.kind not in ACCEPTED_KINDS[endpoint]:
                raise MalformedMessage(f"{message.kind.name} non accepté par le point d'accès {endpoint}")
            with self._locks[endpoint]:
                body = self._handlers[message.kind](endpoint, message)
            return message.reply(body)
        except MopsError as exc:
            logger.info("%s: %s refusé (%s): %s", endpoint, message.kind.name, exc.code, exc)
            return message.error(codec.encode_error(exc.code, str(exc)))

    # --- attestations ---------------------------------------------------

    def _tsa_request(self, endpoint: str, message: ServiceMessage) -> bytes:
        request, clock = codec.decode_attest_request(message.body)
        return self.tsa.attest(request, clock).encode()

    def _na_init(self, endpoint: str, message: ServiceMessage) -> bytes:
        request, clock = codec.decode_attest_request(message.body)
        if request.na_extras is not None and request.na_extras.is_renewal:
            raise MalformedMessage("Requête de renouvellement envoyée comme initialisation")
        return self.na.attest(request, clock).encode()

    def _na_renew(self, endpoint: str, message: ServiceMessage) -> bytes:
        request, clock = codec.decode_attest_request(message.body)
        if request.na_extras is None or not request.na_extras.is_renewal:
            raise MalformedMessage("Requête de renouvellement sans attestation précédente")
        return self.na.attest_renew(request, clock).encode()

    def _na_migrate(self, endpoint: str, message: ServiceMessage) -> bytes:
        source, docs, clock, hash_fn, batch = codec.decode_migration(message.body)
        records = na_attest_migrate(self.na, source, docs, clock, hash_fn, batch, self.inventory)
        return codec.encode_records(records)

    # --- information ----------------------------------------------------

    def _info_query(self, endpoint: str, message: ServiceMessage) -> bytes:
        query, args = codec.decode_info_query(message.body)
        if query == InfoQuery.SECURE_AT and len(args) == 2:
            primitive, at = args[0].decode("utf-8"), TimeInstant.decode(args[1])
            return codec.encode_secure_answer(self.inventory.secure_at(primitive, at),
                                              self.inventory.secure_until(primitive))
        if query == InfoQuery.VALIDITY_ESTIMATE and len(args) == 2:
            attestation = codec.decode_attestation(args[0])
            issuer = codec.decode_chain(args[1])[0]
            return validity_estimate(self.inventory, attestation, issuer).encode()
        if query == InfoQuery.VERIFICATION_DATA and len(args) == 2:
            attestation = codec.decode_attestation(args[0])
            return collect_verification_data(self.pki, attestation, TimeInstant.decode(args[1])).encode()
        raise MalformedMessage(f"Requête d'information inconnue: {query} ({len(args)} argument(s))")

    # --- stockage -------------------------------------------------------

    def _store_put(self, endpoint: str, message: ServiceMessage) -> bytes:
        return codec.encode_handle(self.storage.put(message.body))

    def _store_get(self, endpoint: str, message: ServiceMessage) -> bytes:
        return self.storage.get(codec.decode_handle(message.body))


def dispatch(host: ServiceHost, endpoint: str, message: ServiceMessage) -> ServiceMessage:
    return host.dispatch(endpoint, message)


# =============================================================================
# Transport TCP
# =============================================================================

class _FrameHandler(socketserver.StreamRequestHandler):
    """Lit des trames jusqu'à la fermeture de la connexion."""

    def handle(self):
        server: ServiceServer = self.server
        while True:
            try:
                message = read_message(self.rfile)
            except MalformedMessage as exc:
                logger.warning("%s: trame invalide de %s: %s", server.endpoint, self.client_address, exc)
                reply = ServiceMessage(MessageKind.ERROR, bytes(CORRELATION_BYTES),
                                       codec.encode_error(exc.code, str(exc)))
                write_message(self.wfile, reply)
                return
            if message is None:
                return
            write_message(self.wfile, server.host.dispatch(server.endpoint, message))


class ServiceServer(socketserver.ThreadingTCPServer):
    """
    Serveur TCP d'un point d'accès.

    Attributes:
        host (ServiceHost): Fournisseurs
        endpoint (str): Point d'accès servi
    """

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: str, host: ServiceHost, endpoint: str):
        if endpoint not in ACCEPTED_KINDS:
            raise UnknownEndpoint(f"Point d'accès inconnu: {endpoint!r}")
        self.host = host
        self.endpoint = endpoint
        super().__init__(parse_address(address), _FrameHandler)

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> threading.Thread:
        """Sert en arrière-plan; ``shutdown`` arrête le serveur."""
        thread = threading.Thread(target=self.serve_forever, name=f"mops-{self.endpoint}", daemon=True)
        thread.start()
        logger.info("Service %s à l'écoute sur %s", self.endpoint, self.address)
        return thread


def serve(address: str, host: ServiceHost, endpoint: str):
    """Sert un point d'accès jusqu'à interruption."""
    with ServiceServer(address, host, endpoint) as server:
        logger.info("Service %s à l'écoute sur %s", endpoint, server.address)
        server.serve_forever()
