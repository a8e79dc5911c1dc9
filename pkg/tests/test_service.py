import io
import socket
import struct

import pytest

from conftest import SEED, START, corrupt_last_signature, days
from core.crypto_core import FixturePki
from core.notarial_wrapper import naw_init, naw_renew
from core.renewal import protect, renew
from core.security_inventory import default_lenstra_inventory
from core.verification import verify_proof
from data_io.document_generator import DocumentGenerator
from models.errors import (
    IncompatibleAttester, MalformedMessage, PriorAttestationInvalid, UnknownEndpoint, UnknownHandle,
)
from models.evidence import EvidenceRecord, StructureKind
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant
from service import codec
from service.client import (
    LoopbackTransport, RemoteInformationService, RemoteNa, RemoteStorage, RemoteTsa, SocketTransport,
    Transport, connect,
)
from service.protocol import MAX_FRAME_BYTES, MessageKind, ServiceMessage, new_correlation_id, read_message
from service.server import ServiceHost, ServiceServer, parse_address
from service.storage import LocalFolderStorage

SHA256 = HashFunctionId.SHA256
T1 = START.plus_seconds(days(200))


@pytest.fixture
def host(pki, inventory, tmp_path):
    return ServiceHost(pki, inventory, storage_dir=str(tmp_path / "objets"))


@pytest.fixture
def remote_tsa(host):
    return RemoteTsa(LoopbackTransport(host, "tsa"))


@pytest.fixture
def remote_na(host):
    return RemoteNa(LoopbackTransport(host, "na"))


@pytest.mark.parametrize("kind", [StructureKind.AS, StructureKind.MTS, StructureKind.MDS, StructureKind.SLS])
def test_remote_tsa_is_transparent(kind, docs, remote_tsa, inventory):
    state = protect(kind, docs[:3], START, SHA256, remote_tsa)
    state = renew(state, docs[:3], T1, remote_tsa, inventory, hash_fn=HashFunctionId.SHA384)
    assert verify_proof(state, docs[:3]).valid


def test_remote_notary_is_transparent(doc, remote_na, inventory):
    state = naw_init(doc, START, SHA256, remote_na)
    state = naw_renew(state, doc, T1, SHA256, remote_na, inventory)
    assert state.entries[0].attestation.stated_time == START
    assert verify_proof(state, [doc]).valid


def test_remote_notary_rejects_invalid_prior(doc, remote_na, inventory):
    state = naw_init(doc, START, SHA256, remote_na)
    with pytest.raises(PriorAttestationInvalid):
        naw_renew(corrupt_last_signature(state), doc, T1, SHA256, remote_na, inventory)


def test_remote_tsa_cannot_serve_naw(doc, remote_tsa):
    with pytest.raises(IncompatibleAttester):
        naw_init(doc, START, SHA256, remote_tsa)


def test_remote_migration(docs, tsa, remote_na):
    source = EvidenceRecord("dossier", protect(StructureKind.MDS, docs[:2], START, SHA256, tsa), START)
    records = remote_na.migrate(source, docs[:2], T1)
    assert [r.name for r in records] == ["dossier-000", "dossier-001"]
    for record in records:
        assert record.kind is StructureKind.NAW
        assert verify_proof(record, docs[:2]).valid


def test_information_service(host):
    info = RemoteInformationService(LoopbackTransport(host, "info"))
    assert not info.secure_at(SHA256, TimeInstant.from_date(2040))
    assert info.secure_at(SHA256, TimeInstant.from_date(2030))
    assert info.secure_until(HashFunctionId.SHA384) == TimeInstant.from_date(2084)


def test_remote_storage(host):
    storage = RemoteStorage(LoopbackTransport(host, "storage"))
    first = storage.put(b"preuve")
    second = storage.put(b"preuve")
    assert first != second
    assert storage.get(first) == b"preuve"
    with pytest.raises(UnknownHandle):
        storage.get("0" * len(first))


def test_local_storage(tmp_path):
    storage = LocalFolderStorage(str(tmp_path / "objets"))
    handle = storage.put(b"x")
    assert storage.exists(handle)
    assert storage.handles() == [handle]
    with pytest.raises(UnknownHandle):
        storage.get("../etc/passwd")
    assert not storage.exists("../etc/passwd")


def test_response_keeps_correlation_id(host):
    request = ServiceMessage.request(MessageKind.STORE_PUT, b"abc")
    response = host.dispatch("storage", request)
    assert response.kind is MessageKind.STORE_RESPONSE
    assert response.correlation_id == request.correlation_id


def test_wrong_endpoint(host):
    request = ServiceMessage.request(MessageKind.TSA_REQUEST, b"")
    assert host.dispatch("storage", request).kind is MessageKind.ERROR
    with pytest.raises(UnknownEndpoint):
        host.dispatch("cache", request)
    # corps illisible: erreur, pas d'exception
    assert host.dispatch("tsa", request).kind is MessageKind.ERROR


def test_malformed_frames():
    frame = ServiceMessage.request(MessageKind.INFO_QUERY, b"corps").encode()
    assert ServiceMessage.decode(frame).body == b"corps"
    with pytest.raises(MalformedMessage):
        ServiceMessage.decode(frame[:10])
    with pytest.raises(MalformedMessage):
        ServiceMessage.decode(frame + b"x")
    with pytest.raises(MalformedMessage):
        ServiceMessage.decode(frame[:4] + bytes([99]) + frame[5:])
    with pytest.raises(MalformedMessage):
        read_message(io.BytesIO(frame[:-1]))
    with pytest.raises(MalformedMessage):
        ServiceMessage.request(MessageKind.TSA_RESPONSE, b"")
    assert read_message(io.BytesIO(b"")) is None


def test_parse_address():
    assert parse_address("localhost:9000") == ("localhost", 9000)
    for bad in ("localhost", ":9000", "hote:port"):
        with pytest.raises(ValueError):
            parse_address(bad)


def test_socket_round_trip(host, doc):
    server = ServiceServer("127.0.0.1:0", host, "tsa")
    server.start()
    try:
        tsa = connect(server.address)
        state = protect(StructureKind.AS, [doc], START, SHA256, tsa)
        state = renew(state, doc, T1, tsa)
        tsa.close()
        assert verify_proof(state, [doc]).valid
    finally:
        server.shutdown()
        server.server_close()


class _DirectTransport(Transport):
    """Appel local de ``ServiceHost.dispatch``, échanges conservés."""

    def __init__(self, host, endpoint, exchanges):
        self.host = host
        self.endpoint = endpoint
        self.exchanges = exchanges

    def exchange(self, message):
        response = self.host.dispatch(self.endpoint, message)
        self.exchanges.append((self.endpoint, message, response))
        return response


def _world(storage_dir):
    """Hôte et documents d'une PKI neuve; deux appels donnent deux mondes identiques."""
    pki = FixturePki(SEED, START)
    inventory = default_lenstra_inventory()
    docs = DocumentGenerator(pki, SEED, inventory, min_size=64, max_size=256).generate(3, START)
    return ServiceHost(pki, inventory, storage_dir=storage_dir), docs, inventory


def _local_exchanges(host, docs, inventory):
    exchanges = []
    tsa = RemoteTsa(_DirectTransport(host, "tsa", exchanges))
    na = RemoteNa(_DirectTransport(host, "na", exchanges))
    info = RemoteInformationService(_DirectTransport(host, "info", exchanges))
    storage = RemoteStorage(_DirectTransport(host, "storage", exchanges))

    state = protect(StructureKind.AS, docs[:1], START, SHA256, tsa)
    renew(state, docs[:1], T1, tsa)
    state = naw_init(docs[0], START, SHA256, na)
    naw_renew(state, docs[0], T1, SHA256, na, inventory)
    source = EvidenceRecord("dossier", protect(StructureKind.MDS, docs[:2], START, SHA256, tsa), START)
    na.migrate(source, docs[:2], T1)
    info.secure_at(SHA256, TimeInstant.from_date(2030))
    handle = storage.put(b"preuve")
    storage.get(handle)
    with pytest.raises(UnknownHandle):
        storage.get("0" * len(handle))
    # types de réponse envoyés comme requêtes
    for kind in MessageKind:
        if not kind.is_request:
            message = ServiceMessage(kind, new_correlation_id(), b"corps")
            exchanges.append(("tsa", message, host.dispatch("tsa", message)))
    return exchanges


@pytest.fixture(scope="module")
def exchanges(tmp_path_factory):
    """Chaque échange joué localement puis rejoué par socket sur un hôte identique."""
    storage_dir = str(tmp_path_factory.mktemp("objets"))
    local = _local_exchanges(*_world(storage_dir))
    remote_host, _, _ = _world(storage_dir)
    servers = {endpoint: ServiceServer("127.0.0.1:0", remote_host, endpoint)
               for endpoint in ("tsa", "na", "info", "storage")}
    for server in servers.values():
        server.start()
    transports = {endpoint: SocketTransport(server.address) for endpoint, server in servers.items()}
    try:
        replayed = [(endpoint, request, response, transports[endpoint].exchange(request))
                    for endpoint, request, response in local]
        yield replayed, servers["tsa"].address, remote_host
    finally:
        for transport in transports.values():
            transport.close()
        for server in servers.values():
            server.shutdown()
            server.server_close()


@pytest.mark.parametrize("kind", list(MessageKind), ids=lambda kind: kind.name)
def test_local_and_remote_calls_agree(kind, exchanges):
    replayed, _, remote_host = exchanges
    selected = [exchange for exchange in replayed if exchange[1].kind is kind]
    assert selected
    for _, request, local, remote in selected:
        assert remote.correlation_id == request.correlation_id
        assert remote.kind is local.kind
        if kind is MessageKind.STORE_PUT:
            # identifiants aléatoires, même objet
            assert remote_host.storage.get(codec.decode_handle(remote.body)) == request.body
        else:
            assert remote == local
    if kind.is_request:
        assert any(local.kind is kind.response_kind for _, _, local, _ in selected)
    else:
        for _, _, local, _ in selected:
            assert local.kind is MessageKind.ERROR
            assert codec.decode_error(local.body)[0] == MalformedMessage.code


def _raw_exchange(address, data):
    with socket.create_connection(parse_address(address), timeout=10) as sock:
        sock.sendall(data)
        sock.shutdown(socket.SHUT_WR)
        with sock.makefile("rb") as stream:
            return read_message(stream)


@pytest.mark.parametrize("frame", [
    ServiceMessage.request(MessageKind.INFO_QUERY, b"corps").encode()[:-2],
    struct.pack(">I", MAX_FRAME_BYTES + 1),
    b"\x00\x00",
], ids=["tronquee", "trop-grande", "prefixe-tronque"])
def test_bad_frame_gets_error_code(frame, exchanges):
    _, address, _ = exchanges
    response = _raw_exchange(address, frame)
    assert response.kind is MessageKind.ERROR
    assert codec.decode_error(response.body)[0] == MalformedMessage.code
