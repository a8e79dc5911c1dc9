"""
Encodage des corps de messages.

Les objets du domaine sont transmis sous leur encodage canonique (préfixes
de longueur de ``models.encoding``); ce module en fournit les inverses. Les
documents signés et les enregistrements de preuve voyagent sous leur forme
XML (``data_io.evidence_xml``), qui conserve les chaînes de certificats.
"""

import functools
from typing import List, Optional, Sequence, Tuple

from data_io.evidence_xml import parse_record, parse_signature, serialize_record, serialize_signature
from models.attestation import Attestation, AttestRequest, IssuerKind, NaExtras, VerificationData
from models.auth_path import AuthPath
from models.certificate import Certificate, CertificateRef, Crl
from models.document import InputData
from models.encoding import concat, concat_all, read_uint, split, text
from models.errors import MalformedMessage, MopsError
from models.evidence import EvidenceRecord
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import TimeInstant


def _fields(data: bytes, count: int, what: str) -> List[bytes]:
    try:
        parts = split(data)
    except ValueError as exc:
        raise MalformedMessage(f"{what}: {exc}") from exc
    if len(parts) != count:
        raise MalformedMessage(f"{what}: {len(parts)} champ(s), {count} attendu(s)")
    return parts


def _items(data: bytes, what: str) -> List[bytes]:
    try:
        return split(data)
    except ValueError as exc:
        raise MalformedMessage(f"{what}: {exc}") from exc


def _optional(data: Optional[bytes]) -> bytes:
    return b"" if data is None else data


def _hash(data: bytes) -> HashFunctionId:
    return HashFunctionId.parse(data.decode("ascii"))


def _ref(data: bytes) -> CertificateRef:
    subject, serial = _fields(data, 2, "Référence de certificat")
    return CertificateRef(subject.decode("utf-8"), read_uint(serial))


def _decoding(what: str):
    """Convertit les erreurs de décodage en ``MalformedMessage``."""
    def wrap(func):
        @functools.wraps(func)
        def decode(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except MopsError:
                raise
            except (ValueError, IndexError, KeyError, UnicodeDecodeError) as exc:
                raise MalformedMessage(f"{what} illisible: {exc}") from exc
        return decode
    return wrap


# =============================================================================
# Certificats et données de vérification
# =============================================================================

def encode_chain(chain: Sequence[Certificate]) -> bytes:
    return concat_all(cert.encode() for cert in chain)


def _decode_certificate(data: bytes, issuer: Optional[Certificate]) -> Certificate:
    tbs, signature = _fields(data, 2, "Certificat")
    subject, issuer_ref, public_key, params, not_before, not_after, serial = _fields(tbs, 7, "Certificat")
    cert_ref = CertificateRef(subject.decode("utf-8"), read_uint(serial))
    issuer_ref = _ref(issuer_ref)
    if issuer_ref == cert_ref:
        issuer = None
    elif issuer is None or issuer.ref != issuer_ref:
        raise MalformedMessage(f"Émetteur {issuer_ref} absent de la chaîne de {cert_ref}")
    return Certificate(
        subject=cert_ref.subject,
        issuer_cert=issuer,
        public_key=public_key,
        params=SignatureParams.parse(params.decode("ascii")),
        not_before=TimeInstant.decode(not_before),
        not_after=TimeInstant.decode(not_after),
        serial=cert_ref.serial,
        issuer_signature=signature,
    )


@_decoding("Chaîne de certificats")
def decode_chain(data: bytes) -> Tuple[Certificate, ...]:
    """
    Décode une chaîne feuille → racine; les liens vers les émetteurs sont
    reconstruits depuis la racine.
    """
    issuer = None
    chain = []
    for encoded in reversed(_items(data, "Chaîne de certificats")):
        issuer = _decode_certificate(encoded, issuer)
        chain.append(issuer)
    return tuple(reversed(chain))


@_decoding("Liste de révocation")
def decode_crl(data: bytes) -> Crl:
    tbs, signature = _fields(data, 2, "Liste de révocation")
    issuer, issued_at, serials = _fields(tbs, 3, "Liste de révocation")
    return Crl(
        issuer=_ref(issuer),
        issued_at=TimeInstant.decode(issued_at),
        revoked_serials=frozenset(read_uint(s) for s in _items(serials, "Numéros révoqués")),
        signature=signature,
    )


@_decoding("Données de vérification")
def decode_verification_data(data: bytes) -> VerificationData:
    chain, crls, collected_at = _fields(data, 3, "Données de vérification")
    return VerificationData(
        issuer_chain=decode_chain(chain),
        crls=tuple(decode_crl(crl) for crl in _items(crls, "Listes de révocation")),
        collected_at=TimeInstant.decode(collected_at),
    )


# =============================================================================
# Attestations et requêtes
# =============================================================================

@_decoding("Attestation")
def decode_attestation(data: bytes) -> Attestation:
    if not data:
        raise MalformedMessage("Attestation vide")
    hash_fn, digest, stated_time, serial, subject, signature = _fields(data[1:], 6, "Attestation")
    return Attestation(
        issuer_kind=IssuerKind(data[0]),
        attested_digest=digest,
        hash_fn=_hash(hash_fn),
        stated_time=TimeInstant.decode(stated_time),
        issuer_cert=CertificateRef(subject.decode("utf-8"), read_uint(serial)),
        signature=signature,
    )


def _encode_path(path: Optional[AuthPath]) -> bytes:
    if path is None:
        return b""
    return concat(path.hash_fn.encode(), path.encode())


def _decode_path(data: bytes) -> Optional[AuthPath]:
    if not data:
        return None
    hash_fn, encoded = _fields(data, 2, "Chemin d'authentification")
    return AuthPath.decode(encoded, _hash(hash_fn))


def encode_na_extras(extras: Optional[NaExtras]) -> bytes:
    if extras is None:
        return b""
    return concat(
        encode_chain(extras.certificate.chain()),
        concat_all(concat(h.encode(), digest) for h, digest in extras.history),
        _optional(extras.original_time.encode() if extras.original_time is not None else None),
        _optional(extras.prior_attestation.encode() if extras.prior_attestation is not None else None),
        _optional(extras.prior_verification_data.encode()
                  if extras.prior_verification_data is not None else None),
        _encode_path(extras.prior_path),
    )


@_decoding("Données notariales")
def decode_na_extras(data: bytes) -> Optional[NaExtras]:
    if not data:
        return None
    chain, history, t0, prior, prior_vd, prior_path = _fields(data, 6, "Données notariales")
    pairs = []
    for pair in _items(history, "Historique"):
        hash_fn, digest = _fields(pair, 2, "Historique")
        pairs.append((_hash(hash_fn), digest))
    return NaExtras(
        certificate=decode_chain(chain)[0],
        history=tuple(pairs),
        original_time=TimeInstant.decode(t0) if t0 else None,
        prior_attestation=decode_attestation(prior) if prior else None,
        prior_verification_data=decode_verification_data(prior_vd) if prior_vd else None,
        prior_path=_decode_path(prior_path),
    )


def encode_attest_request(request: AttestRequest, clock: TimeInstant) -> bytes:
    """Requête d'attestation et heure courante du client."""
    return concat(
        request.payload_digest,
        request.hash_fn.encode(),
        request.requested_time.encode(),
        encode_na_extras(request.na_extras),
        clock.encode(),
    )


@_decoding("Requête d'attestation")
def decode_attest_request(data: bytes) -> Tuple[AttestRequest, TimeInstant]:
    digest, hash_fn, requested_time, extras, clock = _fields(data, 5, "Requête d'attestation")
    request = AttestRequest(digest, _hash(hash_fn), TimeInstant.decode(requested_time),
                            decode_na_extras(extras))
    return request, TimeInstant.decode(clock)


# =============================================================================
# Documents et enregistrements
# =============================================================================

def encode_document(doc: InputData) -> bytes:
    return concat(text(doc.name), doc.document, serialize_signature(doc.signature))


@_decoding("Document")
def decode_document(data: bytes) -> InputData:
    name, document, signature = _fields(data, 3, "Document")
    return InputData(name.decode("utf-8"), document, parse_signature(signature))


def encode_migration(source: EvidenceRecord, docs: Sequence[InputData], clock: TimeInstant,
                     hash_fn: Optional[HashFunctionId], batch: bool) -> bytes:
    return concat(
        serialize_record(source),
        concat_all(encode_document(doc) for doc in docs),
        clock.encode(),
        _optional(hash_fn.encode() if hash_fn is not None else None),
        bytes([1 if batch else 0]),
    )


@_decoding("Requête de migration")
def decode_migration(data: bytes):
    """
    Returns:
        tuple: (source, documents, heure, fonction de hachage ou None, lot)
    """
    record, docs, clock, hash_fn, batch = _fields(data, 5, "Requête de migration")
    return (
        parse_record(record),
        [decode_document(doc) for doc in _items(docs, "Documents")],
        TimeInstant.decode(clock),
        _hash(hash_fn) if hash_fn else None,
        batch == b"\x01",
    )


def encode_records(records: Sequence[EvidenceRecord]) -> bytes:
    return concat_all(serialize_record(record) for record in records)


@_decoding("Enregistrements")
def decode_records(data: bytes) -> List[EvidenceRecord]:
    return [parse_record(record) for record in _items(data, "Enregistrements")]


# =============================================================================
# Service d'information
# =============================================================================

class InfoQuery:
    """Sous-requêtes du service d'information."""

    SECURE_AT = "SECURE_AT"
    VALIDITY_ESTIMATE = "VALIDITY_ESTIMATE"
    VERIFICATION_DATA = "VERIFICATION_DATA"

    ALL = (SECURE_AT, VALIDITY_ESTIMATE, VERIFICATION_DATA)


def encode_info_query(query: str, *args: bytes) -> bytes:
    return concat(text(query), *args)


@_decoding("Requête d'information")
def decode_info_query(data: bytes) -> Tuple[str, List[bytes]]:
    parts = _items(data, "Requête d'information")
    if not parts:
        raise MalformedMessage("Requête d'information vide")
    return parts[0].decode("ascii"), parts[1:]


def encode_secure_answer(secure: bool, secure_until: TimeInstant) -> bytes:
    return concat(bytes([1 if secure else 0]), secure_until.encode())


@_decoding("Réponse d'information")
def decode_secure_answer(data: bytes) -> Tuple[bool, TimeInstant]:
    secure, until = _fields(data, 2, "Réponse d'information")
    return secure == b"\x01", TimeInstant.decode(until)


# =============================================================================
# Stockage et erreurs
# =============================================================================

def encode_handle(handle: str) -> bytes:
    return text(handle)


def decode_handle(data: bytes) -> str:
    try:
        return data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedMessage(f"Identifiant d'objet illisible: {exc}") from exc


def encode_error(code: str, message: str) -> bytes:
    return concat(text(code), text(message))


@_decoding("Erreur")
def decode_error(data: bytes) -> Tuple[str, str]:
    code, message = _fields(data, 2, "Erreur")
    return code.decode("utf-8"), message.decode("utf-8")
