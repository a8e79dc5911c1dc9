"""
Noyau cryptographique: hachage, clés, signatures et PKI simulée.

Le schéma ``SIM-RSA`` conserve la sémantique utile aux preuves (longueur de
clé appariée à la fonction de hachage, clés déterministes pour une graine
donnée) mais s'appuie sur Ed25519: la robustesse simulée d'une clé provient
de l'inventaire de sécurité, pas de sa taille réelle. La longueur nominale
intervient dans la dérivation HKDF de la clé, de sorte que deux longueurs
différentes ne produisent jamais la même clé.

La PKI comporte trois niveaux: une racine, une autorité intermédiaire et
les certificats feuilles des signataires et des fournisseurs d'attestation.
"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from models.certificate import Certificate, CertificateRef, Crl
from models.document import DocumentSignature, method_id_for
from models.encoding import concat, text, uint
from models.errors import CertificateExpired, MissingCrl, UnknownIssuer, UnknownSerial
from models.primitives import HashFunctionId, KeyPair, SignatureParams
from models.time_instant import YEAR, TimeInstant

logger = logging.getLogger(__name__)

# Durées de vie des certificats
LEAF_LIFETIME = 2 * YEAR
ROOT_LIFETIME = 150 * YEAR
INTERMEDIATE_LIFETIME = 140 * YEAR

# Les autorités de certification signent avec la clé la plus longue
CA_PARAMS = SignatureParams(8192)

ROOT_SUBJECT = "MoPS Root CA"
INTERMEDIATE_SUBJECT = "MoPS Intermediate CA"


# =============================================================================
# Hachage, clés, signatures
# =============================================================================

def hash_bytes(hash_fn: HashFunctionId, data: bytes) -> bytes:
    """
    Calcule l'empreinte de ``data``.

    Args:
        hash_fn (HashFunctionId): Fonction de hachage
        data (bytes): Données

    Returns:
        bytes: Empreinte de 32, 48 ou 64 octets
    """
    return hashlib.new(hash_fn.hashlib_name, data).digest()


def keygen(params: SignatureParams, rng_seed: int) -> KeyPair:
    """
    Génère une paire de clés déterministe.

    Args:
        params (SignatureParams): Longueur de clé nominale (validée à la
            construction des paramètres)
        rng_seed (int): Graine

    Returns:
        KeyPair: Paire de clés
    """
    hkdf = HKDF(
        algorithm=hashes.SHA256(),
        length=32,
        salt=None,
        info=text(f"{params.scheme}/{params.key_bits}"),
    )
    seed = hkdf.derive(rng_seed.to_bytes(16, "big", signed=True))
    private_key = Ed25519PrivateKey.from_private_bytes(seed)
    public_key = private_key.public_key().public_bytes(
        encoding=serialization.Encoding.Raw,
        format=serialization.PublicFormat.Raw,
    )
    key_id = hashlib.sha256(public_key).hexdigest()[:16]
    return KeyPair(params=params, public_key=public_key, private_key=seed, key_id=key_id)


def _signing_input(hash_fn: HashFunctionId, message: bytes) -> bytes:
    return concat(hash_fn.encode(), hash_bytes(hash_fn, message))


def sign(key_pair: KeyPair, hash_fn: HashFunctionId, message: bytes) -> bytes:
    """
    Signe ``H(message)`` (paradigme hacher-puis-signer).

    Raises:
        PairingViolation: Si la clé n'est pas appariée à ``hash_fn``
    """
    key_pair.params.check_pairing(hash_fn)
    private_key = Ed25519PrivateKey.from_private_bytes(key_pair.private_key)
    return private_key.sign(_signing_input(hash_fn, message))


def verify(public_key: bytes, hash_fn: HashFunctionId, message: bytes, signature: bytes) -> bool:
    """Vérifie une signature produite par :func:`sign`."""
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(
            signature, _signing_input(hash_fn, message))
        return True
    except (InvalidSignature, ValueError):
        return False


# =============================================================================
# Autorité de certification
# =============================================================================

class CertificateAuthority:
    """
    Autorité de certification simulée.

    Attributes:
        key_pair (KeyPair): Clés de l'autorité
        certificate (Certificate): Certificat de l'autorité
        issued (Dict[int, Certificate]): Certificats émis par numéro de série
        revocations (Dict[int, TimeInstant]): Dates de révocation
        crls (List[Crl]): Historique des listes publiées (ordre croissant)
    """

    def __init__(self, key_pair: KeyPair, certificate: Certificate):
        self.key_pair = key_pair
        self.certificate = certificate
        self.issued: Dict[int, Certificate] = {}
        self.revocations: Dict[int, TimeInstant] = {}
        self.crls: List[Crl] = []
        self._next_serial = 1

    @classmethod
    def self_signed(cls, subject: str, key_pair: KeyPair, not_before: TimeInstant,
                    lifetime: int) -> "CertificateAuthority":
        """Crée une autorité racine auto-signée."""
        unsigned = Certificate(
            subject=subject,
            issuer_cert=None,
            public_key=key_pair.public_key,
            params=key_pair.params,
            not_before=not_before,
            not_after=not_before.plus_seconds(lifetime),
            serial=0,
        )
        signature = sign(key_pair, key_pair.params.paired_hash, unsigned.tbs_bytes())
        certificate = replace(unsigned, issuer_signature=signature)
        authority = cls(key_pair, certificate)
        authority.issued[0] = certificate
        logger.info("Racine auto-signée créée: %s", certificate)
        return authority

    @property
    def ref(self) -> CertificateRef:
        return self.certificate.ref

    def issue_certificate(self, subject: str, subject_pub: bytes, params: SignatureParams,
                          not_before: TimeInstant, lifetime: int) -> Certificate:
        """
        Émet un certificat.

        Args:
            subject (str): Titulaire
            subject_pub (bytes): Clé publique du titulaire
            params (SignatureParams): Paramètres de la clé du titulaire
            not_before (TimeInstant): Début de validité
            lifetime (int): Durée de vie en secondes

        Returns:
            Certificate: Certificat signé

        Raises:
            CertificateExpired: Si l'autorité n'est pas valide à ``not_before``
        """
        if not self.certificate.valid_at(not_before):
            raise CertificateExpired(
                f"{self.certificate.subject} n'est pas valide le {not_before} "
                f"(fenêtre {self.certificate.not_before} → {self.certificate.not_after})"
            )
        serial = self._next_serial
        self._next_serial += 1
        unsigned = Certificate(
            subject=subject,
            issuer_cert=self.certificate,
            public_key=subject_pub,
            params=params,
            not_before=not_before,
            not_after=not_before.plus_seconds(lifetime),
            serial=serial,
        )
        signature = sign(self.key_pair, self.key_pair.params.paired_hash, unsigned.tbs_bytes())
        certificate = replace(unsigned, issuer_signature=signature)
        self.issued[serial] = certificate
        logger.info("Certificat émis par %s: %s", self.certificate.subject, certificate)
        return certificate

    def revoke(self, serial: int, at: TimeInstant) -> Crl:
        """
        Révoque un certificat et publie une nouvelle liste.

        Raises:
            UnknownSerial: Si le numéro n'a pas été émis par cette autorité
        """
        if serial not in self.issued:
            raise UnknownSerial(f"{self.certificate.subject} n'a pas émis le numéro {serial}")
        self.revocations.setdefault(serial, at)
        logger.info("Révocation de %s#%d le %s", self.certificate.subject, serial, at)
        return self.publish_crl(at)

    def publish_crl(self, at: TimeInstant) -> Crl:
        """Publie la liste des certificats révoqués à la date ``at``."""
        revoked = frozenset(s for s, when in self.revocations.items() if when <= at)
        unsigned = Crl(issuer=self.ref, issued_at=at, revoked_serials=revoked)
        signature = sign(self.key_pair, self.key_pair.params.paired_hash, unsigned.tbs_bytes())
        crl = Crl(issuer=self.ref, issued_at=at, revoked_serials=revoked, signature=signature)
        self.crls.append(crl)
        self.crls.sort(key=lambda c: c.issued_at)
        logger.debug("CRL publiée par %s le %s (%d révoqués)",
                     self.certificate.subject, at, len(revoked))
        return crl

    def crl_at(self, at: TimeInstant) -> Optional[Crl]:
        """Liste la plus récente publiée au plus tard à ``at``."""
        candidates = [crl for crl in self.crls if crl.issued_at <= at]
        return candidates[-1] if candidates else None


def issue_certificate(ca: CertificateAuthority, subject: str, subject_pub: bytes,
                      params: SignatureParams, not_before: TimeInstant,
                      lifetime: int) -> Certificate:
    return ca.issue_certificate(subject, subject_pub, params, not_before, lifetime)


def revoke(ca: CertificateAuthority, serial: int, at: TimeInstant) -> Crl:
    return ca.revoke(serial, at)


def encode_certificate(cert: Certificate) -> bytes:
    return cert.encode()


def encode_crl(crl: Crl) -> bytes:
    return crl.encode()


# =============================================================================
# Validation
# =============================================================================

def certificate_signature_valid(cert: Certificate) -> bool:
    """Vérifie la signature de l'émetteur sur le certificat."""
    issuer = cert.issuer_cert or cert
    return verify(issuer.public_key, issuer.params.paired_hash, cert.tbs_bytes(),
                  cert.issuer_signature)


def crl_signature_valid(crl: Crl, issuer: Certificate) -> bool:
    if crl.issuer != issuer.ref:
        return False
    return verify(issuer.public_key, issuer.params.paired_hash, crl.tbs_bytes(), crl.signature)


def check_revocation(crl: Crl, cert: Certificate, at: TimeInstant) -> bool:
    """
    Indique si ``cert`` est révoqué selon ``crl`` à la date ``at``.

    Une liste publiée après ``at`` ou par un autre émetteur n'est pas prise
    en compte.
    """
    if crl.issuer != cert.issuer_ref or crl.issued_at > at:
        return False
    return crl.lists(cert.serial)


def newest_crl(crls: Iterable[Crl], issuer: CertificateRef, at: TimeInstant) -> Optional[Crl]:
    candidates = [crl for crl in crls if crl.issuer == issuer and crl.issued_at <= at]
    if not candidates:
        return None
    return max(candidates, key=lambda crl: crl.issued_at)


def chain_valid(cert: Certificate, crls: Sequence[Crl], at: TimeInstant) -> bool:
    """
    Valide la chaîne d'un certificat à la date ``at``.

    Chaque maillon doit porter une signature valide de son émetteur, être
    dans sa fenêtre de validité et ne pas figurer dans la liste de
    révocation la plus récente publiée au plus tard à ``at``.

    Raises:
        MissingCrl: Si aucune liste n'est disponible pour un émetteur
    """
    for link in cert.chain():
        issuer = link.issuer_cert or link
        crl = newest_crl(crls, issuer.ref, at)
        if crl is None:
            raise MissingCrl(f"Aucune CRL de {issuer.subject} au {at}")
        if not certificate_signature_valid(link):
            logger.debug("Signature invalide sur %s", link.subject)
            return False
        if not link.valid_at(at):
            logger.debug("%s hors validité le %s", link.subject, at)
            return False
        if not crl_signature_valid(crl, issuer):
            logger.debug("CRL de %s mal signée", issuer.subject)
            return False
        if check_revocation(crl, link, at):
            logger.debug("%s révoqué (CRL du %s)", link.subject, crl.issued_at)
            return False
    return True


# =============================================================================
# Signatures de documents
# =============================================================================

def sign_document(key_pair: KeyPair, signer_cert: Certificate, hash_fn: HashFunctionId,
                  document: bytes, at: TimeInstant) -> DocumentSignature:
    """
    Signe un document (format de l'application de signature).

    Returns:
        DocumentSignature: Identifiant de méthode, empreinte, date de
        signature, certificat et valeur de signature
    """
    unsigned = DocumentSignature(
        method_id=method_id_for(hash_fn, key_pair.params),
        doc_digest=hash_bytes(hash_fn, document),
        signing_time=at,
        signer_cert=signer_cert,
    )
    value = sign(key_pair, hash_fn, unsigned.tbs_bytes())
    return DocumentSignature(unsigned.method_id, unsigned.doc_digest, at, signer_cert, value)


def verify_document(document: bytes, signature: DocumentSignature) -> bool:
    """Vérifie une signature de document à sa date de signature."""
    try:
        hash_fn = signature.hash_fn
    except ValueError:
        return False
    cert = signature.signer_cert
    if signature.method_id != method_id_for(hash_fn, cert.params):
        return False
    if hash_bytes(hash_fn, document) != signature.doc_digest:
        return False
    if not cert.valid_at(signature.signing_time):
        return False
    return verify(cert.public_key, hash_fn, signature.tbs_bytes(), signature.signature_value)


# =============================================================================
# PKI de démonstration
# =============================================================================

@dataclass
class IssuedLeaf:
    """Certificat feuille et ses clés."""

    key_pair: KeyPair = field(repr=False)
    certificate: Certificate


class FixturePki:
    """
    PKI déterministe à trois niveaux.

    La racine et l'autorité intermédiaire utilisent des clés de 8192 bits à
    longue durée de vie; les feuilles sont émises par l'intermédiaire avec la
    longueur de clé appariée à la fonction de hachage demandée.

    Attributes:
        seed (int): Graine de toutes les clés
        root (CertificateAuthority): Autorité racine
        intermediate (CertificateAuthority): Autorité intermédiaire
    """

    def __init__(self, seed: int = 1, start: Optional[TimeInstant] = None):
        self.seed = seed
        start = start or TimeInstant.from_date(2016)
        self._key_counter = 0
        self.root = CertificateAuthority.self_signed(
            ROOT_SUBJECT, self._next_keys(CA_PARAMS, ROOT_SUBJECT), start, ROOT_LIFETIME)
        inter_keys = self._next_keys(CA_PARAMS, INTERMEDIATE_SUBJECT)
        inter_cert = self.root.issue_certificate(
            INTERMEDIATE_SUBJECT, inter_keys.public_key, CA_PARAMS, start, INTERMEDIATE_LIFETIME)
        self.intermediate = CertificateAuthority(inter_keys, inter_cert)
        self.root.publish_crl(start)
        self.intermediate.publish_crl(start)

    def _next_keys(self, params: SignatureParams, subject: str) -> KeyPair:
        self._key_counter += 1
        material = hashlib.sha256(
            concat(uint(self.seed & (2 ** 64 - 1)), text(subject), uint(self._key_counter))
        ).digest()
        return keygen(params, int.from_bytes(material[:8], "big"))

    @property
    def authorities(self) -> Tuple[CertificateAuthority, CertificateAuthority]:
        return self.root, self.intermediate

    def authority_for(self, ref: CertificateRef) -> CertificateAuthority:
        """
        Autorité dont le certificat correspond à ``ref``.

        Raises:
            UnknownIssuer: Si aucune autorité ne correspond
        """
        for authority in self.authorities:
            if authority.ref == ref:
                return authority
        raise UnknownIssuer(f"Autorité inconnue: {ref}")

    def issue_leaf(self, subject: str, hash_fn: HashFunctionId, not_before: TimeInstant,
                   lifetime: int = LEAF_LIFETIME) -> IssuedLeaf:
        """Émet un certificat feuille apparié à ``hash_fn``."""
        params = SignatureParams.for_hash(hash_fn)
        keys = self._next_keys(params, subject)
        cert = self.intermediate.issue_certificate(
            subject, keys.public_key, params, not_before, lifetime)
        return IssuedLeaf(keys, cert)

    def find_certificate(self, ref: CertificateRef) -> Certificate:
        """
        Retrouve un certificat émis par la PKI.

        Raises:
            UnknownIssuer: Si le certificat est inconnu
        """
        for authority in self.authorities:
            cert = authority.issued.get(ref.serial)
            if cert is not None and cert.subject == ref.subject:
                return cert
        raise UnknownIssuer(f"Certificat inconnu de la PKI: {ref}")

    def adopt(self, certificates: Iterable[Certificate]) -> int:
        """
        Réenregistre des certificats émis par cette PKI lors d'une exécution
        précédente (chaînes lues dans un enregistrement de preuve).

        Seuls les certificats signés par l'une des autorités sont repris; les
        numéros de série suivants sont décalés en conséquence.

        Returns:
            int: Nombre de certificats repris
        """
        adopted = 0
        for cert in certificates:
            if cert.is_self_signed:
                continue
            try:
                authority = self.authority_for(cert.issuer_ref)
            except UnknownIssuer:
                continue
            if cert.serial in authority.issued or cert.issuer_cert != authority.certificate:
                continue
            if not certificate_signature_valid(cert):
                logger.warning("Certificat %s ignoré: signature invalide", cert.ref)
                continue
            authority.issued[cert.serial] = cert
            authority._next_serial = max(authority._next_serial, cert.serial + 1)
            adopted += 1
        if adopted:
            logger.debug("PKI: %d certificat(s) repris", adopted)
        return adopted

    def chain_of(self, cert: Certificate) -> List[Certificate]:
        return cert.chain()

    def crls_for_chain(self, cert: Certificate, at: TimeInstant, publish: bool = True) -> List[Crl]:
        """
        Une CRL par certificat de la chaîne, publiée par l'émetteur de ce
        certificat. Une nouvelle liste est publiée lorsque la plus récente
        est antérieure à ``at``; avec ``publish=False`` seules les listes
        déjà publiées sont renvoyées (consultation de l'historique).
        """
        crls = []
        for link in cert.chain():
            authority = self.authority_for(link.issuer_ref)
            crl = authority.crl_at(at)
            if publish and (crl is None or crl.issued_at < at):
                crl = authority.publish_crl(at)
            if crl is not None:
                crls.append(crl)
        return crls

    def revoke(self, target: Union[str, int, Certificate], at: TimeInstant) -> Crl:
        """
        Révoque un certificat désigné par son sujet, son numéro de série ou
        lui-même.

        Raises:
            UnknownSerial: Si aucun certificat ne correspond
        """
        for authority in self.authorities:
            for serial, cert in authority.issued.items():
                if serial == 0 and authority is self.root:
                    continue
                if (isinstance(target, Certificate) and cert.ref == target.ref
                        and cert.issuer_ref == authority.ref) \
                        or (isinstance(target, str) and cert.subject == target) \
                        or (isinstance(target, int) and serial == target
                            and authority is self.intermediate):
                    return authority.revoke(serial, at)
        raise UnknownSerial(f"Aucun certificat à révoquer pour {target!r}")
