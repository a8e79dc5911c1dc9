"""
Techniques d'attestation: horodatage par signature (TSA) et attestation
notariale (NA), collecte et vérification des données de vérification.

Une TSA signe « à l'aveugle » l'empreinte reçue avec l'heure courante. Une
NA vérifie d'abord certaines propriétés des données reçues (certificat du
signataire, sécurité des fonctions de hachage, validité de l'attestation
précédente) et refuse d'attester si l'une d'elles fait défaut.

Chaque fournisseur détient une clé par fonction de hachage (appariement
total) et renouvelle son certificat feuille auprès de la PKI dès qu'il lui
reste au plus ``CERT_ROTATION_THRESHOLD`` de validité.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from models.attestation import Attestation, AttestRequest, IssuerKind, NaExtras, VerificationData
from models.certificate import Certificate
from models.encoding import concat, concat_all
from models.errors import (
    CertificateExpired, CertificateInvalid, HashInsecure, IncompatibleAttester, MissingCrl,
    NotaryAbort, OldHashInsecure, PriorAttestationInvalid, TsaCertificateExpired,
)
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import DAY, TimeInstant
from models.verdict import Diagnostic, DiagnosticCategory

from .crypto_core import FixturePki, IssuedLeaf, chain_valid, crl_signature_valid, hash_bytes, sign, verify
from .merkle import path_matches, recompute_root
from .security_inventory import SecurityInventory, validity_estimate

logger = logging.getLogger(__name__)

# Renouvellement anticipé des certificats des fournisseurs
CERT_ROTATION_THRESHOLD = 30 * DAY

TSA_SUBJECT = "MoPS TSA"
NA_SUBJECT = "MoPS Notary"


# =============================================================================
# Octets attestés par une NA
# =============================================================================

def notarial_payload(history: Sequence[Tuple[HashFunctionId, bytes]], certificate: Certificate) -> bytes:
    """H_0 || H_0(d) || ... || H_n || H_n(d) || c"""
    return concat_all(
        [part for hash_fn, digest in history for part in (hash_fn.encode(), digest)]
        + [certificate.encode()]
    )


def cumulated_notarial_leaf(history: Sequence[Tuple[HashFunctionId, bytes]], certificate: Certificate,
                            original_time: TimeInstant) -> bytes:
    """Feuille d'un NAW dans un arbre cumulé: la date t_0 y est liée."""
    return concat(notarial_payload(history, certificate), original_time.encode())


# =============================================================================
# Vérification
# =============================================================================

@dataclass
class AttestationCheck:
    """Résultat de :func:`verify_attestation`."""

    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.diagnostics

    def __bool__(self) -> bool:
        return self.valid


def verify_attestation(att: Attestation, vd: VerificationData, attested_bytes: bytes,
                       inv: SecurityInventory, trusted_roots: Optional[Sequence[Certificate]] = None,
                       entry: Optional[int] = None) -> AttestationCheck:
    """
    Vérifie une attestation avec ses données de vérification.

    L'attestation est correcte si l'empreinte correspond aux octets
    attestés, si la signature est valide, si la chaîne de certificats est
    valide à la date de collecte et si la fonction de hachage et le schéma de
    signature étaient sûrs à cette date. La date de collecte doit être celle
    de la CRL la plus récente des données.

    Args:
        att (Attestation): Attestation à vérifier
        vd (VerificationData): Données collectées pour elle
        attested_bytes (bytes): Octets recalculés
        inv (SecurityInventory): Inventaire de sécurité
        trusted_roots (Optional[Sequence[Certificate]]): Racines acceptées
        entry (Optional[int]): Index reporté dans les diagnostics

    Returns:
        AttestationCheck: Résultat et diagnostics
    """
    check = AttestationCheck()

    def fail(category: DiagnosticCategory, message: str):
        check.diagnostics.append(Diagnostic(category, message, entry=entry))

    if hash_bytes(att.hash_fn, attested_bytes) != att.attested_digest:
        fail(DiagnosticCategory.DIGEST_MISMATCH,
             f"l'empreinte {att.hash_fn} des octets attestés ne correspond pas")

    if not vd.issuer_chain:
        fail(DiagnosticCategory.CHAIN_INVALID, "chaîne de certificats vide")
        return check
    leaf = vd.leaf
    if leaf.ref != att.issuer_cert:
        fail(DiagnosticCategory.CHAIN_INVALID,
             f"certificat {leaf.ref} différent de l'émetteur {att.issuer_cert}")
    elif leaf.params != SignatureParams.for_hash(att.hash_fn) \
            or not verify(leaf.public_key, att.hash_fn, att.signed_bytes(), att.signature):
        fail(DiagnosticCategory.SIGNATURE_INVALID, f"signature de {leaf.subject} invalide")

    if tuple(leaf.chain()) != tuple(vd.issuer_chain):
        fail(DiagnosticCategory.CHAIN_INVALID, "chaîne de certificats incohérente")
    else:
        try:
            if not chain_valid(leaf, vd.crls, vd.collected_at):
                fail(DiagnosticCategory.CHAIN_INVALID,
                     f"chaîne de {leaf.subject} invalide le {vd.collected_at}")
        except MissingCrl as exc:
            fail(DiagnosticCategory.CHAIN_INVALID, exc.message)
        for crl in vd.crls:
            issuer = next((cert for cert in vd.issuer_chain if cert.ref == crl.issuer), None)
            if issuer is None or not crl_signature_valid(crl, issuer):
                fail(DiagnosticCategory.CHAIN_INVALID, f"CRL de {crl.issuer} invalide")
                break
        if trusted_roots is not None and vd.issuer_chain[-1].ref not in {r.ref for r in trusted_roots}:
            fail(DiagnosticCategory.CHAIN_INVALID,
                 f"racine {vd.issuer_chain[-1].subject} non reconnue")
    if vd.crls and max(crl.issued_at for crl in vd.crls) != vd.collected_at:
        fail(DiagnosticCategory.CHAIN_INVALID,
             f"date de collecte {vd.collected_at} différente de la CRL la plus récente")
    if att.issuer_kind == IssuerKind.TSA and vd.collected_at < att.stated_time:
        fail(DiagnosticCategory.CHAIN_INVALID, "données collectées avant l'attestation")

    if not inv.secure_at(att.hash_fn, vd.collected_at):
        fail(DiagnosticCategory.PRIMITIVE_INSECURE,
             f"{att.hash_fn} n'est plus sûr le {vd.collected_at}")
    if not inv.signature_secure_at(leaf.params, vd.collected_at):
        fail(DiagnosticCategory.PRIMITIVE_INSECURE,
             f"{leaf.params} n'est plus sûr le {vd.collected_at}")
    return check


def collect_verification_data(pki: FixturePki, attestation: Attestation, at: TimeInstant) -> VerificationData:
    """
    Collecte la chaîne de l'émetteur et les CRL les plus récentes à ``at``.

    Raises:
        UnknownIssuer: Si l'émetteur est inconnu de la PKI
    """
    cert = pki.find_certificate(attestation.issuer_cert)
    return VerificationData(
        issuer_chain=tuple(cert.chain()),
        crls=tuple(pki.crls_for_chain(cert, at)),
        collected_at=at,
    )


# =============================================================================
# Fournisseurs
# =============================================================================

class Attester(ABC):
    """Interface commune des fournisseurs d'attestation (locaux ou distants)."""

    kind: IssuerKind

    @abstractmethod
    def attest(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        """Émet une attestation."""

    @abstractmethod
    def verification_data(self, attestation: Attestation, at: TimeInstant) -> VerificationData:
        """Collecte les données de vérification d'une attestation."""


class _Provider(Attester):
    """Fournisseur adossé à la PKI, avec rotation des certificats."""

    def __init__(self, subject: str, pki: FixturePki, auto_rotate: bool = True):
        self.subject = subject
        self.pki = pki
        self.auto_rotate = auto_rotate
        self._signers: Dict[HashFunctionId, IssuedLeaf] = {}
        self.issued_count = 0

    def _needs_rotation(self, leaf: Optional[IssuedLeaf], clock: TimeInstant) -> bool:
        if leaf is None:
            return True
        cert = leaf.certificate
        return not cert.valid_at(clock) or cert.not_after.minus(clock) <= CERT_ROTATION_THRESHOLD

    def signer(self, hash_fn: HashFunctionId, clock: TimeInstant) -> IssuedLeaf:
        """Clé et certificat utilisés pour ``hash_fn`` à la date ``clock``."""
        leaf = self._signers.get(hash_fn)
        if self._needs_rotation(leaf, clock) and (self.auto_rotate or leaf is None):
            try:
                leaf = self.pki.issue_leaf(f"{self.subject} {hash_fn}", hash_fn, clock)
            except CertificateExpired as exc:
                raise TsaCertificateExpired(f"{self.subject}: {exc.message}") from exc
            self._signers[hash_fn] = leaf
            logger.info("%s: nouveau certificat %s", self.subject, leaf.certificate)
        if not leaf.certificate.valid_at(clock):
            raise TsaCertificateExpired(
                f"Certificat de {self.subject} expiré le {leaf.certificate.not_after} "
                f"(requête du {clock})"
            )
        return leaf

    def _issue(self, digest: bytes, hash_fn: HashFunctionId, stated_time: TimeInstant,
               clock: TimeInstant) -> Attestation:
        leaf = self.signer(hash_fn, clock)
        leaf.certificate.params.check_pairing(hash_fn)
        unsigned = Attestation(self.kind, digest, hash_fn, stated_time, leaf.certificate.ref)
        signature = sign(leaf.key_pair, hash_fn, unsigned.signed_bytes())
        self.issued_count += 1
        return Attestation(self.kind, digest, hash_fn, stated_time, leaf.certificate.ref, signature)

    def verification_data(self, attestation: Attestation, at: TimeInstant) -> VerificationData:
        return collect_verification_data(self.pki, attestation, at)


class TimestampAuthority(_Provider):
    """
    Autorité d'horodatage: la date attestée est toujours l'heure de
    l'émission, la date demandée est ignorée.
    """

    kind = IssuerKind.TSA

    def __init__(self, pki: FixturePki, subject: str = TSA_SUBJECT, auto_rotate: bool = True):
        super().__init__(subject, pki, auto_rotate)

    def attest(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        """
        Raises:
            IncompatibleAttester: Si la requête est notariale
            TsaCertificateExpired: Si le certificat de la TSA a expiré
        """
        if request.na_extras is not None:
            raise IncompatibleAttester("Une TSA ne traite pas les requêtes notariales")
        attestation = self._issue(request.payload_digest, request.hash_fn, clock, clock)
        logger.info("TSA: horodatage %s le %s", request.hash_fn, clock)
        return attestation


class NotarialAuthority(_Provider):
    """
    Autorité notariale.

    Sans données notariales, la requête est une attestation simple (racine
    d'un arbre cumulé): seule la sécurité de la fonction de hachage est
    contrôlée et la date attestée est l'heure courante. Avec données
    notariales, la NA applique les contrôles d'initialisation ou de
    renouvellement du NAW et atteste avec la date initiale t_0.

    Attributes:
        inventory (SecurityInventory): Inventaire consulté par la NA
    """

    kind = IssuerKind.NA

    def __init__(self, pki: FixturePki, inventory: SecurityInventory, subject: str = NA_SUBJECT,
                 auto_rotate: bool = True):
        super().__init__(subject, pki, auto_rotate)
        self.inventory = inventory

    def attest(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        """
        Raises:
            NotaryAbort: Sous-classe nommant le contrôle en échec
        """
        extras = request.na_extras
        if extras is None:
            return self.attest_plain(request, clock)
        if extras.is_renewal:
            return self.attest_renew(request, clock)
        return self.attest_init(request, clock)

    def attest_plain(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        if not self.inventory.secure_at(request.hash_fn, clock):
            raise HashInsecure(f"{request.hash_fn} n'est pas sûr le {clock}")
        logger.info("NA: attestation simple %s le %s", request.hash_fn, clock)
        return self._issue(request.payload_digest, request.hash_fn, clock, clock)

    def _attest_history(self, request: AttestRequest, extras: NaExtras, t0: TimeInstant,
                        clock: TimeInstant) -> Attestation:
        hash_fn = extras.history[-1][0]
        payload = notarial_payload(extras.history, extras.certificate)
        digest = hash_bytes(hash_fn, payload)
        if request.hash_fn != hash_fn or request.payload_digest != digest:
            raise NotaryAbort("Empreinte de la requête différente de l'historique fourni")
        return self._issue(digest, hash_fn, t0, clock)

    def attest_init(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        """
        Initialisation: ``c`` valide à t_0 et H_0 sûr à t_0.

        Raises:
            CertificateInvalid: Si le certificat du signataire est invalide
            HashInsecure: Si la fonction de hachage n'est pas sûre
        """
        extras = request.na_extras
        t0 = extras.original_time or clock
        if t0 > clock:
            raise NotaryAbort(f"Date initiale {t0} postérieure à l'heure courante {clock}")
        certificate = extras.certificate
        crls = self.pki.crls_for_chain(certificate, t0, publish=(t0 == clock))
        try:
            cert_ok = chain_valid(certificate, crls, t0)
        except MissingCrl:
            cert_ok = False
        if not cert_ok:
            raise CertificateInvalid(f"Certificat {certificate.subject} invalide le {t0}")
        for hash_fn, _ in extras.history:
            if not (self.inventory.secure_at(hash_fn, t0) and self.inventory.secure_at(hash_fn, clock)):
                raise HashInsecure(f"{hash_fn} n'est pas sûr le {clock}")
        attestation = self._attest_history(request, extras, t0, clock)
        logger.info("NA: initialisation (t0=%s) le %s", t0, clock)
        return attestation

    def attest_renew(self, request: AttestRequest, clock: TimeInstant) -> Attestation:
        """
        Renouvellement: H_n sûr, H_{n-1} encore sûr lors d'un changement de
        fonction, attestation précédente valide avec v_{n-1}.

        Raises:
            HashInsecure: H_n n'est pas sûr
            OldHashInsecure: H_{n-1} n'est plus sûr lors d'un renouvellement du hachage
            PriorAttestationInvalid: a_{n-1} n'est pas (ou plus) valide
        """
        extras = request.na_extras
        prior = extras.prior_attestation
        t0 = extras.original_time
        new_hash = extras.history[-1][0]
        if not self.inventory.secure_at(new_hash, clock):
            raise HashInsecure(f"{new_hash} n'est pas sûr le {clock}")
        hash_renewal = prior.hash_fn != new_hash
        if hash_renewal and not self.inventory.secure_at(prior.hash_fn, clock):
            raise OldHashInsecure(f"{prior.hash_fn} n'est plus sûr le {clock}")

        prior_history = extras.history[:-1] if hash_renewal else extras.history
        prior_bytes = notarial_payload(prior_history, extras.certificate)
        if extras.prior_path is not None:
            if not path_matches(extras.prior_path):
                raise PriorAttestationInvalid("Chemin partagé de l'attestation précédente incohérent")
            leaf = cumulated_notarial_leaf(prior_history, extras.certificate, t0)
            prior_bytes = concat(prior.hash_fn.encode(), recompute_root(leaf, extras.prior_path))
        vd = extras.prior_verification_data
        if vd is None or t0 is None:
            raise PriorAttestationInvalid("Attestation précédente fournie sans données de vérification")
        check = verify_attestation(prior, vd, prior_bytes, self.inventory)
        if not check.valid:
            raise PriorAttestationInvalid(
                f"Attestation précédente invalide: {check.diagnostics[0]}")
        if extras.prior_path is None and prior.stated_time != t0:
            raise PriorAttestationInvalid(f"Attestation précédente datée du {prior.stated_time}, t0={t0}")
        if clock >= validity_estimate(self.inventory, prior, vd.leaf):
            raise PriorAttestationInvalid(f"Attestation précédente expirée le {clock}")

        attestation = self._attest_history(request, extras, t0, clock)
        logger.info("NA: renouvellement %s (t0=%s) le %s",
                    "du hachage" if hash_renewal else "de l'attestation", t0, clock)
        return attestation


def tsa_attest(tsa: TimestampAuthority, req: AttestRequest, clock: TimeInstant) -> Attestation:
    return tsa.attest(req, clock)


def na_attest_init(na: NotarialAuthority, req: AttestRequest, clock: TimeInstant) -> Attestation:
    return na.attest_init(req, clock)


def na_attest_renew(na: NotarialAuthority, req: AttestRequest, clock: TimeInstant) -> Attestation:
    return na.attest_renew(req, clock)
