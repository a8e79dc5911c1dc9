"""
Attestations et données de vérification.

Une attestation lie l'empreinte d'octets attestés à une date. Elle est
émise soit par une autorité d'horodatage (TSA, signature « à l'aveugle » de
l'empreinte et de l'heure courante), soit par une autorité notariale (NA)
qui vérifie d'abord certaines propriétés des données reçues.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Tuple

from .auth_path import AuthPath
from .certificate import Certificate, CertificateRef, Crl
from .encoding import concat, concat_all, text, uint
from .primitives import HashFunctionId
from .time_instant import TimeInstant


class IssuerKind(IntEnum):
    """Technique d'attestation."""

    TSA = 1
    NA = 2

    @staticmethod
    def parse(name: str) -> "IssuerKind":
        try:
            return IssuerKind[name.upper()]
        except KeyError:
            raise ValueError(f"Technique d'attestation inconnue: {name!r}") from None


@dataclass(frozen=True)
class Attestation:
    """
    Attestation émise.

    Attributes:
        issuer_kind (IssuerKind): TSA ou NA
        attested_digest (bytes): Empreinte des octets attestés
        hash_fn (HashFunctionId): Fonction ayant produit l'empreinte
        stated_time (TimeInstant): Date affirmée par l'émetteur
        issuer_cert (CertificateRef): Certificat de l'émetteur
        signature (bytes): Signature sur ``signed_bytes``
    """

    issuer_kind: IssuerKind
    attested_digest: bytes = field(repr=False)
    hash_fn: HashFunctionId
    stated_time: TimeInstant
    issuer_cert: CertificateRef
    signature: bytes = field(default=b"", repr=False)

    def signed_bytes(self) -> bytes:
        """Tuple (fonction de hachage, empreinte, date) signé par l'émetteur."""
        return concat(self.hash_fn.encode(), self.attested_digest, self.stated_time.encode())

    def encode(self) -> bytes:
        """
        Encodage canonique haché lors d'un renouvellement: octet de
        technique, puis champs préfixés de leur longueur.
        """
        return bytes([int(self.issuer_kind)]) + concat(
            self.hash_fn.encode(),
            self.attested_digest,
            self.stated_time.encode(),
            uint(self.issuer_cert.serial),
            text(self.issuer_cert.subject),
            self.signature,
        )


@dataclass(frozen=True)
class VerificationData:
    """
    Données nécessaires pour vérifier une attestation plus tard.

    Attributes:
        issuer_chain (Tuple[Certificate, ...]): Chaîne feuille → racine
        crls (Tuple[Crl, ...]): Une liste de révocation par certificat de
            la chaîne, publiée par l'émetteur de ce certificat
        collected_at (TimeInstant): Date de collecte
    """

    issuer_chain: Tuple[Certificate, ...] = field(repr=False)
    crls: Tuple[Crl, ...] = field(repr=False)
    collected_at: TimeInstant

    @property
    def leaf(self) -> Certificate:
        return self.issuer_chain[0]

    def encode(self) -> bytes:
        return concat(
            concat_all(cert.encode() for cert in self.issuer_chain),
            concat_all(crl.encode() for crl in self.crls),
            self.collected_at.encode(),
        )


@dataclass(frozen=True)
class NaExtras:
    """
    Données supplémentaires d'une requête notariale.

    Attributes:
        certificate (Certificate): Certificat ``c`` du signataire
        history (Tuple[Tuple[HashFunctionId, bytes], ...]): Historique
            revendiqué H_0(d), ..., H_n(d)
        original_time (Optional[TimeInstant]): Date initiale t_0
        prior_attestation (Optional[Attestation]): Attestation a_{n-1}
        prior_verification_data (Optional[VerificationData]): v_{n-1}
        prior_path (Optional[AuthPath]): Chemin si a_{n-1} porte sur une
            racine partagée
    """

    certificate: Certificate
    history: Tuple[Tuple[HashFunctionId, bytes], ...]
    original_time: Optional[TimeInstant] = None
    prior_attestation: Optional[Attestation] = None
    prior_verification_data: Optional[VerificationData] = None
    prior_path: Optional[AuthPath] = None

    @property
    def is_renewal(self) -> bool:
        return self.prior_attestation is not None


@dataclass(frozen=True)
class AttestRequest:
    """
    Requête d'attestation.

    Attributes:
        payload_digest (bytes): Empreinte à attester
        hash_fn (HashFunctionId): Fonction ayant produit l'empreinte
        requested_time (TimeInstant): Date demandée (ignorée par une TSA)
        na_extras (Optional[NaExtras]): Données notariales
    """

    payload_digest: bytes
    hash_fn: HashFunctionId
    requested_time: TimeInstant
    na_extras: Optional[NaExtras] = None
