"""
Objets d'une infrastructure à clés publiques simulée.

Les certificats et listes de révocation suivent la sémantique X.509 utile
aux preuves d'existence (fenêtre de validité, chaîne d'émetteurs,
révocation) avec un encodage binaire canonique: chaque champ est préfixé de
sa longueur, dans l'ordre de déclaration. Ce sont ces octets qui sont
signés puis hachés lors des renouvellements.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Optional

from .encoding import concat, concat_all, text, uint
from .primitives import SignatureParams
from .time_instant import TimeInstant


@dataclass(frozen=True, order=True)
class CertificateRef:
    """Référence à un certificat: sujet et numéro de série."""

    subject: str
    serial: int

    def __str__(self) -> str:
        return f"{self.subject}#{self.serial}"


@dataclass(frozen=True)
class Certificate:
    """
    Certificat simulé.

    Attributes:
        subject (str): Nom du titulaire
        issuer_cert (Optional[Certificate]): Certificat de l'émetteur
            (None pour une racine auto-signée)
        public_key (bytes): Clé publique du titulaire
        params (SignatureParams): Schéma et longueur de clé du titulaire
        not_before (TimeInstant): Début de validité (inclus)
        not_after (TimeInstant): Fin de validité (exclue)
        serial (int): Numéro de série unique chez l'émetteur
        issuer_signature (bytes): Signature de l'émetteur sur ``tbs_bytes``
    """

    subject: str
    issuer_cert: Optional["Certificate"] = field(repr=False)
    public_key: bytes = field(repr=False)
    params: SignatureParams
    not_before: TimeInstant
    not_after: TimeInstant
    serial: int
    issuer_signature: bytes = field(default=b"", repr=False)

    def __post_init__(self):
        if not self.not_before < self.not_after:
            raise ValueError(
                f"Fenêtre de validité vide pour {self.subject}: "
                f"{self.not_before} >= {self.not_after}"
            )

    @property
    def ref(self) -> CertificateRef:
        return CertificateRef(self.subject, self.serial)

    @property
    def issuer_ref(self) -> CertificateRef:
        """Référence de l'émetteur (soi-même pour une racine)."""
        if self.issuer_cert is None:
            return self.ref
        return self.issuer_cert.ref

    @property
    def is_self_signed(self) -> bool:
        return self.issuer_cert is None

    def valid_at(self, at: TimeInstant) -> bool:
        """Fenêtre semi-ouverte [not_before, not_after)."""
        return self.not_before <= at < self.not_after

    def chain(self):
        """Chaîne du certificat vers la racine (certificat inclus)."""
        chain = [self]
        current = self
        while current.issuer_cert is not None:
            current = current.issuer_cert
            chain.append(current)
        return chain

    def tbs_bytes(self) -> bytes:
        """Partie signée de l'encodage (sans la signature de l'émetteur)."""
        issuer = self.issuer_ref
        return concat(
            text(self.subject),
            concat(text(issuer.subject), uint(issuer.serial)),
            self.public_key,
            text(self.params.name),
            self.not_before.encode(),
            self.not_after.encode(),
            uint(self.serial),
        )

    def encode(self) -> bytes:
        """Encodage canonique complet."""
        return concat(self.tbs_bytes(), self.issuer_signature)

    def __str__(self) -> str:
        return (f"{self.subject} (série {self.serial}, {self.params}, "
                f"{self.not_before} → {self.not_after})")


@dataclass(frozen=True)
class Crl:
    """
    Liste de révocation signée par une autorité.

    Attributes:
        issuer (CertificateRef): Autorité émettrice
        issued_at (TimeInstant): Date de publication
        revoked_serials (FrozenSet[int]): Numéros de série révoqués
        signature (bytes): Signature de l'autorité sur ``tbs_bytes``
    """

    issuer: CertificateRef
    issued_at: TimeInstant
    revoked_serials: FrozenSet[int] = frozenset()
    signature: bytes = field(default=b"", repr=False)

    def tbs_bytes(self) -> bytes:
        return concat(
            concat(text(self.issuer.subject), uint(self.issuer.serial)),
            self.issued_at.encode(),
            concat_all(uint(serial) for serial in sorted(self.revoked_serials)),
        )

    def encode(self) -> bytes:
        return concat(self.tbs_bytes(), self.signature)

    def lists(self, serial: int) -> bool:
        return serial in self.revoked_serials
