"""
Primitives cryptographiques supportées.

- Fonctions de hachage de la famille SHA-2: SHA-256, SHA-384, SHA-512,
  ordonnées par robustesse.
- Schéma de signature simulé ``SIM-RSA`` dont la longueur de clé est
  imposée par la fonction de hachage utilisée (appariement total):

    SHA-256 -> 2048 bits
    SHA-384 -> 4096 bits
    SHA-512 -> 8192 bits
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

from .errors import PairingViolation, UnknownPrimitive, UnsupportedKeyLength

SIGNATURE_SCHEME = "SIM-RSA"
SUPPORTED_KEY_BITS = (2048, 4096, 8192)


class HashFunctionId(Enum):
    """Identifiant d'une fonction de hachage (nom canonique ASCII)."""

    SHA256 = "SHA-256"
    SHA384 = "SHA-384"
    SHA512 = "SHA-512"

    @property
    def canonical_name(self) -> str:
        return self.value

    @property
    def digest_size(self) -> int:
        return _DIGEST_SIZES[self]

    @property
    def strength(self) -> int:
        return _DIGEST_SIZES[self]

    @property
    def hashlib_name(self) -> str:
        return self.value.replace("-", "").lower()

    @staticmethod
    def parse(name: str) -> "HashFunctionId":
        """
        Analyse un nom canonique (``SHA-256``...).

        Raises:
            UnknownPrimitive: Si le nom n'est pas supporté
        """
        for member in HashFunctionId:
            if member.value == name:
                return member
        raise UnknownPrimitive(f"Fonction de hachage inconnue: {name!r}")

    def encode(self) -> bytes:
        return self.value.encode("ascii")

    def __lt__(self, other: "HashFunctionId") -> bool:
        if not isinstance(other, HashFunctionId):
            return NotImplemented
        return self.strength < other.strength

    def __le__(self, other: "HashFunctionId") -> bool:
        if not isinstance(other, HashFunctionId):
            return NotImplemented
        return self.strength <= other.strength

    def __str__(self) -> str:
        return self.value


_DIGEST_SIZES: Dict[HashFunctionId, int] = {
    HashFunctionId.SHA256: 32,
    HashFunctionId.SHA384: 48,
    HashFunctionId.SHA512: 64,
}

# Appariement fonction de hachage / longueur de clé
PAIRED_KEY_BITS: Dict[HashFunctionId, int] = {
    HashFunctionId.SHA256: 2048,
    HashFunctionId.SHA384: 4096,
    HashFunctionId.SHA512: 8192,
}


@dataclass(frozen=True)
class SignatureParams:
    """
    Paramètres d'un schéma de signature.

    Attributes:
        key_bits (int): Longueur de clé nominale (2048, 4096 ou 8192)
        scheme (str): Nom du schéma (toujours ``SIM-RSA``)
    """

    key_bits: int
    scheme: str = SIGNATURE_SCHEME

    def __post_init__(self):
        if self.scheme != SIGNATURE_SCHEME:
            raise UnknownPrimitive(f"Schéma de signature inconnu: {self.scheme!r}")
        if self.key_bits not in SUPPORTED_KEY_BITS:
            raise UnsupportedKeyLength(
                f"Longueur de clé non supportée: {self.key_bits} "
                f"(attendu: {', '.join(str(b) for b in SUPPORTED_KEY_BITS)})"
            )

    @property
    def name(self) -> str:
        return f"{self.scheme}-{self.key_bits}"

    @property
    def paired_hash(self) -> HashFunctionId:
        for hash_fn, bits in PAIRED_KEY_BITS.items():
            if bits == self.key_bits:
                return hash_fn
        raise UnsupportedKeyLength(f"Aucune fonction de hachage pour {self.key_bits} bits")

    @staticmethod
    def for_hash(hash_fn: HashFunctionId) -> "SignatureParams":
        """Paramètres appariés à une fonction de hachage."""
        return SignatureParams(PAIRED_KEY_BITS[hash_fn])

    @staticmethod
    def parse(name: str) -> "SignatureParams":
        """
        Analyse un nom ``SIM-RSA-<bits>``.

        Raises:
            UnknownPrimitive: Si le nom ne suit pas ce format
        """
        scheme, _, bits = name.rpartition("-")
        if scheme != SIGNATURE_SCHEME or not bits.isdigit():
            raise UnknownPrimitive(f"Paramètres de signature inconnus: {name!r}")
        return SignatureParams(int(bits))

    def check_pairing(self, hash_fn: HashFunctionId) -> None:
        """
        Vérifie l'appariement avec une fonction de hachage.

        Raises:
            PairingViolation: Si la longueur de clé ne correspond pas
        """
        expected = PAIRED_KEY_BITS[hash_fn]
        if expected != self.key_bits:
            raise PairingViolation(
                f"{hash_fn} exige une clé de {expected} bits, "
                f"clé fournie: {self.key_bits} bits"
            )

    def __str__(self) -> str:
        return self.name


ALL_SIGNATURE_PARAMS = tuple(SignatureParams(bits) for bits in SUPPORTED_KEY_BITS)


@dataclass(frozen=True)
class KeyPair:
    """
    Paire de clés de signature.

    Attributes:
        params (SignatureParams): Schéma et longueur de clé
        public_key (bytes): Clé publique brute
        private_key (bytes): Clé privée brute (graine)
        key_id (str): Identifiant opaque dérivé de la clé publique
    """

    params: SignatureParams
    public_key: bytes
    private_key: bytes = field(repr=False)
    key_id: str = ""

    def __str__(self) -> str:
        return f"KeyPair({self.params}, id={self.key_id})"
