"""
Chemin d'authentification d'une feuille d'arbre de Merkle.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

from .encoding import concat_all, read_uint, uint
from .primitives import HashFunctionId


class Side(IntEnum):
    """Position du nœud frère par rapport au nœud courant."""

    LEFT = 0
    RIGHT = 1


@dataclass(frozen=True)
class AuthPath:
    """
    Chemin d'authentification.

    Attributes:
        leaf_index (int): Index de la feuille dans l'arbre
        siblings (Tuple[Tuple[bytes, Side], ...]): Frères du bas vers le haut
        hash_fn (HashFunctionId): Fonction de hachage de l'arbre
    """

    leaf_index: int
    siblings: Tuple[Tuple[bytes, Side], ...]
    hash_fn: HashFunctionId

    def __len__(self) -> int:
        return len(self.siblings)

    def encode(self) -> bytes:
        """
        Encodage canonique: index (8 octets), nombre de frères, puis pour
        chaque frère un octet de côté (0 = gauche, 1 = droite) suivi de
        l'empreinte préfixée de sa longueur.
        """
        out = [uint(self.leaf_index), uint(len(self.siblings))]
        for digest, side in self.siblings:
            out.append(bytes([int(side)]) + concat_all([digest]))
        return b"".join(out)

    @staticmethod
    def decode(data: bytes, hash_fn: HashFunctionId) -> "AuthPath":
        """Inverse de :meth:`encode`."""
        leaf_index = read_uint(data[0:8])
        count = read_uint(data[8:16])
        offset = 16
        siblings = []
        for _ in range(count):
            side = Side(data[offset])
            size = read_uint(data[offset + 1:offset + 9])
            digest = data[offset + 9:offset + 9 + size]
            if len(digest) != size:
                raise ValueError(f"Chemin tronqué au frère {len(siblings)}")
            siblings.append((digest, side))
            offset += 9 + size
        if offset != len(data):
            raise ValueError("Octets superflus après le chemin d'authentification")
        return AuthPath(leaf_index, tuple(siblings), hash_fn)

