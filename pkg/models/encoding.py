"""
Encodage canonique par préfixe de longueur.

L'opérateur de concaténation ``a || b`` utilisé partout (entrées des
fonctions de hachage, nœuds de Merkle, encodages des certificats et des
attestations) est une concaténation où chaque opérande est précédé de sa
longueur sur 8 octets big-endian. Deux listes d'opérandes différentes ne
peuvent donc jamais produire les mêmes octets.
"""

from typing import Iterable, List

# Largeur du préfixe de longueur de chaque opérande
LENGTH_PREFIX_BYTES = 8


def concat(*parts: bytes) -> bytes:
    """
    Concatène des opérandes avec préfixe de longueur.

    Args:
        *parts (bytes): Opérandes dans l'ordre

    Returns:
        bytes: len(p0) || p0 || len(p1) || p1 ...
    """
    return concat_all(parts)


def concat_all(parts: Iterable[bytes]) -> bytes:
    """Variante de :func:`concat` pour un itérable d'opérandes."""
    chunks = []
    for part in parts:
        if not isinstance(part, (bytes, bytearray)):
            raise TypeError(f"Opérande non binaire: {type(part).__name__}")
        chunks.append(len(part).to_bytes(LENGTH_PREFIX_BYTES, "big"))
        chunks.append(bytes(part))
    return b"".join(chunks)


def split(data: bytes) -> List[bytes]:
    """
    Inverse de :func:`concat`: découpe une suite d'opérandes préfixés.

    Raises:
        ValueError: Si un préfixe annonce plus d'octets que disponibles
    """
    parts = []
    offset = 0
    while offset < len(data):
        if offset + LENGTH_PREFIX_BYTES > len(data):
            raise ValueError(f"Préfixe de longueur tronqué à l'octet {offset}")
        size = int.from_bytes(data[offset:offset + LENGTH_PREFIX_BYTES], "big")
        offset += LENGTH_PREFIX_BYTES
        if offset + size > len(data):
            raise ValueError(f"Opérande tronqué à l'octet {offset} ({size} octets annoncés)")
        parts.append(data[offset:offset + size])
        offset += size
    return parts


def uint(value: int) -> bytes:
    """Entier non signé sur 8 octets big-endian."""
    return value.to_bytes(8, "big")


def read_uint(data: bytes) -> int:
    return int.from_bytes(data, "big")


def text(value: str) -> bytes:
    return value.encode("utf-8")
