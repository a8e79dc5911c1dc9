"""
Arbres de Merkle sur des feuilles ordonnées.

- feuille: H(charge utile de la feuille)
- nœud interne: H(gauche || droite), concaténation préfixée de longueur
- nœud impair d'un niveau: promu tel quel au niveau supérieur (pas de
  duplication, pas de hachage)
"""

from typing import List, Optional, Sequence

from models.auth_path import AuthPath, Side
from models.encoding import concat
from models.errors import EmptyLeafList, LeafIndexOutOfRange
from models.primitives import HashFunctionId

from .crypto_core import hash_bytes


class MerkleTree:
    """
    Arbre de Merkle.

    Attributes:
        hash_fn (HashFunctionId): Fonction de hachage
        leaves (List[bytes]): Charges utiles des feuilles
        levels (List[List[bytes]]): Empreintes par niveau, feuilles en premier
    """

    def __init__(self, hash_fn: HashFunctionId, leaves: Sequence[bytes]):
        if not leaves:
            raise EmptyLeafList("Impossible de construire un arbre sans feuille")
        self.hash_fn = hash_fn
        self.leaves = list(leaves)
        self.levels: List[List[bytes]] = []
        self._build()

    def _build(self):
        level = [hash_bytes(self.hash_fn, leaf) for leaf in self.leaves]
        self.levels.append(level)
        while len(level) > 1:
            parents = []
            for i in range(0, len(level), 2):
                if i + 1 < len(level):
                    parents.append(hash_bytes(self.hash_fn, concat(level[i], level[i + 1])))
                else:
                    parents.append(level[i])
            self.levels.append(parents)
            level = parents

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def __len__(self) -> int:
        return len(self.leaves)

    def auth_path(self, index: int) -> AuthPath:
        """
        Chemin d'authentification de la feuille ``index``.

        Raises:
            LeafIndexOutOfRange: Si l'index dépasse le nombre de feuilles
        """
        if not 0 <= index < len(self.leaves):
            raise LeafIndexOutOfRange(
                f"Feuille {index} hors de l'arbre ({len(self.leaves)} feuilles)")
        siblings = []
        position = index
        for level in self.levels[:-1]:
            sibling = position ^ 1
            if sibling < len(level):
                side = Side.LEFT if sibling < position else Side.RIGHT
                siblings.append((level[sibling], side))
            position //= 2
        return AuthPath(index, tuple(siblings), self.hash_fn)

    def auth_paths(self) -> List[AuthPath]:
        return [self.auth_path(i) for i in range(len(self.leaves))]


def build(hash_fn: HashFunctionId, leaves: Sequence[bytes]) -> MerkleTree:
    return MerkleTree(hash_fn, leaves)


def auth_path(tree: MerkleTree, index: int) -> AuthPath:
    return tree.auth_path(index)


def recompute_root(leaf_payload: bytes, path: AuthPath) -> bytes:
    """
    Recalcule la racine à partir d'une feuille et de son chemin.

    Une différence avec la racine attendue est détectée par l'appelant.
    """
    node = hash_bytes(path.hash_fn, leaf_payload)
    for sibling, side in path.siblings:
        if side == Side.LEFT:
            node = hash_bytes(path.hash_fn, concat(sibling, node))
        else:
            node = hash_bytes(path.hash_fn, concat(node, sibling))
    return node


def expected_sides(index: int, size: int) -> List[Side]:
    """Côtés des frères de la feuille ``index`` dans un arbre de ``size`` feuilles."""
    sides = []
    position, length = index, size
    while length > 1:
        sibling = position ^ 1
        if sibling < length:
            sides.append(Side.LEFT if sibling < position else Side.RIGHT)
        position //= 2
        length = (length + 1) // 2
    return sides


def path_matches(path: AuthPath, index: Optional[int] = None, size: Optional[int] = None) -> bool:
    """
    Vérifie que le chemin correspond bien à la position de sa feuille.

    Sans taille connue, les côtés doivent suivre les bits de ``leaf_index``:
    un bit à 1 impose un frère à gauche, un bit à 0 un frère à droite ou
    une promotion (après laquelle il n'y a plus que des frères à gauche).

    Args:
        path (AuthPath): Chemin à contrôler
        index (Optional[int]): Position attendue de la feuille
        size (Optional[int]): Nombre de feuilles de l'arbre
    """
    if index is not None and path.leaf_index != index:
        return False
    sides = [side for _, side in path.siblings]
    if size is not None:
        return 0 <= path.leaf_index < size and sides == expected_sides(path.leaf_index, size)
    position = path.leaf_index
    for side in sides:
        while position % 2 == 0 and side == Side.LEFT:
            if position == 0:
                return False
            position //= 2
        if (position % 2 == 1) != (side == Side.LEFT):
            return False
        position //= 2
    return position == 0
