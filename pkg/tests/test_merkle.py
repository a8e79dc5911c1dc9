import hashlib
import random
from dataclasses import replace

import pytest

from core.merkle import MerkleTree, expected_sides, path_matches, recompute_root
from models.auth_path import AuthPath, Side
from models.errors import EmptyLeafList, LeafIndexOutOfRange
from models.primitives import HashFunctionId


def _h(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def _pair(left: bytes, right: bytes) -> bytes:
    # concaténation préfixée de longueur (8 octets big-endian)
    return _h(len(left).to_bytes(8, "big") + left + len(right).to_bytes(8, "big") + right)


def oracle_root(leaves):
    """Racine calculée récursivement, sans le code de l'arbre."""
    level = [_h(leaf) for leaf in leaves]
    while len(level) > 1:
        level = [_pair(level[i], level[i + 1]) if i + 1 < len(level) else level[i]
                 for i in range(0, len(level), 2)]
    return level[0]


def test_four_leaves():
    a, b, c, d = b"a", b"b", b"c", b"d"
    tree = MerkleTree(HashFunctionId.SHA256, [a, b, c, d])
    assert tree.root == _pair(_pair(_h(a), _h(b)), _pair(_h(c), _h(d)))


def test_odd_node_is_promoted():
    tree = MerkleTree(HashFunctionId.SHA256, [b"a", b"b", b"c"])
    assert tree.root == _pair(_pair(_h(b"a"), _h(b"b")), _h(b"c"))


def test_single_leaf():
    tree = MerkleTree(HashFunctionId.SHA256, [b"seul"])
    assert tree.root == _h(b"seul")
    assert len(tree.auth_path(0)) == 0


def test_auth_path_of_first_leaf():
    tree = MerkleTree(HashFunctionId.SHA256, [b"a", b"b", b"c", b"d"])
    path = tree.auth_path(0)
    assert path.siblings == ((_h(b"b"), Side.RIGHT), (_pair(_h(b"c"), _h(b"d")), Side.RIGHT))


@pytest.mark.parametrize("count", range(1, 17))
def test_root_matches_oracle(count):
    rng = random.Random(count)
    leaves = [rng.randbytes(rng.randint(0, 40)) for _ in range(count)]
    tree = MerkleTree(HashFunctionId.SHA256, leaves)
    assert tree.root == oracle_root(leaves)
    for index, leaf in enumerate(leaves):
        assert recompute_root(leaf, tree.auth_path(index)) == tree.root


def test_wrong_leaf_gives_other_root():
    tree = MerkleTree(HashFunctionId.SHA384, [b"a", b"b", b"c"])
    assert recompute_root(b"z", tree.auth_path(1)) != tree.root


def test_errors():
    with pytest.raises(EmptyLeafList):
        MerkleTree(HashFunctionId.SHA256, [])
    with pytest.raises(LeafIndexOutOfRange):
        MerkleTree(HashFunctionId.SHA256, [b"a", b"b"]).auth_path(2)


def test_auth_path_encoding():
    path = MerkleTree(HashFunctionId.SHA512, [b"a", b"b", b"c", b"d", b"e"]).auth_path(4)
    assert AuthPath.decode(path.encode(), HashFunctionId.SHA512) == path


@pytest.mark.parametrize("count", range(1, 20))
def test_paths_match_their_position(count):
    tree = MerkleTree(HashFunctionId.SHA256, [bytes([i]) for i in range(count)])
    for index, path in enumerate(tree.auth_paths()):
        assert [side for _, side in path.siblings] == expected_sides(index, count)
        assert path_matches(path, index, count)
        assert path_matches(path)


@pytest.mark.parametrize("count", range(2, 20))
def test_moved_leaf_index_is_rejected(count):
    tree = MerkleTree(HashFunctionId.SHA256, [bytes([i]) for i in range(count)])
    for index, path in enumerate(tree.auth_paths()):
        for other in range(count + 1):
            if other != index:
                assert not path_matches(replace(path, leaf_index=other), size=count)
                assert not path_matches(replace(path, leaf_index=other), index, count)


def test_sides_without_tree_size():
    tree = MerkleTree(HashFunctionId.SHA256, [b"a", b"b", b"c", b"d", b"e"])
    path = tree.auth_path(4)
    # feuille promue deux fois puis frère à gauche
    assert [side for _, side in path.siblings] == [Side.LEFT]
    assert path_matches(path)
    assert not path_matches(replace(path, leaf_index=5))
    assert not path_matches(replace(path, leaf_index=0))
    flipped = tuple((digest, Side.RIGHT) for digest, _ in tree.auth_path(3).siblings)
    assert not path_matches(replace(tree.auth_path(3), siblings=flipped))
