"""
Fixtures communes: PKI déterministe, fournisseurs, inventaire et documents
signés en 2016.
"""

import os
import sys
from dataclasses import replace

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.attestation import NotarialAuthority, TimestampAuthority
from core.crypto_core import FixturePki, hash_bytes
from core.renewal import add_document, protect, renew
from core.security_inventory import default_lenstra_inventory
from data_io.document_generator import DocumentGenerator
from models.encoding import concat
from models.evidence import StructureKind
from models.primitives import HashFunctionId
from models.time_instant import DAY, TimeInstant

START = TimeInstant.from_date(2016)
SEED = 7


@pytest.fixture
def start():
    return START


@pytest.fixture
def pki():
    return FixturePki(SEED, START)


@pytest.fixture
def inventory():
    return default_lenstra_inventory()


@pytest.fixture
def tsa(pki):
    return TimestampAuthority(pki)


@pytest.fixture
def na(pki, inventory):
    return NotarialAuthority(pki, inventory)


@pytest.fixture
def generator(pki, inventory):
    return DocumentGenerator(pki, SEED, inventory, min_size=64, max_size=256)


@pytest.fixture
def docs(generator):
    return generator.generate(8, START)


@pytest.fixture
def doc(docs):
    return docs[0]


@pytest.fixture
def sha256():
    return HashFunctionId.SHA256


def days(n: int) -> int:
    return n * DAY


def flip_bit(data: bytes, index: int = 0, bit: int = 0) -> bytes:
    """Copie de ``data`` avec un bit inversé."""
    out = bytearray(data)
    out[index % len(out)] ^= 1 << bit
    return bytes(out)


def corrupt_last_signature(state):
    """État dont la dernière attestation porte une signature altérée."""
    last = state.last_entry
    attestation = replace(last.attestation, signature=flip_bit(last.attestation.signature))
    return replace(state, entries=state.entries[:-1] + (replace(last, attestation=attestation),))


def merkle_root(hash_fn, leaves):
    """Racine de Merkle calculée niveau par niveau (nœud impair promu)."""
    level = [hash_bytes(hash_fn, leaf) for leaf in leaves]
    while len(level) > 1:
        level = [hash_bytes(hash_fn, concat(level[i], level[i + 1])) if i + 1 < len(level) else level[i]
                 for i in range(0, len(level), 2)]
    return level[0]


def seeded_world(seed: int, count: int = 5):
    """Documents et fournisseurs propres à une graine (PKI neuve)."""
    pki = FixturePki(seed, START)
    inv = default_lenstra_inventory()
    docs = DocumentGenerator(pki, seed, inv, min_size=64, max_size=256).generate(count, START)
    return docs, TimestampAuthority(pki), NotarialAuthority(pki, inv)


def random_proof(rng, docs, tsa, na, kind=None):
    """
    Preuve construite selon un calendrier aléatoire valide.

    Structure, nombre de documents, dates de renouvellement, ajouts et
    passage éventuel à SHA-384 sont tirés de ``rng``.

    Returns:
        Tuple[ProofState, list, list]: État final, documents protégés et
        étapes ``(date, état, documents)`` successives
    """
    kind = kind or rng.choice(list(StructureKind))
    attester = na if kind is StructureKind.NAW else tsa
    count = 1 if kind.protects_single_document else rng.randint(1, 3)
    protected = list(docs[:count])
    t = START.plus_seconds(days(rng.randint(0, 30)))
    h = HashFunctionId.SHA256
    state = protect(kind, protected, t, h, attester)
    steps = [(t, state, list(protected))]
    for _ in range(rng.randint(0, 3)):
        t = t.plus_seconds(days(rng.randint(10, 200)))
        if h is HashFunctionId.SHA256 and rng.random() < 0.3:
            h = HashFunctionId.SHA384
        if kind.appends_documents and len(protected) < len(docs) and rng.random() < 0.5:
            state = add_document(state, docs[len(protected)], t, attester, docs=protected, hash_fn=h)
            protected.append(docs[len(protected)])
        else:
            state = renew(state, protected, t, attester, hash_fn=h)
        steps.append((t, state, list(protected)))
    return state, protected, steps
