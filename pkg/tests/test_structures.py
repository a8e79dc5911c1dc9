"""
Octets attestés par chaque structure, recalculés indépendamment à partir
des documents et des attestations enregistrées.
"""

import pytest

from conftest import START, days, merkle_root
from core.crypto_core import hash_bytes
from core.renewal import add_document, protect, renew
from core.structures import (
    as_init, as_renew, mds_add_renew, mds_hash_renew, mds_init, mts_init, mts_renew, sls_add_renew,
    sls_init,
)
from core.notarial_wrapper import naw_init, naw_renew
from core.verification import verify_proof
from models.encoding import concat, concat_all
from models.errors import EmptyLeafList, RenewalWindowMissed
from models.evidence import EntryKind, StructureKind
from models.primitives import HashFunctionId
from models.time_instant import YEAR

SHA256 = HashFunctionId.SHA256
SHA384 = HashFunctionId.SHA384
SHA512 = HashFunctionId.SHA512

T1 = START.plus_seconds(days(200))
T2 = START.plus_seconds(days(400))
T3 = START.plus_seconds(days(600))


def pair(entry):
    return concat(entry.attestation.encode(), entry.verification_data.encode())


def attested(entry, payload):
    assert entry.attestation.hash_fn == entry.hash_fn
    assert entry.attestation.attested_digest == hash_bytes(entry.hash_fn, payload)


def test_as_listing(doc, tsa):
    state = as_init(doc, START, SHA256, tsa)
    state = as_renew(state, doc, T1, SHA256, tsa)
    state = as_renew(state, doc, T2, SHA384, tsa)
    e0, e1, e2 = state.entries

    assert [e.kind for e in state.entries] == [EntryKind.INIT, EntryKind.RENEWAL, EntryKind.HASH_RENEWAL]
    attested(e0, concat(SHA256.encode(), hash_bytes(SHA256, doc.encode())))
    attested(e1, concat(SHA256.encode(), hash_bytes(SHA256, pair(e0))))
    chain = concat(doc.encode()) + pair(e0) + pair(e1)
    attested(e2, concat(SHA384.encode(), hash_bytes(SHA384, chain)))
    assert state.hash_history == (SHA256, SHA384)
    assert verify_proof(state, [doc]).valid


def test_mts_listing(docs, tsa):
    state = mts_init(docs[:5], START, SHA256, tsa)
    r0 = merkle_root(SHA256, [d.encode() for d in docs[:5]])
    assert state.trees[0].root == r0
    attested(state.entries[0], concat(SHA256.encode(), r0))

    state = mts_renew(state, docs[:5], T1, SHA384, tsa)
    leaves = [concat_all([d.encode(), item.path_in(0).encode()]) for d, item in zip(docs[:5], state.items)]
    r1 = merkle_root(SHA384, leaves)
    assert state.trees[1].root == r1
    attested(state.entries[1], concat(SHA384.encode(), r1, hash_bytes(SHA384, pair(state.entries[0]))))
    assert verify_proof(state, docs[:5]).valid


def test_mts_paths_per_hash_renewal(docs, tsa):
    state = mts_init(docs[:3], START, SHA256, tsa)
    state = mts_renew(state, docs[:3], T1, SHA384, tsa)
    state = mts_renew(state, docs[:3], T2, SHA512, tsa)
    assert len(state.trees) == 3
    assert all(len(item.paths) == 3 for item in state.items)
    assert verify_proof(state, docs[:3]).valid


def test_mds_listing(docs, tsa):
    d0, d1, d2 = docs[:3]
    state = mds_init(d0, START, SHA256, tsa)
    state = mds_add_renew(state, d1, T1, SHA256, tsa)
    state = mds_add_renew(state, d2, T2, SHA384, tsa, docs=[d0, d1])
    e0, e1, e2 = state.entries

    attested(e0, concat(SHA256.encode(), hash_bytes(SHA256, d0.encode())))
    inner = concat(hash_bytes(SHA256, d1.encode()), e0.attestation.encode(), e0.verification_data.encode())
    attested(e1, concat(SHA256.encode(), hash_bytes(SHA256, inner)))

    leaves = [concat(d.encode(), e.attestation.encode(), e.verification_data.encode(), b"")
              for d, e in ((d0, e0), (d1, e1))]
    root = merkle_root(SHA384, leaves)
    assert e2.kind is EntryKind.ADD_HASH_RENEWAL
    attested(e2, concat(SHA384.encode(), root, hash_bytes(SHA384, d2.encode())))
    assert verify_proof(state, [d0, d1, d2]).valid


def test_mds_hash_renewal_without_document(docs, tsa):
    d0, d1 = docs[:2]
    state = mds_init(d0, START, SHA256, tsa)
    state = mds_add_renew(state, d1, T1, SHA256, tsa)
    state = mds_hash_renew(state, [d0, d1], T2, SHA384, tsa)
    assert state.last_entry.kind is EntryKind.HASH_RENEWAL
    assert state.document_element_count == 2
    assert verify_proof(state, [d0, d1]).valid


def test_sls_listing(docs, tsa):
    d = docs[:4]
    state = sls_init(d[0], START, SHA256, tsa)
    for index, (moment, doc) in enumerate(zip((T1, T2, T3), d[1:]), start=1):
        state = sls_add_renew(state, doc, moment, SHA256, tsa, docs=d[:index])
    e = state.entries

    def link(j):
        return hash_bytes(SHA256, pair(e[j]))

    assert e[1].links == (link(0),)
    assert e[2].links == (link(1), link(0))
    assert e[3].links == (link(2),)
    element = hash_bytes(SHA256, concat(hash_bytes(SHA256, d[2].encode()), link(1), link(0)))
    attested(e[2], concat(SHA256.encode(), element))
    assert verify_proof(state, d).valid


def test_naw_listing(doc, na):
    state = naw_init(doc, START, SHA256, na)
    c = doc.signature.signer_cert
    attested(state.entries[0], concat(SHA256.encode(), hash_bytes(SHA256, doc.encode()), c.encode()))
    assert state.entries[0].attestation.stated_time == START

    state = naw_renew(state, doc, T1, SHA384, na)
    assert len(state.entries) == 1
    payload = concat(SHA256.encode(), hash_bytes(SHA256, doc.encode()),
                     SHA384.encode(), hash_bytes(SHA384, doc.encode()), c.encode())
    attested(state.entries[0], payload)
    # la date initiale est conservée
    assert state.entries[0].attestation.stated_time == START
    assert verify_proof(state, [doc]).valid


def test_renewal_window_missed(doc, tsa):
    state = as_init(doc, START, SHA256, tsa)
    with pytest.raises(RenewalWindowMissed):
        as_renew(state, doc, START.plus_seconds(3 * YEAR), SHA256, tsa)


def test_hash_cannot_get_weaker(doc, tsa):
    state = as_init(doc, START, SHA384, tsa)
    with pytest.raises(ValueError):
        as_renew(state, doc, T1, SHA256, tsa)


def test_add_document_only_for_sequences_of_documents(docs, tsa):
    state = as_init(docs[0], START, SHA256, tsa)
    with pytest.raises(ValueError):
        add_document(state, docs[1], T1, tsa)
    with pytest.raises(ValueError):
        mds_add_renew(state, docs[1], T1, SHA256, tsa)


def test_protect_dispatch(docs, tsa, na):
    for kind in (StructureKind.AS, StructureKind.MTS, StructureKind.MDS, StructureKind.SLS):
        state = protect(kind, docs[:3], START, SHA256, tsa)
        assert state.kind is kind
        assert set(state.document_names) == {d.name for d in docs[:3]}
        assert verify_proof(state, docs[:3]).valid
    naw = protect(StructureKind.NAW, docs[:3], START, SHA256, na, name="lot")
    assert naw.items[0].batch
    assert verify_proof(naw, docs[:3]).valid
    with pytest.raises(EmptyLeafList):
        protect(StructureKind.MDS, [], START, SHA256, tsa)


def test_renew_picks_hash_from_inventory(doc, tsa, inventory):
    state = as_init(doc, START, SHA256, tsa)
    assert renew(state, doc, T1, tsa, inventory).current_hash == SHA256
