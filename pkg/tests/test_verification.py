from dataclasses import fields, is_dataclass, replace
from enum import Enum

import pytest

from conftest import START, corrupt_last_signature, days, flip_bit
from core.notarial_wrapper import naw_init, naw_renew
from core.renewal import protect
from core.structures import (
    as_init, as_renew, mds_add_renew, mds_hash_renew, mds_init, mds_renew, mts_init, mts_renew, sls_add_renew,
    sls_hash_renew, sls_init, sls_renew,
)
from core.verification import proof_validity, sls_verify, verify_proof, walk
from models.evidence import StructureKind
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import TimeInstant
from models.verdict import DiagnosticCategory

SHA256 = HashFunctionId.SHA256
SHA384 = HashFunctionId.SHA384


def _replace_entry(state, index, **changes):
    entries = list(state.entries)
    entries[index] = replace(entries[index], **changes)
    return replace(state, entries=tuple(entries))


@pytest.fixture
def renewed_as(doc, tsa):
    state = as_init(doc, START, SHA256, tsa)
    return as_renew(state, doc, START.plus_seconds(days(300)), SHA256, tsa)


@pytest.fixture
def grown(generator, tsa):
    """32 documents ajoutés tous les 10 jours à une SLS et à une MDS."""
    docs = generator.generate(32, START)
    states = {}
    for kind, init, add in ((StructureKind.SLS, sls_init, sls_add_renew),
                            (StructureKind.MDS, mds_init, mds_add_renew)):
        state = init(docs[0], START, SHA256, tsa)
        for index, doc in enumerate(docs[1:], start=1):
            state = add(state, doc, START.plus_seconds(days(10 * index)), SHA256, tsa)
        states[kind] = state
    return docs, states


def test_intact_proof_is_valid(renewed_as, doc):
    verdict = verify_proof(renewed_as, [doc])
    assert verdict.valid
    assert verdict.touched == [0, 1]


def test_modified_document(renewed_as, doc):
    forged = replace(doc, document=flip_bit(doc.document, 5, 3))
    verdict = verify_proof(renewed_as, [forged])
    assert not verdict.valid
    assert DiagnosticCategory.DIGEST_MISMATCH in verdict.categories


def test_missing_document(renewed_as):
    verdict = verify_proof(renewed_as, [])
    assert not verdict.valid
    assert DiagnosticCategory.MISSING_DOCUMENT in verdict.categories


def test_modified_attestation_signature(renewed_as, doc):
    verdict = verify_proof(corrupt_last_signature(renewed_as), [doc])
    assert not verdict.valid
    assert DiagnosticCategory.SIGNATURE_INVALID in verdict.categories


def test_modified_verification_data(renewed_as, doc):
    vd = renewed_as.entries[1].verification_data
    crl = vd.crls[0]
    forged = replace(vd, crls=(replace(crl, signature=flip_bit(crl.signature)),) + vd.crls[1:])
    verdict = verify_proof(_replace_entry(renewed_as, 1, verification_data=forged), [doc])
    assert not verdict.valid
    assert DiagnosticCategory.CHAIN_INVALID in verdict.categories


def test_trusted_roots(renewed_as, doc, pki):
    assert verify_proof(renewed_as, [doc], trusted_roots=[pki.root.certificate]).valid
    verdict = verify_proof(renewed_as, [doc], trusted_roots=[pki.intermediate.certificate])
    assert DiagnosticCategory.CHAIN_INVALID in verdict.categories


def test_modified_path_sibling(docs, tsa):
    state = protect(StructureKind.MTS, docs[:4], START, SHA256, tsa)
    item = state.items[0]
    path = item.path_in(0)
    digest, side = path.siblings[0]
    forged_path = replace(path, siblings=((flip_bit(digest), side),) + path.siblings[1:])
    items = (replace(item, paths=((0, forged_path),)),) + state.items[1:]
    verdict = verify_proof(replace(state, items=items), docs[:4], documents=[docs[0].name])
    assert not verdict.valid
    # les autres documents ne passent pas par ce chemin
    assert verify_proof(replace(state, items=items), docs[:4], documents=[docs[1].name]).valid


def test_modified_sls_link(grown):
    docs, states = grown
    state = states[StructureKind.SLS]
    entry = state.entries[16]
    forged = _replace_entry(state, 16, links=entry.links[:-1] + (flip_bit(entry.links[-1]),))
    verdict = sls_verify(forged, docs[0])
    assert not verdict.valid
    assert DiagnosticCategory.DIGEST_MISMATCH in verdict.categories


def test_skip_list_touches_few_elements(grown):
    docs, states = grown
    sls = sls_verify(states[StructureKind.SLS], docs[0])
    mds = verify_proof(states[StructureKind.MDS], docs, documents=[docs[0].name])
    assert sls.valid and mds.valid
    assert sls.touched == [0, 16, 24, 28, 30, 31]
    assert len(sls.touched) <= 12
    assert len(mds.touched) == 32


def test_skip_list_without_jumps(grown):
    docs, states = grown
    verdict = sls_verify(states[StructureKind.SLS], docs[0], skip=False)
    assert verdict.valid
    assert len(verdict.touched) == 32


def test_walk_from_later_document(grown, inventory):
    _, states = grown
    state = states[StructureKind.SLS]
    visited = walk(state, 5, inventory)
    assert visited[0] == 5 and visited[-1] == 31
    # 5 -> 6 -> 8 -> 16 -> 24 -> 28 -> 30 -> 31
    assert visited == [5, 6, 8, 16, 24, 28, 30, 31]


def test_expired_proof(renewed_as, doc, inventory):
    late = proof_validity(renewed_as, inventory)
    verdict = verify_proof(renewed_as, [doc], inventory, at=late)
    assert not verdict.valid
    assert DiagnosticCategory.EXPIRED in verdict.categories

def test_moved_path_index(docs, tsa):
    state = protect(StructureKind.MTS, docs[:4], START, SHA256, tsa)
    item = state.items[1]
    moved = replace(item.path_in(0), leaf_index=0)
    items = (state.items[0], replace(item, paths=((0, moved),))) + state.items[2:]
    verdict = verify_proof(replace(state, items=items), docs[:4], documents=[docs[1].name])
    assert not verdict.valid
    assert DiagnosticCategory.PATH_MISMATCH in verdict.categories


def test_last_collection_time_is_bound(renewed_as, doc):
    vd = renewed_as.last_entry.verification_data
    shifted = replace(vd, collected_at=TimeInstant(vd.collected_at.seconds ^ 1))
    verdict = verify_proof(_replace_entry(renewed_as, 1, verification_data=shifted), [doc])
    assert not verdict.valid
    assert DiagnosticCategory.CHAIN_INVALID in verdict.categories


def test_data_collected_after_verification(renewed_as, doc):
    verdict = verify_proof(renewed_as, [doc], at=START.plus_seconds(days(10)))
    assert DiagnosticCategory.CHAIN_INVALID in verdict.categories


def test_item_bound_to_its_entry(grown):
    docs, states = grown
    state = states[StructureKind.MDS]
    items = (state.items[0], replace(state.items[1], entry=0)) + state.items[2:]
    verdict = verify_proof(replace(state, items=items), docs, documents=[docs[1].name])
    assert DiagnosticCategory.PATH_MISMATCH in verdict.categories


# --- altération de chaque champ d'une preuve -------------------------------

@pytest.fixture
def proofs(docs, tsa, na):
    """Une preuve par structure, chacune avec un renouvellement du hachage."""
    t1, t2, t3 = (START.plus_seconds(days(n)) for n in (100, 150, 300))
    mds = mds_add_renew(mds_init(docs[0], START, SHA256, tsa), docs[1], t1, SHA256, tsa)
    sls = sls_add_renew(sls_init(docs[0], START, SHA256, tsa), docs[1], t1, SHA256, tsa)
    return {
        StructureKind.AS: (as_renew(as_init(docs[0], START, SHA256, tsa), docs[0], t3, SHA384, tsa), docs[:1]),
        StructureKind.MTS: (mts_renew(mts_init(docs[:3], START, SHA256, tsa), docs[:3], t3, SHA384, tsa),
                            docs[:3]),
        StructureKind.MDS: (mds_hash_renew(mds_renew(mds, docs[:2], t2, SHA256, tsa), docs[:2], t3, SHA384, tsa),
                            docs[:2]),
        StructureKind.SLS: (sls_hash_renew(sls_renew(sls, docs[:2], t2, SHA256, tsa), docs[:2], t3, SHA384, tsa),
                            docs[:2]),
        StructureKind.NAW: (naw_renew(naw_init(docs[0], START, SHA256, na), docs[0], t3, SHA384, na), docs[:1]),
    }


def _flipped_fields(value, path=()):
    """Chemin de chaque valeur élémentaire d'un état et sa copie altérée d'un bit."""
    if value is None or isinstance(value, (Enum, bool, str, frozenset, SignatureParams)):
        return
    if isinstance(value, TimeInstant):
        yield path, TimeInstant(value.seconds ^ 1)
    elif isinstance(value, int):
        yield path, value ^ 1
    elif isinstance(value, bytes):
        if value:
            yield path, flip_bit(value, 0, 0)
            yield path, flip_bit(value, len(value) - 1, 7)
    elif isinstance(value, tuple):
        for index, item in enumerate(value):
            yield from _flipped_fields(item, path + (index,))
    elif is_dataclass(value):
        for f in fields(value):
            yield from _flipped_fields(getattr(value, f.name), path + (f.name,))


def _with_value(value, path, new):
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(value, tuple):
        return value[:head] + (_with_value(value[head], rest, new),) + value[head + 1:]
    return replace(value, **{head: _with_value(getattr(value, head), rest, new)})


@pytest.mark.parametrize("kind", list(StructureKind), ids=str)
def test_every_flipped_field_is_detected(proofs, kind):
    state, provided = proofs[kind]
    assert verify_proof(state, provided).valid
    flips = list(_flipped_fields(state))
    assert len(flips) > 50
    undetected = [path for path, value in flips
                  if verify_proof(_with_value(state, path, value), provided).valid]
    assert undetected == []


def test_tree_audit(proofs):
    state, provided = proofs[StructureKind.MDS]
    # élément sans document: son chemin ne sert à aucun document
    path = state.entries[2].path_in(0)
    digest, side = path.siblings[0]
    forged = replace(path, siblings=((flip_bit(digest), side),) + path.siblings[1:])
    tampered = _replace_entry(state, 2, paths=((0, forged),))
    assert verify_proof(tampered, provided, documents=[provided[0].name]).valid
    verdict = verify_proof(tampered, provided)
    assert not verdict.valid
    assert DiagnosticCategory.PATH_MISMATCH in verdict.categories
    misplaced = replace(state, trees=(replace(state.trees[0], entry=2),))
    assert DiagnosticCategory.PATH_MISMATCH in verify_proof(misplaced, provided).categories
