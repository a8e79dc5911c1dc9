import pytest

from conftest import START, corrupt_last_signature, days
from core.migration import (
    document_first_time, migrate_to_naw, migrate_to_sequence, na_attest_migrate, naw_records,
)
from core.renewal import protect
from core.structures import mds_init
from core.verification import verify_proof
from models.errors import IncompatibleAttester, MigrationRefused
from models.evidence import EvidenceRecord, MigrationMode, StructureKind
from models.primitives import HashFunctionId

SHA256 = HashFunctionId.SHA256
SHA384 = HashFunctionId.SHA384
T1 = START.plus_seconds(days(150))

KINDS = list(StructureKind)


def _source(kind, docs, tsa, na):
    protected = docs[:1] if kind.protects_single_document else docs[:3]
    attester = na if kind is StructureKind.NAW else tsa
    state = protect(kind, protected, START, SHA256, attester)
    return EvidenceRecord(f"source-{kind.value.lower()}", state, START), protected


@pytest.mark.parametrize("target_kind", KINDS, ids=lambda k: k.value)
@pytest.mark.parametrize("source_kind", KINDS, ids=lambda k: k.value)
def test_migration_matrix(source_kind, target_kind, docs, tsa, na):
    source, protected = _source(source_kind, docs, tsa, na)
    if target_kind is StructureKind.NAW:
        states = migrate_to_naw(source, protected, na, T1, SHA384)
        assert len(states) == len(protected)
        for state in states:
            name = state.document_names[0]
            assert state.notarial.original_time == START
            assert verify_proof(state, protected, documents=[name]).valid
        return

    state, receipt = migrate_to_sequence(source, protected, target_kind, T1, SHA384, tsa)
    assert state.kind is target_kind
    assert receipt.source_kind is source_kind
    assert set(state.document_names) == {doc.name for doc in protected}
    expected = MigrationMode.SINGLE if source_kind.protects_single_document else MigrationMode.MULTI
    assert receipt.mode is expected
    verdict = verify_proof(state, protected)
    assert verdict.valid, verdict.categories
    for doc in protected:
        assert document_first_time(state, doc.name) == START


def test_corrupted_source_is_refused(docs, tsa, na):
    source, protected = _source(StructureKind.MDS, docs, tsa, na)
    forged = source.with_state(corrupt_last_signature(source.state))
    with pytest.raises(MigrationRefused):
        migrate_to_sequence(forged, protected, StructureKind.SLS, T1, SHA256, tsa)
    with pytest.raises(MigrationRefused):
        migrate_to_naw(forged, protected, na, T1)


def test_migration_into_existing_mds(docs, tsa, na):
    source, protected = _source(StructureKind.AS, docs, tsa, na)
    target = mds_init(docs[5], START, SHA256, tsa)
    state, _ = migrate_to_sequence(source, protected, StructureKind.MDS, T1, SHA256, tsa,
                                   target=target, target_docs=[docs[5]])
    assert len(state.entries) == 2
    assert len(state.receipts) == 1
    assert verify_proof(state, [docs[5]] + protected).valid


def test_existing_target_must_append(docs, tsa, na):
    source, protected = _source(StructureKind.AS, docs, tsa, na)
    target = protect(StructureKind.AS, [docs[5]], START, SHA256, tsa)
    with pytest.raises(ValueError):
        migrate_to_sequence(source, protected, StructureKind.AS, T1, SHA256, tsa, target=target)


def test_batch_migration_to_naw(docs, tsa, na):
    source, protected = _source(StructureKind.MTS, docs, tsa, na)
    states = migrate_to_naw(source, protected, na, T1, batch=True)
    assert len(states) == 1
    assert verify_proof(states[0], protected).valid
    records = naw_records(source, states, T1)
    assert [r.name for r in records] == [source.name]


def test_naw_records_are_numbered(docs, tsa, na):
    source, protected = _source(StructureKind.SLS, docs, tsa, na)
    states = migrate_to_naw(source, protected, na, T1)
    names = [r.name for r in naw_records(source, states, T1)]
    assert names == [f"{source.name}-000", f"{source.name}-001", f"{source.name}-002"]


def test_naw_migration_requires_notary(docs, tsa, na):
    source, protected = _source(StructureKind.AS, docs, tsa, na)
    with pytest.raises(IncompatibleAttester):
        migrate_to_naw(source, protected, tsa, T1)


def test_missing_documents_refused(docs, tsa, na):
    source, _ = _source(StructureKind.MTS, docs, tsa, na)
    with pytest.raises(MigrationRefused):
        migrate_to_naw(source, [docs[7]], na, T1)


def test_notary_runs_the_migration(docs, tsa, na):
    source, protected = _source(StructureKind.MDS, docs, tsa, na)
    records = na_attest_migrate(na, source, protected, T1, SHA384)
    assert [r.name for r in records] == [f"{source.name}-{i:03d}" for i in range(3)]
    assert all(r.state.notarial.original_time == START for r in records)
    forged = source.with_state(corrupt_last_signature(source.state))
    with pytest.raises(MigrationRefused):
        na_attest_migrate(na, forged, protected, T1)
