import pytest

from conftest import START, days
from core.combination import BatchCoordinator, attach_docset, cumulate_attest, cumulate_renew
from core.notarial_wrapper import naw_init
from core.structures import as_init, mds_init, sls_init
from core.verification import verify_proof
from models.errors import IncompatibleAttester, MixedHashFunctions
from models.evidence import StructureKind
from models.primitives import HashFunctionId

SHA256 = HashFunctionId.SHA256
SHA384 = HashFunctionId.SHA384
T1 = START.plus_seconds(days(100))


@pytest.fixture
def coordinator(docs):
    coord = BatchCoordinator(SHA256)
    coord.add(StructureKind.AS, [docs[0]])
    coord.add(StructureKind.MTS, docs[1:4])
    coord.add(StructureKind.MDS, [docs[4]])
    coord.add(StructureKind.NAW, [docs[5]])
    return coord


def _all_valid(coord):
    for member in coord.members:
        verdict = verify_proof(member.state, member.available())
        assert verdict.valid, f"{member.kind}: {verdict.categories}"


def test_cumulation_uses_one_attestation(coordinator, na):
    results = cumulate_attest(coordinator, START, na)
    assert coordinator.issued == 1
    assert len({attestation for attestation, _ in results}) == 1
    assert [path.leaf_index for _, path in results] == [0, 1, 2, 3]
    _all_valid(coordinator)


def test_cumulation_with_naw_requires_notary(coordinator, tsa):
    with pytest.raises(IncompatibleAttester):
        cumulate_attest(coordinator, START, tsa)


def test_cumulation_without_naw_accepts_tsa(docs, tsa):
    coord = BatchCoordinator(SHA256)
    coord.add(StructureKind.AS, [docs[0]])
    coord.add(StructureKind.SLS, [docs[1]])
    cumulate_attest(coord, START, tsa)
    _all_valid(coord)


def test_mixed_hash_functions(docs, tsa):
    coord = BatchCoordinator()
    coord.add(StructureKind.AS, [docs[0]], as_init(docs[0], START, SHA256, tsa))
    coord.add(StructureKind.AS, [docs[1]], as_init(docs[1], START, SHA384, tsa))
    with pytest.raises(MixedHashFunctions):
        cumulate_attest(coord, T1, tsa)


def test_shared_attestation_renewal(docs, tsa):
    coord = BatchCoordinator(SHA256)
    coord.add(StructureKind.AS, [docs[0]])
    coord.add(StructureKind.MTS, docs[1:3])
    cumulate_attest(coord, START, tsa)
    cumulate_renew(coord, T1, SHA256, tsa)
    assert coord.issued == 2
    first, second = coord.states
    assert first.last_entry.attestation == second.last_entry.attestation
    _all_valid(coord)


def test_cumulated_renewal_with_new_document(coordinator, na, docs):
    cumulate_attest(coordinator, START, na)
    coordinator.add_document(2, docs[6])
    cumulate_renew(coordinator, T1, SHA256, na)
    mds = coordinator.members[2]
    assert docs[6].name in mds.state.document_names
    _all_valid(coordinator)
    with pytest.raises(ValueError):
        coordinator.add_document(0, docs[7])


def test_cumulated_hash_renewal(coordinator, na):
    cumulate_attest(coordinator, START, na)
    cumulate_renew(coordinator, T1, SHA384, na)
    assert coordinator.issued == 2
    assert all(state.current_hash == SHA384 for state in coordinator.states)
    _all_valid(coordinator)


@pytest.mark.parametrize("init", [mds_init, sls_init])
def test_attach_batch_to_sequence(init, generator, tsa):
    batch = generator.generate(5, START)
    first = generator.document("premier.pdf", START)
    state = init(first, START, SHA256, tsa)
    attached = attach_docset(state, batch, T1, SHA256, tsa)
    assert len(attached.entries) == len(state.entries) + 1
    assert attached.items[-1].batch
    for doc in batch:
        assert verify_proof(attached, batch, documents=[doc.name]).valid
    assert verify_proof(attached, [first] + batch).valid


def test_attach_batch_with_notary(generator, na, doc):
    batch = generator.generate(5, START)
    state = naw_init(doc, START, SHA256, na)
    attached = attach_docset(state, batch, T1, SHA256, na)
    assert len(attached.entries) == 1
    assert set(attached.document_names) == {d.name for d in batch}
    assert verify_proof(attached, batch).valid


def test_attach_refused_for_as(doc, docs, tsa):
    state = as_init(doc, START, SHA256, tsa)
    with pytest.raises(ValueError):
        attach_docset(state, docs[1:3], T1, SHA256, tsa)
