import pytest

from conftest import START, corrupt_last_signature, days
from core.attestation import notarial_payload
from core.crypto_core import hash_bytes
from core.notarial_wrapper import naw_init, naw_init_batch, naw_renew
from core.verification import verify_proof
from models.attestation import AttestRequest, NaExtras
from models.errors import (
    CertificateInvalid, HashInsecure, IncompatibleAttester, NotaryAbort, OldHashInsecure,
    PriorAttestationInvalid,
)
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant, YEAR

SHA256 = HashFunctionId.SHA256
SHA384 = HashFunctionId.SHA384
T1 = START.plus_seconds(days(200))


def _history(doc, *hashes):
    return tuple((h, hash_bytes(h, doc.encode())) for h in hashes)


def test_expired_signer_certificate(doc, na):
    # le certificat du signataire (2 ans) a expiré à t_0
    with pytest.raises(CertificateInvalid):
        naw_init(doc, START.plus_seconds(3 * YEAR), SHA256, na)


def test_revoked_signer_certificate(doc, na, pki):
    pki.revoke(doc.signature.signer_cert, START.plus_seconds(days(10)))
    with pytest.raises(CertificateInvalid):
        naw_init(doc, START.plus_seconds(days(20)), SHA256, na)


def test_insecure_hash(generator, na):
    late = TimeInstant.from_date(2040)
    doc = generator.document("tardif.pdf", late)
    with pytest.raises(HashInsecure):
        naw_init(doc, late, SHA256, na)
    assert verify_proof(naw_init(doc, late, SHA384, na), [doc]).valid


def test_old_hash_insecure(generator, na):
    t0 = TimeInstant.from_date(2037)
    doc = generator.document("ancien.pdf", t0)
    state = naw_init(doc, t0, SHA256, na)
    prior = state.last_entry.attestation
    clock = TimeInstant.from_date(2038).plus_seconds(days(30))
    history = _history(doc, SHA256, SHA384)
    extras = NaExtras(doc.signature.signer_cert, history, original_time=t0, prior_attestation=prior,
                      prior_verification_data=na.verification_data(prior, clock))
    digest = hash_bytes(SHA384, notarial_payload(history, doc.signature.signer_cert))
    with pytest.raises(OldHashInsecure):
        na.attest(AttestRequest(digest, SHA384, clock, extras), clock)


def test_prior_attestation_invalid(doc, na):
    state = naw_init(doc, START, SHA256, na)
    with pytest.raises(PriorAttestationInvalid):
        naw_renew(corrupt_last_signature(state), doc, T1, SHA256, na)


def test_request_must_match_history(doc, na):
    history = _history(doc, SHA256)
    extras = NaExtras(doc.signature.signer_cert, history)
    with pytest.raises(NotaryAbort):
        na.attest(AttestRequest(hash_bytes(SHA256, b"autre chose"), SHA256, START, extras), START)
    with pytest.raises(NotaryAbort):
        naw_init(doc, START, SHA256, na, original_time=T1)


def test_naw_requires_notary(doc, tsa):
    with pytest.raises(IncompatibleAttester):
        naw_init(doc, START, SHA256, tsa)


def test_plain_request_checks_hash(na):
    late = TimeInstant.from_date(2040)
    with pytest.raises(HashInsecure):
        na.attest(AttestRequest(hash_bytes(SHA256, b"racine"), SHA256, late), late)
    attestation = na.attest(AttestRequest(hash_bytes(SHA384, b"racine"), SHA384, late), late)
    assert attestation.stated_time == late


def test_renewals_keep_one_attestation(doc, na):
    state = naw_init(doc, START, SHA256, na)
    for step in range(1, 4):
        state = naw_renew(state, doc, START.plus_seconds(days(200 * step)), SHA256, na)
        assert len(state.entries) == 1
    state = naw_renew(state, doc, START.plus_seconds(days(700)), SHA384, na)
    assert state.hash_history == (SHA256, SHA384)
    assert state.entries[0].attestation.stated_time == START
    assert verify_proof(state, [doc]).valid


def test_batch_naw(docs, na):
    state = naw_init_batch("lot", docs[:4], START, SHA256, na)
    assert state.notarial.certificate == docs[0].signature.signer_cert
    for doc in docs[:4]:
        assert verify_proof(state, docs[:4], documents=[doc.name]).valid
