import hashlib

import pytest

from conftest import START, days, flip_bit
from core.crypto_core import (
    FixturePki, chain_valid, encode_certificate, encode_crl, hash_bytes, keygen, sign, sign_document,
    verify, verify_document,
)
from models.encoding import concat
from models.errors import MissingCrl, PairingViolation, UnknownSerial, UnsupportedKeyLength
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import YEAR


SHA256_EMPTY = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
SHA384_ABC = ("cb00753f45a35e8bb5a03d699ac65007272c32ab0eded1631a8b605a43ff5bed"
              "8086072ba1e7cc2358baeca134c825a7")


def test_hash_known_vectors():
    assert hash_bytes(HashFunctionId.SHA256, b"").hex() == SHA256_EMPTY
    assert hash_bytes(HashFunctionId.SHA384, b"abc").hex() == SHA384_ABC


@pytest.mark.parametrize("hash_fn,size", [
    (HashFunctionId.SHA256, 32), (HashFunctionId.SHA384, 48), (HashFunctionId.SHA512, 64),
])
def test_hash_digest_sizes(hash_fn, size):
    digest = hash_bytes(hash_fn, b"mops")
    assert len(digest) == size == hash_fn.digest_size
    assert digest == hashlib.new(hash_fn.hashlib_name, b"mops").digest()


def test_keygen_is_deterministic_per_seed_and_length():
    params = SignatureParams(2048)
    assert keygen(params, 5).public_key == keygen(params, 5).public_key
    assert keygen(params, 5).public_key != keygen(params, 6).public_key
    assert keygen(params, 5).public_key != keygen(SignatureParams(4096), 5).public_key


def test_unsupported_key_length():
    with pytest.raises(UnsupportedKeyLength):
        SignatureParams(1024)


def test_sign_and_verify():
    keys = keygen(SignatureParams(4096), 1)
    signature = sign(keys, HashFunctionId.SHA384, b"message")
    assert verify(keys.public_key, HashFunctionId.SHA384, b"message", signature)
    assert not verify(keys.public_key, HashFunctionId.SHA384, b"messagf", signature)
    assert not verify(keys.public_key, HashFunctionId.SHA384, b"message", flip_bit(signature))


def test_sign_rejects_unpaired_hash():
    keys = keygen(SignatureParams(2048), 1)
    with pytest.raises(PairingViolation):
        sign(keys, HashFunctionId.SHA512, b"message")


def test_leaf_chain_and_validity(pki):
    leaf = pki.issue_leaf("signataire", HashFunctionId.SHA256, START)
    chain = leaf.certificate.chain()
    assert len(chain) == 3
    assert chain[-1].is_self_signed
    assert leaf.certificate.params == SignatureParams(2048)

    at = START.plus_seconds(days(10))
    assert chain_valid(leaf.certificate, pki.crls_for_chain(leaf.certificate, at), at)
    # [not_before, not_after)
    expiry = leaf.certificate.not_after
    assert expiry == START.plus_seconds(2 * YEAR)
    assert not chain_valid(leaf.certificate, pki.crls_for_chain(leaf.certificate, expiry), expiry)


def test_chain_without_crl_raises(pki):
    leaf = pki.issue_leaf("signataire", HashFunctionId.SHA256, START)
    with pytest.raises(MissingCrl):
        chain_valid(leaf.certificate, [], START)


def test_revocation_applies_from_newest_crl(pki):
    leaf = pki.issue_leaf("signataire", HashFunctionId.SHA256, START)
    before = START.plus_seconds(days(5))
    crls_before = pki.crls_for_chain(leaf.certificate, before)
    revoked_at = START.plus_seconds(days(10))
    pki.revoke(leaf.certificate, revoked_at)
    after = START.plus_seconds(days(20))

    assert chain_valid(leaf.certificate, crls_before, before)
    assert not chain_valid(leaf.certificate, pki.crls_for_chain(leaf.certificate, after), after)


def test_revoke_unknown_serial(pki):
    with pytest.raises(UnknownSerial):
        pki.revoke(999, START)


def test_document_signature(pki):
    leaf = pki.issue_leaf("signataire", HashFunctionId.SHA256, START)
    signature = sign_document(leaf.key_pair, leaf.certificate, HashFunctionId.SHA256, b"contrat", START)
    assert verify_document(b"contrat", signature)
    assert not verify_document(b"contraT", signature)


def test_adopt_reregisters_certificates_of_same_seed(pki):
    leaf = pki.issue_leaf("MoPS TSA", HashFunctionId.SHA256, START)
    fresh = FixturePki(pki.seed, START)

    assert fresh.adopt(leaf.certificate.chain()) == 1
    assert fresh.find_certificate(leaf.certificate.ref) == leaf.certificate
    assert fresh.adopt(leaf.certificate.chain()) == 0
    # le numéro suivant ne réutilise pas celui du certificat repris
    other = fresh.issue_leaf("autre", HashFunctionId.SHA256, START)
    assert other.certificate.serial > leaf.certificate.serial


def test_adopt_ignores_foreign_pki(pki):
    foreign = FixturePki(pki.seed + 1, START)
    leaf = foreign.issue_leaf("MoPS TSA", HashFunctionId.SHA256, START)
    assert pki.adopt(leaf.certificate.chain()) == 0


def test_canonical_encodings(pki):
    leaf = pki.issue_leaf("signataire", HashFunctionId.SHA256, START)
    cert = leaf.certificate
    assert encode_certificate(cert) == concat(cert.tbs_bytes(), cert.issuer_signature)
    other = pki.issue_leaf("signataire", HashFunctionId.SHA256, START).certificate
    assert encode_certificate(other) != encode_certificate(cert)

    crl = pki.revoke(cert, START.plus_seconds(days(1)))
    assert encode_crl(crl) == concat(crl.tbs_bytes(), crl.signature)
    assert crl.lists(cert.serial)
