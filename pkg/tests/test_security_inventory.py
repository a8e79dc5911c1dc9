import pytest

from conftest import START
from core.crypto_core import hash_bytes
from core.security_inventory import (
    HORIZON_SENTINEL, SHA256_SECURE_UNTIL, Primitive, default_lenstra_inventory, select_hash,
    update_entry, validity_estimate,
)
from data_io.inventory_file import format_inventory, load_inventory, parse_inventory, save_inventory
from models.attestation import AttestRequest, IssuerKind
from models.errors import LifetimeExtension, RecordFormatError, UnknownPrimitive
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import DAY, TimeInstant


def test_default_inventory_dates(inventory):
    assert inventory.secure_until(HashFunctionId.SHA256) == TimeInstant.from_date(2038)
    assert inventory.secure_until(HashFunctionId.SHA384) == TimeInstant.from_date(2084)
    assert inventory.secure_until(HashFunctionId.SHA512) == HORIZON_SENTINEL
    assert inventory.secure_until("SIM-RSA") == HORIZON_SENTINEL
    assert inventory.secure_until(SignatureParams(4096)) == TimeInstant.from_date(2084)


def test_secure_at_is_half_open(inventory):
    assert inventory.secure_at(HashFunctionId.SHA256, SHA256_SECURE_UNTIL.plus_seconds(-1))
    assert not inventory.secure_at(HashFunctionId.SHA256, SHA256_SECURE_UNTIL)
    assert not inventory.secure_at("SHA-256", TimeInstant.from_date(2040))


def test_unknown_primitive(inventory):
    with pytest.raises(UnknownPrimitive):
        inventory.secure_at("MD5", START)


def test_update_can_only_shorten(inventory):
    earlier = TimeInstant.from_date(2030)
    updated = update_entry(inventory, HashFunctionId.SHA256, earlier, START)
    assert updated.secure_until(HashFunctionId.SHA256) == earlier
    assert updated.entry(HashFunctionId.SHA256).last_updated == START
    # l'inventaire d'origine n'est pas modifié
    assert inventory.secure_until(HashFunctionId.SHA256) == SHA256_SECURE_UNTIL
    with pytest.raises(LifetimeExtension):
        update_entry(updated, HashFunctionId.SHA256, SHA256_SECURE_UNTIL, START)


def test_validity_estimate_is_earliest_date(pki, tsa, inventory):
    request = AttestRequest(hash_bytes(HashFunctionId.SHA256, b"x"), HashFunctionId.SHA256, START)
    attestation = tsa.attest(request, START)
    leaf = pki.find_certificate(attestation.issuer_cert)
    assert attestation.issuer_kind == IssuerKind.TSA
    # certificat de 2 ans, bien avant la fin de SHA-256
    assert validity_estimate(inventory, attestation, leaf) == leaf.not_after

    weakened = update_entry(inventory, Primitive.for_scheme(), START.plus_seconds(100 * DAY), START)
    assert validity_estimate(weakened, attestation, leaf) == START.plus_seconds(100 * DAY)


def test_select_hash_keeps_current_until_threshold(inventory):
    threshold = 30 * DAY
    assert select_hash(inventory, None, START, threshold) == HashFunctionId.SHA256
    assert select_hash(inventory, HashFunctionId.SHA256, TimeInstant.from_date(2037), threshold) \
        == HashFunctionId.SHA256
    late = SHA256_SECURE_UNTIL.plus_seconds(-10 * DAY)
    assert select_hash(inventory, HashFunctionId.SHA256, late, threshold) == HashFunctionId.SHA384
    assert select_hash(inventory, HashFunctionId.SHA384, TimeInstant.from_date(2084).plus_seconds(-DAY),
                       threshold) == HashFunctionId.SHA512


def test_select_hash_without_candidate(inventory):
    with pytest.raises(UnknownPrimitive):
        select_hash(inventory, HashFunctionId.SHA512, HORIZON_SENTINEL, 0)


def test_inventory_file_round_trip(tmp_path, inventory):
    weakened = update_entry(inventory, HashFunctionId.SHA384, TimeInstant.from_date(2070), START)
    path = save_inventory(weakened, str(tmp_path / "inventory.tsv"))
    assert load_inventory(path) == weakened
    assert format_inventory(load_inventory(path)) == format_inventory(weakened)


def test_inventory_file_errors(inventory):
    text = format_inventory(inventory)
    with pytest.raises(RecordFormatError) as exc:
        parse_inventory(text + "SHA-256\t2038-01-01\n")
    assert exc.value.position == f"ligne {len(text.splitlines()) + 1}"

    incomplete = "\n".join(line for line in text.splitlines() if not line.startswith("SHA-512"))
    with pytest.raises(UnknownPrimitive):
        parse_inventory(incomplete)


def test_default_inventory_is_stable():
    assert default_lenstra_inventory() == default_lenstra_inventory()
