import json
from dataclasses import replace

import pytest

from data_io.container import read_container, write_container
from data_io.protection_registry import ProtectionRegistry
from main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from models.evidence import StructureKind


@pytest.fixture
def signed(tmp_path):
    """Deux fichiers signés le 1er janvier 2016, un conteneur chacun."""
    paths = []
    for name, content in (("contrat.txt", b"contrat de bail"), ("facture.txt", b"facture 2016-001")):
        path = tmp_path / name
        path.write_bytes(content)
        paths.append(str(path))
    out = tmp_path / "signes"
    assert main(["sign", *paths, "--out", str(out), "--clock", "2016-01-01"]) == EXIT_OK
    return [str(out / "contrat.txt.mops.zip"), str(out / "facture.txt.mops.zip")]


def _protect(tmp_path, containers, *options):
    output = str(tmp_path / "dossier.mops.zip")
    code = main(["protect", *containers, "--name", "dossier", "--out", output,
                 "--clock", "2016-01-02", *options])
    return code, output


def test_sign_creates_containers(signed):
    container = read_container(signed[0])
    assert [doc.name for doc in container.documents] == ["contrat.txt"]
    assert not container.records


def test_protect_and_verify(tmp_path, signed):
    code, output = _protect(tmp_path, signed, "--structure", "MTS")
    assert code == EXIT_OK
    record = read_container(output).records[0]
    assert record.kind is StructureKind.MTS
    assert main(["verify", output, "--clock", "2016-06-01"]) == EXIT_OK
    assert main(["verify", output, "--document", "facture.txt", "--clock", "2016-06-01"]) == EXIT_OK


def test_verify_reports_modified_document(tmp_path, signed):
    _, output = _protect(tmp_path, signed, "--scheme", "ERS")
    container = read_container(output)
    forged = replace(container.documents[0], document=b"contrat falsifie")
    tampered = str(tmp_path / "falsifie.mops.zip")
    write_container(tampered, [forged, *container.documents[1:]], container.records)
    assert main(["verify", tampered, "--clock", "2016-06-01"]) == EXIT_FAILED


def test_verify_writes_verdicts(tmp_path, signed):
    _, output = _protect(tmp_path, signed, "--structure", "SLS")
    out = tmp_path / "verdicts"
    assert main(["verify", output, "--out", str(out), "--clock", "2016-06-01"]) == EXIT_OK
    with open(out / "verdict_dossier.json", encoding="utf-8") as f:
        assert json.load(f)["valid"] is True


def test_add_then_renew(tmp_path, signed):
    _, output = _protect(tmp_path, signed[:1], "--structure", "MDS")
    assert main(["add", output, signed[1], "--clock", "2016-03-01"]) == EXIT_OK
    assert main(["renew", output, "--force", "--clock", "2016-09-01"]) == EXIT_OK
    record = read_container(output).records[0]
    assert set(record.state.document_names) == {"contrat.txt", "facture.txt"}
    assert len(record.state.entries) == 3
    assert main(["verify", output, "--clock", "2016-10-01"]) == EXIT_OK


def test_migrate_to_notary(tmp_path, signed):
    _, output = _protect(tmp_path, signed, "--structure", "MDS")
    assert main(["migrate", output, "--structure", "NAW", "--clock", "2016-05-01"]) == EXIT_OK
    records = read_container(output).records
    assert [r.kind for r in records] == [StructureKind.NAW, StructureKind.NAW]
    assert main(["verify", output, "--clock", "2016-06-01"]) == EXIT_OK


def test_naw_with_tsa_is_a_usage_error(tmp_path, signed):
    code, _ = _protect(tmp_path, signed[:1], "--structure", "NAW", "--attester", "TSA")
    assert code == EXIT_USAGE


def test_unreadable_container(tmp_path):
    path = tmp_path / "vide.mops.zip"
    path.write_bytes(b"pas une archive")
    assert main(["verify", str(path)]) == EXIT_FAILED


def test_protection_system(tmp_path, signed):
    state_dir = str(tmp_path / "etat")
    assert main(["scheme", "create", "courrier", "--retrieval", "single", "--storage", "sequential-folders",
                 "--trust", "minimal-trust", "--state-dir", state_dir]) == EXIT_OK
    assert main(["import", signed[0], "--scheme", "courrier", "--name", "courrier-2016",
                 "--state-dir", state_dir, "--clock", "2016-02-01"]) == EXIT_OK
    exported = str(tmp_path / "export.mops.zip")
    assert main(["export", "courrier-2016", "--out", exported, "--state-dir", state_dir]) == EXIT_OK
    assert read_container(exported).records[0].kind is StructureKind.SLS
    assert ProtectionRegistry.in_directory(state_dir).folder("courrier-2016").scheme == "courrier"
    assert main(["scheme", "delete", "courrier", "--state-dir", state_dir]) == EXIT_USAGE


def test_inventory_file(tmp_path):
    path = str(tmp_path / "inventaire.tsv")
    assert main(["inventory", "--out", path]) == EXIT_OK
    assert main(["inventory", "--inventory", path]) == EXIT_OK


def test_import_with_known_scheme(tmp_path, signed):
    state_dir = str(tmp_path / "etat")
    for scheme in ("cis", "CIS"):
        assert main(["import", signed[1], "--scheme", scheme, "--name", f"factures-{scheme}",
                     "--state-dir", state_dir, "--clock", "2016-02-01"]) == EXIT_OK
    registry = ProtectionRegistry.in_directory(state_dir)
    assert registry.list_schemes() == ["CIS"]
    assert registry.folder("factures-cis").scheme == "CIS"
