import pytest

from conftest import START
from core.scheme import (
    Retrieval, SchemeConfig, Storage, Trust, WizardAnswers, all_answers, expert_preset, wizard_select,
)
from data_io.protection_registry import ProtectionRegistry
from models.attestation import IssuerKind
from models.errors import IncompatibleAttester
from models.evidence import StructureKind
from models.primitives import HashFunctionId

# (accès, stockage) -> structure, la structure "isolée" dépendant de la confiance
EXPECTED = {
    (Retrieval.SINGLE, Storage.FEW): None,
    (Retrieval.SINGLE, Storage.SETS): StructureKind.MTS,
    (Retrieval.SINGLE, Storage.SEQUENTIAL): StructureKind.SLS,
    (Retrieval.RANGES, Storage.FEW): None,
    (Retrieval.RANGES, Storage.SETS): StructureKind.MTS,
    (Retrieval.RANGES, Storage.SEQUENTIAL): StructureKind.MDS,
    (Retrieval.ALL, Storage.FEW): None,
    (Retrieval.ALL, Storage.SETS): StructureKind.MTS,
    (Retrieval.ALL, Storage.SEQUENTIAL): StructureKind.MDS,
}


@pytest.mark.parametrize("answers", all_answers(),
                         ids=lambda a: f"{a.retrieval.value}-{a.storage.value}-{a.trust.value}")
def test_wizard(answers):
    config = wizard_select(answers)
    expected = EXPECTED[(answers.retrieval, answers.storage)]
    if expected is None:
        expected = StructureKind.NAW if answers.trust is Trust.ACCEPTS_NA else StructureKind.AS
    assert config.structure is expected
    assert config.attester == (IssuerKind.NA if expected is StructureKind.NAW else IssuerKind.TSA)


def test_wizard_covers_every_combination():
    assert len(all_answers()) == 18
    structures = {wizard_select(a).structure for a in all_answers()}
    assert structures == set(StructureKind)


def test_minimal_trust_never_selects_naw():
    for answers in all_answers():
        if answers.trust is Trust.MINIMAL:
            assert wizard_select(answers).structure is not StructureKind.NAW


@pytest.mark.parametrize("name,structure,attester", [
    ("AdES", StructureKind.AS, IssuerKind.TSA),
    ("ERS", StructureKind.MTS, IssuerKind.TSA),
    ("cis", StructureKind.MDS, IssuerKind.TSA),
    ("CISS", StructureKind.SLS, IssuerKind.TSA),
    ("AC", StructureKind.NAW, IssuerKind.NA),
])
def test_expert_presets(name, structure, attester):
    config = expert_preset(name)
    assert (config.structure, config.attester) == (structure, attester)


def test_unknown_preset():
    with pytest.raises(ValueError):
        expert_preset("XYZ")


def test_incompatible_combinations():
    with pytest.raises(IncompatibleAttester):
        SchemeConfig(StructureKind.NAW, IssuerKind.TSA)
    with pytest.raises(ValueError):
        SchemeConfig(StructureKind.AS, IssuerKind.TSA, attach_batches=True)
    with pytest.raises(ValueError):
        SchemeConfig(StructureKind.MDS, IssuerKind.TSA, renewal_threshold=0)
    # une NA peut servir de fournisseur simple
    assert SchemeConfig(StructureKind.MTS, IssuerKind.NA).attester == IssuerKind.NA


def test_scheme_dict_round_trip():
    config = SchemeConfig(StructureKind.SLS, IssuerKind.TSA, HashFunctionId.SHA384,
                          endpoint="localhost:9000", cumulate=True, attach_batches=True, name="dossiers")
    assert SchemeConfig.from_dict(config.to_dict()) == config


def test_registry(tmp_path):
    registry = ProtectionRegistry.in_directory(str(tmp_path / "etat"))
    registry.add_scheme("factures", expert_preset("CIS"))
    registry.add_scheme("contrats", expert_preset("AC"))
    with pytest.raises(ValueError):
        registry.add_scheme("factures", expert_preset("ERS"))

    registry.register_folder("2016", "factures", "2016.zip", ["b.pdf", "a.pdf"], START)
    registry.rename_scheme("factures", "archives")
    assert registry.folder("2016").scheme == "archives"
    assert registry.folder("2016").documents == ["a.pdf", "b.pdf"]
    with pytest.raises(ValueError):
        registry.delete_scheme("archives")
    registry.delete_scheme("contrats")
    registry.save()

    reloaded = ProtectionRegistry.in_directory(str(tmp_path / "etat"))
    assert reloaded.list_schemes() == ["archives"]
    assert reloaded.scheme("archives").structure is StructureKind.MDS
    assert reloaded.folder("2016").validity_estimate == START.to_iso()
    with pytest.raises(ValueError):
        reloaded.scheme("contrats")
    with pytest.raises(ValueError):
        reloaded.folder("2017")
