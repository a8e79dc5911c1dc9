import pytest

from core.simulation import SIMULATION_START, SimClock, Simulation, simulate
from models.evidence import StructureKind
from models.time_instant import DAY, TimeInstant


@pytest.fixture(scope="module")
def reports():
    """Simulation de 100 ans pour chaque structure (lente: exécutée une fois)."""
    return {kind: simulate(kind, seed=1) for kind in StructureKind}


def test_every_structure_survives(reports):
    for kind, report in reports.items():
        assert report.valid, f"{kind}: {report.diagnostics}"


def test_two_hash_renewals(reports):
    for report in reports.values():
        assert report.hash_renewals == 2
        assert report.hash_history == ["SHA-256", "SHA-384", "SHA-512"]
        assert report.hash_renewal_dates[0] < "2038"
        assert "2038" <= report.hash_renewal_dates[1] < "2084"


def test_naw_keeps_single_attestation(reports):
    naw = reports[StructureKind.NAW]
    assert naw.attestations == 1
    assert naw.issued > naw.attestations


def test_document_counts(reports):
    assert reports[StructureKind.AS].documents == 1
    assert reports[StructureKind.MTS].documents == 100
    for kind in (StructureKind.MDS, StructureKind.SLS):
        assert reports[kind].documents == 100
        assert reports[kind].document_elements == 100


def test_proof_sizes(reports):
    size = {kind: report.proof_size for kind, report in reports.items()}
    assert size[StructureKind.NAW] < size[StructureKind.AS] < size[StructureKind.MTS] < size[StructureKind.MDS]
    mds, sls = size[StructureKind.MDS], size[StructureKind.SLS]
    assert abs(mds - sls) / mds < 0.25


def test_short_simulation_is_deterministic():
    first = simulate(StructureKind.AS, years=3, seed=4)
    second = simulate(StructureKind.AS, years=3, seed=4)
    assert first.to_dict() == second.to_dict()
    assert first.valid
    assert first.attestation_renewals >= 1


def test_invalid_duration():
    with pytest.raises(ValueError):
        Simulation(StructureKind.AS, years=0)


def test_clock_is_monotonic():
    clock = SimClock()
    assert clock.now == SIMULATION_START
    clock.advance(DAY)
    with pytest.raises(ValueError):
        clock.advance(-1)
    with pytest.raises(ValueError):
        clock.advance_to(SIMULATION_START)
    ticks = list(clock.ticks(SIMULATION_START.plus_seconds(5 * DAY)))
    assert len(ticks) == 3


def test_horizon_in_calendar_years(reports):
    assert Simulation(StructureKind.AS).end == TimeInstant.from_date(2116)
    assert reports[StructureKind.MDS].end == "2116-01-01T00:00:00Z"
    leap = TimeInstant.from_date(2016, 2, 29)
    assert leap.plus_years(1) == TimeInstant.from_date(2017, 2, 28)
    assert leap.plus_years(4) == TimeInstant.from_date(2020, 2, 29)
