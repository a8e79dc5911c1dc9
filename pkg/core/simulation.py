"""
Simulation d'une protection à long terme.

Chaque structure est exploitée pendant 100 ans selon l'usage pour lequel
elle est conçue:

- AS et NAW protègent un seul document;
- MTS protège 100 documents ajoutés en une fois;
- MDS et SLS reçoivent un document par an.

L'horloge simulée avance d'un jour à la fois; la preuve est renouvelée dès
qu'il lui reste moins de 30 jours de validité. Les certificats des
fournisseurs expirent tous les 2 ans et l'inventaire de Lenstra impose un
renouvellement du hachage avant 2038 puis avant 2084.
"""

import logging
from typing import Iterator, List, Optional

from data_io.document_generator import DocumentGenerator
from data_io.evidence_xml import serialize_record
from models.document import InputData
from models.evidence import EvidenceRecord, ProofState, StructureKind
from models.simulation_report import SimulationReport
from models.time_instant import DAY, TimeInstant

from .attestation import Attester, NotarialAuthority, TimestampAuthority
from .crypto_core import FixturePki
from .renewal import RENEWAL_THRESHOLD, add_document, protect, renew_if_due
from .security_inventory import SecurityInventory, default_lenstra_inventory, select_hash
from .verification import verify_proof

logger = logging.getLogger(__name__)

SIMULATION_START = TimeInstant.from_date(2016)
SIMULATION_YEARS = 100
WAKE_INTERVAL = DAY        # réveil quotidien du planificateur
ADD_INTERVAL_YEARS = 1     # ajout annuel (MDS, SLS)
MTS_DOCUMENTS = 100


class SimClock:
    """
    Horloge simulée monotone.

    Attributes:
        now (TimeInstant): Instant courant
    """

    def __init__(self, start: TimeInstant = SIMULATION_START):
        self._now = start

    @property
    def now(self) -> TimeInstant:
        return self._now

    def advance(self, seconds: int) -> TimeInstant:
        """
        Raises:
            ValueError: Si la durée est négative
        """
        if seconds < 0:
            raise ValueError(f"L'horloge ne recule pas: {seconds} s")
        self._now = self._now.plus_seconds(seconds)
        return self._now

    def advance_to(self, moment: TimeInstant) -> TimeInstant:
        if moment < self._now:
            raise ValueError(f"L'horloge ne recule pas: {moment} < {self._now}")
        self._now = moment
        return self._now

    def ticks(self, until: TimeInstant, step: int = WAKE_INTERVAL) -> Iterator[TimeInstant]:
        """Avance par pas de ``step`` jusqu'à ``until`` (exclu)."""
        while self._now.plus_seconds(step) < until:
            yield self.advance(step)


class Simulation:
    """
    Pilote de simulation d'une structure.

    Attributes:
        structure (StructureKind): Structure simulée
        years (int): Durée en années simulées
        seed (int): Graine de la PKI et des documents
        inventory (SecurityInventory): Inventaire de sécurité
        threshold (int): Seuil de renouvellement en secondes
        clock (SimClock): Horloge simulée
        pki (FixturePki): PKI de démonstration
        attester (Attester): TSA, ou NA pour le NAW
        documents (List[InputData]): Documents protégés
        state (Optional[ProofState]): Preuve courante
    """

    def __init__(self, structure: StructureKind, years: int = SIMULATION_YEARS, seed: int = 1,
                 start: TimeInstant = SIMULATION_START, inventory: Optional[SecurityInventory] = None,
                 threshold: int = RENEWAL_THRESHOLD, mts_documents: int = MTS_DOCUMENTS):
        if years <= 0:
            raise ValueError(f"Durée de simulation invalide: {years}")
        self.structure = structure
        self.years = years
        self.seed = seed
        self.start = start
        self.inventory = inventory or default_lenstra_inventory()
        self.threshold = threshold
        self.mts_documents = mts_documents
        self.clock = SimClock(start)
        self.pki = FixturePki(seed, start)
        self.attester: Attester = (NotarialAuthority(self.pki, self.inventory)
                                   if structure is StructureKind.NAW else TimestampAuthority(self.pki))
        self.generator = DocumentGenerator(self.pki, seed, self.inventory)
        self.documents: List[InputData] = []
        self.state: Optional[ProofState] = None
        self.report = SimulationReport(structure.value, years, start.to_iso(), start.plus_years(years).to_iso())

    @property
    def end(self) -> TimeInstant:
        return self.start.plus_years(self.years)

    def _record_change(self, before: ProofState, after: ProofState, at: TimeInstant, added: bool):
        if after.current_hash != before.current_hash:
            self.report.hash_renewals += 1
            self.report.hash_renewal_dates.append(at.to_iso())
        elif not added:
            self.report.attestation_renewals += 1

    def _initial_documents(self, at: TimeInstant) -> List[InputData]:
        if self.structure is StructureKind.MTS:
            return self.generator.generate(self.mts_documents, at)
        return self.generator.generate(1, at)

    def _add(self, at: TimeInstant):
        doc = self.generator.document(f"document_{len(self.documents):03d}.pdf", at)
        before = self.state
        self.state = add_document(before, doc, at, self.attester, self.documents, self.inventory,
                                  threshold=self.threshold)
        self.documents.append(doc)
        self._record_change(before, self.state, at, added=True)

    def run(self) -> SimulationReport:
        """Exécute la simulation et vérifie le document du scénario."""
        t = self.clock.now
        self.documents = self._initial_documents(t)
        h0 = select_hash(self.inventory, None, t, self.threshold)
        self.state = protect(self.structure, self.documents, t, h0, self.attester)
        logger.info("Simulation %s: protection initiale le %s (%s)", self.structure, t, h0)

        next_add = self.start.plus_years(ADD_INTERVAL_YEARS)
        for t in self.clock.ticks(self.end):
            added = False
            if self.structure.appends_documents and t >= next_add:
                self._add(t)
                next_add = next_add.plus_years(ADD_INTERVAL_YEARS)
                added = True
            before = self.state
            renewed = renew_if_due(before, self.documents, t, self.attester, self.inventory, self.threshold)
            if renewed is not None:
                self.state = renewed
                self._record_change(before, renewed, t, added=False)
            elif added:
                logger.debug("Ajout du %s sans renouvellement", t)

        self._finish()
        return self.report

    def scenario_document(self) -> InputData:
        """Document vérifié en fin de simulation (MDS: le dernier, sinon le premier)."""
        if self.structure is StructureKind.MDS:
            return self.documents[-1]
        return self.documents[0]

    def _finish(self):
        state = self.state
        record = self.record
        target = self.scenario_document()
        verdict = verify_proof(state, [target], self.inventory, at=self.clock.now, documents=[target.name])
        report = self.report
        report.documents = len(self.documents)
        report.document_elements = state.document_element_count
        report.attestations = len(state.entries)
        report.issued = getattr(self.attester, "issued_count", 0)
        report.proof_size = len(serialize_record(record))
        report.hash_history = [h.value for h in state.hash_history]
        report.scenario = target.name
        report.touched = len(verdict.touched)
        report.valid = verdict.valid
        report.diagnostics = [str(d) for doc in verdict.documents for d in doc.diagnostics]
        report.diagnostics.extend(str(d) for d in verdict.diagnostics)
        logger.info("Simulation %s terminée: %d attestations, %d octets, %s", self.structure,
                    report.attestations, report.proof_size, "valide" if report.valid else "invalide")

    @property
    def record(self) -> EvidenceRecord:
        return EvidenceRecord("simulation", self.state, self.start)


def simulate(structure: StructureKind, years: int = SIMULATION_YEARS, seed: int = 1,
             inventory: Optional[SecurityInventory] = None,
             threshold: int = RENEWAL_THRESHOLD) -> SimulationReport:
    """
    Simule la protection d'une structure pendant ``years`` ans.

    Args:
        structure (StructureKind): AS, MTS, MDS, SLS ou NAW
        years (int): Durée simulée
        seed (int): Graine (deux exécutions de même graine donnent le même
            rapport)
        inventory (Optional[SecurityInventory]): Inventaire (Lenstra par
            défaut)
        threshold (int): Seuil de renouvellement

    Returns:
        SimulationReport: Compteurs, taille de la preuve et vérification
    """
    return Simulation(structure, years, seed, inventory=inventory, threshold=threshold).run()
