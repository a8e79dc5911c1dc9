"""
Rapport de simulation.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List


@dataclass
class SimulationReport:
    """
    Résultat d'une simulation.

    Attributes:
        structure (str): Structure simulée
        years (int): Durée simulée
        start (str): Début de la simulation
        end (str): Fin de la simulation
        attestation_renewals (int): Renouvellements sans changement du hachage
        hash_renewals (int): Renouvellements du hachage
        hash_renewal_dates (List[str]): Dates des renouvellements du hachage
        documents (int): Documents protégés
        document_elements (int): Éléments de la chaîne portant un document
        attestations (int): Attestations de la preuve finale
        issued (int): Attestations émises par le fournisseur
        proof_size (int): Taille de la preuve sérialisée (octets)
        hash_history (List[str]): Fonctions de hachage successives
        scenario (str): Document vérifié
        touched (int): Attestations examinées par la vérification
        valid (bool): Verdict de la vérification
        diagnostics (List[str]): Diagnostics de la vérification
    """

    structure: str
    years: int
    start: str
    end: str
    attestation_renewals: int = 0
    hash_renewals: int = 0
    hash_renewal_dates: List[str] = field(default_factory=list)
    documents: int = 0
    document_elements: int = 0
    attestations: int = 0
    issued: int = 0
    proof_size: int = 0
    hash_history: List[str] = field(default_factory=list)
    scenario: str = ""
    touched: int = 0
    valid: bool = False
    diagnostics: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_lines(self) -> List[str]:
        """Rapport ligne à ligne ``clé=valeur``."""
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key}={value}")
        return lines

    def print_summary(self):
        print(f"\n{'='*60}")
        print(f"SIMULATION {self.structure} ({self.years} ans, {self.start[:10]} → {self.end[:10]})")
        print(f"{'='*60}")
        print(f"Renouvellements d'attestation: {self.attestation_renewals}")
        print(f"Renouvellements du hachage:    {self.hash_renewals} ({', '.join(d[:10] for d in self.hash_renewal_dates)})")
        print(f"Documents protégés:            {self.documents}")
        print(f"Attestations de la preuve:     {self.attestations}")
        print(f"Taille de la preuve:           {self.proof_size / 1024:.1f} Ko")
        print(f"Hachage:                       {' → '.join(self.hash_history)}")
        print(f"{'-'*60}")
        marker = "✓" if self.valid else "✗"
        print(f"{marker} Vérification de {self.scenario}: {self.touched} attestation(s) examinée(s)")
        for diagnostic in self.diagnostics:
            print(f"    {diagnostic}")
        print(f"{'='*60}\n")
