"""
Classe pour écrire les rapports de simulation et de vérification.
"""

import json
import logging
import os
from typing import Dict, List, Optional

from models.simulation_report import SimulationReport
from models.verdict import Verdict

logger = logging.getLogger(__name__)


class ReportWriter:
    """
    Écrit les rapports au format texte ``clé=valeur`` et au format JSON.

    Attributes:
        output_dir (str): Répertoire où seront sauvegardés les rapports
    """

    def __init__(self, output_dir: str = "output"):
        """
        Initialise le ReportWriter.

        Args:
            output_dir (str): Chemin du répertoire de sortie
        """
        self.output_dir = output_dir
        self._ensure_output_dir()

    def _ensure_output_dir(self) -> None:
        os.makedirs(self.output_dir, exist_ok=True)

    def _write_json(self, data: Dict, filename: str) -> str:
        output_path = os.path.join(self.output_dir, filename)
        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        return output_path

    def write_simulation_report(self, report: SimulationReport, filename: Optional[str] = None) -> str:
        """
        Écrit le rapport d'une simulation en texte ``clé=valeur``.

        Args:
            report (SimulationReport): Rapport
            filename (str): Nom du fichier (optionnel)

        Returns:
            str: Chemin du fichier créé
        """
        if filename is None:
            filename = f"simulation_{report.structure.lower()}.txt"
        output_path = os.path.join(self.output_dir, filename)
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write("\n".join(report.to_lines()) + "\n")
        logger.info("Rapport de simulation écrit: %s", output_path)
        return output_path

    def write_simulation_summary(self, reports: List[SimulationReport],
                                 summary_filename: str = "simulation_summary.json") -> str:
        """
        Écrit les rapports de plusieurs simulations dans un fichier JSON
        unique, avec un fichier texte par structure.

        Returns:
            str: Chemin du fichier JSON créé
        """
        data = {
            "total_structures": len(reports),
            "reports": [report.to_dict() for report in reports],
            "summary": self._generate_summary(reports),
        }
        output_path = self._write_json(data, summary_filename)
        for report in reports:
            self.write_simulation_report(report)
        logger.info("Synthèse écrite: %s (%d structures)", output_path, len(reports))
        return output_path

    def _generate_summary(self, reports: List[SimulationReport]) -> Dict:
        """
        Classement des structures par taille de preuve et validité.
        """
        if not reports:
            return {}
        ordered = sorted(reports, key=lambda r: r.proof_size)
        return {
            "size_order": [r.structure for r in ordered],
            "all_valid": all(r.valid for r in reports),
            "total_hash_renewals": sum(r.hash_renewals for r in reports),
            "total_attestation_renewals": sum(r.attestation_renewals for r in reports),
            "largest_proof_bytes": ordered[-1].proof_size,
            "smallest_proof_bytes": ordered[0].proof_size,
        }

    def write_verdict(self, verdict: Verdict, name: str) -> str:
        """Écrit le verdict d'une vérification en JSON."""
        output_path = self._write_json(verdict.to_dict(), f"verdict_{name}.json")
        logger.info("Verdict écrit: %s", output_path)
        return output_path

    def write_detailed_report(self, reports: List[SimulationReport],
                              filename: str = "detailed_report.txt") -> str:
        """
        Génère un rapport détaillé en format texte.

        Args:
            reports (List[SimulationReport]): Rapports de simulation
            filename (str): Nom du fichier de rapport

        Returns:
            str: Chemin du fichier créé
        """
        output_path = os.path.join(self.output_dir, filename)

        with open(output_path, 'w', encoding='utf-8') as f:
            f.write("="*80 + "\n")
            f.write("RAPPORT DE SIMULATION DES PREUVES D'EXISTENCE\n")
            f.write("="*80 + "\n\n")

            f.write(f"{'Structure':<10} {'Renouv.':>8} {'Hachage':>8} {'Attest.':>8} "
                    f"{'Taille (Ko)':>12} {'Examinées':>10}  Verdict\n")
            f.write("-"*80 + "\n")
            for report in reports:
                f.write(f"{report.structure:<10} {report.attestation_renewals:>8} {report.hash_renewals:>8} "
                        f"{report.attestations:>8} {report.proof_size / 1024:>12.1f} {report.touched:>10}  "
                        f"{'valide' if report.valid else 'invalide'}\n")

            f.write("\n" + "="*80 + "\n")
            f.write("FIN DU RAPPORT\n")
            f.write("="*80 + "\n")

        logger.info("Rapport détaillé écrit: %s", output_path)
        return output_path
