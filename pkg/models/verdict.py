"""
Résultat d'une vérification de preuve.

La vérification ne lève jamais d'exception pour une preuve défectueuse:
elle renvoie un verdict accompagné de diagnostics, chacun classé dans une
catégorie fermée.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional


class DiagnosticCategory(Enum):
    """Catégories de diagnostic."""

    DIGEST_MISMATCH = "digest-mismatch"
    SIGNATURE_INVALID = "signature-invalid"
    CHAIN_INVALID = "chain-invalid"
    PRIMITIVE_INSECURE = "primitive-insecure"
    RENEWAL_GAP = "renewal-gap"
    PATH_MISMATCH = "path-mismatch"
    MISSING_DOCUMENT = "missing-document"
    EXPIRED = "expired"
    SOURCE_INVALID = "source-invalid"


@dataclass(frozen=True)
class Diagnostic:
    """
    Diagnostic d'échec.

    Attributes:
        category (DiagnosticCategory): Catégorie
        message (str): Explication lisible
        document (Optional[str]): Document concerné
        entry (Optional[int]): Index de l'attestation concernée
    """

    category: DiagnosticCategory
    message: str
    document: Optional[str] = None
    entry: Optional[int] = None

    def __str__(self) -> str:
        where = f" [attestation {self.entry}]" if self.entry is not None else ""
        return f"{self.category.value}{where}: {self.message}"


@dataclass
class DocumentVerdict:
    """Verdict pour un document."""

    document: str
    diagnostics: List[Diagnostic] = field(default_factory=list)
    touched: List[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.diagnostics

    @property
    def reason(self) -> str:
        if self.valid:
            return "valide"
        return str(self.diagnostics[0])


@dataclass
class Verdict:
    """
    Verdict global d'une vérification.

    Attributes:
        documents (List[DocumentVerdict]): Verdict par document
        diagnostics (List[Diagnostic]): Diagnostics non rattachés à un document
    """

    documents: List[DocumentVerdict] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.diagnostics and all(doc.valid for doc in self.documents)

    @property
    def categories(self) -> List[DiagnosticCategory]:
        found = [d.category for d in self.diagnostics]
        for doc in self.documents:
            found.extend(d.category for d in doc.diagnostics)
        return found

    @property
    def touched(self) -> List[int]:
        """Index des attestations examinées (tous documents confondus)."""
        seen: List[int] = []
        for doc in self.documents:
            for index in doc.touched:
                if index not in seen:
                    seen.append(index)
        return seen

    def for_document(self, name: str) -> Optional[DocumentVerdict]:
        for doc in self.documents:
            if doc.document == name:
                return doc
        return None

    def to_dict(self) -> Dict:
        return {
            "valid": self.valid,
            "documents": [
                {
                    "document": doc.document,
                    "valid": doc.valid,
                    "touched": list(doc.touched),
                    "diagnostics": [str(d) for d in doc.diagnostics],
                }
                for doc in self.documents
            ],
            "diagnostics": [str(d) for d in self.diagnostics],
        }

    def print_table(self):
        """Affiche le tableau récapitulatif par document."""
        print(f"\n{'='*60}")
        print("RÉSULTAT DE LA VÉRIFICATION")
        print(f"{'='*60}")
        for doc in self.documents:
            marker = "✓" if doc.valid else "✗"
            print(f"  {marker} {doc.document:<30} {doc.reason}")
        for diagnostic in self.diagnostics:
            print(f"  ✗ {diagnostic}")
        print(f"{'-'*60}")
        print(f"Verdict: {'VALIDE' if self.valid else 'INVALIDE'}")
        print(f"{'='*60}\n")
