"""
Choix du schéma de protection.

Un schéma associe une structure de données à une technique d'attestation.
Il est choisi par l'utilisateur (mode expert, schémas connus) ou par un
assistant qui interroge l'utilisateur sur l'accès attendu aux documents,
leur mode de stockage et la confiance accordée aux autorités notariales.

Table d'adéquation (accès / stockage):

    Structure   Accès                  Stockage
    AS          documents isolés       peu de documents
    MTS         tous les documents     ensembles de documents
    MDS         plages de documents    ajouts successifs à un dossier
    SLS         isolés et plages       ajouts successifs à un dossier
    NAW         documents isolés       peu de documents
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from models.attestation import IssuerKind
from models.errors import IncompatibleAttester
from models.evidence import StructureKind
from models.primitives import HashFunctionId

from .renewal import RENEWAL_THRESHOLD

logger = logging.getLogger(__name__)


class Retrieval(Enum):
    SINGLE = "single"
    RANGES = "ranges"
    ALL = "all"


class Storage(Enum):
    FEW = "few"
    SETS = "sets"
    SEQUENTIAL = "sequential-folders"


class Trust(Enum):
    ACCEPTS_NA = "accepts-NA-trust"
    MINIMAL = "minimal-trust"


@dataclass(frozen=True)
class SchemeConfig:
    """
    Schéma de protection.

    Attributes:
        structure (StructureKind): Structure de données
        attester (IssuerKind): Technique d'attestation
        hash_fn (HashFunctionId): Fonction de hachage initiale
        endpoint (Optional[str]): Service d'attestation distant ``hôte:port``
        renewal_threshold (int): Seuil de renouvellement en secondes
        cumulate (bool): Cumul des requêtes avec d'autres preuves
        attach_batches (bool): Documents ajoutés par lots
        name (str): Nom du schéma

    Raises:
        IncompatibleAttester: NAW sans autorité notariale
    """

    structure: StructureKind
    attester: IssuerKind
    hash_fn: HashFunctionId = HashFunctionId.SHA256
    endpoint: Optional[str] = None
    renewal_threshold: int = RENEWAL_THRESHOLD
    cumulate: bool = False
    attach_batches: bool = False
    name: str = ""

    def __post_init__(self):
        if self.structure is StructureKind.NAW and self.attester != IssuerKind.NA:
            raise IncompatibleAttester(
                "Combinaison impossible: le NAW n'accepte que des attestations notariales")
        if self.attach_batches and self.structure not in (
                StructureKind.MDS, StructureKind.SLS, StructureKind.NAW):
            raise ValueError(f"{self.structure}: rattachement de lots impossible")
        if self.renewal_threshold <= 0:
            raise ValueError(f"Seuil de renouvellement invalide: {self.renewal_threshold}")

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["structure"] = self.structure.value
        data["attester"] = self.attester.name
        data["hash_fn"] = self.hash_fn.value
        return data

    @staticmethod
    def from_dict(data: Dict) -> "SchemeConfig":
        return SchemeConfig(
            structure=StructureKind.parse(data["structure"]),
            attester=IssuerKind.parse(data["attester"]),
            hash_fn=HashFunctionId.parse(data.get("hash_fn", HashFunctionId.SHA256.value)),
            endpoint=data.get("endpoint"),
            renewal_threshold=int(data.get("renewal_threshold", RENEWAL_THRESHOLD)),
            cumulate=bool(data.get("cumulate", False)),
            attach_batches=bool(data.get("attach_batches", False)),
            name=data.get("name", ""),
        )

    def __str__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"{label}{self.structure.value} + {self.attester.name} ({self.hash_fn})"


@dataclass(frozen=True)
class WizardAnswers:
    retrieval: Retrieval
    storage: Storage
    trust: Trust


# Accès et stockage pour lesquels chaque structure convient
SUITABILITY: Dict[StructureKind, Tuple[FrozenSet[Retrieval], FrozenSet[Storage]]] = {
    StructureKind.AS: (frozenset({Retrieval.SINGLE}), frozenset({Storage.FEW})),
    StructureKind.MTS: (frozenset({Retrieval.ALL}), frozenset({Storage.SETS})),
    StructureKind.MDS: (frozenset({Retrieval.RANGES}), frozenset({Storage.SEQUENTIAL})),
    StructureKind.SLS: (frozenset({Retrieval.SINGLE, Retrieval.RANGES}), frozenset({Storage.SEQUENTIAL})),
    StructureKind.NAW: (frozenset({Retrieval.SINGLE}), frozenset({Storage.FEW})),
}


def _score(kind: StructureKind, answers: WizardAnswers) -> Tuple[int, int]:
    retrieval, storage = SUITABILITY[kind]
    matches = 2 * (answers.storage in storage) + (answers.retrieval in retrieval)
    # à égalité, la structure la plus spécialisée
    return matches, -(len(retrieval) + len(storage))


def wizard_select(answers: WizardAnswers) -> SchemeConfig:
    """
    Propose un schéma d'après les réponses de l'assistant.

    Le stockage prime sur l'accès; AS et NAW se partagent les mêmes
    usages, le NAW étant retenu si l'utilisateur accepte la confiance
    accordée à une autorité notariale.
    """
    single = StructureKind.NAW if answers.trust is Trust.ACCEPTS_NA else StructureKind.AS
    candidates = [single, StructureKind.MTS, StructureKind.MDS, StructureKind.SLS]
    best = max(candidates, key=lambda kind: _score(kind, answers))
    attester = IssuerKind.NA if best is StructureKind.NAW else IssuerKind.TSA
    config = SchemeConfig(best, attester, name="assistant")
    logger.debug("Assistant: %s/%s/%s -> %s", answers.retrieval.value, answers.storage.value,
                 answers.trust.value, config)
    return config


def all_answers() -> List[WizardAnswers]:
    return [WizardAnswers(r, s, t) for r in Retrieval for s in Storage for t in Trust]


# Schémas connus (mode expert)
EXPERT_PRESETS: Dict[str, Tuple[StructureKind, IssuerKind]] = {
    "AdES": (StructureKind.AS, IssuerKind.TSA),
    "ERS": (StructureKind.MTS, IssuerKind.TSA),
    "CIS": (StructureKind.MDS, IssuerKind.TSA),
    "CISS": (StructureKind.SLS, IssuerKind.TSA),
    "AC": (StructureKind.NAW, IssuerKind.NA),
}


def expert_preset(name: str) -> SchemeConfig:
    """
    Schéma connu: AdES, ERS, CIS, CISS ou AC.

    Raises:
        ValueError: Si le nom est inconnu
    """
    for preset, (structure, attester) in EXPERT_PRESETS.items():
        if preset.lower() == name.lower():
            return SchemeConfig(structure, attester, name=preset)
    raise ValueError(f"Schéma inconnu: {name!r} (attendu: {', '.join(EXPERT_PRESETS)})")
