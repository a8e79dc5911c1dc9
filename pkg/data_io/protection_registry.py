"""
Registre du système de protection (fichier JSON).

Le registre liste les schémas de protection définis par l'utilisateur et
les dossiers protégés: fichier de preuve, documents couverts et estimation
de validité, mise à jour après chaque import et chaque renouvellement.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from core.scheme import SchemeConfig
from models.time_instant import TimeInstant

logger = logging.getLogger(__name__)

REGISTRY_FILENAME = "registry.json"


@dataclass
class ProtectedFolder:
    """
    Dossier protégé.

    Attributes:
        name (str): Nom du dossier
        scheme (str): Schéma de protection appliqué
        record_path (str): Fichier de preuve (.er.xml)
        documents (List[str]): Documents couverts
        validity_estimate (str): Fin de validité estimée (ISO-8601)
    """

    name: str
    scheme: str
    record_path: str
    documents: List[str] = field(default_factory=list)
    validity_estimate: str = ""

    def to_dict(self) -> Dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict) -> "ProtectedFolder":
        return ProtectedFolder(
            name=data["name"],
            scheme=data["scheme"],
            record_path=data["record_path"],
            documents=list(data.get("documents", [])),
            validity_estimate=data.get("validity_estimate", ""),
        )


class ProtectionRegistry:
    """
    Registre persistant des schémas et des dossiers protégés.

    Attributes:
        path (str): Fichier JSON du registre
        schemes (Dict[str, SchemeConfig]): Schémas par nom
        folders (Dict[str, ProtectedFolder]): Dossiers par nom
    """

    def __init__(self, path: str):
        self.path = path
        self.schemes: Dict[str, SchemeConfig] = {}
        self.folders: Dict[str, ProtectedFolder] = {}
        if os.path.exists(path):
            self.load()

    @classmethod
    def in_directory(cls, state_dir: str) -> "ProtectionRegistry":
        os.makedirs(state_dir, exist_ok=True)
        return cls(os.path.join(state_dir, REGISTRY_FILENAME))

    def load(self):
        with open(self.path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        self.schemes = {name: SchemeConfig.from_dict(config) for name, config in data.get("schemes", {}).items()}
        self.folders = {entry["name"]: ProtectedFolder.from_dict(entry) for entry in data.get("folders", [])}
        logger.debug("Registre chargé: %d schéma(s), %d dossier(s)", len(self.schemes), len(self.folders))

    def save(self) -> str:
        data = {
            "schemes": {name: config.to_dict() for name, config in sorted(self.schemes.items())},
            "folders": [self.folders[name].to_dict() for name in sorted(self.folders)],
        }
        with open(self.path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        return self.path

    # --- schémas --------------------------------------------------------

    def add_scheme(self, name: str, config: SchemeConfig):
        """
        Raises:
            ValueError: Si le nom est déjà utilisé
        """
        if name in self.schemes:
            raise ValueError(f"Schéma déjà défini: {name}")
        self.schemes[name] = config
        logger.info("Schéma créé: %s (%s)", name, config)

    def scheme(self, name: str) -> SchemeConfig:
        try:
            return self.schemes[name]
        except KeyError:
            raise ValueError(f"Schéma inconnu: {name}") from None

    def rename_scheme(self, old: str, new: str):
        config = self.scheme(old)
        if new in self.schemes:
            raise ValueError(f"Schéma déjà défini: {new}")
        del self.schemes[old]
        self.schemes[new] = config
        for folder in self.folders.values():
            if folder.scheme == old:
                folder.scheme = new
        logger.info("Schéma renommé: %s -> %s", old, new)

    def delete_scheme(self, name: str):
        """
        Raises:
            ValueError: Si un dossier utilise encore le schéma
        """
        self.scheme(name)
        users = [f.name for f in self.folders.values() if f.scheme == name]
        if users:
            raise ValueError(f"Schéma {name} utilisé par: {', '.join(sorted(users))}")
        del self.schemes[name]
        logger.info("Schéma supprimé: %s", name)

    def list_schemes(self) -> List[str]:
        return sorted(self.schemes)

    # --- dossiers -------------------------------------------------------

    def register_folder(self, name: str, scheme: str, record_path: str, documents: List[str],
                        validity: Optional[TimeInstant] = None) -> ProtectedFolder:
        self.scheme(scheme)
        folder = ProtectedFolder(name, scheme, record_path, sorted(documents),
                                 validity.to_iso() if validity is not None else "")
        self.folders[name] = folder
        logger.info("Dossier %s protégé par %s", name, scheme)
        return folder

    def folder(self, name: str) -> ProtectedFolder:
        try:
            return self.folders[name]
        except KeyError:
            raise ValueError(f"Dossier inconnu: {name}") from None

    def update_validity(self, name: str, validity: TimeInstant, documents: Optional[List[str]] = None):
        folder = self.folder(name)
        folder.validity_estimate = validity.to_iso()
        if documents is not None:
            folder.documents = sorted(documents)

    def print_summary(self):
        print(f"\n{'='*60}")
        print("SYSTÈME DE PROTECTION")
        print(f"{'='*60}")
        print(f"Schémas: {len(self.schemes)}")
        for name in self.list_schemes():
            print(f"  • {self.schemes[name]}" if self.schemes[name].name == name
                  else f"  • {name}: {self.schemes[name]}")
        print(f"Dossiers protégés: {len(self.folders)}")
        for name in sorted(self.folders):
            folder = self.folders[name]
            print(f"  • {name:<20} {folder.scheme:<10} {len(folder.documents)} document(s), "
                  f"valide jusqu'au {folder.validity_estimate or '?'}")
        print(f"{'='*60}\n")
