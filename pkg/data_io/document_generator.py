"""
Classe pour générer des documents signés de test.
"""

import logging
import os
import random
from typing import List, Optional

from core.crypto_core import FixturePki, IssuedLeaf, sign_document
from core.security_inventory import SecurityInventory, default_lenstra_inventory, select_hash
from models.document import InputData
from models.time_instant import TimeInstant

logger = logging.getLogger(__name__)

SIGNER_SUBJECT = "MoPS Signataire"


class DocumentGenerator:
    """
    Génère des documents au contenu aléatoire, signés par un certificat
    feuille de la PKI de démonstration.

    Le signataire utilise la fonction de hachage la plus faible encore sûre
    à la date de signature et renouvelle son certificat lorsqu'il expire.

    Attributes:
        pki (FixturePki): PKI émettant le certificat du signataire
        min_size (int): Taille minimale d'un document en octets
        max_size (int): Taille maximale d'un document en octets
        seed (int): Graine du contenu (reproductibilité)
    """

    def __init__(self, pki: FixturePki, seed: int = 1, inventory: Optional[SecurityInventory] = None,
                 min_size: int = 256, max_size: int = 2048, subject: str = SIGNER_SUBJECT):
        if min_size <= 0 or max_size < min_size:
            raise ValueError(f"Tailles de documents invalides: {min_size}..{max_size}")
        self.pki = pki
        self.seed = seed
        self.inventory = inventory or default_lenstra_inventory()
        self.min_size = min_size
        self.max_size = max_size
        self.subject = subject
        self._rng = random.Random(seed)
        self._leaf: Optional[IssuedLeaf] = None

    def signer(self, at: TimeInstant) -> IssuedLeaf:
        """Clé et certificat du signataire à la date ``at``."""
        hash_fn = select_hash(self.inventory, None, at, 0)
        leaf = self._leaf
        if leaf is None or not leaf.certificate.valid_at(at) or leaf.certificate.params.paired_hash != hash_fn:
            leaf = self.pki.issue_leaf(self.subject, hash_fn, at)
            self._leaf = leaf
            logger.debug("Signataire: nouveau certificat %s", leaf.certificate)
        return leaf

    def sign(self, name: str, content: bytes, at: TimeInstant) -> InputData:
        """
        Signe un contenu.

        Args:
            name (str): Nom du document
            content (bytes): Contenu
            at (TimeInstant): Date de signature

        Returns:
            InputData: Document et signature détachée
        """
        leaf = self.signer(at)
        hash_fn = leaf.certificate.params.paired_hash
        signature = sign_document(leaf.key_pair, leaf.certificate, hash_fn, content, at)
        return InputData(name, content, signature)

    def sign_file(self, path: str, at: TimeInstant) -> InputData:
        """Signe un fichier du disque (nom = nom de base du fichier)."""
        with open(path, "rb") as f:
            content = f.read()
        return self.sign(os.path.basename(path), content, at)

    def document(self, name: str, at: TimeInstant) -> InputData:
        """Génère un document signé de taille aléatoire."""
        size = self._rng.randint(self.min_size, self.max_size)
        content = self._rng.randbytes(size)
        return self.sign(name, content, at)

    def generate(self, count: int, at: TimeInstant, prefix: str = "document",
                 interval: int = 0) -> List[InputData]:
        """
        Génère une liste de documents signés.

        Args:
            count (int): Nombre de documents
            at (TimeInstant): Date de signature du premier document
            prefix (str): Préfixe des noms de documents
            interval (int): Écart en secondes entre deux signatures

        Returns:
            List[InputData]: Documents générés
        """
        docs = [self.document(f"{prefix}_{i:03d}.pdf", at.plus_seconds(i * interval))
                for i in range(count)]
        logger.info("%d document(s) générés (%d octets)", count, sum(doc.size for doc in docs))
        return docs

    @staticmethod
    def display_documents(docs: List[InputData], max_display: int = 10) -> None:
        """
        Affiche un échantillon de documents.

        Args:
            docs (List[InputData]): Documents
            max_display (int): Nombre maximum de documents affichés
        """
        print(f"\nÉchantillon de documents (affichant {min(max_display, len(docs))} sur {len(docs)}):")

        for i, doc in enumerate(docs[:max_display], 1):
            print(f"  {i}. {doc}")

        if len(docs) > max_display:
            print(f"  ... et {len(docs) - max_display} autres documents")
