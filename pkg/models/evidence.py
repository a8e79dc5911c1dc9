"""
Enregistrement de preuve d'existence (evidence record).

Un enregistrement regroupe, pour une structure de données donnée (AS, MTS,
MDS, SLS ou NAW):

- la chaîne d'entrées: chaque entrée porte une attestation, ses données de
  vérification, la fonction de hachage employée et les données propres à la
  structure (empreinte du document ajouté, liens de la liste à sauts,
  chemins dans les arbres de renouvellement du hachage);
- les éléments protégés: documents simples ou lots de documents réunis
  sous une racine de Merkle;
- les arbres construits lors des renouvellements du hachage;
- l'état notarial (NAW): date initiale t_0, certificat c et historique
  revendiqué H_0(d), ..., H_n(d);
- les reçus de migration, qui embarquent la preuve d'origine.

Les valeurs sont immuables; chaque opération renvoie un nouvel état.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from .attestation import Attestation, VerificationData
from .auth_path import AuthPath
from .certificate import Certificate
from .encoding import concat, concat_all, text, uint
from .primitives import HashFunctionId
from .time_instant import TimeInstant

FORMAT_VERSION = "1.0"


class StructureKind(Enum):
    """Structures de données de preuve."""

    AS = "AS"     # séquence d'attestations
    MTS = "MTS"   # séquence d'arbres de Merkle
    MDS = "MDS"   # séquence de documents multiples
    SLS = "SLS"   # séquence en liste à sauts
    NAW = "NAW"   # enveloppe d'attestation notariale

    @staticmethod
    def parse(name: str) -> "StructureKind":
        try:
            return StructureKind(name.upper())
        except ValueError:
            raise ValueError(f"Structure de données inconnue: {name!r}") from None

    @property
    def is_sequence(self) -> bool:
        return self is not StructureKind.NAW

    @property
    def appends_documents(self) -> bool:
        return self in (StructureKind.MDS, StructureKind.SLS)

    @property
    def protects_single_document(self) -> bool:
        return self in (StructureKind.AS, StructureKind.NAW)

    def __str__(self) -> str:
        return self.value


class EntryKind(Enum):
    """Procédure ayant produit une entrée de la chaîne."""

    INIT = "init"
    RENEWAL = "attestation-renewal"
    HASH_RENEWAL = "hash-renewal"
    ADD = "add"
    ADD_HASH_RENEWAL = "add-hash-renewal"
    ATTACH_HASH_RENEWAL = "attach-hash-renewal"

    @property
    def is_hash_renewal(self) -> bool:
        return self in (EntryKind.HASH_RENEWAL, EntryKind.ADD_HASH_RENEWAL,
                        EntryKind.ATTACH_HASH_RENEWAL)


class MigrationMode(Enum):
    SINGLE = "single"   # preuve d'un document unique: a_n || v_n
    MULTI = "multi"     # feuilles (document, preuve)
    NOTARIAL = "notarial"


def _paths_bytes(paths: Tuple[Tuple[int, AuthPath], ...]) -> bytes:
    return concat_all(concat(uint(index), path.hash_fn.encode(), path.encode())
                      for index, path in paths)


@dataclass(frozen=True)
class SharedProof:
    """
    Attestation partagée issue d'un cumul de requêtes: l'attestation de
    l'entrée porte sur la racine d'un arbre commun, retrouvée à partir des
    octets propres à l'enregistrement et de ce chemin.
    """

    path: AuthPath

    def encode(self) -> bytes:
        return concat(self.path.hash_fn.encode(), self.path.encode())


@dataclass(frozen=True)
class ChainEntry:
    """
    Entrée de la chaîne d'attestations.

    Attributes:
        kind (EntryKind): Procédure d'origine
        hash_fn (HashFunctionId): H_n de l'entrée
        attestation (Attestation): a_n
        verification_data (VerificationData): v_n (remplacée lors du
            renouvellement suivant par les données collectées à ce moment)
        item (Optional[int]): Élément protégé ajouté par cette entrée
        item_digest (Optional[bytes]): H_n(d_n) de l'élément ajouté
        tree (Optional[int]): Arbre de renouvellement attesté
        links (Tuple[bytes, ...]): Liens des niveaux 0..L (SLS)
        paths (Tuple[Tuple[int, AuthPath], ...]): Chemins de cette entrée
            dans les arbres de renouvellement (MDS, SLS)
        shared (Optional[SharedProof]): Cumul de requêtes
    """

    kind: EntryKind
    hash_fn: HashFunctionId
    attestation: Attestation
    verification_data: VerificationData
    item: Optional[int] = None
    item_digest: Optional[bytes] = None
    tree: Optional[int] = None
    links: Tuple[bytes, ...] = ()
    paths: Tuple[Tuple[int, AuthPath], ...] = ()
    shared: Optional[SharedProof] = None

    def path_in(self, tree: int) -> Optional[AuthPath]:
        for index, path in self.paths:
            if index == tree:
                return path
        return None

    def paths_before(self, tree: int) -> List[AuthPath]:
        return [path for index, path in self.paths if index < tree]

    def encode(self) -> bytes:
        return concat(
            text(self.kind.value),
            self.hash_fn.encode(),
            self.attestation.encode(),
            self.verification_data.encode(),
            b"" if self.item is None else uint(self.item),
            self.item_digest or b"",
            b"" if self.tree is None else uint(self.tree),
            concat_all(self.links),
            _paths_bytes(self.paths),
            b"" if self.shared is None else self.shared.encode(),
        )


@dataclass(frozen=True)
class BatchTree:
    """Arbre d'un lot de documents pour une fonction de hachage."""

    hash_fn: HashFunctionId
    root: bytes
    paths: Tuple[Tuple[str, AuthPath], ...]

    def path_of(self, leaf: str) -> Optional[AuthPath]:
        for name, path in self.paths:
            if name == leaf:
                return path
        return None

    def encode(self) -> bytes:
        return concat(self.hash_fn.encode(), self.root,
                      concat_all(concat(text(name), path.encode()) for name, path in self.paths))


@dataclass(frozen=True)
class ProtectedItem:
    """
    Élément protégé: un document ou un lot de documents.

    Attributes:
        name (str): Nom de l'élément
        leaves (Tuple[str, ...]): Noms des feuilles (documents)
        batch (bool): Lot réuni sous une racine de Merkle
        entry (int): Entrée ayant ajouté l'élément
        paths (Tuple[Tuple[int, AuthPath], ...]): Chemins dans les arbres de
            la structure (MTS)
        batch_trees (Tuple[BatchTree, ...]): Arbres du lot, un par
            fonction de hachage
        receipt (Optional[int]): Reçu de migration dont proviennent les
            feuilles
    """

    name: str
    leaves: Tuple[str, ...]
    batch: bool = False
    entry: int = 0
    paths: Tuple[Tuple[int, AuthPath], ...] = ()
    batch_trees: Tuple[BatchTree, ...] = ()
    receipt: Optional[int] = None

    def path_in(self, tree: int) -> Optional[AuthPath]:
        for index, path in self.paths:
            if index == tree:
                return path
        return None

    def batch_tree(self, hash_fn: HashFunctionId) -> Optional[BatchTree]:
        for tree in self.batch_trees:
            if tree.hash_fn == hash_fn:
                return tree
        return None

    def encode(self) -> bytes:
        return concat(
            text(self.name),
            concat_all(text(leaf) for leaf in self.leaves),
            b"\x01" if self.batch else b"\x00",
            uint(self.entry),
            _paths_bytes(self.paths),
            concat_all(tree.encode() for tree in self.batch_trees),
            b"" if self.receipt is None else uint(self.receipt),
        )


@dataclass(frozen=True)
class TreeRecord:
    """Arbre de Merkle construit par la structure (MTS ou renouvellement)."""

    hash_fn: HashFunctionId
    root: bytes
    entry: int
    size: int

    def encode(self) -> bytes:
        return concat(self.hash_fn.encode(), self.root, uint(self.entry), uint(self.size))


@dataclass(frozen=True)
class NotarialState:
    """
    État propre au NAW.

    Attributes:
        original_time (TimeInstant): t_0, conservée à chaque renouvellement
        certificate (Certificate): Certificat c du signataire
        history (Tuple[Tuple[HashFunctionId, bytes], ...]): H_k et H_k(d)
    """

    original_time: TimeInstant
    certificate: Certificate
    history: Tuple[Tuple[HashFunctionId, bytes], ...]

    def encode(self) -> bytes:
        return concat(
            self.original_time.encode(),
            self.certificate.encode(),
            concat_all(concat(h.encode(), digest) for h, digest in self.history),
        )


@dataclass(frozen=True)
class MigrationReceipt:
    """
    Reçu de migration.

    Attributes:
        source_kind (StructureKind): Structure d'origine
        target_kind (StructureKind): Structure cible
        migrated_at (TimeInstant): Référence temporelle de la migration
        mode (MigrationMode): Forme des feuilles migrées
        documents (Tuple[str, ...]): Documents couverts
        source_record (Optional[EvidenceRecord]): Preuve d'origine (absente
            après une migration vers NAW, qui la supprime)
        first_attestation_time (Optional[TimeInstant]): t_0 d'origine
    """

    source_kind: StructureKind
    target_kind: StructureKind
    migrated_at: TimeInstant
    mode: MigrationMode
    documents: Tuple[str, ...]
    source_record: Optional["EvidenceRecord"] = field(default=None, repr=False)
    first_attestation_time: Optional[TimeInstant] = None

    def encode(self) -> bytes:
        return concat(
            text(self.source_kind.value),
            text(self.target_kind.value),
            self.migrated_at.encode(),
            text(self.mode.value),
            concat_all(text(name) for name in self.documents),
            b"" if self.source_record is None else self.source_record.encode(),
            b"" if self.first_attestation_time is None else self.first_attestation_time.encode(),
        )


@dataclass(frozen=True)
class ProofState:
    """
    État d'une structure de preuve.

    Attributes:
        kind (StructureKind): Structure de données
        entries (Tuple[ChainEntry, ...]): Chaîne d'attestations (une seule
            entrée pour NAW)
        items (Tuple[ProtectedItem, ...]): Éléments protégés
        trees (Tuple[TreeRecord, ...]): Arbres de la structure
        notarial (Optional[NotarialState]): État NAW
        receipts (Tuple[MigrationReceipt, ...]): Reçus de migration
    """

    kind: StructureKind
    entries: Tuple[ChainEntry, ...] = ()
    items: Tuple[ProtectedItem, ...] = ()
    trees: Tuple[TreeRecord, ...] = ()
    notarial: Optional[NotarialState] = None
    receipts: Tuple[MigrationReceipt, ...] = ()

    # --- accès ----------------------------------------------------------

    @property
    def last_entry(self) -> ChainEntry:
        return self.entries[-1]

    @property
    def current_hash(self) -> HashFunctionId:
        return self.entries[-1].hash_fn

    @property
    def attestations(self) -> List[Attestation]:
        return [entry.attestation for entry in self.entries]

    @property
    def hash_history(self) -> Tuple[HashFunctionId, ...]:
        """Fonctions de hachage successives H_0, ..., H_n (sans doublon)."""
        if self.notarial is not None:
            return tuple(h for h, _ in self.notarial.history)
        history: List[HashFunctionId] = []
        for entry in self.entries:
            if not history or history[-1] != entry.hash_fn:
                history.append(entry.hash_fn)
        return tuple(history)

    @property
    def document_names(self) -> Tuple[str, ...]:
        names: List[str] = []
        for item in self.items:
            if item.receipt is not None:
                names.extend(self.receipts[item.receipt].documents)
            else:
                names.extend(item.leaves)
        return tuple(names)

    @property
    def document_element_count(self) -> int:
        """Nombre d'éléments de la chaîne portant un document."""
        return sum(1 for entry in self.entries if entry.item is not None)

    def items_for_document(self, name: str) -> Iterator[Tuple[int, ProtectedItem]]:
        for index, item in enumerate(self.items):
            if item.receipt is not None:
                if name in self.receipts[item.receipt].documents:
                    yield index, item
            elif name in item.leaves:
                yield index, item

    def first_attestation_time(self) -> TimeInstant:
        """Date de la première attestation (t_0)."""
        if self.notarial is not None:
            return self.notarial.original_time
        return self.entries[0].attestation.stated_time

    # --- mise à jour ----------------------------------------------------

    def with_entry(self, entry: ChainEntry) -> "ProofState":
        return replace(self, entries=self.entries + (entry,))

    def with_last_verification_data(self, data: VerificationData) -> "ProofState":
        """Remplace v_{n-1} par les données collectées au renouvellement."""
        last = replace(self.entries[-1], verification_data=data)
        return replace(self, entries=self.entries[:-1] + (last,))

    # --- encodage -------------------------------------------------------

    def encode(self) -> bytes:
        return concat(
            text(self.kind.value),
            concat_all(entry.encode() for entry in self.entries),
            concat_all(item.encode() for item in self.items),
            concat_all(tree.encode() for tree in self.trees),
            b"" if self.notarial is None else self.notarial.encode(),
            concat_all(receipt.encode() for receipt in self.receipts),
        )

    def to_dict(self) -> Dict:
        """Résumé pour les rapports JSON."""
        return {
            "structure": self.kind.value,
            "attestations": len(self.entries),
            "hash_history": [h.value for h in self.hash_history],
            "items": len(self.items),
            "documents": list(self.document_names),
            "trees": len(self.trees),
            "receipts": len(self.receipts),
        }


@dataclass(frozen=True)
class EvidenceRecord:
    """
    Enregistrement de preuve sérialisable.

    Attributes:
        name (str): Nom du dossier protégé
        state (ProofState): État de la structure
        created_at (TimeInstant): Date de création de l'enregistrement
        format_version (str): Version du format
    """

    name: str
    state: ProofState
    created_at: TimeInstant
    format_version: str = FORMAT_VERSION

    @property
    def kind(self) -> StructureKind:
        return self.state.kind

    def with_state(self, state: ProofState) -> "EvidenceRecord":
        return replace(self, state=state)

    def encode(self) -> bytes:
        """Encodage binaire canonique (feuilles de migration)."""
        return concat(text(self.format_version), text(self.name),
                      self.created_at.encode(), self.state.encode())
