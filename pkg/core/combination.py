"""
Combinaison de structures de preuve.

- Cumul des requêtes: les entrées en préparation de plusieurs preuves
  deviennent les feuilles d'un arbre de Merkle commun; une seule
  attestation est demandée pour sa racine et chaque preuve reçoit cette
  attestation avec son chemin.
- Rattachement d'un lot: la racine d'un arbre sur plusieurs documents est
  ajoutée comme un seul élément d'une MDS ou d'une SLS, ou protégée par un
  NAW.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from models.attestation import Attestation, AttestRequest, IssuerKind
from models.auth_path import AuthPath
from models.document import InputData
from models.encoding import concat
from models.errors import IncompatibleAttester, MixedHashFunctions
from models.evidence import ProofState, SharedProof, StructureKind
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant

from .attestation import Attester
from .crypto_core import hash_bytes
from .merkle import MerkleTree
from .notarial_wrapper import naw_init_batch, stage_naw_init, stage_naw_renew
from .payload import DocumentContext, cumulation_leaf, member_bytes
from .security_inventory import SecurityInventory
from .structures import (
    append_element, batch_item, document_item, resolve_inventory, seal, stage_init, stage_renewal,
)

logger = logging.getLogger(__name__)

DEFAULT_BATCH_NAME = "lot"


@dataclass
class Member:
    """
    Preuve participant à un cumul.

    Attributes:
        kind (StructureKind): Structure de la preuve
        documents (Dict[str, InputData]): Documents protégés
        state (Optional[ProofState]): État courant (aucun avant initialisation)
        pending (Optional[InputData]): Document à ajouter lors du prochain
            cumul (MDS, SLS)
    """

    kind: StructureKind
    documents: Dict[str, InputData] = field(default_factory=dict)
    state: Optional[ProofState] = None
    pending: Optional[InputData] = None

    @property
    def name(self) -> str:
        return ", ".join(self.documents) or str(self.kind)

    def available(self) -> List[InputData]:
        docs = list(self.documents.values())
        if self.pending is not None:
            docs.append(self.pending)
        return docs


class BatchCoordinator:
    """
    Coordinateur d'un cumul de requêtes.

    Toutes les requêtes d'un même cumul utilisent la même fonction de
    hachage.

    Attributes:
        members (List[Member]): Preuves participantes
        hash_fn (Optional[HashFunctionId]): Fonction de hachage imposée
        issued (int): Nombre d'attestations demandées par le coordinateur
    """

    def __init__(self, hash_fn: Optional[HashFunctionId] = None):
        self.members: List[Member] = []
        self.hash_fn = hash_fn
        self.issued = 0

    def add(self, kind: StructureKind, docs: Sequence[InputData], state: Optional[ProofState] = None) -> int:
        """Inscrit une preuve (existante ou à créer) et renvoie son index."""
        member = Member(kind, {doc.name: doc for doc in docs}, state)
        self.members.append(member)
        return len(self.members) - 1

    def add_document(self, index: int, doc: InputData):
        """Document ajouté au membre lors du prochain cumul (MDS, SLS)."""
        member = self.members[index]
        if not member.kind.appends_documents:
            raise ValueError(f"{member.kind}: ajout de documents impossible")
        member.pending = doc

    @property
    def states(self) -> List[ProofState]:
        return [member.state for member in self.members]

    def __len__(self) -> int:
        return len(self.members)

    def print_summary(self):
        print(f"\n{'='*60}")
        print("CUMUL DE REQUÊTES")
        print(f"{'='*60}")
        for index, member in enumerate(self.members):
            count = len(member.state.entries) if member.state is not None else 0
            print(f"  [{index}] {member.kind.value:<4} {count:>4} attestation(s)  {member.name}")
        print(f"{'-'*60}")
        print(f"Attestations demandées: {self.issued}")
        print(f"{'='*60}\n")


def _member_hash(coord: BatchCoordinator, member: Member, hash_fn: Optional[HashFunctionId]) -> HashFunctionId:
    h = hash_fn or coord.hash_fn
    if h is None and member.state is not None:
        h = member.state.current_hash
    if h is None:
        raise ValueError(f"Fonction de hachage non précisée pour {member.name}")
    return h


def _stage(member: Member, h: HashFunctionId, t: TimeInstant, attester: Attester,
           inv: SecurityInventory) -> Tuple[ProofState, DocumentContext]:
    docs = member.available()
    if member.state is None:
        if member.kind is StructureKind.NAW:
            item = (document_item(docs[0]) if len(docs) == 1
                    else batch_item(DEFAULT_BATCH_NAME, [doc.name for doc in docs]))
            return stage_naw_init(item, docs, t, h)
        if member.kind is StructureKind.MTS:
            items = [document_item(doc) for doc in docs]
        elif len(docs) == 1:
            items = [document_item(docs[0])]
        else:
            items = [batch_item(DEFAULT_BATCH_NAME, [doc.name for doc in docs])]
        return stage_init(member.kind, items, docs, h)
    if member.kind is StructureKind.NAW:
        return stage_naw_renew(member.state, docs, t, h, inv)
    item = document_item(member.pending) if member.pending is not None else None
    return stage_renewal(member.state, docs, t, h, attester, inv, item=item)


def cumulate_attest(coord: BatchCoordinator, t: TimeInstant, attester: Attester,
                    hash_fn: Optional[HashFunctionId] = None,
                    inventory: Optional[SecurityInventory] = None) -> List[Tuple[Attestation, AuthPath]]:
    """
    Cumule les requêtes de tous les membres sous une seule attestation.

    L'entrée suivante de chaque membre (initialisation ou renouvellement)
    est préparée; ses octets deviennent une feuille de l'arbre commun, dont
    la racine est attestée une seule fois.

    Args:
        coord (BatchCoordinator): Coordinateur
        t (TimeInstant): Date du cumul
        attester (Attester): Fournisseur (une NA si un NAW participe)
        hash_fn (Optional[HashFunctionId]): Fonction imposée
        inventory (Optional[SecurityInventory]): Inventaire courant

    Returns:
        List[Tuple[Attestation, AuthPath]]: Attestation partagée et chemin
        de chaque membre

    Raises:
        IncompatibleAttester: Si un NAW participe sans NA
        MixedHashFunctions: Si les membres n'utilisent pas la même fonction
    """
    if not coord.members:
        raise ValueError("Aucune requête à cumuler")
    if attester.kind != IssuerKind.NA and any(m.kind is StructureKind.NAW for m in coord.members):
        raise IncompatibleAttester("Un cumul contenant un NAW doit être attesté par une NA")
    hashes = {_member_hash(coord, member, hash_fn) for member in coord.members}
    if len(hashes) != 1:
        raise MixedHashFunctions(
            f"Fonctions de hachage différentes: {', '.join(sorted(str(h) for h in hashes))}")
    h = hashes.pop()
    inv = resolve_inventory(inventory)

    staged = [_stage(member, h, t, attester, inv) for member in coord.members]
    leaves = [cumulation_leaf(state, len(state.entries) - 1, ctx) for state, ctx in staged]
    tree = MerkleTree(h, leaves)
    request = AttestRequest(hash_bytes(h, concat(h.encode(), tree.root)), h, t)
    attestation = attester.attest(request, t)
    data = attester.verification_data(attestation, t)
    coord.issued += 1

    results = []
    for index, (member, (state, _)) in enumerate(zip(coord.members, staged)):
        path = tree.auth_path(index)
        member.state = seal(state, len(state.entries) - 1, attestation, data, SharedProof(path))
        if member.pending is not None:
            member.documents[member.pending.name] = member.pending
            member.pending = None
        results.append((attestation, path))
    logger.info("Cumul: %d requête(s) sous une attestation %s le %s", len(staged), h, t)
    return results


def _shares_last_attestation(members: Sequence[Member]) -> bool:
    lasts = {m.state.last_entry.attestation for m in members}
    return len(lasts) == 1 and all(m.state.last_entry.shared is not None for m in members)


def _renew_shared_chain(members: Sequence[Member], t: TimeInstant, h: HashFunctionId,
                        attester: Attester, inv: SecurityInventory) -> int:
    """
    Renouvellement d'attestation commun: les membres partagent la même
    dernière attestation, une seule nouvelle attestation porte sur
    H || H(a_{n-1} || v_{n-1}) et est ajoutée à chacun.
    """
    first = members[0]
    staged, ctx = stage_renewal(first.state, first.available(), t, h, attester, inv)
    refreshed = staged.entries[-2].verification_data
    request = AttestRequest(hash_bytes(h, member_bytes(staged, len(staged.entries) - 1, ctx)), h, t)
    attestation = attester.attest(request, t)
    data = attester.verification_data(attestation, t)
    for member in members:
        state = member.state.with_last_verification_data(refreshed)
        if member is first:
            state = staged
        else:
            state = state.with_entry(staged.last_entry)
        member.state = seal(state, len(state.entries) - 1, attestation, data)
    return 1


def cumulate_renew(coord: BatchCoordinator, t: TimeInstant, h: HashFunctionId, attester: Attester,
                   inventory: Optional[SecurityInventory] = None) -> List[ProofState]:
    """
    Renouvelle les preuves d'un cumul.

    - Renouvellement du hachage: chaque membre prépare son renouvellement
      du hachage et un nouvel arbre commun est attesté.
    - MDS et SLS: chacune renouvelle seule son attestation.
    - AS, MTS et NAW: si les membres partagent la même dernière attestation
      (sans NAW), un seul renouvellement commun; sinon un nouveau cumul.

    Returns:
        List[ProofState]: États des membres
    """
    if not coord.members:
        raise ValueError("Aucune preuve à renouveler")
    inv = resolve_inventory(inventory)
    if any(member.state is None for member in coord.members):
        raise ValueError("Toutes les preuves doivent être initialisées avant un renouvellement")

    if any(member.state.current_hash != h for member in coord.members):
        cumulate_attest(coord, t, attester, hash_fn=h, inventory=inv)
        return coord.states

    sequences = [m for m in coord.members if m.kind.appends_documents]
    others = [m for m in coord.members if not m.kind.appends_documents]
    for member in sequences:
        item = document_item(member.pending) if member.pending is not None else None
        member.state = append_element(member.state, member.available(), t, h, attester,
                                      item=item, inventory=inv)
        if member.pending is not None:
            member.documents[member.pending.name] = member.pending
            member.pending = None
        coord.issued += 1

    if others:
        naw = any(m.kind is StructureKind.NAW for m in others)
        if not naw and _shares_last_attestation(others):
            coord.issued += _renew_shared_chain(others, t, h, attester, inv)
        else:
            sub = BatchCoordinator(h)
            sub.members = others
            cumulate_attest(sub, t, attester, hash_fn=h, inventory=inv)
            coord.issued += sub.issued
    logger.info("Renouvellement du cumul (%d membre(s)) le %s", len(coord.members), t)
    return coord.states


def attach_docset(state: ProofState, docs: Sequence[InputData], t: TimeInstant, h: HashFunctionId,
                  attester: Attester, name: str = DEFAULT_BATCH_NAME,
                  existing: Optional[Sequence[InputData]] = None,
                  inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Rattache un lot de documents sous la racine d'un arbre de Merkle.

    Pour une MDS ou une SLS, la racine devient l'élément suivant; pour un
    NAW, un nouveau NAW protège la racine du lot.

    Args:
        state (ProofState): Preuve MDS, SLS ou NAW
        docs (Sequence[InputData]): Documents du lot
        t (TimeInstant): Date du rattachement
        h (HashFunctionId): Fonction de hachage
        attester (Attester): Fournisseur d'attestation
        name (str): Nom du lot
        existing (Optional[Sequence[InputData]]): Documents déjà protégés
            (requis lors d'un renouvellement du hachage)
        inventory (Optional[SecurityInventory]): Inventaire courant

    Raises:
        ValueError: Pour une AS ou une MTS
    """
    docs = list(docs)
    item = batch_item(name, [doc.name for doc in docs])
    if state.kind is StructureKind.NAW:
        return naw_init_batch(name, docs, t, h, attester)
    if not state.kind.appends_documents:
        raise ValueError(f"{state.kind}: rattachement d'un lot impossible")
    available = list(existing or []) + docs
    return append_element(state, available, t, h, attester, item=item, attach=True, inventory=inventory)
