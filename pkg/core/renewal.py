"""
Protection et renouvellement des preuves.

Une preuve est renouvelée lorsqu'il lui reste moins de
``RENEWAL_THRESHOLD`` de validité. La fonction de hachage du
renouvellement est choisie d'après l'inventaire: la fonction courante tant
qu'elle reste sûre au-delà du seuil, sinon la plus faible des fonctions
plus robustes.
"""

import logging
from typing import Optional, Sequence

from models.document import InputData
from models.errors import EmptyLeafList
from models.evidence import EvidenceRecord, ProofState, StructureKind
from models.primitives import HashFunctionId
from models.time_instant import DAY, TimeInstant

from .attestation import Attester
from .notarial_wrapper import naw_init, naw_init_batch, naw_renew
from .security_inventory import SecurityInventory, select_hash
from .structures import (
    DocumentsArg, append_element, as_init, as_renew, batch_item, document_item, init_with_item,
    mts_init, mts_renew, resolve_inventory,
)
from .verification import proof_validity

logger = logging.getLogger(__name__)

RENEWAL_THRESHOLD = 30 * DAY


def _state_of(record) -> ProofState:
    return record.state if isinstance(record, EvidenceRecord) else record


def needs_renewal(record, inv: Optional[SecurityInventory], at: TimeInstant,
                  threshold: int = RENEWAL_THRESHOLD) -> bool:
    """Vrai s'il reste moins de ``threshold`` secondes de validité à ``at``."""
    state = _state_of(record)
    return proof_validity(state, resolve_inventory(inv)).minus(at) < threshold


def renewal_hash(state: ProofState, inv: SecurityInventory, at: TimeInstant,
                 threshold: int = RENEWAL_THRESHOLD) -> HashFunctionId:
    return select_hash(inv, state.current_hash, at, threshold)


def renew(record, docs: DocumentsArg, at: TimeInstant, attester: Attester,
          inv: Optional[SecurityInventory] = None, hash_fn: Optional[HashFunctionId] = None,
          threshold: int = RENEWAL_THRESHOLD) -> ProofState:
    """
    Renouvelle une preuve selon sa structure.

    Args:
        record (EvidenceRecord | ProofState): Preuve à renouveler
        docs: Documents protégés (requis pour un renouvellement du hachage)
        at (TimeInstant): Date du renouvellement
        attester (Attester): Fournisseur d'attestation
        inv (Optional[SecurityInventory]): Inventaire courant
        hash_fn (Optional[HashFunctionId]): Fonction imposée (sinon choisie
            d'après l'inventaire)
        threshold (int): Seuil de renouvellement en secondes

    Returns:
        ProofState: Nouvel état
    """
    state = _state_of(record)
    inv = resolve_inventory(inv)
    h = hash_fn or renewal_hash(state, inv, at, threshold)
    kind = state.kind
    if kind is StructureKind.AS:
        return as_renew(state, docs, at, h, attester, inv)
    if kind is StructureKind.MTS:
        return mts_renew(state, docs, at, h, attester, inv)
    if kind is StructureKind.NAW:
        return naw_renew(state, docs, at, h, attester, inv)
    return append_element(state, docs, at, h, attester, inventory=inv)


def renew_if_due(record, docs: DocumentsArg, at: TimeInstant, attester: Attester,
                 inv: Optional[SecurityInventory] = None,
                 threshold: int = RENEWAL_THRESHOLD) -> Optional[ProofState]:
    """Renouvelle la preuve si nécessaire; ``None`` sinon."""
    state = _state_of(record)
    if not needs_renewal(state, inv, at, threshold):
        return None
    logger.info("%s: renouvellement dû le %s", state.kind, at)
    return renew(state, docs, at, attester, inv, threshold=threshold)


def add_document(record, doc: InputData, at: TimeInstant, attester: Attester, docs: DocumentsArg = None,
                 inv: Optional[SecurityInventory] = None, hash_fn: Optional[HashFunctionId] = None,
                 threshold: int = RENEWAL_THRESHOLD) -> ProofState:
    """
    Ajoute un document à une MDS ou une SLS.

    Raises:
        ValueError: Si la structure n'accepte pas de nouveaux documents
    """
    state = _state_of(record)
    if not state.kind.appends_documents:
        raise ValueError(f"{state.kind}: ajout de documents impossible, migrer vers MDS ou SLS")
    inv = resolve_inventory(inv)
    h = hash_fn or renewal_hash(state, inv, at, threshold)
    available = list(_documents(docs)) + [doc]
    return append_element(state, available, at, h, attester, item=document_item(doc), inventory=inv)


def _documents(docs: DocumentsArg) -> Sequence[InputData]:
    if docs is None:
        return []
    if isinstance(docs, InputData):
        return [docs]
    return list(docs)


def protect(kind: StructureKind, docs: Sequence[InputData], t: TimeInstant, h: HashFunctionId,
            attester: Attester, name: str = "documents") -> ProofState:
    """
    Protège un ensemble de documents avec la structure ``kind``.

    AS et NAW protègent un document, ou la racine d'un lot s'il y en a
    plusieurs; MDS et SLS ajoutent les documents un par un.

    Raises:
        EmptyLeafList: Si aucun document n'est fourni
    """
    docs = list(docs)
    if not docs:
        raise EmptyLeafList("Aucun document à protéger")
    if kind is StructureKind.MTS:
        return mts_init(docs, t, h, attester)
    if kind is StructureKind.NAW:
        if len(docs) == 1:
            return naw_init(docs[0], t, h, attester)
        return naw_init_batch(name, docs, t, h, attester)
    if kind is StructureKind.AS:
        if len(docs) == 1:
            return as_init(docs[0], t, h, attester)
        return init_with_item(kind, batch_item(name, [doc.name for doc in docs]), docs, t, h, attester)

    state = init_with_item(kind, document_item(docs[0]), docs[0], t, h, attester)
    for index, doc in enumerate(docs[1:], start=1):
        state = append_element(state, docs[:index + 1], t, h, attester, item=document_item(doc))
    return state
