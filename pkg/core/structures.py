"""
Structures de preuve en séquence: AS, MTS, MDS et SLS.

Chaque opération prépare d'abord la nouvelle entrée de la chaîne (élément
protégé, arbres et chemins, liens), calcule ses octets attestés avec
:mod:`core.payload`, puis demande l'attestation et collecte ses données de
vérification. Avant tout renouvellement, l'attestation la plus récente doit
être encore valide et ses données de vérification sont collectées à nouveau
à la date du renouvellement.

- AS: une attestation par renouvellement, sur la précédente ou, lors d'un
  renouvellement du hachage, sur le document et toute la chaîne;
- MTS: un arbre de Merkle sur tous les documents, reconstruit à chaque
  renouvellement du hachage avec les chemins précédents;
- MDS: un document ajouté par entrée; le renouvellement du hachage
  construit un arbre sur tous les éléments précédents;
- SLS: comme MDS, chaque élément portant en plus ses liens de saut.
"""

import logging
from dataclasses import replace
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from models.attestation import AttestRequest
from models.document import InputData
from models.errors import EmptyLeafList, RenewalWindowMissed
from models.evidence import (
    ChainEntry, EntryKind, MigrationReceipt, ProofState, ProtectedItem, StructureKind, TreeRecord,
)
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant

from .attestation import Attester
from .crypto_core import hash_bytes
from .merkle import MerkleTree
from .payload import (
    DocumentContext, build_batch_tree, element_leaf, item_digest, member_bytes, mts_leaf, sls_links,
)
from .security_inventory import SecurityInventory, default_lenstra_inventory, validity_estimate

logger = logging.getLogger(__name__)

DocumentsArg = Union[InputData, Iterable[InputData], None]


# =============================================================================
# Outils communs
# =============================================================================

def document_context(docs: DocumentsArg) -> DocumentContext:
    if docs is None:
        return DocumentContext()
    if isinstance(docs, InputData):
        return DocumentContext.of([docs])
    return DocumentContext.of(docs)


def document_item(doc: InputData) -> ProtectedItem:
    return ProtectedItem(doc.name, (doc.name,))


def batch_item(name: str, leaves: Sequence[str], receipt: Optional[int] = None) -> ProtectedItem:
    if not leaves:
        raise EmptyLeafList(f"Lot {name} vide")
    return ProtectedItem(name, tuple(leaves), batch=True, receipt=receipt)


def resolve_inventory(inventory: Optional[SecurityInventory]) -> SecurityInventory:
    return inventory if inventory is not None else default_lenstra_inventory()


def check_renewal_window(state: ProofState, t: TimeInstant, inv: SecurityInventory) -> TimeInstant:
    """
    Raises:
        RenewalWindowMissed: Si l'attestation la plus récente a expiré à ``t``
    """
    last = state.last_entry
    limit = validity_estimate(inv, last.attestation, last.verification_data.leaf)
    if t >= limit:
        raise RenewalWindowMissed(
            f"{state.kind}: attestation {len(state.entries) - 1} expirée le {limit}, "
            f"renouvellement demandé le {t}"
        )
    return limit


def check_hash_order(state: ProofState, hash_fn: HashFunctionId):
    if hash_fn < state.current_hash:
        raise ValueError(f"{hash_fn} est plus faible que la fonction courante {state.current_hash}")


def refresh_verification_data(state: ProofState, t: TimeInstant, attester: Attester) -> ProofState:
    """Collecte v_{n-1} à la date du renouvellement."""
    last = state.last_entry
    return state.with_last_verification_data(attester.verification_data(last.attestation, t))


def add_item(state: ProofState, item: ProtectedItem, hash_fn: HashFunctionId,
             ctx: DocumentContext) -> Tuple[ProofState, int]:
    """Ajoute un élément protégé (et l'arbre du lot sous ``hash_fn``)."""
    if item.batch and item.batch_tree(hash_fn) is None:
        item = replace(item, batch_trees=item.batch_trees + (build_batch_tree(state, item, hash_fn, ctx),))
    return replace(state, items=state.items + (item,)), len(state.items)


def rebatch(state: ProofState, hash_fn: HashFunctionId, ctx: DocumentContext) -> ProofState:
    """Construit l'arbre de chaque lot sous la nouvelle fonction de hachage."""
    items = []
    for item in state.items:
        if item.batch and item.batch_tree(hash_fn) is None:
            item = replace(item, batch_trees=item.batch_trees + (build_batch_tree(state, item, hash_fn, ctx),))
        items.append(item)
    return replace(state, items=tuple(items))


def draft_entry(kind: EntryKind, hash_fn: HashFunctionId, **fields) -> ChainEntry:
    """Entrée en préparation: attestation et données de vérification à venir."""
    return ChainEntry(kind, hash_fn, None, None, **fields)


def payload_request(staged: ProofState, index: int, ctx: DocumentContext, t: TimeInstant) -> AttestRequest:
    entry = staged.entries[index]
    payload = member_bytes(staged, index, ctx)
    return AttestRequest(hash_bytes(entry.hash_fn, payload), entry.hash_fn, t)


def seal(staged: ProofState, index: int, attestation, verification_data, shared=None) -> ProofState:
    """Complète l'entrée préparée ``index``."""
    entry = replace(staged.entries[index], attestation=attestation,
                    verification_data=verification_data, shared=shared)
    entries = list(staged.entries)
    entries[index] = entry
    return replace(staged, entries=tuple(entries))


def attest_entry(staged: ProofState, ctx: DocumentContext, t: TimeInstant, attester: Attester) -> ProofState:
    """Atteste la dernière entrée préparée."""
    index = len(staged.entries) - 1
    attestation = attester.attest(payload_request(staged, index, ctx, t), t)
    data = attester.verification_data(attestation, t)
    return seal(staged, index, attestation, data)


def grow_item_tree(state: ProofState, hash_fn: HashFunctionId, ctx: DocumentContext) -> Tuple[ProofState, int]:
    """Arbre MTS sur tous les éléments, chaque feuille portant ses chemins précédents."""
    k = len(state.trees)
    leaves = [mts_leaf(state, i, k, ctx, hash_fn=hash_fn) for i in range(len(state.items))]
    tree = MerkleTree(hash_fn, leaves)
    items = tuple(replace(item, paths=item.paths + ((k, tree.auth_path(i)),))
                  for i, item in enumerate(state.items))
    record = TreeRecord(hash_fn, tree.root, len(state.entries), len(leaves))
    return replace(state, items=items, trees=state.trees + (record,)), k


def grow_element_tree(state: ProofState, hash_fn: HashFunctionId, ctx: DocumentContext) -> Tuple[ProofState, int]:
    """Arbre de renouvellement du hachage sur tous les éléments existants (MDS, SLS)."""
    k = len(state.trees)
    count = len(state.entries)
    leaves = [element_leaf(state, e, k, ctx, hash_fn=hash_fn) for e in range(count)]
    tree = MerkleTree(hash_fn, leaves)
    entries = tuple(replace(entry, paths=entry.paths + ((k, tree.auth_path(e)),))
                    for e, entry in enumerate(state.entries))
    record = TreeRecord(hash_fn, tree.root, count, count)
    return replace(state, entries=entries, trees=state.trees + (record,)), k


# =============================================================================
# Préparation des entrées
# =============================================================================

def stage_init(kind: StructureKind, items: Sequence[ProtectedItem], docs: DocumentsArg,
               h0: HashFunctionId,
               receipts: Sequence[MigrationReceipt] = ()) -> Tuple[ProofState, DocumentContext]:
    """
    Prépare l'entrée initiale d'une structure en séquence.

    Une MTS protège tous les éléments sous la racine r_0; les autres
    structures commencent avec un seul élément.

    Raises:
        EmptyLeafList: Si aucun élément n'est fourni
    """
    if not items:
        raise EmptyLeafList(f"{kind}: aucun document à protéger")
    if kind is not StructureKind.MTS and len(items) != 1:
        raise ValueError(f"{kind}: un seul élément à l'initialisation")
    ctx = document_context(docs)
    state = ProofState(kind, receipts=tuple(receipts))
    for item in items:
        state, _ = add_item(state, item, h0, ctx)
    if kind is StructureKind.MTS:
        state, k = grow_item_tree(state, h0, ctx)
        return state.with_entry(draft_entry(EntryKind.INIT, h0, tree=k)), ctx
    digest = item_digest(state, 0, h0, ctx)
    return state.with_entry(draft_entry(EntryKind.INIT, h0, item=0, item_digest=digest)), ctx


def _element_kind(has_item: bool, hash_change: bool, attach: bool, kind: StructureKind) -> EntryKind:
    if not hash_change:
        return EntryKind.ADD if has_item else EntryKind.RENEWAL
    if not has_item:
        return EntryKind.HASH_RENEWAL
    if attach and kind is StructureKind.MDS:
        return EntryKind.ATTACH_HASH_RENEWAL
    return EntryKind.ADD_HASH_RENEWAL


def stage_renewal(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                  attester: Attester, inventory: Optional[SecurityInventory] = None,
                  item: Optional[ProtectedItem] = None,
                  attach: bool = False) -> Tuple[ProofState, DocumentContext]:
    """
    Prépare l'entrée suivante d'une structure en séquence.

    Args:
        state (ProofState): État AS, MTS, MDS ou SLS
        docs: Documents disponibles (tous requis lors d'un renouvellement
            du hachage)
        t (TimeInstant): Date du renouvellement
        h (HashFunctionId): Fonction de hachage de l'entrée
        attester (Attester): Fournisseur (collecte de v_{n-1})
        inventory (Optional[SecurityInventory]): Inventaire courant
        item (Optional[ProtectedItem]): Élément ajouté (MDS, SLS)
        attach (bool): Racine d'un lot de documents rattaché

    Raises:
        RenewalWindowMissed: Si l'attestation précédente a expiré
    """
    if item is not None and not state.kind.appends_documents:
        raise ValueError(f"{state.kind}: ajout de documents impossible")
    check_renewal_window(state, t, resolve_inventory(inventory))
    check_hash_order(state, h)
    ctx = document_context(docs)
    state = refresh_verification_data(state, t, attester)
    n = len(state.entries)
    hash_change = h != state.current_hash

    if not state.kind.appends_documents:
        if not hash_change:
            return state.with_entry(draft_entry(EntryKind.RENEWAL, h)), ctx
        state = rebatch(state, h, ctx)
        tree = None
        if state.kind is StructureKind.MTS:
            state, tree = grow_item_tree(state, h, ctx)
        return state.with_entry(draft_entry(EntryKind.HASH_RENEWAL, h, tree=tree)), ctx

    index = digest = None
    if item is not None:
        state, index = add_item(state, replace(item, entry=n), h, ctx)
        digest = item_digest(state, index, h, ctx)
    tree = None
    if hash_change:
        state = rebatch(state, h, ctx)
        state, tree = grow_element_tree(state, h, ctx)
    links = sls_links(state, n, h) if state.kind is StructureKind.SLS else ()
    kind = _element_kind(item is not None, hash_change, attach, state.kind)
    return state.with_entry(draft_entry(kind, h, item=index, item_digest=digest, tree=tree, links=links)), ctx


def init_with_item(kind: StructureKind, item: ProtectedItem, docs: DocumentsArg, t0: TimeInstant,
                   h0: HashFunctionId, attester: Attester,
                   receipts: Sequence[MigrationReceipt] = ()) -> ProofState:
    """Initialisation d'une structure protégeant d'abord un seul élément (AS, MDS, SLS)."""
    staged, ctx = stage_init(kind, [item], docs, h0, receipts)
    state = attest_entry(staged, ctx, t0, attester)
    logger.info("%s: initialisation de %s avec %s le %s", kind, item.name, h0, t0)
    return state


def _renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId, attester: Attester,
           inventory: Optional[SecurityInventory], item: Optional[ProtectedItem] = None,
           attach: bool = False) -> ProofState:
    staged, ctx = stage_renewal(state, docs, t, h, attester, inventory, item, attach)
    renewed = attest_entry(staged, ctx, t, attester)
    logger.info("%s: entrée %d (%s, %s) le %s", state.kind, len(renewed.entries) - 1,
                renewed.last_entry.kind.value, h, t)
    return renewed


# =============================================================================
# AS
# =============================================================================

def as_init(d: InputData, t0: TimeInstant, h0: HashFunctionId, attester: Attester) -> ProofState:
    """
    Initialise une séquence d'attestations: a_0 sur H_0 || H_0(d).

    Args:
        d (InputData): Document signé
        t0 (TimeInstant): Date de l'initialisation
        h0 (HashFunctionId): Fonction de hachage initiale
        attester (Attester): Fournisseur d'attestation

    Returns:
        ProofState: État avec une attestation
    """
    return init_with_item(StructureKind.AS, document_item(d), d, t0, h0, attester)


def as_renew(state: ProofState, d: DocumentsArg, t: TimeInstant, h: HashFunctionId,
             attester: Attester, inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Renouvelle une AS: renouvellement de l'attestation si ``h`` est la
    fonction courante, renouvellement du hachage sinon (le document est
    alors requis).

    Raises:
        RenewalWindowMissed: Si l'attestation précédente a expiré
    """
    _require_kind(state, StructureKind.AS)
    return _renew(state, d, t, h, attester, inventory)


# =============================================================================
# MTS
# =============================================================================

def mts_init_items(items: Sequence[ProtectedItem], docs: DocumentsArg, t0: TimeInstant, h0: HashFunctionId,
                   attester: Attester, receipts: Sequence[MigrationReceipt] = ()) -> ProofState:
    staged, ctx = stage_init(StructureKind.MTS, items, docs, h0, receipts)
    state = attest_entry(staged, ctx, t0, attester)
    logger.info("MTS: initialisation de %d élément(s) avec %s le %s", len(items), h0, t0)
    return state


def mts_init(docs: Sequence[InputData], t0: TimeInstant, h0: HashFunctionId, attester: Attester) -> ProofState:
    """
    Initialise une séquence d'arbres de Merkle: a_0 sur H_0 || r_0.

    Raises:
        EmptyLeafList: Si aucun document n'est fourni
    """
    docs = list(docs)
    return mts_init_items([document_item(doc) for doc in docs], docs, t0, h0, attester)


def mts_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
              attester: Attester, inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Renouvelle une MTS. Le renouvellement du hachage reconstruit l'arbre sur
    les feuilles d_i || p_{i,0} || ... || p_{i,k-1} et atteste
    H_n || r_k || H_n(a_0 || v_0 || ... || a_{n-1} || v_{n-1}).
    """
    _require_kind(state, StructureKind.MTS)
    return _renew(state, docs, t, h, attester, inventory)


# =============================================================================
# MDS et SLS
# =============================================================================

def append_element(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                   attester: Attester, item: Optional[ProtectedItem] = None, attach: bool = False,
                   inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Ajoute un élément à une MDS ou une SLS, avec ou sans élément protégé.

    Raises:
        RenewalWindowMissed: Si l'attestation précédente a expiré
    """
    if not state.kind.appends_documents:
        raise ValueError(f"{state.kind}: ajout de documents impossible")
    return _renew(state, docs, t, h, attester, inventory, item, attach)


def _require_kind(state: ProofState, kind: StructureKind):
    if state.kind is not kind:
        raise ValueError(f"Preuve {state.kind}: {kind} attendue")


def _hash_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                attester: Attester, doc: Optional[InputData],
                inventory: Optional[SecurityInventory]) -> ProofState:
    if h == state.current_hash:
        raise ValueError(f"{h} est déjà la fonction de hachage courante")
    available: List[InputData] = list(document_context(docs).documents.values())
    if doc is not None:
        available.append(doc)
    item = document_item(doc) if doc is not None else None
    return append_element(state, available, t, h, attester, item=item, inventory=inventory)


def _add_renew(state: ProofState, doc: InputData, t: TimeInstant, h: HashFunctionId,
               attester: Attester, docs: DocumentsArg, inventory: Optional[SecurityInventory]) -> ProofState:
    available = list(document_context(docs).documents.values()) + [doc]
    return append_element(state, available, t, h, attester, item=document_item(doc), inventory=inventory)


def mds_init(d: InputData, t0: TimeInstant, h0: HashFunctionId, attester: Attester) -> ProofState:
    """Initialise une MDS avec son premier document."""
    return init_with_item(StructureKind.MDS, document_item(d), d, t0, h0, attester)


def mds_add_renew(state: ProofState, d: InputData, t: TimeInstant, h: HashFunctionId,
                  attester: Attester, docs: DocumentsArg = None,
                  inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Ajoute un document à une MDS: H_n || H_n(H_n(d_n) || a_{n-1} || v_{n-1}),
    ou H_n || r_k || H_n(d_n) si ``h`` change la fonction de hachage.
    """
    _require_kind(state, StructureKind.MDS)
    return _add_renew(state, d, t, h, attester, docs, inventory)


def mds_hash_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                   attester: Attester, d: Optional[InputData] = None,
                   inventory: Optional[SecurityInventory] = None) -> ProofState:
    """Renouvellement du hachage d'une MDS (avec ou sans nouveau document)."""
    _require_kind(state, StructureKind.MDS)
    return _hash_renew(state, docs, t, h, attester, d, inventory)


def mds_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
              attester: Attester, inventory: Optional[SecurityInventory] = None) -> ProofState:
    """Renouvellement sans nouveau document (règle de l'AS sur le dernier élément)."""
    _require_kind(state, StructureKind.MDS)
    return append_element(state, docs, t, h, attester, inventory=inventory)


def sls_init(d: InputData, t0: TimeInstant, h0: HashFunctionId, attester: Attester) -> ProofState:
    """Initialise une SLS avec son premier document."""
    return init_with_item(StructureKind.SLS, document_item(d), d, t0, h0, attester)


def sls_add_renew(state: ProofState, d: InputData, t: TimeInstant, h: HashFunctionId,
                  attester: Attester, docs: DocumentsArg = None,
                  inventory: Optional[SecurityInventory] = None) -> ProofState:
    """Ajoute un document à une SLS: H_n || e_n avec ses liens de saut."""
    _require_kind(state, StructureKind.SLS)
    return _add_renew(state, d, t, h, attester, docs, inventory)


def sls_hash_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                   attester: Attester, d: Optional[InputData] = None,
                   inventory: Optional[SecurityInventory] = None) -> ProofState:
    _require_kind(state, StructureKind.SLS)
    return _hash_renew(state, docs, t, h, attester, d, inventory)


def sls_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
              attester: Attester, inventory: Optional[SecurityInventory] = None) -> ProofState:
    """Élément sans document portant uniquement ses liens."""
    _require_kind(state, StructureKind.SLS)
    return append_element(state, docs, t, h, attester, inventory=inventory)
