"""
Migration des preuves d'existence vers une autre structure.

La preuve d'origine est d'abord vérifiée: une preuve défectueuse n'est
jamais migrée. Ensuite:

- vers une séquence (AS, MTS, MDS, SLS): la preuve d'un document unique
  (AS, NAW) devient l'élément a_n || v_n de la structure cible; la preuve
  de plusieurs documents devient un lot dont chaque feuille contient un
  document et la preuve d'origine. Une MDS ou une SLS existante reçoit les
  données migrées comme nouvel élément;
- vers un NAW: la NA atteste chaque document (ou la racine du lot) avec la
  date de sa première attestation; la preuve d'origine est supprimée.

La vérification d'un document migré se fait en deux étapes: la preuve
d'origine à la date de migration, puis la nouvelle structure.
"""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

from models.document import InputData
from models.errors import MigrationRefused
from models.evidence import (
    EvidenceRecord, MigrationMode, MigrationReceipt, ProofState, ProtectedItem, StructureKind,
)
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant
from models.verdict import Verdict

from .attestation import Attester
from .notarial_wrapper import naw_init_item, require_notary
from .security_inventory import SecurityInventory
from .structures import (
    DocumentsArg, append_element, batch_item, document_context, init_with_item, mts_init_items,
    resolve_inventory,
)
from .verification import start_entry, verify_proof

logger = logging.getLogger(__name__)


def _first_diagnostic(verdict: Verdict) -> str:
    diagnostics = verdict.diagnostics + [d for doc in verdict.documents for d in doc.diagnostics]
    return str(diagnostics[0]) if diagnostics else "preuve invalide"


def check_source(source: EvidenceRecord, docs: DocumentsArg, t: TimeInstant, inv: SecurityInventory):
    """
    Raises:
        MigrationRefused: Si la preuve d'origine n'est pas valide à ``t``
    """
    verdict = verify_proof(source, document_context(docs).documents, inv, at=t)
    if not verdict.valid:
        raise MigrationRefused(f"Migration de {source.name} refusée: {_first_diagnostic(verdict)}")


def document_first_time(state: ProofState, name: str) -> TimeInstant:
    """Date de la première attestation ayant protégé le document ``name``."""
    if state.notarial is not None:
        return state.notarial.original_time
    for index, item in state.items_for_document(name):
        if item.receipt is not None:
            receipt = state.receipts[item.receipt]
            if receipt.source_record is not None:
                return document_first_time(receipt.source_record.state, name)
            if receipt.first_attestation_time is not None:
                return receipt.first_attestation_time
        return state.entries[start_entry(state, index)].attestation.stated_time
    raise MigrationRefused(f"Document {name} absent de la preuve d'origine")


def migration_mode(source: EvidenceRecord) -> MigrationMode:
    if source.kind.protects_single_document:
        return MigrationMode.SINGLE
    return MigrationMode.MULTI


def migrate_to_sequence(source: EvidenceRecord, docs: DocumentsArg, target_kind: StructureKind,
                        t: TimeInstant, h: HashFunctionId, attester: Attester,
                        target: Optional[ProofState] = None, target_docs: DocumentsArg = None,
                        inventory: Optional[SecurityInventory] = None) -> Tuple[ProofState, MigrationReceipt]:
    """
    Migre une preuve vers une structure en séquence.

    Args:
        source (EvidenceRecord): Preuve d'origine
        docs: Documents protégés par la preuve d'origine
        target_kind (StructureKind): AS, MTS, MDS ou SLS
        t (TimeInstant): Date de la migration
        h (HashFunctionId): Fonction de hachage de la structure cible
        attester (Attester): Fournisseur de la structure cible
        target (Optional[ProofState]): MDS ou SLS existante recevant les
            données migrées
        target_docs: Documents déjà protégés par ``target``
        inventory (Optional[SecurityInventory]): Inventaire courant

    Returns:
        Tuple[ProofState, MigrationReceipt]: Nouvel état et reçu

    Raises:
        MigrationRefused: Si la preuve d'origine est invalide
    """
    if not target_kind.is_sequence:
        raise ValueError("Migration vers un NAW: utiliser migrate_to_naw")
    if target is not None and (target.kind is not target_kind or not target_kind.appends_documents):
        raise ValueError(f"Seule une MDS ou une SLS existante peut recevoir une migration ({target_kind})")
    inv = resolve_inventory(inventory)
    ctx = document_context(docs)
    check_source(source, ctx.documents.values(), t, inv)

    last = source.state.last_entry
    refreshed = source.with_state(
        source.state.with_last_verification_data(attester.verification_data(last.attestation, t)))
    names = source.state.document_names
    mode = migration_mode(source)
    receipt = MigrationReceipt(
        source_kind=source.kind,
        target_kind=target_kind,
        migrated_at=t,
        mode=mode,
        documents=names,
        source_record=refreshed,
        first_attestation_time=source.state.first_attestation_time(),
    )
    receipt_index = len(target.receipts) if target is not None else 0
    if mode is MigrationMode.SINGLE:
        items = [ProtectedItem(source.name, (source.name,), receipt=receipt_index)]
    elif target_kind is StructureKind.MTS:
        items = [ProtectedItem(name, (name,), receipt=receipt_index) for name in names]
    else:
        items = [batch_item(source.name, names, receipt=receipt_index)]

    available = list(ctx.documents.values())
    if target is not None:
        state = replace(target, receipts=target.receipts + (receipt,))
        available = list(document_context(target_docs).documents.values()) + available
        state = append_element(state, available, t, h, attester, item=items[0], inventory=inv)
    elif target_kind is StructureKind.MTS:
        state = mts_init_items(items, available, t, h, attester, receipts=(receipt,))
    else:
        state = init_with_item(target_kind, items[0], available, t, h, attester, receipts=(receipt,))
    logger.info("Migration %s -> %s (%s, %d document(s)) le %s",
                source.kind, target_kind, mode.value, len(names), t)
    return state, receipt


def migrate_to_naw(source: EvidenceRecord, docs: Sequence[InputData], na: Attester, t: TimeInstant,
                   h: Optional[HashFunctionId] = None, batch: bool = False,
                   inventory: Optional[SecurityInventory] = None) -> List[ProofState]:
    """
    Migre une preuve vers des NAW.

    Par défaut un NAW est créé par document; avec ``batch`` un seul NAW
    protège la racine de tous les documents. La date t_0 est celle de la
    première attestation du document; la preuve d'origine n'est pas
    conservée.

    Raises:
        IncompatibleAttester: Si ``na`` n'est pas une NA
        MigrationRefused: Si la preuve d'origine est invalide
        NotaryAbort: Si la NA refuse d'attester
    """
    require_notary(na)
    inv = resolve_inventory(inventory)
    docs = list(docs)
    check_source(source, docs, t, inv)
    h = h or source.state.current_hash
    by_name = {doc.name: doc for doc in docs}
    names = [name for name in source.state.document_names if name in by_name]
    if not names:
        raise MigrationRefused(f"Aucun document de {source.name} fourni")

    def receipt_for(documents: Tuple[str, ...], t0: TimeInstant) -> MigrationReceipt:
        return MigrationReceipt(source.kind, StructureKind.NAW, t, MigrationMode.NOTARIAL, documents,
                                first_attestation_time=t0)

    if batch:
        t0 = min(document_first_time(source.state, name) for name in names)
        item = batch_item(source.name, names, receipt=0)
        state = naw_init_item(item, [by_name[n] for n in names], t, h, na, original_time=t0,
                              receipts=(receipt_for(tuple(names), t0),))
        logger.info("Migration %s -> NAW (lot de %d documents, t0=%s)", source.kind, len(names), t0)
        return [state]

    states = []
    for name in names:
        t0 = document_first_time(source.state, name)
        item = ProtectedItem(name, (name,), receipt=0)
        states.append(naw_init_item(item, by_name[name], t, h, na, original_time=t0,
                                    receipts=(receipt_for((name,), t0),)))
        logger.info("Migration %s -> NAW: %s (t0=%s)", source.kind, name, t0)
    return states


def naw_records(source: EvidenceRecord, states: Sequence[ProofState], t: TimeInstant) -> List[EvidenceRecord]:
    """
    Enregistrements issus d'une migration vers des NAW: le nom de la preuve
    d'origine, suffixé du rang du document lorsqu'il y a plusieurs NAW.
    """
    if len(states) == 1:
        return [EvidenceRecord(source.name, states[0], t)]
    return [EvidenceRecord(f"{source.name}-{i:03d}", state, t) for i, state in enumerate(states)]


def na_attest_migrate(na: Attester, source: EvidenceRecord, docs: Sequence[InputData], clock: TimeInstant,
                      hash_fn: Optional[HashFunctionId] = None, batch: bool = False,
                      inventory: Optional[SecurityInventory] = None) -> List[EvidenceRecord]:
    """
    Migration confiée à l'autorité notariale: la NA vérifie la preuve
    d'origine puis émet les NAW datés de sa première attestation.

    Raises:
        IncompatibleAttester: Si ``na`` n'est pas une NA
        MigrationRefused: Si la preuve d'origine est invalide
    """
    states = migrate_to_naw(source, docs, na, clock, hash_fn, batch, inventory)
    return naw_records(source, states, clock)
