"""
Enveloppe d'attestation notariale (NAW).

La preuve ne contient qu'une seule attestation, émise par une autorité
notariale. À chaque renouvellement la NA vérifie l'attestation courante,
en émet une nouvelle portant toujours la date initiale t_0, et l'ancienne
est supprimée. Un renouvellement du hachage ajoute H_n || H_n(d) à
l'historique revendiqué.
"""

import logging
from dataclasses import replace
from typing import Optional, Sequence, Tuple

from models.attestation import AttestRequest, IssuerKind, NaExtras
from models.certificate import Certificate
from models.document import InputData
from models.errors import IncompatibleAttester, MissingDocument
from models.evidence import (
    EntryKind, MigrationReceipt, NotarialState, ProofState, ProtectedItem, StructureKind,
)
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant

from .attestation import Attester, notarial_payload
from .crypto_core import hash_bytes
from .payload import DocumentContext, item_digest
from .security_inventory import SecurityInventory
from .structures import (
    DocumentsArg, add_item, batch_item, check_hash_order, check_renewal_window, document_context,
    document_item, draft_entry, rebatch, resolve_inventory, seal,
)

logger = logging.getLogger(__name__)


def require_notary(attester: Attester):
    """
    Raises:
        IncompatibleAttester: Si le fournisseur n'est pas une NA
    """
    if attester.kind != IssuerKind.NA:
        raise IncompatibleAttester("Le NAW requiert une autorité notariale (signature d'horodatage refusée)")


def signer_certificate(ctx: DocumentContext, item: ProtectedItem) -> Certificate:
    """Certificat ``c`` du signataire: celui du premier document disponible."""
    for leaf in item.leaves:
        if ctx.has(leaf):
            return ctx.document(leaf).signature.signer_cert
    raise MissingDocument(f"Aucun document signé pour {item.name}")


def stage_naw_init(item: ProtectedItem, docs: DocumentsArg, t: TimeInstant, h0: HashFunctionId,
                   original_time: Optional[TimeInstant] = None,
                   receipts: Sequence[MigrationReceipt] = ()) -> Tuple[ProofState, DocumentContext]:
    """Prépare l'entrée initiale d'un NAW (t_0 vaut ``t`` par défaut)."""
    ctx = document_context(docs)
    state, index = add_item(ProofState(StructureKind.NAW, receipts=tuple(receipts)), item, h0, ctx)
    digest = item_digest(state, index, h0, ctx)
    notarial = NotarialState(original_time or t, signer_certificate(ctx, item), ((h0, digest),))
    draft = draft_entry(EntryKind.INIT, h0, item=index, item_digest=digest)
    return replace(state, notarial=notarial).with_entry(draft), ctx


def stage_naw_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
                    inventory: Optional[SecurityInventory] = None) -> Tuple[ProofState, DocumentContext]:
    """
    Prépare l'entrée qui remplacera l'attestation courante.

    Raises:
        RenewalWindowMissed: Si l'attestation courante a expiré
    """
    if state.kind is not StructureKind.NAW:
        raise ValueError(f"Preuve {state.kind}: NAW attendu")
    check_renewal_window(state, t, resolve_inventory(inventory))
    check_hash_order(state, h)
    ctx = document_context(docs)
    notarial = state.notarial
    history = notarial.history
    hash_change = h != state.current_hash
    if hash_change:
        state = rebatch(state, h, ctx)
        history = history + ((h, item_digest(state, 0, h, ctx)),)
    kind = EntryKind.HASH_RENEWAL if hash_change else EntryKind.RENEWAL
    draft = draft_entry(kind, h, item=0, item_digest=history[-1][1])
    return replace(state, entries=(draft,), notarial=replace(notarial, history=history)), ctx


def _notarize(staged: ProofState, extras: NaExtras, t: TimeInstant, na: Attester) -> ProofState:
    h = staged.last_entry.hash_fn
    payload = notarial_payload(extras.history, extras.certificate)
    attestation = na.attest(AttestRequest(hash_bytes(h, payload), h, t, extras), t)
    return seal(staged, 0, attestation, na.verification_data(attestation, t))


def naw_init_item(item: ProtectedItem, docs: DocumentsArg, t: TimeInstant, h0: HashFunctionId,
                  na: Attester, original_time: Optional[TimeInstant] = None,
                  receipts: Sequence[MigrationReceipt] = ()) -> ProofState:
    require_notary(na)
    staged, _ = stage_naw_init(item, docs, t, h0, original_time, receipts)
    notarial = staged.notarial
    extras = NaExtras(notarial.certificate, notarial.history, original_time=original_time)
    state = _notarize(staged, extras, t, na)
    logger.info("NAW: initialisation de %s (t0=%s) le %s", item.name, notarial.original_time, t)
    return state


def naw_init(d: InputData, t: TimeInstant, h0: HashFunctionId, na: Attester,
             original_time: Optional[TimeInstant] = None) -> ProofState:
    """
    Initialise un NAW pour un document.

    Args:
        d (InputData): Document signé
        t (TimeInstant): Heure courante
        h0 (HashFunctionId): Fonction de hachage initiale
        na (Attester): Autorité notariale
        original_time (Optional[TimeInstant]): t_0 revendiquée (migration)

    Raises:
        IncompatibleAttester: Si ``na`` n'est pas une NA
        NotaryAbort: Si la NA refuse d'attester
    """
    return naw_init_item(document_item(d), d, t, h0, na, original_time)


def naw_init_batch(name: str, docs: Sequence[InputData], t: TimeInstant, h0: HashFunctionId,
                   na: Attester, original_time: Optional[TimeInstant] = None) -> ProofState:
    """NAW sur la racine d'un lot de documents (``c`` est celui du premier)."""
    docs = list(docs)
    return naw_init_item(batch_item(name, [doc.name for doc in docs]), docs, t, h0, na, original_time)


def naw_renew(state: ProofState, docs: DocumentsArg, t: TimeInstant, h: HashFunctionId,
              na: Attester, inventory: Optional[SecurityInventory] = None) -> ProofState:
    """
    Renouvelle un NAW: la nouvelle attestation remplace l'ancienne.

    Raises:
        IncompatibleAttester: Si ``na`` n'est pas une NA
        RenewalWindowMissed: Si l'attestation courante a expiré
        NotaryAbort: Si la NA refuse d'attester
    """
    require_notary(na)
    prior = state.last_entry
    staged, _ = stage_naw_renew(state, docs, t, h, inventory)
    notarial = staged.notarial
    extras = NaExtras(
        certificate=notarial.certificate,
        history=notarial.history,
        original_time=notarial.original_time,
        prior_attestation=prior.attestation,
        prior_verification_data=na.verification_data(prior.attestation, t),
        prior_path=prior.shared.path if prior.shared is not None else None,
    )
    renewed = _notarize(staged, extras, t, na)
    logger.info("NAW: %s (%s) le %s, attestation précédente supprimée",
                renewed.last_entry.kind.value, h, t)
    return renewed
