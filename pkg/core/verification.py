"""
Vérification des preuves d'existence.

Pour chaque document vérifié, la vérification parcourt la chaîne
d'attestations depuis l'entrée qui a ajouté le document jusqu'à la plus
récente et applique trois étapes à chaque entrée visitée:

1. recalcul des octets attestés à partir du document, de l'historique des
   fonctions de hachage, des chemins et des données de vérification;
2. vérification de l'attestation avec ses données de vérification;
3. l'attestation suivante a été émise avant la fin de validité de la
   précédente.

Une SLS saute les éléments intermédiaires en suivant ses liens de niveau
le plus élevé possible. Une preuve défectueuse ne lève jamais d'exception:
le verdict porte des diagnostics classés par catégorie.
"""

import logging
from dataclasses import replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

from models.certificate import Certificate
from models.document import InputData
from models.errors import MissingDocument, RecordFormatError
from models.evidence import EvidenceRecord, ProofState, StructureKind
from models.time_instant import TimeInstant
from models.verdict import Diagnostic, DiagnosticCategory, DocumentVerdict, Verdict

from .attestation import verify_attestation
from .crypto_core import certificate_signature_valid, verify_document
from .merkle import path_matches, recompute_root
from .payload import (
    DocumentContext, attested_bytes, element_leaf, item_digest, mts_leaf, sls_link, trailing_zeros,
)
from .security_inventory import SecurityInventory, default_lenstra_inventory, validity_estimate

logger = logging.getLogger(__name__)

Documents = Union[Mapping[str, InputData], Iterable[InputData], None]


def documents_by_name(docs: Documents) -> Dict[str, InputData]:
    if docs is None:
        return {}
    if isinstance(docs, InputData):
        return {docs.name: docs}
    if isinstance(docs, Mapping):
        return dict(docs)
    return {doc.name: doc for doc in docs}


def entry_validity(state: ProofState, index: int, inv: SecurityInventory) -> TimeInstant:
    """Fin de validité estimée de l'attestation ``index``."""
    entry = state.entries[index]
    return validity_estimate(inv, entry.attestation, entry.verification_data.leaf)


def proof_validity(state: ProofState, inv: SecurityInventory) -> TimeInstant:
    """Fin de validité de la preuve (celle de l'attestation la plus récente)."""
    return entry_validity(state, len(state.entries) - 1, inv)


def start_entry(state: ProofState, item_index: int) -> int:
    """Première entrée à vérifier pour un élément protégé."""
    if state.kind.appends_documents:
        return state.items[item_index].entry
    return 0


def walk(state: ProofState, start: int, inv: SecurityInventory, skip: bool = True) -> List[int]:
    """
    Entrées visitées depuis ``start`` jusqu'à la plus récente.

    Pour une SLS, chaque pas emprunte le lien de niveau le plus élevé qui
    ne franchit pas un renouvellement du hachage et dont la cible a été
    émise avant la fin de validité de l'élément courant.
    """
    last = len(state.entries) - 1
    if state.kind is StructureKind.NAW:
        return [last]
    if state.kind is not StructureKind.SLS or not skip:
        return list(range(start, last + 1))

    visited = [start]
    current = start
    while current < last:
        limit = entry_validity(state, current, inv)
        max_level = (last - current).bit_length() - 1
        if current > 0:
            max_level = min(max_level, trailing_zeros(current))
        target = current + 1
        for level in range(max_level, 0, -1):
            candidate = current + (1 << level)
            crossed = any(state.entries[i].kind.is_hash_renewal for i in range(current + 1, candidate))
            if not crossed and state.entries[candidate].attestation.stated_time < limit:
                target = candidate
                break
        visited.append(target)
        current = target
    return visited


def _link_level(predecessor: int, index: int) -> int:
    return (index - predecessor).bit_length() - 1


def audit_trees(state: ProofState, documents: Mapping[str, InputData]) -> List[Diagnostic]:
    """
    Contrôle des arbres de la structure, indépendamment des documents
    vérifiés: chaque arbre est attesté par l'entrée qu'il désigne, ses
    feuilles portent toutes un chemin à leur position et chaque chemin
    recalculable mène à la racine enregistrée.

    Args:
        state (ProofState): État contrôlé
        documents (Mapping[str, InputData]): Documents disponibles (les
            feuilles dont un document manque ne sont contrôlées que par
            leur position)

    Returns:
        List[Diagnostic]: Incohérences trouvées
    """
    ctx = DocumentContext(dict(documents))
    found: List[Diagnostic] = []

    def fail(message: str, entry: Optional[int] = None):
        found.append(Diagnostic(DiagnosticCategory.PATH_MISMATCH, message, entry=entry))

    element_trees = state.kind.appends_documents
    members = state.entries if element_trees else state.items
    for k, record in enumerate(state.trees):
        if record.entry >= len(state.entries) or state.entries[record.entry].tree != k:
            fail(f"arbre {k} non attesté par l'entrée {record.entry}", record.entry)
        holders = [i for i, member in enumerate(members) if member.path_in(k) is not None]
        if holders != list(range(record.size)):
            fail(f"arbre {k}: {len(holders)} chemin(s) pour {record.size} feuille(s)")
            continue
        for i in holders:
            path = members[i].path_in(k)
            if not path_matches(path, i, record.size):
                fail(f"arbre {k}: chemin incohérent pour la feuille {i}")
                continue
            try:
                leaf = element_leaf(state, i, k, ctx) if element_trees else mts_leaf(state, i, k, ctx)
            except MissingDocument:
                continue
            except (RecordFormatError, IndexError) as exc:
                fail(f"arbre {k}, feuille {i}: {exc}")
                continue
            if recompute_root(leaf, path) != record.root:
                fail(f"arbre {k}: racine différente depuis la feuille {i}")
    return found + ctx.mismatches


class _DocumentCheck:
    """Vérification d'un document dans une preuve."""

    def __init__(self, state: ProofState, name: str, documents: Dict[str, InputData],
                 inv: SecurityInventory, at: TimeInstant,
                 trusted_roots: Optional[Sequence[Certificate]], skip: bool):
        self.state = state
        self.name = name
        self.ctx = DocumentContext(dict(documents), focus=name)
        self.inv = inv
        self.at = at
        self.trusted_roots = trusted_roots
        self.skip = skip
        self.verdict = DocumentVerdict(name)

    def fail(self, category: DiagnosticCategory, message: str, entry: Optional[int] = None):
        self.verdict.diagnostics.append(Diagnostic(category, message, self.name, entry))

    def run(self) -> DocumentVerdict:
        found = list(self.state.items_for_document(self.name))
        if not found:
            self.fail(DiagnosticCategory.MISSING_DOCUMENT, "document absent de la preuve")
            return self.verdict
        if not self.ctx.has(self.name):
            self.fail(DiagnosticCategory.MISSING_DOCUMENT, "document non fourni")
            return self.verdict
        doc = self.ctx.document(self.name)
        if not verify_document(doc.document, doc.signature):
            self.fail(DiagnosticCategory.SIGNATURE_INVALID, "signature du document invalide")

        item_index, item = found[0]
        self._check_source(item)
        try:
            self._check_chain(item_index)
        except MissingDocument as exc:
            self.fail(DiagnosticCategory.MISSING_DOCUMENT, exc.message)
        except (RecordFormatError, IndexError) as exc:
            self.fail(DiagnosticCategory.PATH_MISMATCH, str(exc))
        self.verdict.diagnostics.extend(self.ctx.mismatches)
        return self.verdict

    def _check_source(self, item):
        """Première étape d'un document migré: la preuve d'origine."""
        if item.receipt is None:
            return
        receipt = self.state.receipts[item.receipt]
        source = receipt.source_record
        if source is None:
            return
        names = [self.name] if self.name in source.state.document_names else None
        sub = verify_proof(source, self.ctx.documents, self.inv, at=receipt.migrated_at,
                           documents=names, trusted_roots=self.trusted_roots, skip=self.skip)
        if not sub.valid:
            first = (sub.diagnostics + [d for doc in sub.documents for d in doc.diagnostics])[0]
            self.fail(DiagnosticCategory.SOURCE_INVALID,
                      f"preuve d'origine ({receipt.source_kind}) invalide: {first}")

    def _check_chain(self, item_index: int):
        state = self.state
        start = start_entry(state, item_index)
        if state.kind.appends_documents:
            bound = state.entries[start].item == item_index
        else:
            bound = state.items[item_index].entry == 0
        if not bound:
            self.fail(DiagnosticCategory.PATH_MISMATCH,
                      f"élément {item_index} non rattaché à l'entrée {start}", start)
            return
        first = state.entries[start]
        if first.item_digest is not None and first.item is not None:
            if item_digest(state, first.item, first.hash_fn, self.ctx) != first.item_digest:
                self.fail(DiagnosticCategory.DIGEST_MISMATCH,
                          f"empreinte {first.hash_fn} du document différente", start)
        if state.kind is StructureKind.NAW:
            self._check_notarial(item_index)

        visited = walk(state, start, self.inv, self.skip)
        predecessor = None
        for index in visited:
            self._check_entry(index, predecessor, start)
            self.verdict.touched.append(index)
            predecessor = index

        validity = entry_validity(state, visited[-1], self.inv)
        if self.at >= validity:
            self.fail(DiagnosticCategory.EXPIRED,
                      f"preuve expirée le {validity} (vérification le {self.at})", visited[-1])

    def _check_entry(self, index: int, predecessor: Optional[int], start: int):
        state = self.state
        entry = state.entries[index]
        if state.kind is StructureKind.SLS and predecessor is not None:
            level = _link_level(predecessor, index)
            if level >= len(entry.links) \
                    or entry.links[level] != sls_link(state, predecessor, entry.hash_fn):
                self.fail(DiagnosticCategory.DIGEST_MISMATCH,
                          f"lien de niveau {level} vers l'élément {predecessor} incorrect", index)

        payload = attested_bytes(state, index, self.ctx, previous=None if index == start else start)
        check = verify_attestation(entry.attestation, entry.verification_data, payload, self.inv,
                                   self.trusted_roots, entry=index)
        self.verdict.diagnostics.extend(replace(d, document=self.name) for d in check.diagnostics)
        if entry.verification_data.collected_at > self.at:
            self.fail(DiagnosticCategory.CHAIN_INVALID,
                      f"données collectées le {entry.verification_data.collected_at}, "
                      f"après la vérification ({self.at})", index)

        if predecessor is not None:
            validity = entry_validity(state, predecessor, self.inv)
            if entry.attestation.stated_time >= validity:
                self.fail(DiagnosticCategory.RENEWAL_GAP,
                          f"attestation émise le {entry.attestation.stated_time}, "
                          f"après la fin de validité de la précédente ({validity})", index)

    def _check_notarial(self, item_index: int):
        state = self.state
        notarial = state.notarial
        if notarial is None:
            raise RecordFormatError("NAW sans état notarial", section="Notarial")
        if not all(certificate_signature_valid(link) for link in notarial.certificate.chain()):
            self.fail(DiagnosticCategory.CHAIN_INVALID,
                      f"certificat {notarial.certificate.subject} mal signé par son émetteur")
        for hash_fn, digest in notarial.history:
            if item_digest(state, item_index, hash_fn, self.ctx) != digest:
                self.fail(DiagnosticCategory.DIGEST_MISMATCH,
                          f"historique: empreinte {hash_fn} différente")
        entry = state.last_entry
        if entry.shared is None and entry.attestation.stated_time != notarial.original_time:
            self.fail(DiagnosticCategory.CHAIN_INVALID,
                      f"attestation datée du {entry.attestation.stated_time}, "
                      f"t0={notarial.original_time}")


def verify_proof(record: Union[EvidenceRecord, ProofState], docs: Documents,
                 inv: Optional[SecurityInventory] = None, at: Optional[TimeInstant] = None,
                 documents: Optional[Sequence[str]] = None,
                 trusted_roots: Optional[Sequence[Certificate]] = None,
                 skip: bool = True) -> Verdict:
    """
    Vérifie une preuve d'existence.

    Args:
        record (EvidenceRecord | ProofState): Preuve à vérifier
        docs: Documents fournis (tous, ou le sous-ensemble vérifié)
        inv (Optional[SecurityInventory]): Inventaire courant
        at (Optional[TimeInstant]): Date de la vérification (par défaut la
            date de collecte des dernières données de vérification)
        documents (Optional[Sequence[str]]): Documents à vérifier (par
            défaut tous ceux de la preuve, les arbres de la structure étant
            alors contrôlés en entier)
        trusted_roots (Optional[Sequence[Certificate]]): Racines acceptées
        skip (bool): Emprunter les liens de la liste à sauts (SLS)

    Returns:
        Verdict: Verdict global et par document
    """
    state = record.state if isinstance(record, EvidenceRecord) else record
    inv = inv or default_lenstra_inventory()
    verdict = Verdict()
    if not state.entries:
        verdict.diagnostics.append(Diagnostic(DiagnosticCategory.MISSING_DOCUMENT,
                                              "preuve sans attestation"))
        return verdict
    at = at or state.last_entry.verification_data.collected_at
    available = documents_by_name(docs)
    names = list(documents) if documents is not None else list(state.document_names)

    for name in names:
        check = _DocumentCheck(state, name, available, inv, at, trusted_roots, skip)
        verdict.documents.append(check.run())
    if documents is None:
        verdict.diagnostics.extend(audit_trees(state, available))

    logger.info("Vérification %s: %d document(s), %s", state.kind, len(names),
                "valide" if verdict.valid else "invalide")
    return verdict


def sls_verify(record: Union[EvidenceRecord, ProofState], doc: InputData,
               inv: Optional[SecurityInventory] = None, at: Optional[TimeInstant] = None,
               docs: Documents = None, skip: bool = True) -> Verdict:
    """Vérifie un seul document d'une SLS en suivant les liens de saut."""
    state = record.state if isinstance(record, EvidenceRecord) else record
    if state.kind is not StructureKind.SLS:
        raise ValueError(f"Preuve {state.kind}: SLS attendue")
    available = documents_by_name(docs)
    available[doc.name] = doc
    return verify_proof(state, available, inv, at, documents=[doc.name], skip=skip)
